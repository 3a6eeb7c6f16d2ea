//! Reverse-mode automatic differentiation over dense arrays.
//!
//! Operations record themselves onto a [`Tape`] during the forward pass;
//! [`Tape::backward`] replays the recorded graph in reverse creation order
//! (a valid topological order, since parents always precede children) and
//! accumulates gradients exactly once per node.
//!
//! A tape belongs to a single training step: build the graph, call
//! `backward`, read gradients, drop the tape. Nodes are never mutated after
//! creation except for their gradient slots.

use crate::error::{Error, Result};
use crate::neural::kernels;
use crate::neural::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeId(pub(crate) usize);

/// Batch statistics produced by a train-mode batch-norm op, used by the
/// layer wrapper to update running averages.
#[derive(Clone, Debug)]
pub struct BatchStats {
    pub mean: Vec<f64>,
    /// Biased (1/n) per-channel variance.
    pub var: Vec<f64>,
    /// Elements per channel in the batch.
    pub count: usize,
}

enum Op {
    Leaf,
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Neg(NodeId),
    AddScalar(NodeId),
    Scale(NodeId, f64),
    Log(NodeId),
    Sigmoid(NodeId),
    Tanh(NodeId),
    Relu(NodeId),
    LeakyRelu(NodeId, f64),
    Clamp(NodeId, f64, f64),
    SumAll(NodeId),
    MeanAll(NodeId),
    /// [b, n] -> [n], mean over the batch axis.
    MeanRows(NodeId),
    /// [b, c, l] -> [b, c], mean over the trailing axis.
    MeanLast(NodeId),
    Dense {
        x: NodeId,
        w: NodeId,
        b: Option<NodeId>,
    },
    Conv1d {
        x: NodeId,
        w: NodeId,
        b: NodeId,
        stride: usize,
        padding: usize,
        cols: Vec<f64>,
    },
    ConvTranspose1d {
        x: NodeId,
        w: NodeId,
        b: NodeId,
        stride: usize,
        padding: usize,
    },
    BatchNormTrain {
        x: NodeId,
        gamma: NodeId,
        beta: NodeId,
        eps: f64,
        xhat: Vec<f64>,
        inv_std: Vec<f64>,
        var: Vec<f64>,
    },
    BatchNormEval {
        x: NodeId,
        gamma: NodeId,
        beta: NodeId,
        mean: Vec<f64>,
        inv_std: Vec<f64>,
    },
    /// [b, n] -> [b, n]: log(|DFT(row)| + eps) per frequency bin.
    LogMagSpectrum {
        x: NodeId,
        eps: f64,
        re: Vec<f64>,
        im: Vec<f64>,
        mag: Vec<f64>,
    },
    /// [b, t, i] -> [b, i] at a fixed time index.
    SliceSeq { x: NodeId, t: usize },
    /// T nodes of [b, h] -> [b, t, h].
    StackSeq(Vec<NodeId>),
    /// [b, c, l] -> [b, c] at a fixed position.
    SliceChan { x: NodeId, t: usize },
    /// L nodes of [b, c] -> [b, c, l].
    StackChan(Vec<NodeId>),
    Reshape(NodeId),
}

impl Op {
    fn parents(&self, out: &mut Vec<usize>) {
        out.clear();
        match self {
            Op::Leaf => {}
            Op::Add(a, b) | Op::Sub(a, b) | Op::Mul(a, b) => {
                out.push(a.0);
                out.push(b.0);
            }
            Op::Neg(a)
            | Op::AddScalar(a)
            | Op::Scale(a, _)
            | Op::Log(a)
            | Op::Sigmoid(a)
            | Op::Tanh(a)
            | Op::Relu(a)
            | Op::LeakyRelu(a, _)
            | Op::Clamp(a, _, _)
            | Op::SumAll(a)
            | Op::MeanAll(a)
            | Op::MeanRows(a)
            | Op::MeanLast(a)
            | Op::Reshape(a)
            | Op::SliceSeq { x: a, .. }
            | Op::SliceChan { x: a, .. }
            | Op::LogMagSpectrum { x: a, .. } => out.push(a.0),
            Op::Dense { x, w, b } => {
                out.push(x.0);
                out.push(w.0);
                if let Some(b) = b {
                    out.push(b.0);
                }
            }
            Op::Conv1d { x, w, b, .. } | Op::ConvTranspose1d { x, w, b, .. } => {
                out.push(x.0);
                out.push(w.0);
                out.push(b.0);
            }
            Op::BatchNormTrain { x, gamma, beta, .. }
            | Op::BatchNormEval { x, gamma, beta, .. } => {
                out.push(x.0);
                out.push(gamma.0);
                out.push(beta.0);
            }
            Op::StackSeq(steps) | Op::StackChan(steps) => {
                out.extend(steps.iter().map(|s| s.0));
            }
        }
    }
}

struct Node {
    values: Tensor,
    requires_grad: bool,
    op: Op,
}

pub struct Tape {
    nodes: Vec<Node>,
    grads: Vec<Option<Vec<f64>>>,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape {
            nodes: Vec::new(),
            grads: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, values: Tensor, requires_grad: bool, op: Op) -> NodeId {
        self.nodes.push(Node {
            values,
            requires_grad,
            op,
        });
        self.grads.push(None);
        NodeId(self.nodes.len() - 1)
    }

    fn wants_grad(&self, id: NodeId) -> bool {
        self.nodes[id.0].requires_grad
    }

    pub fn leaf(&mut self, values: Tensor, requires_grad: bool) -> NodeId {
        self.push(values, requires_grad, Op::Leaf)
    }

    pub fn constant(&mut self, values: Tensor) -> NodeId {
        self.leaf(values, false)
    }

    pub fn shape(&self, id: NodeId) -> &[usize] {
        self.nodes[id.0].values.shape()
    }

    pub fn values(&self, id: NodeId) -> &[f64] {
        self.nodes[id.0].values.data()
    }

    pub fn value_tensor(&self, id: NodeId) -> &Tensor {
        &self.nodes[id.0].values
    }

    pub fn scalar_value(&self, id: NodeId) -> f64 {
        self.nodes[id.0].values.item()
    }

    /// Gradient from the last backward pass, if this node received one.
    pub fn grad(&self, id: NodeId) -> Option<&[f64]> {
        self.grads[id.0].as_deref()
    }

    // ─── elementwise and scalar ops ─────────────────────────────────────

    fn same_shape(&self, a: NodeId, b: NodeId, what: &str) -> Result<()> {
        if self.shape(a) != self.shape(b) {
            return Err(Error::Dimension(format!(
                "{what}: shape {:?} vs {:?}",
                self.shape(a),
                self.shape(b)
            )));
        }
        Ok(())
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.same_shape(a, b, "add")?;
        let data: Vec<f64> = self
            .values(a)
            .iter()
            .zip(self.values(b))
            .map(|(x, y)| x + y)
            .collect();
        let t = Tensor::from_vec(self.shape(a), data)?;
        let rg = self.wants_grad(a) || self.wants_grad(b);
        Ok(self.push(t, rg, Op::Add(a, b)))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.same_shape(a, b, "sub")?;
        let data: Vec<f64> = self
            .values(a)
            .iter()
            .zip(self.values(b))
            .map(|(x, y)| x - y)
            .collect();
        let t = Tensor::from_vec(self.shape(a), data)?;
        let rg = self.wants_grad(a) || self.wants_grad(b);
        Ok(self.push(t, rg, Op::Sub(a, b)))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.same_shape(a, b, "mul")?;
        let data: Vec<f64> = self
            .values(a)
            .iter()
            .zip(self.values(b))
            .map(|(x, y)| x * y)
            .collect();
        let t = Tensor::from_vec(self.shape(a), data)?;
        let rg = self.wants_grad(a) || self.wants_grad(b);
        Ok(self.push(t, rg, Op::Mul(a, b)))
    }

    pub fn neg(&mut self, a: NodeId) -> NodeId {
        let data: Vec<f64> = self.values(a).iter().map(|x| -x).collect();
        let t = Tensor::from_vec(self.shape(a), data).expect("same shape");
        let rg = self.wants_grad(a);
        self.push(t, rg, Op::Neg(a))
    }

    pub fn add_scalar(&mut self, a: NodeId, c: f64) -> NodeId {
        let data: Vec<f64> = self.values(a).iter().map(|x| x + c).collect();
        let t = Tensor::from_vec(self.shape(a), data).expect("same shape");
        let rg = self.wants_grad(a);
        self.push(t, rg, Op::AddScalar(a))
    }

    pub fn scale(&mut self, a: NodeId, c: f64) -> NodeId {
        let data: Vec<f64> = self.values(a).iter().map(|x| x * c).collect();
        let t = Tensor::from_vec(self.shape(a), data).expect("same shape");
        let rg = self.wants_grad(a);
        self.push(t, rg, Op::Scale(a, c))
    }

    pub fn log(&mut self, a: NodeId) -> NodeId {
        let data: Vec<f64> = self.values(a).iter().map(|x| x.ln()).collect();
        let t = Tensor::from_vec(self.shape(a), data).expect("same shape");
        let rg = self.wants_grad(a);
        self.push(t, rg, Op::Log(a))
    }

    pub fn sigmoid(&mut self, a: NodeId) -> NodeId {
        let data: Vec<f64> = self
            .values(a)
            .iter()
            .map(|x| 1.0 / (1.0 + (-x).exp()))
            .collect();
        let t = Tensor::from_vec(self.shape(a), data).expect("same shape");
        let rg = self.wants_grad(a);
        self.push(t, rg, Op::Sigmoid(a))
    }

    pub fn tanh(&mut self, a: NodeId) -> NodeId {
        let data: Vec<f64> = self.values(a).iter().map(|x| x.tanh()).collect();
        let t = Tensor::from_vec(self.shape(a), data).expect("same shape");
        let rg = self.wants_grad(a);
        self.push(t, rg, Op::Tanh(a))
    }

    pub fn relu(&mut self, a: NodeId) -> NodeId {
        let data: Vec<f64> = self.values(a).iter().map(|x| x.max(0.0)).collect();
        let t = Tensor::from_vec(self.shape(a), data).expect("same shape");
        let rg = self.wants_grad(a);
        self.push(t, rg, Op::Relu(a))
    }

    pub fn leaky_relu(&mut self, a: NodeId, slope: f64) -> NodeId {
        let data: Vec<f64> = self
            .values(a)
            .iter()
            .map(|&x| if x > 0.0 { x } else { slope * x })
            .collect();
        let t = Tensor::from_vec(self.shape(a), data).expect("same shape");
        let rg = self.wants_grad(a);
        self.push(t, rg, Op::LeakyRelu(a, slope))
    }

    /// Clamp to [lo, hi]; gradient passes through only where unclamped.
    pub fn clamp(&mut self, a: NodeId, lo: f64, hi: f64) -> NodeId {
        let data: Vec<f64> = self.values(a).iter().map(|x| x.clamp(lo, hi)).collect();
        let t = Tensor::from_vec(self.shape(a), data).expect("same shape");
        let rg = self.wants_grad(a);
        self.push(t, rg, Op::Clamp(a, lo, hi))
    }

    // ─── reductions ─────────────────────────────────────────────────────

    pub fn sum_all(&mut self, a: NodeId) -> NodeId {
        let s: f64 = self.values(a).iter().sum();
        let rg = self.wants_grad(a);
        self.push(Tensor::scalar(s), rg, Op::SumAll(a))
    }

    pub fn mean_all(&mut self, a: NodeId) -> Result<NodeId> {
        let n = self.values(a).len();
        if n == 0 {
            return Err(Error::EmptyInput("mean of empty tensor".into()));
        }
        let s: f64 = self.values(a).iter().sum::<f64>() / n as f64;
        let rg = self.wants_grad(a);
        Ok(self.push(Tensor::scalar(s), rg, Op::MeanAll(a)))
    }

    pub fn mean_rows(&mut self, a: NodeId) -> Result<NodeId> {
        let shape = self.shape(a);
        if shape.len() != 2 || shape[0] == 0 {
            return Err(Error::Dimension(format!(
                "mean_rows wants non-empty [b, n], got {shape:?}"
            )));
        }
        let (b, n) = (shape[0], shape[1]);
        let vals = self.values(a);
        let mut out = vec![0.0; n];
        for row in vals.chunks_exact(n) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        for o in &mut out {
            *o /= b as f64;
        }
        let rg = self.wants_grad(a);
        let t = Tensor::from_vec(&[n], out)?;
        Ok(self.push(t, rg, Op::MeanRows(a)))
    }

    pub fn mean_last(&mut self, a: NodeId) -> Result<NodeId> {
        let shape = self.shape(a);
        if shape.len() != 3 || shape[2] == 0 {
            return Err(Error::Dimension(format!(
                "mean_last wants non-empty [b, c, l], got {shape:?}"
            )));
        }
        let (b, c, l) = (shape[0], shape[1], shape[2]);
        let vals = self.values(a);
        let mut out = vec![0.0; b * c];
        for (o, chunk) in out.iter_mut().zip(vals.chunks_exact(l)) {
            *o = chunk.iter().sum::<f64>() / l as f64;
        }
        let rg = self.wants_grad(a);
        let t = Tensor::from_vec(&[b, c], out)?;
        Ok(self.push(t, rg, Op::MeanLast(a)))
    }

    // ─── affine / structured ops ────────────────────────────────────────

    /// y = x·wᵀ (+ b): x is [batch, in], w is [out, in], b is [out].
    pub fn dense(&mut self, x: NodeId, w: NodeId, b: Option<NodeId>) -> Result<NodeId> {
        let xs = self.shape(x);
        let ws = self.shape(w);
        if xs.len() != 2 || ws.len() != 2 || xs[1] != ws[1] {
            return Err(Error::Dimension(format!(
                "dense: x {xs:?} vs w {ws:?} (inner dimensions must match)"
            )));
        }
        let (batch, in_dim, out_dim) = (xs[0], xs[1], ws[0]);
        if let Some(b) = b {
            if self.shape(b) != [out_dim] {
                return Err(Error::Dimension(format!(
                    "dense: bias {:?} vs out dim {out_dim}",
                    self.shape(b)
                )));
            }
        }
        let mut out = vec![0.0; batch * out_dim];
        kernels::matmul_nt_acc(
            &mut out,
            self.values(x),
            self.values(w),
            batch,
            in_dim,
            out_dim,
        );
        if let Some(bid) = b {
            let bias = self.values(bid);
            for row in out.chunks_exact_mut(out_dim) {
                for (o, bv) in row.iter_mut().zip(bias) {
                    *o += bv;
                }
            }
        }
        let rg = self.wants_grad(x)
            || self.wants_grad(w)
            || b.map(|b| self.wants_grad(b)).unwrap_or(false);
        let t = Tensor::from_vec(&[batch, out_dim], out)?;
        Ok(self.push(t, rg, Op::Dense { x, w, b }))
    }

    /// Strided cross-correlation. x is [batch, c_in, len], w is
    /// [c_out, c_in, kernel], b is [c_out].
    pub fn conv1d(
        &mut self,
        x: NodeId,
        w: NodeId,
        b: NodeId,
        stride: usize,
        padding: usize,
    ) -> Result<NodeId> {
        let xs = self.shape(x).to_vec();
        let ws = self.shape(w).to_vec();
        if xs.len() != 3 || ws.len() != 3 || xs[1] != ws[1] {
            return Err(Error::Dimension(format!(
                "conv1d: x {xs:?} vs w {ws:?} (want [b,ci,l] and [co,ci,k])"
            )));
        }
        if stride < 1 || ws[2] < 1 {
            return Err(Error::Contract(
                "conv1d: stride and kernel must be >= 1".into(),
            ));
        }
        let (batch, c_in, len) = (xs[0], xs[1], xs[2]);
        let (c_out, kernel) = (ws[0], ws[2]);
        if self.shape(b) != [c_out] {
            return Err(Error::Dimension(format!(
                "conv1d: bias {:?} vs c_out {c_out}",
                self.shape(b)
            )));
        }
        if len + 2 * padding < kernel {
            return Err(Error::Dimension(format!(
                "conv1d: len {len} + 2*padding {padding} shorter than kernel {kernel}"
            )));
        }
        let out_len = (len + 2 * padding - kernel) / stride + 1;
        if out_len < 1 {
            return Err(Error::Dimension("conv1d: output length < 1".into()));
        }

        let mut cols = vec![0.0; c_in * kernel * batch * out_len];
        kernels::im2col(
            &mut cols,
            self.values(x),
            batch,
            c_in,
            len,
            kernel,
            stride,
            padding,
            out_len,
        );
        // [c_out, ci·k] · [ci·k, batch·out_len]
        let mut y2d = vec![0.0; c_out * batch * out_len];
        kernels::matmul_nn_acc(
            &mut y2d,
            self.values(w),
            &cols,
            c_out,
            c_in * kernel,
            batch * out_len,
        );
        let mut out = vec![0.0; batch * c_out * out_len];
        kernels::cbl_to_bcl(&mut out, &y2d, batch, c_out, out_len);
        let bias = self.values(b);
        for bi in 0..batch {
            for co in 0..c_out {
                let seg = &mut out[(bi * c_out + co) * out_len..(bi * c_out + co + 1) * out_len];
                for v in seg {
                    *v += bias[co];
                }
            }
        }
        let rg = self.wants_grad(x) || self.wants_grad(w) || self.wants_grad(b);
        let t = Tensor::from_vec(&[batch, c_out, out_len], out)?;
        Ok(self.push(
            t,
            rg,
            Op::Conv1d {
                x,
                w,
                b,
                stride,
                padding,
                cols,
            },
        ))
    }

    /// Fractional-strided (transposed) convolution: the exact linear adjoint
    /// of [`Tape::conv1d`] with the same geometry. x is [batch, c_in, len],
    /// w is [c_in, c_out, kernel], b is [c_out]; output length is
    /// (len−1)·stride − 2·padding + kernel.
    pub fn conv1d_transpose(
        &mut self,
        x: NodeId,
        w: NodeId,
        b: NodeId,
        stride: usize,
        padding: usize,
    ) -> Result<NodeId> {
        let xs = self.shape(x).to_vec();
        let ws = self.shape(w).to_vec();
        if xs.len() != 3 || ws.len() != 3 || xs[1] != ws[0] {
            return Err(Error::Dimension(format!(
                "conv1d_transpose: x {xs:?} vs w {ws:?} (want [b,ci,l] and [ci,co,k])"
            )));
        }
        if stride < 1 || ws[2] < 1 {
            return Err(Error::Contract(
                "conv1d_transpose: stride and kernel must be >= 1".into(),
            ));
        }
        let (batch, c_in, len) = (xs[0], xs[1], xs[2]);
        let (c_out, kernel) = (ws[1], ws[2]);
        if self.shape(b) != [c_out] {
            return Err(Error::Dimension(format!(
                "conv1d_transpose: bias {:?} vs c_out {c_out}",
                self.shape(b)
            )));
        }
        let out_len = ((len - 1) * stride + kernel) as isize - 2 * padding as isize;
        if out_len < 1 {
            return Err(Error::Dimension(format!(
                "conv1d_transpose: output length {out_len} < 1"
            )));
        }
        let out_len = out_len as usize;

        // u = wᵀ·x2d, then scatter u onto the upsampled grid.
        let mut x2d = vec![0.0; batch * c_in * len];
        kernels::bcl_to_cbl(&mut x2d, self.values(x), batch, c_in, len);
        let mut u = vec![0.0; c_out * kernel * batch * len];
        kernels::matmul_tn_acc(
            &mut u,
            self.values(w),
            &x2d,
            c_out * kernel,
            c_in,
            batch * len,
        );
        let mut out = vec![0.0; batch * c_out * out_len];
        kernels::col2im_acc(
            &mut out, &u, batch, c_out, out_len, kernel, stride, padding, len,
        );
        let bias = self.values(b);
        for bi in 0..batch {
            for co in 0..c_out {
                let seg = &mut out[(bi * c_out + co) * out_len..(bi * c_out + co + 1) * out_len];
                for v in seg {
                    *v += bias[co];
                }
            }
        }
        let rg = self.wants_grad(x) || self.wants_grad(w) || self.wants_grad(b);
        let t = Tensor::from_vec(&[batch, c_out, out_len], out)?;
        Ok(self.push(
            t,
            rg,
            Op::ConvTranspose1d {
                x,
                w,
                b,
                stride,
                padding,
            },
        ))
    }

    /// Train-mode batch normalization over [batch, channels, len] with batch
    /// statistics per channel. `eps` acts as a variance floor. Returns the
    /// output node plus the batch statistics for running-average updates.
    pub fn batchnorm_train(
        &mut self,
        x: NodeId,
        gamma: NodeId,
        beta: NodeId,
        eps: f64,
    ) -> Result<(NodeId, BatchStats)> {
        let xs = self.shape(x).to_vec();
        if xs.len() != 3 {
            return Err(Error::Dimension(format!(
                "batchnorm: want [b, c, l], got {xs:?}"
            )));
        }
        let (batch, ch, len) = (xs[0], xs[1], xs[2]);
        if batch < 2 {
            return Err(Error::Degenerate(format!(
                "batchnorm train mode needs batch >= 2, got {batch}"
            )));
        }
        if self.shape(gamma) != [ch] || self.shape(beta) != [ch] {
            return Err(Error::Dimension("batchnorm: scale/shift vs channels".into()));
        }
        let n = batch * len;
        let vals = self.values(x);
        let mut mean = vec![0.0; ch];
        let mut var = vec![0.0; ch];
        for c in 0..ch {
            let mut s = 0.0;
            for b in 0..batch {
                let seg = &vals[(b * ch + c) * len..(b * ch + c + 1) * len];
                s += seg.iter().sum::<f64>();
            }
            mean[c] = s / n as f64;
            let mut v = 0.0;
            for b in 0..batch {
                let seg = &vals[(b * ch + c) * len..(b * ch + c + 1) * len];
                v += seg.iter().map(|x| (x - mean[c]).powi(2)).sum::<f64>();
            }
            var[c] = v / n as f64;
        }
        let inv_std: Vec<f64> = var.iter().map(|&v| 1.0 / v.max(eps).sqrt()).collect();
        let mut xhat = vec![0.0; vals.len()];
        let g = self.values(gamma);
        let bta = self.values(beta);
        let mut out = vec![0.0; vals.len()];
        for b in 0..batch {
            for c in 0..ch {
                let off = (b * ch + c) * len;
                for i in 0..len {
                    let xh = (vals[off + i] - mean[c]) * inv_std[c];
                    xhat[off + i] = xh;
                    out[off + i] = g[c] * xh + bta[c];
                }
            }
        }
        let rg = self.wants_grad(x) || self.wants_grad(gamma) || self.wants_grad(beta);
        let t = Tensor::from_vec(&xs, out)?;
        let stats = BatchStats {
            mean: mean.clone(),
            var: var.clone(),
            count: n,
        };
        let id = self.push(
            t,
            rg,
            Op::BatchNormTrain {
                x,
                gamma,
                beta,
                eps,
                xhat,
                inv_std,
                var,
            },
        );
        Ok((id, stats))
    }

    /// Eval-mode batch normalization with fixed running statistics.
    pub fn batchnorm_eval(
        &mut self,
        x: NodeId,
        gamma: NodeId,
        beta: NodeId,
        running_mean: &[f64],
        running_var: &[f64],
        eps: f64,
    ) -> Result<NodeId> {
        let xs = self.shape(x).to_vec();
        if xs.len() != 3 {
            return Err(Error::Dimension(format!(
                "batchnorm: want [b, c, l], got {xs:?}"
            )));
        }
        let (batch, ch, len) = (xs[0], xs[1], xs[2]);
        if self.shape(gamma) != [ch]
            || self.shape(beta) != [ch]
            || running_mean.len() != ch
            || running_var.len() != ch
        {
            return Err(Error::Dimension(
                "batchnorm: parameter lengths vs channels".into(),
            ));
        }
        let inv_std: Vec<f64> = running_var
            .iter()
            .map(|&v| 1.0 / v.max(eps).sqrt())
            .collect();
        let vals = self.values(x);
        let g = self.values(gamma);
        let bta = self.values(beta);
        let mut out = vec![0.0; vals.len()];
        for b in 0..batch {
            for c in 0..ch {
                let off = (b * ch + c) * len;
                for i in 0..len {
                    out[off + i] = g[c] * (vals[off + i] - running_mean[c]) * inv_std[c] + bta[c];
                }
            }
        }
        let rg = self.wants_grad(x) || self.wants_grad(gamma) || self.wants_grad(beta);
        let t = Tensor::from_vec(&xs, out)?;
        Ok(self.push(
            t,
            rg,
            Op::BatchNormEval {
                x,
                gamma,
                beta,
                mean: running_mean.to_vec(),
                inv_std,
            },
        ))
    }

    /// Per-row log-magnitude DFT spectrum: row x of length n maps to
    /// log(|F(x)_k| + eps) for k = 0..n−1.
    pub fn log_mag_spectrum(&mut self, x: NodeId, eps: f64) -> Result<NodeId> {
        if eps <= 0.0 {
            return Err(Error::Contract("log_mag_spectrum: eps must be > 0".into()));
        }
        let xs = self.shape(x).to_vec();
        if xs.len() != 2 || xs[1] == 0 {
            return Err(Error::Dimension(format!(
                "log_mag_spectrum: want non-empty [b, n], got {xs:?}"
            )));
        }
        let (batch, n) = (xs[0], xs[1]);
        let (cos_t, sin_t) = trig_tables(n);
        let vals = self.values(x);
        let mut re = vec![0.0; batch * n];
        let mut im = vec![0.0; batch * n];
        let mut mag = vec![0.0; batch * n];
        let mut out = vec![0.0; batch * n];
        for b in 0..batch {
            let row = &vals[b * n..(b + 1) * n];
            for k in 0..n {
                let mut sr = 0.0;
                let mut si = 0.0;
                let mut m = 0usize;
                for &v in row {
                    sr += v * cos_t[m];
                    si -= v * sin_t[m];
                    m += k;
                    if m >= n {
                        m -= n;
                    }
                }
                let idx = b * n + k;
                re[idx] = sr;
                im[idx] = si;
                let mg = (sr * sr + si * si).sqrt();
                mag[idx] = mg;
                out[idx] = (mg + eps).ln();
            }
        }
        let rg = self.wants_grad(x);
        let t = Tensor::from_vec(&xs, out)?;
        Ok(self.push(t, rg, Op::LogMagSpectrum { x, eps, re, im, mag }))
    }

    // ─── slicing / stacking / reshaping ─────────────────────────────────

    pub fn slice_seq(&mut self, x: NodeId, t: usize) -> Result<NodeId> {
        let xs = self.shape(x).to_vec();
        if xs.len() != 3 || t >= xs[1] {
            return Err(Error::Dimension(format!(
                "slice_seq: index {t} in shape {xs:?}"
            )));
        }
        let (batch, steps, inner) = (xs[0], xs[1], xs[2]);
        let vals = self.values(x);
        let mut out = vec![0.0; batch * inner];
        for b in 0..batch {
            let src = &vals[(b * steps + t) * inner..(b * steps + t + 1) * inner];
            out[b * inner..(b + 1) * inner].copy_from_slice(src);
        }
        let rg = self.wants_grad(x);
        let tns = Tensor::from_vec(&[batch, inner], out)?;
        Ok(self.push(tns, rg, Op::SliceSeq { x, t }))
    }

    pub fn stack_seq(&mut self, steps: &[NodeId]) -> Result<NodeId> {
        if steps.is_empty() {
            return Err(Error::EmptyInput("stack_seq of zero steps".into()));
        }
        let first = self.shape(steps[0]).to_vec();
        if first.len() != 2 {
            return Err(Error::Dimension(format!(
                "stack_seq: steps must be [b, h], got {first:?}"
            )));
        }
        let (batch, inner) = (first[0], first[1]);
        for &s in steps {
            if self.shape(s) != [batch, inner] {
                return Err(Error::Dimension("stack_seq: mismatched step shapes".into()));
            }
        }
        let t_len = steps.len();
        let mut out = vec![0.0; batch * t_len * inner];
        for (t, &sid) in steps.iter().enumerate() {
            let vals = self.values(sid);
            for b in 0..batch {
                out[(b * t_len + t) * inner..(b * t_len + t + 1) * inner]
                    .copy_from_slice(&vals[b * inner..(b + 1) * inner]);
            }
        }
        let rg = steps.iter().any(|&s| self.wants_grad(s));
        let t = Tensor::from_vec(&[batch, t_len, inner], out)?;
        Ok(self.push(t, rg, Op::StackSeq(steps.to_vec())))
    }

    pub fn slice_chan(&mut self, x: NodeId, t: usize) -> Result<NodeId> {
        let xs = self.shape(x).to_vec();
        if xs.len() != 3 || t >= xs[2] {
            return Err(Error::Dimension(format!(
                "slice_chan: index {t} in shape {xs:?}"
            )));
        }
        let (batch, ch, len) = (xs[0], xs[1], xs[2]);
        let vals = self.values(x);
        let mut out = vec![0.0; batch * ch];
        for b in 0..batch {
            for c in 0..ch {
                out[b * ch + c] = vals[(b * ch + c) * len + t];
            }
        }
        let rg = self.wants_grad(x);
        let tns = Tensor::from_vec(&[batch, ch], out)?;
        Ok(self.push(tns, rg, Op::SliceChan { x, t }))
    }

    pub fn stack_chan(&mut self, steps: &[NodeId]) -> Result<NodeId> {
        if steps.is_empty() {
            return Err(Error::EmptyInput("stack_chan of zero steps".into()));
        }
        let first = self.shape(steps[0]).to_vec();
        if first.len() != 2 {
            return Err(Error::Dimension(format!(
                "stack_chan: steps must be [b, c], got {first:?}"
            )));
        }
        let (batch, ch) = (first[0], first[1]);
        for &s in steps {
            if self.shape(s) != [batch, ch] {
                return Err(Error::Dimension("stack_chan: mismatched step shapes".into()));
            }
        }
        let len = steps.len();
        let mut out = vec![0.0; batch * ch * len];
        for (t, &sid) in steps.iter().enumerate() {
            let vals = self.values(sid);
            for b in 0..batch {
                for c in 0..ch {
                    out[(b * ch + c) * len + t] = vals[b * ch + c];
                }
            }
        }
        let rg = steps.iter().any(|&s| self.wants_grad(s));
        let t = Tensor::from_vec(&[batch, ch, len], out)?;
        Ok(self.push(t, rg, Op::StackChan(steps.to_vec())))
    }

    pub fn reshape(&mut self, x: NodeId, shape: &[usize]) -> Result<NodeId> {
        let n: usize = shape.iter().product();
        if n != self.values(x).len() {
            return Err(Error::Dimension(format!(
                "reshape: {:?} to {shape:?}",
                self.shape(x)
            )));
        }
        let t = Tensor::from_vec(shape, self.values(x).to_vec())?;
        let rg = self.wants_grad(x);
        Ok(self.push(t, rg, Op::Reshape(x)))
    }

    // ─── backward ───────────────────────────────────────────────────────

    /// Backpropagate from a scalar root. Gradients of every requires-grad
    /// node reachable from the root are populated (zeros included); each
    /// node is processed exactly once, in reverse topological order.
    pub fn backward(&mut self, root: NodeId) -> Result<()> {
        if !self.nodes[root.0].values.is_scalar() {
            return Err(Error::Contract(format!(
                "backward root must be scalar, got shape {:?}",
                self.shape(root)
            )));
        }
        for g in &mut self.grads {
            *g = None;
        }
        if !self.nodes[root.0].requires_grad {
            return Ok(());
        }

        // Mark nodes reachable from the root through requires-grad paths.
        let mut reachable = vec![false; self.nodes.len()];
        let mut stack = vec![root.0];
        let mut parents = Vec::new();
        while let Some(id) = stack.pop() {
            if reachable[id] || !self.nodes[id].requires_grad {
                continue;
            }
            reachable[id] = true;
            self.nodes[id].op.parents(&mut parents);
            stack.extend(parents.iter().copied());
        }
        for (id, r) in reachable.iter().enumerate() {
            if *r {
                self.grads[id] = Some(vec![0.0; self.nodes[id].values.numel()]);
            }
        }
        self.grads[root.0].as_mut().expect("root grad")[0] = 1.0;

        let nodes = &self.nodes;
        let grads = &mut self.grads;
        for id in (0..nodes.len()).rev() {
            if !reachable[id] {
                continue;
            }
            let g = std::mem::take(&mut grads[id]).expect("reachable grad");
            backprop_node(nodes, grads, id, &g);
            grads[id] = Some(g);
        }
        Ok(())
    }
}

/// Accumulate a contribution into a parent's gradient buffer, if it wants one.
fn acc(
    nodes: &[Node],
    grads: &mut [Option<Vec<f64>>],
    parent: NodeId,
    contrib: impl FnOnce(&mut [f64]),
) {
    if !nodes[parent.0].requires_grad {
        return;
    }
    if let Some(buf) = grads[parent.0].as_mut() {
        contrib(buf);
    }
}

fn add_into(buf: &mut [f64], src: &[f64]) {
    for (o, &v) in buf.iter_mut().zip(src) {
        *o += v;
    }
}

#[allow(clippy::too_many_lines)]
fn backprop_node(nodes: &[Node], grads: &mut [Option<Vec<f64>>], id: usize, g: &[f64]) {
    match &nodes[id].op {
        Op::Leaf => {}
        Op::Add(a, b) => {
            acc(nodes, grads, *a, |buf| add_into(buf, g));
            acc(nodes, grads, *b, |buf| add_into(buf, g));
        }
        Op::Sub(a, b) => {
            acc(nodes, grads, *a, |buf| add_into(buf, g));
            acc(nodes, grads, *b, |buf| {
                for (o, &gv) in buf.iter_mut().zip(g) {
                    *o -= gv;
                }
            });
        }
        Op::Mul(a, b) => {
            let av = nodes[a.0].values.data();
            let bv = nodes[b.0].values.data();
            acc(nodes, grads, *a, |buf| {
                for ((o, &gv), &y) in buf.iter_mut().zip(g).zip(bv) {
                    *o += gv * y;
                }
            });
            acc(nodes, grads, *b, |buf| {
                for ((o, &gv), &x) in buf.iter_mut().zip(g).zip(av) {
                    *o += gv * x;
                }
            });
        }
        Op::Neg(a) => acc(nodes, grads, *a, |buf| {
            for (o, &gv) in buf.iter_mut().zip(g) {
                *o -= gv;
            }
        }),
        Op::AddScalar(a) | Op::Reshape(a) => acc(nodes, grads, *a, |buf| add_into(buf, g)),
        Op::Scale(a, c) => {
            let c = *c;
            acc(nodes, grads, *a, |buf| {
                for (o, &gv) in buf.iter_mut().zip(g) {
                    *o += gv * c;
                }
            });
        }
        Op::Log(a) => {
            let av = nodes[a.0].values.data();
            acc(nodes, grads, *a, |buf| {
                for ((o, &gv), &x) in buf.iter_mut().zip(g).zip(av) {
                    *o += gv / x;
                }
            });
        }
        Op::Sigmoid(a) => {
            let yv = nodes[id].values.data();
            acc(nodes, grads, *a, |buf| {
                for ((o, &gv), &s) in buf.iter_mut().zip(g).zip(yv) {
                    *o += gv * s * (1.0 - s);
                }
            });
        }
        Op::Tanh(a) => {
            let yv = nodes[id].values.data();
            acc(nodes, grads, *a, |buf| {
                for ((o, &gv), &t) in buf.iter_mut().zip(g).zip(yv) {
                    *o += gv * (1.0 - t * t);
                }
            });
        }
        Op::Relu(a) => {
            let av = nodes[a.0].values.data();
            acc(nodes, grads, *a, |buf| {
                for ((o, &gv), &x) in buf.iter_mut().zip(g).zip(av) {
                    if x > 0.0 {
                        *o += gv;
                    }
                }
            });
        }
        Op::LeakyRelu(a, slope) => {
            let slope = *slope;
            let av = nodes[a.0].values.data();
            acc(nodes, grads, *a, |buf| {
                for ((o, &gv), &x) in buf.iter_mut().zip(g).zip(av) {
                    *o += gv * if x > 0.0 { 1.0 } else { slope };
                }
            });
        }
        Op::Clamp(a, lo, hi) => {
            let (lo, hi) = (*lo, *hi);
            let av = nodes[a.0].values.data();
            acc(nodes, grads, *a, |buf| {
                for ((o, &gv), &x) in buf.iter_mut().zip(g).zip(av) {
                    if x >= lo && x <= hi {
                        *o += gv;
                    }
                }
            });
        }
        Op::SumAll(a) => {
            let gv = g[0];
            acc(nodes, grads, *a, |buf| {
                for o in buf.iter_mut() {
                    *o += gv;
                }
            });
        }
        Op::MeanAll(a) => {
            let n = nodes[a.0].values.numel();
            let gv = g[0] / n as f64;
            acc(nodes, grads, *a, |buf| {
                for o in buf.iter_mut() {
                    *o += gv;
                }
            });
        }
        Op::MeanRows(a) => {
            let shape = nodes[a.0].values.shape();
            let (b, n) = (shape[0], shape[1]);
            let scale = 1.0 / b as f64;
            acc(nodes, grads, *a, |buf| {
                for row in buf.chunks_exact_mut(n) {
                    for (o, &gv) in row.iter_mut().zip(g) {
                        *o += gv * scale;
                    }
                }
            });
        }
        Op::MeanLast(a) => {
            let l = nodes[a.0].values.shape()[2];
            let scale = 1.0 / l as f64;
            acc(nodes, grads, *a, |buf| {
                for (chunk, &gv) in buf.chunks_exact_mut(l).zip(g) {
                    for o in chunk.iter_mut() {
                        *o += gv * scale;
                    }
                }
            });
        }
        Op::Dense { x, w, b } => {
            let xs = nodes[x.0].values.shape();
            let ws = nodes[w.0].values.shape();
            let (batch, in_dim, out_dim) = (xs[0], xs[1], ws[0]);
            let xv = nodes[x.0].values.data();
            let wv = nodes[w.0].values.data();
            // dx += g·w  ([batch,out]·[out,in])
            acc(nodes, grads, *x, |buf| {
                kernels::matmul_nn_acc(buf, g, wv, batch, out_dim, in_dim);
            });
            // dw += gᵀ·x ([out,batch]·[batch,in])
            acc(nodes, grads, *w, |buf| {
                kernels::matmul_tn_acc(buf, g, xv, out_dim, batch, in_dim);
            });
            if let Some(b) = b {
                acc(nodes, grads, *b, |buf| {
                    for row in g.chunks_exact(out_dim) {
                        add_into(buf, row);
                    }
                });
            }
        }
        Op::Conv1d {
            x,
            w,
            b,
            stride,
            padding,
            cols,
        } => {
            let (stride, padding) = (*stride, *padding);
            let xs = nodes[x.0].values.shape();
            let ws = nodes[w.0].values.shape();
            let (batch, c_in, len) = (xs[0], xs[1], xs[2]);
            let (c_out, kernel) = (ws[0], ws[2]);
            let out_len = nodes[id].values.shape()[2];
            let width = batch * out_len;

            let mut g2d = vec![0.0; g.len()];
            kernels::bcl_to_cbl(&mut g2d, g, batch, c_out, out_len);

            // dw += g2d·colsᵀ
            acc(nodes, grads, *w, |buf| {
                kernels::matmul_nt_acc(buf, &g2d, cols, c_out, width, c_in * kernel);
            });
            if nodes[x.0].requires_grad {
                // dcols = wᵀ·g2d, folded back onto the signal grid.
                let wv = nodes[w.0].values.data();
                let mut dcols = vec![0.0; c_in * kernel * width];
                kernels::matmul_tn_acc(&mut dcols, wv, &g2d, c_in * kernel, c_out, width);
                acc(nodes, grads, *x, |buf| {
                    kernels::col2im_acc(
                        buf, &dcols, batch, c_in, len, kernel, stride, padding, out_len,
                    );
                });
            }
            acc(nodes, grads, *b, |buf| {
                for (co, o) in buf.iter_mut().enumerate() {
                    *o += g2d[co * width..(co + 1) * width].iter().sum::<f64>();
                }
            });
        }
        Op::ConvTranspose1d {
            x,
            w,
            b,
            stride,
            padding,
        } => {
            let (stride, padding) = (*stride, *padding);
            let xs = nodes[x.0].values.shape();
            let ws = nodes[w.0].values.shape();
            let (batch, c_in, len) = (xs[0], xs[1], xs[2]);
            let (c_out, kernel) = (ws[1], ws[2]);
            let out_len = nodes[id].values.shape()[2];

            // du = unfold of the upstream gradient: [c_out·k, batch·len]
            let mut du = vec![0.0; c_out * kernel * batch * len];
            kernels::im2col(&mut du, g, batch, c_out, out_len, kernel, stride, padding, len);
            if nodes[x.0].requires_grad {
                // dx2d = w·du ([c_in, c_out·k]·[c_out·k, batch·len])
                let wv = nodes[w.0].values.data();
                let mut dx2d = vec![0.0; batch * c_in * len];
                kernels::matmul_nn_acc(&mut dx2d, wv, &du, c_in, c_out * kernel, batch * len);
                let mut dx = vec![0.0; batch * c_in * len];
                kernels::cbl_to_bcl(&mut dx, &dx2d, batch, c_in, len);
                acc(nodes, grads, *x, |buf| add_into(buf, &dx));
            }
            if nodes[w.0].requires_grad {
                // dw += x2d·duᵀ
                let mut x2d = vec![0.0; batch * c_in * len];
                kernels::bcl_to_cbl(&mut x2d, nodes[x.0].values.data(), batch, c_in, len);
                acc(nodes, grads, *w, |buf| {
                    kernels::matmul_nt_acc(buf, &x2d, &du, c_in, batch * len, c_out * kernel);
                });
            }
            acc(nodes, grads, *b, |buf| {
                for bi in 0..batch {
                    for (co, o) in buf.iter_mut().enumerate() {
                        let seg = &g[(bi * c_out + co) * out_len..(bi * c_out + co + 1) * out_len];
                        *o += seg.iter().sum::<f64>();
                    }
                }
            });
        }
        Op::BatchNormTrain {
            x,
            gamma,
            beta,
            eps,
            xhat,
            inv_std,
            var,
        } => {
            let eps = *eps;
            let xs = nodes[x.0].values.shape();
            let (batch, ch, len) = (xs[0], xs[1], xs[2]);
            let n = (batch * len) as f64;
            let gv = nodes[gamma.0].values.data();

            acc(nodes, grads, *gamma, |buf| {
                for b in 0..batch {
                    for c in 0..ch {
                        let off = (b * ch + c) * len;
                        let mut s = 0.0;
                        for i in 0..len {
                            s += g[off + i] * xhat[off + i];
                        }
                        buf[c] += s;
                    }
                }
            });
            acc(nodes, grads, *beta, |buf| {
                for b in 0..batch {
                    for c in 0..ch {
                        let off = (b * ch + c) * len;
                        buf[c] += g[off..off + len].iter().sum::<f64>();
                    }
                }
            });
            if nodes[x.0].requires_grad {
                let mut sum_dxhat = vec![0.0; ch];
                let mut sum_dxhat_xhat = vec![0.0; ch];
                for b in 0..batch {
                    for c in 0..ch {
                        let off = (b * ch + c) * len;
                        for i in 0..len {
                            let dxh = g[off + i] * gv[c];
                            sum_dxhat[c] += dxh;
                            sum_dxhat_xhat[c] += dxh * xhat[off + i];
                        }
                    }
                }
                acc(nodes, grads, *x, |buf| {
                    for b in 0..batch {
                        for c in 0..ch {
                            let off = (b * ch + c) * len;
                            // The variance path vanishes when the floor is
                            // active (the normalizer is constant there).
                            let floored = var[c] <= eps;
                            for i in 0..len {
                                let dxh = g[off + i] * gv[c];
                                let corr = if floored {
                                    sum_dxhat[c] / n
                                } else {
                                    (sum_dxhat[c] + xhat[off + i] * sum_dxhat_xhat[c]) / n
                                };
                                buf[off + i] += inv_std[c] * (dxh - corr);
                            }
                        }
                    }
                });
            }
        }
        Op::BatchNormEval {
            x,
            gamma,
            beta,
            mean,
            inv_std,
        } => {
            let xs = nodes[x.0].values.shape();
            let (batch, ch, len) = (xs[0], xs[1], xs[2]);
            let gv = nodes[gamma.0].values.data();
            let xv = nodes[x.0].values.data();
            acc(nodes, grads, *x, |buf| {
                for b in 0..batch {
                    for c in 0..ch {
                        let off = (b * ch + c) * len;
                        let k = gv[c] * inv_std[c];
                        for i in 0..len {
                            buf[off + i] += g[off + i] * k;
                        }
                    }
                }
            });
            acc(nodes, grads, *gamma, |buf| {
                for b in 0..batch {
                    for c in 0..ch {
                        let off = (b * ch + c) * len;
                        let mut s = 0.0;
                        for i in 0..len {
                            s += g[off + i] * (xv[off + i] - mean[c]) * inv_std[c];
                        }
                        buf[c] += s;
                    }
                }
            });
            acc(nodes, grads, *beta, |buf| {
                for b in 0..batch {
                    for c in 0..ch {
                        let off = (b * ch + c) * len;
                        buf[c] += g[off..off + len].iter().sum::<f64>();
                    }
                }
            });
        }
        Op::LogMagSpectrum {
            x,
            eps,
            re,
            im,
            mag,
        } => {
            let eps = *eps;
            let xs = nodes[x.0].values.shape();
            let (batch, n) = (xs[0], xs[1]);
            let (cos_t, sin_t) = trig_tables(n);
            acc(nodes, grads, *x, |buf| {
                for b in 0..batch {
                    for k in 0..n {
                        let idx = b * n + k;
                        let m = mag[idx];
                        let denom = m.max(1e-150) * (m + eps);
                        let cr = g[idx] * re[idx] / denom;
                        let ci = g[idx] * im[idx] / denom;
                        if cr == 0.0 && ci == 0.0 {
                            continue;
                        }
                        let row = &mut buf[b * n..(b + 1) * n];
                        let mut t = 0usize;
                        for o in row.iter_mut() {
                            *o += cr * cos_t[t] - ci * sin_t[t];
                            t += k;
                            if t >= n {
                                t -= n;
                            }
                        }
                    }
                }
            });
        }
        Op::SliceSeq { x, t } => {
            let t = *t;
            let xs = nodes[x.0].values.shape();
            let (batch, steps, inner) = (xs[0], xs[1], xs[2]);
            acc(nodes, grads, *x, |buf| {
                for b in 0..batch {
                    let dst = &mut buf[(b * steps + t) * inner..(b * steps + t + 1) * inner];
                    add_into(dst, &g[b * inner..(b + 1) * inner]);
                }
            });
        }
        Op::StackSeq(steps) => {
            let t_len = steps.len();
            let batch = nodes[steps[0].0].values.shape()[0];
            let inner = nodes[steps[0].0].values.shape()[1];
            for (t, sid) in steps.iter().enumerate() {
                acc(nodes, grads, *sid, |buf| {
                    for b in 0..batch {
                        let src = &g[(b * t_len + t) * inner..(b * t_len + t + 1) * inner];
                        add_into(&mut buf[b * inner..(b + 1) * inner], src);
                    }
                });
            }
        }
        Op::SliceChan { x, t } => {
            let t = *t;
            let xs = nodes[x.0].values.shape();
            let (batch, ch, len) = (xs[0], xs[1], xs[2]);
            acc(nodes, grads, *x, |buf| {
                for b in 0..batch {
                    for c in 0..ch {
                        buf[(b * ch + c) * len + t] += g[b * ch + c];
                    }
                }
            });
        }
        Op::StackChan(steps) => {
            let len = steps.len();
            let batch = nodes[steps[0].0].values.shape()[0];
            let ch = nodes[steps[0].0].values.shape()[1];
            for (t, sid) in steps.iter().enumerate() {
                acc(nodes, grads, *sid, |buf| {
                    for b in 0..batch {
                        for c in 0..ch {
                            buf[b * ch + c] += g[(b * ch + c) * len + t];
                        }
                    }
                });
            }
        }
    }
}

/// cos/sin of 2π·m/n for m = 0..n−1.
fn trig_tables(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cos_t = vec![0.0; n];
    let mut sin_t = vec![0.0; n];
    for (m, (c, s)) in cos_t.iter_mut().zip(sin_t.iter_mut()).enumerate() {
        let theta = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
        *c = theta.cos();
        *s = theta.sin();
    }
    (cos_t, sin_t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_squares_gradient() {
        // d/dx Σx² = 2x
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::from_vec(&[3], vec![1.0, -2.0, 3.0]).unwrap(), true);
        let sq = tape.mul(x, x).unwrap();
        let root = tape.sum_all(sq);
        tape.backward(root).unwrap();
        assert_eq!(tape.grad(x).unwrap(), &[2.0, -4.0, 6.0]);
    }

    #[test]
    fn constant_graph_yields_no_gradients() {
        let mut tape = Tape::new();
        let x = tape.constant(Tensor::from_vec(&[2], vec![1.0, 2.0]).unwrap());
        let root = tape.sum_all(x);
        tape.backward(root).unwrap();
        assert!(tape.grad(x).is_none());
        assert!(tape.grad(root).is_none());
    }

    #[test]
    fn non_scalar_root_rejected() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::from_vec(&[2], vec![1.0, 2.0]).unwrap(), true);
        assert!(matches!(tape.backward(x), Err(Error::Contract(_))));
    }

    #[test]
    fn fanout_accumulates_once_per_node() {
        // f = (x + x) + x = 3x, df/dx = 3 exactly.
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::scalar(5.0), true);
        let two_x = tape.add(x, x).unwrap();
        let root = tape.add(two_x, x).unwrap();
        tape.backward(root).unwrap();
        assert_eq!(tape.grad(x).unwrap(), &[3.0]);
    }

    #[test]
    fn accumulation_order_invariance() {
        // Same function assembled two ways; gradients must agree to 1e-12.
        let xs = [0.3, -0.7, 1.9, 0.11];
        let grad_a = {
            let mut tape = Tape::new();
            let x = tape.leaf(Tensor::from_vec(&[4], xs.to_vec()).unwrap(), true);
            let a = tape.mul(x, x).unwrap();
            let b = tape.tanh(x);
            let c = tape.add(a, b).unwrap();
            let root = tape.sum_all(c);
            tape.backward(root).unwrap();
            tape.grad(x).unwrap().to_vec()
        };
        let grad_b = {
            let mut tape = Tape::new();
            let x = tape.leaf(Tensor::from_vec(&[4], xs.to_vec()).unwrap(), true);
            let b = tape.tanh(x);
            let a = tape.mul(x, x).unwrap();
            let c = tape.add(b, a).unwrap();
            let root = tape.sum_all(c);
            tape.backward(root).unwrap();
            tape.grad(x).unwrap().to_vec()
        };
        for (a, b) in grad_a.iter().zip(&grad_b) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn clamp_blocks_gradient_outside_range() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::from_vec(&[3], vec![-1.0, 0.5, 2.0]).unwrap(), true);
        let c = tape.clamp(x, 0.0, 1.0);
        let root = tape.sum_all(c);
        tape.backward(root).unwrap();
        assert_eq!(tape.grad(x).unwrap(), &[0.0, 1.0, 0.0]);
    }
}
