//! Layer descriptors: parameter naming, initialization, and forward wiring.
//!
//! A descriptor owns no weights. It knows which names it contributes to a
//! [`ParamSet`] and how to assemble its forward pass from tape ops, so the
//! same descriptor drives initialization, training, and reload.

use rand::Rng;

use crate::error::{Error, Result};
use crate::neural::init;
use crate::neural::params::{BoundParams, ParamSet, StateMap};
use crate::neural::tape::{NodeId, Tape};
use crate::neural::tensor::Tensor;

pub const BN_EPS: f64 = 1e-5;
pub const BN_MOMENTUM: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

#[derive(Clone, Copy, Debug)]
pub enum Activation {
    Relu,
    LeakyRelu(f64),
    Tanh,
    Sigmoid,
}

/// Elementwise activation on the tape with its derivative rule.
pub fn activation(tape: &mut Tape, x: NodeId, kind: Activation) -> NodeId {
    match kind {
        Activation::Relu => tape.relu(x),
        Activation::LeakyRelu(slope) => tape.leaky_relu(x, slope),
        Activation::Tanh => tape.tanh(x),
        Activation::Sigmoid => tape.sigmoid(x),
    }
}

#[derive(Clone, Debug)]
pub struct Dense {
    pub name: String,
    pub in_dim: usize,
    pub out_dim: usize,
}

impl Dense {
    pub fn new(name: impl Into<String>, in_dim: usize, out_dim: usize) -> Self {
        Dense {
            name: name.into(),
            in_dim,
            out_dim,
        }
    }

    pub fn init(&self, params: &mut ParamSet, rng: &mut impl Rng) {
        params.insert(
            format!("{}.w", self.name),
            init::normal(&[self.out_dim, self.in_dim], init::DENSE_INIT_STD, rng),
        );
        params.insert(format!("{}.b", self.name), Tensor::zeros(&[self.out_dim]));
    }

    pub fn forward(&self, tape: &mut Tape, bound: &BoundParams, x: NodeId) -> Result<NodeId> {
        let w = bound.node(&format!("{}.w", self.name))?;
        let b = bound.node(&format!("{}.b", self.name))?;
        tape.dense(x, w, Some(b))
    }
}

#[derive(Clone, Debug)]
pub struct Conv1d {
    pub name: String,
    pub in_ch: usize,
    pub out_ch: usize,
    pub kernel: usize,
    pub stride: usize,
    pub padding: usize,
}

impl Conv1d {
    pub fn out_len(&self, len: usize) -> Result<usize> {
        if len + 2 * self.padding < self.kernel {
            return Err(Error::Dimension(format!(
                "conv '{}': input length {len} too short for kernel {}",
                self.name, self.kernel
            )));
        }
        Ok((len + 2 * self.padding - self.kernel) / self.stride + 1)
    }

    pub fn init(&self, params: &mut ParamSet, rng: &mut impl Rng) {
        params.insert(
            format!("{}.w", self.name),
            init::normal(
                &[self.out_ch, self.in_ch, self.kernel],
                init::CONV_INIT_STD,
                rng,
            ),
        );
        params.insert(format!("{}.b", self.name), Tensor::zeros(&[self.out_ch]));
    }

    pub fn forward(&self, tape: &mut Tape, bound: &BoundParams, x: NodeId) -> Result<NodeId> {
        let w = bound.node(&format!("{}.w", self.name))?;
        let b = bound.node(&format!("{}.b", self.name))?;
        tape.conv1d(x, w, b, self.stride, self.padding)
    }
}

#[derive(Clone, Debug)]
pub struct ConvTranspose1d {
    pub name: String,
    pub in_ch: usize,
    pub out_ch: usize,
    pub kernel: usize,
    pub stride: usize,
    pub padding: usize,
}

impl ConvTranspose1d {
    pub fn out_len(&self, len: usize) -> Result<usize> {
        let out = ((len - 1) * self.stride + self.kernel) as isize - 2 * self.padding as isize;
        if out < 1 {
            return Err(Error::Dimension(format!(
                "transposed conv '{}': output length {out} < 1",
                self.name
            )));
        }
        Ok(out as usize)
    }

    pub fn init(&self, params: &mut ParamSet, rng: &mut impl Rng) {
        params.insert(
            format!("{}.w", self.name),
            init::normal(
                &[self.in_ch, self.out_ch, self.kernel],
                init::CONV_INIT_STD,
                rng,
            ),
        );
        params.insert(format!("{}.b", self.name), Tensor::zeros(&[self.out_ch]));
    }

    pub fn forward(&self, tape: &mut Tape, bound: &BoundParams, x: NodeId) -> Result<NodeId> {
        let w = bound.node(&format!("{}.w", self.name))?;
        let b = bound.node(&format!("{}.b", self.name))?;
        tape.conv1d_transpose(x, w, b, self.stride, self.padding)
    }
}

#[derive(Clone, Debug)]
pub struct BatchNorm1d {
    pub name: String,
    pub channels: usize,
}

impl BatchNorm1d {
    pub fn new(name: impl Into<String>, channels: usize) -> Self {
        BatchNorm1d {
            name: name.into(),
            channels,
        }
    }

    pub fn init(&self, params: &mut ParamSet, state: &mut StateMap) {
        params.insert(
            format!("{}.gamma", self.name),
            Tensor::filled(&[self.channels], 1.0),
        );
        params.insert(
            format!("{}.beta", self.name),
            Tensor::zeros(&[self.channels]),
        );
        state.insert(
            format!("{}.running_mean", self.name),
            Tensor::zeros(&[self.channels]),
        );
        state.insert(
            format!("{}.running_var", self.name),
            Tensor::filled(&[self.channels], 1.0),
        );
    }

    /// Train mode normalizes with batch statistics and nudges the running
    /// averages; eval mode uses the stored running statistics.
    pub fn forward(
        &self,
        tape: &mut Tape,
        bound: &BoundParams,
        x: NodeId,
        mode: Mode,
        state: &mut StateMap,
    ) -> Result<NodeId> {
        let gamma = bound.node(&format!("{}.gamma", self.name))?;
        let beta = bound.node(&format!("{}.beta", self.name))?;
        match mode {
            Mode::Train => {
                let (out, stats) = tape.batchnorm_train(x, gamma, beta, BN_EPS)?;
                let rm_key = format!("{}.running_mean", self.name);
                let rv_key = format!("{}.running_var", self.name);
                let n = stats.count as f64;
                // Unbiased variance feeds the running average.
                let unbias = if stats.count > 1 { n / (n - 1.0) } else { 1.0 };
                let rm = state
                    .get_mut(&rm_key)
                    .ok_or_else(|| Error::Contract(format!("missing state '{rm_key}'")))?;
                for (r, &m) in rm.data_mut().iter_mut().zip(&stats.mean) {
                    *r = (1.0 - BN_MOMENTUM) * *r + BN_MOMENTUM * m;
                }
                let rv = state
                    .get_mut(&rv_key)
                    .ok_or_else(|| Error::Contract(format!("missing state '{rv_key}'")))?;
                for (r, &v) in rv.data_mut().iter_mut().zip(&stats.var) {
                    *r = (1.0 - BN_MOMENTUM) * *r + BN_MOMENTUM * (v * unbias);
                }
                Ok(out)
            }
            Mode::Eval => {
                let rm = state
                    .get(&format!("{}.running_mean", self.name))
                    .ok_or_else(|| Error::Contract("missing running mean".into()))?
                    .data()
                    .to_vec();
                let rv = state
                    .get(&format!("{}.running_var", self.name))
                    .ok_or_else(|| Error::Contract("missing running variance".into()))?
                    .data()
                    .to_vec();
                tape.batchnorm_eval(x, gamma, beta, &rm, &rv, BN_EPS)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dense_identity_and_bias_only() {
        // Identity weight maps the input through unchanged.
        let mut params = ParamSet::new();
        params.insert(
            "d.w",
            Tensor::from_vec(&[2, 2], vec![1.0, 0.0, 0.0, 1.0]).unwrap(),
        );
        params.insert("d.b", Tensor::zeros(&[2]));
        let layer = Dense::new("d", 2, 2);
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape, false);
        let x = tape.constant(Tensor::from_vec(&[1, 2], vec![3.0, 5.0]).unwrap());
        let y = layer.forward(&mut tape, &bound, x).unwrap();
        assert_eq!(tape.values(y), &[3.0, 5.0]);

        // Zero weight, bias 7: every row maps to the bias.
        let mut params = ParamSet::new();
        params.insert("d.w", Tensor::zeros(&[1, 2]));
        params.insert("d.b", Tensor::from_vec(&[1], vec![7.0]).unwrap());
        let layer = Dense::new("d", 2, 1);
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape, false);
        let x = tape.constant(Tensor::from_vec(&[1, 2], vec![-4.0, 9.0]).unwrap());
        let y = layer.forward(&mut tape, &bound, x).unwrap();
        assert_eq!(tape.values(y), &[7.0]);
    }

    #[test]
    fn dense_matches_naive_matmul() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (batch, in_dim, out_dim) = (4, 7, 5);
        let mut params = ParamSet::new();
        let layer = Dense::new("d", in_dim, out_dim);
        layer.init(&mut params, &mut rng);
        params.insert("d.b", init::normal(&[out_dim], 0.5, &mut rng));
        let x = init::normal(&[batch, in_dim], 1.0, &mut rng);

        let mut tape = Tape::new();
        let bound = params.bind(&mut tape, false);
        let xid = tape.constant(x.clone());
        let y = layer.forward(&mut tape, &bound, xid).unwrap();

        // Explicit double-loop oracle.
        let w = params.get("d.w").unwrap();
        let b = params.get("d.b").unwrap();
        for bi in 0..batch {
            for o in 0..out_dim {
                let mut want = b.data()[o];
                for i in 0..in_dim {
                    want += x.data()[bi * in_dim + i] * w.data()[o * in_dim + i];
                }
                let got = tape.values(y)[bi * out_dim + o];
                assert!((got - want).abs() < 1e-12, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn conv_identity_kernel() {
        // Width-1 unit kernel, stride 1: output equals input.
        let conv = Conv1d {
            name: "c".into(),
            in_ch: 1,
            out_ch: 1,
            kernel: 1,
            stride: 1,
            padding: 0,
        };
        let mut params = ParamSet::new();
        params.insert("c.w", Tensor::from_vec(&[1, 1, 1], vec![1.0]).unwrap());
        params.insert("c.b", Tensor::zeros(&[1]));
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape, false);
        let x = tape.constant(Tensor::from_vec(&[1, 1, 4], vec![1.0, -2.0, 3.0, 0.5]).unwrap());
        let y = conv.forward(&mut tape, &bound, x).unwrap();
        assert_eq!(tape.values(y), &[1.0, -2.0, 3.0, 0.5]);
    }

    #[test]
    fn conv_length_formula() {
        let conv = Conv1d {
            name: "c".into(),
            in_ch: 1,
            out_ch: 1,
            kernel: 4,
            stride: 2,
            padding: 1,
        };
        assert_eq!(conv.out_len(200).unwrap(), 100);
        let tconv = ConvTranspose1d {
            name: "t".into(),
            in_ch: 1,
            out_ch: 1,
            kernel: 4,
            stride: 2,
            padding: 1,
        };
        assert_eq!(tconv.out_len(25).unwrap(), 50);
    }

    #[test]
    fn conv_matches_triple_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let (batch, c_in, c_out, len, kernel, stride, padding) = (2, 3, 4, 11, 4, 2, 1);
        let conv = Conv1d {
            name: "c".into(),
            in_ch: c_in,
            out_ch: c_out,
            kernel,
            stride,
            padding,
        };
        let mut params = ParamSet::new();
        conv.init(&mut params, &mut rng);
        params.insert("c.b", init::normal(&[c_out], 0.3, &mut rng));
        let x = init::normal(&[batch, c_in, len], 1.0, &mut rng);

        let mut tape = Tape::new();
        let bound = params.bind(&mut tape, false);
        let xid = tape.constant(x.clone());
        let y = conv.forward(&mut tape, &bound, xid).unwrap();
        let out_len = conv.out_len(len).unwrap();
        assert_eq!(tape.shape(y), &[batch, c_out, out_len]);

        let w = params.get("c.w").unwrap().data();
        let bias = params.get("c.b").unwrap().data();
        for b in 0..batch {
            for co in 0..c_out {
                for j in 0..out_len {
                    let mut want = bias[co];
                    for ci in 0..c_in {
                        for kk in 0..kernel {
                            let src = (j * stride + kk) as isize - padding as isize;
                            if src >= 0 && (src as usize) < len {
                                want += w[(co * c_in + ci) * kernel + kk]
                                    * x.data()[(b * c_in + ci) * len + src as usize];
                            }
                        }
                    }
                    let got = tape.values(y)[(b * c_out + co) * out_len + j];
                    assert!((got - want).abs() < 1e-12, "{got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn conv_rejects_too_short_input() {
        let conv = Conv1d {
            name: "c".into(),
            in_ch: 1,
            out_ch: 1,
            kernel: 8,
            stride: 1,
            padding: 0,
        };
        assert!(conv.out_len(4).is_err());
    }

    #[test]
    fn transposed_conv_identity() {
        // Stride 1, width-1 unit kernel: identity map.
        let tconv = ConvTranspose1d {
            name: "t".into(),
            in_ch: 1,
            out_ch: 1,
            kernel: 1,
            stride: 1,
            padding: 0,
        };
        let mut params = ParamSet::new();
        params.insert("t.w", Tensor::from_vec(&[1, 1, 1], vec![1.0]).unwrap());
        params.insert("t.b", Tensor::zeros(&[1]));
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape, false);
        let x = tape.constant(Tensor::from_vec(&[1, 1, 3], vec![4.0, 5.0, 6.0]).unwrap());
        let y = tconv.forward(&mut tape, &bound, x).unwrap();
        assert_eq!(tape.values(y), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn conv_and_transpose_are_adjoint() {
        // <conv(x), y> == <x, conv_transpose(y)> with a shared kernel and
        // zero biases.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (batch, ci, co, len, kernel, stride, padding) = (2, 3, 5, 12, 4, 2, 1);
        let out_len = (len + 2 * padding - kernel) / stride + 1;
        let w = init::normal(&[co, ci, kernel], 1.0, &mut rng);
        let x = init::normal(&[batch, ci, len], 1.0, &mut rng);
        let y = init::normal(&[batch, co, out_len], 1.0, &mut rng);

        let mut tape = Tape::new();
        let wid = tape.constant(w.clone());
        let zero_co = tape.constant(Tensor::zeros(&[co]));
        let zero_ci = tape.constant(Tensor::zeros(&[ci]));
        let xid = tape.constant(x.clone());
        let yid = tape.constant(y.clone());
        let cx = tape.conv1d(xid, wid, zero_co, stride, padding).unwrap();
        let ty = tape
            .conv1d_transpose(yid, wid, zero_ci, stride, padding)
            .unwrap();
        assert_eq!(tape.shape(ty), &[batch, ci, len]);

        let lhs: f64 = tape
            .values(cx)
            .iter()
            .zip(y.data())
            .map(|(a, b)| a * b)
            .sum();
        let rhs: f64 = x
            .data()
            .iter()
            .zip(tape.values(ty))
            .map(|(a, b)| a * b)
            .sum();
        let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300);
        assert!(rel < 1e-10, "adjoint identity violated: {lhs} vs {rhs}");
    }

    #[test]
    fn batchnorm_train_normalizes_per_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bn = BatchNorm1d::new("bn", 2);
        let mut params = ParamSet::new();
        let mut state = StateMap::new();
        bn.init(&mut params, &mut state);

        let (batch, ch, len) = (4, 2, 6);
        let x = init::normal(&[batch, ch, len], 2.5, &mut rng);
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape, false);
        let xid = tape.constant(x);
        let y = bn
            .forward(&mut tape, &bound, xid, Mode::Train, &mut state)
            .unwrap();

        // With gamma 1 beta 0 the per-channel output must be standardized.
        let vals = tape.values(y);
        for c in 0..ch {
            let mut items = Vec::new();
            for b in 0..batch {
                items.extend_from_slice(&vals[(b * ch + c) * len..(b * ch + c + 1) * len]);
            }
            let n = items.len() as f64;
            let mean = items.iter().sum::<f64>() / n;
            let var = items.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            assert!(mean.abs() < 1e-10, "channel {c} mean {mean}");
            assert!((var - 1.0).abs() < 1e-10, "channel {c} var {var}");
        }
    }

    #[test]
    fn batchnorm_constant_input_collapses_to_shift() {
        let bn = BatchNorm1d::new("bn", 1);
        let mut params = ParamSet::new();
        let mut state = StateMap::new();
        bn.init(&mut params, &mut state);
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape, false);
        let x = tape.constant(Tensor::filled(&[3, 1, 4], 9.0));
        let y = bn
            .forward(&mut tape, &bound, x, Mode::Train, &mut state)
            .unwrap();
        for v in tape.values(y) {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn batchnorm_eval_uses_running_stats() {
        let bn = BatchNorm1d::new("bn", 2);
        let mut params = ParamSet::new();
        let mut state = StateMap::new();
        bn.init(&mut params, &mut state);
        params.insert("bn.gamma", Tensor::from_vec(&[2], vec![1.5, -0.5]).unwrap());
        params.insert("bn.beta", Tensor::from_vec(&[2], vec![0.25, 1.0]).unwrap());

        let x = Tensor::from_vec(&[1, 2, 2], vec![0.3, -0.7, 2.0, 0.1]).unwrap();
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape, false);
        let xid = tape.constant(x.clone());
        let y = bn
            .forward(&mut tape, &bound, xid, Mode::Eval, &mut state)
            .unwrap();

        // Running mean 0, running variance 1: output is exactly γ·x + β.
        let gamma = [1.5, -0.5];
        let beta = [0.25, 1.0];
        for c in 0..2 {
            for i in 0..2 {
                let got = tape.values(y)[c * 2 + i];
                let want = gamma[c] * x.data()[c * 2 + i] + beta[c];
                assert!((got - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn batchnorm_train_rejects_single_sample_batch() {
        let bn = BatchNorm1d::new("bn", 1);
        let mut params = ParamSet::new();
        let mut state = StateMap::new();
        bn.init(&mut params, &mut state);
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape, false);
        let x = tape.constant(Tensor::zeros(&[1, 1, 4]));
        let err = bn.forward(&mut tape, &bound, x, Mode::Train, &mut state);
        assert!(matches!(err, Err(Error::Degenerate(_))));
    }

    #[test]
    fn activation_values() {
        let mut tape = Tape::new();
        let x = tape.constant(Tensor::from_vec(&[3], vec![-1.0, 0.0, 2.0]).unwrap());
        let r = activation(&mut tape, x, Activation::Relu);
        assert_eq!(tape.values(r), &[0.0, 0.0, 2.0]);

        let x = tape.constant(Tensor::from_vec(&[1], vec![-5.0]).unwrap());
        let l = activation(&mut tape, x, Activation::LeakyRelu(0.2));
        assert_eq!(tape.values(l), &[-1.0]);

        let x = tape.constant(Tensor::from_vec(&[1], vec![0.0]).unwrap());
        let t = activation(&mut tape, x, Activation::Tanh);
        assert_eq!(tape.values(t), &[0.0]);
        let s = activation(&mut tape, x, Activation::Sigmoid);
        assert_eq!(tape.values(s), &[0.5]);
    }
}
