//! LSTM cell unrolled over a sequence, fully on the tape so
//! backpropagation-through-time falls out of the ordinary backward pass.

use rand::Rng;

use crate::error::{Error, Result};
use crate::neural::init;
use crate::neural::params::{BoundParams, ParamSet};
use crate::neural::tape::{NodeId, Tape};
use crate::neural::tensor::Tensor;

const GATES: [&str; 4] = ["i", "f", "g", "o"];

#[derive(Clone, Debug)]
pub struct Lstm {
    pub name: String,
    pub input_dim: usize,
    pub hidden: usize,
}

pub struct LstmOutput {
    /// Hidden sequence, [batch, t, hidden].
    pub seq: NodeId,
    /// Per-step hidden states, [batch, hidden] each.
    pub steps: Vec<NodeId>,
}

impl Lstm {
    pub fn new(name: impl Into<String>, input_dim: usize, hidden: usize) -> Self {
        Lstm {
            name: name.into(),
            input_dim,
            hidden,
        }
    }

    /// Uniform(−k, k) weights with k = 1/√hidden; forget-gate bias starts
    /// at 1, the other biases at 0.
    pub fn init(&self, params: &mut ParamSet, rng: &mut impl Rng) {
        let k = 1.0 / (self.hidden as f64).sqrt();
        for gate in GATES {
            params.insert(
                format!("{}.w_x{gate}", self.name),
                init::uniform(&[self.hidden, self.input_dim], k, rng),
            );
            params.insert(
                format!("{}.w_h{gate}", self.name),
                init::uniform(&[self.hidden, self.hidden], k, rng),
            );
            let bias = if gate == "f" {
                Tensor::filled(&[self.hidden], 1.0)
            } else {
                Tensor::zeros(&[self.hidden])
            };
            params.insert(format!("{}.b_{gate}", self.name), bias);
        }
    }

    /// Run the cell over `inputs` with shape [batch, t, input_dim], starting
    /// from states h0 and c0 of shape [batch, hidden].
    pub fn forward(
        &self,
        tape: &mut Tape,
        bound: &BoundParams,
        inputs: NodeId,
        h0: NodeId,
        c0: NodeId,
    ) -> Result<LstmOutput> {
        let shape = tape.shape(inputs).to_vec();
        if shape.len() != 3 || shape[2] != self.input_dim {
            return Err(Error::Dimension(format!(
                "lstm '{}': inputs {shape:?}, want [batch, t, {}]",
                self.name, self.input_dim
            )));
        }
        let (batch, t_len) = (shape[0], shape[1]);
        if t_len == 0 {
            return Err(Error::EmptyInput(format!(
                "lstm '{}': empty input sequence",
                self.name
            )));
        }
        for (state, label) in [(h0, "h0"), (c0, "c0")] {
            if tape.shape(state) != [batch, self.hidden] {
                return Err(Error::Dimension(format!(
                    "lstm '{}': {label} shape {:?}, want [{batch}, {}]",
                    self.name,
                    tape.shape(state),
                    self.hidden
                )));
            }
        }

        let w_x: Vec<NodeId> = GATES
            .iter()
            .map(|g| bound.node(&format!("{}.w_x{g}", self.name)))
            .collect::<Result<_>>()?;
        let w_h: Vec<NodeId> = GATES
            .iter()
            .map(|g| bound.node(&format!("{}.w_h{g}", self.name)))
            .collect::<Result<_>>()?;
        let b: Vec<NodeId> = GATES
            .iter()
            .map(|g| bound.node(&format!("{}.b_{g}", self.name)))
            .collect::<Result<_>>()?;

        let mut h = h0;
        let mut c = c0;
        let mut steps = Vec::with_capacity(t_len);
        for t in 0..t_len {
            let x_t = tape.slice_seq(inputs, t)?;
            let mut pre = Vec::with_capacity(4);
            for gate in 0..4 {
                let from_x = tape.dense(x_t, w_x[gate], Some(b[gate]))?;
                let from_h = tape.dense(h, w_h[gate], None)?;
                pre.push(tape.add(from_x, from_h)?);
            }
            let i = tape.sigmoid(pre[0]);
            let f = tape.sigmoid(pre[1]);
            let g = tape.tanh(pre[2]);
            let o = tape.sigmoid(pre[3]);
            let keep = tape.mul(f, c)?;
            let write = tape.mul(i, g)?;
            c = tape.add(keep, write)?;
            let c_act = tape.tanh(c);
            h = tape.mul(o, c_act)?;
            steps.push(h);
        }
        let seq = tape.stack_seq(&steps)?;
        Ok(LstmOutput { seq, steps })
    }
}
