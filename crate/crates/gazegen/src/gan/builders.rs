//! Generator and discriminator assemblies for the four architecture
//! pairings.
//!
//! Generators emit [batch, 1, len] sequences squashed into [0, 1] (tanh
//! followed by the affine map (y+1)/2). Discriminators emit one probability
//! per sample, strictly inside (0, 1).

use rand::Rng;

use crate::error::{Error, Result};
use crate::gan::{ArchKind, LEAKY_SLOPE, LSTM_DISC_HIDDEN, LSTM_GEN_HIDDEN};
use crate::neural::layers::{BatchNorm1d, Conv1d, ConvTranspose1d, Dense, Mode};
use crate::neural::lstm::Lstm;
use crate::neural::params::{BoundParams, ParamSet, StateMap};
use crate::neural::tape::{NodeId, Tape};
use crate::neural::tensor::Tensor;

/// Channel ladder of the transposed-convolution generator (base → output).
const GEN_CHANNELS: [usize; 4] = [256, 128, 64, 1];
/// Channel ladder of the convolutional discriminator (input → top).
const DISC_CHANNELS: [usize; 4] = [1, 64, 128, 256];
const KERNEL: usize = 4;
const STRIDE: usize = 2;
const PADDING: usize = 1;
/// Upsampling stages; each doubles the length, so lengths must be
/// multiples of 2^3 = 8.
const STAGES: usize = 3;

enum GenLayers {
    Lstm {
        lstm: Lstm,
        head: Dense,
    },
    Cnn {
        project: Dense,
        stages: Vec<(ConvTranspose1d, Option<BatchNorm1d>)>,
        base_len: usize,
    },
}

pub struct Generator {
    pub kind: ArchKind,
    pub seq_len: usize,
    pub noise_dim: usize,
    pub params: ParamSet,
    pub state: StateMap,
    layers: GenLayers,
}

fn cnn_gen_layers(seq_len: usize, noise_dim: usize) -> Result<(GenLayers, usize)> {
    let factor = 1 << STAGES;
    if seq_len % factor != 0 || seq_len < factor {
        return Err(Error::Config(format!(
            "a convolutional generator doubles the length {STAGES} times, so the \
             sequence length must be a positive multiple of {factor} \
             (base length = len/{factor}); got {seq_len}"
        )));
    }
    let base_len = seq_len / factor;
    let project = Dense::new("gen.project", noise_dim, GEN_CHANNELS[0] * base_len);
    let mut stages = Vec::new();
    for i in 0..STAGES {
        let conv = ConvTranspose1d {
            name: format!("gen.up{i}"),
            in_ch: GEN_CHANNELS[i],
            out_ch: GEN_CHANNELS[i + 1],
            kernel: KERNEL,
            stride: STRIDE,
            padding: PADDING,
        };
        let bn = if i + 1 < STAGES {
            Some(BatchNorm1d::new(format!("gen.bn{i}"), GEN_CHANNELS[i + 1]))
        } else {
            None
        };
        stages.push((conv, bn));
    }
    Ok((
        GenLayers::Cnn {
            project,
            stages,
            base_len,
        },
        base_len,
    ))
}

impl Generator {
    pub fn new(kind: ArchKind, seq_len: usize, noise_dim: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut params = ParamSet::new();
        let mut state = StateMap::new();
        let layers = match kind {
            ArchKind::Lstm => {
                let lstm = Lstm::new("gen.lstm", noise_dim, LSTM_GEN_HIDDEN);
                let head = Dense::new("gen.head", LSTM_GEN_HIDDEN, 1);
                lstm.init(&mut params, rng);
                head.init(&mut params, rng);
                GenLayers::Lstm { lstm, head }
            }
            ArchKind::Cnn => {
                let (layers, _) = cnn_gen_layers(seq_len, noise_dim)?;
                if let GenLayers::Cnn {
                    project, stages, ..
                } = &layers
                {
                    project.init(&mut params, rng);
                    for (conv, bn) in stages {
                        conv.init(&mut params, rng);
                        if let Some(bn) = bn {
                            bn.init(&mut params, &mut state);
                        }
                    }
                }
                layers
            }
        };
        Ok(Generator {
            kind,
            seq_len,
            noise_dim,
            params,
            state,
            layers,
        })
    }

    /// Rebuild the wiring around previously trained parameters.
    pub fn from_parts(
        kind: ArchKind,
        seq_len: usize,
        noise_dim: usize,
        params: ParamSet,
        state: StateMap,
    ) -> Result<Self> {
        let layers = match kind {
            ArchKind::Lstm => GenLayers::Lstm {
                lstm: Lstm::new("gen.lstm", noise_dim, LSTM_GEN_HIDDEN),
                head: Dense::new("gen.head", LSTM_GEN_HIDDEN, 1),
            },
            ArchKind::Cnn => cnn_gen_layers(seq_len, noise_dim)?.0,
        };
        Ok(Generator {
            kind,
            seq_len,
            noise_dim,
            params,
            state,
            layers,
        })
    }

    /// Uniform(0, 1) latents in the shape this generator consumes: one
    /// vector per time step for the LSTM, one per sample for the CNN.
    pub fn sample_noise(&self, batch: usize, rng: &mut impl Rng) -> Tensor {
        let shape: Vec<usize> = match self.kind {
            ArchKind::Lstm => vec![batch, self.seq_len, self.noise_dim],
            ArchKind::Cnn => vec![batch, self.noise_dim],
        };
        let n: usize = shape.iter().product();
        let data: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        Tensor::from_vec(&shape, data).expect("shape matches")
    }

    pub fn bind(&self, tape: &mut Tape, trainable: bool) -> BoundParams {
        self.params.bind(tape, trainable)
    }

    /// Forward pass producing [batch, 1, seq_len] in [0, 1].
    pub fn forward(
        &mut self,
        tape: &mut Tape,
        bound: &BoundParams,
        noise: Tensor,
        mode: Mode,
    ) -> Result<NodeId> {
        match &self.layers {
            GenLayers::Lstm { lstm, head } => {
                let shape = noise.shape().to_vec();
                if shape.len() != 3 || shape[1] != self.seq_len || shape[2] != self.noise_dim {
                    return Err(Error::Dimension(format!(
                        "lstm generator noise {shape:?}, want [batch, {}, {}]",
                        self.seq_len, self.noise_dim
                    )));
                }
                let batch = shape[0];
                let input = tape.constant(noise);
                let h0 = tape.constant(Tensor::zeros(&[batch, LSTM_GEN_HIDDEN]));
                let c0 = tape.constant(Tensor::zeros(&[batch, LSTM_GEN_HIDDEN]));
                let out = lstm.forward(tape, bound, input, h0, c0)?;
                let mut increments = Vec::with_capacity(out.steps.len());
                for h in out.steps {
                    let v = head.forward(tape, bound, h)?;
                    let squashed = tape.tanh(v);
                    let shifted = tape.add_scalar(squashed, 1.0);
                    increments.push(tape.scale(shifted, 0.5));
                }
                tape.stack_chan(&increments)
            }
            GenLayers::Cnn {
                project,
                stages,
                base_len,
            } => {
                let shape = noise.shape().to_vec();
                if shape.len() != 2 || shape[1] != self.noise_dim {
                    return Err(Error::Dimension(format!(
                        "cnn generator noise {shape:?}, want [batch, {}]",
                        self.noise_dim
                    )));
                }
                let batch = shape[0];
                let input = tape.constant(noise);
                let projected = project.forward(tape, bound, input)?;
                let mut x = tape.reshape(projected, &[batch, GEN_CHANNELS[0], *base_len])?;
                let last = stages.len() - 1;
                for (i, (conv, bn)) in stages.iter().enumerate() {
                    x = conv.forward(tape, bound, x)?;
                    if i < last {
                        if let Some(bn) = bn {
                            x = bn.forward(tape, bound, x, mode, &mut self.state)?;
                        }
                        x = tape.relu(x);
                    }
                }
                let squashed = tape.tanh(x);
                let shifted = tape.add_scalar(squashed, 1.0);
                Ok(tape.scale(shifted, 0.5))
            }
        }
    }
}

enum DiscLayers {
    Lstm {
        lstm: Lstm,
        head: Dense,
    },
    Cnn {
        stages: Vec<(Conv1d, Option<BatchNorm1d>)>,
        head: Dense,
        flat_dim: usize,
    },
}

pub struct Discriminator {
    pub kind: ArchKind,
    pub seq_len: usize,
    pub params: ParamSet,
    pub state: StateMap,
    layers: DiscLayers,
}

fn cnn_disc_layers(seq_len: usize) -> Result<DiscLayers> {
    let mut stages = Vec::new();
    let mut len = seq_len;
    for i in 0..STAGES {
        let conv = Conv1d {
            name: format!("disc.down{i}"),
            in_ch: DISC_CHANNELS[i],
            out_ch: DISC_CHANNELS[i + 1],
            kernel: KERNEL,
            stride: STRIDE,
            padding: PADDING,
        };
        len = conv.out_len(len)?;
        if len == 0 {
            return Err(Error::Config(format!(
                "sequence length {seq_len} collapses to nothing in the \
                 discriminator ladder"
            )));
        }
        // The first stage feeds raw sequences and keeps their scale.
        let bn = if i > 0 {
            Some(BatchNorm1d::new(
                format!("disc.bn{i}"),
                DISC_CHANNELS[i + 1],
            ))
        } else {
            None
        };
        stages.push((conv, bn));
    }
    let flat_dim = DISC_CHANNELS[STAGES] * len;
    let head = Dense::new("disc.head", flat_dim, 1);
    Ok(DiscLayers::Cnn {
        stages,
        head,
        flat_dim,
    })
}

impl Discriminator {
    pub fn new(kind: ArchKind, seq_len: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut params = ParamSet::new();
        let mut state = StateMap::new();
        let layers = match kind {
            ArchKind::Lstm => {
                let lstm = Lstm::new("disc.lstm", 1, LSTM_DISC_HIDDEN);
                let head = Dense::new("disc.head", LSTM_DISC_HIDDEN, 1);
                lstm.init(&mut params, rng);
                head.init(&mut params, rng);
                DiscLayers::Lstm { lstm, head }
            }
            ArchKind::Cnn => {
                let layers = cnn_disc_layers(seq_len)?;
                if let DiscLayers::Cnn { stages, head, .. } = &layers {
                    for (conv, bn) in stages {
                        conv.init(&mut params, rng);
                        if let Some(bn) = bn {
                            bn.init(&mut params, &mut state);
                        }
                    }
                    head.init(&mut params, rng);
                }
                layers
            }
        };
        Ok(Discriminator {
            kind,
            seq_len,
            params,
            state,
            layers,
        })
    }

    pub fn from_parts(
        kind: ArchKind,
        seq_len: usize,
        params: ParamSet,
        state: StateMap,
    ) -> Result<Self> {
        let layers = match kind {
            ArchKind::Lstm => DiscLayers::Lstm {
                lstm: Lstm::new("disc.lstm", 1, LSTM_DISC_HIDDEN),
                head: Dense::new("disc.head", LSTM_DISC_HIDDEN, 1),
            },
            ArchKind::Cnn => cnn_disc_layers(seq_len)?,
        };
        Ok(Discriminator {
            kind,
            seq_len,
            params,
            state,
            layers,
        })
    }

    pub fn bind(&self, tape: &mut Tape, trainable: bool) -> BoundParams {
        self.params.bind(tape, trainable)
    }

    /// Probability per sample: input [batch, 1, len] to output [batch].
    pub fn forward(
        &mut self,
        tape: &mut Tape,
        bound: &BoundParams,
        x: NodeId,
        mode: Mode,
    ) -> Result<NodeId> {
        let shape = tape.shape(x).to_vec();
        if shape.len() != 3 || shape[1] != 1 || shape[2] != self.seq_len {
            return Err(Error::Dimension(format!(
                "discriminator input {shape:?}, want [batch, 1, {}]",
                self.seq_len
            )));
        }
        let batch = shape[0];
        match &self.layers {
            DiscLayers::Lstm { lstm, head } => {
                // Re-lay the sequence as [batch, t, 1] for the recurrence.
                let mut per_step = Vec::with_capacity(self.seq_len);
                for t in 0..self.seq_len {
                    per_step.push(tape.slice_chan(x, t)?);
                }
                let seq_input = tape.stack_seq(&per_step)?;
                let h0 = tape.constant(Tensor::zeros(&[batch, LSTM_DISC_HIDDEN]));
                let c0 = tape.constant(Tensor::zeros(&[batch, LSTM_DISC_HIDDEN]));
                let out = lstm.forward(tape, bound, seq_input, h0, c0)?;
                let mut probs = Vec::with_capacity(out.steps.len());
                for h in out.steps {
                    let v = head.forward(tape, bound, h)?;
                    probs.push(tape.sigmoid(v));
                }
                let stacked = tape.stack_chan(&probs)?;
                let mean = tape.mean_last(stacked)?;
                tape.reshape(mean, &[batch])
            }
            DiscLayers::Cnn {
                stages,
                head,
                flat_dim,
            } => {
                let mut feat = x;
                for (conv, bn) in stages {
                    feat = conv.forward(tape, bound, feat)?;
                    if let Some(bn) = bn {
                        feat = bn.forward(tape, bound, feat, mode, &mut self.state)?;
                    }
                    feat = tape.leaky_relu(feat, LEAKY_SLOPE);
                }
                let flat = tape.reshape(feat, &[batch, *flat_dim])?;
                let logit = head.forward(tape, bound, flat)?;
                let prob = tape.sigmoid(logit);
                tape.reshape(prob, &[batch])
            }
        }
    }
}
