//! Adam optimizer with bias correction.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::neural::params::{GradientMap, ParamSet};

#[derive(Clone, Copy, Debug)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 0.0002,
            beta1: 0.5,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Optimizer state: first/second moment estimates per parameter plus the
/// shared step counter.
pub struct Adam {
    cfg: AdamConfig,
    t: u64,
    m: BTreeMap<String, Vec<f64>>,
    v: BTreeMap<String, Vec<f64>>,
}

impl Adam {
    pub fn new(cfg: AdamConfig) -> Self {
        Adam {
            cfg,
            t: 0,
            m: BTreeMap::new(),
            v: BTreeMap::new(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One update: params ← params − α·m̂/(√v̂ + ε). Gradients absent from
    /// the map are treated as zero. A non-finite gradient rejects the whole
    /// step and leaves parameters and moments untouched.
    pub fn step(&mut self, params: &mut ParamSet, grads: &GradientMap) -> Result<()> {
        for (name, g) in grads {
            if !g.all_finite() {
                return Err(Error::Optimizer(format!(
                    "non-finite gradient for '{name}', step rejected"
                )));
            }
            match params.get(name) {
                Some(p) if p.shape() == g.shape() => {}
                Some(p) => {
                    return Err(Error::Optimizer(format!(
                        "gradient shape {:?} does not match parameter '{name}' {:?}",
                        g.shape(),
                        p.shape()
                    )))
                }
                None => {
                    return Err(Error::Optimizer(format!(
                        "gradient for unknown parameter '{name}'"
                    )))
                }
            }
        }

        self.t += 1;
        let t = self.t as i32;
        let bc1 = 1.0 - self.cfg.beta1.powi(t);
        let bc2 = 1.0 - self.cfg.beta2.powi(t);
        let (b1, b2) = (self.cfg.beta1, self.cfg.beta2);

        for (name, p) in params.iter_mut() {
            let n = p.numel();
            let m = self.m.entry(name.clone()).or_insert_with(|| vec![0.0; n]);
            let v = self.v.entry(name.clone()).or_insert_with(|| vec![0.0; n]);
            let zero;
            let g: &[f64] = match grads.get(name) {
                Some(g) => g.data(),
                None => {
                    zero = vec![0.0; n];
                    &zero
                }
            };
            for ((pv, mv), (vv, &gv)) in p
                .data_mut()
                .iter_mut()
                .zip(m.iter_mut())
                .zip(v.iter_mut().zip(g))
            {
                *mv = b1 * *mv + (1.0 - b1) * gv;
                *vv = b2 * *vv + (1.0 - b2) * gv * gv;
                let m_hat = *mv / bc1;
                let v_hat = *vv / bc2;
                *pv -= self.cfg.learning_rate * m_hat / (v_hat.sqrt() + self.cfg.epsilon);
            }
        }
        Ok(())
    }
}
