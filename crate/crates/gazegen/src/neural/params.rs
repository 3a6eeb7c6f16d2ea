//! Named parameter sets and their binding onto tapes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::tape::{NodeId, Tape};
use crate::neural::tensor::Tensor;

/// Gradients keyed by parameter name.
pub type GradientMap = BTreeMap<String, Tensor>;

/// An ordered collection of named parameter tensors. Names are dotted paths
/// like `gen.lstm.w_xi`.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct ParamSet {
    entries: BTreeMap<String, Tensor>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, tensor: Tensor) {
        self.entries.insert(name.into(), tensor);
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.entries.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        self.entries.get_mut(name)
    }

    pub fn require(&self, name: &str) -> Result<&Tensor> {
        self.entries
            .get(name)
            .ok_or_else(|| Error::Contract(format!("missing parameter '{name}'")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Tensor)> {
        self.entries.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&String, &mut Tensor)> {
        self.entries.iter_mut()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn numel(&self) -> usize {
        self.entries.values().map(Tensor::numel).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.entries.values().all(Tensor::all_finite)
    }

    /// Register every parameter as a leaf on the tape. With
    /// `trainable == false` the bound leaves are constants, so backward
    /// skips their gradient work entirely.
    pub fn bind(&self, tape: &mut Tape, trainable: bool) -> BoundParams {
        let mut map = BTreeMap::new();
        for (name, tensor) in &self.entries {
            let id = tape.leaf(tensor.clone(), trainable);
            map.insert(name.clone(), id);
        }
        BoundParams { map }
    }
}

/// Tape leaves for one parameter set within one forward pass.
pub struct BoundParams {
    map: BTreeMap<String, NodeId>,
}

impl BoundParams {
    pub fn node(&self, name: &str) -> Result<NodeId> {
        self.map
            .get(name)
            .copied()
            .ok_or_else(|| Error::Contract(format!("parameter '{name}' not bound on tape")))
    }

    /// Collect gradients accumulated by the last backward pass. Parameters
    /// the root never touched are absent from the map; a NaN or infinity in
    /// any gradient is an error naming the offending parameter.
    pub fn gradients(&self, tape: &Tape) -> Result<GradientMap> {
        let mut out = GradientMap::new();
        for (name, &id) in &self.map {
            if let Some(g) = tape.grad(id) {
                if !g.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFinite(format!(
                        "gradient of parameter '{name}' is not finite"
                    )));
                }
                out.insert(
                    name.clone(),
                    Tensor::from_vec(tape.shape(id), g.to_vec())?,
                );
            }
        }
        Ok(out)
    }
}

/// Mutable per-model state that is learned indirectly (batch-norm running
/// statistics), serialized alongside parameters but not optimized.
pub type StateMap = BTreeMap<String, Tensor>;
