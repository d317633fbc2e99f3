use rand::Rng;
use std::f64::consts::TAU;

use super::model::{wrap_phase, ModelKind};
use crate::error::{Error, Result};

/// Global state `x = (x_i)`: one equally sized state vector per node, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalState {
    kind: ModelKind,
    data: Vec<f64>,
}

impl GlobalState {
    /// Phase-oscillator state; phases are wrapped into `[0, 2π)`.
    pub fn phases(thetas: &[f64]) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::invalid("state needs at least one node"));
        }
        if thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid(format!("non-finite phase in {thetas:?}")));
        }
        Ok(GlobalState {
            kind: ModelKind::PhaseOscillator,
            data: thetas.iter().map(|&t| wrap_phase(t)).collect(),
        })
    }

    /// Planar state from `(r, θ)` pairs.
    pub fn planar(polar: &[(f64, f64)]) -> Result<Self> {
        if polar.is_empty() {
            return Err(Error::invalid("state needs at least one node"));
        }
        let mut data = Vec::with_capacity(2 * polar.len());
        for &(r, th) in polar {
            if !r.is_finite() || !th.is_finite() || r < 0.0 {
                return Err(Error::invalid(format!("invalid planar node state ({r}, {th})")));
            }
            data.push(r);
            data.push(if r == 0.0 { 0.0 } else { wrap_phase(th) });
        }
        Ok(GlobalState {
            kind: ModelKind::PlanarLimitCycle,
            data,
        })
    }

    /// Builds a state from per-node vectors interpreted for `kind`.
    pub fn from_nodes(kind: ModelKind, nodes: &[Vec<f64>]) -> Result<Self> {
        let dim = kind.state_dim();
        if let Some((i, bad)) = nodes.iter().enumerate().find(|(_, v)| v.len() != dim) {
            return Err(Error::shape(
                format!("node states of length {dim}"),
                format!("node {i} of length {}", bad.len()),
            ));
        }
        match kind {
            ModelKind::PhaseOscillator => {
                Self::phases(&nodes.iter().map(|v| v[0]).collect::<Vec<_>>())
            }
            ModelKind::PlanarLimitCycle => {
                Self::planar(&nodes.iter().map(|v| (v[0], v[1])).collect::<Vec<_>>())
            }
        }
    }

    /// Fully synchronous state with every node equal to `node`.
    pub fn diagonal(kind: ModelKind, node: &[f64], n: usize) -> Result<Self> {
        Self::from_nodes(kind, &vec![node.to_vec(); n])
    }

    /// Uniform random phases; planar radii uniform in `[0.5, 1.5]`.
    pub fn random<R: Rng + ?Sized>(kind: ModelKind, n: usize, rng: &mut R) -> Self {
        let data = match kind {
            ModelKind::PhaseOscillator => (0..n).map(|_| rng.gen_range(0.0..TAU)).collect(),
            ModelKind::PlanarLimitCycle => (0..n)
                .flat_map(|_| [rng.gen_range(0.5..1.5), rng.gen_range(0.0..TAU)])
                .collect(),
        };
        GlobalState { kind, data }
    }

    pub(crate) fn from_raw(kind: ModelKind, data: Vec<f64>) -> Self {
        GlobalState { kind, data }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn n_nodes(&self) -> usize {
        self.data.len() / self.kind.state_dim()
    }

    pub fn state_dim(&self) -> usize {
        self.kind.state_dim()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let d = self.state_dim();
        &self.data[i * d..(i + 1) * d]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.state_dim())
    }

    /// Phase component of node `i`.
    pub fn phase(&self, i: usize) -> f64 {
        self.node(i)[self.kind.phase_index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Replaces node `i` (re-wrapping the phase component).
    pub fn set_node(&mut self, i: usize, value: &[f64]) -> Result<()> {
        let d = self.state_dim();
        if value.len() != d {
            return Err(Error::shape(d, value.len()));
        }
        let p = self.kind.phase_index();
        for (k, &v) in value.iter().enumerate() {
            self.data[i * d + k] = if k == p { wrap_phase(v) } else { v };
        }
        Ok(())
    }
}
