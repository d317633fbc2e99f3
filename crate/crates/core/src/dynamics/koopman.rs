use std::fmt;
use std::str::FromStr;

use super::flow::global_flow;
use super::state::GlobalState;
use super::system::LatticeSystem;
use crate::error::{Error, Result};

/// Built-in observables on the global state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    /// `cos θ₀` of node 0's phase component.
    FirstNodeCos,
    /// `|N⁻¹ Σ_k e^{iθ_k}|`.
    MeanPhaseCoherence,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::FirstNodeCos => "first-node-cos",
            Observable::MeanPhaseCoherence => "mean-phase-coherence",
        }
    }

    pub fn evaluate(self, x: &GlobalState) -> f64 {
        match self {
            Observable::FirstNodeCos => x.phase(0).cos(),
            Observable::MeanPhaseCoherence => mean_phase_coherence(x),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-node-cos" => Ok(Observable::FirstNodeCos),
            "mean-phase-coherence" => Ok(Observable::MeanPhaseCoherence),
            other => Err(Error::UnknownObservable(other.to_string())),
        }
    }
}

pub fn mean_phase_coherence(x: &GlobalState) -> f64 {
    let n = x.n_nodes() as f64;
    let (s, c) = (0..x.n_nodes()).fold((0.0, 0.0), |(s, c), i| {
        let th = x.phase(i);
        (s + th.sin(), c + th.cos())
    });
    (s / n).hypot(c / n)
}

/// `(U^t f)(x) = f(Φ^t(x))`.
pub fn koopman_eval(
    sys: &LatticeSystem,
    obs: Observable,
    x: &GlobalState,
    t: f64,
    dt: f64,
) -> Result<f64> {
    Ok(obs.evaluate(&global_flow(sys, x, t, dt)?))
}

/// Name-based variant of [`koopman_eval`].
pub fn koopman_eval_named(
    sys: &LatticeSystem,
    name: &str,
    x: &GlobalState,
    t: f64,
    dt: f64,
) -> Result<f64> {
    koopman_eval(sys, name.parse()?, x, t, dt)
}
