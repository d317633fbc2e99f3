use super::graph::CouplingGraph;
use super::model::{signed_phase_diff, ModelKind, SubsystemModel};
use super::state::GlobalState;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingKind {
    /// `g = sin(θ_j − θ_i)`; phase oscillators only.
    SineDifference,
    /// `g = x_j − x_i` (wrapped angular difference for phases, Cartesian for planar).
    Diffusive,
}

/// The full coupled system
/// `ẋ_i = α_i f_i(x_i) + λ Σ_j w_ij g(x_j, x_i)`.
///
/// Clock rates rescale only the intrinsic field; coupling acts in global time.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSystem {
    models: Vec<SubsystemModel>,
    rates: Vec<f64>,
    graph: CouplingGraph,
    coupling: CouplingKind,
    lambda: f64,
    metric_weights: Vec<f64>,
}

impl LatticeSystem {
    pub fn new(
        models: Vec<SubsystemModel>,
        rates: Vec<f64>,
        graph: CouplingGraph,
        coupling: CouplingKind,
        lambda: f64,
        metric_weights: Vec<f64>,
    ) -> Result<Self> {
        let n = graph.n_nodes();
        for (name, len) in [
            ("models", models.len()),
            ("rates", rates.len()),
            ("metric_weights", metric_weights.len()),
        ] {
            if len != n {
                return Err(Error::shape(
                    format!("{n} {name} (one per node)"),
                    format!("{len}"),
                ));
            }
        }
        let kind = models[0].kind();
        if models.iter().any(|m| m.kind() != kind) {
            return Err(Error::invalid("all nodes must share one model kind"));
        }
        if let Some(a) = rates.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::invalid(format!("clock rates must be positive, got {a}")));
        }
        if let Some(m) = metric_weights
            .iter()
            .find(|m| !(m.is_finite() && **m > 0.0))
        {
            return Err(Error::invalid(format!(
                "metric weights must be positive, got {m}"
            )));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid(format!(
                "coupling strength must be finite and non-negative, got {lambda}"
            )));
        }
        if coupling == CouplingKind::SineDifference && kind != ModelKind::PhaseOscillator {
            return Err(Error::ModelMismatch(
                "sine-difference coupling requires phase oscillators".into(),
            ));
        }
        Ok(LatticeSystem {
            models,
            rates,
            graph,
            coupling,
            lambda,
            metric_weights,
        })
    }

    /// Phase oscillators with unit rates and unit metric weights.
    pub fn phase_oscillators(
        omegas: &[f64],
        graph: CouplingGraph,
        coupling: CouplingKind,
        lambda: f64,
    ) -> Result<Self> {
        let models = omegas
            .iter()
            .map(|&w| SubsystemModel::phase(w))
            .collect::<Result<Vec<_>>>()?;
        let n = models.len();
        Self::new(models, vec![1.0; n], graph, coupling, lambda, vec![1.0; n])
    }

    /// Planar limit cycles with diffusive coupling, unit rates and weights.
    pub fn planar_limit_cycles(omegas: &[f64], graph: CouplingGraph, lambda: f64) -> Result<Self> {
        let models = omegas
            .iter()
            .map(|&w| SubsystemModel::planar(w))
            .collect::<Result<Vec<_>>>()?;
        let n = models.len();
        Self::new(
            models,
            vec![1.0; n],
            graph,
            CouplingKind::Diffusive,
            lambda,
            vec![1.0; n],
        )
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(
            self.models.clone(),
            self.rates.clone(),
            self.graph.clone(),
            self.coupling,
            lambda,
            self.metric_weights.clone(),
        )
    }

    pub fn with_rates(&self, rates: Vec<f64>) -> Result<Self> {
        Self::new(
            self.models.clone(),
            rates,
            self.graph.clone(),
            self.coupling,
            self.lambda,
            self.metric_weights.clone(),
        )
    }

    pub fn with_metric_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(
            self.models.clone(),
            self.rates.clone(),
            self.graph.clone(),
            self.coupling,
            self.lambda,
            weights,
        )
    }

    pub fn with_graph(&self, graph: CouplingGraph) -> Result<Self> {
        Self::new(
            self.models.clone(),
            self.rates.clone(),
            graph,
            self.coupling,
            self.lambda,
            self.metric_weights.clone(),
        )
    }

    pub fn n_nodes(&self) -> usize {
        self.graph.n_nodes()
    }

    pub fn kind(&self) -> ModelKind {
        self.models[0].kind()
    }

    pub fn models(&self) -> &[SubsystemModel] {
        &self.models
    }

    pub fn model(&self, i: usize) -> &SubsystemModel {
        &self.models[i]
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn graph(&self) -> &CouplingGraph {
        &self.graph
    }

    pub fn coupling(&self) -> CouplingKind {
        self.coupling
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn metric_weights(&self) -> &[f64] {
        &self.metric_weights
    }

    /// Checks that `x` is a state of this system.
    pub fn check_state(&self, x: &GlobalState) -> Result<()> {
        if x.kind() != self.kind() {
            return Err(Error::ModelMismatch(format!(
                "state is {:?} but system is {:?}",
                x.kind(),
                self.kind()
            )));
        }
        if x.n_nodes() != self.n_nodes() {
            return Err(Error::shape(
                format!("{} nodes", self.n_nodes()),
                format!("{} nodes", x.n_nodes()),
            ));
        }
        Ok(())
    }

    /// Evaluates the coupled vector field in integration coordinates
    /// (angles for phase oscillators, Cartesian pairs for planar nodes).
    pub(crate) fn field(&self, u: &[f64], out: &mut [f64]) {
        let lambda = self.lambda;
        match self.kind() {
            ModelKind::PhaseOscillator => {
                for (i, o) in out.iter_mut().enumerate() {
                    let th = u[i];
                    let mut acc = 0.0;
                    if lambda != 0.0 {
                        for &(j, w) in self.graph.incoming(i) {
                            acc += w * match self.coupling {
                                CouplingKind::SineDifference => (u[j] - th).sin(),
                                CouplingKind::Diffusive => signed_phase_diff(th, u[j]),
                            };
                        }
                    }
                    *o = self.rates[i] * self.models[i].omega() + lambda * acc;
                }
            }
            ModelKind::PlanarLimitCycle => {
                for i in 0..self.n_nodes() {
                    let (x, y) = (u[2 * i], u[2 * i + 1]);
                    let a = self.rates[i];
                    let w0 = self.models[i].omega();
                    let radial = 1.0 - (x * x + y * y);
                    let mut cx = 0.0;
                    let mut cy = 0.0;
                    if lambda != 0.0 {
                        for &(j, w) in self.graph.incoming(i) {
                            cx += w * (u[2 * j] - x);
                            cy += w * (u[2 * j + 1] - y);
                        }
                    }
                    out[2 * i] = a * (x * radial - w0 * y) + lambda * cx;
                    out[2 * i + 1] = a * (y * radial + w0 * x) + lambda * cy;
                }
            }
        }
    }
}
