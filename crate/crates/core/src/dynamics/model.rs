//! Single-node subsystems: their intrinsic flows and state metrics.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Fixed RK4 step used for uncoupled node flows that have no closed form.
pub const NODE_FLOW_DT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// `θ̇ = ω` on the circle. State: `[θ]`.
    PhaseOscillator,
    /// `ṙ = r(1 − r²)`, `θ̇ = ω` in polar form. State: `[r, θ]`.
    PlanarLimitCycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    CircleGeodesic,
    Euclidean,
}

impl ModelKind {
    pub fn state_dim(self) -> usize {
        match self {
            ModelKind::PhaseOscillator => 1,
            ModelKind::PlanarLimitCycle => 2,
        }
    }

    pub fn metric_kind(self) -> MetricKind {
        match self {
            ModelKind::PhaseOscillator => MetricKind::CircleGeodesic,
            ModelKind::PlanarLimitCycle => MetricKind::Euclidean,
        }
    }

    /// Index of the angular component inside a node state.
    pub fn phase_index(self) -> usize {
        match self {
            ModelKind::PhaseOscillator => 0,
            ModelKind::PlanarLimitCycle => 1,
        }
    }
}

/// A node's intrinsic dynamics together with its state metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsystemModel {
    kind: ModelKind,
    omega: f64,
}

impl SubsystemModel {
    pub fn new(kind: ModelKind, omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::invalid(format!("omega must be finite, got {omega}")));
        }
        Ok(SubsystemModel { kind, omega })
    }

    pub fn phase(omega: f64) -> Result<Self> {
        Self::new(ModelKind::PhaseOscillator, omega)
    }

    pub fn planar(omega: f64) -> Result<Self> {
        Self::new(ModelKind::PlanarLimitCycle, omega)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn state_dim(&self) -> usize {
        self.kind.state_dim()
    }

    pub fn metric_kind(&self) -> MetricKind {
        self.kind.metric_kind()
    }

    /// Checks length and finiteness of a node state (and `r ≥ 0` for planar nodes).
    pub fn validate_state(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.state_dim() {
            return Err(Error::shape(
                format!("node state of length {}", self.state_dim()),
                format!("length {}", x.len()),
            ));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite node state {x:?}")));
        }
        if self.kind == ModelKind::PlanarLimitCycle && x[0] < 0.0 {
            return Err(Error::invalid(format!("negative radius {}", x[0])));
        }
        Ok(())
    }

    /// Distance `d_i` between two states of this node.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        node_distance(self.kind, a, b)
    }
}

/// Wraps an angle into `[0, 2π)`.
#[inline]
pub fn wrap_phase(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Signed angular difference `b − a` mapped into `(−π, π]`.
#[inline]
pub fn signed_phase_diff(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Geodesic distance on the unit circle, `min(|Δ|, 2π − |Δ|)`.
#[inline]
pub fn circle_distance(a: f64, b: f64) -> f64 {
    signed_phase_diff(a, b).abs()
}

pub(crate) fn node_distance(kind: ModelKind, a: &[f64], b: &[f64]) -> f64 {
    match kind {
        ModelKind::PhaseOscillator => circle_distance(a[0], b[0]),
        ModelKind::PlanarLimitCycle => {
            // |p − q|² = (r₁ − r₂)² + 4 r₁ r₂ sin²(Δθ/2); exact zero iff states coincide
            let (r1, r2) = (a[0], b[0]);
            let half = 0.5 * signed_phase_diff(a[1], b[1]);
            let s = half.sin();
            ((r1 - r2).powi(2) + 4.0 * r1 * r2 * s * s).max(0.0).sqrt()
        }
    }
}

/// Radial part of the limit-cycle field.
#[inline]
fn radial_rate(r: f64) -> f64 {
    r * (1.0 - r * r)
}

/// Uncoupled node flow `φ^{α t}(x)`.
///
/// Phase oscillators use the closed-form rotation. Planar limit cycles advance
/// the angle in closed form and integrate the radius with fixed-step RK4
/// (step at most [`NODE_FLOW_DT`] in internal time). Negative `t` is allowed.
pub fn node_flow(model: &SubsystemModel, rate: f64, x: &[f64], t: f64) -> Result<Vec<f64>> {
    if !t.is_finite() {
        return Err(Error::invalid(format!("non-finite duration {t}")));
    }
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::invalid(format!("rate must be positive, got {rate}")));
    }
    model.validate_state(x)?;
    if t == 0.0 {
        return Ok(x.to_vec());
    }
    let tau = rate * t;
    match model.kind {
        ModelKind::PhaseOscillator => Ok(vec![wrap_phase(x[0] + model.omega * tau)]),
        ModelKind::PlanarLimitCycle => {
            let steps = (tau.abs() / NODE_FLOW_DT).ceil().max(1.0) as usize;
            let h = tau / steps as f64;
            let mut r = x[0];
            for _ in 0..steps {
                let k1 = radial_rate(r);
                let k2 = radial_rate(r + 0.5 * h * k1);
                let k3 = radial_rate(r + 0.5 * h * k2);
                let k4 = radial_rate(r + h * k3);
                r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if !r.is_finite() {
                    return Err(Error::invalid(format!(
                        "radius diverged while flowing node state {x:?} for t = {t}"
                    )));
                }
            }
            Ok(vec![r, wrap_phase(x[1] + model.omega * tau)])
        }
    }
}
