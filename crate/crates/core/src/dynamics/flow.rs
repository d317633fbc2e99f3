//! Coupled and uncoupled flows on the global state space, the permutation
//! action and the per-node time-shift action.

use super::model::{node_flow, wrap_phase, ModelKind};
use super::state::GlobalState;
use super::system::LatticeSystem;
use crate::error::{Error, Result};

/// Default RK4 step for the coupled flow.
pub const DEFAULT_DT: f64 = 1e-3;
/// Largest step accepted by [`global_step`].
pub const MAX_STEP: f64 = 0.1;

fn to_integration_coords(x: &GlobalState) -> Vec<f64> {
    match x.kind() {
        ModelKind::PhaseOscillator => x.as_slice().to_vec(),
        ModelKind::PlanarLimitCycle => x
            .nodes()
            .flat_map(|v| {
                let (r, th) = (v[0], v[1]);
                [r * th.cos(), r * th.sin()]
            })
            .collect(),
    }
}

fn from_integration_coords(kind: ModelKind, u: &[f64]) -> GlobalState {
    let data = match kind {
        ModelKind::PhaseOscillator => u.iter().map(|&t| wrap_phase(t)).collect(),
        ModelKind::PlanarLimitCycle => u
            .chunks(2)
            .flat_map(|p| {
                let r = p[0].hypot(p[1]);
                let th = if r == 0.0 { 0.0 } else { wrap_phase(p[1].atan2(p[0])) };
                [r, th]
            })
            .collect(),
    };
    GlobalState::from_raw(kind, data)
}

struct Rk4Workspace {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Workspace {
    fn new(len: usize) -> Self {
        Rk4Workspace {
            k1: vec![0.0; len],
            k2: vec![0.0; len],
            k3: vec![0.0; len],
            k4: vec![0.0; len],
            tmp: vec![0.0; len],
        }
    }

    fn step(&mut self, sys: &LatticeSystem, u: &mut [f64], h: f64) {
        let n = u.len();
        sys.field(u, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = u[i] + 0.5 * h * self.k1[i];
        }
        sys.field(&self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = u[i] + 0.5 * h * self.k2[i];
        }
        sys.field(&self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = u[i] + h * self.k3[i];
        }
        sys.field(&self.tmp, &mut self.k4);
        for i in 0..n {
            u[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

fn first_non_finite(kind: ModelKind, u: &[f64]) -> Option<usize> {
    u.iter()
        .position(|v| !v.is_finite())
        .map(|k| k / kind.state_dim())
}

/// Advances in place by `steps` RK4 steps of size `h`; `t_start` only labels errors.
fn integrate(
    sys: &LatticeSystem,
    x: &GlobalState,
    h: f64,
    steps: usize,
    t_start: f64,
) -> Result<GlobalState> {
    let kind = x.kind();
    let mut u = to_integration_coords(x);
    let mut ws = Rk4Workspace::new(u.len());
    for s in 0..steps {
        ws.step(sys, &mut u, h);
        if let Some(node) = first_non_finite(kind, &u) {
            return Err(Error::IntegrationFailure {
                node,
                time: t_start + (s + 1) as f64 * h,
            });
        }
        if kind == ModelKind::PhaseOscillator {
            for v in u.iter_mut() {
                *v = wrap_phase(*v);
            }
        }
    }
    Ok(from_integration_coords(kind, &u))
}

/// One classical RK4 step of the coupled law, phases re-wrapped into `[0, 2π)`.
pub fn global_step(sys: &LatticeSystem, x: &GlobalState, dt: f64) -> Result<GlobalState> {
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(Error::invalid(format!(
            "step must lie in (0, {MAX_STEP}], got {dt}"
        )));
    }
    sys.check_state(x)?;
    integrate(sys, x, dt, 1, 0.0)
}

fn step_count(t: f64, dt: f64) -> usize {
    ((t / dt) - 1e-9).ceil().max(1.0) as usize
}

/// Coupled flow `Φ^t(x)` for `t ≥ 0`, using `⌈t/dt⌉` equal RK4 steps.
pub fn global_flow(sys: &LatticeSystem, x: &GlobalState, t: f64, dt: f64) -> Result<GlobalState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!(
            "coupled flow runs forward only; got t = {t}"
        )));
    }
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(Error::invalid(format!(
            "step must lie in (0, {MAX_STEP}], got {dt}"
        )));
    }
    sys.check_state(x)?;
    if t == 0.0 {
        return Ok(x.clone());
    }
    let steps = step_count(t, dt);
    integrate(sys, x, t / steps as f64, steps, 0.0)
}

/// States at each of the non-decreasing `times`, starting from `x` at time 0.
pub fn sample_flow(
    sys: &LatticeSystem,
    x: &GlobalState,
    times: &[f64],
    dt: f64,
) -> Result<Vec<GlobalState>> {
    let mut out = Vec::with_capacity(times.len());
    let mut current = x.clone();
    let mut now = 0.0;
    for &t in times {
        if t < now {
            return Err(Error::invalid("sample times must be non-decreasing"));
        }
        if t > now {
            current = global_flow(sys, &current, t - now, dt).map_err(|e| match e {
                Error::IntegrationFailure { node, time } => Error::IntegrationFailure {
                    node,
                    time: now + time,
                },
                other => other,
            })?;
            now = t;
        }
        out.push(current.clone());
    }
    Ok(out)
}

/// A bijection on node indices; `image[i]` is where node `i` is sent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for (i, &j) in image.iter().enumerate() {
            if j >= n {
                return Err(Error::invalid(format!(
                    "permutation image[{i}] = {j} is out of range [0, {n})"
                )));
            }
            if seen[j] {
                return Err(Error::invalid(format!(
                    "permutation image[{i}] = {j} repeats an earlier value"
                )));
            }
            seen[j] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (0..n).collect(),
        }
    }

    /// `i ↦ i + k (mod n)`.
    pub fn rotation(n: usize, k: usize) -> Self {
        Permutation {
            image: (0..n).map(|i| (i + k) % n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { image: inv }
    }
}

/// Relabels coordinates: `(Π_g x)_{g(i)} = x_i`.
pub fn apply_permutation(x: &GlobalState, p: &Permutation) -> Result<GlobalState> {
    if p.len() != x.n_nodes() {
        return Err(Error::shape(
            format!("permutation of {} nodes", x.n_nodes()),
            format!("{} entries", p.len()),
        ));
    }
    let d = x.state_dim();
    let mut data = vec![0.0; x.as_slice().len()];
    for (i, node) in x.nodes().enumerate() {
        let j = p.apply(i);
        data[j * d..(j + 1) * d].copy_from_slice(node);
    }
    Ok(GlobalState::from_raw(x.kind(), data))
}

/// `max_i d_i((Φ^t Π x)_i, (Π Φ^t x)_i)`.
pub fn equivariance_defect(
    sys: &LatticeSystem,
    p: &Permutation,
    x: &GlobalState,
    t: f64,
    dt: f64,
) -> Result<f64> {
    sys.check_state(x)?;
    let permuted_first = global_flow(sys, &apply_permutation(x, p)?, t, dt)?;
    let flowed_first = apply_permutation(&global_flow(sys, x, t, dt)?, p)?;
    Ok(node_distances(sys, &permuted_first, &flowed_first)
        .into_iter()
        .fold(0.0, f64::max))
}

/// Advances node `i` by its own uncoupled flow for `theta[i]`.
pub fn apply_timeshifts(
    sys: &LatticeSystem,
    x: &GlobalState,
    theta: &[f64],
) -> Result<GlobalState> {
    sys.check_state(x)?;
    if theta.len() != sys.n_nodes() {
        return Err(Error::shape(
            format!("{} time shifts", sys.n_nodes()),
            theta.len(),
        ));
    }
    let mut out = x.clone();
    for (i, &s) in theta.iter().enumerate() {
        let y = node_flow(sys.model(i), sys.rates()[i], x.node(i), s)?;
        out.set_node(i, &y)?;
    }
    Ok(out)
}

pub(crate) fn node_distances(sys: &LatticeSystem, x: &GlobalState, y: &GlobalState) -> Vec<f64> {
    (0..sys.n_nodes())
        .map(|i| sys.model(i).distance(x.node(i), y.node(i)))
        .collect()
}

/// `D(x, y) = max_i m_i d_i(x_i, y_i)`.
pub fn product_metric(sys: &LatticeSystem, x: &GlobalState, y: &GlobalState) -> Result<f64> {
    sys.check_state(x)?;
    sys.check_state(y)?;
    Ok(node_distances(sys, x, y)
        .into_iter()
        .zip(sys.metric_weights())
        .map(|(d, m)| m * d)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{CouplingGraph, CouplingKind};
    use std::f64::consts::PI;

    fn two_node(omegas: &[f64], lambda: f64) -> LatticeSystem {
        LatticeSystem::phase_oscillators(
            omegas,
            CouplingGraph::complete(2).unwrap(),
            CouplingKind::SineDifference,
            lambda,
        )
        .unwrap()
    }

    #[test]
    fn decoupled_step() {
        let sys = two_node(&[1.0, 1.0], 0.0);
        let x = GlobalState::phases(&[0.0, 1.0]).unwrap();
        let y = global_step(&sys, &x, 0.1).unwrap();
        assert!((y.phase(0) - 0.1).abs() < 1e-14);
        assert!((y.phase(1) - 1.1).abs() < 1e-14);
    }

    #[test]
    fn step_bounds() {
        let sys = two_node(&[1.0, 1.0], 0.0);
        let x = GlobalState::phases(&[0.0, 1.0]).unwrap();
        assert!(global_step(&sys, &x, 0.0).is_err());
        assert!(global_step(&sys, &x, -0.1).is_err());
        assert!(global_step(&sys, &x, 2.0 * MAX_STEP).is_err());
        assert!(global_flow(&sys, &x, -1.0, 1e-3).is_err());
    }

    #[test]
    fn coupled_step_matches_offset_oracle() {
        // Δ̇ = −2λ sin Δ, integrated with a much finer Euler-free RK4 on the scalar ODE.
        let sys = two_node(&[0.0, 0.0], 1.0);
        let x = GlobalState::phases(&[0.0, 0.2]).unwrap();
        let y = global_step(&sys, &x, 0.01).unwrap();
        let delta = signed(y.phase(0), y.phase(1));
        let mut d = 0.2f64;
        let h = 1e-5;
        for _ in 0..1000 {
            let f = |d: f64| -2.0 * d.sin();
            let k1 = f(d);
            let k2 = f(d + 0.5 * h * k1);
            let k3 = f(d + 0.5 * h * k2);
            let k4 = f(d + h * k3);
            d += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        assert!(delta < 0.2);
        assert!((delta - d).abs() < 1e-10);
    }

    fn signed(a: f64, b: f64) -> f64 {
        crate::dynamics::signed_phase_diff(a, b)
    }

    #[test]
    fn zero_time_is_exact_identity() {
        let sys = two_node(&[0.3, -0.2], 0.8);
        let x = GlobalState::phases(&[0.4, 5.0]).unwrap();
        assert_eq!(global_flow(&sys, &x, 0.0, 1e-3).unwrap(), x);
    }

    #[test]
    fn permutation_actions() {
        let x = GlobalState::phases(&[0.1, 0.2, 0.3]).unwrap();
        let c = Permutation::rotation(3, 1);
        let mut y = x.clone();
        for _ in 0..3 {
            y = apply_permutation(&y, &c).unwrap();
        }
        assert_eq!(y, x);
        assert_eq!(apply_permutation(&x, &Permutation::identity(3)).unwrap(), x);
        let swapped = apply_permutation(
            &GlobalState::phases(&[0.5, 1.5]).unwrap(),
            &Permutation::new(vec![1, 0]).unwrap(),
        )
        .unwrap();
        assert_eq!(swapped.as_slice(), &[1.5, 0.5]);
        let back = apply_permutation(&apply_permutation(&x, &c).unwrap(), &c.inverse()).unwrap();
        assert_eq!(back, x);
        assert!(apply_permutation(&x, &Permutation::identity(2)).is_err());
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
    }

    #[test]
    fn timeshift_examples() {
        let sys = two_node(&[1.0, 1.0], 0.5);
        let x = GlobalState::phases(&[0.0, 0.0]).unwrap();
        assert_eq!(apply_timeshifts(&sys, &x, &[0.0, 0.0]).unwrap(), x);
        let y = apply_timeshifts(&sys, &x, &[PI, 0.0]).unwrap();
        assert!((y.phase(0) - PI).abs() < 1e-15);
        assert_eq!(y.phase(1), 0.0);
        assert!(apply_timeshifts(&sys, &x, &[0.0]).is_err());
    }

    #[test]
    fn product_metric_examples() {
        let sys = two_node(&[1.0, 1.0], 0.0);
        let x = GlobalState::phases(&[0.0, 0.0]).unwrap();
        let y = GlobalState::phases(&[PI, 0.0]).unwrap();
        assert_eq!(product_metric(&sys, &x, &x).unwrap(), 0.0);
        assert!((product_metric(&sys, &x, &y).unwrap() - PI).abs() < 1e-15);
        let weighted = sys.with_metric_weights(vec![0.5, 1.0]).unwrap();
        assert!((product_metric(&weighted, &x, &y).unwrap() - PI / 2.0).abs() < 1e-15);
        let three = GlobalState::phases(&[0.0, 0.0, 0.0]).unwrap();
        assert!(product_metric(&sys, &x, &three).is_err());
    }

    #[test]
    fn planar_diffusive_pair_synchronizes() {
        let sys = LatticeSystem::planar_limit_cycles(
            &[1.0, 1.0],
            CouplingGraph::complete(2).unwrap(),
            1.0,
        )
        .unwrap();
        let x = GlobalState::planar(&[(0.5, 0.0), (1.2, 2.0)]).unwrap();
        let y = global_flow(&sys, &x, 20.0, 1e-3).unwrap();
        assert!(sys.model(0).distance(y.node(0), y.node(1)) < 1e-6);
        assert!((y.node(0)[0] - 1.0).abs() < 1e-6);
    }
}
