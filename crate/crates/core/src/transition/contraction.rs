use rand::Rng;
use std::f64::consts::TAU;

use super::{replica_rng, ExperimentSpec, STREAM_PAIRS};
use crate::dynamics::{
    circle_distance, global_flow, signed_phase_diff, GlobalState, LatticeSystem, ModelKind,
};
use crate::error::{Error, Result};
use crate::metric::{d_async, strict_sync_distance};

/// Pairs with a smaller initial asynchronous distance are skipped.
const MIN_DENOMINATOR: f64 = 1e-8;

/// How random state pairs are drawn for the contraction estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairSampling {
    /// A random synchronous state plus independent perturbations of size
    /// `scale` per coordinate, with the node mean removed so the perturbation
    /// is transverse to the diagonal.
    NearDiagonal { scale: f64 },
    /// Two independent uniform random states.
    Uniform,
}

fn draw_pair<R: Rng>(
    sys: &LatticeSystem,
    sampling: PairSampling,
    rng: &mut R,
) -> Result<(GlobalState, GlobalState)> {
    let kind = sys.kind();
    let n = sys.n_nodes();
    match sampling {
        PairSampling::Uniform => Ok((
            GlobalState::random(kind, n, rng),
            GlobalState::random(kind, n, rng),
        )),
        PairSampling::NearDiagonal { scale } => {
            let base: Vec<f64> = match kind {
                ModelKind::PhaseOscillator => vec![rng.gen_range(0.0..TAU)],
                ModelKind::PlanarLimitCycle => vec![1.0, rng.gen_range(0.0..TAU)],
            };
            let d = base.len();
            let mut perturbed = || {
                let mut p: Vec<f64> = (0..n * d).map(|_| rng.gen_range(-scale..scale)).collect();
                for c in 0..d {
                    let m = (0..n).map(|i| p[i * d + c]).sum::<f64>() / n as f64;
                    for i in 0..n {
                        p[i * d + c] -= m;
                    }
                }
                let nodes: Vec<Vec<f64>> = (0..n)
                    .map(|i| (0..d).map(|c| base[c] + p[i * d + c]).collect())
                    .collect();
                GlobalState::from_nodes(kind, &nodes)
            };
            Ok((perturbed()?, perturbed()?))
        }
    }
}

/// Empirical contraction factor of the time-`t0` map in `D_async`:
/// the largest observed `D_async(Φx, Φy) / D_async(x, y)` over seeded pairs.
///
/// `η ≥ 1` certifies that contraction fails; `η < 1` is evidence only.
pub fn contraction_factor(
    spec: &ExperimentSpec,
    lambda: f64,
    t0: f64,
    n_pairs: usize,
) -> Result<f64> {
    spec.validate()?;
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::invalid(format!("t0 must be > 0, got {t0}")));
    }
    if n_pairs == 0 {
        return Err(Error::invalid("n_pairs must be at least 1"));
    }
    if let PairSampling::NearDiagonal { scale } = spec.probe.pairs {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid(format!("pair scale must be > 0, got {scale}")));
        }
    }
    let sys = spec.system.with_lambda(lambda)?;
    let mut eta: Option<f64> = None;
    for k in 0..n_pairs {
        let mut rng = replica_rng(spec.rng_seed, STREAM_PAIRS, k as u64);
        let (x, y) = draw_pair(&sys, spec.probe.pairs, &mut rng)?;
        let before = d_async(&sys, &x, &y, &spec.window)?;
        if before < MIN_DENOMINATOR {
            continue;
        }
        let fx = global_flow(&sys, &x, t0, spec.dt).map_err(|e| e.at_lambda(lambda))?;
        let fy = global_flow(&sys, &y, t0, spec.dt).map_err(|e| e.at_lambda(lambda))?;
        let ratio = d_async(&sys, &fx, &fy, &spec.window)? / before;
        eta = Some(eta.map_or(ratio, |e| e.max(ratio)));
    }
    eta.ok_or_else(|| {
        Error::Inconclusive(format!(
            "all {n_pairs} pairs had asynchronous distance below {MIN_DENOMINATOR:e}"
        ))
    })
}

/// Outcome of iterating the stroboscopic map.
#[derive(Debug, Clone, PartialEq)]
pub struct StrobeResult {
    pub fixed_state: GlobalState,
    pub converged: bool,
    /// Distance between the last two offset vectors.
    pub residual: f64,
    pub iterations: usize,
    pub strict_sync: f64,
}

/// Offsets relative to node 0: radii as-is, phases as differences to node 0.
fn offsets(x: &GlobalState) -> Vec<f64> {
    let p0 = x.phase(0);
    let mut out = Vec::with_capacity(x.as_slice().len());
    for i in 0..x.n_nodes() {
        if x.kind() == ModelKind::PlanarLimitCycle {
            out.push(x.node(i)[0]);
        }
        if i > 0 {
            out.push(signed_phase_diff(p0, x.phase(i)));
        }
    }
    out
}

fn offset_distance(kind: ModelKind, a: &[f64], b: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    let mut k = 0;
    let n = match kind {
        ModelKind::PhaseOscillator => a.len() + 1,
        ModelKind::PlanarLimitCycle => a.len().div_ceil(2),
    };
    for i in 0..n {
        if kind == ModelKind::PlanarLimitCycle {
            worst = worst.max((a[k] - b[k]).abs());
            k += 1;
        }
        if i > 0 {
            worst = worst.max(circle_distance(a[k], b[k]));
            k += 1;
        }
    }
    worst
}

/// Iterates `x ↦ Φ^{t0}(x)` in offset coordinates relative to node 0 until
/// successive offset vectors differ by less than `tol`.
///
/// Non-convergence is reported in the result, not as an error.
pub fn stroboscopic_fixed_point(
    sys: &LatticeSystem,
    t0: f64,
    x0: &GlobalState,
    max_iter: usize,
    tol: f64,
    dt: f64,
) -> Result<StrobeResult> {
    sys.check_state(x0)?;
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::invalid(format!("t0 must be > 0, got {t0}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tol must be > 0, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    let kind = sys.kind();
    let mut x = x0.clone();
    let mut off = offsets(&x);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        x = global_flow(sys, &x, t0, dt)?;
        iterations += 1;
        let next = offsets(&x);
        residual = offset_distance(kind, &off, &next);
        off = next;
        if residual < tol {
            converged = true;
            break;
        }
    }
    let strict_sync = strict_sync_distance(sys, &x)?;
    Ok(StrobeResult {
        fixed_state: x,
        converged,
        residual,
        iterations,
        strict_sync,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{CouplingGraph, CouplingKind};

    fn complete3(lambda: f64) -> LatticeSystem {
        LatticeSystem::phase_oscillators(
            &[1.0, 1.0, 1.0],
            CouplingGraph::complete(3).unwrap(),
            CouplingKind::SineDifference,
            lambda,
        )
        .unwrap()
    }

    #[test]
    fn diagonal_start_converges_immediately() {
        let sys = complete3(1.0);
        let x = GlobalState::phases(&[0.7, 0.7, 0.7]).unwrap();
        let r = stroboscopic_fixed_point(&sys, 1.0, &x, 50, 1e-10, 1e-3).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert!(r.strict_sync < 1e-9);
    }

    #[test]
    fn frozen_offsets_are_fixed_but_not_synchronous() {
        let sys = complete3(0.0);
        let x = GlobalState::phases(&[0.0, 0.5, 1.5]).unwrap();
        let r = stroboscopic_fixed_point(&sys, 1.0, &x, 50, 1e-10, 1e-3).unwrap();
        assert!(r.converged);
        assert!(r.residual < 1e-10);
        assert!((r.strict_sync - 0.75).abs() < 1e-9);
    }

    #[test]
    fn offsets_layout() {
        let x = GlobalState::planar(&[(1.0, 0.5), (0.9, 0.7)]).unwrap();
        let o = offsets(&x);
        assert_eq!(o.len(), 3);
        assert!((o[2] - 0.2).abs() < 1e-12);
        assert_eq!(offset_distance(ModelKind::PlanarLimitCycle, &o, &o), 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let sys = complete3(1.0);
        let x = GlobalState::phases(&[0.0, 0.1, 0.2]).unwrap();
        assert!(stroboscopic_fixed_point(&sys, 0.0, &x, 5, 1e-9, 1e-3).is_err());
        assert!(stroboscopic_fixed_point(&sys, 1.0, &x, 0, 1e-9, 1e-3).is_err());
        assert!(stroboscopic_fixed_point(&sys, 1.0, &x, 5, 0.0, 1e-3).is_err());
    }
}
