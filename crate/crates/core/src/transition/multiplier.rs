use crate::dynamics::{global_flow, signed_phase_diff, GlobalState, LatticeSystem, ModelKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierOptions {
    pub dt: f64,
    /// Central-difference step along each transverse direction.
    pub fd_step: f64,
    /// Time the synchronous reference state is flowed before linearizing.
    pub transient: f64,
    /// Number of consecutive `t0` periods whose Jacobians are multiplied.
    pub periods: usize,
    pub max_iter: usize,
    /// Convergence tolerance on the per-period log growth.
    pub tol: f64,
}

impl Default for MultiplierOptions {
    fn default() -> Self {
        MultiplierOptions {
            dt: crate::dynamics::DEFAULT_DT,
            fd_step: 1e-6,
            transient: 0.0,
            periods: 1,
            max_iter: 500,
            tol: 1e-10,
        }
    }
}

/// Orthonormal basis of the zero-sum subspace of `R^n` (Helmert vectors).
fn helmert(n: usize) -> Vec<Vec<f64>> {
    (1..n)
        .map(|k| {
            let s = ((k * (k + 1)) as f64).sqrt();
            (0..n)
                .map(|i| match i.cmp(&k) {
                    std::cmp::Ordering::Less => 1.0 / s,
                    std::cmp::Ordering::Equal => -(k as f64) / s,
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect()
        })
        .collect()
}

/// Transverse directions in the flat state layout: one Helmert vector per
/// node coordinate.
fn transverse_basis(n: usize, d: usize) -> Vec<Vec<f64>> {
    let h = helmert(n);
    let mut out = Vec::with_capacity((n - 1) * d);
    for c in 0..d {
        for v in &h {
            let mut e = vec![0.0; n * d];
            for i in 0..n {
                e[i * d + c] = v[i];
            }
            out.push(e);
        }
    }
    out
}

fn shifted(x: &GlobalState, dir: &[f64], eps: f64) -> GlobalState {
    let data = x.as_slice().iter().zip(dir).map(|(a, v)| a + eps * v).collect();
    let mut s = GlobalState::from_raw(x.kind(), data);
    for i in 0..s.n_nodes() {
        let node = s.node(i).to_vec();
        // Rewraps the phase coordinate.
        let _ = s.set_node(i, &node);
    }
    s
}

/// Componentwise `b − a`, with phase coordinates differenced on the circle.
fn state_diff(a: &GlobalState, b: &GlobalState) -> Vec<f64> {
    let d = a.state_dim();
    let pi = a.kind().phase_index();
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .enumerate()
        .map(|(k, (&u, &v))| if k % d == pi { signed_phase_diff(u, v) } else { v - u })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobian of the time-`t0` map at `x` restricted to the transverse subspace.
fn transverse_jacobian(
    sys: &LatticeSystem,
    t0: f64,
    x: &GlobalState,
    basis: &[Vec<f64>],
    opts: &MultiplierOptions,
) -> Result<Vec<Vec<f64>>> {
    let m = basis.len();
    let mut jac = vec![vec![0.0; m]; m];
    for (col, e) in basis.iter().enumerate() {
        let plus = global_flow(sys, &shifted(x, e, opts.fd_step), t0, opts.dt)?;
        let minus = global_flow(sys, &shifted(x, e, -opts.fd_step), t0, opts.dt)?;
        let diff = state_diff(&minus, &plus);
        for (row, f) in basis.iter().enumerate() {
            jac[row][col] = dot(f, &diff) / (2.0 * opts.fd_step);
        }
    }
    Ok(jac)
}

fn mat_vec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| dot(row, v)).collect()
}

/// Dominant transverse Floquet multiplier of the time-`t0` map at a
/// synchronized reference state (phase 0, or the unit-circle point at angle
/// 0), estimated by power iteration on finite-difference Jacobians.
///
/// With `periods > 1` the reference is carried along the flow and the result
/// is the geometric-mean growth per period of the Jacobian product.
pub fn transverse_multiplier(sys: &LatticeSystem, t0: f64, opts: &MultiplierOptions) -> Result<f64> {
    let n = sys.n_nodes();
    if n < 2 {
        return Err(Error::invalid("transverse multiplier needs at least 2 nodes"));
    }
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::invalid(format!("t0 must be > 0, got {t0}")));
    }
    if !(opts.fd_step > 0.0 && opts.tol > 0.0 && opts.transient >= 0.0) {
        return Err(Error::invalid("fd_step and tol must be > 0 and transient >= 0"));
    }
    if opts.periods == 0 || opts.max_iter == 0 {
        return Err(Error::invalid("periods and max_iter must be at least 1"));
    }
    let kind = sys.kind();
    let node: &[f64] = match kind {
        ModelKind::PhaseOscillator => &[0.0],
        ModelKind::PlanarLimitCycle => &[1.0, 0.0],
    };
    let mut x = GlobalState::diagonal(kind, node, n)?;
    x = global_flow(sys, &x, opts.transient, opts.dt)?;

    let basis = transverse_basis(n, kind.state_dim());
    let mut jacobians = Vec::with_capacity(opts.periods);
    for _ in 0..opts.periods {
        jacobians.push(transverse_jacobian(sys, t0, &x, &basis, opts)?);
        x = global_flow(sys, &x, t0, opts.dt)?;
    }

    let m = basis.len();
    let mut v: Vec<f64> = (0..m).map(|k| 1.0 + 0.1 * k as f64).collect();
    let v_norm = norm(&v);
    v.iter_mut().for_each(|c| *c /= v_norm);

    // Averaging consecutive growth estimates damps the two-cycle that a
    // dominant pair of opposite-sign eigenvalues would otherwise cause.
    let mut prev_growth = f64::NAN;
    let mut prev_estimate = f64::NAN;
    for iter in 1..=opts.max_iter {
        let mut log_growth = 0.0;
        for j in &jacobians {
            v = mat_vec(j, &v);
            let s = norm(&v);
            if s == 0.0 || !s.is_finite() {
                return Ok(if s == 0.0 { 0.0 } else { f64::INFINITY });
            }
            log_growth += s.ln();
            v.iter_mut().for_each(|c| *c /= s);
        }
        let growth = log_growth / opts.periods as f64;
        let estimate = if prev_growth.is_nan() {
            growth
        } else {
            0.5 * (growth + prev_growth)
        };
        if (estimate - prev_estimate).abs() < opts.tol {
            return Ok(estimate.exp());
        }
        if iter == opts.max_iter {
            return Err(Error::PowerIterationStalled {
                iterations: iter,
                estimate: estimate.exp(),
            });
        }
        prev_growth = growth;
        prev_estimate = estimate;
    }
    unreachable!("loop returns on its last iteration")
}
