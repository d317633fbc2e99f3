//! Asynchronous evolution metric.
//!
//! The phase distance of node `i` is the smallest distance between `y_i` and
//! a time-shifted image `φ_i^t(x_i)` of `x_i`, with `t` restricted to a
//! bounded window `[−t_max, t_max]`. An unbounded window would make every
//! pair of states on a recurrent orbit indistinguishable, so the window is a
//! required parameter. `D_async` is the maximum phase distance over nodes,
//! each node choosing its own shift.

use std::f64::consts::PI;

use crate::dynamics::{
    circle_distance, node_flow, signed_phase_diff, wrap_phase, GlobalState, LatticeSystem, ModelKind,
    SubsystemModel,
};
use crate::error::{Error, Result};
use crate::optimize::golden_section_min;

/// Number of best grid minima refined by golden-section search.
const REFINED_MINIMA: usize = 3;

/// Search domain for the inner infimum over time shifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftWindow {
    t_max: f64,
    grid_points: usize,
    refine_tol: f64,
}

impl ShiftWindow {
    pub fn new(t_max: f64, grid_points: usize, refine_tol: f64) -> Result<Self> {
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(Error::invalid(format!("t_max must be finite and >= 0, got {t_max}")));
        }
        if grid_points < 2 {
            return Err(Error::invalid(format!(
                "grid_points must be at least 2, got {grid_points}"
            )));
        }
        if !(refine_tol.is_finite() && refine_tol > 0.0) {
            return Err(Error::invalid(format!("refine_tol must be > 0, got {refine_tol}")));
        }
        Ok(ShiftWindow {
            t_max,
            grid_points,
            refine_tol,
        })
    }

    /// 256 grid points, refinement to `1e-6`.
    pub fn with_t_max(t_max: f64) -> Result<Self> {
        Self::new(t_max, 256, 1e-6)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points
    }

    pub fn refine_tol(&self) -> f64 {
        self.refine_tol
    }

    fn grid(&self) -> Vec<f64> {
        let g = self.grid_points;
        (0..g)
            .map(|k| -self.t_max + 2.0 * self.t_max * k as f64 / (g - 1) as f64)
            .collect()
    }
}

/// States `φ^{t_k}(x)` on the window grid, walked outward from `t = 0` so
/// each grid point costs one increment. Points past a backward blow-up are
/// `None`.
fn orbit_on_grid(
    model: &SubsystemModel,
    rate: f64,
    x: &[f64],
    grid: &[f64],
) -> Vec<Option<Vec<f64>>> {
    let mut out = vec![None; grid.len()];
    let split = grid.partition_point(|&t| t < 0.0);
    let mut walk = |indices: &mut dyn Iterator<Item = usize>| {
        let mut state = Some(x.to_vec());
        let mut now = 0.0;
        for k in indices {
            state = state.and_then(|s| node_flow(model, rate, &s, grid[k] - now).ok());
            now = grid[k];
            out[k] = state.clone();
        }
    };
    walk(&mut (split..grid.len()));
    walk(&mut (0..split).rev());
    out
}

/// `d_i^φ(x, y) = min_{|t| ≤ t_max} d_i(φ_i^t(x), y)`.
///
/// A uniform grid scan over the window is followed by golden-section
/// refinement around the best few grid minima. `t = 0` is always evaluated,
/// so the result never exceeds `d_i(x, y)`.
pub fn phase_distance(
    model: &SubsystemModel,
    rate: f64,
    x: &[f64],
    y: &[f64],
    w: &ShiftWindow,
) -> Result<f64> {
    model.validate_state(x)?;
    model.validate_state(y)?;
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::invalid(format!("rate must be positive, got {rate}")));
    }
    let direct = model.distance(x, y);
    if w.t_max == 0.0 || direct == 0.0 {
        return Ok(direct);
    }
    let grid = w.grid();
    if model.kind() == ModelKind::PhaseOscillator {
        let speed = rate * model.omega();
        let profile = |t: f64| circle_distance(wrap_phase(x[0] + speed * t), y[0]);
        let values: Vec<f64> = grid.iter().map(|&t| profile(t)).collect();
        return Ok(refine_profile(&grid, &values, direct, w.refine_tol, |_, t| profile(t)));
    }
    let states = orbit_on_grid(model, rate, x, &grid);
    let values: Vec<f64> = states
        .iter()
        .map(|s| s.as_ref().map_or(f64::INFINITY, |s| model.distance(s, y)))
        .collect();
    Ok(refine_profile(&grid, &values, direct, w.refine_tol, |k, t| {
        match states[k]
            .as_ref()
            .map(|anchor| node_flow(model, rate, anchor, t - grid[k]))
        {
            Some(Ok(s)) => model.distance(&s, y),
            _ => f64::INFINITY,
        }
    }))
}

/// Best of `direct`, the sampled `values`, and golden-section refinements of
/// the best few local minima. `eval(k, t)` evaluates the profile at `t` near
/// grid point `k`.
fn refine_profile<F: FnMut(usize, f64) -> f64>(
    grid: &[f64],
    values: &[f64],
    direct: f64,
    tol: f64,
    mut eval: F,
) -> f64 {
    let mut best = direct;
    for &v in values {
        best = best.min(v);
    }

    // local minima of the sampled profile, best first
    let last = values.len() - 1;
    let mut minima: Vec<usize> = (0..values.len())
        .filter(|&k| {
            values[k].is_finite()
                && (k == 0 || values[k] <= values[k - 1])
                && (k == last || values[k] <= values[k + 1])
        })
        .collect();
    minima.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    for &k in minima.iter().take(REFINED_MINIMA) {
        let lo = grid[k.saturating_sub(1)];
        let hi = grid[(k + 1).min(last)];
        let (_, fv) = golden_section_min(|t| eval(k, t), lo, hi, tol);
        best = best.min(fv);
    }
    best
}

fn check_pair(sys: &LatticeSystem, x: &GlobalState, y: &GlobalState) -> Result<()> {
    sys.check_state(x)?;
    sys.check_state(y)
}

/// `D_async(x, y) = max_i d_i^φ(x_i, y_i)`.
pub fn d_async(
    sys: &LatticeSystem,
    x: &GlobalState,
    y: &GlobalState,
    w: &ShiftWindow,
) -> Result<f64> {
    check_pair(sys, x, y)?;
    let mut worst: f64 = 0.0;
    for i in 0..sys.n_nodes() {
        let d = phase_distance(sys.model(i), sys.rates()[i], x.node(i), y.node(i), w)?;
        worst = worst.max(d);
    }
    Ok(worst)
}

/// `x ∼ y` realized as `D_async(x, y) < tol`.
pub fn phase_equivalent(
    sys: &LatticeSystem,
    x: &GlobalState,
    y: &GlobalState,
    w: &ShiftWindow,
    tol: f64,
) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be > 0, got {tol}")));
    }
    Ok(d_async(sys, x, y, w)? < tol)
}

/// Circular mean of a set of angles; `None` when the resultant vanishes.
pub fn circular_mean(phases: &[f64]) -> Option<f64> {
    let (s, c) = phases
        .iter()
        .fold((0.0, 0.0), |(s, c), th| (s + th.sin(), c + th.cos()));
    let resultant = s.hypot(c);
    if phases.is_empty() || resultant <= 1e-12 * phases.len() as f64 {
        None
    } else {
        Some(wrap_phase(s.atan2(c)))
    }
}

fn to_xy(v: &[f64]) -> (f64, f64) {
    (v[0] * v[1].cos(), v[0] * v[1].sin())
}

fn from_xy(x: f64, y: f64) -> Vec<f64> {
    let r = x.hypot(y);
    vec![r, if r == 0.0 { 0.0 } else { wrap_phase(y.atan2(x)) }]
}

/// Block mean used for projections and as a diagonal candidate: circular
/// mean for phases, Cartesian mean for planar states.
pub fn node_mean(kind: ModelKind, nodes: &[&[f64]]) -> Option<Vec<f64>> {
    if nodes.is_empty() {
        return None;
    }
    match kind {
        ModelKind::PhaseOscillator => {
            circular_mean(&nodes.iter().map(|v| v[0]).collect::<Vec<_>>()).map(|m| vec![m])
        }
        ModelKind::PlanarLimitCycle => {
            let n = nodes.len() as f64;
            let (sx, sy) = nodes.iter().fold((0.0, 0.0), |(sx, sy), v| {
                let (x, y) = to_xy(v);
                (sx + x, sy + y)
            });
            Some(from_xy(sx / n, sy / n))
        }
    }
}

/// Candidate common states `y` for distances to the synchronous diagonal:
/// every node state, the mean, and every pairwise midpoint (both arcs on the
/// circle). Pairwise midpoints make the strict distance exact for phases.
fn diagonal_candidates(x: &GlobalState) -> Vec<Vec<f64>> {
    let nodes: Vec<&[f64]> = x.nodes().collect();
    let mut out: Vec<Vec<f64>> = nodes.iter().map(|v| v.to_vec()).collect();
    if let Some(m) = node_mean(x.kind(), &nodes) {
        out.push(m);
    }
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            match x.kind() {
                ModelKind::PhaseOscillator => {
                    let (a, b) = (nodes[i][0], nodes[j][0]);
                    if a == b {
                        continue;
                    }
                    let mid = wrap_phase(a + 0.5 * signed_phase_diff(a, b));
                    out.push(vec![mid]);
                    out.push(vec![wrap_phase(mid + PI)]);
                }
                ModelKind::PlanarLimitCycle => {
                    let (ax, ay) = to_xy(nodes[i]);
                    let (bx, by) = to_xy(nodes[j]);
                    out.push(from_xy(0.5 * (ax + bx), 0.5 * (ay + by)));
                }
            }
        }
    }
    out.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out.dedup();
    out
}

/// Distance to the full-synchrony diagonal without time shifts:
/// `min_y max_i d_i(x_i, y)`.
pub fn strict_sync_distance(sys: &LatticeSystem, x: &GlobalState) -> Result<f64> {
    sys.check_state(x)?;
    let mut best = f64::INFINITY;
    for y in diagonal_candidates(x) {
        let mut worst: f64 = 0.0;
        for i in 0..sys.n_nodes() {
            worst = worst.max(sys.model(i).distance(x.node(i), &y));
            if worst >= best {
                break;
            }
        }
        best = best.min(worst);
    }
    Ok(best)
}

/// Asynchronous distance to the diagonal: `min_y D_async(x, diag(y))` over
/// the same candidate set as [`strict_sync_distance`].
pub fn coarse_distance(sys: &LatticeSystem, x: &GlobalState, w: &ShiftWindow) -> Result<f64> {
    sys.check_state(x)?;
    let mut best = f64::INFINITY;
    for y in diagonal_candidates(x) {
        let mut worst: f64 = 0.0;
        for i in 0..sys.n_nodes() {
            let d = phase_distance(sys.model(i), sys.rates()[i], x.node(i), &y, w)?;
            worst = worst.max(d);
            if worst >= best {
                break;
            }
        }
        best = best.min(worst);
        if best == 0.0 {
            break;
        }
    }
    Ok(best)
}
