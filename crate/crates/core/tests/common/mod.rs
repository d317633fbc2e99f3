#![allow(dead_code)]

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synclattice::dynamics::{CouplingGraph, CouplingKind, LatticeSystem};
use synclattice::synchrony::Partition;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every set partition of `0..n` as label vectors (restricted growth strings).
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn grow(labels: &mut Vec<usize>, n: usize, out: &mut Vec<Partition>) {
        if labels.len() == n {
            out.push(Partition::from_labels(labels));
            return;
        }
        let next = labels.iter().max().map_or(0, |m| m + 1);
        for l in 0..=next {
            labels.push(l);
            grow(labels, n, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    out
}

/// Balancedness straight from the definition: every pair of nodes in the same
/// block receives the same total weight from every block.
pub fn brute_force_balanced(g: &CouplingGraph, p: &Partition) -> bool {
    let w = g.weight_matrix();
    let n = g.n_nodes();
    let input = |i: usize, b: usize| -> f64 {
        (0..n).filter(|&j| p.block_of(j) == b).map(|j| w[i][j]).sum()
    };
    (0..n).all(|i| {
        (0..n).all(|j| {
            p.block_of(i) != p.block_of(j)
                || (0..p.n_blocks()).all(|b| (input(i, b) - input(j, b)).abs() <= 1e-12)
        })
    })
}

/// Random undirected graph with integer weights in 1..=2.
pub fn random_graph<R: Rng>(n: usize, density: f64, rng: &mut R) -> CouplingGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                edges.push((i, j, rng.gen_range(1..=2) as f64));
            }
        }
    }
    CouplingGraph::undirected(n, &edges).unwrap()
}

pub fn phase_pair(omegas: [f64; 2], lambda: f64) -> LatticeSystem {
    LatticeSystem::phase_oscillators(
        &omegas,
        CouplingGraph::complete(2).unwrap(),
        CouplingKind::SineDifference,
        lambda,
    )
    .unwrap()
}

/// Closed-form planar orbit: r(τ)² = 1 / (1 + (1/r0² − 1) e^{−2τ}).
pub fn planar_exact(omega: f64, rate: f64, x: &[f64], t: f64) -> Option<(f64, f64)> {
    let tau = rate * t;
    let (r0, th0) = (x[0], x[1]);
    if r0 == 0.0 {
        return Some((0.0, th0));
    }
    let denom = 1.0 + (1.0 / (r0 * r0) - 1.0) * (-2.0 * tau).exp();
    if denom <= 0.0 {
        return None;
    }
    Some((1.0 / denom.sqrt(), th0 + omega * tau))
}

pub fn planar_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (ax, ay) = (a.0 * a.1.cos(), a.0 * a.1.sin());
    let (bx, by) = (b.0 * b.1.cos(), b.0 * b.1.sin());
    (ax - bx).hypot(ay - by)
}

pub fn circle(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Minimum over a uniform grid of `points` shifts, plus t = 0.
pub fn brute_force_shift(points: usize, t_max: f64, mut profile: impl FnMut(f64) -> f64) -> f64 {
    let mut best = profile(0.0);
    for k in 0..points {
        let t = -t_max + 2.0 * t_max * k as f64 / (points - 1) as f64;
        best = best.min(profile(t));
    }
    best
}
