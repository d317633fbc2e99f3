//! Synchronization-threshold diagnostics.
//!
//! The order parameter `R(λ)` is the long-time average of the asynchronous
//! distance to the synchronous diagonal, averaged over seeded random
//! initial conditions. Coherence is declared when `R` falls below a lock
//! threshold; [`find_lambda_c`] bisects on that classification. Auxiliary
//! diagnostics are the mean phase-offset drift, an empirical contraction
//! factor of the time-`t0` map in the asynchronous metric, and the transverse
//! multiplier of that map at a synchronized reference state.

mod contraction;
mod multiplier;

pub use contraction::{contraction_factor, stroboscopic_fixed_point, PairSampling, StrobeResult};
pub use multiplier::{transverse_multiplier, MultiplierOptions};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{
    sample_flow, signed_phase_diff, GlobalState, LatticeSystem, ModelKind, DEFAULT_DT, MAX_STEP,
};
use crate::error::{Error, Result};
use crate::metric::{coarse_distance, ShiftWindow};
use crate::optimize::bisect_classifier;

const STREAM_INITIAL: u64 = 1;
const STREAM_PAIRS: u64 = 2;

/// Independent generator for one replica; the same `(seed, purpose, index)`
/// always yields the same stream regardless of evaluation order.
pub(crate) fn replica_rng(seed: u64, purpose: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 48) | index);
    rng
}

/// Where trajectories start.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialConditions {
    /// `n_initial_conditions` uniform random states from the seeded generator.
    UniformRandom,
    /// Explicit starting states (used in place of random draws).
    Given(Vec<GlobalState>),
}

/// Settings for the contraction and multiplier probes in a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSettings {
    pub t0: f64,
    pub n_pairs: usize,
    pub pairs: PairSampling,
    pub fd_step: f64,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            t0: 1.0,
            n_pairs: 16,
            pairs: PairSampling::NearDiagonal { scale: 1e-2 },
            fd_step: 1e-6,
        }
    }
}

/// Experiment protocol. `system.lambda` is overridden per run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub system: LatticeSystem,
    pub window: ShiftWindow,
    pub t_total: f64,
    pub t_transient: f64,
    pub dt: f64,
    /// Spacing of the samples averaged over `[t_transient, t_total]`.
    pub sample_every: f64,
    pub n_initial_conditions: usize,
    pub rng_seed: u64,
    /// `R` below this value classifies a run as coherent.
    pub lock_threshold: f64,
    pub initial: InitialConditions,
    pub probe: ProbeSettings,
}

impl ExperimentSpec {
    /// Defaults: `t_total = 200`, `t_transient = 50`, `dt = 1e-3`, samples
    /// every 0.5, 8 random initial conditions, seed 0, lock threshold `1e-2`.
    pub fn new(system: LatticeSystem, window: ShiftWindow) -> Self {
        ExperimentSpec {
            system,
            window,
            t_total: 200.0,
            t_transient: 50.0,
            dt: DEFAULT_DT,
            sample_every: 0.5,
            n_initial_conditions: 8,
            rng_seed: 0,
            lock_threshold: 1e-2,
            initial: InitialConditions::UniformRandom,
            probe: ProbeSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_transient >= 0.0 && self.t_transient < self.t_total && self.t_total.is_finite())
        {
            return Err(Error::invalid(format!(
                "need 0 <= t_transient < t_total, got t_transient = {}, t_total = {}",
                self.t_transient, self.t_total
            )));
        }
        if !(self.dt > 0.0 && self.dt <= MAX_STEP) {
            return Err(Error::invalid(format!("dt must lie in (0, {MAX_STEP}], got {}", self.dt)));
        }
        if !(self.sample_every > 0.0 && self.sample_every.is_finite()) {
            return Err(Error::invalid(format!(
                "sample_every must be > 0, got {}",
                self.sample_every
            )));
        }
        if !(self.lock_threshold > 0.0) {
            return Err(Error::invalid(format!(
                "lock_threshold must be > 0, got {}",
                self.lock_threshold
            )));
        }
        match &self.initial {
            InitialConditions::UniformRandom if self.n_initial_conditions == 0 => {
                Err(Error::invalid("n_initial_conditions must be at least 1"))
            }
            InitialConditions::Given(states) => {
                if states.is_empty() {
                    return Err(Error::invalid("no initial states given"));
                }
                states.iter().try_for_each(|s| self.system.check_state(s))
            }
            _ => Ok(()),
        }
    }

    /// Starting states, deterministic in `rng_seed`.
    pub fn initial_states(&self) -> Vec<GlobalState> {
        match &self.initial {
            InitialConditions::Given(states) => states.clone(),
            InitialConditions::UniformRandom => (0..self.n_initial_conditions)
                .map(|k| {
                    let mut rng = replica_rng(self.rng_seed, STREAM_INITIAL, k as u64);
                    GlobalState::random(self.system.kind(), self.system.n_nodes(), &mut rng)
                })
                .collect(),
        }
    }

    /// Sample times `t_transient, t_transient + h, …` up to `t_total`.
    pub fn sample_times(&self) -> Vec<f64> {
        let span = self.t_total - self.t_transient;
        let n = (span / self.sample_every + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| self.t_transient + k as f64 * self.sample_every)
            .collect()
    }

    fn system_at(&self, lambda: f64) -> Result<LatticeSystem> {
        self.system.with_lambda(lambda)
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// `R(λ)`: mean over initial conditions of the time-averaged asynchronous
/// distance to the diagonal over `[t_transient, t_total]`.
pub fn order_parameter(spec: &ExperimentSpec, lambda: f64) -> Result<f64> {
    spec.validate()?;
    let sys = spec.system_at(lambda)?;
    let times = spec.sample_times();
    let per_replica = spec
        .initial_states()
        .par_iter()
        .map(|x0| {
            let states = sample_flow(&sys, x0, &times, spec.dt)?;
            let d = states
                .iter()
                .map(|x| coarse_distance(&sys, x, &spec.window))
                .collect::<Result<Vec<_>>>()?;
            Ok(mean(&d))
        })
        .collect::<Result<Vec<f64>>>()
        .map_err(|e| e.at_lambda(lambda))?;
    Ok(mean(&per_replica))
}

/// Mean over node pairs of `|d/dt (θ_j − θ_i)|`, estimated by finite
/// differences of unwrapped offsets after the transient and averaged over
/// initial conditions. Phase oscillators only.
pub fn drift_rate(spec: &ExperimentSpec, lambda: f64) -> Result<f64> {
    spec.validate()?;
    if spec.system.kind() != ModelKind::PhaseOscillator {
        return Err(Error::ModelMismatch(
            "drift rate is defined for phase oscillators only".into(),
        ));
    }
    let sys = spec.system_at(lambda)?;
    let n = sys.n_nodes();
    if n < 2 {
        return Ok(0.0);
    }
    let times = spec.sample_times();
    let span = times[times.len() - 1] - times[0];
    let per_replica = spec
        .initial_states()
        .par_iter()
        .map(|x0| {
            let states = sample_flow(&sys, x0, &times, spec.dt)?;
            if span <= 0.0 {
                return Ok(0.0);
            }
            let mut total = 0.0;
            let mut pairs = 0usize;
            for i in 0..n {
                for j in i + 1..n {
                    let offset = |s: &GlobalState| signed_phase_diff(s.phase(i), s.phase(j));
                    let variation: f64 = states
                        .windows(2)
                        .map(|w| signed_phase_diff(offset(&w[0]), offset(&w[1])).abs())
                        .sum();
                    total += variation / span;
                    pairs += 1;
                }
            }
            Ok(total / pairs as f64)
        })
        .collect::<Result<Vec<f64>>>()
        .map_err(|e| e.at_lambda(lambda))?;
    Ok(mean(&per_replica))
}

/// One λ of a sweep. Diagnostics that failed are NaN and explained in `notes`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub r: f64,
    pub drift: f64,
    pub eta: f64,
    pub mu: f64,
    pub classified_coherent: bool,
    pub notes: Vec<String>,
}

impl SweepRow {
    /// True when every diagnostic is available.
    pub fn is_complete(&self) -> bool {
        self.notes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

fn or_nan(value: Result<f64>, what: &str, notes: &mut Vec<String>) -> f64 {
    value.unwrap_or_else(|e| {
        notes.push(format!("{what}: {}", e.root()));
        f64::NAN
    })
}

/// Multiplier settings used by [`sweep`]: reference state taken after the
/// transient, growth averaged over the sampled horizon.
pub fn sweep_multiplier_options(spec: &ExperimentSpec) -> MultiplierOptions {
    let t0 = spec.probe.t0;
    let periods = ((spec.t_total - spec.t_transient) / t0).floor().max(1.0) as usize;
    MultiplierOptions {
        dt: spec.dt,
        fd_step: spec.probe.fd_step,
        transient: spec.t_transient,
        periods,
        ..MultiplierOptions::default()
    }
}

fn sweep_row(spec: &ExperimentSpec, lambda: f64) -> SweepRow {
    let mut notes = Vec::new();
    let r = or_nan(order_parameter(spec, lambda), "R", &mut notes);
    let drift = if spec.system.kind() == ModelKind::PhaseOscillator {
        or_nan(drift_rate(spec, lambda), "drift", &mut notes)
    } else {
        notes.push("drift: defined for phase oscillators only".into());
        f64::NAN
    };
    let eta = or_nan(
        contraction_factor(spec, lambda, spec.probe.t0, spec.probe.n_pairs),
        "eta",
        &mut notes,
    );
    let mu = or_nan(
        spec.system_at(lambda).and_then(|sys| {
            transverse_multiplier(&sys, spec.probe.t0, &sweep_multiplier_options(spec))
        }),
        "mu",
        &mut notes,
    );
    SweepRow {
        lambda,
        r,
        drift,
        eta,
        mu,
        classified_coherent: r < spec.lock_threshold,
        notes,
    }
}

/// Evaluates every diagnostic for each λ. Rows run in parallel and are
/// returned in ascending λ; a failing diagnostic only affects its own cell.
pub fn sweep(spec: &ExperimentSpec, lambdas: &[f64]) -> Result<SweepResult> {
    spec.validate()?;
    if lambdas.is_empty() {
        return Err(Error::invalid("lambda list is empty"));
    }
    if let Some(l) = lambdas.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(Error::invalid(format!("lambda values must be >= 0, got {l}")));
    }
    if let Some(w) = lambdas.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::invalid(format!(
            "lambda values must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    let rows = lambdas.par_iter().map(|&l| sweep_row(spec, l)).collect();
    Ok(SweepResult { rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdEstimate {
    pub lambda_c: f64,
    /// Final bracket.
    pub lo: f64,
    pub hi: f64,
    pub r_lo: f64,
    pub r_hi: f64,
}

/// Bisection on the coherent/incoherent classification of `R(λ)`. Assumes a
/// single crossing inside `[lo, hi]`.
pub fn find_lambda_c(spec: &ExperimentSpec, lo: f64, hi: f64, tol: f64) -> Result<ThresholdEstimate> {
    spec.validate()?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid(format!("tol must be > 0, got {tol}")));
    }
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::invalid(format!("need 0 <= lo < hi, got [{lo}, {hi}]")));
    }
    let r_lo = order_parameter(spec, lo)?;
    let r_hi = order_parameter(spec, hi)?;
    let (c_lo, c_hi) = (r_lo < spec.lock_threshold, r_hi < spec.lock_threshold);
    if c_lo == c_hi {
        return Err(Error::SameClassification {
            lo,
            hi,
            r_lo,
            r_hi,
            coherent: c_lo,
        });
    }
    let classify = |l: f64| order_parameter(spec, l).map(|r| r < spec.lock_threshold);
    let (a, b) = bisect_classifier(classify, lo, hi, tol)?;
    Ok(ThresholdEstimate {
        lambda_c: 0.5 * (a + b),
        lo: a,
        hi: b,
        r_lo,
        r_hi,
    })
}
