use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use synclattice::dynamics::{equivariance_defect, sample_flow, GlobalState, ModelKind};
use synclattice::metric::{coarse_distance, strict_sync_distance};
use synclattice::synchrony::{
    coarsest_equitable_partition, invariance_report, partition_from_group_orbits,
    project_to_partition,
};
use synclattice::transition::{
    find_lambda_c, sweep, ExperimentSpec, InitialConditions, PairSampling,
};

use crate::config::RunConfig;
use crate::svg::LinePlot;
use crate::table::{companion_path, fmt_f64, Table};
use crate::CliError;

/// Resolved output locations.
pub struct Outputs<'a> {
    pub csv: &'a Path,
    pub svg: Option<&'a Path>,
}

fn write_table(table: &Table, path: &Path) -> Result<(), CliError> {
    table
        .write(path)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

fn write_svg(plot: &LinePlot, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, plot.render())
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", p.display()))),
        None => Ok(()),
    }
}

fn single_lambda(cfg: &RunConfig, command: &str) -> Result<f64, CliError> {
    match (&cfg.system.lambda, &cfg.system.lambda_grid) {
        (Some(l), _) => Ok(*l),
        (None, Some(grid)) if grid.len() == 1 => Ok(grid[0]),
        _ => Err(CliError::config(format!(
            "{command} needs a single coupling strength: set `lambda` in [system]"
        ))),
    }
}

/// The configured initial state, or a seeded random one.
fn start_state(cfg: &RunConfig) -> GlobalState {
    cfg.system.initial.clone().unwrap_or_else(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.experiment.seed);
        GlobalState::random(cfg.system.model, cfg.system.n(), &mut rng)
    })
}

fn coord_names(kind: ModelKind) -> &'static [&'static str] {
    match kind {
        ModelKind::PhaseOscillator => &["theta"],
        ModelKind::PlanarLimitCycle => &["r", "theta"],
    }
}

/// Trajectory table plus a `_summary` table of distances to the diagonal.
pub fn simulate(cfg: &RunConfig, out: &Outputs) -> Result<Vec<String>, CliError> {
    let lambda = single_lambda(cfg, "simulate")?;
    let sys = cfg.system.build(lambda).map_err(CliError::analysis)?;
    let ex = &cfg.experiment;
    let steps = (ex.t_total / ex.sample_every + 1e-9).floor() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * ex.sample_every).collect();
    let states = sample_flow(&sys, &start_state(cfg), &times, ex.dt).map_err(CliError::analysis)?;

    let names = coord_names(cfg.system.model);
    let mut traj = Table::new(&["time", "node", "coord", "value"]);
    let mut summary = Table::new(&["time", "strict_sync", "coarse_distance"]);
    let mut strict_pts = Vec::with_capacity(times.len());
    let mut coarse_pts = Vec::with_capacity(times.len());
    for (&t, x) in times.iter().zip(&states) {
        for i in 0..x.n_nodes() {
            for (c, name) in names.iter().enumerate() {
                traj.push(vec![
                    fmt_f64(t),
                    i.to_string(),
                    name.to_string(),
                    fmt_f64(x.node(i)[c]),
                ]);
            }
        }
        let strict = strict_sync_distance(&sys, x).map_err(CliError::analysis)?;
        let coarse = coarse_distance(&sys, x, &cfg.window).map_err(CliError::analysis)?;
        summary.push(vec![fmt_f64(t), fmt_f64(strict), fmt_f64(coarse)]);
        strict_pts.push((t, strict));
        coarse_pts.push((t, coarse));
    }
    write_table(&traj, out.csv)?;
    let summary_path = companion_path(out.csv, "summary");
    write_table(&summary, &summary_path)?;
    let plot = LinePlot::new("Distance to synchrony", "time", "distance")
        .with_series("strict_sync", strict_pts.clone())
        .with_series("coarse_distance", coarse_pts);
    write_svg(&plot, out.svg)?;
    let last = strict_pts.last().map_or(f64::NAN, |p| p.1);
    Ok(vec![
        format!("wrote {} samples to {}", times.len(), out.csv.display()),
        format!("final strict_sync = {}", fmt_f64(last)),
    ])
}

fn experiment_spec(cfg: &RunConfig) -> Result<ExperimentSpec, CliError> {
    let sys = cfg.system.build(0.0).map_err(CliError::analysis)?;
    let ex = &cfg.experiment;
    let mut spec = ExperimentSpec::new(sys, cfg.window);
    spec.t_total = ex.t_total;
    spec.t_transient = ex.t_transient;
    spec.dt = ex.dt;
    spec.sample_every = ex.sample_every;
    spec.n_initial_conditions = ex.seeds;
    spec.rng_seed = ex.seed;
    spec.lock_threshold = ex.lock_threshold;
    spec.probe.t0 = ex.t0;
    spec.probe.n_pairs = ex.n_pairs;
    spec.probe.pairs = PairSampling::NearDiagonal {
        scale: ex.pair_scale,
    };
    if let Some(x) = &cfg.system.initial {
        spec.initial = InitialConditions::Given(vec![x.clone()]);
    }
    spec.validate().map_err(|e| CliError::config(e.to_string()))?;
    Ok(spec)
}

/// One row per coupling strength: `lambda,R,drift,eta,mu,coherent`.
pub fn sweep_cmd(cfg: &RunConfig, out: &Outputs) -> Result<Vec<String>, CliError> {
    let lambdas = match (&cfg.system.lambda_grid, cfg.system.lambda) {
        (Some(grid), _) => grid.clone(),
        (None, Some(l)) => vec![l],
        (None, None) => {
            return Err(CliError::config(
                "sweep needs `lambda_grid` (or `lambda`) in [system]",
            ))
        }
    };
    let spec = experiment_spec(cfg)?;
    let result = sweep(&spec, &lambdas).map_err(CliError::analysis)?;
    let mut table = Table::new(&["lambda", "R", "drift", "eta", "mu", "coherent"]);
    let mut messages = Vec::new();
    for row in &result.rows {
        table.push(vec![
            fmt_f64(row.lambda),
            fmt_f64(row.r),
            fmt_f64(row.drift),
            fmt_f64(row.eta),
            fmt_f64(row.mu),
            row.classified_coherent.to_string(),
        ]);
        for note in &row.notes {
            messages.push(format!("lambda = {}: {note}", row.lambda));
        }
    }
    write_table(&table, out.csv)?;
    let plot = LinePlot::new("Order parameter", "lambda", "R")
        .with_series("R", result.rows.iter().map(|r| (r.lambda, r.r)).collect());
    write_svg(&plot, out.svg)?;
    if result.rows.iter().all(|r| r.r.is_nan()) {
        return Err(CliError {
            code: crate::EXIT_INTEGRATION,
            message: format!("every sweep row failed; {}", messages.join("; ")),
        });
    }
    let coherent = result.rows.iter().filter(|r| r.classified_coherent).count();
    messages.push(format!(
        "{} rows ({coherent} coherent) written to {}",
        result.rows.len(),
        out.csv.display()
    ));
    Ok(messages)
}

/// Bisection for the coupling strength where the classification flips.
pub fn threshold(cfg: &RunConfig, out: &Outputs) -> Result<Vec<String>, CliError> {
    let ex = &cfg.experiment;
    let lo = ex
        .lo
        .ok_or_else(|| CliError::config("[experiment] is missing required key `lo`"))?;
    let hi = ex
        .hi
        .ok_or_else(|| CliError::config("[experiment] is missing required key `hi`"))?;
    let spec = experiment_spec(cfg)?;
    let est = find_lambda_c(&spec, lo, hi, ex.tol).map_err(CliError::analysis)?;
    let mut table = Table::new(&["lambda_c", "lo", "hi", "tol"]);
    table.push(vec![
        fmt_f64(est.lambda_c),
        fmt_f64(est.lo),
        fmt_f64(est.hi),
        fmt_f64(ex.tol),
    ]);
    write_table(&table, out.csv)?;
    Ok(vec![format!(
        "lambda_c = {:.6} (bracket [{:.6}, {:.6}], R({lo}) = {:.3e}, R({hi}) = {:.3e})",
        est.lambda_c, est.lo, est.hi, est.r_lo, est.r_hi
    )])
}

/// Coarsest balanced partition, optionally with an invariance check.
pub fn clusters(cfg: &RunConfig, out: &Outputs) -> Result<Vec<String>, CliError> {
    let ex = &cfg.experiment;
    let p = coarsest_equitable_partition(&cfg.system.graph, ex.blocks.as_ref())
        .map_err(CliError::analysis)?;
    let mut table = Table::new(&["node", "block"]);
    for i in 0..p.n_nodes() {
        table.push(vec![i.to_string(), p.block_of(i).to_string()]);
    }
    write_table(&table, out.csv)?;
    let mut messages = vec![format!("partition: {p} ({} blocks)", p.n_blocks())];
    if ex.check_invariance {
        let lambda = single_lambda(cfg, "clusters with check_invariance")?;
        let sys = cfg.system.build(lambda).map_err(CliError::analysis)?;
        let x0 = project_to_partition(&sys, &start_state(cfg), &p).map_err(CliError::analysis)?;
        let report = invariance_report(&sys, &p, &x0, ex.horizon, ex.dt, ex.n_samples)
            .map_err(CliError::analysis)?;
        let mut defects = Table::new(&["time", "defect"]);
        for &(t, d) in &report.defect_series {
            defects.push(vec![fmt_f64(t), fmt_f64(d)]);
        }
        write_table(&defects, &companion_path(out.csv, "defect"))?;
        let plot = LinePlot::new("Membership defect", "time", "defect")
            .with_series("defect", report.defect_series.clone());
        write_svg(&plot, out.svg)?;
        messages.push(format!("max defect = {}", fmt_f64(report.max_defect)));
    }
    Ok(messages)
}

/// Equivariance defects per generator and the generated orbit partition.
pub fn symmetry(cfg: &RunConfig, out: &Outputs) -> Result<Vec<String>, CliError> {
    let ex = &cfg.experiment;
    let n = cfg.system.n();
    let orbits = partition_from_group_orbits(n, &ex.generators).map_err(CliError::analysis)?;
    let mut table = Table::new(&["generator", "time", "defect"]);
    let mut worst: f64 = 0.0;
    let mut plot = LinePlot::new("Equivariance defect", "time", "defect");
    if !ex.generators.is_empty() {
        let lambda = single_lambda(cfg, "symmetry")?;
        let sys = cfg.system.build(lambda).map_err(CliError::analysis)?;
        let x = start_state(cfg);
        for (k, g) in ex.generators.iter().enumerate() {
            let mut pts = Vec::with_capacity(ex.times.len());
            for &t in &ex.times {
                let d = equivariance_defect(&sys, g, &x, t, ex.dt).map_err(CliError::analysis)?;
                worst = worst.max(d);
                table.push(vec![k.to_string(), fmt_f64(t), fmt_f64(d)]);
                pts.push((t, d));
            }
            plot = plot.with_series(&format!("generator {k}"), pts);
        }
    }
    write_table(&table, out.csv)?;
    let mut orbit_table = Table::new(&["node", "orbit"]);
    for i in 0..n {
        orbit_table.push(vec![i.to_string(), orbits.block_of(i).to_string()]);
    }
    write_table(&orbit_table, &companion_path(out.csv, "orbits"))?;
    write_svg(&plot, out.svg)?;
    Ok(vec![
        format!("orbit partition: {orbits}"),
        format!(
            "{} generators, max defect = {}",
            ex.generators.len(),
            fmt_f64(worst)
        ),
    ])
}
