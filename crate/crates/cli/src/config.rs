//! Section-based run configuration.
//!
//! ```text
//! # comment
//! [system]
//! model = phase
//! n = 2
//! omega = -0.5, 0.5
//! graph = complete:2
//! lambda_grid = 0.2:0.9:0.05
//!
//! [metric]
//! t_max = 2
//! ```

use std::collections::BTreeMap;
use std::fmt;

use synclattice::dynamics::{
    CouplingGraph, CouplingKind, GlobalState, LatticeSystem, ModelKind, Permutation,
    SubsystemModel,
};
use synclattice::metric::ShiftWindow;
use synclattice::synchrony::Partition;

/// Upper bound on node counts and list lengths accepted from a config.
pub const MAX_NODES: usize = 4096;
pub const MAX_GRID: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError {
            line: Some(line),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSection {
    pub model: ModelKind,
    pub omega: Vec<f64>,
    pub alpha: Vec<f64>,
    pub graph: CouplingGraph,
    pub coupling: CouplingKind,
    pub lambda: Option<f64>,
    pub lambda_grid: Option<Vec<f64>>,
    pub metric_weights: Vec<f64>,
    pub initial: Option<GlobalState>,
}

impl SystemSection {
    pub fn n(&self) -> usize {
        self.omega.len()
    }

    /// The lattice at coupling strength `lambda`.
    pub fn build(&self, lambda: f64) -> synclattice::Result<LatticeSystem> {
        let models = self
            .omega
            .iter()
            .map(|&w| SubsystemModel::new(self.model, w))
            .collect::<synclattice::Result<Vec<_>>>()?;
        LatticeSystem::new(
            models,
            self.alpha.clone(),
            self.graph.clone(),
            self.coupling,
            lambda,
            self.metric_weights.clone(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSection {
    pub t_total: f64,
    pub t_transient: f64,
    pub dt: f64,
    pub sample_every: f64,
    pub seeds: usize,
    pub seed: u64,
    pub lock_threshold: f64,
    pub t0: f64,
    pub n_pairs: usize,
    pub pair_scale: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub tol: f64,
    pub blocks: Option<Partition>,
    pub check_invariance: bool,
    pub horizon: f64,
    pub n_samples: usize,
    pub generators: Vec<Permutation>,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSection {
    pub csv: Option<String>,
    pub svg: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemSection,
    pub window: ShiftWindow,
    pub experiment: ExperimentSection,
    pub output: OutputSection,
}

const SYSTEM_KEYS: &[&str] = &[
    "model",
    "n",
    "omega",
    "alpha",
    "graph",
    "edges",
    "directed",
    "coupling",
    "lambda",
    "lambda_grid",
    "metric_weights",
    "initial",
];
const METRIC_KEYS: &[&str] = &["t_max", "grid_points", "refine_tol"];
const EXPERIMENT_KEYS: &[&str] = &[
    "t_total",
    "t_transient",
    "dt",
    "sample_every",
    "seeds",
    "seed",
    "lock_threshold",
    "t0",
    "n_pairs",
    "pair_scale",
    "lo",
    "hi",
    "tol",
    "blocks",
    "check_invariance",
    "horizon",
    "n_samples",
    "image",
    "times",
];
const OUTPUT_KEYS: &[&str] = &["csv", "svg"];
/// Keys that may appear more than once.
const REPEATABLE: &[&str] = &["image"];

fn section_keys(name: &str) -> Option<(&'static str, &'static [&'static str])> {
    match name {
        "system" => Some(("system", SYSTEM_KEYS)),
        "metric" => Some(("metric", METRIC_KEYS)),
        "experiment" => Some(("experiment", EXPERIMENT_KEYS)),
        "output" => Some(("output", OUTPUT_KEYS)),
        _ => None,
    }
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

/// `section -> key -> entries` with line numbers.
type Raw = BTreeMap<&'static str, BTreeMap<String, Vec<Entry>>>;

fn tokenize(text: &str) -> Result<Raw, ConfigError> {
    let mut raw: Raw = BTreeMap::new();
    let mut section: Option<&'static str> = None;
    for (idx, full) in text.lines().enumerate() {
        let line = idx + 1;
        let content = full.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(line, format!("unterminated section header `{content}`")))?
                .trim();
            let (canonical, _) = section_keys(name)
                .ok_or_else(|| ConfigError::at(line, format!("unknown section [{name}]")))?;
            if raw.contains_key(canonical) {
                return Err(ConfigError::at(line, format!("section [{name}] appears twice")));
            }
            raw.insert(canonical, BTreeMap::new());
            section = Some(canonical);
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section
            .ok_or_else(|| ConfigError::at(line, format!("key `{key}` appears before any section header")))?;
        if !section_keys(sec).is_some_and(|(_, keys)| keys.contains(&key)) {
            return Err(ConfigError::at(line, format!("unknown key `{key}` in [{sec}]")));
        }
        if value.is_empty() {
            return Err(ConfigError::at(line, format!("key `{key}` has an empty value")));
        }
        let entries = raw.entry(sec).or_default().entry(key.to_string()).or_default();
        if !entries.is_empty() && !REPEATABLE.contains(&key) {
            return Err(ConfigError::at(
                line,
                format!("duplicate key `{key}` (first set on line {})", entries[0].line),
            ));
        }
        entries.push(Entry {
            line,
            value: value.to_string(),
        });
    }
    Ok(raw)
}

/// Typed access to one section with line-numbered errors.
struct Section<'a> {
    name: &'static str,
    entries: Option<&'a BTreeMap<String, Vec<Entry>>>,
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<&'a Entry> {
        self.entries.and_then(|m| m.get(key)).and_then(|v| v.first())
    }

    fn all(&self, key: &str) -> &'a [Entry] {
        self.entries
            .and_then(|m| m.get(key))
            .map_or(&[], |v| v.as_slice())
    }

    fn parse<T>(
        &self,
        key: &str,
        f: impl FnOnce(&str) -> Result<T, String>,
    ) -> Result<Option<T>, ConfigError> {
        self.get(key)
            .map(|e| f(&e.value).map_err(|m| ConfigError::at(e.line, format!("{key}: {m}"))))
            .transpose()
    }

    fn required<T>(
        &self,
        key: &str,
        f: impl FnOnce(&str) -> Result<T, String>,
    ) -> Result<T, ConfigError> {
        self.parse(key, f)?.ok_or_else(|| {
            ConfigError::global(format!("[{}] is missing required key `{key}`", self.name))
        })
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.get(key).map(|e| e.line)
    }

    fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        let message = format!("{key}: {}", message.into());
        match self.line(key) {
            Some(l) => ConfigError::at(l, message),
            None => ConfigError::global(message),
        }
    }
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{}` is not finite", s.trim()))
    }
}

pub fn parse_usize(s: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{}` is not a non-negative integer", s.trim()))
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{}` is not a non-negative integer", s.trim()))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(format!("`{other}` is not a boolean")),
    }
}

fn positive(v: f64) -> Result<f64, String> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be > 0, got {v}"))
    }
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    let items: Vec<&str> = s.split(',').collect();
    if items.len() > MAX_GRID {
        return Err(format!("list longer than {MAX_GRID} entries"));
    }
    items.into_iter().map(parse_f64).collect()
}

/// A list of one value per node, or a single value broadcast to all nodes.
fn per_node(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v = parse_f64_list(s)?;
    match v.len() {
        1 => Ok(vec![v[0]; n]),
        len if len == n => Ok(v),
        len => Err(format!("expected 1 or {n} values, got {len}")),
    }
}

/// `a, b, c` or an inclusive range `start:stop:step`. Values must be
/// non-negative and strictly increasing.
pub fn parse_lambda_grid(s: &str) -> Result<Vec<f64>, String> {
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range must be start:stop:step, got `{}`", s.trim()));
        }
        let (start, stop, step) = (parse_f64(parts[0])?, parse_f64(parts[1])?, parse_f64(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err("range needs step > 0 and stop >= start".into());
        }
        let count = ((stop - start) / step + 1e-9).floor() + 1.0;
        if !(count <= MAX_GRID as f64) {
            return Err(format!("range has more than {MAX_GRID} values"));
        }
        (0..count as usize)
            .map(|k| start + k as f64 * step)
            .collect()
    } else {
        parse_f64_list(s)?
    };
    if let Some(v) = values.iter().find(|v| **v < 0.0) {
        return Err(format!("coupling strengths must be >= 0, got {v}"));
    }
    for w in values.windows(2) {
        if w[1] == w[0] {
            return Err(format!("duplicate value {}", w[0]));
        }
        if w[1] < w[0] {
            return Err(format!("values must increase ({} then {})", w[0], w[1]));
        }
    }
    Ok(values)
}

fn check_count(count: usize, n: usize, family: &str) -> Result<(), String> {
    if count != n {
        return Err(format!("{family}:{count} does not match n = {n}"));
    }
    Ok(())
}

/// `ring:N`, `complete:N`, `star:N`, `path:N` or `empty:N`; `N` must equal `n`.
pub fn parse_graph_spec(s: &str, n: usize) -> Result<CouplingGraph, String> {
    let (family, count) = match s.trim().split_once(':') {
        Some((f, c)) => (f.trim(), parse_usize(c)?),
        None => (s.trim(), n),
    };
    if count == 0 || count > MAX_NODES {
        return Err(format!("node count must lie in 1..={MAX_NODES}, got {count}"));
    }
    check_count(count, n, family)?;
    let g = match family {
        "ring" | "cycle" => CouplingGraph::ring(count),
        "complete" => CouplingGraph::complete(count),
        "star" => CouplingGraph::star(count),
        "path" => CouplingGraph::path(count),
        "empty" => CouplingGraph::empty(count),
        other => return Err(format!("unknown graph family `{other}`")),
    };
    g.map_err(|e| e.to_string())
}

/// `i-j:w, ...` with the weight defaulting to 1. Undirected unless
/// `directed`, in which case `i-j` means `i` drives `j`.
pub fn parse_edges(s: &str, n: usize, directed: bool) -> Result<CouplingGraph, String> {
    if n == 0 || n > MAX_NODES {
        return Err(format!("node count must lie in 1..={MAX_NODES}, got {n}"));
    }
    let mut edges = Vec::new();
    let trimmed = s.trim();
    if trimmed != "none" {
        for item in trimmed.split(',') {
            let item = item.trim();
            let (pair, weight) = match item.split_once(':') {
                Some((p, w)) => (p, parse_f64(w)?),
                None => (item, 1.0),
            };
            let (a, b) = pair
                .split_once('-')
                .ok_or_else(|| format!("edge `{item}` is not of the form i-j[:w]"))?;
            let (a, b) = (parse_usize(a)?, parse_usize(b)?);
            for v in [a, b] {
                if v >= n {
                    return Err(format!("edge `{item}` references node {v}, but n = {n}"));
                }
            }
            if !(weight > 0.0) {
                return Err(format!("edge `{item}` needs a positive weight"));
            }
            edges.push((a, b, weight));
        }
    }
    let g = if directed {
        CouplingGraph::directed(n, &edges)
    } else {
        CouplingGraph::undirected(n, &edges)
    };
    g.map_err(|e| e.to_string())
}

/// `{0,3},{1,4},{2,5}`: a partition of `0..n`.
pub fn parse_blocks(s: &str, n: usize) -> Result<Partition, String> {
    if n == 0 || n > MAX_NODES {
        return Err(format!("node count must lie in 1..={MAX_NODES}, got {n}"));
    }
    let mut blocks = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let inner_start = rest
            .strip_prefix('{')
            .ok_or_else(|| format!("expected `{{` at `{rest}`"))?;
        let (inner, after) = inner_start
            .split_once('}')
            .ok_or_else(|| "unterminated block".to_string())?;
        let block = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(parse_usize)
                .collect::<Result<Vec<_>, _>>()?
        };
        if let Some(v) = block.iter().find(|&&v| v >= n) {
            return Err(format!("block references node {v}, but n = {n}"));
        }
        blocks.push(block);
        rest = after.trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
            if rest.is_empty() {
                return Err("trailing comma after last block".into());
            }
        } else if !rest.is_empty() {
            return Err(format!("expected `,` between blocks at `{rest}`"));
        }
    }
    Partition::from_blocks(n, &blocks).map_err(|e| e.to_string())
}

/// `1,2,3,0`: the image of each node under a permutation of `0..n`.
pub fn parse_permutation(s: &str, n: usize) -> Result<Permutation, String> {
    let image = s
        .split(',')
        .take(MAX_NODES + 1)
        .enumerate()
        .map(|(i, v)| parse_usize(v).map_err(|m| format!("image index {i}: {m}")))
        .collect::<Result<Vec<_>, _>>()?;
    if image.len() != n {
        return Err(format!("image has {} entries, expected n = {n}", image.len()));
    }
    let mut seen = vec![None; n];
    for (i, &j) in image.iter().enumerate() {
        if j >= n {
            return Err(format!("image index {i} maps to {j}, outside 0..{n}"));
        }
        if let Some(k) = seen[j] {
            return Err(format!("image index {i} maps to {j}, already the image of index {k}"));
        }
        seen[j] = Some(i);
    }
    Permutation::new(image).map_err(|e| e.to_string())
}

/// Phases `a, b, ...` or planar nodes `r:θ, ...`.
fn parse_initial(s: &str, model: ModelKind, n: usize) -> Result<GlobalState, String> {
    let state = match model {
        ModelKind::PhaseOscillator => GlobalState::phases(&parse_f64_list(s)?),
        ModelKind::PlanarLimitCycle => {
            let nodes = s
                .split(',')
                .map(|item| {
                    let (r, th) = item
                        .split_once(':')
                        .ok_or_else(|| format!("planar node `{}` must be r:theta", item.trim()))?;
                    Ok((parse_f64(r)?, parse_f64(th)?))
                })
                .collect::<Result<Vec<_>, String>>()?;
            GlobalState::planar(&nodes)
        }
    }
    .map_err(|e| e.to_string())?;
    if state.n_nodes() != n {
        return Err(format!("expected {n} nodes, got {}", state.n_nodes()));
    }
    Ok(state)
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    match s.trim() {
        "phase" => Ok(ModelKind::PhaseOscillator),
        "planar" => Ok(ModelKind::PlanarLimitCycle),
        other => Err(format!("unknown model `{other}` (expected phase or planar)")),
    }
}

fn parse_coupling(s: &str) -> Result<CouplingKind, String> {
    match s.trim() {
        "sine" => Ok(CouplingKind::SineDifference),
        "diffusive" => Ok(CouplingKind::Diffusive),
        other => Err(format!("unknown coupling `{other}` (expected sine or diffusive)")),
    }
}

fn system_section(sec: &Section) -> Result<SystemSection, ConfigError> {
    let model = sec.required("model", parse_model)?;
    let n = sec.required("n", parse_usize)?;
    if n == 0 || n > MAX_NODES {
        return Err(sec.error("n", format!("must lie in 1..={MAX_NODES}, got {n}")));
    }
    let omega = sec.parse("omega", |s| per_node(s, n))?.unwrap_or(vec![1.0; n]);
    let alpha = sec.parse("alpha", |s| per_node(s, n))?.unwrap_or(vec![1.0; n]);
    let metric_weights = sec
        .parse("metric_weights", |s| per_node(s, n))?
        .unwrap_or(vec![1.0; n]);
    let directed = sec.parse("directed", parse_bool)?.unwrap_or(false);
    let graph = match (sec.get("graph"), sec.get("edges")) {
        (Some(_), Some(e)) => {
            return Err(ConfigError::at(e.line, "set either `graph` or `edges`, not both"))
        }
        (Some(_), None) => sec.required("graph", |s| parse_graph_spec(s, n))?,
        (None, Some(_)) => sec.required("edges", |s| parse_edges(s, n, directed))?,
        (None, None) => {
            return Err(ConfigError::global(
                "[system] is missing required key `graph` (or `edges`)",
            ))
        }
    };
    let coupling = sec.parse("coupling", parse_coupling)?.unwrap_or(match model {
        ModelKind::PhaseOscillator => CouplingKind::SineDifference,
        ModelKind::PlanarLimitCycle => CouplingKind::Diffusive,
    });
    let lambda = sec.parse("lambda", |s| {
        let v = parse_f64(s)?;
        if v < 0.0 {
            return Err(format!("must be >= 0, got {v}"));
        }
        Ok(v)
    })?;
    let lambda_grid = sec.parse("lambda_grid", parse_lambda_grid)?;
    let initial = sec.parse("initial", |s| parse_initial(s, model, n))?;
    let system = SystemSection {
        model,
        omega,
        alpha,
        graph,
        coupling,
        lambda,
        lambda_grid,
        metric_weights,
        initial,
    };
    // Surfaces model/coupling mismatches and bad rates at parse time.
    let probe_line = sec.line("coupling").or(sec.line("alpha")).or(sec.line("model"));
    system.build(lambda.unwrap_or(0.0)).map_err(|e| ConfigError {
        line: probe_line,
        message: e.to_string(),
    })?;
    Ok(system)
}

fn experiment_section(sec: &Section, n: usize) -> Result<ExperimentSection, ConfigError> {
    let num = |key: &str, default: f64| -> Result<f64, ConfigError> {
        Ok(sec.parse(key, parse_f64)?.unwrap_or(default))
    };
    let pos = |key: &str, default: f64| -> Result<f64, ConfigError> {
        Ok(sec
            .parse(key, |s| parse_f64(s).and_then(positive))?
            .unwrap_or(default))
    };
    let t_total = pos("t_total", 200.0)?;
    // Unset transient: 50, but never more than a quarter of the run.
    let t_transient = num("t_transient", 50.0f64.min(0.25 * t_total))?;
    if !(t_transient >= 0.0 && t_transient < t_total) {
        return Err(sec.error("t_transient", format!("need 0 <= t_transient < t_total = {t_total}")));
    }
    let dt = pos("dt", 1e-3)?;
    if dt > synclattice::dynamics::MAX_STEP {
        return Err(sec.error("dt", format!("must be <= {}", synclattice::dynamics::MAX_STEP)));
    }
    let seeds = sec.parse("seeds", parse_usize)?.unwrap_or(8);
    if seeds == 0 || seeds > MAX_GRID {
        return Err(sec.error("seeds", format!("must lie in 1..={MAX_GRID}")));
    }
    let n_pairs = sec.parse("n_pairs", parse_usize)?.unwrap_or(16);
    if n_pairs == 0 || n_pairs > MAX_GRID {
        return Err(sec.error("n_pairs", format!("must lie in 1..={MAX_GRID}")));
    }
    let n_samples = sec.parse("n_samples", parse_usize)?.unwrap_or(101);
    if !(2..=MAX_GRID).contains(&n_samples) {
        return Err(sec.error("n_samples", format!("must lie in 2..={MAX_GRID}")));
    }
    let lo = sec.parse("lo", |s| {
        let v = parse_f64(s)?;
        if v < 0.0 {
            return Err(format!("must be >= 0, got {v}"));
        }
        Ok(v)
    })?;
    let hi = sec.parse("hi", parse_f64)?;
    if let (Some(l), Some(h)) = (lo, hi) {
        if h <= l {
            return Err(sec.error("hi", format!("must exceed lo = {l}")));
        }
    }
    let generators = sec
        .all("image")
        .iter()
        .map(|e| {
            parse_permutation(&e.value, n).map_err(|m| ConfigError::at(e.line, format!("image: {m}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let times = sec
        .parse("times", |s| {
            let t = parse_f64_list(s)?;
            if let Some(v) = t.iter().find(|v| **v < 0.0) {
                return Err(format!("times must be >= 0, got {v}"));
            }
            Ok(t)
        })?
        .unwrap_or(vec![10.0]);
    Ok(ExperimentSection {
        t_total,
        t_transient,
        dt,
        sample_every: pos("sample_every", 0.5)?,
        seeds,
        seed: sec.parse("seed", parse_u64)?.unwrap_or(0),
        lock_threshold: pos("lock_threshold", 1e-2)?,
        t0: pos("t0", 1.0)?,
        n_pairs,
        pair_scale: pos("pair_scale", 1e-2)?,
        lo,
        hi,
        tol: pos("tol", 1e-2)?,
        blocks: sec.parse("blocks", |s| parse_blocks(s, n))?,
        check_invariance: sec.parse("check_invariance", parse_bool)?.unwrap_or(false),
        horizon: pos("horizon", 100.0)?,
        n_samples,
        generators,
        times,
    })
}

fn metric_section(sec: &Section) -> Result<ShiftWindow, ConfigError> {
    let t_max = sec.parse("t_max", parse_f64)?.unwrap_or(0.0);
    let grid_points = sec.parse("grid_points", parse_usize)?.unwrap_or(256);
    if grid_points > MAX_GRID {
        return Err(sec.error("grid_points", format!("must be <= {MAX_GRID}")));
    }
    let refine_tol = sec.parse("refine_tol", parse_f64)?.unwrap_or(1e-6);
    ShiftWindow::new(t_max, grid_points, refine_tol).map_err(|e| {
        let key = ["t_max", "grid_points", "refine_tol"]
            .into_iter()
            .find(|k| sec.get(k).is_some())
            .unwrap_or("t_max");
        sec.error(key, e.to_string())
    })
}

/// Parses a full configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw = tokenize(text)?;
    let section = |name: &'static str| Section {
        name,
        entries: raw.get(name),
    };
    if !raw.contains_key("system") {
        return Err(ConfigError::global("missing [system] section"));
    }
    let system = system_section(&section("system"))?;
    let window = metric_section(&section("metric"))?;
    let experiment = experiment_section(&section("experiment"), system.n())?;
    let out = section("output");
    let output = OutputSection {
        csv: out.get("csv").map(|e| e.value.clone()),
        svg: out.get("svg").map(|e| e.value.clone()),
    };
    Ok(RunConfig {
        system,
        window,
        experiment,
        output,
    })
}
