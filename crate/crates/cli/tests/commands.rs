use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quick_xml::events::Event;
use quick_xml::Reader;
use synclattice_cli::table::Table;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_synclattice");

const BENCHMARK: &str = "\
[system]
model = phase
n = 2
omega = -0.5, 0.5
graph = complete:2
lambda_grid = 0.2:0.9:0.05

[metric]
t_max = 2

[experiment]
lo = 0.05
hi = 1.5
tol = 0.01
";

struct Run {
    dir: TempDir,
    output: Output,
}

impl Run {
    fn code(&self) -> i32 {
        self.output.status.code().unwrap_or(-1)
    }

    fn stdout(&self) -> String {
        String::from_utf8_lossy(&self.output.stdout).into_owned()
    }

    fn stderr(&self) -> String {
        String::from_utf8_lossy(&self.output.stderr).into_owned()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn table(&self, name: &str) -> Table {
        Table::parse(&fs::read_to_string(self.path(name)).unwrap()).unwrap()
    }
}

fn run_with(subcommand: &str, config: &str, extra: &[&str], env: &[(&str, &str)]) -> Run {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, config).unwrap();
    let mut cmd = Command::new(BIN);
    cmd.arg(subcommand)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out.csv"))
        .args(extra)
        .env_remove("SYNCLATTICE_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let output = cmd.output().unwrap();
    Run { dir, output }
}

fn run(subcommand: &str, config: &str) -> Run {
    run_with(subcommand, config, &[], &[])
}

fn column(t: &Table, name: &str) -> Vec<f64> {
    let k = t.header.iter().position(|h| h == name).unwrap();
    t.rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

fn assert_well_formed_svg(path: &Path) {
    let text = fs::read_to_string(path).unwrap();
    let mut reader = Reader::from_str(&text);
    let (mut depth, mut roots) = (0usize, 0usize);
    loop {
        match reader.read_event() {
            Ok(Event::Start(e)) => {
                if depth == 0 {
                    roots += 1;
                    assert_eq!(e.name().as_ref(), b"svg");
                }
                depth += 1;
            }
            Ok(Event::Empty(_)) => assert!(depth > 0, "element outside the root"),
            Ok(Event::End(_)) => depth -= 1,
            Ok(Event::Eof) => break,
            Ok(Event::Text(t)) => {
                if depth == 0 {
                    assert!(t.iter().all(u8::is_ascii_whitespace));
                }
            }
            Ok(_) => {}
            Err(e) => panic!("malformed SVG: {e}"),
        }
    }
    assert_eq!(depth, 0);
    assert_eq!(roots, 1);
    assert!(!text.contains("href"), "SVG must be self-contained");
}

#[test]
fn simulate_identical_pair_synchronizes() {
    let cfg = "[system]\nmodel = phase\nn = 2\nomega = 1\ngraph = complete:2\nlambda = 1\ninitial = 0, 2\n\
               [experiment]\nt_total = 20\n";
    let r = run_with("simulate", cfg, &["--svg"], &[]);
    // `--svg` without a value is a usage error.
    assert_ne!(r.code(), 0);
    let r = run("simulate", cfg);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let summary = r.table("out_summary.csv");
    let strict = column(&summary, "strict_sync");
    assert!(strict.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    assert!(*strict.last().unwrap() < 1e-6);
    let traj = r.table("out.csv");
    assert_eq!(traj.header, ["time", "node", "coord", "value"]);
    assert_eq!(traj.rows.len(), 41 * 2);
}

#[test]
fn simulate_uncoupled_diagonal_stays_synchronous() {
    let cfg = "[system]\nmodel = phase\nn = 3\nomega = 0.7\ngraph = ring:3\nlambda = 0\ninitial = 1.2, 1.2, 1.2\n\
               [experiment]\nt_total = 10\n";
    let r = run("simulate", cfg);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert!(column(&r.table("out_summary.csv"), "strict_sync").iter().all(|&d| d < 1e-9));
}

#[test]
fn simulate_planar_writes_both_coordinates() {
    let cfg = "[system]\nmodel = planar\nn = 2\ngraph = path:2\nlambda = 0.5\ninitial = 1:0, 0.5:2\n\
               [experiment]\nt_total = 2\n";
    let r = run_with("simulate", cfg, &["--svg", "unused"], &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let traj = r.table("out.csv");
    assert_eq!(traj.rows.len(), 5 * 2 * 2);
    assert!(traj.rows.iter().any(|row| row[2] == "r"));
}

#[test]
fn missing_key_is_named() {
    let r = run("simulate", "[system]\nmodel = phase\ngraph = ring:3\nlambda = 1\n");
    assert_eq!(r.code(), 1);
    assert!(r.stderr().contains("`n`"), "{}", r.stderr());
}

#[test]
fn parse_errors_report_line() {
    let r = run("simulate", "[system]\nmodel = phase\nn = 3\ngraph = ring:3\nlambda = fast\n");
    assert_eq!(r.code(), 1);
    assert!(r.stderr().contains("line 5"), "{}", r.stderr());
}

#[test]
fn sweep_benchmark_flips_once() {
    let dir = TempDir::new().unwrap();
    let svg = dir.path().join("r.svg");
    let r = run_with("sweep", BENCHMARK, &["--svg", svg.to_str().unwrap(), "--quiet"], &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert!(r.stdout().is_empty());
    let t = r.table("out.csv");
    assert_eq!(t.header, ["lambda", "R", "drift", "eta", "mu", "coherent"]);
    assert_eq!(t.rows.len(), 15);
    let lambdas = column(&t, "lambda");
    let flags: Vec<bool> = t.rows.iter().map(|row| row[5] == "true").collect();
    let flips: Vec<usize> = (1..flags.len()).filter(|&k| flags[k] != flags[k - 1]).collect();
    assert_eq!(flips.len(), 1);
    assert!(lambdas[flips[0] - 1] >= 0.45 - 1e-9 && lambdas[flips[0]] <= 0.55 + 1e-9);
    assert_well_formed_svg(&svg);

    let again = run_with("sweep", BENCHMARK, &["--svg", svg.with_extension("2.svg").to_str().unwrap()], &[("SYNCLATTICE_THREADS", "1")]);
    assert_eq!(again.code(), 0);
    assert_eq!(
        fs::read(r.path("out.csv")).unwrap(),
        fs::read(again.path("out.csv")).unwrap(),
        "sweep CSV must not depend on thread count"
    );
    assert_eq!(fs::read(&svg).unwrap(), fs::read(svg.with_extension("2.svg")).unwrap());
}

#[test]
fn sweep_single_value_and_duplicates() {
    let one = BENCHMARK.replace("lambda_grid = 0.2:0.9:0.05", "lambda_grid = 0.8");
    let r = run("sweep", &one.replace("[experiment]", "[experiment]\nt_total = 60\nt_transient = 20"));
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert_eq!(r.table("out.csv").rows.len(), 1);
    let dup = BENCHMARK.replace("lambda_grid = 0.2:0.9:0.05", "lambda_grid = 0.2, 0.4, 0.4");
    let r = run("sweep", &dup);
    assert_eq!(r.code(), 1);
    assert!(r.stderr().contains("duplicate"), "{}", r.stderr());
}

#[test]
fn sweep_planar_leaves_drift_nan() {
    let cfg = "[system]\nmodel = planar\nn = 2\ngraph = complete:2\nlambda_grid = 0.5\n\
               [metric]\nt_max = 0.5\n[experiment]\nt_total = 10\nt_transient = 5\nseeds = 2\n";
    let r = run("sweep", cfg);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let t = r.table("out.csv");
    assert_eq!(t.rows[0][2], "NaN");
    assert!(r.stdout().contains("drift"));
}

#[test]
fn threshold_benchmark() {
    let r = run("threshold", BENCHMARK);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let t = r.table("out.csv");
    assert_eq!(t.header, ["lambda_c", "lo", "hi", "tol"]);
    let lc = column(&t, "lambda_c")[0];
    assert!((lc - 0.5).abs() <= 0.03, "{lc}");
    assert!(r.stdout().contains("lambda_c = 0.5"), "{}", r.stdout());
}

#[test]
fn threshold_endpoint_failure() {
    let cfg = BENCHMARK.replace("lo = 0.05", "lo = 0.8");
    let r = run("threshold", &cfg);
    assert_eq!(r.code(), 2);
    let err = r.stderr();
    assert!(err.contains("R(0.8)") && err.contains("R(1.5)"), "{err}");
}

#[test]
fn threshold_zero_tol_rejected() {
    let r = run("threshold", &BENCHMARK.replace("tol = 0.01", "tol = 0"));
    assert_eq!(r.code(), 1);
    assert!(r.stderr().contains("line 14"), "{}", r.stderr());
}

#[test]
fn clusters_star_has_two_blocks() {
    let r = run("clusters", "[system]\nmodel = phase\nn = 5\ngraph = star:5\n");
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let blocks = column(&r.table("out.csv"), "block");
    assert_eq!(blocks, [0.0, 1.0, 1.0, 1.0, 1.0]);
}

#[test]
fn clusters_antipodal_invariance() {
    let cfg = "[system]\nmodel = phase\nn = 6\nomega = 1\ngraph = ring:6\nlambda = 0.7\n\
               [experiment]\nblocks = {0,3},{1,4},{2,5}\ncheck_invariance = true\nhorizon = 100\nseed = 3\n";
    let r = run_with("clusters", cfg, &["--svg", "/dev/null"], &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let defects = column(&r.table("out_defect.csv"), "defect");
    assert_eq!(defects.len(), 101);
    assert!(defects.iter().all(|&d| d < 1e-6));
}

#[test]
fn clusters_empty_graph_is_one_block() {
    let r = run("clusters", "[system]\nmodel = phase\nn = 3\nedges = none\n");
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert!(column(&r.table("out.csv"), "block").iter().all(|&b| b == 0.0));
}

#[test]
fn symmetry_ring_rotation() {
    let cfg = "[system]\nmodel = phase\nn = 6\nomega = 0.9\ngraph = ring:6\nlambda = 0.8\n\
               [experiment]\nimage = 1,2,3,4,5,0\nimage = 5,4,3,2,1,0\ntimes = 1, 5, 10\n";
    let r = run("symmetry", cfg);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let t = r.table("out.csv");
    assert_eq!(t.rows.len(), 6);
    assert!(column(&t, "defect").iter().all(|&d| d < 1e-8));
    assert!(column(&r.table("out_orbits.csv"), "orbit").iter().all(|&o| o == 0.0));
}

#[test]
fn symmetry_invalid_image() {
    let cfg = "[system]\nmodel = phase\nn = 6\ngraph = ring:6\nlambda = 0.8\n[experiment]\nimage = 1,2,3,4,5,7\n";
    let r = run("symmetry", cfg);
    assert_eq!(r.code(), 1);
    assert!(r.stderr().contains("index 5"), "{}", r.stderr());
}

#[test]
fn symmetry_without_generators() {
    let r = run("symmetry", "[system]\nmodel = phase\nn = 4\ngraph = ring:4\n");
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert!(r.table("out.csv").rows.is_empty());
    assert_eq!(column(&r.table("out_orbits.csv"), "orbit"), [0.0, 1.0, 2.0, 3.0]);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let cfg = "[system]\nmodel = phase\nn = 4\nomega = 0.1, 0.2, 0.3, 0.4\ngraph = ring:4\nlambda = 0.4\n\
               [metric]\nt_max = 1\n[experiment]\nt_total = 5\nseed = 42\n";
    let a = run_with("simulate", cfg, &["--seed", "7"], &[]);
    let b = run_with("simulate", cfg, &["--seed", "7"], &[]);
    let c = run_with("simulate", cfg, &[], &[]);
    for name in ["out.csv", "out_summary.csv"] {
        assert_eq!(fs::read(a.path(name)).unwrap(), fs::read(b.path(name)).unwrap());
    }
    assert_ne!(fs::read(a.path("out.csv")).unwrap(), fs::read(c.path("out.csv")).unwrap());
}

#[test]
fn output_path_required() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, "[system]\nmodel = phase\nn = 3\ngraph = ring:3\n").unwrap();
    let out = Command::new(BIN).args(["clusters", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_thread_count_rejected() {
    let r = run_with(
        "clusters",
        "[system]\nmodel = phase\nn = 3\ngraph = ring:3\n",
        &[],
        &[("SYNCLATTICE_THREADS", "zero")],
    );
    assert_eq!(r.code(), 1);
}
