use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn igabeam(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_igabeam"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Preset text with a short duration, written to `dir/name.toml`.
fn short_scenario(dir: &Path, preset: &str, duration: &str, stride: &str) -> std::path::PathBuf {
    let o = igabeam(&["preset", preset], dir);
    assert!(o.status.success());
    let text = stdout(&o)
        .lines()
        .map(|l| {
            if l.starts_with("duration_s") {
                format!("duration_s = {duration}")
            } else if l.starts_with("output_stride") {
                format!("output_stride = {stride}")
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let path = dir.join(format!("{preset}.toml"));
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_writes_series_summary_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = short_scenario(dir.path(), "pendulum", "2e-4", "5");
    let o = igabeam(&["run", scenario.to_str().unwrap(), "--variant", "lu-l"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("pendulum_lu-l.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,ux,uy,uz,newton_iterations,corrector_passes"));
    assert_eq!(lines.count(), 1 + 4);
    assert!(dir.path().join("pendulum_lu-l_summary.json").is_file());
    assert!(dir.path().join("pendulum_lu-l_timing.json").is_file());
}

#[test]
fn repeated_runs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = short_scenario(dir.path(), "cantilever", "3e-6", "3");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert!(igabeam(&["run", scenario.to_str().unwrap()], out).status.success());
    }
    for name in ["cantilever_cn-nl.csv", "cantilever_cn-nl_summary.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn spectral_prints_one_line_per_case() {
    let dir = tempfile::tempdir().unwrap();
    let o = igabeam(&["spectral", "--p", "2,3", "--n", "10,12", "--bc", "DN"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("DN ")).collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let rho: f64 = r.rsplit(' ').next().unwrap().parse().unwrap();
        assert!(rho > 0.0 && rho < 1.0, "{r}");
    }
    assert!(dir.path().join("spectral_DN_p3.dat").is_file());
}

#[test]
fn converge_runs_an_inline_study() {
    let dir = tempfile::tempdir().unwrap();
    let study = r#"
name = "tiny"
scenario = "pendulum"
t_star_s = 2e-4
reference = { degree = 4, n = 16, step_s = 1e-5 }
degrees = [3]
schedule = [{ n = 6, step_s = 2e-5 }, { n = 10, step_s = 1e-5 }]
"#;
    let path = dir.path().join("study.toml");
    fs::write(&path, study).unwrap();
    let o = igabeam(&["converge", path.to_str().unwrap(), "--variant", "lu-nl"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("tiny lu-nl p=3: rate"));
    let dat = fs::read_to_string(dir.path().join("convergence_tiny_lu-nl_p3.dat")).unwrap();
    assert_eq!(dat.lines().count(), 1 + 2);
}

#[test]
fn bench_normalizes_to_the_smallest_cn_nl_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("bench.toml");
    fs::write(&matrix, "benchmarks = [\"pendulum\"]\ndegrees = [2]\nn_values = [8, 12]\nsteps = 5\nwarmup_steps = 1\nrepeats = 1\n")
        .unwrap();
    let o = igabeam(&["bench", matrix.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("pendulum cn-nl p=2 n=8:") && stdout(&o).contains("normalized 1.000"));
    assert!(dir.path().join("bench.json").is_file());
}

#[test]
fn errors_exit_nonzero_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["run", "no_such_preset"][..],
        &["run", "pendulum", "--variant", "rk4"],
        &["spectral", "--bc", "XY"],
        &["converge", "no_such_study"],
    ] {
        let o = igabeam(args, dir.path());
        assert!(!o.status.success(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn solver_failure_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = short_scenario(dir.path(), "cantilever", "1e-3", "100");
    let text = fs::read_to_string(&scenario).unwrap().replace("step_s = 0.000001", "step_s = 0.0001");
    fs::write(&scenario, text).unwrap();
    let o = igabeam(&["run", scenario.to_str().unwrap()], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("step"));
}
