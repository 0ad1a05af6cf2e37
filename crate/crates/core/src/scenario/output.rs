//! Result files: CSV time series, JSON summaries and whitespace-separated
//! plot data, one file per curve.
//!
//! Numbers use Rust's shortest round-trip formatting, so identical results
//! give identical bytes. Wall times only go to `*_timing.json`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

use super::config::ScenarioConfig;
use super::simulation::{RunSummary, TimeSeriesOutput};
use super::study::{BenchResult, ConvergenceTable, SpectralRow};

pub const TIME_SERIES_HEADER: &str = "t,ux,uy,uz,newton_iterations,corrector_passes";

pub fn time_series_csv(out: &TimeSeriesOutput) -> String {
    let mut s = String::with_capacity(64 * (out.samples.len() + 1));
    s.push_str(TIME_SERIES_HEADER);
    s.push('\n');
    for x in &out.samples {
        let [ux, uy, uz] = x.displacement_m;
        let _ = writeln!(s, "{},{ux},{uy},{uz},{},{}", x.time_s, x.newton_iterations, x.corrector_passes);
    }
    s
}

/// Long format: one row per time and evaluation point.
pub fn snapshots_csv(out: &TimeSeriesOutput) -> String {
    let mut s = String::from("t,point,x,y,z\n");
    for snap in &out.snapshots {
        for (k, [x, y, z]) in snap.positions_m.iter().enumerate() {
            let _ = writeln!(s, "{},{k},{x},{y},{z}", snap.time_s);
        }
    }
    s
}

/// Whitespace-separated `x y` columns under a `#` header line.
pub fn plot_data(x_label: &str, y_label: &str, points: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut s = format!("# {x_label} {y_label}\n");
    for (x, y) in points {
        let _ = writeln!(s, "{x} {y}");
    }
    s
}

fn write(dir: &Path, name: String, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents)?;
    written.push(path);
    Ok(())
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct RunRecord<'a> {
    config: &'a ScenarioConfig,
    samples: usize,
    summary: &'a RunSummary,
}

#[derive(Serialize)]
struct TimingRecord {
    steps: usize,
    wall_time_s: f64,
    wall_time_per_step_s: f64,
}

/// `<name>_<variant>.csv`, `_summary.json` (config echo and solver
/// statistics), `_snapshots.csv` when recorded, and `_timing.json`.
pub fn emit_run(config: &ScenarioConfig, out: &TimeSeriesOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let stem = format!("{}_{}", out.name, out.variant);
    let mut written = Vec::new();
    write(dir, format!("{stem}.csv"), &time_series_csv(out), &mut written)?;
    let record = RunRecord { config, samples: out.samples.len(), summary: &out.summary };
    write(dir, format!("{stem}_summary.json"), &json(&record)?, &mut written)?;
    if !out.snapshots.is_empty() {
        write(dir, format!("{stem}_snapshots.csv"), &snapshots_csv(out), &mut written)?;
    }
    let timing = TimingRecord {
        steps: out.summary.steps,
        wall_time_s: out.wall_time_s,
        wall_time_per_step_s: out.wall_time_per_step_s(),
    };
    write(dir, format!("{stem}_timing.json"), &json(&timing)?, &mut written)?;
    Ok(written)
}

/// `convergence_<study>.json` plus one `error` vs collocation-point curve
/// per variant and degree.
pub fn emit_convergence(tables: &[ConvergenceTable], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let Some(first) = tables.first() else { return Ok(written) };
    write(dir, format!("convergence_{}.json", first.study), &json(tables)?, &mut written)?;
    for t in tables {
        for degree in t.rates.keys().copied().chain(t.rows.iter().map(|r| r.degree)).collect::<std::collections::BTreeSet<_>>() {
            let pts = t.rows.iter().filter(|r| r.degree == degree).map(|r| ((r.n + 1) as f64, r.error));
            let name = format!("convergence_{}_{}_p{degree}.dat", t.study, t.variant);
            write(dir, name, &plot_data("collocation_points", "relative_l2_error", pts), &mut written)?;
        }
    }
    Ok(written)
}

/// `spectral.json` plus one `ρ` vs `n` curve per boundary combination and
/// degree.
pub fn emit_spectral(rows: &[SpectralRow], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    write(dir, "spectral.json".into(), &json(rows)?, &mut written)?;
    let mut curves: Vec<(&str, usize)> = rows.iter().map(|r| (r.bc.label(), r.degree)).collect();
    curves.dedup();
    for (bc, degree) in curves {
        let pts = rows
            .iter()
            .filter(|r| r.bc.label() == bc && r.degree == degree)
            .map(|r| (r.n as f64, r.spectral_radius));
        write(dir, format!("spectral_{bc}_p{degree}.dat"), &plot_data("n", "spectral_radius", pts), &mut written)?;
    }
    Ok(written)
}

/// `bench.json` plus one normalized-time vs `n` curve per benchmark,
/// variant and degree.
pub fn emit_bench(results: &[BenchResult], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    write(dir, "bench.json".into(), &json(results)?, &mut written)?;
    let mut curves: Vec<(&str, String, usize)> =
        results.iter().map(|r| (r.benchmark.as_str(), r.variant.to_string(), r.degree)).collect();
    curves.sort();
    curves.dedup();
    for (bench, variant, degree) in curves {
        let pts = results
            .iter()
            .filter(|r| r.benchmark == bench && r.variant.label() == variant && r.degree == degree)
            .map(|r| (r.n as f64, r.normalized));
        let name = format!("bench_{bench}_{variant}_p{degree}.dat");
        write(dir, name, &plot_data("n", "normalized_time_per_step", pts), &mut written)?;
    }
    Ok(written)
}
