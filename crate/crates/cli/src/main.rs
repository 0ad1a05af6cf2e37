use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use igabeam::scenario::output::{emit_bench, emit_convergence, emit_run, emit_spectral};
use igabeam::scenario::study::{convergence_against, study_by_name};
use igabeam::scenario::{presets, run_simulation, spectral_study, timing_bench, BenchConfig, ConvergenceStudyConfig, ScenarioConfig};
use igabeam::solver::{BcCombo, SolverVariant};

#[derive(Parser)]
#[command(name = "igabeam", version, about = "Explicit isogeometric collocation dynamics of geometrically exact beams")]
struct Cli {
    /// Solver variant override: cn-nl, lu-nl or lu-l.
    #[arg(long, global = true)]
    variant: Option<SolverVariant>,
    /// Directory for result files.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario given as a TOML file or a preset name.
    Run { scenario: String },
    /// Spatial convergence study from a TOML file or a study name
    /// (cantilever, pendulum, flying_beam).
    Converge { study: String },
    /// Spectral radius of the predictor–multicorrector iteration matrices.
    Spectral {
        #[arg(long = "p", value_delimiter = ',', default_values_t = [2, 4, 6, 8])]
        degrees: Vec<usize>,
        #[arg(long = "n", value_delimiter = ',', default_values_t = [10, 20, 40, 60, 80])]
        ns: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = BcCombo::ALL.map(|b| b.label().to_string()))]
        bc: Vec<String>,
    },
    /// Per-step timing over a matrix of benchmarks, degrees and meshes.
    /// Without a file the full default matrix is timed.
    Bench { matrix: Option<PathBuf> },
    /// Print a preset scenario as TOML, as a starting point for new files.
    Preset { name: String },
}

fn load_scenario(arg: &str) -> Result<ScenarioConfig> {
    let path = Path::new(arg);
    if path.is_file() {
        return ScenarioConfig::load(path).with_context(|| format!("reading {}", path.display()));
    }
    presets::by_name(arg).with_context(|| format!("`{arg}` is neither a scenario file nor a preset"))
}

fn load_study(arg: &str) -> Result<ConvergenceStudyConfig> {
    let path = Path::new(arg);
    if path.is_file() {
        return ConvergenceStudyConfig::load(path).with_context(|| format!("reading {}", path.display()));
    }
    study_by_name(arg).with_context(|| format!("`{arg}` is neither a study file nor a study name"))
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario } => {
            let mut config = load_scenario(&scenario)?;
            if let Some(v) = cli.variant {
                config = config.with_variant(v);
            }
            let out = run_simulation(&config).with_context(|| format!("running {}", config.name))?;
            let last = out.samples.last().expect("the initial sample is always recorded");
            let [ux, uy, uz] = last.displacement_m;
            println!(
                "{} ({}): {} steps, t = {} s, probe displacement ({ux:.6e}, {uy:.6e}, {uz:.6e}) m",
                out.name, out.variant, out.summary.steps, last.time_s
            );
            println!(
                "newton iterations {} (max {}), corrector passes {}, {:.3e} s/step",
                out.summary.newton_iterations,
                out.summary.max_newton_iterations,
                out.summary.corrector_passes,
                out.wall_time_per_step_s()
            );
            report(&emit_run(&config, &out, &cli.out)?);
        }
        Command::Converge { study } => {
            let mut config = load_study(&study)?;
            if let Some(v) = cli.variant {
                config.variants = vec![v];
            }
            config.validate()?;
            let reference = config.reference_solution().context("computing the reference solution")?;
            let mut tables = Vec::new();
            for &variant in &config.variants {
                let table = convergence_against(&config, variant, &reference)?;
                for (p, rate) in &table.rates {
                    println!("{} {variant} p={p}: rate {rate:.3}", config.name);
                }
                tables.push(table);
            }
            report(&emit_convergence(&tables, &cli.out)?);
        }
        Command::Spectral { degrees, ns, bc } => {
            let combos = bc.iter().map(|s| s.parse::<BcCombo>()).collect::<Result<Vec<_>, _>>().map_err(anyhow::Error::msg)?;
            let rows = spectral_study(&degrees, &ns, &combos)?;
            for r in &rows {
                println!("{} p={} n={}: {:.6}", r.bc.label(), r.degree, r.n, r.spectral_radius);
            }
            report(&emit_spectral(&rows, &cli.out)?);
        }
        Command::Bench { matrix } => {
            let mut config = match matrix {
                Some(path) => BenchConfig::load(&path).with_context(|| format!("reading {}", path.display()))?,
                None => BenchConfig::default(),
            };
            if let Some(v) = cli.variant {
                config.variants = vec![v];
            }
            let results = timing_bench(&config)?;
            for r in &results {
                println!(
                    "{} {} p={} n={}: {:.3e} s/step, normalized {:.3}",
                    r.benchmark, r.variant, r.degree, r.n, r.seconds_per_step, r.normalized
                );
            }
            report(&emit_bench(&results, &cli.out)?);
        }
        Command::Preset { name } => print!("{}", presets::by_name(&name)?.to_toml_string()?),
    }
    Ok(())
}
