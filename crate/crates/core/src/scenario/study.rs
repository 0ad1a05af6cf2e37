//! Convergence, spectral-radius and timing studies.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::beam::Discretization;
use crate::error::{Error, Result};
use crate::rot3::Vec3;
use crate::solver::{assemble_mass_blocks, spectral_radius, BcCombo, MulticorrectorSettings, SolverVariant};

use super::config::ScenarioConfig;
use super::diagnostics::{fitted_rate, relative_l2_error, uniform_grid};
use super::presets;
use super::simulation::Simulation;

/// Either a preset name or a full scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioSource {
    Preset(String),
    Inline(Box<ScenarioConfig>),
}

impl ScenarioSource {
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        match self {
            Self::Preset(name) => presets::by_name(name),
            Self::Inline(config) => Ok((**config).clone()),
        }
    }
}

/// Field compared against the reference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    #[default]
    Displacement,
    Position,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub degree: usize,
    pub n: usize,
    pub step_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshStep {
    pub n: usize,
    pub step_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceStudyConfig {
    pub name: String,
    pub scenario: ScenarioSource,
    pub t_star_s: f64,
    #[serde(default = "default_eval_points")]
    pub eval_points: usize,
    #[serde(default)]
    pub quantity: Quantity,
    pub reference: CaseSpec,
    #[serde(default = "default_reference_variant")]
    pub reference_variant: SolverVariant,
    pub degrees: Vec<usize>,
    /// `(n, h)` pairs run for every degree.
    pub schedule: Vec<MeshStep>,
    #[serde(default = "all_variants")]
    pub variants: Vec<SolverVariant>,
    /// Replaces the scenario's multicorrector settings in every case.
    #[serde(default)]
    pub multicorrector: Option<MulticorrectorSettings>,
}

fn default_eval_points() -> usize {
    201
}

fn default_reference_variant() -> SolverVariant {
    SolverVariant::CnNl
}

fn all_variants() -> Vec<SolverVariant> {
    SolverVariant::ALL.to_vec()
}

/// True when `t / h` is a whole number of steps.
fn divides(t: f64, h: f64) -> bool {
    let k = t / h;
    (k - k.round()).abs() <= 1e-6 * k.max(1.0)
}

impl ConvergenceStudyConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("study {}: {msg}", self.name)));
        if !(self.t_star_s > 0.0) || self.eval_points < 2 {
            return bad("t_star_s must be positive and eval_points at least 2".into());
        }
        if self.degrees.is_empty() || self.schedule.is_empty() || self.variants.is_empty() {
            return bad("degrees, schedule and variants must be non-empty".into());
        }
        let r = &self.reference;
        let cases = self.degrees.iter().flat_map(|p| self.schedule.iter().map(move |m| (*p, m.n, m.step_s)));
        for (p, n, h) in std::iter::once((r.degree, r.n, r.step_s)).chain(cases) {
            if p == 0 || n < p || !(h > 0.0) {
                return bad(format!("case p={p}, n={n}, h={h} is not a valid discretization"));
            }
            if !divides(self.t_star_s, h) {
                return bad(format!("h={h} does not divide t*={}", self.t_star_s));
            }
        }
        for m in &self.schedule {
            if m.n >= r.n || m.step_s < r.step_s {
                return bad(format!("reference must be finer than case n={}, h={}", m.n, m.step_s));
            }
        }
        if self.degrees.iter().any(|p| *p > r.degree) {
            return bad("reference degree must be at least every study degree".into());
        }
        self.case_config(r.degree, r.n, r.step_s, self.reference_variant)?.validate()
    }

    /// Scenario for one case, run exactly up to `t*`.
    pub fn case_config(&self, degree: usize, n: usize, step_s: f64, variant: SolverVariant) -> Result<ScenarioConfig> {
        let mut c = self.scenario.resolve()?.with_variant(variant);
        c.discretization.degree = degree;
        c.discretization.n = n;
        c.time.step_s = step_s;
        c.time.duration_s = self.t_star_s;
        if let Some(m) = self.multicorrector {
            c.solver.multicorrector = m;
        }
        Ok(c)
    }

    fn sample(&self, config: &ScenarioConfig) -> Result<Vec<Vec3>> {
        let mut sim = Simulation::new(config)?;
        for _ in 0..config.time.num_steps() {
            sim.step()?;
        }
        let grid = uniform_grid(self.eval_points);
        match self.quantity {
            Quantity::Displacement => sim.displacements(&grid),
            Quantity::Position => sim.positions(&grid),
        }
    }

    /// Reference field on the evaluation grid at `t*`.
    pub fn reference_solution(&self) -> Result<Vec<Vec3>> {
        let r = &self.reference;
        self.sample(&self.case_config(r.degree, r.n, r.step_s, self.reference_variant)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub degree: usize,
    pub n: usize,
    pub step_s: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub study: String,
    pub variant: SolverVariant,
    pub t_star_s: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares rate per degree against the number of collocation
    /// points.
    pub rates: BTreeMap<usize, f64>,
}

impl ConvergenceTable {
    pub fn error(&self, degree: usize, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.degree == degree && r.n == n).map(|r| r.error)
    }
}

pub fn convergence_study(config: &ConvergenceStudyConfig, variant: SolverVariant) -> Result<ConvergenceTable> {
    config.validate()?;
    convergence_against(config, variant, &config.reference_solution()?)
}

/// As [`convergence_study`] with a precomputed reference field, so several
/// variants can share one reference run.
pub fn convergence_against(
    config: &ConvergenceStudyConfig,
    variant: SolverVariant,
    reference: &[Vec3],
) -> Result<ConvergenceTable> {
    let mut rows = Vec::new();
    let mut rates = BTreeMap::new();
    for &degree in &config.degrees {
        let (mut x, mut e) = (Vec::new(), Vec::new());
        for m in &config.schedule {
            let field = config.sample(&config.case_config(degree, m.n, m.step_s, variant)?)?;
            let error = relative_l2_error(&field, reference);
            rows.push(ConvergenceRow { degree, n: m.n, step_s: m.step_s, error });
            x.push((m.n + 1) as f64);
            e.push(error);
        }
        if x.len() >= 2 && e.iter().all(|v| *v > 0.0) {
            rates.insert(degree, fitted_rate(&x, &e));
        }
    }
    Ok(ConvergenceTable { study: config.name.clone(), variant, t_star_s: config.t_star_s, rows, rates })
}

/// Studies run with the corrector iterated to round-off, so lumped
/// variants are compared at equal algebraic accuracy.
pub fn converged_multicorrector() -> MulticorrectorSettings {
    MulticorrectorSettings { max_passes: 2000, tolerance: Some(1e-13) }
}

pub fn cantilever_study() -> ConvergenceStudyConfig {
    ConvergenceStudyConfig {
        name: "cantilever".into(),
        scenario: ScenarioSource::Preset("cantilever".into()),
        t_star_s: 1e-3,
        eval_points: default_eval_points(),
        quantity: Quantity::Displacement,
        reference: CaseSpec { degree: 6, n: 60, step_s: 1e-7 },
        reference_variant: SolverVariant::CnNl,
        degrees: vec![2, 4, 6],
        schedule: [10, 20, 30, 40].map(|n| MeshStep { n, step_s: 1e-7 }).to_vec(),
        variants: all_variants(),
        multicorrector: Some(converged_multicorrector()),
    }
}

pub fn pendulum_study() -> ConvergenceStudyConfig {
    ConvergenceStudyConfig {
        name: "pendulum".into(),
        scenario: ScenarioSource::Preset("pendulum".into()),
        t_star_s: 0.1,
        eval_points: default_eval_points(),
        quantity: Quantity::Displacement,
        reference: CaseSpec { degree: 6, n: 80, step_s: 2.5e-6 },
        reference_variant: SolverVariant::CnNl,
        degrees: vec![2, 4, 6],
        schedule: [(10, 5e-5), (20, 2.5e-5), (40, 1.25e-5), (60, 5e-6)]
            .map(|(n, step_s)| MeshStep { n, step_s })
            .to_vec(),
        variants: all_variants(),
        multicorrector: Some(converged_multicorrector()),
    }
}

pub fn flying_beam_study() -> ConvergenceStudyConfig {
    ConvergenceStudyConfig {
        name: "flying_beam".into(),
        scenario: ScenarioSource::Preset("flying_beam".into()),
        t_star_s: 0.5,
        eval_points: default_eval_points(),
        quantity: Quantity::Position,
        reference: CaseSpec { degree: 6, n: 150, step_s: 5e-6 },
        reference_variant: SolverVariant::CnNl,
        degrees: vec![2, 4, 6],
        schedule: [(10, 5e-5), (20, 2.5e-5), (40, 1.25e-5), (60, 5e-6)]
            .map(|(n, step_s)| MeshStep { n, step_s })
            .to_vec(),
        variants: all_variants(),
        multicorrector: Some(converged_multicorrector()),
    }
}

pub fn study_by_name(name: &str) -> Result<ConvergenceStudyConfig> {
    match name {
        "cantilever" => Ok(cantilever_study()),
        "pendulum" => Ok(pendulum_study()),
        "flying_beam" => Ok(flying_beam_study()),
        other => Err(Error::Config(format!("no convergence study named `{other}`"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralRow {
    pub degree: usize,
    pub n: usize,
    pub bc: BcCombo,
    pub spectral_radius: f64,
}

/// `ρ(M − I)` of the lumped iteration for every combination. Uses a unit
/// straight beam: the blocks depend on the spline space only.
pub fn spectral_study(degrees: &[usize], ns: &[usize], combos: &[BcCombo]) -> Result<Vec<SpectralRow>> {
    let mut rows = Vec::with_capacity(degrees.len() * ns.len() * combos.len());
    for &bc in combos {
        for &degree in degrees {
            for &n in ns {
                let disc = Discretization::straight(degree, n, 1.0)?;
                let blocks = assemble_mass_blocks(&disc, &bc.conditions());
                let rho = spectral_radius(&blocks.m_a)?.max(spectral_radius(&blocks.m_alpha)?);
                rows.push(SpectralRow { degree, n, bc, spectral_radius: rho });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub benchmarks: Vec<String>,
    pub degrees: Vec<usize>,
    pub n_values: Vec<usize>,
    #[serde(default = "all_variants")]
    pub variants: Vec<SolverVariant>,
    #[serde(default = "default_bench_steps")]
    pub steps: usize,
    #[serde(default = "default_warmup")]
    pub warmup_steps: usize,
    /// Fixed multicorrector pass count `r` for the lumped variants.
    #[serde(default = "default_passes")]
    pub corrector_passes: usize,
    /// Timed rounds of `steps` steps per case.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// Step size per benchmark; defaults to the benchmark's reference step.
    #[serde(default)]
    pub step_s: BTreeMap<String, f64>,
}

fn default_bench_steps() -> usize {
    500
}

fn default_warmup() -> usize {
    20
}

fn default_passes() -> usize {
    30
}

fn default_repeats() -> usize {
    5
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            benchmarks: presets::NAMES.iter().map(|s| s.to_string()).collect(),
            degrees: vec![2, 4, 6],
            n_values: vec![10, 20, 30, 40, 50, 60],
            variants: all_variants(),
            steps: default_bench_steps(),
            warmup_steps: default_warmup(),
            corrector_passes: default_passes(),
            repeats: default_repeats(),
            step_s: BTreeMap::new(),
        }
    }
}

/// Bench step size of each benchmark: the finest step its studies use,
/// except the spinning rod, whose preset step exceeds the explicit limit
/// once p = 6 and n ≥ 50.
pub fn reference_step(benchmark: &str) -> Result<f64> {
    match benchmark {
        "cantilever" => Ok(1e-7),
        "pendulum" => Ok(2.5e-6),
        "flying_beam" => Ok(5e-6),
        "spinning_beam" => Ok(5e-7),
        other => Err(Error::Config(format!("unknown benchmark `{other}`"))),
    }
}

impl BenchConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.benchmarks.is_empty() || self.degrees.is_empty() || self.n_values.is_empty() || self.variants.is_empty()
        {
            return Err(Error::Config("bench lists must be non-empty".into()));
        }
        if self.steps == 0 || self.corrector_passes == 0 || self.repeats == 0 {
            return Err(Error::Config("bench steps, corrector passes and repeats must be positive".into()));
        }
        for b in &self.benchmarks {
            presets::by_name(b)?;
            self.step_for(b)?;
        }
        Ok(())
    }

    fn step_for(&self, benchmark: &str) -> Result<f64> {
        match self.step_s.get(benchmark) {
            Some(h) if *h > 0.0 => Ok(*h),
            Some(_) => Err(Error::Config(format!("bench step for {benchmark} must be positive"))),
            None => reference_step(benchmark),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub benchmark: String,
    pub variant: SolverVariant,
    pub degree: usize,
    pub n: usize,
    pub step_s: f64,
    /// Mean wall time per step.
    pub seconds_per_step: f64,
    /// Relative to CN-NL at the smallest `n` of the same benchmark and degree.
    pub normalized: f64,
}

/// Steps per timed chunk. Chunks of the compared runs alternate, so the
/// large swings in machine speed of a shared host hit them alike.
const CHUNK_STEPS: usize = 25;

/// Per-step wall time of each configuration. After `warmup` untimed steps,
/// each run advances `repeats × steps` steps in chunks that alternate
/// between the runs; the fastest chunk of each run is kept.
pub fn time_interleaved(configs: &[ScenarioConfig], warmup: usize, steps: usize, repeats: usize) -> Result<Vec<f64>> {
    let mut sims = configs.iter().map(Simulation::new).collect::<Result<Vec<_>>>()?;
    for sim in &mut sims {
        for _ in 0..warmup {
            sim.step()?;
        }
    }
    let chunk = CHUNK_STEPS.min(steps);
    let mut best = vec![f64::INFINITY; sims.len()];
    for _ in 0..repeats * steps.div_ceil(chunk) {
        for (b, sim) in best.iter_mut().zip(&mut sims) {
            let start = Instant::now();
            for _ in 0..chunk {
                sim.step()?;
            }
            *b = b.min(start.elapsed().as_secs_f64() / chunk as f64);
        }
    }
    Ok(best)
}

/// Per-step times for the full matrix, one mesh at a time on the calling
/// thread, its variants interleaved by [`time_interleaved`].
pub fn timing_bench(config: &BenchConfig) -> Result<Vec<BenchResult>> {
    config.validate()?;
    let n_ref = *config.n_values.iter().min().expect("validated");
    let mut results = Vec::new();
    for benchmark in &config.benchmarks {
        let h = config.step_for(benchmark)?;
        for &degree in &config.degrees {
            let mut base = presets::by_name(benchmark)?;
            base.discretization.degree = degree;
            base.time.step_s = h;
            base.time.duration_s = h * (config.warmup_steps + config.steps * config.repeats) as f64;
            base.solver.multicorrector = MulticorrectorSettings::fixed(config.corrector_passes);
            let time_mesh = |variants: &[SolverVariant], n: usize| -> Result<Vec<f64>> {
                let configs: Vec<_> = variants
                    .iter()
                    .map(|&v| {
                        let mut c = base.clone().with_variant(v);
                        c.discretization.n = n;
                        c
                    })
                    .collect();
                time_interleaved(&configs, config.warmup_steps, config.steps, config.repeats)
            };
            let mut timed = Vec::new();
            for &n in &config.n_values {
                let times = time_mesh(&config.variants, n)?;
                timed.extend(config.variants.iter().zip(times).map(|(&v, t)| (v, n, t)));
            }
            let reference = match timed.iter().find(|(v, n, _)| *v == SolverVariant::CnNl && *n == n_ref) {
                Some(t) => t.2,
                None => time_mesh(&[SolverVariant::CnNl], n_ref)?[0],
            };
            results.extend(timed.into_iter().map(|(variant, n, seconds_per_step)| BenchResult {
                benchmark: benchmark.clone(),
                variant,
                degree,
                n,
                step_s: h,
                seconds_per_step,
                normalized: seconds_per_step / reference,
            }));
        }
    }
    Ok(results)
}
