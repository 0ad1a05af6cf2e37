//! Time stepping of a configured scenario and the recorded histories.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::beam::{BeamModel, Loads};
use crate::error::Result;
use crate::integrator::{apply_initial_conditions, KinematicState};
use crate::rot3::Vec3;
use crate::solver::{Solver, SolverVariant, StepStats};

use super::config::ScenarioConfig;
use super::diagnostics::{momentum, sample_field, uniform_grid, Momentum};

/// A scenario in progress: model, loads, solver and current state.
pub struct Simulation {
    config: ScenarioConfig,
    model: BeamModel,
    loads: Loads,
    solver: Solver,
    state: KinematicState,
}

impl Simulation {
    /// Builds the model, applies the initial velocities and solves for the
    /// initial accelerations.
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        let parts = config.build()?;
        let mut solver = Solver::new(&parts.model, parts.bcs, config.solver)?;
        let mut state = apply_initial_conditions(&parts.model, &config.initial)?;
        solver.initialize(&parts.model, &parts.loads, &mut state)?;
        Ok(Self { config: config.clone(), model: parts.model, loads: parts.loads, solver, state })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn model(&self) -> &BeamModel {
        &self.model
    }

    pub fn state(&self) -> &KinematicState {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    pub fn step(&mut self) -> Result<StepStats> {
        self.solver.step(&self.model, &self.loads, &mut self.state, self.config.time.step_s)
    }

    /// Centroid position at parameter `u`.
    pub fn position_at(&self, u: f64) -> Result<Vec3> {
        self.model.disc.space.eval_field(&self.state.centroid, u, 0)
    }

    pub fn displacement_at(&self, u: f64) -> Result<Vec3> {
        let space = &self.model.disc.space;
        Ok(space.eval_field(&self.state.centroid, u, 0)? - space.eval_field(&self.model.reference.centroid, u, 0)?)
    }

    pub fn positions(&self, us: &[f64]) -> Result<Vec<Vec3>> {
        sample_field(&self.model.disc.space, &self.state.centroid, us)
    }

    pub fn displacements(&self, us: &[f64]) -> Result<Vec<Vec3>> {
        let now = self.positions(us)?;
        let initial = sample_field(&self.model.disc.space, &self.model.reference.centroid, us)?;
        Ok(now.iter().zip(&initial).map(|(a, b)| a - b).collect())
    }

    pub fn momentum(&self) -> Result<Momentum> {
        momentum(&self.model, &self.state)
    }
}

/// Probe displacement at one time, with the solver work done since the
/// previous sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub time_s: f64,
    pub displacement_m: [f64; 3],
    pub newton_iterations: usize,
    pub corrector_passes: usize,
}

/// Centroid line at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time_s: f64,
    pub positions_m: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub steps: usize,
    pub newton_iterations: usize,
    pub max_newton_iterations: usize,
    /// Steps that needed exactly one Newton iteration.
    pub single_newton_steps: usize,
    pub corrector_passes: usize,
    /// Largest `‖RᵀR − I‖∞` seen at the sampled steps.
    pub max_orthonormality_drift: f64,
}

impl RunSummary {
    fn record(&mut self, s: &StepStats) {
        self.steps += 1;
        self.newton_iterations += s.newton_iterations;
        self.max_newton_iterations = self.max_newton_iterations.max(s.newton_iterations);
        self.single_newton_steps += usize::from(s.newton_iterations == 1);
        self.corrector_passes += s.corrector_passes;
    }

    pub fn single_newton_fraction(&self) -> f64 {
        self.single_newton_steps as f64 / self.steps.max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesOutput {
    pub name: String,
    pub variant: SolverVariant,
    pub probe_u: f64,
    pub samples: Vec<Sample>,
    pub snapshots: Vec<Snapshot>,
    pub summary: RunSummary,
    /// Stepping wall time; excluded from the deterministic outputs.
    pub wall_time_s: f64,
}

impl TimeSeriesOutput {
    pub fn wall_time_per_step_s(&self) -> f64 {
        self.wall_time_s / self.summary.steps.max(1) as f64
    }
}

/// Runs `config` over its full duration, sampling the probe every
/// `output_stride` steps (and at the last step).
pub fn run_simulation(config: &ScenarioConfig) -> Result<TimeSeriesOutput> {
    let mut sim = Simulation::new(config)?;
    let total = config.time.num_steps();
    let stride = config.time.output_stride;
    let probe = config.output.probe_u;
    let snapshot_grid = uniform_grid(config.output.snapshot_points);
    let mut out = TimeSeriesOutput {
        name: config.name.clone(),
        variant: config.solver.variant,
        probe_u: probe,
        samples: Vec::with_capacity(total / stride + 2),
        snapshots: Vec::new(),
        summary: RunSummary::default(),
        wall_time_s: 0.0,
    };
    let mut pending = StepStats::default();
    let record = |sim: &Simulation, out: &mut TimeSeriesOutput, pending: &mut StepStats| -> Result<()> {
        let index = out.samples.len();
        out.samples.push(Sample {
            time_s: sim.time(),
            displacement_m: sim.displacement_at(probe)?.into(),
            newton_iterations: pending.newton_iterations,
            corrector_passes: pending.corrector_passes,
        });
        *pending = StepStats::default();
        out.summary.max_orthonormality_drift = out.summary.max_orthonormality_drift.max(sim.state.orthonormality_drift());
        if config.output.snapshot_every.is_some_and(|k| index % k == 0) {
            let positions_m = sim.positions(&snapshot_grid)?.into_iter().map(Into::into).collect();
            out.snapshots.push(Snapshot { time_s: sim.time(), positions_m });
        }
        Ok(())
    };
    record(&sim, &mut out, &mut pending)?;
    let start = Instant::now();
    for k in 1..=total {
        let stats = sim.step()?;
        out.summary.record(&stats);
        pending.newton_iterations += stats.newton_iterations;
        pending.corrector_passes += stats.corrector_passes;
        if k % stride == 0 || k == total {
            record(&sim, &mut out, &mut pending)?;
        }
    }
    out.wall_time_s = start.elapsed().as_secs_f64();
    Ok(out)
}
