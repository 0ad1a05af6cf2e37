//! Benchmark scenarios, studies and result files.

pub mod config;
pub mod diagnostics;
pub mod output;
pub mod presets;
pub mod simulation;
pub mod study;

pub use config::ScenarioConfig;
pub use diagnostics::{momentum, Momentum};
pub use simulation::{run_simulation, Simulation, TimeSeriesOutput};
pub use study::{
    convergence_study, spectral_study, timing_bench, BenchConfig, BenchResult, ConvergenceStudyConfig,
    ConvergenceTable, SpectralRow,
};
