//! The four benchmark scenarios with their published parameters.
//!
//! The flying beam's load histories and shape are not given numerically in
//! the literature this reproduces; the defaults here follow the classical
//! free-flight test (straight 10 m beam spanning (6, 0, 0) to (0, 8, 0),
//! end force `F = M / 10` with `M = (200, 100, 100)` scaled by a hat
//! function peaking at 2.5 s and released at 5 s).

use std::f64::consts::PI;

use crate::beam::{CrossSection, EndLoads, LoadVector, Loads, Material, TimeHistory};
use crate::error::{Error, Result};
use crate::integrator::{InitialAngularVelocity, InitialConditions, InitialVelocity};
use crate::solver::{SolverSettings, SolverVariant, Support};

use super::config::{
    DiscretizationConfig, GeometryConfig, OutputConfig, ScenarioConfig, SectionConfig, SupportsConfig, TimeConfig,
};

pub const NAMES: [&str; 4] = ["cantilever", "pendulum", "flying_beam", "spinning_beam"];

pub const STEEL: Material = Material { density_kg_m3: 7800.0, young_modulus_pa: 210e9, poisson_ratio: 0.2 };
pub const SOFT_ROD: Material = Material { density_kg_m3: 1100.0, young_modulus_pa: 5e6, poisson_ratio: 0.5 };

pub fn by_name(name: &str) -> Result<ScenarioConfig> {
    match name {
        "cantilever" => Ok(cantilever()),
        "pendulum" => Ok(pendulum()),
        "flying_beam" => Ok(flying_beam()),
        "spinning_beam" => Ok(spinning_beam(20.0 * PI)),
        other => Err(Error::Config(format!("unknown preset `{other}` (expected one of {})", NAMES.join(", ")))),
    }
}

fn geometric(cross_section: CrossSection, material: Material) -> SectionConfig {
    SectionConfig::Geometric { cross_section, material, shear_correction: 1.0, torsion_constant_m4: None }
}

fn along_y(length_m: f64) -> GeometryConfig {
    GeometryConfig { length_m, start_m: [0.0; 3], direction: [0.0, 1.0, 0.0] }
}

/// Steel cantilever, 1 m, 1 cm square section, tip force `F₃ = −100 N`
/// applied suddenly at `t = 0`.
pub fn cantilever() -> ScenarioConfig {
    ScenarioConfig {
        name: "cantilever".into(),
        geometry: along_y(1.0),
        section: geometric(CrossSection::Square { side_m: 0.01 }, STEEL),
        supports: SupportsConfig { start: Support::Clamped, end: Support::Free },
        loads: Loads {
            end: EndLoads { force: vec![LoadVector::constant([0.0, 0.0, -100.0])], moment: vec![] },
            ..Default::default()
        },
        initial: InitialConditions::default(),
        discretization: DiscretizationConfig { degree: 4, n: 20 },
        time: TimeConfig { step_s: 1e-6, duration_s: 1.0, output_stride: 1000 },
        solver: SolverSettings::new(SolverVariant::CnNl),
        output: OutputConfig::default(),
    }
}

/// Soft rod released horizontally, hinged at one end, swinging under its
/// own weight.
pub fn pendulum() -> ScenarioConfig {
    ScenarioConfig {
        name: "pendulum".into(),
        geometry: along_y(1.0),
        section: geometric(CrossSection::Circle { diameter_m: 0.01 }, SOFT_ROD),
        supports: SupportsConfig { start: Support::Hinged, end: Support::Free },
        loads: Loads { gravity_m_s2: Some([0.0, 0.0, -9.81]), ..Default::default() },
        initial: InitialConditions::default(),
        discretization: DiscretizationConfig { degree: 4, n: 30 },
        time: TimeConfig { step_s: 1e-5, duration_s: 1.0, output_stride: 100 },
        solver: SolverSettings::new(SolverVariant::CnNl),
        output: OutputConfig::default(),
    }
}

/// Hat function: 0 at `t = 0`, 1 at 2.5 s, 0 from 5 s on.
pub fn flying_beam_history() -> TimeHistory {
    TimeHistory::Table { points: vec![[0.0, 0.0], [2.5, 1.0], [5.0, 0.0]] }
}

/// Free-free beam driven by a force and a couple at its start end, then
/// left in free flight.
pub fn flying_beam() -> ScenarioConfig {
    let moment = [200.0, 100.0, 100.0];
    let force = moment.map(|m| m / 10.0);
    let history = flying_beam_history();
    ScenarioConfig {
        name: "flying_beam".into(),
        geometry: GeometryConfig { length_m: 10.0, start_m: [6.0, 0.0, 0.0], direction: [-0.6, 0.8, 0.0] },
        section: SectionConfig::Direct {
            mass_per_length_kg_m: 1.0,
            axial_shear_stiffness_n: [1e4; 3],
            bending_torsion_stiffness_n_m2: [500.0; 3],
            rotary_inertia_kg_m: [10.0; 3],
        },
        supports: SupportsConfig { start: Support::Free, end: Support::Free },
        loads: Loads {
            start: EndLoads {
                force: vec![LoadVector { amplitude: force, history: history.clone() }],
                moment: vec![LoadVector { amplitude: moment, history }],
            },
            ..Default::default()
        },
        initial: InitialConditions::default(),
        discretization: DiscretizationConfig { degree: 6, n: 60 },
        time: TimeConfig { step_s: 5e-6, duration_s: 5.0, output_stride: 2000 },
        solver: SolverSettings::new(SolverVariant::CnNl),
        output: OutputConfig::default(),
    }
}

/// The cantilever's steel beam with a 1.75 cm section, hinged at its start,
/// spinning about the vertical axis through the hinge under self-weight.
/// Runs one revolution.
pub fn spinning_beam(omega3_rad_s: f64) -> ScenarioConfig {
    let omega = [0.0, 0.0, omega3_rad_s];
    ScenarioConfig {
        name: "spinning_beam".into(),
        geometry: along_y(1.0),
        section: geometric(CrossSection::Square { side_m: 0.0175 }, STEEL),
        supports: SupportsConfig { start: Support::Hinged, end: Support::Free },
        loads: Loads { gravity_m_s2: Some([0.0, 0.0, -9.81]), ..Default::default() },
        initial: InitialConditions {
            velocity: InitialVelocity::RigidSpin { omega, pivot: [0.0; 3] },
            angular_velocity: InitialAngularVelocity::Uniform { value: omega },
        },
        discretization: DiscretizationConfig { degree: 4, n: 20 },
        time: TimeConfig { step_s: 1e-6, duration_s: 2.0 * PI / omega3_rad_s.abs(), output_stride: 1000 },
        solver: SolverSettings::new(SolverVariant::CnNl),
        output: OutputConfig::default(),
    }
}
