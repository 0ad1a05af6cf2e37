//! Scenario files: geometry, section, supports, loads, initial state,
//! discretization, time stepping, solver and output options.
//!
//! Keys carry their units (`length_m`, `step_s`, ...). The format is TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::beam::{BeamModel, CrossSection, Discretization, Loads, Material, ReferenceConfiguration, SectionProperties};
use crate::error::{Error, Result};
use crate::integrator::InitialConditions;
use crate::rot3::{Rotation, Vec3};
use crate::solver::{BoundaryConditions, SolverSettings, SolverVariant, Support};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub geometry: GeometryConfig,
    pub section: SectionConfig,
    pub supports: SupportsConfig,
    #[serde(default)]
    pub loads: Loads,
    #[serde(default)]
    pub initial: InitialConditions,
    pub discretization: DiscretizationConfig,
    pub time: TimeConfig,
    pub solver: SolverSettings,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Straight reference axis from `start_m` along `direction`. The material
/// frame is the smallest rotation taking `e₂` onto the axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub length_m: f64,
    #[serde(default)]
    pub start_m: [f64; 3],
    #[serde(default = "axis_y")]
    pub direction: [f64; 3],
}

fn axis_y() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SectionConfig {
    /// Constants derived from a solid cross-section and an isotropic
    /// material.
    Geometric {
        cross_section: CrossSection,
        material: Material,
        #[serde(default = "unit_factor")]
        shear_correction: f64,
        #[serde(default)]
        torsion_constant_m4: Option<f64>,
    },
    /// Section constants given directly (diagonals in material axes, the
    /// beam axis being the second one).
    Direct {
        mass_per_length_kg_m: f64,
        axial_shear_stiffness_n: [f64; 3],
        bending_torsion_stiffness_n_m2: [f64; 3],
        rotary_inertia_kg_m: [f64; 3],
    },
}

fn unit_factor() -> f64 {
    1.0
}

impl SectionConfig {
    pub fn properties(&self) -> Result<SectionProperties> {
        match self {
            Self::Geometric { cross_section, material, shear_correction, torsion_constant_m4 } => {
                if !(*shear_correction > 0.0) {
                    return Err(Error::Config("shear correction factor must be positive".into()));
                }
                SectionProperties::from_geometry(*cross_section, *material, *shear_correction, *torsion_constant_m4)
            }
            Self::Direct {
                mass_per_length_kg_m,
                axial_shear_stiffness_n,
                bending_torsion_stiffness_n_m2,
                rotary_inertia_kg_m,
            } => {
                let props = SectionProperties {
                    mass_per_length: *mass_per_length_kg_m,
                    axial_shear_stiffness: *axial_shear_stiffness_n,
                    bending_torsion_stiffness: *bending_torsion_stiffness_n_m2,
                    rotary_inertia: *rotary_inertia_kg_m,
                };
                props.validate()?;
                Ok(props)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportsConfig {
    pub start: Support,
    pub end: Support,
}

impl SupportsConfig {
    pub fn conditions(&self) -> BoundaryConditions {
        BoundaryConditions::new(self.start, self.end)
    }
}

/// `n + 1` basis functions of degree `degree`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationConfig {
    pub degree: usize,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub step_s: f64,
    pub duration_s: f64,
    /// Steps between recorded samples.
    #[serde(default = "unit_stride")]
    pub output_stride: usize,
}

fn unit_stride() -> usize {
    1
}

impl TimeConfig {
    /// Whole number of steps closest to `duration_s / step_s`.
    pub fn num_steps(&self) -> usize {
        (self.duration_s / self.step_s).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Parametric coordinate of the probe point; 1 is the end tip.
    #[serde(default = "tip")]
    pub probe_u: f64,
    /// Record the whole centroid line every this many samples.
    #[serde(default)]
    pub snapshot_every: Option<usize>,
    #[serde(default = "snapshot_points")]
    pub snapshot_points: usize,
}

fn tip() -> f64 {
    1.0
}

fn snapshot_points() -> usize {
    21
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { probe_u: tip(), snapshot_every: None, snapshot_points: snapshot_points() }
    }
}

/// Everything a simulation needs, built from a validated config.
#[derive(Debug, Clone)]
pub struct ScenarioParts {
    pub model: BeamModel,
    pub loads: Loads,
    pub bcs: BoundaryConditions,
}

impl ScenarioConfig {
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

    pub fn with_variant(mut self, variant: SolverVariant) -> Self {
        self.solver.variant = variant;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(format!("{}: {msg}", self.name)));
        let g = &self.geometry;
        if !(g.length_m > 0.0) || !g.length_m.is_finite() {
            return bad("length_m must be positive");
        }
        if !(Vec3::from(g.direction).norm() > 0.0) || g.start_m.iter().chain(&g.direction).any(|x| !x.is_finite()) {
            return bad("geometry start and direction must be finite, direction non-zero");
        }
        self.section.properties()?;
        let d = &self.discretization;
        if d.degree == 0 || d.n < d.degree {
            return bad("need degree ≥ 1 and n ≥ degree");
        }
        let t = &self.time;
        if !(t.step_s > 0.0) || !(t.duration_s > 0.0) || !t.step_s.is_finite() || !t.duration_s.is_finite() {
            return bad("step_s and duration_s must be positive");
        }
        if t.output_stride == 0 {
            return bad("output_stride must be at least 1");
        }
        let o = &self.output;
        if !(0.0..=1.0).contains(&o.probe_u) {
            return bad("probe_u must lie in [0, 1]");
        }
        if o.snapshot_every == Some(0) || o.snapshot_points < 2 {
            return bad("snapshot_every must be at least 1 and snapshot_points at least 2");
        }
        self.loads.validate()?;
        self.solver.validate()?;
        Ok(())
    }

    pub fn build(&self) -> Result<ScenarioParts> {
        self.validate()?;
        let g = &self.geometry;
        let disc = Discretization::straight(self.discretization.degree, self.discretization.n, g.length_m)?;
        let axis = Vec3::from(g.direction).normalize();
        let start = Vec3::from(g.start_m);
        let reference = ReferenceConfiguration::straight(&disc, start, start + axis * g.length_m, frame_for(&axis))?;
        let model = BeamModel::new(disc, self.section.properties()?, reference)?;
        Ok(ScenarioParts { model, loads: self.loads.clone(), bcs: self.supports.conditions() })
    }
}

/// Smallest rotation taking `e₂` onto the unit vector `axis`.
pub fn frame_for(axis: &Vec3) -> Rotation {
    let e2 = Vec3::y();
    let cross = e2.cross(axis);
    let (sin, cos) = (cross.norm(), e2.dot(axis));
    if sin < 1e-12 {
        return if cos > 0.0 {
            Rotation::identity()
        } else {
            Rotation::exp(&Vec3::new(0.0, 0.0, std::f64::consts::PI))
        };
    }
    Rotation::exp(&(cross / sin * sin.atan2(cos)))
}
