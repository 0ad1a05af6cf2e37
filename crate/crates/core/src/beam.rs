//! Geometrically exact shear-deformable beam: section constants, reference
//! configuration, loads and the collocated strong-form right-hand sides.
//!
//! The beam axis is the second material direction, so
//! `C_N = diag(GA₁, EA, GA₃)` and `C_M = diag(EJ₁, GJ, EJ₃)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BandedLu, BandedMatrix};
use crate::rot3::{skew, Mat3, Rotation, Vec3};
use crate::spline::{CollocationGrid, CollocationOperators, ReferenceJacobian, SplineSpace};

/// Cross-section constants per unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionProperties {
    /// μ, kg/m.
    pub mass_per_length: f64,
    /// Diagonal of `C_N` (N).
    pub axial_shear_stiffness: [f64; 3],
    /// Diagonal of `C_M` (N·m²).
    pub bending_torsion_stiffness: [f64; 3],
    /// Diagonal of the material inertia `J` (kg·m).
    pub rotary_inertia: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum CrossSection {
    Square { side_m: f64 },
    Circle { diameter_m: f64 },
}

impl CrossSection {
    pub fn area(&self) -> f64 {
        match *self {
            Self::Square { side_m: a } => a * a,
            Self::Circle { diameter_m: d } => std::f64::consts::PI * d * d / 4.0,
        }
    }

    /// Second moments about material axes 1 and 3 (m⁴).
    pub fn bending_moments(&self) -> (f64, f64) {
        let i = match *self {
            Self::Square { side_m: a } => a.powi(4) / 12.0,
            Self::Circle { diameter_m: d } => std::f64::consts::PI * d.powi(4) / 64.0,
        };
        (i, i)
    }

    pub fn polar_moment(&self) -> f64 {
        let (i1, i3) = self.bending_moments();
        i1 + i3
    }

    fn dimension(&self) -> f64 {
        match *self {
            Self::Square { side_m } => side_m,
            Self::Circle { diameter_m } => diameter_m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub density_kg_m3: f64,
    pub young_modulus_pa: f64,
    pub poisson_ratio: f64,
}

impl Material {
    pub fn shear_modulus(&self) -> f64 {
        self.young_modulus_pa / (2.0 * (1.0 + self.poisson_ratio))
    }
}

impl SectionProperties {
    /// Constants from geometry and an isotropic material. The torsion
    /// constant defaults to the polar moment; the shear correction
    /// factor multiplies both shear stiffnesses.
    pub fn from_geometry(
        section: CrossSection,
        material: Material,
        shear_correction: f64,
        torsion_constant_m4: Option<f64>,
    ) -> Result<Self> {
        if !(section.dimension() > 0.0) {
            return Err(Error::Config("cross-section dimension must be positive".into()));
        }
        if !(material.density_kg_m3 > 0.0) || !(material.young_modulus_pa > 0.0) {
            return Err(Error::Config("density and Young's modulus must be positive".into()));
        }
        if !(material.poisson_ratio > -1.0 && material.poisson_ratio <= 0.5) {
            return Err(Error::Config("Poisson's ratio must lie in (-1, 0.5]".into()));
        }
        let (e, g, rho) = (material.young_modulus_pa, material.shear_modulus(), material.density_kg_m3);
        let area = section.area();
        let (i1, i3) = section.bending_moments();
        let polar = section.polar_moment();
        let torsion = torsion_constant_m4.unwrap_or(polar);
        let props = Self {
            mass_per_length: rho * area,
            axial_shear_stiffness: [shear_correction * g * area, e * area, shear_correction * g * area],
            bending_torsion_stiffness: [e * i1, g * torsion, e * i3],
            rotary_inertia: [rho * i1, rho * polar, rho * i3],
        };
        props.validate()?;
        Ok(props)
    }

    pub fn validate(&self) -> Result<()> {
        let all = std::iter::once(self.mass_per_length)
            .chain(self.axial_shear_stiffness)
            .chain(self.bending_torsion_stiffness)
            .chain(self.rotary_inertia);
        if all.into_iter().any(|x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::Config("section constants must be positive and finite".into()));
        }
        Ok(())
    }

    pub fn c_n(&self) -> Vec3 {
        Vec3::from(self.axial_shear_stiffness)
    }

    pub fn c_m(&self) -> Vec3 {
        Vec3::from(self.bending_torsion_stiffness)
    }

    pub fn inertia(&self) -> Vec3 {
        Vec3::from(self.rotary_inertia)
    }
}

/// `j = R J Rᵀ` for a diagonal material inertia.
pub fn spatial_inertia(rotation: &Rotation, inertia_diag: &Vec3) -> Mat3 {
    let r = rotation.matrix();
    r * Mat3::from_diagonal(inertia_diag) * r.transpose()
}

#[inline]
fn rotate_diag(r: &Mat3, diag: &Vec3) -> Mat3 {
    r * Mat3::from_diagonal(diag) * r.transpose()
}

/// Which end of the beam: `s = 0` or `s = L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamEnd {
    Start,
    End,
}

impl BeamEnd {
    pub const BOTH: [BeamEnd; 2] = [BeamEnd::Start, BeamEnd::End];

    /// Collocation / control index of this end for `num_points` points.
    pub fn index(self, num_points: usize) -> usize {
        match self {
            Self::Start => 0,
            Self::End => num_points - 1,
        }
    }

    /// Outward normal sign: the internal force at `s = 0` balances the
    /// negative of the applied end load.
    pub fn normal_sign(self) -> f64 {
        match self {
            Self::Start => -1.0,
            Self::End => 1.0,
        }
    }
}

/// Maps the parametric increment field derivatives to arc length and
/// recovers `f,s` at collocation points from point values `f_i` by
/// interpolating them (`D0⁻¹`) and differentiating (`D1`).
#[derive(Debug, Clone)]
pub struct PointFieldDerivative {
    d0_lu: BandedLu,
}

impl PointFieldDerivative {
    pub fn new(ops: &CollocationOperators) -> Result<Self> {
        Ok(Self { d0_lu: BandedMatrix::from_rows(&ops.d0).factor()? })
    }

    /// Control values interpolating the given point values.
    pub fn interpolate(&self, values: &[Vec3], controls: &mut [Vec3]) {
        controls.copy_from_slice(values);
        self.d0_lu.solve_vec3_in_place(controls);
    }

    pub fn derivative(&self, ops: &CollocationOperators, values: &[Vec3], scratch: &mut [Vec3], out: &mut [Vec3]) {
        self.interpolate(values, scratch);
        ops.d1.apply(scratch, out);
    }
}

/// Shared discretization: spline space, Greville grid and operators.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub space: SplineSpace,
    pub grid: CollocationGrid,
    pub ops: CollocationOperators,
    pub fit: PointFieldDerivative,
}

impl Discretization {
    pub fn new(space: SplineSpace, jacobian: ReferenceJacobian) -> Result<Self> {
        let grid = space.greville_abscissae();
        let ops = CollocationOperators::new(&space, &grid, jacobian)?;
        let fit = PointFieldDerivative::new(&ops)?;
        Ok(Self { space, grid, ops, fit })
    }

    /// Open uniform space with `n + 1` basis functions for a straight
    /// reference of the given length.
    pub fn straight(degree: usize, n: usize, length: f64) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::Config("beam length must be positive".into()));
        }
        Self::new(SplineSpace::open_uniform(degree, n + 1)?, ReferenceJacobian::Constant(length))
    }

    pub fn num_points(&self) -> usize {
        self.grid.len()
    }
}

/// Initial (stress-free) configuration.
#[derive(Debug, Clone)]
pub struct ReferenceConfiguration {
    /// Control values of `c₀`.
    pub centroid: Vec<Vec3>,
    /// `R₀` at collocation points.
    pub rotations: Vec<Rotation>,
    /// Material curvature `K₀` at collocation points.
    pub curvature: Vec<Vec3>,
    /// `R₀ᵀ c₀,s` at collocation points.
    pub(crate) stretch: Vec<Vec3>,
    /// `∂s (R₀ᵀ c₀,s)` at collocation points.
    pub(crate) stretch_rate: Vec<Vec3>,
    /// `K₀,s` at collocation points.
    pub(crate) curvature_rate: Vec<Vec3>,
}

impl ReferenceConfiguration {
    pub fn new(
        disc: &Discretization,
        centroid: Vec<Vec3>,
        rotations: Vec<Rotation>,
        curvature: Vec<Vec3>,
    ) -> Result<Self> {
        let n = disc.num_points();
        if centroid.len() != n || rotations.len() != n || curvature.len() != n {
            return Err(Error::Config(format!("reference data must have {n} entries")));
        }
        let ops = &disc.ops;
        let mut stretch = Vec::with_capacity(n);
        let mut stretch_rate = Vec::with_capacity(n);
        for i in 0..n {
            let r = &rotations[i];
            let cs = ops.d1.row_dot(i, &centroid);
            let css = ops.d2.row_dot(i, &centroid);
            let g = r.apply_transpose(&cs);
            stretch.push(g);
            stretch_rate.push(r.apply_transpose(&css) - curvature[i].cross(&g));
        }
        let mut scratch = vec![Vec3::zeros(); n];
        let mut curvature_rate = vec![Vec3::zeros(); n];
        disc.fit.derivative(ops, &curvature, &mut scratch, &mut curvature_rate);
        Ok(Self { centroid, rotations, curvature, stretch, stretch_rate, curvature_rate })
    }

    /// Straight beam from `start` to `end`; `rotation` maps material axes
    /// to space and must send `e₂` along the beam.
    pub fn straight(disc: &Discretization, start: Vec3, end: Vec3, rotation: Rotation) -> Result<Self> {
        let axis = (end - start).normalize();
        if (rotation.apply(&Vec3::y()) - axis).amax() > 1e-9 {
            return Err(Error::Config("reference rotation must map e2 onto the beam axis".into()));
        }
        let centroid = disc.grid.points.iter().map(|u| start + (end - start) * *u).collect();
        let n = disc.num_points();
        Self::new(disc, centroid, vec![rotation; n], vec![Vec3::zeros(); n])
    }
}

/// Piecewise time dependence of a load, multiplying its amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeHistory {
    Constant,
    /// Linear rise from 0 at `t = 0` to 1 at `duration_s`, then held.
    Ramp { duration_s: f64 },
    /// Piecewise-linear `(t_s, factor)` table, held constant outside its range.
    Table { points: Vec<[f64; 2]> },
}

impl TimeHistory {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Constant => Ok(()),
            Self::Ramp { duration_s } if *duration_s > 0.0 => Ok(()),
            Self::Ramp { .. } => Err(Error::Config("ramp duration must be positive".into())),
            Self::Table { points } => {
                if points.is_empty() {
                    return Err(Error::Config("load table must not be empty".into()));
                }
                if points.windows(2).any(|w| w[1][0] < w[0][0]) {
                    return Err(Error::Config("load table times must be non-decreasing".into()));
                }
                Ok(())
            }
        }
    }

    pub fn factor(&self, t: f64) -> f64 {
        match self {
            Self::Constant => 1.0,
            Self::Ramp { duration_s } => (t / duration_s).clamp(0.0, 1.0),
            Self::Table { points } => {
                let first = points[0];
                if t < first[0] {
                    return first[1];
                }
                // Last segment containing t; equal times make a jump.
                for w in points.windows(2).rev() {
                    let ([t0, f0], [t1, f1]) = (w[0], w[1]);
                    if t >= t0 && t <= t1 {
                        if t1 == t0 {
                            return f1;
                        }
                        return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
                    }
                }
                points[points.len() - 1][1]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadVector {
    pub amplitude: [f64; 3],
    #[serde(default = "constant_history")]
    pub history: TimeHistory,
}

fn constant_history() -> TimeHistory {
    TimeHistory::Constant
}

impl LoadVector {
    pub fn constant(amplitude: [f64; 3]) -> Self {
        Self { amplitude, history: TimeHistory::Constant }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        Vec3::from(self.amplitude) * self.history.factor(t)
    }
}

fn sum_at(loads: &[LoadVector], t: f64) -> Vec3 {
    loads.iter().fold(Vec3::zeros(), |acc, l| acc + l.at(t))
}

/// Concentrated force (N) and couple (N·m) applied at one end.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EndLoads {
    #[serde(default)]
    pub force: Vec<LoadVector>,
    #[serde(default)]
    pub moment: Vec<LoadVector>,
}

/// External loading. Distributed loads are uniform along the beam.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Loads {
    /// Gravitational acceleration (m/s²), giving `n̄ = μ g`.
    #[serde(default)]
    pub gravity_m_s2: Option<[f64; 3]>,
    /// Force per unit length (N/m).
    #[serde(default)]
    pub distributed_force: Vec<LoadVector>,
    /// Couple per unit length (N).
    #[serde(default)]
    pub distributed_couple: Vec<LoadVector>,
    #[serde(default)]
    pub start: EndLoads,
    #[serde(default)]
    pub end: EndLoads,
}

impl Loads {
    pub fn validate(&self) -> Result<()> {
        let all = self
            .distributed_force
            .iter()
            .chain(&self.distributed_couple)
            .chain(&self.start.force)
            .chain(&self.start.moment)
            .chain(&self.end.force)
            .chain(&self.end.moment);
        for l in all {
            l.history.validate()?;
        }
        Ok(())
    }

    pub fn distributed_force(&self, t: f64, mass_per_length: f64) -> Vec3 {
        let g = self.gravity_m_s2.map(Vec3::from).unwrap_or_else(Vec3::zeros);
        g * mass_per_length + sum_at(&self.distributed_force, t)
    }

    pub fn distributed_couple(&self, t: f64) -> Vec3 {
        sum_at(&self.distributed_couple, t)
    }

    fn at_end(&self, end: BeamEnd) -> &EndLoads {
        match end {
            BeamEnd::Start => &self.start,
            BeamEnd::End => &self.end,
        }
    }

    /// Applied end force.
    pub fn end_force(&self, end: BeamEnd, t: f64) -> Vec3 {
        sum_at(&self.at_end(end).force, t)
    }

    pub fn end_moment(&self, end: BeamEnd, t: f64) -> Vec3 {
        sum_at(&self.at_end(end).moment, t)
    }

    /// Value `n̄_c` the internal force must take at this end.
    pub fn force_target(&self, end: BeamEnd, t: f64) -> Vec3 {
        self.end_force(end, t) * end.normal_sign()
    }

    pub fn moment_target(&self, end: BeamEnd, t: f64) -> Vec3 {
        self.end_moment(end, t) * end.normal_sign()
    }
}

/// Everything needed to evaluate the beam's strong-form residuals.
#[derive(Debug, Clone)]
pub struct BeamModel {
    pub disc: Discretization,
    pub section: SectionProperties,
    pub reference: ReferenceConfiguration,
}

impl BeamModel {
    pub fn new(disc: Discretization, section: SectionProperties, reference: ReferenceConfiguration) -> Result<Self> {
        section.validate()?;
        if reference.centroid.len() != disc.num_points() {
            return Err(Error::Config("reference does not match discretization".into()));
        }
        Ok(Self { disc, section, reference })
    }

    pub fn num_points(&self) -> usize {
        self.disc.num_points()
    }
}

/// Configuration-dependent quantities at every collocation point.
#[derive(Debug, Clone)]
pub struct CollocatedFields {
    pub c_s: Vec<Vec3>,
    pub c_ss: Vec<Vec3>,
    /// Material strain `Γ_N = Rᵀc,s − R₀ᵀc₀,s`.
    pub strain: Vec<Vec3>,
    /// `K_M = K − K₀`.
    pub curvature_strain: Vec<Vec3>,
    pub strain_rate: Vec<Vec3>,
    pub curvature_strain_rate: Vec<Vec3>,
    /// Spatial internal force `n = R C_N Γ_N`.
    pub force: Vec<Vec3>,
    /// Spatial internal moment `m = R C_M K_M`.
    pub moment: Vec<Vec3>,
    pub inertia: Vec<Mat3>,
}

/// Linearization of the end internal force and moment in the rotation
/// increment and the arc-length derivative of the increments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeumannOperators {
    pub psi1: Mat3,
    pub psi2: Mat3,
    pub chi1: Mat3,
    pub chi2: Mat3,
    pub psi_bar: Vec3,
    pub chi_bar: Vec3,
}

impl CollocatedFields {
    pub fn new(num_points: usize) -> Self {
        let z = vec![Vec3::zeros(); num_points];
        Self {
            c_s: z.clone(),
            c_ss: z.clone(),
            strain: z.clone(),
            curvature_strain: z.clone(),
            strain_rate: z.clone(),
            curvature_strain_rate: z.clone(),
            force: z.clone(),
            moment: z,
            inertia: vec![Mat3::zeros(); num_points],
        }
    }

    /// Evaluate strains, their arc-length derivatives, stress resultants
    /// and spatial inertia for the configuration `(c, R, K, K,s)`.
    pub fn evaluate(
        &mut self,
        model: &BeamModel,
        centroid: &[Vec3],
        rotations: &[Rotation],
        curvature: &[Vec3],
        curvature_rate: &[Vec3],
    ) {
        let ops = &model.disc.ops;
        let reference = &model.reference;
        let (c_n, c_m, inertia) = (model.section.c_n(), model.section.c_m(), model.section.inertia());
        for i in 0..model.num_points() {
            let r = &rotations[i];
            let cs = ops.d1.row_dot(i, centroid);
            let css = ops.d2.row_dot(i, centroid);
            let stretch = r.apply_transpose(&cs);
            let gamma = stretch - reference.stretch[i];
            let kappa = curvature[i] - reference.curvature[i];
            let gamma_s = r.apply_transpose(&css) - curvature[i].cross(&stretch) - reference.stretch_rate[i];
            let kappa_s = curvature_rate[i] - reference.curvature_rate[i];
            self.c_s[i] = cs;
            self.c_ss[i] = css;
            self.strain[i] = gamma;
            self.curvature_strain[i] = kappa;
            self.strain_rate[i] = gamma_s;
            self.curvature_strain_rate[i] = kappa_s;
            self.force[i] = r.apply(&c_n.component_mul(&gamma));
            self.moment[i] = r.apply(&c_m.component_mul(&kappa));
            self.inertia[i] = rotate_diag(r.matrix(), &inertia);
        }
    }

    /// `ψᵢ = R K̃ C_N Γ_N + R C_N Γ_N,s + n̄`.
    pub fn translational_rhs(&self, model: &BeamModel, curvature: &[Vec3], rotations: &[Rotation], i: usize, load: &Vec3) -> Vec3 {
        let c_n = model.section.c_n();
        let r = &rotations[i];
        let material = curvature[i].cross(&c_n.component_mul(&self.strain[i])) + c_n.component_mul(&self.strain_rate[i]);
        r.apply(&material) + load
    }

    /// `χᵢ = R K̃ C_M K_M + R C_M K_M,s + c,s × R C_N Γ_N + m̄`.
    pub fn rotational_rhs(&self, model: &BeamModel, curvature: &[Vec3], rotations: &[Rotation], i: usize, couple: &Vec3) -> Vec3 {
        let c_m = model.section.c_m();
        let r = &rotations[i];
        let material = curvature[i].cross(&c_m.component_mul(&self.curvature_strain[i]))
            + c_m.component_mul(&self.curvature_strain_rate[i]);
        r.apply(&material) + self.c_s[i].cross(&self.force[i]) + couple
    }

    /// Boundary operators at point `i` for end targets `n̄_c`, `m̄_c`.
    pub fn neumann_operators(
        &self,
        model: &BeamModel,
        rotations: &[Rotation],
        i: usize,
        force_target: &Vec3,
        moment_target: &Vec3,
    ) -> NeumannOperators {
        let r = rotations[i].matrix();
        let psi2 = rotate_diag(r, &model.section.c_n());
        let chi2 = rotate_diag(r, &model.section.c_m());
        NeumannOperators {
            psi1: psi2 * skew(&self.c_s[i]) - skew(&self.force[i]),
            psi2,
            chi1: -skew(&self.moment[i]),
            chi2,
            psi_bar: -(self.force[i] - force_target),
            chi_bar: -(self.moment[i] - moment_target),
        }
    }
}
