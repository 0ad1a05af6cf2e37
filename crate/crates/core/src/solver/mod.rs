//! Per-step solution of the collocated balance equations.
//!
//! Three variants share the kinematic update and the assembled right-hand
//! sides:
//!
//! * `CnNl`: one coupled `6N` banded direct solve per Newton iteration on
//!   the consistent collocation matrix, Neumann rows fully coupled.
//! * `LuNl`: translational and rotational systems solved separately by the
//!   predictor–multicorrector, rotations first so the rotation term of a
//!   boundary force row is known; Newton on the nonlinear rotational
//!   balance.
//! * `LuL`: as `LuNl` with the rotational balance linearized up front, so
//!   a step is fully explicit.

mod iterative;
mod mass;
mod rotational;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::beam::{BeamEnd, BeamModel, CollocatedFields, Loads, NeumannOperators};
use crate::error::{Error, Result};
use crate::integrator::{
    correct_velocities, predict_increments, predictor_velocities, update_configuration, KinematicState,
    UpdateWorkspace,
};
use crate::linalg::BandedMatrix;
use crate::rot3::{Mat3, Vec3};

pub use iterative::{multicorrector_solve, spectral_radius, MulticorrectorSettings, SPECTRAL_TOLERANCE};
pub use mass::{assemble_mass_blocks, BcCombo, BoundaryConditions, Constraint, EndCondition, MassBlocks, Support};
pub use rotational::{linearized_rotational_system, rotational_residual, rotational_tangent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SolverVariant {
    #[serde(rename = "cn-nl")]
    CnNl,
    #[serde(rename = "lu-nl")]
    LuNl,
    #[serde(rename = "lu-l")]
    LuL,
}

impl SolverVariant {
    pub const ALL: [SolverVariant; 3] = [Self::CnNl, Self::LuNl, Self::LuL];

    pub fn label(self) -> &'static str {
        match self {
            Self::CnNl => "cn-nl",
            Self::LuNl => "lu-nl",
            Self::LuL => "lu-l",
        }
    }
}

impl fmt::Display for SolverVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SolverVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "cn-nl" => Ok(Self::CnNl),
            "lu-nl" => Ok(Self::LuNl),
            "lu-l" => Ok(Self::LuL),
            other => Err(format!("unknown solver variant `{other}` (expected cn-nl, lu-nl or lu-l)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonSettings {
    pub max_iterations: usize,
    /// Residual tolerance in acceleration units, relative to
    /// `max(1, ‖α‖∞)`.
    pub tolerance: f64,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self { max_iterations: 25, tolerance: 1e-10 }
    }
}

impl NewtonSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::Config("newton needs a positive tolerance and at least one iteration".into()));
        }
        Ok(())
    }
}

/// How the lumped variants treat the rotation term `¹ψ α` of a Neumann
/// force row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeumannCoupling {
    /// Use the previous step's angular acceleration. Unstable on a free
    /// end under bending (kept for comparison).
    Lagged,
    /// Solve the rotational system first and use the new angular
    /// acceleration (the rotational rows never involve `ǎ`), which
    /// reproduces the coupled boundary row exactly.
    #[default]
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub variant: SolverVariant,
    #[serde(default)]
    pub neumann_coupling: NeumannCoupling,
    #[serde(default)]
    pub multicorrector: MulticorrectorSettings,
    #[serde(default)]
    pub newton: NewtonSettings,
}

impl SolverSettings {
    pub fn new(variant: SolverVariant) -> Self {
        Self {
            variant,
            neumann_coupling: NeumannCoupling::default(),
            multicorrector: MulticorrectorSettings::default(),
            newton: NewtonSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.multicorrector.validate()?;
        self.newton.validate()
    }
}

/// Work done in one step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub newton_iterations: usize,
    /// Multicorrector passes summed over all solves of the step.
    pub corrector_passes: usize,
}

/// Boundary data of one end for the current step.
#[derive(Debug, Clone, Copy)]
struct EndData {
    k: usize,
    cond: EndCondition,
    scale: f64,
    ops: NeumannOperators,
    /// `D1` row applied to `v̌_p` and `ω̌_p`.
    vp_s: Vec3,
    wp_s: Vec3,
    /// `D0` row applied to `v̌_p` and `ω̌_p`.
    vp: Vec3,
    wp: Vec3,
    alpha_old: Vec3,
}

impl EndData {
    /// Right-hand side of the decoupled translational boundary row.
    fn translational_target(&self, h: f64) -> Result<Vec3> {
        match self.cond.translation {
            Constraint::Dirichlet => Ok(-self.vp / h),
            Constraint::Neumann => {
                let o = &self.ops;
                let f = o.psi_bar - (o.psi1 * self.wp + o.psi2 * self.vp_s) * h - o.psi1 * self.alpha_old * (h * h);
                Ok(inverse(&o.psi2, "boundary force operator")? * f * (self.scale / (h * h)))
            }
        }
    }

    fn rotational_target(&self, h: f64) -> Result<Vec3> {
        match self.cond.rotation {
            Constraint::Dirichlet => Ok(-self.wp / h),
            Constraint::Neumann => {
                let o = &self.ops;
                let c = o.chi_bar - (o.chi1 * self.wp + o.chi2 * self.wp_s) * h - o.chi1 * self.alpha_old * (h * h);
                Ok(inverse(&o.chi2, "boundary moment operator")? * c * (self.scale / (h * h)))
            }
        }
    }
}

fn inverse(m: &Mat3, what: &str) -> Result<Mat3> {
    m.try_inverse().ok_or_else(|| Error::Singular(what.into()))
}

fn max_norm(v: &[Vec3]) -> f64 {
    v.iter().map(|x| x.amax()).fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
struct Work {
    vp: Vec<Vec3>,
    wp: Vec<Vec3>,
    wp_pts: Vec<Vec3>,
    alpha_old_pts: Vec<Vec3>,
    alpha_pts: Vec<Vec3>,
    chi: Vec<Vec3>,
    rhs_a: Vec<Vec3>,
    rhs_alpha: Vec<Vec3>,
    a: Vec<Vec3>,
    alpha: Vec<Vec3>,
    delta: Vec<Vec3>,
    scratch: Vec<Vec3>,
}

impl Work {
    fn new(n: usize) -> Self {
        let z = vec![Vec3::zeros(); n];
        Self {
            vp: z.clone(),
            wp: z.clone(),
            wp_pts: z.clone(),
            alpha_old_pts: z.clone(),
            alpha_pts: z.clone(),
            chi: z.clone(),
            rhs_a: z.clone(),
            rhs_alpha: z.clone(),
            a: z.clone(),
            alpha: z.clone(),
            delta: z.clone(),
            scratch: z,
        }
    }
}

/// One solver instance per simulation; owns all per-step scratch.
#[derive(Debug, Clone)]
pub struct Solver {
    settings: SolverSettings,
    bcs: BoundaryConditions,
    mass: MassBlocks,
    fields: CollocatedFields,
    update: UpdateWorkspace,
    work: Work,
    /// Point-level bandwidths of the union of `M_a` and `M_α`.
    point_band: (usize, usize),
    /// Scalar applied to interior rotational rows of the coupled system.
    inertia_scale: f64,
}

impl Solver {
    pub fn new(model: &BeamModel, bcs: BoundaryConditions, settings: SolverSettings) -> Result<Self> {
        settings.validate()?;
        let n = model.num_points();
        let mass = assemble_mass_blocks(&model.disc, &bcs);
        let (kl_a, ku_a) = mass.m_a.bandwidths();
        let (kl_r, ku_r) = mass.m_alpha.bandwidths();
        let j = model.section.inertia();
        Ok(Self {
            settings,
            bcs,
            mass,
            fields: CollocatedFields::new(n),
            update: UpdateWorkspace::new(n),
            work: Work::new(n),
            point_band: (kl_a.max(kl_r), ku_a.max(ku_r)),
            inertia_scale: 1.0 / (j.sum() / 3.0),
        })
    }

    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    pub fn mass_blocks(&self) -> &MassBlocks {
        &self.mass
    }

    pub fn boundary_conditions(&self) -> &BoundaryConditions {
        &self.bcs
    }

    /// Fields evaluated on the most recent configuration.
    pub fn fields(&self) -> &CollocatedFields {
        &self.fields
    }

    /// Fill `ǎ⁰`, `α̌⁰` from the balance equations on the initial
    /// configuration. Boundary rows: zero for Dirichlet ends, `D1 · a = 0`
    /// for Neumann ends.
    pub fn initialize(&mut self, model: &BeamModel, loads: &Loads, state: &mut KinematicState) -> Result<StepStats> {
        let n = model.num_points();
        let t = state.time;
        self.fields.evaluate(model, &state.centroid, &state.rotations, &state.curvature, &state.curvature_rate);
        let ops = &model.disc.ops;
        let w = &mut self.work;
        ops.d0.apply(&state.angular_velocity, &mut w.wp_pts);
        let mu = model.section.mass_per_length;
        let load = loads.distributed_force(t, mu);
        let couple = loads.distributed_couple(t);
        for i in 1..n - 1 {
            w.rhs_a[i] = self.fields.translational_rhs(model, &state.curvature, &state.rotations, i, &load) / mu;
            let j = &self.fields.inertia[i];
            let chi = self.fields.rotational_rhs(model, &state.curvature, &state.rotations, i, &couple);
            let om = w.wp_pts[i];
            w.rhs_alpha[i] = inverse(j, "rotary inertia")? * (chi - om.cross(&(j * om)));
        }
        for end in BeamEnd::BOTH {
            let k = end.index(n);
            w.rhs_a[k] = Vec3::zeros();
            w.rhs_alpha[k] = Vec3::zeros();
        }
        let mut stats = StepStats::default();
        match self.settings.variant {
            SolverVariant::CnNl => {
                let lu = BandedMatrix::from_rows(&self.mass.m_a).factor()?;
                w.a.copy_from_slice(&w.rhs_a);
                lu.solve_vec3_in_place(&mut w.a);
                let lu = BandedMatrix::from_rows(&self.mass.m_alpha).factor()?;
                w.alpha.copy_from_slice(&w.rhs_alpha);
                lu.solve_vec3_in_place(&mut w.alpha);
            }
            SolverVariant::LuNl | SolverVariant::LuL => {
                let mc = &self.settings.multicorrector;
                stats.corrector_passes += multicorrector_solve(&self.mass.m_a, &w.rhs_a, mc, &mut w.a, &mut w.scratch)?;
                stats.corrector_passes +=
                    multicorrector_solve(&self.mass.m_alpha, &w.rhs_alpha, mc, &mut w.alpha, &mut w.scratch)?;
            }
        }
        state.acceleration.copy_from_slice(&w.a);
        state.angular_acceleration.copy_from_slice(&w.alpha);
        if !state.is_finite() {
            return Err(Error::NonFinite { step: state.step, time: t });
        }
        Ok(stats)
    }

    /// Advance `state` by `h`.
    pub fn step(&mut self, model: &BeamModel, loads: &Loads, state: &mut KinematicState, h: f64) -> Result<StepStats> {
        let step = state.step + 1;
        let time = state.time + h;
        self.step_inner(model, loads, state, h)
            .map_err(|e| Error::Step { step, time, source: Box::new(e) })
            .and_then(|stats| {
                if state.is_finite() {
                    Ok(stats)
                } else {
                    Err(Error::NonFinite { step, time })
                }
            })
    }

    fn step_inner(&mut self, model: &BeamModel, loads: &Loads, state: &mut KinematicState, h: f64) -> Result<StepStats> {
        let inc = predict_increments(state, h);
        let (vp, wp) = predictor_velocities(state, h);
        self.work.vp = vp;
        self.work.wp = wp;
        update_configuration(model, state, &inc, &mut self.update);
        let t = state.time + h;
        self.fields.evaluate(model, &state.centroid, &state.rotations, &state.curvature, &state.curvature_rate);

        let ops = &model.disc.ops;
        let w = &mut self.work;
        ops.d0.apply(&w.wp, &mut w.wp_pts);
        ops.d0.apply(&state.angular_acceleration, &mut w.alpha_old_pts);

        let n = model.num_points();
        let mu = model.section.mass_per_length;
        let load = loads.distributed_force(t, mu);
        let couple = loads.distributed_couple(t);
        for i in 1..n - 1 {
            w.rhs_a[i] = self.fields.translational_rhs(model, &state.curvature, &state.rotations, i, &load) / mu;
            w.chi[i] = self.fields.rotational_rhs(model, &state.curvature, &state.rotations, i, &couple);
        }
        let mut ends = [None; 2];
        for (slot, end) in BeamEnd::BOTH.into_iter().enumerate() {
            let k = end.index(n);
            let ops_k = self.fields.neumann_operators(
                model,
                &state.rotations,
                k,
                &loads.force_target(end, t),
                &loads.moment_target(end, t),
            );
            ends[slot] = Some(EndData {
                k,
                cond: self.bcs.at(end),
                scale: self.mass.neumann_scale(end),
                ops: ops_k,
                vp_s: ops.d1.row_dot(k, &w.vp),
                wp_s: ops.d1.row_dot(k, &w.wp),
                vp: ops.d0.row_dot(k, &w.vp),
                wp: w.wp_pts[k],
                alpha_old: w.alpha_old_pts[k],
            });
        }
        let ends = ends.map(|e| e.expect("both ends filled"));

        let stats = match self.settings.variant {
            SolverVariant::CnNl => self.solve_coupled(model, state, &ends, h)?,
            SolverVariant::LuNl | SolverVariant::LuL => self.solve_lumped(model, state, &ends, h)?,
        };
        let w = &self.work;
        correct_velocities(state, &w.vp, &w.wp, &w.a, &w.alpha, h);
        state.time = t;
        state.step += 1;
        Ok(stats)
    }

    fn solve_lumped(&mut self, model: &BeamModel, state: &KinematicState, ends: &[EndData; 2], h: f64) -> Result<StepStats> {
        let mut stats = self.solve_lumped_rotation(model, state, ends, h)?;
        let mc = self.settings.multicorrector;
        let ops = &model.disc.ops;
        let w = &mut self.work;
        for e in ends {
            let mut e = *e;
            if self.settings.neumann_coupling == NeumannCoupling::Sequential {
                e.alpha_old = ops.d0.row_dot(e.k, &w.alpha);
            }
            w.rhs_a[e.k] = e.translational_target(h)?;
        }
        stats.corrector_passes += multicorrector_solve(&self.mass.m_a, &w.rhs_a, &mc, &mut w.a, &mut w.scratch)?;
        Ok(stats)
    }

    /// `α̌ⁿ` from the rotational rows alone (they do not involve `ǎ`).
    fn solve_lumped_rotation(
        &mut self,
        model: &BeamModel,
        state: &KinematicState,
        ends: &[EndData; 2],
        h: f64,
    ) -> Result<StepStats> {
        let n = model.num_points();
        let mc = self.settings.multicorrector;
        let mut stats = StepStats::default();
        let w = &mut self.work;
        if self.settings.variant == SolverVariant::LuL {
            for i in 1..n - 1 {
                let j = &self.fields.inertia[i];
                let (op, rhs) = linearized_rotational_system(j, &w.wp_pts[i], &w.alpha_old_pts[i], &w.chi[i], h);
                w.rhs_alpha[i] = op
                    .lu()
                    .solve(&rhs)
                    .ok_or_else(|| Error::Singular(format!("linearized rotational operator at point {i}")))?;
            }
            for e in ends {
                w.rhs_alpha[e.k] = e.rotational_target(h)?;
            }
            stats.corrector_passes +=
                multicorrector_solve(&self.mass.m_alpha, &w.rhs_alpha, &mc, &mut w.alpha, &mut w.scratch)?;
            return Ok(stats);
        }

        // Newton on the rotational balance; boundary rows are linear.
        let newton = self.settings.newton;
        w.alpha.copy_from_slice(&state.angular_acceleration);
        let ops = &model.disc.ops;
        let m = &self.mass.m_alpha;
        loop {
            ops.d0.apply(&w.alpha, &mut w.alpha_pts);
            for i in 1..n - 1 {
                let j = &self.fields.inertia[i];
                let r = rotational_residual(j, &w.alpha_pts[i], &w.wp_pts[i], &w.chi[i], h);
                let t = rotational_tangent(j, &w.alpha_pts[i], &w.wp_pts[i], h);
                w.rhs_alpha[i] =
                    -t.lu().solve(&r).ok_or_else(|| Error::Singular(format!("rotational tangent at point {i}")))?;
            }
            for e in ends {
                w.rhs_alpha[e.k] = e.rotational_target(h)? - m.row_dot(e.k, &w.alpha);
            }
            let norm = max_norm(&w.rhs_alpha);
            let bound = newton.tolerance * max_norm(&w.alpha_pts).max(1.0);
            if stats.newton_iterations >= 1 && norm <= bound {
                return Ok(stats);
            }
            if stats.newton_iterations >= newton.max_iterations {
                return Err(Error::NewtonFailed { iterations: stats.newton_iterations, residual: norm });
            }
            stats.corrector_passes += multicorrector_solve(m, &w.rhs_alpha, &mc, &mut w.delta, &mut w.scratch)?;
            for (a, d) in w.alpha.iter_mut().zip(&w.delta) {
                *a += d;
            }
            stats.newton_iterations += 1;
        }
    }

    /// Coupled Newton solve; unknowns interleaved per control point as
    /// `[ǎ_j, α̌_j]`.
    fn solve_coupled(&mut self, model: &BeamModel, state: &KinematicState, ends: &[EndData; 2], h: f64) -> Result<StepStats> {
        let n = model.num_points();
        let ops = &model.disc.ops;
        let newton = self.settings.newton;
        let js = self.inertia_scale;
        let (kl0, ku0) = self.point_band;
        let mut stats = StepStats::default();
        let w = &mut self.work;

        // Boundary rows: D0 (Dirichlet) or scaled, fully coupled Neumann rows
        //   s (D1 a + ψ2⁻¹ψ1 D0 α) and s (D1 α + χ2⁻¹χ1 D0 α).
        struct Row {
            k: usize,
            trans: Option<Mat3>,
            rot: Option<Mat3>,
            scale: f64,
            trans_rhs: Vec3,
            rot_rhs: Vec3,
        }
        let mut rows = Vec::with_capacity(2);
        for e in ends {
            let o = &e.ops;
            let (trans, trans_rhs) = match e.cond.translation {
                Constraint::Dirichlet => (None, -e.vp / h),
                Constraint::Neumann => {
                    let inv = inverse(&o.psi2, "boundary force operator")?;
                    let p = inv * o.psi1;
                    (Some(p), (inv * o.psi_bar / (h * h) - (p * e.wp + e.vp_s) / h) * e.scale)
                }
            };
            let (rot, rot_rhs) = match e.cond.rotation {
                Constraint::Dirichlet => (None, -e.wp / h),
                Constraint::Neumann => {
                    let inv = inverse(&o.chi2, "boundary moment operator")?;
                    let q = inv * o.chi1;
                    (Some(q), (inv * o.chi_bar / (h * h) - (q * e.wp + e.wp_s) / h) * e.scale)
                }
            };
            rows.push(Row { k: e.k, trans, rot, scale: e.scale, trans_rhs, rot_rhs });
        }

        w.a.copy_from_slice(&state.acceleration);
        w.alpha.copy_from_slice(&state.angular_acceleration);
        let dim = 6 * n;
        let mut residual = vec![0.0; dim];
        loop {
            ops.d0.apply(&w.alpha, &mut w.alpha_pts);
            // Raw residual R and its acceleration-unit measure.
            let mut norm: f64 = 0.0;
            let put = |residual: &mut [f64], base: usize, v: Vec3| {
                residual[base..base + 3].copy_from_slice(v.as_slice());
            };
            for i in 1..n - 1 {
                let ra = ops.d0.row_dot(i, &w.a) - w.rhs_a[i];
                let j = &self.fields.inertia[i];
                let r = rotational_residual(j, &w.alpha_pts[i], &w.wp_pts[i], &w.chi[i], h);
                let t = rotational_tangent(j, &w.alpha_pts[i], &w.wp_pts[i], h);
                let scaled = t.lu().solve(&r).ok_or_else(|| Error::Singular(format!("rotational tangent at point {i}")))?;
                norm = norm.max(ra.amax()).max(scaled.amax());
                put(&mut residual, 6 * i, ra);
                put(&mut residual, 6 * i + 3, r * js);
            }
            for row in &rows {
                let k = row.k;
                let a0 = ops.d0.row_dot(k, &w.a);
                let al0 = w.alpha_pts[k];
                let rt = match row.trans {
                    None => a0 - row.trans_rhs,
                    Some(p) => (ops.d1.row_dot(k, &w.a) + p * al0) * row.scale - row.trans_rhs,
                };
                let rr = match row.rot {
                    None => al0 - row.rot_rhs,
                    Some(q) => (ops.d1.row_dot(k, &w.alpha) + q * al0) * row.scale - row.rot_rhs,
                };
                norm = norm.max(rt.amax()).max(rr.amax());
                put(&mut residual, 6 * k, rt);
                put(&mut residual, 6 * k + 3, rr);
            }
            let bound = newton.tolerance * max_norm(&w.alpha_pts).max(max_norm(&w.a)).max(1.0);
            if stats.newton_iterations >= 1 && norm <= bound {
                return Ok(stats);
            }
            if stats.newton_iterations >= newton.max_iterations {
                return Err(Error::NewtonFailed { iterations: stats.newton_iterations, residual: norm });
            }

            let mut jac = BandedMatrix::zeros(dim, 6 * kl0 + 5, 6 * ku0 + 5);
            for i in 1..n - 1 {
                let (s, d0) = ops.d0.row(i);
                let t = rotational_tangent(&self.fields.inertia[i], &w.alpha_pts[i], &w.wp_pts[i], h) * js;
                for (off, &b) in d0.iter().enumerate() {
                    if b == 0.0 {
                        continue;
                    }
                    let col = 6 * (s + off);
                    for c in 0..3 {
                        jac.add(6 * i + c, col + c, b);
                        for d in 0..3 {
                            jac.add(6 * i + 3 + c, col + 3 + d, t[(c, d)] * b);
                        }
                    }
                }
            }
            for row in &rows {
                let k = row.k;
                let (s, d0) = ops.d0.row(k);
                let (s1, d1) = ops.d1.row(k);
                debug_assert_eq!(s, s1);
                for off in 0..d0.len() {
                    let col = 6 * (s + off);
                    let (b0, b1) = (d0[off], d1[off] * row.scale);
                    for c in 0..3 {
                        match row.trans {
                            None => jac.add(6 * k + c, col + c, b0),
                            Some(p) => {
                                jac.add(6 * k + c, col + c, b1);
                                for d in 0..3 {
                                    jac.add(6 * k + c, col + 3 + d, p[(c, d)] * b0 * row.scale);
                                }
                            }
                        }
                        match row.rot {
                            None => jac.add(6 * k + 3 + c, col + 3 + c, b0),
                            Some(q) => {
                                jac.add(6 * k + 3 + c, col + 3 + c, b1);
                                for d in 0..3 {
                                    jac.add(6 * k + 3 + c, col + 3 + d, q[(c, d)] * b0 * row.scale);
                                }
                            }
                        }
                    }
                }
            }
            let lu = jac.factor()?;
            residual.iter_mut().for_each(|x| *x = -*x);
            lu.solve_in_place(&mut residual);
            for j in 0..n {
                w.a[j] += Vec3::from_column_slice(&residual[6 * j..6 * j + 3]);
                w.alpha[j] += Vec3::from_column_slice(&residual[6 * j + 3..6 * j + 6]);
            }
            stats.newton_iterations += 1;
        }
    }
}
