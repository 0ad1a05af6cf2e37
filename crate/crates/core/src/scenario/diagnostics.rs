//! Field sampling, momenta by quadrature, error norms and rate fits.

use crate::beam::{spatial_inertia, BeamModel};
use crate::error::Result;
use crate::integrator::KinematicState;
use crate::rot3::Vec3;
use crate::spline::SplineSpace;

/// 8-point Gauss–Legendre rule on [−1, 1]; exact to degree 15, enough for
/// products of two degree-7 fields.
const GAUSS_NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GAUSS_WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// `count` equally spaced parameters covering [0, 1].
pub fn uniform_grid(count: usize) -> Vec<f64> {
    let last = (count.max(2) - 1) as f64;
    (0..count).map(|k| k as f64 / last).collect()
}

pub fn sample_field(space: &SplineSpace, controls: &[Vec3], us: &[f64]) -> Result<Vec<Vec3>> {
    us.iter().map(|u| space.eval_field(controls, *u, 0)).collect()
}

/// Quadrature points `(u, weight · ds/du)` covering every knot span.
fn quadrature(space: &SplineSpace, reference: &[Vec3]) -> Result<Vec<(f64, f64)>> {
    let knots = space.knots();
    let mut out = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (x, wt) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            for u in [mid - half * x, mid + half * x] {
                let jac = space.eval_field(reference, u, 1)?.norm();
                out.push((u, wt * half * jac));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Momentum {
    pub mass: f64,
    pub mass_center: Vec3,
    /// `∫ μ v ds`.
    pub linear: Vec3,
    /// `∫ (c − c_G) × μ v + j ω ds`.
    pub angular: Vec3,
}

/// Momenta of the interpolated velocity fields. The spin density `j ω` is
/// formed at the collocation points and interpolated like the other fields.
pub fn momentum(model: &BeamModel, state: &KinematicState) -> Result<Momentum> {
    let disc = &model.disc;
    let mu = model.section.mass_per_length;
    let inertia = model.section.inertia();
    let n = model.num_points();
    let spin_points: Vec<Vec3> = (0..n)
        .map(|i| spatial_inertia(&state.rotations[i], &inertia) * disc.ops.d0.row_dot(i, &state.angular_velocity))
        .collect();
    let mut spin = vec![Vec3::zeros(); n];
    disc.fit.interpolate(&spin_points, &mut spin);

    let (mut mass, mut first, mut linear, mut angular) = (0.0, Vec3::zeros(), Vec3::zeros(), Vec3::zeros());
    for (u, w) in quadrature(&disc.space, &model.reference.centroid)? {
        let c = disc.space.eval_field(&state.centroid, u, 0)?;
        let v = disc.space.eval_field(&state.velocity, u, 0)?;
        let s = disc.space.eval_field(&spin, u, 0)?;
        mass += w * mu;
        first += c * (w * mu);
        linear += v * (w * mu);
        angular += (c.cross(&v) * mu + s) * w;
    }
    let mass_center = first / mass;
    Ok(Momentum { mass, mass_center, linear, angular: angular - mass_center.cross(&linear) })
}

/// `‖a − r‖ / ‖r‖` in L2 over equally spaced samples (trapezoidal weights).
pub fn relative_l2_error(approx: &[Vec3], reference: &[Vec3]) -> f64 {
    assert_eq!(approx.len(), reference.len());
    let m = reference.len();
    let weight = |k: usize| if k == 0 || k + 1 == m { 0.5 } else { 1.0 };
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..m {
        num += weight(k) * (approx[k] - reference[k]).norm_squared();
        den += weight(k) * reference[k].norm_squared();
    }
    if den == 0.0 {
        return if num == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (num / den).sqrt()
}

/// Negated least-squares slope of `log e` against `log x`.
pub fn fitted_rate(x: &[f64], e: &[f64]) -> f64 {
    assert_eq!(x.len(), e.len());
    let pts: Vec<(f64, f64)> = x.iter().zip(e).map(|(x, e)| (x.ln(), e.ln())).collect();
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    -sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{apply_initial_conditions, InitialAngularVelocity, InitialConditions, InitialVelocity};
    use crate::scenario::presets;
    use proptest::prelude::*;

    #[test]
    fn gauss_rule_integrates_degree_fifteen() {
        let total: f64 = GAUSS_NODES
            .iter()
            .zip(GAUSS_WEIGHTS)
            .map(|(x, w)| w * (x.powi(14) + (-x).powi(14) + x.powi(15) + (-x).powi(15)))
            .sum();
        assert!((total - 2.0 / 15.0).abs() < 1e-15);
        assert!((GAUSS_WEIGHTS.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    /// Rigid spin `ω` about the pivot at the start of a uniform 10 m beam:
    /// `P = m ω × (c_G − o)`, `H_G = (m L²/12) ω_⊥ + J_total ω`.
    #[test]
    fn rigid_motion_momenta_in_closed_form() {
        let config = presets::flying_beam();
        let parts = config.build().unwrap();
        let model = &parts.model;
        let w = [0.3, -0.2, 0.5];
        let o = [6.0, 0.0, 0.0];
        let ic = InitialConditions {
            velocity: InitialVelocity::RigidSpin { omega: w, pivot: o },
            angular_velocity: InitialAngularVelocity::Uniform { value: w },
        };
        let state = apply_initial_conditions(model, &ic).unwrap();
        let m = momentum(model, &state).unwrap();
        assert!((m.mass - 10.0).abs() < 1e-12);
        let centre = Vec3::new(3.0, 4.0, 0.0);
        assert!((m.mass_center - centre).amax() < 1e-12);
        let w = Vec3::from(w);
        let p = w.cross(&(centre - Vec3::from(o))) * 10.0;
        assert!((m.linear - p).amax() < 1e-11);
        let axis = Vec3::new(-0.6, 0.8, 0.0);
        let perp = w - axis * axis.dot(&w);
        let h = perp * (10.0 * 100.0 / 12.0) + w * 100.0;
        assert!((m.angular - h).amax() < 1e-10, "{} vs {h}", m.angular);
    }

    #[test]
    fn error_of_identical_fields_is_zero() {
        let r: Vec<Vec3> = uniform_grid(201).iter().map(|u| Vec3::new(u.sin(), 1.0, *u)).collect();
        assert_eq!(relative_l2_error(&r, &r), 0.0);
        let shifted: Vec<Vec3> = r.iter().map(|x| x * 1.01).collect();
        assert!((relative_l2_error(&shifted, &r) - 0.01).abs() < 1e-12);
    }

    #[test]
    fn uniform_grid_endpoints() {
        let g = uniform_grid(201);
        assert_eq!((g[0], g[100], g[200]), (0.0, 0.5, 1.0));
    }

    proptest! {
        #[test]
        fn rate_of_a_power_law_is_its_exponent(rate in 0.5f64..8.0, scale in 1e-6f64..1e3) {
            let x = [11.0f64, 21.0, 41.0, 61.0];
            let e: Vec<f64> = x.iter().map(|n| scale * n.powf(-rate)).collect();
            prop_assert!((fitted_rate(&x, &e) - rate).abs() < 1e-9);
        }
    }
}
