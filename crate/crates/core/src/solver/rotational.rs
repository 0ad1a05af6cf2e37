//! Pointwise rotational balance `j α + ω × j ω = χ` at `ω = ω_p + (h/2) α`.

use crate::rot3::{skew, Mat3, Vec3};

/// `r(α) = j α + w × (j w) − χ` with `w = ω_p + (h/2) α`.
pub fn rotational_residual(j: &Mat3, alpha: &Vec3, omega_p: &Vec3, chi: &Vec3, h: f64) -> Vec3 {
    let w = omega_p + alpha * (0.5 * h);
    j * alpha + w.cross(&(j * w)) - chi
}

/// `∂r/∂α = j + (h/2) [w̃ j − (j w)∼]`.
pub fn rotational_tangent(j: &Mat3, alpha: &Vec3, omega_p: &Vec3, h: f64) -> Mat3 {
    let w = omega_p + alpha * (0.5 * h);
    j + (skew(&w) * j - skew(&(j * w))) * (0.5 * h)
}

/// Linearized balance `[j + ((h/2) ω_p + (h²/4) α_old)∼ j] α
/// = χ − (ω_p + (h/2) α_old) × (j ω_p)`: returns the operator and the
/// right-hand side.
pub fn linearized_rotational_system(j: &Mat3, omega_p: &Vec3, alpha_old: &Vec3, chi: &Vec3, h: f64) -> (Mat3, Vec3) {
    let lag = omega_p * (0.5 * h) + alpha_old * (0.25 * h * h);
    let op = j + skew(&lag) * j;
    let rhs = chi - (omega_p + alpha_old * (0.5 * h)).cross(&(j * omega_p));
    (op, rhs)
}
