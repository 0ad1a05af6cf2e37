//! SO(3) kernel: skew/axial maps, the Rodrigues exponential, the
//! differential of the exponential and the multiplicative rotation update.

use nalgebra::{Matrix3, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Below this angle the closed forms switch to truncated Taylor series.
pub const SMALL_ANGLE: f64 = 1e-6;

/// Orthonormality drift `‖RᵀR − I‖∞` above which a rotation is projected
/// back onto SO(3).
pub const REORTHONORMALIZE_TOL: f64 = 1e-9;

/// Skew-symmetric matrix with `skew(a) h = a × h`.
#[inline]
pub fn skew(a: &Vec3) -> Mat3 {
    Mat3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Axial vector of the skew-symmetric part of `m`.
#[inline]
pub fn axial(m: &Mat3) -> Vec3 {
    Vec3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]) * 0.5
}

/// Coefficients `(sin θ/θ, (1 − cos θ)/θ², (θ − sin θ)/θ³)` with series
/// fallbacks below [`SMALL_ANGLE`].
#[inline]
fn coefficients(theta_sq: f64) -> (f64, f64, f64) {
    if theta_sq < SMALL_ANGLE * SMALL_ANGLE {
        let t2 = theta_sq;
        let t4 = t2 * t2;
        let t6 = t4 * t2;
        (
            1.0 - t2 / 6.0 + t4 / 120.0 - t6 / 5040.0,
            0.5 - t2 / 24.0 + t4 / 720.0 - t6 / 40320.0,
            1.0 / 6.0 - t2 / 120.0 + t4 / 5040.0 - t6 / 362880.0,
        )
    } else {
        let theta = theta_sq.sqrt();
        let s = theta.sin();
        let half = (0.5 * theta).sin() / theta;
        (s / theta, 2.0 * half * half, (theta - s) / (theta_sq * theta))
    }
}

/// Rodrigues formula `exp(ϑ̃) = I + (sin θ/θ) ϑ̃ + ((1 − cos θ)/θ²) ϑ̃²`.
pub fn exp_so3(theta: &Vec3) -> Mat3 {
    let (a, b, _) = coefficients(theta.norm_squared());
    let k = skew(theta);
    Mat3::identity() + k * a + k * k * b
}

/// Differential of the exponential map,
/// `T(ϑ) = I + ((1 − cos θ)/θ²) ϑ̃ + ((θ − sin θ)/θ³) ϑ̃²`.
///
/// For a rotation-vector field `ϑ(s)`,
/// `∂s exp(ϑ̃) · exp(−ϑ̃) = (T(ϑ) ϑ,s)∼`.
pub fn dexp_so3(theta: &Vec3) -> Mat3 {
    let (_, b, c) = coefficients(theta.norm_squared());
    let k = skew(theta);
    Mat3::identity() + k * b + k * k * c
}

/// Directional derivative `dT(ϑ)[d]` of [`dexp_so3`] along `d`.
pub fn dexp_so3_derivative(theta: &Vec3, d: &Vec3) -> Mat3 {
    let t2 = theta.norm_squared();
    let (_, b, c) = coefficients(t2);
    // (db/dθ)/θ and (dc/dθ)/θ; the closed forms cancel badly for small θ.
    let (db, dc) = if t2 < 0.25 {
        let (t4, t6, t8) = (t2 * t2, t2 * t2 * t2, t2 * t2 * t2 * t2);
        (
            -1.0 / 12.0 + t2 / 180.0 - t4 / 6720.0 + t6 / 453600.0 - t8 / 47900160.0,
            -1.0 / 60.0 + t2 / 1260.0 - t4 / 60480.0 + t6 / 4989600.0 - t8 / 622702080.0,
        )
    } else {
        let th = t2.sqrt();
        let (s, co) = (th.sin(), th.cos());
        ((th * s - 2.0 * (1.0 - co)) / (t2 * t2), ((1.0 - co) * th - 3.0 * (th - s)) / (t2 * t2 * th))
    };
    let k = skew(theta);
    let kd = skew(d);
    let td = theta.dot(d);
    k * (db * td) + kd * b + k * k * (dc * td) + (kd * k + k * kd) * c
}

/// `‖RᵀR − I‖∞` (max absolute entry).
pub fn orthonormality_error(r: &Mat3) -> f64 {
    (r.transpose() * r - Mat3::identity()).amax()
}

/// Closest rotation in the Frobenius sense (polar factor).
pub fn project_to_so3(r: &Mat3) -> Mat3 {
    let svd = r.svd(true, true);
    let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let mut q = u * vt;
    if q.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        q = u * vt;
    }
    q
}

/// A finite rotation: orthonormal with unit determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Mat3);

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Rotation {
    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    pub fn exp(theta: &Vec3) -> Self {
        Self(exp_so3(theta))
    }

    /// Wrap a matrix, projecting onto SO(3) if it has drifted.
    pub fn from_matrix(m: Mat3) -> Self {
        if orthonormality_error(&m) > REORTHONORMALIZE_TOL {
            Self(project_to_so3(&m))
        } else {
            Self(m)
        }
    }

    #[inline]
    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Left (spatial) update `exp(ϑ̃) R`.
    pub fn updated(&self, theta: &Vec3) -> Self {
        Self::from_matrix(exp_so3(theta) * self.0)
    }

    pub fn orthonormality_error(&self) -> f64 {
        orthonormality_error(&self.0)
    }

    #[inline]
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    #[inline]
    pub fn apply_transpose(&self, v: &Vec3) -> Vec3 {
        self.0.tr_mul(v)
    }
}

impl std::ops::Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

/// `Rⁿ = exp(ϑ̃) Rⁿ⁻¹`.
pub fn update_rotation(previous: &Rotation, theta: &Vec3) -> Rotation {
    previous.updated(theta)
}
