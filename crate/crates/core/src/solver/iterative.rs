//! Predictor–multicorrector fixed-point solves and the spectral radius of
//! their iteration matrix.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rot3::Vec3;
use crate::spline::BandedRows;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MulticorrectorSettings {
    /// Pass cap `r` (exact pass count when `tolerance` is `None`).
    pub max_passes: usize,
    /// Early exit once `‖b − Mx‖∞ ≤ tolerance · ‖b‖∞`.
    pub tolerance: Option<f64>,
}

impl Default for MulticorrectorSettings {
    fn default() -> Self {
        Self { max_passes: 30, tolerance: Some(1e-10) }
    }
}

impl MulticorrectorSettings {
    pub fn fixed(passes: usize) -> Self {
        Self { max_passes: passes, tolerance: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_passes == 0 {
            return Err(Error::Config("multicorrector needs at least one pass".into()));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(Error::Config("multicorrector tolerance must be positive".into()));
            }
        }
        Ok(())
    }
}

fn max_norm(v: &[Vec3]) -> f64 {
    v.iter().map(|x| x.amax()).fold(0.0, f64::max)
}

/// Solve `M x = b` by `x⁰ = 0`, `xⁱ⁺¹ = xⁱ + (b − M xⁱ)`; returns the
/// number of passes. `residual` is scratch of the same length.
pub fn multicorrector_solve(
    m: &BandedRows,
    b: &[Vec3],
    settings: &MulticorrectorSettings,
    x: &mut [Vec3],
    residual: &mut [Vec3],
) -> Result<usize> {
    x.iter_mut().for_each(|v| *v = Vec3::zeros());
    let b_norm = max_norm(b);
    if b_norm == 0.0 {
        return Ok(0);
    }
    residual.copy_from_slice(b);
    let mut last = b_norm;
    let mut growth = 0;
    let mut passes = 0;
    loop {
        for (xi, ri) in x.iter_mut().zip(residual.iter()) {
            *xi += ri;
        }
        passes += 1;
        let need_residual = passes < settings.max_passes || settings.tolerance.is_some();
        if !need_residual {
            return Ok(passes);
        }
        m.apply(x, residual);
        for (ri, bi) in residual.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        let norm = max_norm(residual);
        if settings.tolerance.is_some_and(|t| norm <= t * b_norm) || norm == 0.0 {
            return Ok(passes);
        }
        if passes >= settings.max_passes {
            return Ok(passes);
        }
        growth = if norm > last { growth + 1 } else { 0 };
        if growth >= 3 && norm > b_norm {
            return Err(Error::Diverged { pass: passes });
        }
        last = norm;
    }
}

/// Relative change below which the power iteration stops.
pub const SPECTRAL_TOLERANCE: f64 = 1e-10;
const SPECTRAL_CAP: usize = 200_000;
const BLOCK: usize = 8;

/// `ρ(M − I)` by block power iteration.
///
/// A block of up to eight vectors is pushed through `A = M − I` and
/// re-orthonormalized; the estimate is the largest Ritz value modulus on
/// the block. A single vector would stall on dominant `±λ` or complex
/// pairs, which collocation mass blocks do have. Stops once the estimate
/// changes by less than [`SPECTRAL_TOLERANCE`] (relative) on three
/// consecutive iterations.
pub fn spectral_radius(m: &BandedRows) -> Result<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "spectral radius of a non-square matrix");
    let b = BLOCK.min(n);
    let apply = |v: &DMatrix<f64>| -> DMatrix<f64> {
        let mut out = DMatrix::zeros(n, v.ncols());
        let mut y = vec![0.0; n];
        for c in 0..v.ncols() {
            let x: Vec<f64> = v.column(c).iter().copied().collect();
            m.apply_scalar(&x, &mut y);
            for i in 0..n {
                out[(i, c)] = y[i] - x[i];
            }
        }
        out
    };
    // Deterministic, generic start block.
    let mut v = DMatrix::from_fn(n, b, |i, c| 1.0 + 0.5 * (1.3 * i as f64 + 0.7 + 2.1 * c as f64).sin() + (c * i) as f64 * 1e-3);
    v = v.qr().q();
    let mut prev = f64::NAN;
    let mut settled = 0;
    for _ in 0..SPECTRAL_CAP {
        let w = apply(&v);
        if w.amax() == 0.0 {
            return Ok(0.0);
        }
        let h = v.transpose() * &w;
        let est = h.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        v = w.qr().q();
        if (est - prev).abs() <= SPECTRAL_TOLERANCE * est {
            settled += 1;
            if settled >= 3 {
                return Ok(est);
            }
        } else {
            settled = 0;
        }
        prev = est;
    }
    Err(Error::NoConvergence { iterations: SPECTRAL_CAP })
}
