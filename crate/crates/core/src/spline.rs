//! B-spline / NURBS spaces on open knot vectors over `[0, 1]`, Greville
//! collocation points and the collocation operators `D0`, `D1`, `D2`.
//!
//! Basis evaluation follows the Cox–de Boor recurrence with the classical
//! derivative algorithm; rational weights are applied afterwards with the
//! quotient rule.

use nalgebra::{DMatrix, Vector3};

use crate::error::{Error, Result};

const KNOT_EPS: f64 = 1e-14;

/// Build an open knot vector with uniformly spaced interior knots.
pub fn make_open_uniform_knots(degree: usize, num_basis: usize) -> Result<Vec<f64>> {
    if degree < 1 {
        return Err(Error::InvalidSpace("degree must be at least 1".into()));
    }
    if num_basis < degree + 1 {
        return Err(Error::InvalidSpace(format!(
            "{num_basis} basis functions cannot carry degree {degree} (need at least {})",
            degree + 1
        )));
    }
    let interior = num_basis - degree - 1;
    let mut knots = Vec::with_capacity(num_basis + degree + 1);
    knots.extend(std::iter::repeat_n(0.0, degree + 1));
    for k in 1..=interior {
        knots.push(k as f64 / (interior + 1) as f64);
    }
    knots.extend(std::iter::repeat_n(1.0, degree + 1));
    Ok(knots)
}

/// A spline space of degree `p` on an open knot vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpace {
    degree: usize,
    knots: Vec<f64>,
    weights: Option<Vec<f64>>,
}

/// Nonzero basis functions at one parameter value.
///
/// `values[k][j]` is the `k`-th derivative of basis function `first + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEval {
    pub first: usize,
    pub values: Vec<Vec<f64>>,
}

impl SplineSpace {
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self> {
        let space = Self { degree, knots, weights: None };
        space.validate()?;
        Ok(space)
    }

    /// Open uniform B-spline space with `num_basis` functions.
    pub fn open_uniform(degree: usize, num_basis: usize) -> Result<Self> {
        Self::new(degree, make_open_uniform_knots(degree, num_basis)?)
    }

    /// Attach NURBS weights (one per basis function, strictly positive).
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.num_basis() {
            return Err(Error::InvalidSpace(format!(
                "expected {} weights, got {}",
                self.num_basis(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidSpace("weights must be strictly positive".into()));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let p = self.degree;
        let k = &self.knots;
        if p < 1 {
            return Err(Error::InvalidSpace("degree must be at least 1".into()));
        }
        if k.len() < 2 * (p + 1) {
            return Err(Error::InvalidSpace(format!(
                "knot vector of length {} too short for degree {p}",
                k.len()
            )));
        }
        if k.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidSpace("knot vector must be non-decreasing".into()));
        }
        if k.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidSpace("knots must lie in [0, 1]".into()));
        }
        let open_start = k[..=p].iter().all(|x| *x == 0.0) && k[p + 1] > 0.0;
        let open_end = k[k.len() - p - 1..].iter().all(|x| *x == 1.0) && k[k.len() - p - 2] < 1.0;
        if !open_start || !open_end {
            return Err(Error::InvalidSpace(format!(
                "knot vector must be open: end multiplicity exactly {}",
                p + 1
            )));
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Knot span index `k` with `knots[k] <= u < knots[k+1]`; the last
    /// non-degenerate span for `u == 1`.
    fn find_span(&self, u: f64) -> usize {
        let n = self.num_basis() - 1;
        let k = &self.knots;
        if u >= k[n + 1] {
            return n;
        }
        let (mut lo, mut hi) = (self.degree, n + 1);
        let mut mid = (lo + hi) / 2;
        while u < k[mid] || u >= k[mid + 1] {
            if u < k[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
            mid = (lo + hi) / 2;
        }
        mid
    }

    /// Values and derivatives up to `max_derivative` (at most 2) of the
    /// `p + 1` basis functions that may be nonzero at `u`.
    pub fn eval_basis(&self, u: f64, max_derivative: usize) -> Result<BasisEval> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfDomain(u));
        }
        if max_derivative > 2 {
            return Err(Error::InvalidSpace(format!(
                "derivative order {max_derivative} not supported (max 2)"
            )));
        }
        let span = self.find_span(u);
        let mut values = self.ders_basis(span, u, max_derivative);
        let first = span - self.degree;
        if let Some(w) = &self.weights {
            rationalize(&mut values, &w[first..=span]);
        }
        Ok(BasisEval { first, values })
    }

    fn ders_basis(&self, span: usize, u: f64, nd: usize) -> Vec<Vec<f64>> {
        let p = self.degree;
        let k = &self.knots;
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = u - k[span + 1 - j];
            right[j] = k[span + j] - u;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let mut ders = vec![vec![0.0; p + 1]; nd + 1];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let mut a = [vec![0.0; p + 1], vec![0.0; p + 1]];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = 1.0;
            for kk in 1..=nd.min(p) {
                let mut d = 0.0;
                let rk = r as isize - kk as isize;
                let pk = p - kk;
                if r >= kk {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if (r as isize - 1) <= pk as isize { kk - 1 } else { p - r };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    d += a[s2][j] * ndu[idx][pk];
                }
                if r as isize <= pk as isize {
                    a[s2][kk] = -a[s1][kk - 1] / ndu[pk + 1][r];
                    d += a[s2][kk] * ndu[r][pk];
                }
                ders[kk][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut factor = p as f64;
        for (kk, row) in ders.iter_mut().enumerate().skip(1) {
            for v in row.iter_mut() {
                *v *= factor;
            }
            factor *= p.saturating_sub(kk) as f64;
        }
        ders
    }

    /// Greville abscissae `(ξ_{j+1} + … + ξ_{j+p}) / p`, one per basis function.
    pub fn greville_abscissae(&self) -> CollocationGrid {
        let p = self.degree;
        let points = (0..self.num_basis())
            .map(|j| self.knots[j + 1..=j + p].iter().sum::<f64>() / p as f64)
            .collect();
        CollocationGrid { points }
    }

    /// Evaluate a vector field from its control values at `u`.
    pub fn eval_field(&self, controls: &[Vector3<f64>], u: f64, derivative: usize) -> Result<Vector3<f64>> {
        let b = self.eval_basis(u, derivative)?;
        Ok(b.values[derivative]
            .iter()
            .enumerate()
            .fold(Vector3::zeros(), |acc, (j, r)| acc + controls[b.first + j] * *r))
    }
}

fn rationalize(values: &mut [Vec<f64>], weights: &[f64]) {
    let nd = values.len() - 1;
    let wsum: Vec<f64> = (0..=nd)
        .map(|k| values[k].iter().zip(weights).map(|(n, w)| n * w).sum())
        .collect();
    let m = values[0].len();
    let mut out = vec![vec![0.0; m]; nd + 1];
    for j in 0..m {
        out[0][j] = values[0][j] * weights[j] / wsum[0];
        if nd >= 1 {
            out[1][j] = (values[1][j] * weights[j] - out[0][j] * wsum[1]) / wsum[0];
        }
        if nd >= 2 {
            out[2][j] = (values[2][j] * weights[j] - 2.0 * out[1][j] * wsum[1] - out[0][j] * wsum[2])
                / wsum[0];
        }
    }
    values.iter_mut().zip(out).for_each(|(v, o)| *v = o);
}

/// Collocation abscissae `u^c_i`, strictly increasing in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    pub points: Vec<f64>,
}

impl CollocationGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Row-banded matrix: each row stores a contiguous run of `width` entries
/// starting at column `starts[i]`. Collocation operators and the lumped
/// mass blocks all have this shape.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedRows {
    ncols: usize,
    width: usize,
    starts: Vec<usize>,
    values: Vec<f64>,
}

impl BandedRows {
    pub fn new(ncols: usize, width: usize, starts: Vec<usize>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), starts.len() * width);
        assert!(starts.iter().all(|s| s + width <= ncols));
        Self { ncols, width, starts, values }
    }

    pub fn nrows(&self) -> usize {
        self.starts.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `(first column, values)` of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (usize, &[f64]) {
        (self.starts[i], &self.values[i * self.width..(i + 1) * self.width])
    }

    pub fn row_mut(&mut self, i: usize) -> (usize, &mut [f64]) {
        (self.starts[i], &mut self.values[i * self.width..(i + 1) * self.width])
    }

    pub fn replace_row(&mut self, i: usize, start: usize, values: &[f64]) {
        assert_eq!(values.len(), self.width);
        self.starts[i] = start;
        self.values[i * self.width..(i + 1) * self.width].copy_from_slice(values);
    }

    /// Entry `(i, j)`, zero outside the stored band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (s, v) = self.row(i);
        if j >= s && j < s + self.width {
            v[j - s]
        } else {
            0.0
        }
    }

    #[inline]
    pub fn row_dot(&self, i: usize, x: &[Vector3<f64>]) -> Vector3<f64> {
        let (s, v) = self.row(i);
        let mut acc = Vector3::zeros();
        for (r, xj) in v.iter().zip(&x[s..s + self.width]) {
            acc += xj * *r;
        }
        acc
    }

    #[inline]
    pub fn row_dot_scalar(&self, i: usize, x: &[f64]) -> f64 {
        let (s, v) = self.row(i);
        v.iter().zip(&x[s..s + self.width]).map(|(a, b)| a * b).sum()
    }

    /// `y = A x` applied blockwise to 3-vectors.
    pub fn apply(&self, x: &[Vector3<f64>], y: &mut [Vector3<f64>]) {
        debug_assert_eq!(x.len(), self.ncols);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row_dot(i, x);
        }
    }

    pub fn apply_scalar(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row_dot_scalar(i, x);
        }
    }

    /// Lower and upper bandwidths `(kl, ku)` of the stored pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        self.starts.iter().enumerate().fold((0, 0), |(kl, ku), (i, &s)| {
            let last = s + self.width - 1;
            (kl.max(i.saturating_sub(s)), ku.max(last.saturating_sub(i)))
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows(), self.ncols);
        for i in 0..self.nrows() {
            let (s, v) = self.row(i);
            for (k, x) in v.iter().enumerate() {
                m[(i, s + k)] = *x;
            }
        }
        m
    }
}

/// Map from the parametric coordinate `u` to arc length `s` of the
/// reference centroid line.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceJacobian {
    /// Straight reference: `ds/du = L` everywhere.
    Constant(f64),
    /// Curved reference: `ds/du` and `d²s/du²` at each collocation point.
    PerPoint { jacobian: Vec<f64>, derivative: Vec<f64> },
}

impl ReferenceJacobian {
    /// Jacobian data of the reference centroid given by its control points.
    pub fn from_reference_controls(
        space: &SplineSpace,
        grid: &CollocationGrid,
        controls: &[Vector3<f64>],
    ) -> Result<Self> {
        let mut jacobian = Vec::with_capacity(grid.len());
        let mut derivative = Vec::with_capacity(grid.len());
        for &u in &grid.points {
            let d1 = space.eval_field(controls, u, 1)?;
            let d2 = space.eval_field(controls, u, 2)?;
            let j = d1.norm();
            if !(j > 0.0) {
                return Err(Error::SingularJacobian { u });
            }
            jacobian.push(j);
            derivative.push(d1.dot(&d2) / j);
        }
        Ok(Self::PerPoint { jacobian, derivative })
    }

    fn at(&self, i: usize) -> (f64, f64) {
        match self {
            Self::Constant(l) => (*l, 0.0),
            Self::PerPoint { jacobian, derivative } => (jacobian[i], derivative[i]),
        }
    }
}

/// `D0`, `D1`, `D2`: basis values and arc-length derivatives at the
/// collocation points, one row per point.
#[derive(Debug, Clone)]
pub struct CollocationOperators {
    pub d0: BandedRows,
    pub d1: BandedRows,
    pub d2: BandedRows,
    pub jacobian: ReferenceJacobian,
}

impl CollocationOperators {
    pub fn new(space: &SplineSpace, grid: &CollocationGrid, jacobian: ReferenceJacobian) -> Result<Self> {
        let nb = space.num_basis();
        let width = space.degree() + 1;
        if grid.len() != nb {
            return Err(Error::InvalidSpace(format!(
                "grid has {} points for {nb} basis functions",
                grid.len()
            )));
        }
        if let ReferenceJacobian::PerPoint { jacobian, derivative } = &jacobian {
            if jacobian.len() != nb || derivative.len() != nb {
                return Err(Error::InvalidSpace("jacobian data does not match grid".into()));
            }
        }
        let mut starts = Vec::with_capacity(nb);
        let (mut v0, mut v1, mut v2) = (
            Vec::with_capacity(nb * width),
            Vec::with_capacity(nb * width),
            Vec::with_capacity(nb * width),
        );
        for (i, &u) in grid.points.iter().enumerate() {
            let (jac, djac) = jacobian.at(i);
            if !(jac.abs() > KNOT_EPS) || !jac.is_finite() {
                return Err(Error::SingularJacobian { u });
            }
            let b = space.eval_basis(u, 2)?;
            starts.push(b.first);
            v0.extend_from_slice(&b.values[0]);
            v1.extend(b.values[1].iter().map(|d| d / jac));
            v2.extend(
                b.values[2]
                    .iter()
                    .zip(&b.values[1])
                    .map(|(dd, d)| dd / (jac * jac) - djac * d / (jac * jac * jac)),
            );
        }
        Ok(Self {
            d0: BandedRows::new(nb, width, starts.clone(), v0),
            d1: BandedRows::new(nb, width, starts.clone(), v1),
            d2: BandedRows::new(nb, width, starts, v2),
            jacobian,
        })
    }

    pub fn len(&self) -> usize {
        self.d0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.d0.nrows() == 0
    }
}
