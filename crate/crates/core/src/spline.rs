//! Classical piecewise-cubic interpolants.
//!
//! [`SplineModel`] is the cubic Hermite interpolant written in the local
//! Bernstein-like form
//!
//! ```text
//! S(x) = Ū(1-z)³ + V̄ z(1-z)² + W̄ z²(1-z) + X̄ z³,   z = (x - x_s)/(x_{s+1} - x_s)
//! Ū = y_s,  V̄ = 3y_s + h_s d_s,  W̄ = 3y_{s+1} - h_s d_{s+1},  X̄ = y_{s+1}
//! ```
//!
//! where `d` are the knot slopes. The slopes come from a [`DerivativeScheme`]
//! (natural spline by default). Linear and monotone (PCHIP) interpolants are
//! provided as timing baselines.

use serde::{Deserialize, Serialize};

use crate::data::{DataSet, Grid};
use crate::error::{Error, Result};

/// How knot slopes are obtained for the reference spline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeScheme {
    /// Weighted three-point differences, one-sided quadratic fits at the ends.
    ThreePoint,
    /// Slopes of the C² spline with `S''(x_1) = S''(x_M) = 0`.
    #[default]
    NaturalSpline,
}

impl std::str::FromStr for DerivativeScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "three_point" | "three-point" => Ok(Self::ThreePoint),
            "natural_spline" | "natural-spline" | "natural" => Ok(Self::NaturalSpline),
            other => Err(Error::InvalidInput(format!(
                "unknown derivative scheme '{other}'"
            ))),
        }
    }
}

pub fn estimate_derivatives(data: &DataSet, scheme: DerivativeScheme) -> Vec<f64> {
    match scheme {
        DerivativeScheme::ThreePoint => three_point_slopes(data.x(), data.y()),
        DerivativeScheme::NaturalSpline => natural_spline_slopes(data.x(), data.y()),
    }
}

fn three_point_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let (h0, h1) = (h[i - 1], h[i]);
        d[i] = -h1 / (h0 * (h0 + h1)) * y[i - 1]
            + (h1 - h0) / (h0 * h1) * y[i]
            + h0 / (h1 * (h0 + h1)) * y[i + 1];
    }
    // derivative of the quadratic through the three end points
    let (h0, h1) = (h[0], h[1]);
    d[0] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * y[0] + (h0 + h1) / (h0 * h1) * y[1]
        - h0 / (h1 * (h0 + h1)) * y[2];
    let (h0, h1) = (h[n - 2], h[n - 3]);
    d[n - 1] = (2.0 * h0 + h1) / (h0 * (h0 + h1)) * y[n - 1]
        - (h0 + h1) / (h0 * h1) * y[n - 2]
        + h0 / (h1 * (h0 + h1)) * y[n - 3];
    d
}

fn natural_spline_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let secant: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    diag[0] = 2.0;
    sup[0] = 1.0;
    rhs[0] = 3.0 * secant[0];
    for i in 1..n - 1 {
        sub[i] = h[i];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        sup[i] = h[i - 1];
        rhs[i] = 3.0 * (h[i] * secant[i - 1] + h[i - 1] * secant[i]);
    }
    sub[n - 1] = 1.0;
    diag[n - 1] = 2.0;
    rhs[n - 1] = 3.0 * secant[n - 2];
    solve_tridiagonal(&sub, &diag, &sup, &rhs)
}

/// Thomas algorithm. The natural-spline system is strictly diagonally dominant.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

/// Piecewise cubic Hermite interpolant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplineModel {
    data: DataSet,
    slopes: Vec<f64>,
    /// `[Ū, V̄, W̄, X̄]` per interval.
    coeffs: Vec<[f64; 4]>,
}

/// Sup-norms of the first two spline derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNorms {
    /// `max |S'|`
    pub k: f64,
    /// `max |S''|`
    pub c: f64,
}

impl SplineModel {
    pub fn new(data: DataSet, slopes: Vec<f64>) -> Result<Self> {
        if slopes.len() != data.len() {
            return Err(Error::InvalidInput(format!(
                "{} slopes for {} knots",
                slopes.len(),
                data.len()
            )));
        }
        if slopes.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidInput("non-finite slope".into()));
        }
        let (x, y) = (data.x(), data.y());
        let coeffs = (0..data.intervals())
            .map(|i| {
                let h = x[i + 1] - x[i];
                [
                    y[i],
                    3.0 * y[i] + h * slopes[i],
                    3.0 * y[i + 1] - h * slopes[i + 1],
                    y[i + 1],
                ]
            })
            .collect();
        Ok(Self {
            data,
            slopes,
            coeffs,
        })
    }

    pub fn with_scheme(data: DataSet, scheme: DerivativeScheme) -> Self {
        let slopes = estimate_derivatives(&data, scheme);
        Self::new(data, slopes).expect("estimated slopes match the data length")
    }

    pub fn data(&self) -> &DataSet {
        &self.data
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// `[Ū, V̄, W̄, X̄]` of interval `s`.
    pub fn coefficients(&self, s: usize) -> [f64; 4] {
        self.coeffs[s]
    }

    /// `S^{(order)}(x)` for `order` in `0..=2`.
    pub fn eval(&self, x: f64, order: usize) -> Result<f64> {
        let s = self.data.locate(x)?;
        Ok(self.eval_in(s, x, order))
    }

    /// Evaluates the cubic piece of interval `s` at `x`; one-sided at knots.
    pub fn eval_in(&self, s: usize, x: f64, order: usize) -> f64 {
        let xs = self.data.x();
        let h = xs[s + 1] - xs[s];
        let z = (x - xs[s]) / h;
        bernstein_cubic(&self.coeffs[s], z, order) / h.powi(order as i32)
    }

    /// Like [`eval`](Self::eval) but clamps `x` into the domain.
    pub(crate) fn eval_clamped(&self, x: f64, order: usize) -> f64 {
        let x = x.clamp(self.data.x_first(), self.data.x_last());
        self.eval_in(self.data.locate_unchecked(x), x, order)
    }

    /// Maxima of `|S'|` and `|S''|` over `grid` and both one-sided limits at every knot.
    pub fn sup_norms(&self, grid: &Grid) -> SupNorms {
        let mut k: f64 = 0.0;
        let mut c: f64 = 0.0;
        for &x in grid.points() {
            let x = x.clamp(self.data.x_first(), self.data.x_last());
            k = k.max(self.eval_clamped(x, 1).abs());
            c = c.max(self.eval_clamped(x, 2).abs());
        }
        let xs = self.data.x();
        for s in 0..self.data.intervals() {
            for x in [xs[s], xs[s + 1]] {
                k = k.max(self.eval_in(s, x, 1).abs());
                c = c.max(self.eval_in(s, x, 2).abs());
            }
        }
        SupNorms { k, c }
    }
}

/// `z`-derivative of order `order` of `U(1-z)³ + V z(1-z)² + W z²(1-z) + X z³`.
pub(crate) fn bernstein_cubic(c: &[f64; 4], z: f64, order: usize) -> f64 {
    let [u, v, w, x] = *c;
    match order {
        0 => {
            let r = 1.0 - z;
            u * r * r * r + v * z * r * r + w * z * z * r + x * z * z * z
        }
        _ => {
            // power basis p0 + p1 z + p2 z² + p3 z³
            let p1 = -3.0 * u + v;
            let p2 = 3.0 * u - 2.0 * v + w;
            let p3 = -u + v - w + x;
            match order {
                1 => p1 + z * (2.0 * p2 + 3.0 * p3 * z),
                2 => 2.0 * p2 + 6.0 * p3 * z,
                3 => 6.0 * p3,
                _ => 0.0,
            }
        }
    }
}

/// Baseline interpolant families used for timing comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Linear,
    Pchip,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Baseline {
    Linear(DataSet),
    /// Monotone cubic Hermite with Fritsch–Carlson limited slopes.
    Pchip(SplineModel),
}

impl Baseline {
    pub fn new(data: DataSet, kind: BaselineKind) -> Self {
        match kind {
            BaselineKind::Linear => Self::Linear(data),
            BaselineKind::Pchip => {
                let slopes = fritsch_carlson_slopes(data.x(), data.y());
                Self::Pchip(SplineModel::new(data, slopes).expect("slope count matches"))
            }
        }
    }

    pub fn kind(&self) -> BaselineKind {
        match self {
            Self::Linear(_) => BaselineKind::Linear,
            Self::Pchip(_) => BaselineKind::Pchip,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Self::Linear(data) => {
                let s = data.locate(x)?;
                let (xs, ys) = (data.x(), data.y());
                let t = (x - xs[s]) / (xs[s + 1] - xs[s]);
                Ok(ys[s] + t * (ys[s + 1] - ys[s]))
            }
            Self::Pchip(model) => model.eval(x, 0),
        }
    }
}

fn fritsch_carlson_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let secant: Vec<f64> = (0..n - 1)
        .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
        .collect();
    let mut m = vec![0.0; n];
    m[0] = secant[0];
    m[n - 1] = secant[n - 2];
    for i in 1..n - 1 {
        m[i] = if secant[i - 1] * secant[i] <= 0.0 {
            0.0
        } else {
            0.5 * (secant[i - 1] + secant[i])
        };
    }
    for i in 0..n - 1 {
        if secant[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let alpha = m[i] / secant[i];
        let beta = m[i + 1] / secant[i];
        let r = alpha.hypot(beta);
        if r > 3.0 {
            let tau = 3.0 / r;
            m[i] = tau * alpha * secant[i];
            m[i + 1] = tau * beta * secant[i];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_data() -> DataSet {
        DataSet::new(vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![1.0, 1.5, 2.0, 2.5, 3.0]).unwrap()
    }

    fn high_curvature() -> DataSet {
        DataSet::new(vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![0.0, 2.0, -1.0, 2.0, 0.0]).unwrap()
    }

    /// Dense Gaussian elimination with partial pivoting, independent of the Thomas solver.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    /// Natural spline through unit-spaced data, posed on the second-derivative
    /// unknowns `M_i` (a different formulation from the slope system).
    fn natural_slopes_oracle(y: &[f64]) -> Vec<f64> {
        let n = y.len();
        let mut a = vec![vec![0.0; n]; n];
        let mut b = vec![0.0; n];
        a[0][0] = 1.0;
        a[n - 1][n - 1] = 1.0;
        for i in 1..n - 1 {
            a[i][i - 1] = 1.0;
            a[i][i] = 4.0;
            a[i][i + 1] = 1.0;
            b[i] = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]);
        }
        let m = dense_solve(a, b);
        let mut d: Vec<f64> = (0..n - 1)
            .map(|i| (y[i + 1] - y[i]) - (2.0 * m[i] + m[i + 1]) / 6.0)
            .collect();
        d.push((y[n - 1] - y[n - 2]) + (m[n - 2] + 2.0 * m[n - 1]) / 6.0);
        d
    }

    #[test]
    fn linear_data_slopes_are_exact() {
        for scheme in [DerivativeScheme::ThreePoint, DerivativeScheme::NaturalSpline] {
            let d = estimate_derivatives(&linear_data(), scheme);
            for v in d {
                assert!((v - 0.5).abs() < 1e-14, "{scheme:?}: {v}");
            }
        }
    }

    #[test]
    fn three_point_exact_for_quadratic() {
        let data = DataSet::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        let d = estimate_derivatives(&data, DerivativeScheme::ThreePoint);
        assert!((d[1] - 2.0).abs() < 1e-14);
        assert!((d[0] - 0.0).abs() < 1e-14);
        assert!((d[2] - 4.0).abs() < 1e-14);
        // non-uniform spacing
        let x = vec![0.0, 0.3, 1.1, 1.2, 2.5];
        let y = x.iter().map(|v| 3.0 * v * v - v + 2.0).collect();
        let d = estimate_derivatives(&DataSet::new(x.clone(), y).unwrap(), DerivativeScheme::ThreePoint);
        for (xi, di) in x.iter().zip(d) {
            assert!((di - (6.0 * xi - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn natural_slopes_match_dense_oracle() {
        let y = [0.0, 2.0, -1.0, 2.0, 0.0];
        let oracle = natural_slopes_oracle(&y);
        // frozen from the oracle: 27/7, -12/7, 0, 12/7, -27/7
        let frozen = [27.0 / 7.0, -12.0 / 7.0, 0.0, 12.0 / 7.0, -27.0 / 7.0];
        for (o, f) in oracle.iter().zip(frozen) {
            assert!((o - f).abs() < 1e-13);
        }
        let d = estimate_derivatives(&high_curvature(), DerivativeScheme::NaturalSpline);
        for (di, f) in d.iter().zip(frozen) {
            assert!((di - f).abs() < 1e-13, "{d:?}");
        }
    }

    #[test]
    fn linear_reproduction() {
        let s = SplineModel::with_scheme(linear_data(), DerivativeScheme::NaturalSpline);
        assert!((s.eval(2.5, 0).unwrap() - 2.25).abs() < 1e-15);
        for x in [0.0, 0.3, 1.0, 2.7, 4.0] {
            assert!(s.eval(x, 2).unwrap().abs() < 1e-13);
            assert!((s.eval(x, 1).unwrap() - 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn knots_are_exact() {
        let data = high_curvature();
        for scheme in [DerivativeScheme::ThreePoint, DerivativeScheme::NaturalSpline] {
            let s = SplineModel::with_scheme(data.clone(), scheme);
            for (x, y) in data.x().iter().zip(data.y()) {
                assert_eq!(s.eval(*x, 0).unwrap(), *y);
            }
        }
    }

    #[test]
    fn coefficient_endpoints() {
        let s = SplineModel::with_scheme(high_curvature(), DerivativeScheme::NaturalSpline);
        let c = s.coefficients(1);
        assert_eq!(bernstein_cubic(&c, 0.0, 0), c[0]);
        assert_eq!(bernstein_cubic(&c, 1.0, 0), c[3]);
        assert_eq!(c[0], 2.0);
        assert_eq!(c[3], -1.0);
    }

    #[test]
    fn quadratic_second_derivative() {
        let data = DataSet::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        let s = SplineModel::new(data, vec![0.0, 2.0, 4.0]).unwrap();
        assert!((s.eval(0.5, 2).unwrap() - 2.0).abs() < 1e-14);
        assert!((s.eval(1.5, 0).unwrap() - 2.25).abs() < 1e-14);
    }

    #[test]
    fn natural_boundary_condition() {
        let data = DataSet::new(
            vec![0.0, 0.4, 1.7, 2.0, 3.3, 5.0],
            vec![1.0, -0.5, 2.0, 2.2, 0.1, 0.7],
        )
        .unwrap();
        let s = SplineModel::with_scheme(data, DerivativeScheme::NaturalSpline);
        assert!(s.eval(0.0, 2).unwrap().abs() < 1e-10);
        assert!(s.eval(5.0, 2).unwrap().abs() < 1e-10);
        // C² at interior knots
        let xs = s.data().x().to_vec();
        for t in 1..xs.len() - 1 {
            let left = s.eval_in(t - 1, xs[t], 2);
            let right = s.eval_in(t, xs[t], 2);
            assert!((left - right).abs() < 1e-10);
        }
    }

    #[test]
    fn eval_rejects_out_of_domain() {
        let s = SplineModel::with_scheme(linear_data(), DerivativeScheme::NaturalSpline);
        assert!(matches!(s.eval(-0.1, 0), Err(Error::OutOfDomain { .. })));
        assert!(s.eval(4.1, 1).is_err());
        assert!(SplineModel::new(linear_data(), vec![0.0; 3]).is_err());
    }

    #[test]
    fn sup_norms_low_curvature() {
        let s = SplineModel::with_scheme(linear_data(), DerivativeScheme::NaturalSpline);
        let n = s.sup_norms(&Grid::over(s.data(), 2001).unwrap());
        assert!((n.k - 0.5).abs() < 1e-13);
        assert!(n.c < 1e-12);
    }

    #[test]
    fn sup_norms_high_curvature() {
        let s = SplineModel::with_scheme(high_curvature(), DerivativeScheme::NaturalSpline);
        let n = s.sup_norms(&Grid::over(s.data(), 2001).unwrap());
        // |S''| peaks at the middle knot: 102/7
        assert!((n.c - 102.0 / 7.0).abs() < 1e-12);
        // |S'| peaks inside [1, 2] where S'' = 0; closed form from the cubic piece
        let [u, v, w, x] = s.coefficients(1);
        let (p1, p2, p3) = (-3.0 * u + v, 3.0 * u - 2.0 * v + w, -u + v - w + x);
        let z = -p2 / (3.0 * p3);
        let peak = (p1 + 2.0 * p2 * z + 3.0 * p3 * z * z).abs();
        // grid sampling sits within h²·max|S'''|/8 of the true peak
        assert!(n.k <= peak && peak - n.k < 1e-5, "{} vs {}", n.k, peak);
    }

    #[test]
    fn linear_baseline_midpoint() {
        let b = Baseline::new(linear_data(), BaselineKind::Linear);
        assert!((b.eval(0.5).unwrap() - 1.25).abs() < 1e-15);
        assert!(b.eval(5.0).is_err());
    }

    #[test]
    fn pchip_does_not_overshoot() {
        let data = DataSet::new(
            vec![0.0, 1.0, 2.0, 2.5, 4.0, 6.0],
            vec![0.0, 0.1, 3.0, 3.05, 8.0, 8.0],
        )
        .unwrap();
        let b = Baseline::new(data.clone(), BaselineKind::Pchip);
        for (x, y) in data.x().iter().zip(data.y()) {
            assert_eq!(b.eval(*x).unwrap(), *y);
        }
        let xs = data.x();
        let ys = data.y();
        for s in 0..xs.len() - 1 {
            let (lo, hi) = (ys[s].min(ys[s + 1]), ys[s].max(ys[s + 1]));
            for k in 0..=200 {
                let x = xs[s] + (xs[s + 1] - xs[s]) * k as f64 / 200.0;
                let v = b.eval(x).unwrap();
                assert!(v >= lo - 1e-12 && v <= hi + 1e-12, "x={x} v={v}");
            }
        }
    }
}
