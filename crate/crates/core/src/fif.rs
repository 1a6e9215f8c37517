//! Fractal interpolation functions generated by affine iterated function systems.
//!
//! Every construction here is an IFS `{L_s, F_s}` with `L_s` from
//! [`AffineMaps`] and `F_s(x, u) = λ_s u + H_s(x)`, so the attractor `F`
//! satisfies
//!
//! ```text
//! F(L_s(x)) = λ_s F(x) + H_s(x)
//! ```
//!
//! and, when `|λ_s| < a_s^m`, its `m`-th derivative is the attractor of
//! `F^{(m)}(L_s(x)) = (λ_s F^{(m)}(x) + H_s^{(m)}(x)) / a_s^m`.
//! The constructions differ only in `H_s`:
//!
//! * [`Construction::HermiteCubic`]: `H_s` is the cubic in `θ = (x - x_1)/ℓ`
//!   whose coefficients enforce C¹ matching at the knots.
//! * [`Construction::CurvaturePreserving`]: `H_s(x) = S(L_s(x)) - λ_s b(x)`, so
//!   `F = S + λ_s (F - b)∘L_s^{-1}` on each interval. `b` is a base function
//!   through `(x_1, u_1)` and `(x_M, u_M)`; the default quintic base also
//!   matches `S'` and `S''` at both ends, which makes `F` C¹ for
//!   `|λ_s| < a_s` and C² for `|λ_s| < a_s²`.
//! * [`Construction::LiteralCorrection`]: `H_s(x) = S(x) + (1 - λ_s)(S(x) - L♯_s(x))`
//!   with `L♯_s` the chord of interval `s`. This form does not interpolate in
//!   general and is only built with knot verification disabled.
//!
//! Evaluation is either pointwise, by following inverse maps down to a depth
//! where the accumulated factor times an amplitude bound is below the
//! tolerance, or on a grid, by iterating the Read–Bajraktarević operator.

use serde::{Deserialize, Serialize};

use crate::data::{AffineMaps, DataSet, Grid, ScalingVector};
use crate::error::{Error, Result};
use crate::spline::{bernstein_cubic, SplineModel};

/// Default cap on the number of attractor points produced by refinement.
pub const DEFAULT_POINT_CAP: usize = 1 << 22;

/// Tolerance for build-time knot and endpoint verification.
pub const KNOT_TOLERANCE: f64 = 1e-10;

/// Tolerance used for pointwise evaluations behind finite differences.
const FD_EVAL_TOL: f64 = 1e-13;

/// Base function `b` of the curvature-preserving construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseFunction {
    /// Straight line through `(x_1, u_1)` and `(x_M, u_M)`.
    Chord,
    /// Quintic matching `S`, `S'` and `S''` at `x_1` and `x_M`.
    #[default]
    EndpointQuintic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "base")]
pub enum Construction {
    HermiteCubic,
    CurvaturePreserving(BaseFunction),
    LiteralCorrection,
}

/// How a derivative column of a [`SampledCurve`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    DerivativeIfs,
    FiniteDifference,
}

/// Function values and first two derivatives on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledCurve {
    pub grid: Grid,
    pub f: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub f1_source: DerivativeSource,
    pub f2_source: DerivativeSource,
}

/// Exact attractor ordinates at the images of the knots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttractorPoints {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
}

/// Result of a grid fixed-point iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub values: Vec<f64>,
    /// Sup-distance between successive iterates, one entry per iteration.
    pub steps: Vec<f64>,
}

impl GridSolution {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    /// Ratios `steps[k + 1] / steps[k]`; zero steps are skipped.
    pub fn reduction_factors(&self) -> Vec<f64> {
        self.steps
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Polynomial `Σ c_k t^k` in `t = (x - x_1)/ℓ`.
#[derive(Debug, Clone, PartialEq)]
struct BasePolynomial {
    origin: f64,
    span: f64,
    c: [f64; 6],
}

impl BasePolynomial {
    fn new(kind: BaseFunction, spline: &SplineModel) -> Self {
        let data = spline.data();
        let (x1, xm) = (data.x_first(), data.x_last());
        let span = data.span();
        let last = data.intervals() - 1;
        let v0 = data.y()[0];
        let v1 = data.y()[data.len() - 1];
        let c = match kind {
            BaseFunction::Chord => [v0, v1 - v0, 0.0, 0.0, 0.0, 0.0],
            BaseFunction::EndpointQuintic => {
                let d0 = spline.eval_in(0, x1, 1) * span;
                let d1 = spline.eval_in(last, xm, 1) * span;
                let s0 = spline.eval_in(0, x1, 2) * span * span;
                let s1 = spline.eval_in(last, xm, 2) * span * span;
                let (c0, c1, c2) = (v0, d0, 0.5 * s0);
                let r0 = v1 - (c0 + c1 + c2);
                let r1 = d1 - (c1 + 2.0 * c2);
                let r2 = s1 - 2.0 * c2;
                [
                    c0,
                    c1,
                    c2,
                    10.0 * r0 - 4.0 * r1 + 0.5 * r2,
                    -15.0 * r0 + 7.0 * r1 - r2,
                    6.0 * r0 - 3.0 * r1 + 0.5 * r2,
                ]
            }
        };
        Self {
            origin: x1,
            span,
            c,
        }
    }

    fn eval(&self, x: f64, order: usize) -> f64 {
        let t = (x - self.origin) / self.span;
        let mut acc = 0.0;
        for k in (order..6).rev() {
            let falling: f64 = (k + 1 - order..=k).map(|j| j as f64).product();
            acc = acc * t + falling * self.c[k];
        }
        acc / self.span.powi(order as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Terms {
    /// `[U, V, W, X]` per interval.
    Hermite(Vec<[f64; 4]>),
    Alpha(BasePolynomial),
    /// Slope and intercept of each interval chord.
    Literal(Vec<(f64, f64)>),
}

/// An IFS whose attractor is a fractal interpolant of `data`.
#[derive(Debug, Clone, PartialEq)]
pub struct FifModel {
    construction: Construction,
    maps: AffineMaps,
    lambda: ScalingVector,
    spline: SplineModel,
    terms: Terms,
    /// Upper estimate of `sup |F - S|`.
    amplitude: f64,
    point_cap: usize,
}

impl FifModel {
    /// The C¹ cubic FIF with knot slopes `slopes`. Requires `|λ_s| < a_s`.
    pub fn hermite_cubic(data: DataSet, lambda: ScalingVector, slopes: Vec<f64>) -> Result<Self> {
        let maps = AffineMaps::new(&data);
        check_lengths(&data, &lambda)?;
        check_bound(&lambda, &maps, 1, "C¹ continuity")?;
        let spline = SplineModel::new(data, slopes)?;
        let data = spline.data();
        let (y, d) = (data.y(), spline.slopes());
        let span = data.span();
        let (m, n) = (data.len(), data.intervals());
        let coeffs = (0..n)
            .map(|i| {
                let (lam, a) = (lambda.get(i), maps.ratio(i));
                let u = y[i] - lam * y[0];
                let x = y[i + 1] - lam * y[m - 1];
                [
                    u,
                    3.0 * u + span * (a * d[i] - lam * d[0]),
                    3.0 * x - span * (a * d[i + 1] - lam * d[m - 1]),
                    x,
                ]
            })
            .collect();
        Self::assemble(
            Construction::HermiteCubic,
            maps,
            lambda,
            spline,
            Terms::Hermite(coeffs),
            true,
        )
    }

    /// The curvature-preserving FIF anchored at `spline`, with the default base.
    pub fn curvature_preserving(lambda: ScalingVector, spline: SplineModel) -> Result<Self> {
        Self::curvature_preserving_with(lambda, spline, BaseFunction::default())
    }

    pub fn curvature_preserving_with(
        lambda: ScalingVector,
        spline: SplineModel,
        base: BaseFunction,
    ) -> Result<Self> {
        check_lengths(spline.data(), &lambda)?;
        let maps = AffineMaps::new(spline.data());
        let poly = BasePolynomial::new(base, &spline);
        Self::assemble(
            Construction::CurvaturePreserving(base),
            maps,
            lambda,
            spline,
            Terms::Alpha(poly),
            true,
        )
    }

    /// The correction-function form with interval chords. Fails knot verification
    /// unless the data make the correction vanish.
    pub fn literal_correction(lambda: ScalingVector, spline: SplineModel) -> Result<Self> {
        Self::literal(lambda, spline, true)
    }

    /// [`literal_correction`](Self::literal_correction) without knot verification.
    pub fn literal_correction_unverified(lambda: ScalingVector, spline: SplineModel) -> Result<Self> {
        Self::literal(lambda, spline, false)
    }

    fn literal(lambda: ScalingVector, spline: SplineModel, verify: bool) -> Result<Self> {
        check_lengths(spline.data(), &lambda)?;
        let maps = AffineMaps::new(spline.data());
        let (x, y) = (spline.data().x(), spline.data().y());
        let chords = (0..x.len() - 1)
            .map(|s| {
                let slope = (y[s + 1] - y[s]) / (x[s + 1] - x[s]);
                (slope, y[s] - slope * x[s])
            })
            .collect();
        Self::assemble(
            Construction::LiteralCorrection,
            maps,
            lambda,
            spline,
            Terms::Literal(chords),
            verify,
        )
    }

    fn assemble(
        construction: Construction,
        maps: AffineMaps,
        lambda: ScalingVector,
        spline: SplineModel,
        terms: Terms,
        verify: bool,
    ) -> Result<Self> {
        let mut model = Self {
            construction,
            maps,
            lambda,
            spline,
            terms,
            amplitude: 0.0,
            point_cap: DEFAULT_POINT_CAP,
        };
        model.amplitude = model.amplitude_bound(0);
        if verify {
            model.verify_knots()?;
        }
        Ok(model)
    }

    /// Checks `F_s(x_1, u_1) = u_s`, `F_s(x_M, u_M) = u_{s+1}` and `F(x_t) = u_t`.
    fn verify_knots(&self) -> Result<()> {
        let data = self.data();
        let (x, y) = (data.x(), data.y());
        let (u1, um) = (y[0], y[y.len() - 1]);
        let mut worst = (0, 0.0_f64);
        let mut note = |t: usize, r: f64| {
            if !(r <= worst.1) {
                worst = (t, r);
            }
        };
        for s in 0..self.maps.len() {
            note(s, (self.map_component(s, data.x_first(), u1) - y[s]).abs());
            note(s + 1, (self.map_component(s, data.x_last(), um) - y[s + 1]).abs());
        }
        for (t, (&xt, &ut)) in x.iter().zip(y).enumerate() {
            note(t, (self.eval(xt, 1e-12)? - ut).abs());
        }
        if worst.1 > KNOT_TOLERANCE || worst.1.is_nan() {
            return Err(Error::KnotMismatch {
                index: worst.0,
                max_residual: worst.1,
            });
        }
        Ok(())
    }

    pub fn with_point_cap(mut self, cap: usize) -> Self {
        self.point_cap = cap;
        self
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn data(&self) -> &DataSet {
        self.spline.data()
    }

    pub fn maps(&self) -> &AffineMaps {
        &self.maps
    }

    pub fn lambda(&self) -> &ScalingVector {
        &self.lambda
    }

    /// The reference spline `S`.
    pub fn spline(&self) -> &SplineModel {
        &self.spline
    }

    /// `[U, V, W, X]` of interval `s` for the Hermite cubic construction.
    pub fn hermite_coefficients(&self, s: usize) -> Option<[f64; 4]> {
        match &self.terms {
            Terms::Hermite(c) => c.get(s).copied(),
            _ => None,
        }
    }

    /// The base function `b^{(order)}(x)` of the curvature-preserving construction.
    pub fn base(&self, x: f64, order: usize) -> Option<f64> {
        match &self.terms {
            Terms::Alpha(poly) => Some(poly.eval(x, order)),
            _ => None,
        }
    }

    /// Upper estimate of `sup |F - S|` used to size pointwise recursion depth.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// `F_s(x, u) = λ_s u + H_s(x)`.
    pub fn map_component(&self, s: usize, x: f64, u: f64) -> f64 {
        let lx = self.maps.apply(s, x);
        self.lambda.get(s) * u + self.image_term(s, lx, x, 0)
    }

    /// `max_s |λ_s| / a_s^order`, the contraction factor of the order-`order` IFS.
    pub fn contraction(&self, order: usize) -> f64 {
        (0..self.maps.len())
            .map(|s| self.factor(s, order).abs())
            .fold(0.0, f64::max)
    }

    /// Whether the derivative IFS of this order is contractive (`|λ_s| < a_s^order`).
    pub fn derivative_admissible(&self, order: usize) -> bool {
        check_bound(&self.lambda, &self.maps, order, "").is_ok()
    }

    fn factor(&self, s: usize, order: usize) -> f64 {
        self.lambda.get(s) / self.maps.ratio(s).powi(order as i32)
    }

    /// `H_s^{(order)}(y) / a_s^order` where `x = L_s(y)`.
    fn image_term(&self, s: usize, x: f64, y: f64, order: usize) -> f64 {
        let a_pow = self.maps.ratio(s).powi(order as i32);
        let lam = self.lambda.get(s);
        match &self.terms {
            Terms::Hermite(coeffs) => {
                let data = self.data();
                let theta = (y - data.x_first()) / data.span();
                let width = data.x()[s + 1] - data.x()[s];
                bernstein_cubic(&coeffs[s], theta, order) / width.powi(order as i32)
            }
            Terms::Alpha(base) => {
                let correction = lam * base.eval(y, order) / a_pow;
                self.spline.eval_in(s, x, order) - correction
            }
            Terms::Literal(chords) => {
                let sy = self.spline.eval_clamped(y, order);
                let (slope, intercept) = chords[s];
                let chord = match order {
                    0 => slope * y + intercept,
                    1 => slope,
                    _ => 0.0,
                };
                ((2.0 - lam) * sy - (1.0 - lam) * chord) / a_pow
            }
        }
    }

    fn admissible_order(&self, order: usize) -> Result<f64> {
        check_bound(&self.lambda, &self.maps, order, "derivative IFS")?;
        Ok(self.contraction(order))
    }

    /// Estimate of `sup |F^{(order)} - S^{(order)}|` from the one-step residual
    /// `T S - S` sampled on a dense grid, scaled by `1 / (1 - ρ)`.
    fn amplitude_bound(&self, order: usize) -> f64 {
        let rho = self.contraction(order);
        if rho == 0.0 {
            return 0.0;
        }
        let data = self.data();
        let n = 513;
        let span = data.span();
        let mut resid: f64 = 0.0;
        let mut scale: f64 = 0.0;
        let samples = (0..n)
            .map(|i| data.x_first() + span * i as f64 / (n - 1) as f64)
            .chain(data.x().iter().copied());
        for y in samples {
            let y = y.min(data.x_last());
            let sy = self.spline.eval_clamped(y, order);
            scale = scale.max(sy.abs());
            for s in 0..self.maps.len() {
                let x = self.maps.apply(s, y).clamp(data.x()[s], data.x()[s + 1]);
                let tsx = self.factor(s, order) * sy + self.image_term(s, x, y, order);
                resid = resid.max((tsx - self.spline.eval_in(s, x, order)).abs());
            }
        }
        (1.5 * resid + 16.0 * f64::EPSILON * (1.0 + scale)) / (1.0 - rho)
    }

    /// `F(x)` to within `tol`.
    pub fn eval(&self, x: f64, tol: f64) -> Result<f64> {
        self.eval_recursive(x, 0, tol, self.amplitude, self.contraction(0))
    }

    /// `F^{(order)}(x)` to within `tol`, through the derivative IFS.
    pub fn eval_derivative(&self, x: f64, order: usize, tol: f64) -> Result<f64> {
        if order == 0 {
            return self.eval(x, tol);
        }
        let rho = self.admissible_order(order)?;
        let amp = self.amplitude_bound(order);
        self.eval_recursive(x, order, tol, amp, rho)
    }

    fn eval_recursive(&self, x: f64, order: usize, tol: f64, amp: f64, rho: f64) -> Result<f64> {
        self.data().check_domain(x)?;
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
        }
        let max_depth = if rho == 0.0 || amp <= tol {
            1
        } else {
            ((tol / amp).ln() / rho.ln()).ceil() as usize + 1
        };
        let data = self.data();
        let mut acc = 0.0;
        let mut weight = 1.0;
        let mut cur = x;
        for _ in 0..max_depth {
            let s = data.locate_unchecked(cur);
            let y = self.maps.invert(s, cur);
            acc += weight * self.image_term(s, cur, y, order);
            weight *= self.factor(s, order);
            cur = y;
            if weight.abs() * amp <= tol {
                break;
            }
        }
        if weight != 0.0 {
            acc += weight * self.spline.eval_clamped(cur, order);
        }
        Ok(acc)
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        let data = self.data();
        if grid.lo() != data.x_first() || grid.hi() != data.x_last() {
            return Err(Error::InvalidInput(
                "grid must span exactly [x_1, x_M]".into(),
            ));
        }
        let min = 8 * data.intervals();
        if grid.len() < min {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {min} points, got {}",
                grid.len()
            )));
        }
        Ok(())
    }

    /// Iterates the (derivative) Read–Bajraktarević operator on `grid`, seeded
    /// with `S^{(order)}`, reading pull-backs by linear interpolation. Stops once
    /// successive iterates differ by at most `tol · (1 - ρ)`.
    pub fn iterate_on_grid(&self, grid: &Grid, order: usize, tol: f64) -> Result<GridSolution> {
        self.check_grid(grid)?;
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
        }
        let rho = if order == 0 {
            self.contraction(0)
        } else {
            self.admissible_order(order)?
        };
        let data = self.data();
        struct Pull {
            factor: f64,
            term: f64,
            j: usize,
            w: f64,
        }
        let pulls: Vec<Pull> = grid
            .points()
            .iter()
            .map(|&x| {
                let s = data.locate_unchecked(x);
                let y = self.maps.invert(s, x);
                let (j, w) = grid.bracket(y);
                Pull {
                    factor: self.factor(s, order),
                    term: self.image_term(s, x, y, order),
                    j,
                    w,
                }
            })
            .collect();

        let mut g: Vec<f64> = grid
            .points()
            .iter()
            .map(|&x| self.spline.eval_clamped(x, order))
            .collect();
        let mut next = vec![0.0; g.len()];
        let threshold = tol * (1.0 - rho);
        let budget = if rho == 0.0 {
            2
        } else {
            (10.0 * tol.ln() / rho.ln()).ceil().max(10.0) as usize + 10
        };
        let mut steps = Vec::new();
        loop {
            let mut step: f64 = 0.0;
            for (out, p) in next.iter_mut().zip(&pulls) {
                let read = if p.w == 0.0 {
                    g[p.j]
                } else {
                    (1.0 - p.w) * g[p.j] + p.w * g[p.j + 1]
                };
                *out = if p.factor == 0.0 {
                    p.term
                } else {
                    p.factor * read + p.term
                };
            }
            for (a, b) in g.iter().zip(&next) {
                step = step.max((a - b).abs());
            }
            std::mem::swap(&mut g, &mut next);
            steps.push(step);
            if step <= threshold {
                break;
            }
            if steps.len() >= budget || !step.is_finite() {
                return Err(Error::NoConvergence {
                    iterations: steps.len(),
                    last_step: step,
                });
            }
        }
        // closed-form endpoint values f_1 = H_1(x_1)/(a_1^m - λ_1), f_M likewise
        let n = g.len();
        let last = self.maps.len() - 1;
        let (x1, xm) = (data.x_first(), data.x_last());
        g[0] = self.image_term(0, x1, x1, order) / (1.0 - self.factor(0, order));
        g[n - 1] = self.image_term(last, xm, xm, order) / (1.0 - self.factor(last, order));
        Ok(GridSolution { values: g, steps })
    }

    /// The attractor of the order-`order` derivative IFS on `grid`.
    pub fn derivative_on_grid(&self, grid: &Grid, order: usize, tol: f64) -> Result<Vec<f64>> {
        Ok(self.iterate_on_grid(grid, order, tol)?.values)
    }

    /// `F`, `F'`, `F''` on `grid`. Derivatives come from the derivative IFS when
    /// it is contractive, otherwise from central differences of pointwise
    /// values with step `ℓ / 4096`.
    pub fn sample(&self, grid: &Grid, tol: f64) -> Result<SampledCurve> {
        let f = self.iterate_on_grid(grid, 0, tol)?.values;
        let mut fd: Option<FiniteDifferences> = None;
        let mut column = |order: usize| -> Result<(Vec<f64>, DerivativeSource)> {
            if self.derivative_admissible(order) {
                Ok((
                    self.derivative_on_grid(grid, order, tol)?,
                    DerivativeSource::DerivativeIfs,
                ))
            } else {
                if fd.is_none() {
                    fd = Some(self.finite_differences(grid)?);
                }
                let fd = fd.as_ref().expect("just computed");
                let col = if order == 1 { fd.d1.clone() } else { fd.d2.clone() };
                Ok((col, DerivativeSource::FiniteDifference))
            }
        };
        let (f1, f1_source) = column(1)?;
        let (f2, f2_source) = column(2)?;
        Ok(SampledCurve {
            grid: grid.clone(),
            f,
            f1,
            f2,
            f1_source,
            f2_source,
        })
    }

    fn finite_differences(&self, grid: &Grid) -> Result<FiniteDifferences> {
        let data = self.data();
        let h = data.span() / 4096.0;
        let (lo, hi) = (data.x_first(), data.x_last());
        let f = |x: f64| self.eval(x.clamp(lo, hi), FD_EVAL_TOL);
        let mut d1 = Vec::with_capacity(grid.len());
        let mut d2 = Vec::with_capacity(grid.len());
        for &x in grid.points() {
            let f0 = f(x)?;
            if x - h < lo {
                let (f1, f2, f3) = (f(x + h)?, f(x + 2.0 * h)?, f(x + 3.0 * h)?);
                d1.push((-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h));
                d2.push((2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h));
            } else if x + h > hi {
                let (f1, f2, f3) = (f(x - h)?, f(x - 2.0 * h)?, f(x - 3.0 * h)?);
                d1.push((3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h));
                d2.push((2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h));
            } else {
                let (fm, fp) = (f(x - h)?, f(x + h)?);
                d1.push((fp - fm) / (2.0 * h));
                d2.push((fp - 2.0 * f0 + fm) / (h * h));
            }
        }
        Ok(FiniteDifferences { d1, d2 })
    }

    /// Number of attractor points produced by [`refine_attractor`](Self::refine_attractor)
    /// at `depth`: `(M - 1)^(depth + 1) + 1`.
    pub fn refinement_size(&self, depth: usize) -> Option<u128> {
        let n = self.maps.len() as u128;
        n.checked_pow(depth as u32 + 1).map(|p| p + 1)
    }

    /// Applies the IFS `depth` times to the data points.
    ///
    /// Every returned ordinate is an exact attractor value (up to rounding),
    /// with abscissae sorted and shared interval endpoints kept once.
    pub fn refine_attractor(&self, depth: usize) -> Result<AttractorPoints> {
        let needed = self.refinement_size(depth).unwrap_or(u128::MAX);
        if needed > self.point_cap as u128 {
            return Err(Error::ResourceExhausted {
                depth,
                needed,
                cap: self.point_cap,
            });
        }
        let data = self.data();
        let mut xs = data.x().to_vec();
        let mut fs = data.y().to_vec();
        let maps = self.maps.len();
        for _ in 0..depth {
            let count = maps * (xs.len() - 1) + 1;
            let mut nx = Vec::with_capacity(count);
            let mut nf = Vec::with_capacity(count);
            for s in 0..maps {
                let end = if s + 1 == maps { xs.len() } else { xs.len() - 1 };
                for i in 0..end {
                    let y = xs[i];
                    let x = self.maps.apply(s, y);
                    nx.push(x);
                    nf.push(self.lambda.get(s) * fs[i] + self.image_term(s, x, y, 0));
                }
            }
            *nx.last_mut().expect("non-empty") = data.x_last();
            xs = nx;
            fs = nf;
        }
        Ok(AttractorPoints { x: xs, f: fs })
    }
}

struct FiniteDifferences {
    d1: Vec<f64>,
    d2: Vec<f64>,
}

fn check_lengths(data: &DataSet, lambda: &ScalingVector) -> Result<()> {
    if lambda.len() != data.intervals() {
        return Err(Error::InvalidInput(format!(
            "{} scaling factors for {} intervals",
            lambda.len(),
            data.intervals()
        )));
    }
    Ok(())
}

fn check_bound(
    lambda: &ScalingVector,
    maps: &AffineMaps,
    order: usize,
    condition: &'static str,
) -> Result<()> {
    for s in 0..lambda.len() {
        let limit = maps.ratio(s).powi(order as i32);
        let value = lambda.get(s);
        if value.abs() >= limit {
            return Err(Error::Inadmissible {
                index: s,
                value,
                limit,
                condition,
            });
        }
    }
    Ok(())
}
