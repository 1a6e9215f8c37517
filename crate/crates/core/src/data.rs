//! Shared domain model: interpolation data, the affine partition maps of the
//! iterated function system, vertical scaling vectors and uniform grids.
//!
//! Interval indices are zero-based throughout: interval `s` is `[x[s], x[s + 1]]`
//! and there are `len() - 1` of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing abscissae with their ordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSet {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl DataSet {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "{} abscissae but {} ordinates",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "need at least 3 data points, got {}",
                x.len()
            )));
        }
        if let Some(i) = x.iter().chain(y.iter()).position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at position {}",
                i % x.len()
            )));
        }
        if let Some(i) = x.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "abscissae must be strictly increasing: x[{}] = {} >= x[{}] = {}",
                i,
                x[i],
                i + 1,
                x[i + 1]
            )));
        }
        Ok(Self { x, y })
    }

    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        let (x, y) = points.iter().copied().unzip();
        Self::new(x, y)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    /// Always false; a valid data set holds at least three points.
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn intervals(&self) -> usize {
        self.x.len() - 1
    }

    pub fn x_first(&self) -> f64 {
        self.x[0]
    }

    pub fn x_last(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    /// Width `x_M - x_1` of the whole domain.
    pub fn span(&self) -> f64 {
        self.x_last() - self.x_first()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_first() && x <= self.x_last()
    }

    pub fn check_domain(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                x,
                lo: self.x_first(),
                hi: self.x_last(),
            })
        }
    }

    /// Index `s` of the interval holding `x`.
    ///
    /// Interior knots belong to the interval they open (`x == x[s]` gives `s`);
    /// the right endpoint belongs to the last interval.
    pub fn locate(&self, x: f64) -> Result<usize> {
        self.check_domain(x)?;
        Ok(self.locate_unchecked(x))
    }

    pub(crate) fn locate_unchecked(&self, x: f64) -> usize {
        let k = self.x.partition_point(|&xi| xi <= x);
        k.saturating_sub(1).min(self.intervals() - 1)
    }

    pub fn min_y(&self) -> f64 {
        self.y.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_y(&self) -> f64 {
        self.y.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The contractions `L_s(x) = a_s x + b_s` mapping `[x_1, x_M]` onto `[x_s, x_{s+1}]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineMaps {
    a: Vec<f64>,
    b: Vec<f64>,
    knots: Vec<f64>,
}

impl AffineMaps {
    pub fn new(data: &DataSet) -> Self {
        let x = data.x();
        let span = data.span();
        let a: Vec<f64> = x.windows(2).map(|w| (w[1] - w[0]) / span).collect();
        let b = a.iter().zip(x).map(|(&a, &xs)| xs - a * x[0]).collect();
        Self {
            a,
            b,
            knots: x.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Contraction ratios `a_s`.
    pub fn ratios(&self) -> &[f64] {
        &self.a
    }

    /// Offsets `b_s`.
    pub fn offsets(&self) -> &[f64] {
        &self.b
    }

    pub fn ratio(&self, s: usize) -> f64 {
        self.a[s]
    }

    /// `L_s(x)`, anchored at `x_s` so that `L_s(x_1) = x_s` holds exactly.
    pub fn apply(&self, s: usize, x: f64) -> f64 {
        self.knots[s] + self.a[s] * (x - self.knots[0])
    }

    /// `L_s^{-1}(x)`, exact at `x = x_s`.
    pub fn invert(&self, s: usize, x: f64) -> f64 {
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        let span = last - first;
        let width = self.knots[s + 1] - self.knots[s];
        (first + (x - self.knots[s]) * (span / width)).clamp(first, last)
    }
}

/// Vertical scaling factors, one per interval, with optional box bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingVector {
    values: Vec<f64>,
    bounds: Option<Vec<f64>>,
}

impl ScalingVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v.abs() >= 1.0 {
                return Err(Error::Inadmissible {
                    index: i,
                    value: v,
                    limit: 1.0,
                    condition: "contractivity",
                });
            }
        }
        Ok(Self {
            values,
            bounds: None,
        })
    }

    pub fn uniform(intervals: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; intervals])
    }

    pub fn zeros(intervals: usize) -> Self {
        Self {
            values: vec![0.0; intervals],
            bounds: None,
        }
    }

    /// Attaches per-entry bounds `β_s`; requires `|λ_s| ≤ β_s ≤ a_s`.
    pub fn with_bounds(mut self, bounds: Vec<f64>, maps: &AffineMaps) -> Result<Self> {
        if bounds.len() != self.values.len() || maps.len() != self.values.len() {
            return Err(Error::InvalidInput("bound vector length mismatch".into()));
        }
        for (s, (&lam, &beta)) in self.values.iter().zip(&bounds).enumerate() {
            if beta > maps.ratio(s) {
                return Err(Error::InvalidInput(format!(
                    "bound β[{s}] = {beta} exceeds a[{s}] = {}",
                    maps.ratio(s)
                )));
            }
            if lam.abs() > beta {
                return Err(Error::Inadmissible {
                    index: s,
                    value: lam,
                    limit: beta,
                    condition: "box bound",
                });
            }
        }
        self.bounds = Some(bounds);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bounds(&self) -> Option<&[f64]> {
        self.bounds.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, s: usize) -> f64 {
        self.values[s]
    }

    /// `‖λ‖_∞ = max_s |λ_s|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Componentwise `t · λ`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * t).collect())
    }
}

/// Uniformly spaced abscissae covering `[lo, hi]` including both ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    lo: f64,
    hi: f64,
    points: Vec<f64>,
}

impl Grid {
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("grid needs n >= 2, got {n}")));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput(format!("bad grid range [{lo}, {hi}]")));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
        points[n - 1] = hi;
        Ok(Self { lo, hi, points })
    }

    /// Grid of `n` points over the domain of `data`.
    pub fn over(data: &DataSet, n: usize) -> Result<Self> {
        Self::uniform(data.x_first(), data.x_last(), n)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.points.len() - 1) as f64
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Index `j` and weight `w` such that `x ≈ (1 - w)·p[j] + w·p[j + 1]`.
    pub(crate) fn bracket(&self, x: f64) -> (usize, f64) {
        let n = self.points.len();
        let t = ((x - self.lo) / self.spacing()).clamp(0.0, (n - 1) as f64);
        let j = (t.floor() as usize).min(n - 2);
        let w = t - j as f64;
        // snap to a node when the pull-back lands on it up to rounding
        if w < 1e-9 {
            (j, 0.0)
        } else if w > 1.0 - 1e-9 {
            if j + 1 <= n - 2 {
                (j + 1, 0.0)
            } else {
                (n - 2, 1.0)
            }
        } else {
            (j, w)
        }
    }
}
