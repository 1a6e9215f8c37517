//! Signed curvature of sampled curves, Menger curvature of data triples and
//! deviation metrics between curvature profiles.

use serde::{Deserialize, Serialize};

use crate::data::{DataSet, Grid};
use crate::error::{Error, Result};
use crate::fif::{DerivativeSource, SampledCurve};
use crate::spline::SplineModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureSource {
    /// Closed-form or derivative-IFS derivatives.
    Analytic,
    FiniteDifference,
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureProfile {
    pub grid: Grid,
    pub kappa: Vec<f64>,
    pub source: CurvatureSource,
}

/// `κ = f'' / (1 + f'²)^{3/2}`.
pub fn signed_curvature(f1: f64, f2: f64) -> f64 {
    f2 / (1.0 + f1 * f1).powf(1.5)
}

pub fn curvature_of(curve: &SampledCurve) -> CurvatureProfile {
    let kappa = curve
        .f1
        .iter()
        .zip(&curve.f2)
        .map(|(&d1, &d2)| signed_curvature(d1, d2))
        .collect();
    let analytic = curve.f1_source == DerivativeSource::DerivativeIfs
        && curve.f2_source == DerivativeSource::DerivativeIfs;
    CurvatureProfile {
        grid: curve.grid.clone(),
        kappa,
        source: if analytic {
            CurvatureSource::Analytic
        } else {
            CurvatureSource::FiniteDifference
        },
    }
}

/// Curvature of the spline from its exact piecewise derivatives.
pub fn spline_curvature(spline: &SplineModel, grid: &Grid) -> Result<CurvatureProfile> {
    let kappa = grid
        .points()
        .iter()
        .map(|&x| Ok(signed_curvature(spline.eval(x, 1)?, spline.eval(x, 2)?)))
        .collect::<Result<_>>()?;
    Ok(CurvatureProfile {
        grid: grid.clone(),
        kappa,
        source: CurvatureSource::Analytic,
    })
}

/// Signed inverse circumradius of `p, q, r`; positive for a left (counter-clockwise) turn.
pub fn menger_curvature(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> f64 {
    let cross = (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0);
    if cross == 0.0 {
        return 0.0;
    }
    let a = (q.0 - p.0).hypot(q.1 - p.1);
    let b = (r.0 - q.0).hypot(r.1 - q.1);
    let c = (r.0 - p.0).hypot(r.1 - p.1);
    // 4 · area / (abc) with area = cross / 2
    2.0 * cross / (a * b * c)
}

/// Menger curvature at each interior knot `t = 2..M-1`.
pub fn discrete_curvature(data: &DataSet) -> Vec<f64> {
    let pts: Vec<(f64, f64)> = data
        .x()
        .iter()
        .copied()
        .zip(data.y().iter().copied())
        .collect();
    pts.windows(3)
        .map(|w| menger_curvature(w[0], w[1], w[2]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureDeviation {
    pub max_err: f64,
    pub rmse: f64,
    pub pointwise: Vec<f64>,
}

/// Pointwise `|κ_a - κ_b|` with its maximum and root mean square.
pub fn curvature_deviation(
    a: &CurvatureProfile,
    b: &CurvatureProfile,
) -> Result<CurvatureDeviation> {
    if a.grid != b.grid || a.kappa.len() != b.kappa.len() {
        return Err(Error::InvalidInput(
            "curvature profiles are on different grids".into(),
        ));
    }
    let pointwise: Vec<f64> = a
        .kappa
        .iter()
        .zip(&b.kappa)
        .map(|(x, y)| (x - y).abs())
        .collect();
    let max_err = pointwise.iter().copied().fold(0.0, f64::max);
    let rmse = (pointwise.iter().map(|e| e * e).sum::<f64>() / pointwise.len() as f64).sqrt();
    Ok(CurvatureDeviation {
        max_err,
        rmse,
        pointwise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::DerivativeScheme;

    fn curve(grid: Grid, f: impl Fn(f64) -> (f64, f64, f64)) -> SampledCurve {
        let (mut f0, mut f1, mut f2) = (vec![], vec![], vec![]);
        for &x in grid.points() {
            let (a, b, c) = f(x);
            f0.push(a);
            f1.push(b);
            f2.push(c);
        }
        SampledCurve {
            grid,
            f: f0,
            f1,
            f2,
            f1_source: DerivativeSource::DerivativeIfs,
            f2_source: DerivativeSource::DerivativeIfs,
        }
    }

    #[test]
    fn straight_line_has_zero_curvature() {
        let c = curve(Grid::uniform(0.0, 1.0, 11).unwrap(), |x| (3.0 * x, 3.0, 0.0));
        assert!(curvature_of(&c).kappa.iter().all(|&k| k == 0.0));
    }

    #[test]
    fn semicircle_has_unit_curvature() {
        let c = curve(Grid::uniform(-0.9, 0.9, 181).unwrap(), |x| {
            let r = (1.0 - x * x).sqrt();
            (r, -x / r, -1.0 / (r * r * r))
        });
        for k in curvature_of(&c).kappa {
            assert!((k + 1.0).abs() < 1e-8, "{k}");
        }
    }

    #[test]
    fn parabola_vertex() {
        assert_eq!(signed_curvature(0.0, 1.0), 1.0);
        assert_eq!(signed_curvature(0.0, 2.0), 2.0);
    }

    #[test]
    fn menger_basic_cases() {
        assert_eq!(menger_curvature((0.0, 0.0), (1.0, 1.0), (3.0, 3.0)), 0.0);
        let on_circle = |t: f64| (t.cos(), t.sin());
        let k = menger_curvature(on_circle(0.1), on_circle(1.3), on_circle(2.9));
        assert!((k - 1.0).abs() < 1e-12);
        let k = menger_curvature(on_circle(2.9), on_circle(1.3), on_circle(0.1));
        assert!((k + 1.0).abs() < 1e-12);
    }

    /// Circumradius from the perpendicular-bisector intersection.
    fn circumcircle_curvature(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> f64 {
        let d = 2.0 * (p.0 * (q.1 - r.1) + q.0 * (r.1 - p.1) + r.0 * (p.1 - q.1));
        let sq = |a: (f64, f64)| a.0 * a.0 + a.1 * a.1;
        let ux = (sq(p) * (q.1 - r.1) + sq(q) * (r.1 - p.1) + sq(r) * (p.1 - q.1)) / d;
        let uy = (sq(p) * (r.0 - q.0) + sq(q) * (p.0 - r.0) + sq(r) * (q.0 - p.0)) / d;
        1.0 / (p.0 - ux).hypot(p.1 - uy)
    }

    #[test]
    fn discrete_curvature_high_curvature_data() {
        let data = DataSet::new(vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![0.0, 2.0, -1.0, 2.0, 0.0])
            .unwrap();
        let k = discrete_curvature(&data);
        let pts: Vec<_> = data.x().iter().copied().zip(data.y().iter().copied()).collect();
        // frozen from the circumcircle oracle
        let oracle: Vec<f64> = pts
            .windows(3)
            .map(|w| circumcircle_curvature(w[0], w[1], w[2]))
            .collect();
        let frozen = [0.632_455_532_033_675_9, 0.6, 0.632_455_532_033_675_9];
        for i in 0..3 {
            assert!((oracle[i] - frozen[i]).abs() < 1e-12, "{oracle:?}");
            assert!((k[i].abs() - frozen[i]).abs() < 1e-12, "{k:?}");
        }
        // right turn, left turn, right turn
        assert!(k[0] < 0.0 && k[1] > 0.0 && k[2] < 0.0);
    }

    #[test]
    fn menger_rotation_invariant() {
        let pts = [(0.0, 0.0), (1.0, 2.0), (2.0, -1.0)];
        let base = menger_curvature(pts[0], pts[1], pts[2]);
        for angle in [0.3_f64, 1.1, 2.5, -0.7] {
            let (c, s) = (angle.cos(), angle.sin());
            let rot = |p: (f64, f64)| (c * p.0 - s * p.1, s * p.0 + c * p.1);
            let k = menger_curvature(rot(pts[0]), rot(pts[1]), rot(pts[2]));
            assert!((k.abs() - base.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn deviation_metrics() {
        let grid = Grid::uniform(0.0, 1.0, 5).unwrap();
        let a = CurvatureProfile {
            grid: grid.clone(),
            kappa: vec![0.0, 1.0, 2.0, 3.0, 4.0],
            source: CurvatureSource::Analytic,
        };
        let zero = curvature_deviation(&a, &a).unwrap();
        assert_eq!(zero.max_err, 0.0);
        assert_eq!(zero.rmse, 0.0);
        let mut b = a.clone();
        b.kappa[2] = 0.0;
        let d = curvature_deviation(&a, &b).unwrap();
        assert_eq!(d.max_err, 2.0);
        assert!((d.rmse - (4.0_f64 / 5.0).sqrt()).abs() < 1e-15);
        let mut c = a.clone();
        c.grid = Grid::uniform(0.0, 2.0, 5).unwrap();
        assert!(curvature_deviation(&a, &c).is_err());
    }

    #[test]
    fn finite_difference_matches_analytic_on_spline() {
        let data = DataSet::new(
            vec![0.0, 1.0, 2.0, 3.0, 4.0],
            vec![0.0, 2.0, -1.0, 2.0, 0.0],
        )
        .unwrap();
        let s = SplineModel::with_scheme(data, DerivativeScheme::NaturalSpline);
        let grid = Grid::uniform(0.0, 4.0, 4097).unwrap();
        let exact = spline_curvature(&s, &grid).unwrap();
        let h = 1e-4;
        for (&x, &k) in grid.points().iter().zip(&exact.kappa) {
            // differences of the polynomial piece that owns x
            let piece = s.data().locate(x).unwrap();
            let f = |t: f64| s.eval_in(piece, t, 0);
            let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
            let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            assert!((signed_curvature(d1, d2) - k).abs() < 1e-5, "x={x}");
        }
    }
}
