//! Curvature-deviation penalty and the choice of scaling factors.
//!
//! The penalty is `J(λ) = ∫ (κ_F - κ_S)² dx` over `[x_1, x_M]`, where `F` is
//! the curvature-preserving FIF for `λ` and `S` its reference spline. `J` is
//! minimized by cyclic coordinate descent with a golden-section line search
//! per coordinate. Since `λ = 0` gives `F = S` and hence `J = 0`, a positive
//! magnitude floor `λ_min` is needed to obtain a genuinely fractal optimum.

use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_of, spline_curvature};
use crate::data::{AffineMaps, Grid, ScalingVector};
use crate::error::{Error, Result};
use crate::fif::{BaseFunction, FifModel};
use crate::quadrature::{integrate, QuadratureRule};
use crate::spline::{SplineModel, SupNorms};

/// Largest magnitude any scaling factor is allowed to take.
pub const MAX_SCALE: f64 = 0.999;

/// Grid size used for spline sup-norms.
pub const SUP_NORM_GRID: usize = 2001;

/// Admissible scaling magnitudes for a curvature tolerance `ε`.
///
/// With `K = ‖S'‖_∞`, `C = ‖S''‖_∞` and `w = (1 + K²)^{3/2}`:
///
/// * `spline_term = 3C / (ε w)`
/// * `attractor_term = ε w / ‖F''‖_∞`
/// * `tight = ε w / C`
/// * `beta_s = min(a_s, spline_term, attractor_term, MAX_SCALE)`
///
/// Terms whose denominator vanishes are infinite, and `C = 0` removes the
/// curvature constraint altogether.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureBounds {
    pub epsilon: f64,
    pub norms: SupNorms,
    pub fpp_sup: f64,
    pub spline_term: f64,
    pub attractor_term: f64,
    /// `min(spline_term, attractor_term)`: the curvature-driven limit without the map ratios.
    pub curvature_limit: f64,
    pub tight: f64,
    pub beta: Vec<f64>,
}

pub fn scaling_bounds(spline: &SplineModel, epsilon: f64, fpp_sup: f64) -> Result<CurvatureBounds> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidInput(format!(
            "curvature tolerance must be positive, got {epsilon}"
        )));
    }
    if !(fpp_sup >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "second-derivative bound must be non-negative, got {fpp_sup}"
        )));
    }
    let norms = spline.sup_norms(&Grid::over(spline.data(), SUP_NORM_GRID)?);
    let w = (1.0 + norms.k * norms.k).powf(1.5);
    let (spline_term, attractor_term, tight) = if norms.c == 0.0 {
        (f64::INFINITY, f64::INFINITY, f64::INFINITY)
    } else {
        let attractor = if fpp_sup > 0.0 {
            epsilon * w / fpp_sup
        } else {
            f64::INFINITY
        };
        (3.0 * norms.c / (epsilon * w), attractor, epsilon * w / norms.c)
    };
    let curvature_limit = spline_term.min(attractor_term);
    let maps = AffineMaps::new(spline.data());
    let beta = maps
        .ratios()
        .iter()
        .map(|&a| a.min(curvature_limit).min(MAX_SCALE))
        .collect();
    Ok(CurvatureBounds {
        epsilon,
        norms,
        fpp_sup,
        spline_term,
        attractor_term,
        curvature_limit,
        tight,
        beta,
    })
}

/// Bounds with `‖F''‖_∞` bootstrapped from `C`, then re-estimated once from the
/// FIF built at the bootstrap bounds.
pub fn scaling_bounds_refined(spline: &SplineModel, epsilon: f64, grid_size: usize) -> Result<CurvatureBounds> {
    let norms = spline.sup_norms(&Grid::over(spline.data(), SUP_NORM_GRID)?);
    let first = scaling_bounds(spline, epsilon, norms.c)?;
    let lambda = ScalingVector::new(first.beta.iter().map(|b| 0.999 * b).collect())?;
    let model = FifModel::curvature_preserving(lambda, spline.clone())?;
    let curve = model.sample(&Grid::over(spline.data(), grid_size)?, 1e-10)?;
    let fpp = curve.f2.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    scaling_bounds(spline, epsilon, fpp)
}

/// Settings of the penalty functional and its minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PenaltyConfig {
    pub grid_size: usize,
    pub rule: QuadratureRule,
    /// Per-interval box `|λ_s| ≤ β_s`; `None` means `β_s = a_s`.
    pub bounds: Option<Vec<f64>>,
    /// Relative improvement per sweep below which the search stops.
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Lower magnitude floor `|λ_s| ≥ λ_min`.
    pub lambda_min: f64,
    /// Width at which a golden-section search stops.
    pub search_tolerance: f64,
    /// Evaluation tolerance of the FIF fixed-point iterations.
    pub eval_tolerance: f64,
    pub base: BaseFunction,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            grid_size: 1001,
            rule: QuadratureRule::Simpson,
            bounds: None,
            tolerance: 1e-6,
            max_sweeps: 200,
            lambda_min: 0.0,
            search_tolerance: 1e-9,
            eval_tolerance: 1e-12,
            base: BaseFunction::default(),
        }
    }
}

impl PenaltyConfig {
    /// Validates the settings against `spline` and returns the effective bounds.
    pub fn resolve_bounds(&self, spline: &SplineModel) -> Result<Vec<f64>> {
        if self.grid_size < 65 {
            return Err(Error::InvalidInput(format!(
                "quadrature grid needs at least 65 points, got {}",
                self.grid_size
            )));
        }
        if self.rule == QuadratureRule::Simpson && self.grid_size % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "Simpson's rule needs an odd grid size, got {}",
                self.grid_size
            )));
        }
        let maps = AffineMaps::new(spline.data());
        let bounds = match &self.bounds {
            Some(b) if b.len() != maps.len() => {
                return Err(Error::InvalidInput(format!(
                    "{} bounds for {} intervals",
                    b.len(),
                    maps.len()
                )))
            }
            Some(b) => b.iter().map(|v| v.min(MAX_SCALE)).collect::<Vec<_>>(),
            None => maps.ratios().to_vec(),
        };
        if bounds.iter().any(|b| !(*b > 0.0)) {
            return Err(Error::InvalidInput("bounds must be positive".into()));
        }
        let min_bound = bounds.iter().copied().fold(f64::INFINITY, f64::min);
        if !(self.lambda_min >= 0.0 && self.lambda_min < min_bound) {
            return Err(Error::InvalidInput(format!(
                "magnitude floor {} must lie in [0, {min_bound})",
                self.lambda_min
            )));
        }
        if !(self.tolerance >= 0.0 && self.search_tolerance > 0.0 && self.eval_tolerance > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        Ok(bounds)
    }
}

/// `J(λ)` for the curvature-preserving FIF anchored at `spline`.
pub fn penalty(lambda: &ScalingVector, spline: &SplineModel, config: &PenaltyConfig) -> Result<f64> {
    let model = FifModel::curvature_preserving_with(lambda.clone(), spline.clone(), config.base)?;
    let grid = Grid::over(spline.data(), config.grid_size)?;
    let curve = model.sample(&grid, config.eval_tolerance)?;
    let kf = curvature_of(&curve);
    let ks = spline_curvature(spline, &grid)?;
    let sq: Vec<f64> = kf
        .kappa
        .iter()
        .zip(&ks.kappa)
        .map(|(a, b)| (a - b) * (a - b))
        .collect();
    integrate(&sq, grid.spacing(), config.rule)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PenaltyResult {
    pub lambda: ScalingVector,
    pub objective: f64,
    pub initial_objective: f64,
    pub sweeps: usize,
    pub converged: bool,
    pub bounds: Vec<f64>,
    /// `J` at the start and after every sweep.
    pub history: Vec<f64>,
}

/// Cyclic coordinate descent on `J` within the configured box.
pub fn minimize_penalty(
    spline: &SplineModel,
    config: &PenaltyConfig,
    init: &ScalingVector,
) -> Result<PenaltyResult> {
    let bounds = config.resolve_bounds(spline)?;
    if init.len() != bounds.len() {
        return Err(Error::InvalidInput(format!(
            "{} initial factors for {} intervals",
            init.len(),
            bounds.len()
        )));
    }
    let floor = config.lambda_min;
    let mut lam: Vec<f64> = init
        .values()
        .iter()
        .zip(&bounds)
        .map(|(&v, &b)| {
            let v = v.clamp(-b, b);
            if v.abs() < floor {
                if v < 0.0 {
                    -floor
                } else {
                    floor
                }
            } else {
                v
            }
        })
        .collect();

    let objective = |values: &[f64]| penalty(&ScalingVector::new(values.to_vec())?, spline, config);
    let mut current = objective(&lam)?;
    let initial = current;
    let mut history = vec![current];
    let mut converged = false;
    let mut sweeps = 0;

    while sweeps < config.max_sweeps {
        sweeps += 1;
        let start = current;
        for s in 0..lam.len() {
            let b = bounds[s];
            let branches: Vec<(f64, f64)> = if floor > 0.0 {
                vec![(-b, -floor), (floor, b)]
            } else {
                vec![(-b, b)]
            };
            for (lo, hi) in branches {
                let mut trial = lam.clone();
                let (arg, value) = golden_section(lo, hi, config.search_tolerance, |v| {
                    trial[s] = v;
                    objective(&trial)
                })?;
                if value < current {
                    lam[s] = arg;
                    current = value;
                }
            }
        }
        history.push(current);
        if start - current < config.tolerance * (1.0 + current) {
            converged = true;
            break;
        }
    }

    Ok(PenaltyResult {
        lambda: ScalingVector::new(lam)?,
        objective: current,
        initial_objective: initial,
        sweeps,
        converged,
        bounds,
        history,
    })
}

/// Minimizes `f` on `[lo, hi]` until the bracket is narrower than `tol`.
/// Returns the best point evaluated.
fn golden_section<F>(lo: f64, hi: f64, tol: f64, mut f: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DataSet;
    use crate::spline::DerivativeScheme;

    fn spline(y: &[f64]) -> SplineModel {
        let data = DataSet::new((0..y.len()).map(|i| i as f64).collect(), y.to_vec()).unwrap();
        SplineModel::with_scheme(data, DerivativeScheme::NaturalSpline)
    }

    fn high() -> SplineModel {
        spline(&[0.0, 2.0, -1.0, 2.0, 0.0])
    }

    fn low() -> SplineModel {
        spline(&[1.0, 1.5, 2.0, 2.5, 3.0])
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section(-1.0, 2.0, 1e-10, |x| Ok((x - 0.3) * (x - 0.3) + 1.0)).unwrap();
        assert!((x - 0.3).abs() < 1e-8);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bounds_reject_bad_epsilon() {
        assert!(scaling_bounds(&high(), 0.0, 1.0).is_err());
        assert!(scaling_bounds(&high(), -1.0, 1.0).is_err());
    }

    #[test]
    fn bounds_without_curvature() {
        let b = scaling_bounds(&low(), 0.1, 0.0).unwrap();
        assert!(b.norms.c < 1e-12);
        assert!(b.curvature_limit.is_infinite());
        assert_eq!(b.beta, vec![0.25; 4]);
    }

    #[test]
    fn bounds_formula() {
        let eps = 0.05;
        let b = scaling_bounds(&high(), eps, 20.0).unwrap();
        let w = (1.0 + b.norms.k.powi(2)).powf(1.5);
        assert!((b.spline_term - 3.0 * b.norms.c / (eps * w)).abs() < 1e-12);
        assert!((b.attractor_term - eps * w / 20.0).abs() < 1e-12);
        assert!((b.tight - eps * w / b.norms.c).abs() < 1e-12);
        for &beta in &b.beta {
            assert!(beta <= 0.25);
        }
    }

    #[test]
    fn penalty_vanishes_at_zero() {
        let cfg = PenaltyConfig::default();
        assert_eq!(penalty(&ScalingVector::zeros(4), &high(), &cfg).unwrap(), 0.0);
    }

    #[test]
    fn penalty_vanishes_on_linear_data() {
        let cfg = PenaltyConfig::default();
        let lam = ScalingVector::new(vec![0.05, -0.2, 0.1, 0.01]).unwrap();
        // only finite-difference rounding remains for factors beyond a²
        assert!(penalty(&lam, &low(), &cfg).unwrap() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let s = high();
        let mut cfg = PenaltyConfig::default();
        cfg.grid_size = 1000;
        assert!(cfg.resolve_bounds(&s).is_err());
        cfg.grid_size = 33;
        cfg.rule = QuadratureRule::Trapezoid;
        assert!(cfg.resolve_bounds(&s).is_err());
        let mut cfg = PenaltyConfig::default();
        cfg.lambda_min = 0.25;
        assert!(cfg.resolve_bounds(&s).is_err());
        cfg.lambda_min = 0.01;
        assert_eq!(cfg.resolve_bounds(&s).unwrap(), vec![0.25; 4]);
        cfg.bounds = Some(vec![0.1; 3]);
        assert!(cfg.resolve_bounds(&s).is_err());
    }

    #[test]
    fn floor_on_linear_data_returns_projection() {
        let mut cfg = PenaltyConfig::default();
        cfg.lambda_min = 0.01;
        cfg.bounds = Some(vec![0.06; 4]);
        let init = ScalingVector::new(vec![0.0, -0.005, 0.3, 0.02]).unwrap();
        let res = minimize_penalty(&low(), &cfg, &init).unwrap();
        assert_eq!(res.lambda.values(), &[0.01, -0.01, 0.06, 0.02]);
        assert_eq!(res.objective, 0.0);
        assert!(res.converged);
        assert_eq!(res.sweeps, 1);
    }
}
