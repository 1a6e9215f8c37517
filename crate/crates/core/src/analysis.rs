//! Canonical datasets and the experiment harness behind the reproduction reports.

use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_deviation, curvature_of, spline_curvature};
use crate::data::{AffineMaps, DataSet, Grid, ScalingVector};
use crate::error::{Error, Result};
use crate::fif::FifModel;
use crate::spline::{Baseline, BaselineKind, DerivativeScheme, SplineModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetId {
    LowCurvature,
    HighCurvature,
    NoisySine,
}

impl DatasetId {
    pub const ALL: [DatasetId; 3] = [Self::LowCurvature, Self::HighCurvature, Self::NoisySine];

    pub fn name(self) -> &'static str {
        match self {
            Self::LowCurvature => "low_curvature",
            Self::HighCurvature => "high_curvature",
            Self::NoisySine => "noisy_sine",
        }
    }
}

impl std::fmt::Display for DatasetId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DatasetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "low_curvature" | "low" => Ok(Self::LowCurvature),
            "high_curvature" | "high" => Ok(Self::HighCurvature),
            "noisy_sine" | "noisy" => Ok(Self::NoisySine),
            other => Err(Error::InvalidInput(format!("unknown dataset '{other}'"))),
        }
    }
}

/// Noisy sine samples: `n` uniform points on `[0, 2π]`, Gaussian noise of
/// standard deviation `sigma` drawn from ChaCha8 seeded with `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseConfig {
    pub n: usize,
    pub seed: u64,
    pub sigma: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            n: 9,
            seed: 42,
            sigma: 0.1,
        }
    }
}

pub fn noisy_sine(cfg: &NoiseConfig) -> Result<DataSet> {
    if cfg.n < 5 {
        return Err(Error::InvalidInput(format!(
            "noisy sine needs at least 5 points, got {}",
            cfg.n
        )));
    }
    if !(cfg.sigma >= 0.0) || !cfg.sigma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "noise level must be non-negative, got {}",
            cfg.sigma
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let step = std::f64::consts::TAU / (cfg.n - 1) as f64;
    let x: Vec<f64> = (0..cfg.n).map(|i| i as f64 * step).collect();
    let y = x
        .iter()
        .map(|&t| {
            let z: f64 = rng.sample(StandardNormal);
            t.sin() + cfg.sigma * z
        })
        .collect();
    DataSet::new(x, y)
}

pub fn canonical_dataset(id: DatasetId, noise: &NoiseConfig) -> Result<DataSet> {
    let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
    match id {
        DatasetId::LowCurvature => DataSet::new(x, vec![1.0, 1.5, 2.0, 2.5, 3.0]),
        DatasetId::HighCurvature => DataSet::new(x, vec![0.0, 2.0, -1.0, 2.0, 0.0]),
        DatasetId::NoisySine => noisy_sine(noise),
    }
}


/// Scaling pattern of the reference error table.
pub const TABLE1_LAMBDA: [f64; 4] = [0.01, 0.011, 0.012, 0.013];

/// Curvature tolerance at which the scaling bound of the high-curvature set,
/// computed from natural-spline norms, is 0.303.
pub const REFERENCE_EPSILON: f64 = 0.0576;

/// Repeats `pattern` cyclically over `intervals` entries.
pub fn cyclic_lambda(pattern: &[f64], intervals: usize) -> Result<ScalingVector> {
    if pattern.is_empty() {
        return Err(Error::InvalidInput("empty scaling pattern".into()));
    }
    ScalingVector::new((0..intervals).map(|i| pattern[i % pattern.len()]).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub dataset: String,
    pub lambda: Vec<f64>,
    pub rmse: f64,
    pub max_curvature_error: f64,
    pub grid_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub scheme: DerivativeScheme,
}

/// RMSE of `F - S` and the largest `|κ_F - κ_S|` on `grid`.
pub fn rmse_report(
    name: &str,
    data: &DataSet,
    lambda: &ScalingVector,
    grid: &Grid,
    scheme: DerivativeScheme,
) -> Result<ExperimentReport> {
    let spline = SplineModel::with_scheme(data.clone(), scheme);
    let model = FifModel::curvature_preserving(lambda.clone(), spline.clone())?;
    let curve = model.sample(grid, 1e-12)?;
    let mut sq = 0.0;
    for (&x, &f) in grid.points().iter().zip(&curve.f) {
        let d = f - spline.eval(x, 0)?;
        sq += d * d;
    }
    let dev = curvature_deviation(&curvature_of(&curve), &spline_curvature(&spline, grid)?)?;
    Ok(ExperimentReport {
        dataset: name.to_string(),
        lambda: lambda.values().to_vec(),
        rmse: (sq / grid.len() as f64).sqrt(),
        max_curvature_error: dev.max_err,
        grid_size: grid.len(),
        seed: None,
        scheme,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityRow {
    pub delta: f64,
    /// `‖λ̄ - λ‖_∞` after clamping.
    pub perturbation: f64,
    /// `max |κ_F - κ_F̄|` on the grid.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub lambda: Vec<f64>,
    pub rows: Vec<StabilityRow>,
    /// Least-squares slope of deviation against perturbation over the two smallest perturbations.
    pub c1: f64,
}

impl StabilityReport {
    /// Deviation ratio between the smallest perturbation and the next one up.
    pub fn smallest_ratio(&self) -> Option<f64> {
        let mut rows: Vec<&StabilityRow> = self.rows.iter().filter(|r| r.perturbation > 0.0).collect();
        rows.sort_by(|a, b| a.perturbation.total_cmp(&b.perturbation));
        match rows.as_slice() {
            [a, b, ..] if b.deviation > 0.0 => Some(a.deviation / b.deviation),
            _ => None,
        }
    }
}

/// Default perturbation sizes: `0.1 · 2^{-k}` for `k = 0..8`.
pub fn halving_deltas(count: usize) -> Vec<f64> {
    (0..count).map(|k| 0.1 * 0.5_f64.powi(k as i32)).collect()
}

/// Curvature sup-deviation between the FIF at `base` and at `base + δ`,
/// componentwise clamped to `[-a_s, a_s]`.
pub fn stability_sweep(
    spline: &SplineModel,
    base: &ScalingVector,
    deltas: &[f64],
    grid: &Grid,
) -> Result<StabilityReport> {
    let maps = AffineMaps::new(spline.data());
    let kappa = |lambda: ScalingVector| -> Result<Vec<f64>> {
        let model = FifModel::curvature_preserving(lambda, spline.clone())?;
        Ok(curvature_of(&model.sample(grid, 1e-12)?).kappa)
    };
    let reference = kappa(base.clone())?;
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        if !(delta >= 0.0) {
            return Err(Error::InvalidInput(format!("perturbation must be non-negative, got {delta}")));
        }
        let moved: Vec<f64> = base
            .values()
            .iter()
            .zip(maps.ratios())
            .map(|(&l, &a)| (l + delta).clamp(-a, a))
            .collect();
        let perturbation = moved
            .iter()
            .zip(base.values())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        let other = kappa(ScalingVector::new(moved)?)?;
        let deviation = reference
            .iter()
            .zip(&other)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        rows.push(StabilityRow {
            delta,
            perturbation,
            deviation,
        });
    }
    let mut small: Vec<&StabilityRow> = rows.iter().collect();
    small.sort_by(|a, b| a.perturbation.total_cmp(&b.perturbation));
    let (num, den) = small
        .iter()
        .take(2)
        .fold((0.0, 0.0), |(n, d), r| (n + r.perturbation * r.deviation, d + r.perturbation * r.perturbation));
    Ok(StabilityReport {
        lambda: base.values().to_vec(),
        rows,
        c1: if den > 0.0 { num / den } else { 0.0 },
    })
}

pub const SENSITIVITY_LAMBDAS: [f64; 6] = [0.0, 0.001, 0.005, 0.01, 0.05, 0.1];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityCurve {
    pub lambda: f64,
    pub derivative: Vec<f64>,
    /// `‖F'_λ - S'‖_∞` on the grid.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub x: Vec<f64>,
    pub spline_derivative: Vec<f64>,
    pub curves: Vec<SensitivityCurve>,
    /// Values skipped because the first-derivative IFS would not contract.
    pub skipped: Vec<f64>,
}

impl SensitivityReport {
    pub fn monotone(&self) -> bool {
        self.curves.windows(2).all(|w| w[0].deviation <= w[1].deviation)
    }
}

/// `F'` for uniform scaling `λ` over each admissible value of `lambdas` (`|λ| < min a_s`).
pub fn sensitivity_sweep(spline: &SplineModel, lambdas: &[f64], grid: &Grid) -> Result<SensitivityReport> {
    let maps = AffineMaps::new(spline.data());
    let a_min = maps.ratios().iter().copied().fold(f64::INFINITY, f64::min);
    let sd: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| spline.eval(x, 1))
        .collect::<Result<_>>()?;
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut curves = Vec::new();
    let mut skipped = Vec::new();
    for lambda in sorted {
        if lambda.abs() >= a_min {
            skipped.push(lambda);
            continue;
        }
        let lam = ScalingVector::uniform(maps.len(), lambda)?;
        let model = FifModel::curvature_preserving(lam, spline.clone())?;
        let derivative = model.derivative_on_grid(grid, 1, 1e-12)?;
        let deviation = derivative
            .iter()
            .zip(&sd)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        curves.push(SensitivityCurve {
            lambda,
            derivative,
            deviation,
        });
    }
    Ok(SensitivityReport {
        x: grid.points().to_vec(),
        spline_derivative: sd,
        curves,
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Linear,
    Cubic,
    Pchip,
    Fif,
}

impl Method {
    pub const ALL: [Method; 4] = [Self::Linear, Self::Cubic, Self::Pchip, Self::Fif];

    pub fn name(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Cubic => "cubic",
            Self::Pchip => "pchip",
            Self::Fif => "fif",
        }
    }
}

pub const BENCH_COUNTS: [usize; 6] = [10, 20, 50, 100, 200, 500];

/// Reference overhead band of the FIF over the cubic spline.
pub const REFERENCE_OVERHEAD: (f64, f64) = (200.0, 250.0);

#[derive(Debug, Clone, Serialize)]
pub struct TimingCell {
    pub method: Method,
    pub count: usize,
    /// Median seconds per build-and-evaluate run.
    pub median: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimingMatrix {
    pub repetitions: usize,
    pub cells: Vec<TimingCell>,
    /// FIF median over cubic median, per count.
    pub overhead: Vec<(usize, f64)>,
    /// Slope of log(FIF time) against log(count).
    pub fif_slope: f64,
}

impl TimingMatrix {
    pub fn median(&self, method: Method, count: usize) -> Option<f64> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.count == count)
            .map(|c| c.median)
    }
}

fn run_method(data: &DataSet, method: Method, xs: &[f64], lambda: &ScalingVector) -> Result<f64> {
    let mut acc = 0.0;
    match method {
        Method::Linear | Method::Pchip => {
            let kind = if method == Method::Linear {
                BaselineKind::Linear
            } else {
                BaselineKind::Pchip
            };
            let b = Baseline::new(data.clone(), kind);
            for &x in xs {
                acc += b.eval(x)?;
            }
        }
        Method::Cubic => {
            let s = SplineModel::with_scheme(data.clone(), DerivativeScheme::NaturalSpline);
            for &x in xs {
                acc += s.eval(x, 0)?;
            }
        }
        Method::Fif => {
            let s = SplineModel::with_scheme(data.clone(), DerivativeScheme::NaturalSpline);
            let f = FifModel::curvature_preserving(lambda.clone(), s)?;
            for &x in xs {
                acc += f.eval(x, 1e-10)?;
            }
        }
    }
    Ok(acc)
}

/// Median wall-clock time to build each interpolant and evaluate it at
/// `count` uniform points. Each repetition times a batch of runs long enough
/// to dominate timer resolution.
pub fn timing_bench(
    data: &DataSet,
    lambda: &ScalingVector,
    methods: &[Method],
    counts: &[usize],
    repetitions: usize,
) -> Result<TimingMatrix> {
    if repetitions < 5 {
        return Err(Error::InvalidInput(format!(
            "timing needs at least 5 repetitions, got {repetitions}"
        )));
    }
    let mut cells = Vec::new();
    for &count in counts {
        let xs = Grid::over(data, count.max(2))?.points().to_vec();
        for &method in methods {
            // calibrate the batch size to roughly a millisecond
            let mut batch = 1usize;
            loop {
                let t = Instant::now();
                for _ in 0..batch {
                    black_box(run_method(black_box(data), method, black_box(&xs), lambda)?);
                }
                if t.elapsed().as_secs_f64() > 1e-3 || batch >= 1 << 20 {
                    break;
                }
                batch *= 2;
            }
            let mut samples = Vec::with_capacity(repetitions);
            for _ in 0..repetitions {
                let t = Instant::now();
                for _ in 0..batch {
                    black_box(run_method(black_box(data), method, black_box(&xs), lambda)?);
                }
                samples.push(t.elapsed().as_secs_f64() / batch as f64);
            }
            samples.sort_by(f64::total_cmp);
            cells.push(TimingCell {
                method,
                count,
                median: samples[samples.len() / 2],
            });
        }
    }
    let lookup = |m: Method, c: usize| {
        cells
            .iter()
            .find(|cell| cell.method == m && cell.count == c)
            .map(|cell| cell.median)
    };
    let overhead = counts
        .iter()
        .filter_map(|&c| Some((c, lookup(Method::Fif, c)? / lookup(Method::Cubic, c)?)))
        .collect();
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .filter_map(|&c| Some(((c as f64).ln(), lookup(Method::Fif, c)?.ln())))
        .collect();
    Ok(TimingMatrix {
        repetitions,
        cells,
        overhead,
        fif_slope: slope(&pts),
    })
}

/// Least-squares slope of `y` on `x`; zero for fewer than two points.
pub fn slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_points() {
        let cfg = NoiseConfig::default();
        let low = canonical_dataset(DatasetId::LowCurvature, &cfg).unwrap();
        assert_eq!(low.y(), &[1.0, 1.5, 2.0, 2.5, 3.0]);
        let high = canonical_dataset(DatasetId::HighCurvature, &cfg).unwrap();
        assert_eq!(high.x(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(high.y(), &[0.0, 2.0, -1.0, 2.0, 0.0]);
    }

    #[test]
    fn noisy_sine_reproducible() {
        let cfg = NoiseConfig::default();
        let a = noisy_sine(&cfg).unwrap();
        assert_eq!(a, noisy_sine(&cfg).unwrap());
        assert_eq!(a.len(), 9);
        assert_eq!(a.x_last(), std::f64::consts::TAU);
        let b = noisy_sine(&NoiseConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.y(), b.y());
    }

    #[test]
    fn zero_noise_is_exact_sine() {
        let d = noisy_sine(&NoiseConfig { sigma: 0.0, seed: 7, n: 13 }).unwrap();
        for (x, y) in d.x().iter().zip(d.y()) {
            assert_eq!(*y, x.sin());
        }
        assert!(noisy_sine(&NoiseConfig { n: 4, ..NoiseConfig::default() }).is_err());
        assert!(noisy_sine(&NoiseConfig { sigma: -1.0, ..NoiseConfig::default() }).is_err());
    }

    #[test]
    fn dataset_ids_parse() {
        for id in DatasetId::ALL {
            assert_eq!(id.name().parse::<DatasetId>().unwrap(), id);
        }
        assert!("medium".parse::<DatasetId>().is_err());
    }

    #[test]
    fn cyclic_pattern() {
        let l = cyclic_lambda(&TABLE1_LAMBDA, 6).unwrap();
        assert_eq!(l.values(), &[0.01, 0.011, 0.012, 0.013, 0.01, 0.011]);
        assert!(cyclic_lambda(&[], 3).is_err());
    }

    #[test]
    fn slope_of_line() {
        let pts: Vec<_> = (1..5).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        assert!((slope(&pts) - 2.0).abs() < 1e-12);
        assert_eq!(slope(&pts[..1]), 0.0);
    }

    #[test]
    fn zero_lambda_report() {
        let d = canonical_dataset(DatasetId::HighCurvature, &NoiseConfig::default()).unwrap();
        let g = Grid::over(&d, 1001).unwrap();
        let r = rmse_report("high", &d, &ScalingVector::zeros(4), &g, DerivativeScheme::NaturalSpline).unwrap();
        assert!(r.rmse <= 1e-12);
        assert!(r.max_curvature_error <= 1e-10);
    }

    #[test]
    fn zero_delta_zero_deviation() {
        let d = canonical_dataset(DatasetId::HighCurvature, &NoiseConfig::default()).unwrap();
        let s = SplineModel::with_scheme(d.clone(), DerivativeScheme::NaturalSpline);
        let base = cyclic_lambda(&TABLE1_LAMBDA, 4).unwrap();
        let r = stability_sweep(&s, &base, &[0.0], &Grid::over(&d, 257).unwrap()).unwrap();
        assert_eq!(r.rows[0].deviation, 0.0);
    }

    #[test]
    fn timing_needs_repetitions() {
        let d = canonical_dataset(DatasetId::LowCurvature, &NoiseConfig::default()).unwrap();
        assert!(timing_bench(&d, &ScalingVector::zeros(4), &Method::ALL, &[10], 4).is_err());
    }
}
