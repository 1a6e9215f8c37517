//! Command implementations. Each command computes everything in memory and
//! only then hands its files to [`Outputs::commit`].

use std::path::PathBuf;

use cpfif::analysis::{
    canonical_dataset, cyclic_lambda, halving_deltas, rmse_report, sensitivity_sweep,
    stability_sweep, timing_bench, DatasetId, Method, NoiseConfig, BENCH_COUNTS, REFERENCE_OVERHEAD,
    SENSITIVITY_LAMBDAS, TABLE1_LAMBDA,
};
use cpfif::curvature::{curvature_deviation, curvature_of, discrete_curvature, spline_curvature};
use cpfif::fif::DerivativeSource;
use cpfif::optimize::{minimize_penalty, scaling_bounds, CurvatureBounds, PenaltyConfig, PenaltyResult};
use cpfif::{
    AffineMaps, DataSet, DerivativeScheme, FifModel, Grid, ScalingVector, SplineModel,
};
use serde::Serialize;

use crate::config::{self, FileConfig, Formats, LambdaSpec, Source};
use crate::error::CliError;
use crate::io::{csv_bytes, csv_records, svg_plot, Outputs, Series};
use crate::{InputArgs, OutputArgs, PenaltyArgs, Target};

const DEFAULT_GRID: usize = 1001;
const DEFAULT_TOL: f64 = 1e-12;
const DEFAULT_REPETITIONS: usize = 7;
pub const POINT_CAP_VAR: &str = "CPFIF_POINT_CAP";

/// Reference values of the error table: (RMSE, max curvature error).
const TABLE1_REFERENCE: [(DatasetId, f64, f64); 3] = [
    (DatasetId::LowCurvature, 4.4408e-16, 5.7674),
    (DatasetId::HighCurvature, 0.0390, 3.9932),
    (DatasetId::NoisySine, 0.0060, 2.1922),
];

/// Input settings after merging flags over the config file.
struct Input {
    source: Source,
    scheme: DerivativeScheme,
    base: cpfif::BaseFunction,
}

impl Input {
    fn resolve(file: &FileConfig, args: InputArgs) -> Result<Self, CliError> {
        let defaults = NoiseConfig::default();
        let noise = NoiseConfig {
            n: args.noise_points.or(file.noise_points).unwrap_or(defaults.n),
            seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
            sigma: args.sigma.or(file.sigma).unwrap_or(defaults.sigma),
        };
        // a flag on either input kind replaces both settings from the file
        let (data, dataset) = if args.data.is_some() || args.dataset.is_some() {
            (args.data, args.dataset)
        } else {
            (file.data.clone(), file.dataset.clone())
        };
        Ok(Self {
            source: Source::resolve(data, dataset, noise)?,
            scheme: config::scheme(args.scheme.as_deref().or(file.scheme.as_deref()))?,
            base: config::base(args.base.as_deref().or(file.base.as_deref()))?,
        })
    }

    fn spline(&self) -> Result<SplineModel, CliError> {
        Ok(SplineModel::with_scheme(self.source.load()?, self.scheme))
    }
}

fn output_dir(file: &FileConfig, args: &OutputArgs) -> PathBuf {
    args.out
        .clone()
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn formats(file: &FileConfig, args: &OutputArgs) -> Result<Formats, CliError> {
    if !args.formats.is_empty() {
        Formats::parse(&args.formats)
    } else if let Some(list) = &file.formats {
        Formats::parse(list)
    } else {
        Ok(Formats::default())
    }
}

fn lambda_spec(flag: Option<String>, file: &FileConfig) -> Result<LambdaSpec, CliError> {
    flag.or_else(|| file.lambda.clone())
        .map_or(Ok(LambdaSpec::Table1), |s| s.parse())
}

fn grid_size(flag: Option<usize>, file: &FileConfig) -> usize {
    flag.or(file.grid).unwrap_or(DEFAULT_GRID)
}

fn tolerance(flag: Option<f64>, file: &FileConfig) -> Result<f64, CliError> {
    let tol = flag.or(file.tol).unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0) {
        return Err(CliError::Config(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

fn penalty_config(
    file: &FileConfig,
    args: &PenaltyArgs,
    grid: usize,
    base: cpfif::BaseFunction,
) -> Result<PenaltyConfig, CliError> {
    let d = PenaltyConfig::default();
    Ok(PenaltyConfig {
        grid_size: grid,
        rule: config::rule(args.rule.as_deref().or(file.rule.as_deref()))?,
        lambda_min: args.lambda_min.or(file.lambda_min).unwrap_or(d.lambda_min),
        max_sweeps: args.max_sweeps.or(file.max_sweeps).unwrap_or(d.max_sweeps),
        tolerance: args.opt_tol.or(file.opt_tol).unwrap_or(d.tolerance),
        base,
        ..d
    })
}

fn point_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(POINT_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{POINT_CAP_VAR}='{v}' is not a count"))),
        Err(_) => Ok(None),
    }
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

#[derive(Debug, Serialize)]
struct Chosen {
    mode: &'static str,
    lambda: ScalingVector,
    #[serde(skip_serializing_if = "Option::is_none")]
    curvature_bounds: Option<CurvatureBounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimization: Option<PenaltyResult>,
}

/// Turns a specification into concrete factors for `spline`.
fn choose_lambda(spec: &LambdaSpec, spline: &SplineModel, penalty: &PenaltyConfig) -> Result<Chosen, CliError> {
    let intervals = spline.data().intervals();
    if let Some(lambda) = spec.fixed(intervals)? {
        let mode = match spec {
            LambdaSpec::Table1 => "table1",
            LambdaSpec::Scalar(_) => "scalar",
            _ => "vector",
        };
        return Ok(Chosen {
            mode,
            lambda,
            curvature_bounds: None,
            optimization: None,
        });
    }
    match spec {
        LambdaSpec::Bound(eps) => {
            let c = spline.sup_norms(&Grid::over(spline.data(), cpfif::optimize::SUP_NORM_GRID)?).c;
            let bounds = scaling_bounds(spline, *eps, c)?;
            Ok(Chosen {
                mode: "theorem4",
                lambda: ScalingVector::new(bounds.beta.clone())?,
                curvature_bounds: Some(bounds),
                optimization: None,
            })
        }
        _ => {
            let start = optimizer_start(spline, penalty, None)?;
            let result = minimize_penalty(spline, penalty, &start)?;
            Ok(Chosen {
                mode: "optimize",
                lambda: result.lambda.clone(),
                curvature_bounds: None,
                optimization: Some(result),
            })
        }
    }
}

/// The given start, or the reference pattern, pulled inside the box.
fn optimizer_start(
    spline: &SplineModel,
    penalty: &PenaltyConfig,
    init: Option<&LambdaSpec>,
) -> Result<ScalingVector, CliError> {
    let intervals = spline.data().intervals();
    let bounds = penalty.resolve_bounds(spline)?;
    let raw = match init {
        Some(spec) => spec.fixed(intervals)?.ok_or_else(|| {
            CliError::Config("the optimizer start must be a list, a scalar or table1".into())
        })?,
        None => cyclic_lambda(&TABLE1_LAMBDA, intervals)?,
    };
    Ok(ScalingVector::new(
        raw.values()
            .iter()
            .zip(&bounds)
            .map(|(v, b)| v.clamp(-b, *b))
            .collect(),
    )?)
}

fn build(spline: &SplineModel, lambda: &ScalingVector, base: cpfif::BaseFunction) -> Result<FifModel, CliError> {
    let mut model = FifModel::curvature_preserving_with(lambda.clone(), spline.clone(), base)?;
    if let Some(cap) = point_cap()? {
        model = model.with_point_cap(cap);
    }
    Ok(model)
}

#[derive(Debug, Serialize)]
struct FitSummary {
    dataset: String,
    points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    scheme: DerivativeScheme,
    base: cpfif::BaseFunction,
    lambda_mode: &'static str,
    lambda: Vec<f64>,
    bounds: Bounds,
    grid_size: usize,
    rmse: f64,
    max_abs_error: f64,
    max_curvature_error: f64,
    rms_curvature_error: f64,
    first_derivative: DerivativeSource,
    second_derivative: DerivativeSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimization: Option<PenaltyResult>,
}

#[derive(Debug, Serialize)]
struct Bounds {
    map_ratios: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    curvature: Option<CurvatureBounds>,
}

#[allow(clippy::too_many_arguments)]
pub fn fit(
    file: &FileConfig,
    input: InputArgs,
    lambda: Option<String>,
    grid: Option<usize>,
    tol: Option<f64>,
    refine: Option<usize>,
    penalty: PenaltyArgs,
    output: OutputArgs,
) -> Result<(), CliError> {
    let input = Input::resolve(file, input)?;
    let spec = lambda_spec(lambda, file)?;
    let n = grid_size(grid, file);
    let tol = tolerance(tol, file)?;
    let formats = formats(file, &output)?;
    let dir = output_dir(file, &output);
    let spline = input.spline()?;
    let penalty = penalty_config(file, &penalty, n, input.base)?;

    let chosen = choose_lambda(&spec, &spline, &penalty)?;
    let model = build(&spline, &chosen.lambda, input.base)?;
    let grid = Grid::over(spline.data(), n)?;
    let curve = model.sample(&grid, tol)?;
    let kf = curvature_of(&curve);
    let ks = spline_curvature(&spline, &grid)?;
    let dev = curvature_deviation(&kf, &ks)?;
    let s: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| spline.eval(x, 0))
        .collect::<Result<_, _>>()?;
    let diff: Vec<f64> = curve.f.iter().zip(&s).map(|(a, b)| a - b).collect();
    let rmse = (diff.iter().map(|d| d * d).sum::<f64>() / diff.len() as f64).sqrt();

    let mut out = Outputs::default();
    if formats.csv {
        let rows = (0..grid.len()).map(|i| {
            vec![
                grid.points()[i],
                curve.f[i],
                curve.f1[i],
                curve.f2[i],
                s[i],
                kf.kappa[i],
                ks.kappa[i],
            ]
        });
        out.add("curve.csv", csv_bytes(&["x", "F", "F1", "F2", "S", "kF", "kS"], rows)?);
    }
    if let Some(depth) = refine {
        let pts = model.refine_attractor(depth)?;
        let rows = pts.x.iter().zip(&pts.f).map(|(x, f)| vec![*x, *f]);
        out.add("attractor.csv", csv_bytes(&["x", "F"], rows)?);
    }
    if formats.json {
        let summary = FitSummary {
            dataset: input.source.label(),
            points: spline.data().len(),
            seed: input.source.seed(),
            scheme: input.scheme,
            base: input.base,
            lambda_mode: chosen.mode,
            lambda: chosen.lambda.values().to_vec(),
            bounds: Bounds {
                map_ratios: AffineMaps::new(spline.data()).ratios().to_vec(),
                curvature: chosen.curvature_bounds,
            },
            grid_size: n,
            rmse,
            max_abs_error: diff.iter().fold(0.0, |m, d| m.max(d.abs())),
            max_curvature_error: dev.max_err,
            rms_curvature_error: dev.rmse,
            first_derivative: curve.f1_source,
            second_derivative: curve.f2_source,
            optimization: chosen.optimization,
        };
        out.add_json("summary.json", &summary)?;
    }
    if formats.svg {
        let x = grid.points();
        out.add(
            "curve.svg",
            svg_plot(
                &format!("{}: F and S", input.source.label()),
                &[
                    Series { label: "F".into(), x, y: &curve.f },
                    Series { label: "S".into(), x, y: &s },
                ],
            )
            .into_bytes(),
        );
        out.add(
            "curvature.svg",
            svg_plot(
                &format!("{}: curvature", input.source.label()),
                &[
                    Series { label: "κ_F".into(), x, y: &kf.kappa },
                    Series { label: "κ_S".into(), x, y: &ks.kappa },
                ],
            )
            .into_bytes(),
        );
    }
    if out.is_empty() {
        return Err(CliError::Config("no output format selected".into()));
    }
    print_written(&out.commit(&dir)?);
    Ok(())
}

pub fn eval(
    file: &FileConfig,
    input: InputArgs,
    lambda: Option<String>,
    xs: &str,
    order: usize,
    tol: Option<f64>,
) -> Result<(), CliError> {
    let input = Input::resolve(file, input)?;
    let spec = lambda_spec(lambda, file)?;
    let tol = tolerance(tol, file)?;
    if order > 2 {
        return Err(CliError::Config(format!("derivative order must be 0, 1 or 2, got {order}")));
    }
    let xs: Vec<f64> = xs
        .split(',')
        .map(|v| v.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("bad abscissa list '{xs}'")))?;
    let spline = input.spline()?;
    let penalty = penalty_config(file, &PenaltyArgs::empty(), grid_size(None, file), input.base)?;
    let chosen = choose_lambda(&spec, &spline, &penalty)?;
    let model = build(&spline, &chosen.lambda, input.base)?;
    let values = xs
        .iter()
        .map(|&x| Ok(vec![x, model.eval_derivative(x, order, tol)?]))
        .collect::<Result<Vec<_>, CliError>>()?;
    let column = ["F", "F1", "F2"][order];
    let bytes = csv_bytes(&["x", column], values)?;
    print!("{}", String::from_utf8_lossy(&bytes));
    Ok(())
}

#[derive(Debug, Serialize)]
struct CurvatureSummary {
    dataset: String,
    lambda: Vec<f64>,
    grid_size: usize,
    max_curvature_error: f64,
    rms_curvature_error: f64,
    source: cpfif::CurvatureSource,
    /// Menger curvature at interior knots.
    knot_x: Vec<f64>,
    knot_menger: Vec<f64>,
    knot_spline: Vec<f64>,
}

pub fn curvature(
    file: &FileConfig,
    input: InputArgs,
    lambda: Option<String>,
    grid: Option<usize>,
    tol: Option<f64>,
    output: OutputArgs,
) -> Result<(), CliError> {
    let input = Input::resolve(file, input)?;
    let spec = lambda_spec(lambda, file)?;
    let n = grid_size(grid, file);
    let tol = tolerance(tol, file)?;
    let formats = formats(file, &output)?;
    let dir = output_dir(file, &output);
    let spline = input.spline()?;
    let penalty = penalty_config(file, &PenaltyArgs::empty(), n, input.base)?;
    let chosen = choose_lambda(&spec, &spline, &penalty)?;
    let model = build(&spline, &chosen.lambda, input.base)?;
    let grid = Grid::over(spline.data(), n)?;
    let kf = curvature_of(&model.sample(&grid, tol)?);
    let ks = spline_curvature(&spline, &grid)?;
    let dev = curvature_deviation(&kf, &ks)?;
    let data = spline.data();
    let knot_x = data.x()[1..data.len() - 1].to_vec();
    let knot_spline = knot_x
        .iter()
        .map(|&x| Ok(cpfif::curvature::signed_curvature(spline.eval(x, 1)?, spline.eval(x, 2)?)))
        .collect::<Result<_, cpfif::Error>>()?;

    let mut out = Outputs::default();
    if formats.csv {
        let rows = (0..grid.len()).map(|i| vec![grid.points()[i], kf.kappa[i], ks.kappa[i]]);
        out.add("curvature.csv", csv_bytes(&["x", "kF", "kS"], rows)?);
    }
    if formats.json {
        out.add_json(
            "curvature.json",
            &CurvatureSummary {
                dataset: input.source.label(),
                lambda: chosen.lambda.values().to_vec(),
                grid_size: n,
                max_curvature_error: dev.max_err,
                rms_curvature_error: dev.rmse,
                source: kf.source,
                knot_x,
                knot_menger: discrete_curvature(data),
                knot_spline,
            },
        )?;
    }
    if formats.svg {
        let x = grid.points();
        out.add(
            "curvature.svg",
            svg_plot(
                &format!("{}: curvature", input.source.label()),
                &[
                    Series { label: "κ_F".into(), x, y: &kf.kappa },
                    Series { label: "κ_S".into(), x, y: &ks.kappa },
                ],
            )
            .into_bytes(),
        );
    }
    if out.is_empty() {
        return Err(CliError::Config("no output format selected".into()));
    }
    print_written(&out.commit(&dir)?);
    Ok(())
}

impl PenaltyArgs {
    fn empty() -> Self {
        Self {
            lambda_min: None,
            rule: None,
            max_sweeps: None,
            opt_tol: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct OptimizeSummary {
    dataset: String,
    config: PenaltyConfig,
    start: Vec<f64>,
    result: PenaltyResult,
}

pub fn optimize(
    file: &FileConfig,
    input: InputArgs,
    init: Option<String>,
    grid: Option<usize>,
    penalty: PenaltyArgs,
    output: OutputArgs,
) -> Result<(), CliError> {
    let input = Input::resolve(file, input)?;
    let n = grid_size(grid, file);
    let dir = output_dir(file, &output);
    let spline = input.spline()?;
    let cfg = penalty_config(file, &penalty, n, input.base)?;
    let init = init.map(|s| s.parse::<LambdaSpec>()).transpose()?;
    let start = optimizer_start(&spline, &cfg, init.as_ref())?;
    let result = minimize_penalty(&spline, &cfg, &start)?;
    println!(
        "J = {:e} after {} sweeps (converged: {}), λ = {:?}",
        result.objective,
        result.sweeps,
        result.converged,
        result.lambda.values()
    );
    let mut out = Outputs::default();
    out.add_json(
        "optimize.json",
        &OptimizeSummary {
            dataset: input.source.label(),
            config: cfg,
            start: start.values().to_vec(),
            result,
        },
    )?;
    print_written(&out.commit(&dir)?);
    Ok(())
}

fn parse_counts(flag: Option<String>, file: &FileConfig) -> Result<Vec<usize>, CliError> {
    let counts = match flag {
        Some(s) => s
            .split(',')
            .map(|v| v.trim().parse())
            .collect::<Result<Vec<usize>, _>>()
            .map_err(|_| CliError::Config(format!("bad count list '{s}'")))?,
        None => file.counts.clone().unwrap_or_else(|| BENCH_COUNTS.to_vec()),
    };
    if counts.is_empty() || counts.iter().any(|&c| c < 2) {
        return Err(CliError::Config("point counts must be at least 2".into()));
    }
    Ok(counts)
}

struct TimedDataset {
    label: String,
    matrix: cpfif::analysis::TimingMatrix,
}

fn timing_markdown(rows: &[TimedDataset], counts: &[usize]) -> String {
    let mut md = String::from("| Dataset | Method |");
    for c in counts {
        md.push_str(&format!(" {c} pts |"));
    }
    md.push_str(" FIF/cubic |\n|---|---|");
    md.push_str(&"---|".repeat(counts.len() + 1));
    md.push('\n');
    for t in rows {
        for method in Method::ALL {
            md.push_str(&format!("| {} | {} |", t.label, method.name()));
            for &c in counts {
                match t.matrix.median(method, c) {
                    Some(v) => md.push_str(&format!(" {v:.3e} |")),
                    None => md.push_str(" - |"),
                }
            }
            if method == Method::Fif {
                let mean = t.matrix.overhead.iter().map(|o| o.1).sum::<f64>() / t.matrix.overhead.len().max(1) as f64;
                md.push_str(&format!(" {mean:.0}x |\n"));
            } else {
                md.push_str(" |\n");
            }
        }
    }
    md.push_str(&format!(
        "\nMedian seconds per build-and-evaluate run. Reference FIF/cubic overhead band: {}-{}x.\n",
        REFERENCE_OVERHEAD.0, REFERENCE_OVERHEAD.1
    ));
    md
}

fn timing_csv(rows: &[TimedDataset]) -> Result<Vec<u8>, CliError> {
    let mut records = Vec::new();
    for t in rows {
        for cell in &t.matrix.cells {
            let ratio = t
                .matrix
                .overhead
                .iter()
                .find(|o| o.0 == cell.count)
                .map(|o| o.1.to_string())
                .unwrap_or_default();
            records.push(vec![
                t.label.clone(),
                cell.method.name().to_string(),
                cell.count.to_string(),
                cell.median.to_string(),
                ratio,
            ]);
        }
    }
    csv_records(&["dataset", "method", "count", "median_seconds", "fif_over_cubic"], &records)
}

pub fn bench(
    file: &FileConfig,
    input: InputArgs,
    repetitions: Option<usize>,
    counts: Option<String>,
    output: OutputArgs,
) -> Result<(), CliError> {
    let input = Input::resolve(file, input)?;
    let reps = repetitions.or(file.repetitions).unwrap_or(DEFAULT_REPETITIONS);
    let counts = parse_counts(counts, file)?;
    let dir = output_dir(file, &output);
    let data = input.source.load()?;
    let lambda = cyclic_lambda(&TABLE1_LAMBDA, data.intervals())?;
    let matrix = timing_bench(&data, &lambda, &Method::ALL, &counts, reps)?;
    let rows = [TimedDataset {
        label: input.source.label(),
        matrix,
    }];
    let md = timing_markdown(&rows, &counts);
    print!("{md}");
    let mut out = Outputs::default();
    out.add("bench.md", md.into_bytes());
    out.add("bench.csv", timing_csv(&rows)?);
    out.add_json("bench.json", &rows[0].matrix)?;
    print_written(&out.commit(&dir)?);
    Ok(())
}

fn canonical(id: DatasetId, seed: u64) -> Result<DataSet, CliError> {
    Ok(canonical_dataset(id, &NoiseConfig { seed, ..NoiseConfig::default() })?)
}

pub fn reproduce(
    file: &FileConfig,
    target: Target,
    seed: Option<u64>,
    grid: Option<usize>,
    repetitions: Option<usize>,
    output: OutputArgs,
) -> Result<(), CliError> {
    let seed = seed.or(file.seed).unwrap_or(NoiseConfig::default().seed);
    let n = grid_size(grid, file);
    let dir = output_dir(file, &output);
    let scheme = config::scheme(file.scheme.as_deref())?;
    let mut out = Outputs::default();
    match target {
        Target::Table1 => {
            let mut md = String::from(
                "| Dataset | λ | RMSE ‖F − S‖ | Max curvature error | Reference RMSE | Reference max curvature error |\n|---|---|---|---|---|---|\n",
            );
            let mut reports = Vec::new();
            let mut records = Vec::new();
            for (id, ref_rmse, ref_kappa) in TABLE1_REFERENCE {
                let data = canonical(id, seed)?;
                let lambda = cyclic_lambda(&TABLE1_LAMBDA, data.intervals())?;
                let mut r = rmse_report(id.name(), &data, &lambda, &Grid::over(&data, n)?, scheme)?;
                if id == DatasetId::NoisySine {
                    r.seed = Some(seed);
                }
                md.push_str(&format!(
                    "| {id} | {:?} | {:.4e} | {:.4} | {ref_rmse} | {ref_kappa} |\n",
                    TABLE1_LAMBDA, r.rmse, r.max_curvature_error
                ));
                records.push(vec![
                    id.name().to_string(),
                    r.rmse.to_string(),
                    r.max_curvature_error.to_string(),
                    ref_rmse.to_string(),
                    ref_kappa.to_string(),
                ]);
                reports.push(r);
            }
            print!("{md}");
            out.add("table1.md", md.into_bytes());
            out.add(
                "table1.csv",
                csv_records(
                    &["dataset", "rmse", "max_curvature_error", "reference_rmse", "reference_max_curvature_error"],
                    &records,
                )?,
            );
            out.add_json("table1.json", &reports)?;
        }
        Target::Table2 => {
            let reps = repetitions.or(file.repetitions).unwrap_or(DEFAULT_REPETITIONS);
            let mut rows = Vec::new();
            for id in DatasetId::ALL {
                let data = canonical(id, seed)?;
                let lambda = cyclic_lambda(&TABLE1_LAMBDA, data.intervals())?;
                rows.push(TimedDataset {
                    label: id.name().into(),
                    matrix: timing_bench(&data, &lambda, &Method::ALL, &BENCH_COUNTS, reps)?,
                });
            }
            let md = timing_markdown(&rows, &BENCH_COUNTS);
            print!("{md}");
            out.add("table2.md", md.into_bytes());
            out.add("table2.csv", timing_csv(&rows)?);
            let json: Vec<_> = rows.iter().map(|r| (&r.label, &r.matrix)).collect();
            out.add_json("table2.json", &json)?;
        }
        Target::FigSensitivity => {
            let mut md = String::from("| Dataset | λ | ‖F′ − S′‖∞ |\n|---|---|---|\n");
            for id in DatasetId::ALL {
                let spline = SplineModel::with_scheme(canonical(id, seed)?, scheme);
                let grid = Grid::over(spline.data(), n)?;
                let r = sensitivity_sweep(&spline, &SENSITIVITY_LAMBDAS, &grid)?;
                let mut header = vec!["x".to_string(), "S1".to_string()];
                header.extend(r.curves.iter().map(|c| format!("F1_{}", c.lambda)));
                let rows = (0..r.x.len()).map(|i| {
                    let mut row = vec![r.x[i], r.spline_derivative[i]];
                    row.extend(r.curves.iter().map(|c| c.derivative[i]));
                    row
                });
                let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
                out.add(format!("sensitivity_{id}.csv"), csv_bytes(&header_refs, rows)?);
                let mut series = vec![Series {
                    label: "S'".into(),
                    x: &r.x,
                    y: &r.spline_derivative,
                }];
                for c in &r.curves {
                    md.push_str(&format!("| {id} | {} | {:.4e} |\n", c.lambda, c.deviation));
                    if c.lambda > 0.0 {
                        series.push(Series {
                            label: format!("F', λ = {}", c.lambda),
                            x: &r.x,
                            y: &c.derivative,
                        });
                    }
                }
                for l in &r.skipped {
                    md.push_str(&format!("| {id} | {l} | skipped (|λ| ≥ a) |\n"));
                }
                out.add(
                    format!("sensitivity_{id}.svg"),
                    svg_plot(&format!("{id}: first derivatives"), &series).into_bytes(),
                );
            }
            print!("{md}");
            out.add("sensitivity.md", md.into_bytes());
        }
        Target::Stability => {
            let mut md = String::from(
                "| Dataset | δ | ‖Δλ‖∞ | max |κ_F − κ_F̄| |\n|---|---|---|---|\n",
            );
            let mut records = Vec::new();
            let mut reports = Vec::new();
            for id in DatasetId::ALL {
                let spline = SplineModel::with_scheme(canonical(id, seed)?, scheme);
                let base = cyclic_lambda(&TABLE1_LAMBDA, spline.data().intervals())?;
                let r = stability_sweep(&spline, &base, &halving_deltas(8), &Grid::over(spline.data(), n)?)?;
                for row in &r.rows {
                    md.push_str(&format!(
                        "| {id} | {:.4e} | {:.4e} | {:.4e} |\n",
                        row.delta, row.perturbation, row.deviation
                    ));
                    records.push(vec![
                        id.name().to_string(),
                        row.delta.to_string(),
                        row.perturbation.to_string(),
                        row.deviation.to_string(),
                    ]);
                }
                let ratio = r
                    .smallest_ratio()
                    .map_or("n/a".to_string(), |v| format!("{v:.3}"));
                md.push_str(&format!("| {id} | fitted C1 = {:.4} | smallest halving ratio = {ratio} | |\n", r.c1));
                reports.push((id.name(), r));
            }
            print!("{md}");
            out.add("stability.md", md.into_bytes());
            out.add(
                "stability.csv",
                csv_records(&["dataset", "delta", "perturbation", "deviation"], &records)?,
            );
            out.add_json("stability.json", &reports)?;
        }
    }
    print_written(&out.commit(&dir)?);
    Ok(())
}
