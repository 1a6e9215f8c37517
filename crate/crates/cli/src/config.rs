//! Run settings: JSON config file merged under command-line flags.

use std::path::{Path, PathBuf};

use cpfif::analysis::{canonical_dataset, cyclic_lambda, DatasetId, NoiseConfig, TABLE1_LAMBDA};
use cpfif::{BaseFunction, DataSet, DerivativeScheme, QuadratureRule, ScalingVector};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::CliError;
use crate::io::read_points;

/// Settings accepted from a `--config` file. Every field is optional; a flag
/// given on the command line wins over the file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub data: Option<PathBuf>,
    pub dataset: Option<String>,
    pub lambda: Option<String>,
    pub scheme: Option<String>,
    pub base: Option<String>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub noise_points: Option<usize>,
    pub sigma: Option<f64>,
    pub lambda_min: Option<f64>,
    pub rule: Option<String>,
    pub max_sweeps: Option<usize>,
    pub opt_tol: Option<f64>,
    pub repetitions: Option<usize>,
    pub counts: Option<Vec<usize>>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Parses a snake_case name through the type's serde representation.
pub fn parse_name<T: DeserializeOwned>(what: &str, s: &str) -> Result<T, CliError> {
    let key = s.trim().to_ascii_lowercase().replace('-', "_");
    serde_json::from_value(serde_json::Value::String(key))
        .map_err(|_| CliError::Config(format!("unknown {what} '{s}'")))
}

pub fn scheme(name: Option<&str>) -> Result<DerivativeScheme, CliError> {
    name.map_or(Ok(DerivativeScheme::default()), |s| parse_name("derivative scheme", s))
}

pub fn base(name: Option<&str>) -> Result<BaseFunction, CliError> {
    name.map_or(Ok(BaseFunction::default()), |s| parse_name("base function", s))
}

pub fn rule(name: Option<&str>) -> Result<QuadratureRule, CliError> {
    name.map_or(Ok(QuadratureRule::default()), |s| parse_name("quadrature rule", s))
}

/// Where the points come from.
#[derive(Debug, Clone)]
pub enum Source {
    File(PathBuf),
    Canonical(DatasetId, NoiseConfig),
}

impl Source {
    pub fn resolve(
        data: Option<PathBuf>,
        dataset: Option<String>,
        noise: NoiseConfig,
    ) -> Result<Self, CliError> {
        match (data, dataset) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "give either a data file or a canonical dataset, not both".into(),
            )),
            (Some(path), None) => Ok(Self::File(path)),
            (None, Some(name)) => Ok(Self::Canonical(name.parse()?, noise)),
            (None, None) => Err(CliError::Config(
                "no input: pass --data <csv> or --dataset <id>".into(),
            )),
        }
    }

    pub fn load(&self) -> Result<DataSet, CliError> {
        match self {
            Self::File(path) => read_points(path),
            Self::Canonical(id, noise) => Ok(canonical_dataset(*id, noise)?),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::File(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "data".into()),
            Self::Canonical(id, _) => id.name().into(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Canonical(DatasetId::NoisySine, noise) => Some(noise.seed),
            _ => None,
        }
    }
}

/// How the scaling factors are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSpec {
    /// One value per interval.
    Vector(Vec<f64>),
    /// The same value on every interval.
    Scalar(f64),
    /// The reference pattern `[0.01, 0.011, 0.012, 0.013]`, repeated cyclically.
    Table1,
    /// Minimize the curvature penalty.
    Optimize,
    /// `λ_s = β_s` from the curvature bounds at tolerance `ε`.
    Bound(f64),
}

impl std::str::FromStr for LambdaSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        let bad = |what: &str| CliError::Config(format!("bad λ specification '{s}': {what}"));
        if s.eq_ignore_ascii_case("optimize") {
            return Ok(Self::Optimize);
        }
        if s.eq_ignore_ascii_case("table1") {
            return Ok(Self::Table1);
        }
        if let Some(eps) = s.strip_prefix("theorem4:") {
            let eps: f64 = eps.trim().parse().map_err(|_| bad("ε is not a number"))?;
            if !(eps > 0.0) {
                return Err(bad("ε must be positive"));
            }
            return Ok(Self::Bound(eps));
        }
        let values = s
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad("expected numbers, 'table1', 'optimize' or 'theorem4:<ε>'"))?;
        match values.as_slice() {
            [v] => Ok(Self::Scalar(*v)),
            _ => Ok(Self::Vector(values)),
        }
    }
}

impl LambdaSpec {
    /// Factors for the fixed modes; `None` for the modes that need a model.
    pub fn fixed(&self, intervals: usize) -> Result<Option<ScalingVector>, CliError> {
        Ok(match self {
            Self::Vector(v) => {
                if v.len() != intervals {
                    return Err(CliError::Config(format!(
                        "{} scaling factors for {intervals} intervals",
                        v.len()
                    )));
                }
                Some(ScalingVector::new(v.clone())?)
            }
            Self::Scalar(v) => Some(ScalingVector::uniform(intervals, *v)?),
            Self::Table1 => Some(cyclic_lambda(&TABLE1_LAMBDA, intervals)?),
            Self::Optimize | Self::Bound(_) => None,
        })
    }
}

/// Output formats requested for a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Formats {
    pub fn parse(list: &[String]) -> Result<Self, CliError> {
        let mut f = Formats {
            csv: false,
            json: false,
            svg: false,
        };
        for item in list.iter().flat_map(|s| s.split(',')) {
            match item.trim() {
                "csv" => f.csv = true,
                "json" => f.json = true,
                "svg" => f.svg = true,
                other => return Err(CliError::Config(format!("unknown output format '{other}'"))),
            }
        }
        Ok(f)
    }
}

impl Default for Formats {
    fn default() -> Self {
        Self {
            csv: true,
            json: true,
            svg: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_specs() {
        assert_eq!("0.1".parse::<LambdaSpec>().unwrap(), LambdaSpec::Scalar(0.1));
        assert_eq!(
            "0.1, -0.2".parse::<LambdaSpec>().unwrap(),
            LambdaSpec::Vector(vec![0.1, -0.2])
        );
        assert_eq!("optimize".parse::<LambdaSpec>().unwrap(), LambdaSpec::Optimize);
        assert_eq!("theorem4:0.5".parse::<LambdaSpec>().unwrap(), LambdaSpec::Bound(0.5));
        assert!("theorem4:-1".parse::<LambdaSpec>().is_err());
        assert!("fast".parse::<LambdaSpec>().is_err());
    }

    #[test]
    fn fixed_lambda_lengths() {
        assert!(LambdaSpec::Vector(vec![0.1; 3]).fixed(4).is_err());
        let t = LambdaSpec::Table1.fixed(8).unwrap().unwrap();
        assert_eq!(t.values()[4], 0.01);
        assert!(LambdaSpec::Optimize.fixed(4).unwrap().is_none());
    }

    #[test]
    fn names() {
        assert_eq!(scheme(Some("three-point")).unwrap(), DerivativeScheme::ThreePoint);
        assert_eq!(rule(Some("trapezoid")).unwrap(), QuadratureRule::Trapezoid);
        assert_eq!(base(None).unwrap(), BaseFunction::EndpointQuintic);
        assert!(scheme(Some("spline")).is_err());
    }

    #[test]
    fn formats() {
        let f = Formats::parse(&["csv,svg".into()]).unwrap();
        assert!(f.csv && f.svg && !f.json);
        assert!(Formats::parse(&["png".into()]).is_err());
    }
}
