//! Curvature-preserving cubic fractal interpolation.
//!
//! The crate builds fractal interpolation functions (FIFs) as attractors of
//! affine iterated function systems anchored at a classical cubic spline,
//! measures how far their curvature drifts from the spline's, and tunes the
//! vertical scaling factors against a curvature-deviation penalty.
//!
//! ```
//! use cpfif::{DataSet, DerivativeScheme, FifModel, ScalingVector, SplineModel};
//!
//! let data = DataSet::from_points(&[(0.0, 0.0), (1.0, 2.0), (2.0, -1.0), (3.0, 2.0), (4.0, 0.0)])?;
//! let spline = SplineModel::with_scheme(data, DerivativeScheme::NaturalSpline);
//! let lambda = ScalingVector::new(vec![0.01, 0.011, 0.012, 0.013])?;
//! let fif = FifModel::curvature_preserving(lambda, spline)?;
//! assert!((fif.eval(2.0, 1e-12)? + 1.0).abs() < 1e-12);
//! # Ok::<(), cpfif::Error>(())
//! ```

pub mod analysis;
pub mod curvature;
pub mod data;
pub mod error;
pub mod fif;
pub mod optimize;
pub mod quadrature;
pub mod spline;

pub use curvature::{CurvatureDeviation, CurvatureProfile, CurvatureSource};
pub use data::{AffineMaps, DataSet, Grid, ScalingVector};
pub use error::{Error, Result};
pub use fif::{BaseFunction, Construction, FifModel, SampledCurve};
pub use spline::{Baseline, BaselineKind, DerivativeScheme, SplineModel, SupNorms};
pub use analysis::{DatasetId, ExperimentReport, NoiseConfig};
pub use optimize::{CurvatureBounds, PenaltyConfig, PenaltyResult};
pub use quadrature::QuadratureRule;
