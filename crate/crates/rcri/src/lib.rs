//! Relative cumulative residual information: closed forms, quadrature,
//! kernel estimation, simulation and characterization checks.

pub mod analytic;
pub mod characterization;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod inputs;
pub mod montecarlo;
pub mod numerics;
pub mod photometry;
pub mod quadrature;
pub mod special;

pub use analytic::MeasureParams;
pub use distributions::{DistributionSpec, Family, Sample};
pub use error::{Error, ExitClass, Result};
pub use estimators::{EstimatorOptions, Kernel, KernelSurvivalEstimate};
pub use montecarlo::{SimConfig, SimReport, TruthRule};
pub use photometry::{Band, BandPair, BandTable, EpochRecord};
pub use quadrature::{QuadratureOptions, SurvivalCurve};
