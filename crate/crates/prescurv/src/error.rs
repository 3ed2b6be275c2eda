//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate curve: minimum speed {min_speed:.3e} below threshold {threshold:.3e}")]
    DegenerateCurve { min_speed: f64, threshold: f64 },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("density must be positive; found {value:.3e} at t = {t:.6}")]
    NonpositiveDensity { t: f64, value: f64 },

    #[error("partition needs k > ambient dimension: k = {k}, n = {n}")]
    BadK { k: usize, n: usize },

    #[error("point lies outside the steering ball: |x - x0| = {dist:.3e} > R = {radius:.3e}")]
    OutsideBall { dist: f64, radius: f64 },

    #[error("barycentric coefficient {index} nonpositive ({value:.3e}); shrink R")]
    NegativeCoefficient { index: usize, value: f64 },

    #[error("ball radius too large: {reason}")]
    RTooLarge { reason: String },

    #[error("target speed does not dominate the reparametrized tantrix speed (margin {margin:.3e} at t = {t:.6})")]
    SpeedMarginViolated { t: f64, margin: f64 },

    #[error("cannot split the tantrix into admissible subintervals: {0}")]
    CannotSegment(String),

    #[error("spherical cap of radius {cap:.3e} cannot host a loop of length {requested:.3e}")]
    CapTooSmall { cap: f64, requested: f64 },

    #[error("no admissible nonflat perturbation within budget {budget:.3e} after {attempts} attempts")]
    PerturbationFailed { budget: f64, attempts: usize },

    #[error("ball radius underflow: R = {radius:.3e} fell below R_min = {min:.3e} ({context})")]
    RUnderflow {
        radius: f64,
        min: f64,
        context: String,
    },

    #[error("solver failed to converge: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("target curvature must exceed the curve's curvature; margin {margin:.3e} at t = {t:.6}")]
    InfeasibleMargin { t: f64, margin: f64 },

    #[error("curve is not embedded: samples {i} and {j} are {dist:.3e} apart")]
    NotEmbedded { i: usize, j: usize, dist: f64 },

    #[error("isotopy certificate failed at homotopy time {t:.3}")]
    CertificateFailed { t: f64 },

    #[error("segment junction mismatch at t = {t:.6}: gap {gap:.3e} exceeds {tol:.3e}")]
    JunctionMismatch { t: f64, gap: f64, tol: f64 },

    #[error("unknown preset: {0}")]
    BadPreset(String),

    #[error("unsupported export format: {0}")]
    UnsupportedFormat(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("expression error: {0}")]
    Expr(String),

    #[error(transparent)]
    Spline(#[from] crate::spline::SplineError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
