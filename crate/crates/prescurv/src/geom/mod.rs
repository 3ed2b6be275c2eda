//! Curve representation and calculus primitives.

pub mod curve;
pub mod diffeo;
pub mod domain;
pub mod io;
pub mod kappa;
pub mod ops;
pub mod spherical;

pub use curve::{ParamCurve, ScalarField, DEFAULT_DEGREE, SPEED_TOL};
pub use diffeo::Diffeo;
pub use domain::{Domain, DomainKind};
pub use kappa::CurvatureSpec;
pub use ops::{
    average, c1_distance, c1_norm, compose, curvature, curvature_at, curve_length,
    integrate_tantrix, mass_and_cm, mass_reparam, resample_unit_speed, tantrix,
};
pub use spherical::{SphericalCurve, SPHERE_TOL};
