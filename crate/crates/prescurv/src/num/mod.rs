//! Numerical substrate: small-vector helpers, quadrature, banded and dense
//! linear solves, safeguarded root finding, and cumulative integrals.

pub mod banded;
pub mod cumint;
pub mod dense;
pub mod gauss;
pub mod poly;
pub mod rootfind;
pub mod smoothstep;
pub mod vecn;

pub use cumint::MonotoneCum;
pub use dense::DenseLu;
pub use gauss::{gl16, gl8};
pub use poly::Poly;
pub use rootfind::invert_monotone;
pub use smoothstep::Smoothstep;
