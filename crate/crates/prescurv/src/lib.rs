//! Curvature prescription for immersed curves.
//!
//! Given a regular curve with positive curvature and a larger target
//! curvature function, this crate synthesizes a C1-close curve of the
//! prescribed curvature by steering the unit tangent indicatrix (tantrix):
//! a density-driven reparametrization moves its average, spherical loop
//! insertion raises its speed, and a ball fixed-point solve matches the
//! average so endpoints and prescribed tangencies are preserved.
//!
//! Modules follow the construction bottom-up: [`geom`] holds curve types and
//! calculus, [`nonflat`] fattens degenerate tantrix hulls, [`density`] builds
//! the steering reparametrizations, [`loops`] inserts the spherical loops,
//! [`solver`] finds the average-matching fixed point, and [`pipeline`] runs
//! the whole construction and its verification.

pub mod density;
pub mod error;
pub mod expr;
pub mod geom;
pub mod loops;
pub mod nonflat;
pub mod num;
pub mod par;
pub mod presets;
pub mod solver;
pub mod spline;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
