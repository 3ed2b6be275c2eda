//! Curves constrained to the unit sphere.

use super::curve::ParamCurve;
use super::domain::Domain;
use crate::num::vecn;
use crate::{Error, Result};

/// Samples may deviate from the sphere by at most this much.
pub const SPHERE_TOL: f64 = 1e-10;

/// A `ParamCurve` whose samples sit on the unit sphere. Samples are
/// renormalized on construction; evaluation between samples can be
/// renormalized on demand via [`SphericalCurve::eval_unit`].
#[derive(Debug, Clone)]
pub struct SphericalCurve {
    curve: ParamCurve,
}

impl SphericalCurve {
    /// Renormalize samples onto the sphere and fit. Fails if any sample is
    /// more than `loose_tol` off the sphere before renormalization.
    pub fn from_samples_renormalized(
        domain: Domain,
        mut samples: Vec<f64>,
        dim: usize,
        degree: usize,
        loose_tol: f64,
    ) -> Result<Self> {
        for (i, row) in samples.chunks_mut(dim).enumerate() {
            let n = vecn::norm(row);
            if (n - 1.0).abs() > loose_tol {
                return Err(Error::DomainMismatch(format!(
                    "sample {i} has norm {n:.6}, not on the unit sphere"
                )));
            }
            for x in row.iter_mut() {
                *x /= n;
            }
        }
        let curve = ParamCurve::from_samples(domain, samples, dim, degree)?;
        Ok(Self { curve })
    }

    pub fn from_fn(
        domain: Domain,
        n: usize,
        dim: usize,
        degree: usize,
        f: impl FnMut(f64, &mut [f64]),
    ) -> Result<Self> {
        let curve = ParamCurve::from_fn(domain, n, dim, degree, f)?;
        Self::from_samples_renormalized(
            *curve.domain(),
            curve.samples().to_vec(),
            curve.dim(),
            curve.degree(),
            1e-2,
        )
    }

    pub fn curve(&self) -> &ParamCurve {
        &self.curve
    }

    pub fn into_curve(self) -> ParamCurve {
        self.curve
    }

    pub fn domain(&self) -> &Domain {
        self.curve.domain()
    }

    pub fn dim(&self) -> usize {
        self.curve.dim()
    }

    pub fn n_samples(&self) -> usize {
        self.curve.n_samples()
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.curve.eval(t)
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        self.curve.eval_into(t, out);
    }

    /// Evaluate and project back onto the sphere.
    pub fn eval_unit(&self, t: f64) -> Vec<f64> {
        let mut p = self.curve.eval(t);
        vecn::normalize_mut(&mut p);
        p
    }

    pub fn deriv(&self, t: f64, order: usize) -> Vec<f64> {
        self.curve.deriv(t, order)
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.curve.speed(t)
    }

    /// Max deviation of the sample norms from 1.
    pub fn sphere_residual(&self) -> f64 {
        let dim = self.dim();
        self.curve
            .samples()
            .chunks(dim)
            .map(|row| (vecn::norm(row) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn check_on_sphere(&self) -> Result<()> {
        let r = self.sphere_residual();
        if r > SPHERE_TOL {
            return Err(Error::DomainMismatch(format!(
                "spherical curve drifted off the sphere by {r:.3e}"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renormalizes_and_checks() {
        let d = Domain::circle(0.0, std::f64::consts::TAU);
        let s = SphericalCurve::from_fn(d, 128, 3, 5, |t, out| {
            // slightly off-sphere input gets projected
            let r = 1.0 + 1e-4 * t.sin();
            out[0] = r * t.cos();
            out[1] = r * t.sin();
            out[2] = 0.0;
        })
        .unwrap();
        assert!(s.sphere_residual() < 1e-15);
        s.check_on_sphere().unwrap();
        let p = s.eval_unit(0.7);
        assert!((vecn::norm(&p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_far_from_sphere() {
        let d = Domain::interval(0.0, 1.0);
        let r = SphericalCurve::from_samples_renormalized(
            d,
            (0..32).flat_map(|i| vec![2.0 + i as f64, 0.0, 0.0]).collect(),
            3,
            5,
            1e-6,
        );
        assert!(r.is_err());
    }
}
