//! Monotone reparametrizations between domains.

use super::curve::ScalarField;
use super::domain::Domain;
use crate::num::invert_monotone;
use crate::{Error, Result};

/// A monotone map phi between two domains, stored as a sampled lift with
/// spline reconstruction. For circle domains the lift satisfies
/// phi(t + P) = phi(t) + P' (a degree-one map).
#[derive(Debug, Clone)]
pub struct Diffeo {
    from: Domain,
    to: Domain,
    /// Lift values at uniform parameters of `from`, endpoint included.
    lift: ScalarField,
}

impl Diffeo {
    /// Build from lift samples at the uniform (endpoint-inclusive) grid of
    /// `from`. Monotonicity (phi' > 0) is verified on the grid.
    pub fn from_lift_samples(from: Domain, to: Domain, samples: Vec<f64>, degree: usize) -> Result<Self> {
        let n = samples.len();
        assert!(n >= 2);
        let first = samples[0];
        let last = samples[n - 1];
        if (first - to.a).abs() > 1e-8 * to.len() || (last - to.b).abs() > 1e-8 * to.len() {
            return Err(Error::DomainMismatch(format!(
                "diffeo endpoints [{first:.6}, {last:.6}] do not match target [{}, {}]",
                to.a, to.b
            )));
        }
        // the lift is a plain interval function even for circle domains
        let lift_dom = Domain::interval(from.a, from.b);
        let lift = ScalarField::from_samples(lift_dom, samples, degree)?;
        let d = Self { from, to, lift };
        d.require_increasing()?;
        Ok(d)
    }

    pub fn identity(domain: Domain, n: usize, degree: usize) -> Self {
        let lift_dom = Domain::interval(domain.a, domain.b);
        let samples = lift_dom.sample_params(n);
        let lift = ScalarField::from_samples(lift_dom, samples, degree).expect("identity lift");
        Self {
            from: domain,
            to: domain,
            lift,
        }
    }

    pub fn from_domain(&self) -> &Domain {
        &self.from
    }

    pub fn to_domain(&self) -> &Domain {
        &self.to
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.from.is_circle() {
            let period_from = self.from.len();
            let period_to = self.to.len();
            let k = ((t - self.from.a) / period_from).floor();
            let t0 = t - k * period_from;
            self.lift.eval(t0) + k * period_to
        } else {
            self.lift.eval(t)
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let t0 = if self.from.is_circle() {
            let period = self.from.len();
            t - ((t - self.from.a) / period).floor() * period
        } else {
            t
        };
        self.lift.deriv(t0, 1)
    }

    /// Invert by monotone root finding, to about 1e-12 in parameter.
    pub fn invert(&self, y: f64) -> f64 {
        let (a, b) = (self.from.a, self.from.b);
        if self.from.is_circle() {
            let period_to = self.to.len();
            let k = ((y - self.to.a) / period_to).floor();
            let y0 = y - k * period_to;
            let x0 = invert_monotone(
                |t| self.lift.eval(t),
                |t| self.lift.deriv(t, 1),
                y0,
                a,
                b,
                1e-13 * (b - a),
            );
            x0 + k * self.from.len()
        } else {
            invert_monotone(
                |t| self.lift.eval(t),
                |t| self.lift.deriv(t, 1),
                y,
                a,
                b,
                1e-13 * (b - a),
            )
        }
    }

    /// Numerical inverse as a sampled diffeo.
    pub fn inverse(&self, n: usize, degree: usize) -> Result<Diffeo> {
        let grid = Domain::interval(self.to.a, self.to.b).sample_params(n);
        let samples: Vec<f64> = grid.iter().map(|&y| self.invert(y)).collect();
        Diffeo::from_lift_samples(self.to, self.from, samples, degree)
    }

    fn require_increasing(&self) -> Result<()> {
        let n = self.lift.samples().len() * 4;
        for i in 0..=n {
            let t = self.from.a + self.from.len() * i as f64 / n as f64;
            let d = self.lift.deriv(t, 1);
            if d <= 0.0 {
                return Err(Error::DomainMismatch(format!(
                    "reparametrization is not increasing at t = {t:.6} (phi' = {d:.3e})"
                )));
            }
        }
        Ok(())
    }

    /// Sup norm of the lift plus sup norm of its derivative.
    pub fn c1_size(&self) -> f64 {
        let n = self.lift.samples().len() * 8;
        let mut v0 = 0.0f64;
        let mut v1 = 0.0f64;
        for i in 0..=n {
            let t = self.from.a + self.from.len() * i as f64 / n as f64;
            v0 = v0.max(self.lift.eval(t).abs());
            v1 = v1.max(self.lift.deriv(t, 1).abs());
        }
        v0 + v1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_inverse() {
        let d = Domain::interval(0.0, 2.0);
        let id = Diffeo::identity(d, 32, 5);
        assert!((id.eval(1.3) - 1.3).abs() < 1e-12);
        assert!((id.deriv(0.7) - 1.0).abs() < 1e-10);

        // phi(t) = (t^2 + t)/2 on [0,1] -> [0,1], phi' = t + 1/2 > 0
        let from = Domain::interval(0.0, 1.0);
        let samples: Vec<f64> = from
            .sample_params(64)
            .iter()
            .map(|t| 0.5 * (t * t + t))
            .collect();
        let phi = Diffeo::from_lift_samples(from, from, samples, 5).unwrap();
        assert!((phi.eval(0.5) - 0.375).abs() < 1e-10);
        assert!((phi.invert(0.375) - 0.5).abs() < 1e-10);
        let inv = phi.inverse(64, 5).unwrap();
        assert!((inv.eval(0.375) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn non_monotone_rejected() {
        let from = Domain::interval(0.0, 1.0);
        let samples: Vec<f64> = from
            .sample_params(64)
            .iter()
            .map(|t| t + 0.4 * (2.0 * std::f64::consts::TAU * t).sin())
            .collect();
        // force matching endpoints but wiggly interior
        assert!(Diffeo::from_lift_samples(from, from, samples, 5).is_err());
    }

    #[test]
    fn circle_lift_degree_one() {
        let c = Domain::circle(0.0, 1.0);
        let lift_dom = Domain::interval(0.0, 1.0);
        let samples: Vec<f64> = lift_dom
            .sample_params(128)
            .iter()
            .map(|t| t + 0.05 * (std::f64::consts::TAU * t).sin())
            .collect();
        let phi = Diffeo::from_lift_samples(c, c, samples, 5).unwrap();
        // degree-one behaviour across the period
        let v = phi.eval(0.3);
        let w = phi.eval(1.3);
        assert!((w - v - 1.0).abs() < 1e-12);
    }
}
