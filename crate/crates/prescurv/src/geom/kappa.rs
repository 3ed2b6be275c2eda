//! Target curvature prescriptions.

use super::curve::ScalarField;
use super::domain::Domain;
use crate::expr::Expr;
use crate::{Error, Result};

/// The target curvature, given as a constant, an expression in `t`, or
/// samples aligned to a domain.
#[derive(Debug, Clone)]
pub enum CurvatureSpec {
    Constant(f64),
    Expression(Expr),
    Samples(ScalarField),
}

impl CurvatureSpec {
    pub fn constant(v: f64) -> Self {
        CurvatureSpec::Constant(v)
    }

    pub fn expression(src: &str) -> Result<Self> {
        Ok(CurvatureSpec::Expression(Expr::parse(src)?))
    }

    pub fn from_samples(domain: Domain, values: Vec<f64>, degree: usize) -> Result<Self> {
        Ok(CurvatureSpec::Samples(ScalarField::from_samples(
            domain, values, degree,
        )?))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            CurvatureSpec::Constant(v) => *v,
            CurvatureSpec::Expression(e) => e.eval(t),
            CurvatureSpec::Samples(s) => s.eval(t),
        }
    }

    /// Verify positivity on a dense grid over the domain.
    pub fn require_positive(&self, domain: &Domain, grid: usize) -> Result<()> {
        for i in 0..=grid {
            let t = domain.a + domain.len() * i as f64 / grid as f64;
            let v = self.eval(t);
            if !(v > 0.0) {
                return Err(Error::NonpositiveDensity { t, value: v });
            }
        }
        Ok(())
    }

    /// Rescale to lambda * spec(phi(t)) pulled back through a map.
    pub fn composed_scaled<'a>(
        &'a self,
        scale: f64,
        map: impl Fn(f64) -> f64 + 'a,
    ) -> impl Fn(f64) -> f64 + 'a {
        move |t| scale * self.eval(map(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_kinds() {
        let c = CurvatureSpec::constant(2.0);
        assert_eq!(c.eval(5.0), 2.0);
        let e = CurvatureSpec::expression("2 + sin(t)").unwrap();
        assert!((e.eval(1.0) - (2.0 + 1.0f64.sin())).abs() < 1e-15);
        let d = Domain::interval(0.0, 1.0);
        let s = CurvatureSpec::from_samples(d, (0..32).map(|i| 1.0 + i as f64).collect(), 5).unwrap();
        assert!((s.eval(0.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn positivity_check() {
        let d = Domain::interval(0.0, 4.0);
        let ok = CurvatureSpec::expression("2 + sin(t)").unwrap();
        assert!(ok.require_positive(&d, 256).is_ok());
        let bad = CurvatureSpec::expression("sin(t)").unwrap();
        assert!(bad.require_positive(&d, 256).is_err());
    }
}
