//! Densely sampled curves with spline reconstruction.

use super::domain::{Domain, DomainKind};
use crate::spline::VecSpline;
use crate::{Error, Result};

/// Default spline degree for reconstructions.
pub const DEFAULT_DEGREE: usize = 5;

/// Relative speed floor below which a curve counts as degenerate.
pub const SPEED_TOL: f64 = 1e-6;

/// A curve in R^n stored as uniform samples plus an interpolating spline
/// (clamped for intervals, periodic for circles).
#[derive(Debug, Clone)]
pub struct ParamCurve {
    domain: Domain,
    dim: usize,
    samples: Vec<f64>, // n x dim
    degree: usize,
    spline: VecSpline,
}

impl ParamCurve {
    /// Fit from row-major samples at the domain's uniform parameters.
    pub fn from_samples(
        domain: Domain,
        samples: Vec<f64>,
        dim: usize,
        degree: usize,
    ) -> Result<Self> {
        assert!(dim >= 1, "ambient dimension must be positive");
        assert_eq!(samples.len() % dim, 0);
        let spline = match domain.kind {
            DomainKind::Interval => {
                VecSpline::fit_clamped(domain.a, domain.b, &samples, dim, degree)?
            }
            DomainKind::Circle => {
                VecSpline::fit_periodic(domain.a, domain.b, &samples, dim, degree)?
            }
        };
        Ok(Self {
            domain,
            dim,
            samples,
            degree,
            spline,
        })
    }

    /// Sample a parametric map on the domain grid and fit.
    pub fn from_fn(
        domain: Domain,
        n: usize,
        dim: usize,
        degree: usize,
        mut f: impl FnMut(f64, &mut [f64]),
    ) -> Result<Self> {
        let mut samples = vec![0.0; n * dim];
        for (i, t) in domain.sample_params(n).into_iter().enumerate() {
            f(t, &mut samples[i * dim..(i + 1) * dim]);
        }
        Self::from_samples(domain, samples, dim, degree)
    }

    pub fn domain(&self) -> &Domain {
        self.domain_ref()
    }

    fn domain_ref(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len() / self.dim
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.samples[i * self.dim..(i + 1) * self.dim]
    }

    pub fn params(&self) -> Vec<f64> {
        self.domain.sample_params(self.n_samples())
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        self.spline.eval_into(self.domain.wrap(t), out);
    }

    pub fn deriv_into(&self, t: f64, order: usize, out: &mut [f64]) {
        self.spline.deriv_into(self.domain.wrap(t), order, out);
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out);
        out
    }

    pub fn deriv(&self, t: f64, order: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.deriv_into(t, order, &mut out);
        out
    }

    /// |f'(t)|
    pub fn speed(&self, t: f64) -> f64 {
        let mut d = vec![0.0; self.dim];
        self.deriv_into(t, 1, &mut d);
        crate::num::vecn::norm(&d)
    }

    /// Minimum and maximum speed scanned on a refined grid.
    pub fn speed_range(&self, refine: usize) -> (f64, f64) {
        let n = self.n_samples() * refine.max(1);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let (a, len) = (self.domain.a, self.domain.len());
        let m = if self.domain.is_circle() { n } else { n + 1 };
        for i in 0..m {
            let t = a + len * i as f64 / n as f64;
            let s = self.speed(t);
            lo = lo.min(s);
            hi = hi.max(s);
        }
        (lo, hi)
    }

    /// Regularity check: nonvanishing reconstructed derivative.
    pub fn require_regular(&self) -> Result<()> {
        let (lo, hi) = self.speed_range(4);
        if lo <= SPEED_TOL * hi.max(1e-300) {
            return Err(Error::DegenerateCurve {
                min_speed: lo,
                threshold: SPEED_TOL * hi,
            });
        }
        Ok(())
    }

    /// Refit on n uniform samples of the reconstruction.
    pub fn resample(&self, n: usize) -> Result<Self> {
        let dim = self.dim;
        Self::from_fn(self.domain, n, dim, self.degree, |t, out| {
            self.eval_into(t, out)
        })
    }

    /// Pointwise affine image s * f + v.
    pub fn affine(&self, s: f64, v: &[f64]) -> Result<Self> {
        assert_eq!(v.len(), self.dim);
        let mut samples = self.samples.clone();
        for row in samples.chunks_mut(self.dim) {
            for (x, off) in row.iter_mut().zip(v) {
                *x = s * *x + off;
            }
        }
        Self::from_samples(self.domain, samples, self.dim, self.degree)
    }
}

/// Scalar function on a domain, stored like a curve with dim = 1.
#[derive(Debug, Clone)]
pub struct ScalarField {
    domain: Domain,
    samples: Vec<f64>,
    spline: VecSpline,
}

impl ScalarField {
    pub fn from_samples(domain: Domain, samples: Vec<f64>, degree: usize) -> Result<Self> {
        let spline = match domain.kind {
            DomainKind::Interval => VecSpline::fit_clamped(domain.a, domain.b, &samples, 1, degree)?,
            DomainKind::Circle => VecSpline::fit_periodic(domain.a, domain.b, &samples, 1, degree)?,
        };
        Ok(Self {
            domain,
            samples,
            spline,
        })
    }

    pub fn from_fn(domain: Domain, n: usize, degree: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples: Vec<f64> = domain.sample_params(n).into_iter().map(f).collect();
        Self::from_samples(domain, samples, degree)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut out = [0.0];
        self.spline.eval_into(self.domain.wrap(t), &mut out);
        out[0]
    }

    pub fn deriv(&self, t: f64, order: usize) -> f64 {
        let mut out = [0.0];
        self.spline.deriv_into(self.domain.wrap(t), order, &mut out);
        out[0]
    }

    pub fn min_on_grid(&self, refine: usize) -> f64 {
        let n = self.samples.len() * refine.max(1);
        (0..=n)
            .map(|i| self.eval(self.domain.a + self.domain.len() * i as f64 / n as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_round_trip_and_speed() {
        let d = Domain::circle(0.0, std::f64::consts::TAU);
        let c = ParamCurve::from_fn(d, 256, 3, 5, |t, out| {
            out[0] = t.cos();
            out[1] = t.sin();
            out[2] = 0.0;
        })
        .unwrap();
        assert!(c.require_regular().is_ok());
        let (lo, hi) = c.speed_range(4);
        assert!((lo - 1.0).abs() < 1e-9 && (hi - 1.0).abs() < 1e-9);
        let p = c.eval(1.0);
        assert!((p[0] - 1.0f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn degenerate_curve_detected() {
        let d = Domain::interval(0.0, 1.0);
        // cusp: f(t) = ((t-1/2)^3, (t-1/2)^2, 0) has f'(1/2) = 0
        let c = ParamCurve::from_fn(d, 128, 3, 5, |t, out| {
            let u = t - 0.5;
            out[0] = u * u * u;
            out[1] = u * u;
            out[2] = 0.0;
        })
        .unwrap();
        assert!(matches!(
            c.require_regular(),
            Err(Error::DegenerateCurve { .. })
        ));
    }

    #[test]
    fn scalar_field_eval() {
        let d = Domain::interval(0.0, 2.0);
        let s = ScalarField::from_fn(d, 64, 5, |t| t * t).unwrap();
        assert!((s.eval(1.3) - 1.69).abs() < 1e-10);
        assert!((s.deriv(1.3, 1) - 2.6).abs() < 1e-8);
        assert!(s.min_on_grid(2).abs() < 1e-12);
    }
}
