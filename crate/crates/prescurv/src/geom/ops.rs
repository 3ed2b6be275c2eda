//! The calculus on sampled curves: norms, averages, masses, arclength
//! reparametrization, the tantrix, curvature, and tantrix integration.

use super::curve::{ParamCurve, ScalarField};
use super::diffeo::Diffeo;
use super::domain::Domain;
use super::spherical::SphericalCurve;
use crate::num::cumint::Cum;
use crate::num::gauss::{gl8, gl8_vec};
use crate::num::{vecn, MonotoneCum};
use crate::{Error, Result};

/// Refinement factor for numerical sup norms.
const SUP_REFINE: usize = 8;

fn sup_scan(domain: &Domain, n: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let m = n * SUP_REFINE;
    let mut best = 0.0f64;
    for i in 0..=m {
        let t = domain.a + domain.len() * i as f64 / m as f64;
        best = best.max(f(t));
    }
    best
}

/// C1 norm: sup |f| + sup |f'| of the reconstruction, scanned on a refined
/// grid.
pub fn c1_norm(f: &ParamCurve) -> f64 {
    let dim = f.dim();
    let mut buf = vec![0.0; dim];
    let v0 = sup_scan(f.domain(), f.n_samples(), |t| {
        f.eval_into(t, &mut buf);
        vecn::norm(&buf)
    });
    let mut buf = vec![0.0; dim];
    let v1 = sup_scan(f.domain(), f.n_samples(), |t| {
        f.deriv_into(t, 1, &mut buf);
        vecn::norm(&buf)
    });
    v0 + v1
}

/// C1 distance between two curves on the same domain.
pub fn c1_distance(f: &ParamCurve, g: &ParamCurve) -> Result<f64> {
    if f.dim() != g.dim() {
        return Err(Error::DomainMismatch(format!(
            "ambient dimensions differ: {} vs {}",
            f.dim(),
            g.dim()
        )));
    }
    if !f.domain().same_extent(g.domain(), 1e-9 * f.domain().len()) {
        return Err(Error::DomainMismatch(format!(
            "parameter domains differ: [{}, {}] vs [{}, {}]",
            f.domain().a,
            f.domain().b,
            g.domain().a,
            g.domain().b
        )));
    }
    let dim = f.dim();
    let n = f.n_samples().max(g.n_samples());
    let mut bf = vec![0.0; dim];
    let mut bg = vec![0.0; dim];
    let d0 = sup_scan(f.domain(), n, |t| {
        f.eval_into(t, &mut bf);
        g.eval_into(t, &mut bg);
        vecn::dist(&bf, &bg)
    });
    let mut bf = vec![0.0; dim];
    let mut bg = vec![0.0; dim];
    let d1 = sup_scan(f.domain(), n, |t| {
        f.deriv_into(t, 1, &mut bf);
        g.deriv_into(t, 1, &mut bg);
        vecn::dist(&bf, &bg)
    });
    Ok(d0 + d1)
}

fn integration_cells(f: &ParamCurve) -> usize {
    if f.domain().is_circle() {
        f.n_samples()
    } else {
        f.n_samples() - 1
    }
}

/// (1/|I|) * integral of f over its domain, by composite Gauss-Legendre on
/// the sample cells (exact for the spline reconstruction).
pub fn average(f: &ParamCurve) -> Vec<f64> {
    let dim = f.dim();
    let cells = integration_cells(f);
    let h = f.domain().len() / cells as f64;
    let mut acc = vec![0.0; dim];
    let mut cell = vec![0.0; dim];
    for i in 0..cells {
        let lo = f.domain().a + i as f64 * h;
        gl8_vec(|t, out| f.eval_into(t, out), lo, lo + h, &mut cell);
        vecn::axpy(&mut acc, 1.0, &cell);
    }
    vecn::scale(&acc, 1.0 / f.domain().len())
}

/// Arclength of the reconstruction.
pub fn curve_length(f: &ParamCurve) -> f64 {
    let cells = integration_cells(f);
    let h = f.domain().len() / cells as f64;
    let mut acc = 0.0;
    for i in 0..cells {
        let lo = f.domain().a + i as f64 * h;
        acc += gl8(|t| f.speed(t), lo, lo + h);
    }
    acc
}

fn check_density(f: &ParamCurve, rho: &dyn Fn(f64) -> f64) -> Result<()> {
    let n = f.n_samples() * 2;
    for i in 0..=n {
        let t = f.domain().a + f.domain().len() * i as f64 / n as f64;
        let v = rho(t);
        if !(v > 0.0) {
            return Err(Error::NonpositiveDensity { t, value: v });
        }
    }
    Ok(())
}

/// Mass and center of mass of f with density rho:
/// mass = integral of rho |f'|, cm = (1/mass) integral of f rho |f'|.
pub fn mass_and_cm(f: &ParamCurve, rho: &dyn Fn(f64) -> f64) -> Result<(f64, Vec<f64>)> {
    check_density(f, rho)?;
    let dim = f.dim();
    let cells = integration_cells(f);
    let h = f.domain().len() / cells as f64;
    let mut mass = 0.0;
    let mut cm = vec![0.0; dim];
    let mut cell = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    for i in 0..cells {
        let lo = f.domain().a + i as f64 * h;
        mass += gl8(|t| rho(t) * f.speed(t), lo, lo + h);
        gl8_vec(
            |t, out| {
                f.eval_into(t, &mut buf);
                let w = rho(t) * vecn::norm(&{
                    let mut d = vec![0.0; dim];
                    f.deriv_into(t, 1, &mut d);
                    d
                });
                for (o, b) in out.iter_mut().zip(&buf) {
                    *o = w * b;
                }
            },
            lo,
            lo + h,
            &mut cell,
        );
        vecn::axpy(&mut cm, 1.0, &cell);
    }
    Ok((mass, vecn::scale(&cm, 1.0 / mass)))
}

/// The inverse of the mass function t -> integral_a^t rho |f'|, as a diffeo
/// from [0, mass] onto the curve's parameter interval.
pub fn mass_reparam(f: &ParamCurve, rho: &dyn Fn(f64) -> f64) -> Result<Diffeo> {
    check_density(f, rho)?;
    let integrand = |t: f64| rho(t) * f.speed(t);
    let cum = Cum::uniform(
        f.domain().a,
        f.domain().b,
        f.n_samples().max(256),
        &integrand,
    );
    let mass = cum.total();
    let n = f.n_samples().max(64) + 1;
    let samples: Vec<f64> = (0..n)
        .map(|i| cum.invert(mass * i as f64 / (n - 1) as f64))
        .collect();
    Diffeo::from_lift_samples(
        Domain::interval(0.0, mass),
        Domain::interval(f.domain().a, f.domain().b),
        samples,
        f.degree(),
    )
}

/// Unit-speed reparametrization: g = lambda * f(phi) with |g'| = 1 and the
/// same domain, where lambda scales the length to the domain length.
pub fn resample_unit_speed(f: &ParamCurve) -> Result<(ParamCurve, f64, Diffeo)> {
    f.require_regular()?;
    let fc = f.clone();
    let arclen = MonotoneCum::uniform(
        f.domain().a,
        f.domain().b,
        f.n_samples().max(256) * 2,
        Box::new(move |t| fc.speed(t)),
    );
    let total = arclen.total();
    let lambda = f.domain().len() / total;
    let (a, len) = (f.domain().a, f.domain().len());
    // phi inverts t -> a + lambda * arclength(t)
    let phi_at = |u: f64| arclen.invert((u - a) / lambda);
    let lift_n = f.n_samples().max(64) + 1;
    let lift: Vec<f64> = (0..lift_n)
        .map(|i| phi_at(a + len * i as f64 / (lift_n - 1) as f64))
        .collect();
    let phi = Diffeo::from_lift_samples(
        *f.domain(),
        *f.domain(),
        lift,
        f.degree(),
    )?;
    let dim = f.dim();
    let g = ParamCurve::from_fn(*f.domain(), f.n_samples(), dim, f.degree(), |u, out| {
        f.eval_into(phi_at(u), out);
        for x in out.iter_mut() {
            *x *= lambda;
        }
    })?;
    Ok((g, lambda, phi))
}

/// The tantrix T = f'/|f'|.
pub fn tantrix(f: &ParamCurve) -> Result<SphericalCurve> {
    f.require_regular()?;
    let dim = f.dim();
    let n = f.n_samples();
    let mut samples = vec![0.0; n * dim];
    for (i, t) in f.params().into_iter().enumerate() {
        let row = &mut samples[i * dim..(i + 1) * dim];
        f.deriv_into(t, 1, row);
        vecn::normalize_mut(row);
    }
    SphericalCurve::from_samples_renormalized(*f.domain(), samples, dim, f.degree(), 1e-2)
}

/// Pointwise curvature kappa = |T'| / |f'| from the reconstruction.
pub fn curvature_at(f: &ParamCurve, t: f64) -> f64 {
    let dim = f.dim();
    let mut d1 = vec![0.0; dim];
    let mut d2 = vec![0.0; dim];
    f.deriv_into(t, 1, &mut d1);
    f.deriv_into(t, 2, &mut d2);
    let s2 = vecn::dot(&d1, &d1);
    let g = vecn::dot(&d2, &d2) * s2 - vecn::dot(&d1, &d2).powi(2);
    g.max(0.0).sqrt() / s2.powf(1.5)
}

/// Curvature as a function on the domain, sampled at the curve's grid.
pub fn curvature(f: &ParamCurve) -> Result<ScalarField> {
    f.require_regular()?;
    let samples: Vec<f64> = f.params().into_iter().map(|t| curvature_at(f, t)).collect();
    ScalarField::from_samples(*f.domain(), samples, f.degree())
}

/// Integrate a unit tangent field from a base point:
/// F(t) = base + integral_a^t T. The output always carries an interval
/// domain; closed inputs close up only when the average of T vanishes.
pub fn integrate_tantrix(tangent: &SphericalCurve, base: &[f64]) -> Result<ParamCurve> {
    let dim = tangent.dim();
    assert_eq!(base.len(), dim);
    let src = tangent.curve();
    let n_cells = integration_cells(src);
    let h = src.domain().len() / n_cells as f64;
    let a = src.domain().a;
    let mut samples = Vec::with_capacity((n_cells + 1) * dim);
    samples.extend_from_slice(base);
    let mut acc = base.to_vec();
    let mut cell = vec![0.0; dim];
    for i in 0..n_cells {
        let lo = a + i as f64 * h;
        gl8_vec(|t, out| src.eval_into(t, out), lo, lo + h, &mut cell);
        vecn::axpy(&mut acc, 1.0, &cell);
        samples.extend_from_slice(&acc);
    }
    ParamCurve::from_samples(
        Domain::interval(a, src.domain().b),
        samples,
        dim,
        src.degree(),
    )
}

/// The composite curve f(phi(u)) sampled on phi's source grid.
pub fn compose(f: &ParamCurve, phi: &Diffeo, n: usize) -> Result<ParamCurve> {
    let dim = f.dim();
    ParamCurve::from_fn(*phi.from_domain(), n, dim, f.degree(), |u, out| {
        f.eval_into(phi.eval(u), out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn line() -> ParamCurve {
        ParamCurve::from_fn(Domain::interval(0.0, 1.0), 32, 3, 5, |t, out| {
            out[0] = t;
            out[1] = 0.0;
            out[2] = 0.0;
        })
        .unwrap()
    }

    fn circle(n: usize) -> ParamCurve {
        ParamCurve::from_fn(Domain::circle(0.0, TAU), n, 3, 5, |t, out| {
            out[0] = t.cos();
            out[1] = t.sin();
            out[2] = 0.0;
        })
        .unwrap()
    }

    #[test]
    fn c1_norm_trivial_cases() {
        // constant curve of norm 2: derivative contributes nothing
        let c = ParamCurve::from_fn(Domain::interval(0.0, 1.0), 16, 3, 5, |_, out| {
            out[0] = 2.0;
            out[1] = 0.0;
            out[2] = 0.0;
        })
        .unwrap();
        assert!((c1_norm(&c) - 2.0).abs() < 1e-10);
        // f(t) = (t,0,0) on [0,1]: sup|f| + sup|f'| = 1 + 1
        assert!((c1_norm(&line()) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn c1_distance_cases() {
        let f = circle(128);
        assert!(c1_distance(&f, &f).unwrap() < 1e-12);
        let g = f.affine(1.0, &[0.3, -0.4, 1.2]).unwrap();
        let d = c1_distance(&f, &g).unwrap();
        let expect = (0.3f64.powi(2) + 0.4f64.powi(2) + 1.2f64.powi(2)).sqrt();
        assert!((d - expect).abs() < 1e-10, "{d} vs {expect}");
        let other = ParamCurve::from_fn(Domain::interval(0.0, 1.0), 32, 3, 5, |t, out| {
            out[0] = t;
            out[1] = 0.0;
            out[2] = 0.0;
        })
        .unwrap();
        assert!(c1_distance(&f, &other).is_err());
    }

    #[test]
    fn average_cases() {
        let c = ParamCurve::from_fn(Domain::interval(0.0, 1.0), 16, 3, 5, |_, out| {
            out.copy_from_slice(&[1.0, -2.0, 0.5]);
        })
        .unwrap();
        let a = average(&c);
        assert!(vecn::dist(&a, &[1.0, -2.0, 0.5]) < 1e-12);
        // full circle averages to the origin
        let a = average(&circle(256));
        assert!(vecn::norm(&a) < 1e-12);
    }

    #[test]
    fn mass_cm_reductions() {
        let f = circle(256);
        // rho = 1/|f'| makes cm equal the plain average
        let rho = |_t: f64| 1.0;
        let (mass, cm) = mass_and_cm(&f, &rho).unwrap();
        assert!((mass - TAU).abs() < 1e-9);
        // constant-speed circle: cm = ave = 0
        assert!(vecn::norm(&cm) < 1e-10);
        let bad = |t: f64| t - 1.0;
        assert!(mass_and_cm(&f, &bad).is_err());
    }

    #[test]
    fn mass_reparam_identity_for_unit_speed() {
        let f = circle(256); // unit speed, length tau
        let phi = mass_reparam(&f, &|_| 1.0).unwrap();
        // phi: [0, tau] -> [0, tau] should be the identity
        for i in 0..=16 {
            let s = TAU * i as f64 / 16.0;
            assert!((phi.eval(s) - s).abs() < 1e-8, "s={s}");
        }
    }

    #[test]
    fn unit_speed_resampling_scales() {
        // f(t) = (2t, 0, 0) on [0,1]: lambda = 1/2, phi = id
        let f = ParamCurve::from_fn(Domain::interval(0.0, 1.0), 32, 3, 5, |t, out| {
            out[0] = 2.0 * t;
            out[1] = 0.0;
            out[2] = 0.0;
        })
        .unwrap();
        let (g, lambda, phi) = resample_unit_speed(&f).unwrap();
        assert!((lambda - 0.5).abs() < 1e-10);
        for i in 0..=8 {
            let t = i as f64 / 8.0;
            assert!((phi.eval(t) - t).abs() < 1e-9);
            assert!((g.speed(t) - 1.0).abs() < 1e-9);
        }
        // already unit speed: lambda = 1, phi = id
        let (g2, l2, p2) = resample_unit_speed(&circle(256)).unwrap();
        assert!((l2 - 1.0).abs() < 1e-10);
        assert!((p2.eval(1.0) - 1.0).abs() < 1e-9);
        assert!((g2.speed(2.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tantrix_cases() {
        let t = tantrix(&line()).unwrap();
        assert!(vecn::dist(&t.eval(0.5), &[1.0, 0.0, 0.0]) < 1e-10);
        let t = tantrix(&circle(256)).unwrap();
        let v = t.eval(1.0);
        assert!(vecn::dist(&v, &[-(1.0f64.sin()), 1.0f64.cos(), 0.0]) < 1e-9);
    }

    #[test]
    fn curvature_cases() {
        // circle of radius 2 has curvature 1/2
        let f = ParamCurve::from_fn(Domain::circle(0.0, TAU), 256, 3, 5, |t, out| {
            out[0] = 2.0 * t.cos();
            out[1] = 2.0 * t.sin();
            out[2] = 0.0;
        })
        .unwrap();
        for i in 0..8 {
            let t = TAU * i as f64 / 8.0;
            assert!((curvature_at(&f, t) - 0.5).abs() < 1e-8);
        }
        // straight line has curvature 0
        assert!(curvature_at(&line(), 0.3) < 1e-7);
        let field = curvature(&f).unwrap();
        assert!((field.eval(1.0) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn integrate_tantrix_cases() {
        // constant T = e1 from 0 gives the line t -> (t, 0, 0)
        let t = SphericalCurve::from_fn(Domain::interval(0.0, 1.0), 32, 3, 5, |_, out| {
            out.copy_from_slice(&[1.0, 0.0, 0.0]);
        })
        .unwrap();
        let f = integrate_tantrix(&t, &[0.0, 0.0, 0.0]).unwrap();
        assert!(vecn::dist(&f.eval(0.7), &[0.7, 0.0, 0.0]) < 1e-12);

        // T(t) = (-sin t, cos t, 0) from (1, 0, 0) gives the unit circle
        let t = SphericalCurve::from_fn(Domain::circle(0.0, TAU), 256, 3, 5, |u, out| {
            out[0] = -u.sin();
            out[1] = u.cos();
            out[2] = 0.0;
        })
        .unwrap();
        let f = integrate_tantrix(&t, &[1.0, 0.0, 0.0]).unwrap();
        for i in 0..=8 {
            let u = TAU * i as f64 / 8.0;
            assert!(vecn::dist(&f.eval(u), &[u.cos(), u.sin(), 0.0]) < 1e-10);
        }
    }
}
