//! Built-in test curves: circle, helix, torus knots, and seeded random
//! Fourier knots.

use crate::geom::{Domain, ParamCurve};
use crate::num::vecn;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_TORUS_MAJOR: f64 = 2.0;
pub const DEFAULT_TORUS_MINOR: f64 = 0.8;

/// Planar circle of the given radius on a circle domain of length 2 pi.
pub fn circle(radius: f64, n: usize, degree: usize) -> Result<ParamCurve> {
    ParamCurve::from_fn(
        Domain::circle(0.0, std::f64::consts::TAU),
        n,
        3,
        degree,
        |t, out| {
            out[0] = radius * t.cos();
            out[1] = radius * t.sin();
            out[2] = 0.0;
        },
    )
}

/// Helix (a cos t, a sin t, b t) over `turns` full turns, interval domain.
pub fn helix(a: f64, b: f64, turns: f64, n: usize, degree: usize) -> Result<ParamCurve> {
    let end = std::f64::consts::TAU * turns;
    ParamCurve::from_fn(Domain::interval(0.0, end), n, 3, degree, |t, out| {
        out[0] = a * t.cos();
        out[1] = a * t.sin();
        out[2] = b * t;
    })
}

/// (p, q) torus knot on the torus with the given major/minor radii.
pub fn torus_knot(
    p: u32,
    q: u32,
    major: f64,
    minor: f64,
    n: usize,
    degree: usize,
) -> Result<ParamCurve> {
    if p == 0 || q == 0 {
        return Err(Error::BadPreset(format!("torus_knot({p},{q})")));
    }
    let (pf, qf) = (p as f64, q as f64);
    ParamCurve::from_fn(
        Domain::circle(0.0, std::f64::consts::TAU),
        n,
        3,
        degree,
        |t, out| {
            let w = major + minor * (qf * t).cos();
            out[0] = w * (pf * t).cos();
            out[1] = w * (pf * t).sin();
            out[2] = minor * (qf * t).sin();
        },
    )
}

/// The (2,3) torus knot with default radii.
pub fn trefoil(n: usize, degree: usize) -> Result<ParamCurve> {
    torus_knot(2, 3, DEFAULT_TORUS_MAJOR, DEFAULT_TORUS_MINOR, n, degree)
}

/// Closed random curve from decaying Fourier modes. Deterministic for a
/// fixed seed; retries derived seeds until the sample polygon is embedded
/// and the curve is regular.
pub fn fourier_knot(seed: u64, modes: usize, n: usize, degree: usize) -> Result<ParamCurve> {
    let modes = modes.max(2);
    for attempt in 0..32u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt.wrapping_mul(0x9e37)));
        let mut coef = vec![[0.0f64; 4]; 3 * modes]; // (a_m cos, b_m sin) per dim
        for c in coef.iter_mut() {
            for v in c.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
        }
        let curve = ParamCurve::from_fn(
            Domain::circle(0.0, std::f64::consts::TAU),
            n,
            3,
            degree,
            |t, out| {
                for (d, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for m in 1..=modes {
                        let c = coef[d * modes + (m - 1)];
                        let decay = 1.0 / (m * m) as f64;
                        acc += decay * (c[0] * (m as f64 * t).cos() + c[1] * (m as f64 * t).sin());
                    }
                    *o = acc;
                }
            },
        )?;
        if curve.require_regular().is_err() {
            continue;
        }
        if polygon_embedded(&curve, 0.02) {
            return Ok(curve);
        }
    }
    Err(Error::BadPreset(format!(
        "fourier_knot(seed={seed}, modes={modes}) found no embedded sample"
    )))
}

/// Crude embeddedness test on the sample polygon: non-adjacent samples must
/// stay farther apart than `frac` of the bounding-box diagonal.
pub fn polygon_embedded(curve: &ParamCurve, frac: f64) -> bool {
    min_self_distance(curve).0 > frac * bbox_diag(curve)
}

/// Minimum distance between non-neighboring samples (window scaled to skip
/// parametric neighbors), with the realizing index pair.
pub fn min_self_distance(curve: &ParamCurve) -> (f64, usize, usize) {
    let n = curve.n_samples();
    let window = (n / 16).max(2);
    let circle = curve.domain().is_circle();
    let mut best = f64::INFINITY;
    let mut pair = (0, 0);
    for i in 0..n {
        for j in (i + window)..n {
            if circle && i + n - j < window {
                continue;
            }
            let d = vecn::dist(curve.sample(i), curve.sample(j));
            if d < best {
                best = d;
                pair = (i, j);
            }
        }
    }
    (best, pair.0, pair.1)
}

pub fn bbox_diag(curve: &ParamCurve) -> f64 {
    let dim = curve.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for row in curve.samples().chunks(dim) {
        for ((l, h), v) in lo.iter_mut().zip(hi.iter_mut()).zip(row) {
            *l = l.min(*v);
            *h = h.max(*v);
        }
    }
    lo.iter()
        .zip(&hi)
        .map(|(l, h)| (h - l) * (h - l))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{curvature_at, resample_unit_speed};

    #[test]
    fn circle_preset_has_unit_samples() {
        let c = circle(1.0, 128, 5).unwrap();
        for row in c.samples().chunks(3) {
            assert!((vecn::norm(row) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trefoil_is_embedded_closed_with_positive_curvature() {
        let k = trefoil(1024, 5).unwrap();
        assert!(polygon_embedded(&k, 0.01));
        let (g, _, _) = resample_unit_speed(&k).unwrap();
        let mut kmin = f64::INFINITY;
        let mut kmax: f64 = 0.0;
        for i in 0..512 {
            let t = std::f64::consts::TAU * i as f64 / 512.0;
            let kap = curvature_at(&g, t);
            kmin = kmin.min(kap);
            kmax = kmax.max(kap);
        }
        assert!(kmin > 0.05, "trefoil curvature should stay positive, {kmin}");
        assert!(kmax < 10.0, "{kmax}");
    }

    #[test]
    fn fourier_knot_deterministic() {
        let a = fourier_knot(42, 4, 256, 5).unwrap();
        let b = fourier_knot(42, 4, 256, 5).unwrap();
        assert_eq!(a.samples(), b.samples());
        let c = fourier_knot(43, 4, 256, 5).unwrap();
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn helix_speed_constant() {
        let h = helix(1.0, 1.0, 2.0, 512, 5).unwrap();
        let (lo, hi) = h.speed_range(2);
        let s = 2.0f64.sqrt();
        assert!((lo - s).abs() < 1e-8 && (hi - s).abs() < 1e-8);
    }
}
