//! Verification metrics mirroring the pipeline's guarantees.

use crate::geom::{c1_distance, curvature_at, CurvatureSpec, ParamCurve};
use crate::num::vecn;
use crate::presets;
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    /// sup_t |kappa(t) - kappa_tilde(t)| / kappa_tilde(t)
    pub curvature_sup_rel: f64,
    /// L2-normalized relative curvature error.
    pub curvature_l2_rel: f64,
    /// sup_t ||f'(t)| - s| / s against the reference speed s.
    pub speed_dev_rel: f64,
    /// Reference speed the deviation is measured against.
    pub reference_speed: f64,
    pub c1_distance: f64,
    /// Per pinned point: |ftilde(p) - f(p)| + |ftilde'(p) - f'(p)|.
    pub tangency_residuals: Vec<f64>,
    /// Minimum distance between parametrically separated samples, as a
    /// fraction of the bounding box diagonal.
    pub min_self_distance_rel: f64,
    /// Sampled injectivity of the linear homotopy (true = no collision).
    pub homotopy_injective: bool,
    pub homotopy_samples: usize,
}

/// Relative curvature errors of `f` against a prescription, scanned on a
/// refined grid.
pub fn curvature_errors(f: &ParamCurve, kappa: &CurvatureSpec, refine: usize) -> (f64, f64) {
    let n = f.n_samples() * refine.max(1);
    let dom = f.domain();
    let m = if dom.is_circle() { n } else { n + 1 };
    let mut sup = 0.0f64;
    let mut l2 = 0.0f64;
    for i in 0..m {
        let t = dom.a + dom.len() * i as f64 / n as f64;
        let target = kappa.eval(t);
        let got = curvature_at(f, t);
        let rel = (got - target).abs() / target;
        sup = sup.max(rel);
        l2 += rel * rel;
    }
    (sup, (l2 / m as f64).sqrt())
}

/// Largest relative deviation of |f'| from the reference speed.
pub fn speed_deviation(f: &ParamCurve, reference: f64, refine: usize) -> f64 {
    let (lo, hi) = f.speed_range(refine);
    ((hi - reference).abs() / reference).max((lo - reference).abs() / reference)
}

/// Sampled injectivity of h_t = (1-t) f + t g at `steps` interior times.
pub fn homotopy_injective(f: &ParamCurve, g: &ParamCurve, steps: usize, frac: f64) -> Result<bool> {
    let dim = f.dim();
    let n = f.n_samples().min(g.n_samples()).min(1024);
    let fr = f.resample(n)?;
    let gr = g.resample(n)?;
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let mut samples = vec![0.0; n * dim];
        for i in 0..n {
            for d in 0..dim {
                samples[i * dim + d] =
                    (1.0 - t) * fr.samples()[i * dim + d] + t * gr.samples()[i * dim + d];
            }
        }
        let blend = ParamCurve::from_samples(*f.domain(), samples, dim, f.degree())?;
        if !presets::polygon_embedded(&blend, frac) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Full verification of a prescription run.
pub fn verify(
    original: &ParamCurve,
    output: &ParamCurve,
    kappa: &CurvatureSpec,
    pinned: &[f64],
    reference_speed: f64,
    homotopy_steps: usize,
) -> Result<VerifyReport> {
    let (curvature_sup_rel, curvature_l2_rel) = curvature_errors(output, kappa, 4);
    let speed_dev_rel = speed_deviation(output, reference_speed, 4);
    let c1 = c1_distance(original, output)?;
    let mut tangency = Vec::with_capacity(pinned.len());
    for &p in pinned {
        let dv = vecn::dist(&original.eval(p), &output.eval(p));
        let dd = vecn::dist(&original.deriv(p, 1), &output.deriv(p, 1));
        tangency.push(dv + dd);
    }
    let (min_dist, _, _) = presets::min_self_distance(output);
    let min_self_distance_rel = min_dist / presets::bbox_diag(output).max(1e-300);
    let homotopy_injective = if homotopy_steps > 0 {
        homotopy_injective(original, output, homotopy_steps, 1e-4)?
    } else {
        true
    };
    Ok(VerifyReport {
        curvature_sup_rel,
        curvature_l2_rel,
        speed_dev_rel,
        reference_speed,
        c1_distance: c1,
        tangency_residuals: tangency,
        min_self_distance_rel,
        homotopy_injective,
        homotopy_samples: homotopy_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Domain;

    #[test]
    fn identity_comparison_is_clean() {
        let f = presets::circle(1.0, 512, 5).unwrap();
        let rep = verify(
            &f,
            &f.clone(),
            &CurvatureSpec::constant(1.0),
            &[0.0, 2.0],
            1.0,
            5,
        )
        .unwrap();
        assert!(rep.curvature_sup_rel < 1e-8);
        assert!(rep.speed_dev_rel < 1e-9);
        assert!(rep.c1_distance < 1e-12);
        assert!(rep.tangency_residuals.iter().all(|&r| r < 1e-12));
        assert!(rep.homotopy_injective);
    }

    #[test]
    fn curvature_error_detects_mismatch() {
        let f = presets::circle(2.0, 512, 5).unwrap(); // curvature 1/2
        let (sup, l2) = curvature_errors(&f, &CurvatureSpec::constant(1.0), 2);
        assert!((sup - 0.5).abs() < 1e-6);
        assert!((l2 - 0.5).abs() < 1e-6);
    }

    #[test]
    fn homotopy_detects_collision() {
        // two parallel circles vs one flipped through the other: the
        // midpoint of a homotopy between mirrored circles degenerates
        let a = ParamCurve::from_fn(Domain::circle(0.0, std::f64::consts::TAU), 256, 3, 5, |t, o| {
            o[0] = t.cos();
            o[1] = t.sin();
            o[2] = 0.0;
        })
        .unwrap();
        let b = ParamCurve::from_fn(Domain::circle(0.0, std::f64::consts::TAU), 256, 3, 5, |t, o| {
            o[0] = t.cos();
            o[1] = -t.sin();
            o[2] = 0.0;
        })
        .unwrap();
        assert!(!homotopy_injective(&a, &b, 8, 1e-4).unwrap());
    }
}
