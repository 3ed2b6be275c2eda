//! Detecting and repairing flat tantrices.
//!
//! The loop-steering construction needs the tantrix image to have a
//! full-dimensional convex hull around its average. `hull_thickness` returns
//! a certified lower bound on that thickness via a witness simplex, and
//! `ensure_nonflat` fattens a flat tantrix with a small transverse spiral
//! wiggle, keeping unit speed, endpoints, end derivatives, and the tantrix
//! average fixed.

use crate::geom::{average, integrate_tantrix, tantrix, ParamCurve, SphericalCurve};
use crate::num::dense::{sym_eigen, DenseLu};
use crate::num::{vecn, Smoothstep};
use crate::{Error, Result};

/// Below this hull thickness a tantrix counts as flat; floating-point hulls
/// are never exactly degenerate.
pub const FLAT_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct HullReport {
    /// Certified lower bound on the radius of a ball about the query point
    /// inside the convex hull of the samples; 0 when the point is not
    /// interior.
    pub thickness: f64,
    /// n+1 sample indices realizing a full-dimensional simplex around the
    /// query point, when one exists.
    pub witness_simplex: Option<Vec<usize>>,
}

/// Distance from the origin to the affine hyperplane through `pts` (n points
/// in n dimensions), or None when the points are affinely degenerate.
fn facet_distance(pts: &[&[f64]], dim: usize) -> Option<f64> {
    // orthonormalize the edge directions, then project the base point onto
    // their orthogonal complement
    let base = pts[0];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim - 1);
    for p in &pts[1..] {
        let mut e = vecn::sub(p, base);
        for b in &basis {
            let d = vecn::dot(&e, b);
            vecn::axpy(&mut e, -d, b);
        }
        let n = vecn::normalize_mut(&mut e);
        if n < 1e-13 {
            return None;
        }
        basis.push(e);
    }
    let mut r = base.to_vec();
    for b in &basis {
        let d = vecn::dot(&r, b);
        vecn::axpy(&mut r, -d, b);
    }
    Some(vecn::norm(&r))
}

/// Barycentric coordinates of the origin with respect to a simplex, or None
/// if the simplex is degenerate.
fn barycentric_of_origin(verts: &[&[f64]], dim: usize) -> Option<Vec<f64>> {
    let k = dim + 1;
    debug_assert_eq!(verts.len(), k);
    let mut m = vec![0.0; k * k];
    for (j, v) in verts.iter().enumerate() {
        for r in 0..dim {
            m[r * k + j] = v[r];
        }
        m[dim * k + j] = 1.0;
    }
    let lu = DenseLu::factor(&m, k).ok()?;
    let mut rhs = vec![0.0; k];
    rhs[dim] = 1.0;
    lu.solve(&mut rhs);
    Some(rhs)
}

fn thickness_of_simplex(samples: &[f64], dim: usize, idx: &[usize], x0: &[f64]) -> f64 {
    let verts: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| vecn::sub(&samples[i * dim..(i + 1) * dim], x0))
        .collect();
    let refs: Vec<&[f64]> = verts.iter().map(|v| v.as_slice()).collect();
    let Some(bary) = barycentric_of_origin(&refs, dim) else {
        return 0.0;
    };
    if bary.iter().any(|&b| b <= 0.0) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for skip in 0..refs.len() {
        let facet: Vec<&[f64]> = refs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, v)| *v)
            .collect();
        match facet_distance(&facet, dim) {
            Some(d) => best = best.min(d),
            None => return 0.0,
        }
    }
    best
}

/// Certified lower bound on the hull inradius of the curve's samples about
/// `x0`, found by a greedy witness simplex with swap polishing.
pub fn hull_thickness(t: &SphericalCurve, x0: &[f64]) -> HullReport {
    let dim = t.dim();
    let samples = t.curve().samples();
    let n = samples.len() / dim;
    // candidate subsample keeps the polish loop cheap
    let stride = (n / 512).max(1);
    let cand: Vec<usize> = (0..n).step_by(stride).collect();

    // greedy spanning set: maximize residual extent against the chosen span
    let centered: Vec<Vec<f64>> = cand
        .iter()
        .map(|&i| vecn::sub(&samples[i * dim..(i + 1) * dim], x0))
        .collect();
    let sel = crate::num::dense::select_independent(&centered, dim, dim, 1e-10);
    if sel.len() < dim {
        return HullReport {
            thickness: 0.0,
            witness_simplex: None,
        };
    }
    let mut simplex: Vec<usize> = sel.iter().map(|&i| cand[i]).collect();
    // complete with the sample most opposed to the current centroid
    let centroid: Vec<f64> = {
        let mut c = vecn::zeros(dim);
        for &i in &simplex {
            vecn::axpy(&mut c, 1.0, &vecn::sub(&samples[i * dim..(i + 1) * dim], x0));
        }
        vecn::scale(&c, 1.0 / dim as f64)
    };
    let last = cand
        .iter()
        .copied()
        .filter(|i| !simplex.contains(i))
        .min_by(|&a, &b| {
            let pa = vecn::sub(&samples[a * dim..(a + 1) * dim], x0);
            let pb = vecn::sub(&samples[b * dim..(b + 1) * dim], x0);
            vecn::dot(&pa, &centroid)
                .partial_cmp(&vecn::dot(&pb, &centroid))
                .unwrap()
        });
    let Some(last) = last else {
        return HullReport {
            thickness: 0.0,
            witness_simplex: None,
        };
    };
    simplex.push(last);

    let mut best = thickness_of_simplex(samples, dim, &simplex, x0);
    // swap polishing: try replacing each vertex with each candidate
    for _sweep in 0..3 {
        let mut improved = false;
        for slot in 0..simplex.len() {
            for &c in &cand {
                if simplex.contains(&c) {
                    continue;
                }
                let old = simplex[slot];
                simplex[slot] = c;
                let v = thickness_of_simplex(samples, dim, &simplex, x0);
                if v > best {
                    best = v;
                    improved = true;
                } else {
                    simplex[slot] = old;
                }
            }
        }
        if !improved {
            break;
        }
    }
    if best > 0.0 {
        HullReport {
            thickness: best,
            witness_simplex: Some(simplex),
        }
    } else {
        HullReport {
            thickness: 0.0,
            witness_simplex: None,
        }
    }
}

/// C2-type size of a perturbation, measured between curve reconstructions.
fn c2_gap(f: &ParamCurve, g: &ParamCurve) -> f64 {
    let n = f.n_samples().max(g.n_samples()) * 4;
    let dim = f.dim();
    let (a, len) = (f.domain().a, f.domain().len());
    let mut worst = [0.0f64; 3];
    let mut bf = vec![0.0; dim];
    let mut bg = vec![0.0; dim];
    for i in 0..=n {
        let t = a + len * i as f64 / n as f64;
        for (order, w) in worst.iter_mut().enumerate() {
            f.deriv_into(t, order, &mut bf);
            g.deriv_into(t, order, &mut bg);
            *w = w.max(vecn::dist(&bf, &bg));
        }
    }
    worst.iter().sum()
}

/// Directions the tantrix barely occupies: covariance eigendirections whose
/// eigenvalue is small against the leading one. Wiggling along these is what
/// fattens the hull, and because the samples are nearly orthogonal to them,
/// the pointwise rejection off the curve stays smooth and non-degenerate.
fn missing_directions(t: &SphericalCurve) -> Vec<Vec<f64>> {
    let dim = t.dim();
    let samples = t.curve().samples();
    let n = samples.len() / dim;
    let mut mean = vecn::zeros(dim);
    for row in samples.chunks(dim) {
        vecn::axpy(&mut mean, 1.0 / n as f64, row);
    }
    let mut cov = vec![0.0; dim * dim];
    for row in samples.chunks(dim) {
        let d = vecn::sub(row, &mean);
        for r in 0..dim {
            for c in 0..dim {
                cov[r * dim + c] += d[r] * d[c];
            }
        }
    }
    let (vals, vecs) = sym_eigen(&cov, dim);
    let lead = vals[dim - 1].max(1e-300);
    let mut dirs = Vec::new();
    for k in 0..dim {
        if vals[k] < 0.05 * lead {
            dirs.push((0..dim).map(|r| vecs[r * dim + k]).collect());
        }
    }
    if dirs.is_empty() {
        // sliver case: take the single smallest direction anyway
        dirs.push((0..dim).map(|r| vecs[r * dim]).collect());
    }
    dirs
}

pub struct NonflatOutcome {
    pub curve: ParamCurve,
    pub report: HullReport,
    /// C2 distance actually consumed (0 when the input was already nonflat).
    pub consumed: f64,
}

/// Make the curve's tantrix nonflat by a small interior perturbation.
///
/// The perturbed curve keeps unit speed exactly (it is rebuilt by
/// integrating a renormalized tangent field), agrees with the input at the
/// domain ends to high order, preserves the tantrix average (so endpoints
/// and closure are unchanged), and stays within the given C2 budget.
/// Inputs that are already nonflat are returned unchanged.
pub fn ensure_nonflat(f: &ParamCurve, budget: f64) -> Result<NonflatOutcome> {
    ensure_nonflat_with(f, budget, FLAT_TOL)
}

pub fn ensure_nonflat_with(f: &ParamCurve, budget: f64, flat_tol: f64) -> Result<NonflatOutcome> {
    let t = tantrix(f)?;
    let x0 = average(t.curve());
    let report = hull_thickness(&t, &x0);
    if report.thickness > flat_tol {
        return Ok(NonflatOutcome {
            curve: f.clone(),
            report,
            consumed: 0.0,
        });
    }
    if !(budget > 0.0) {
        return Err(Error::PerturbationFailed { budget, attempts: 0 });
    }

    let dim = f.dim();
    let n = t.n_samples();
    let dirs = missing_directions(&t);
    let step = Smoothstep::new(4);
    let ramp = 0.15;
    let bump = |u: f64| step.eval(u / ramp) * step.eval((1.0 - u) / ramp);
    let (a, len) = (f.domain().a, f.domain().len());
    let params = t.curve().params();
    let nu = 2.0;

    let mut attempts = 0;
    let mut amp = budget / 16.0;
    while attempts < 16 {
        attempts += 1;
        // wiggle into the missing directions with staggered phases; the
        // unnormalized rejection keeps the field smooth along the curve
        let mut samples = vec![0.0; n * dim];
        for (i, &tt) in params.iter().enumerate() {
            let u = (tt - a) / len;
            let b = amp * bump(u);
            let base = t.curve().sample(i);
            let row = &mut samples[i * dim..(i + 1) * dim];
            row.copy_from_slice(base);
            for (k, e) in dirs.iter().enumerate() {
                let phase = std::f64::consts::TAU * nu * u
                    + std::f64::consts::FRAC_PI_2 * k as f64;
                let w = vecn::reject_unit(e, base);
                vecn::axpy(row, b * phase.sin(), &w);
            }
            vecn::normalize_mut(row);
        }
        // pull the average back to x0 so integration preserves endpoints
        let mut corrected = samples;
        let mut ok = false;
        for _ in 0..60 {
            let sc = SphericalCurve::from_samples_renormalized(
                *t.domain(),
                corrected.clone(),
                dim,
                f.degree(),
                1e-2,
            )?;
            let delta = vecn::sub(&average(sc.curve()), &x0);
            if vecn::norm(&delta) < 1e-13 {
                ok = true;
                break;
            }
            for (i, &tt) in params.iter().enumerate() {
                let u = (tt - a) / len;
                let g = bump(u) / 0.85; // bump mass over the domain is ~0.85
                let row = &mut corrected[i * dim..(i + 1) * dim];
                vecn::axpy(row, -g, &delta);
                vecn::normalize_mut(row);
            }
        }
        if !ok {
            amp *= 0.5;
            continue;
        }
        let tangent = SphericalCurve::from_samples_renormalized(
            *t.domain(),
            corrected,
            dim,
            f.degree(),
            1e-2,
        )?;
        let integrated = integrate_tantrix(&tangent, f.eval(a).as_slice())?;
        let candidate = if f.domain().is_circle() {
            // drop the duplicated endpoint and refit periodically
            let m = tangent.n_samples();
            let mut s = integrated.samples().to_vec();
            s.truncate(m * dim);
            ParamCurve::from_samples(*f.domain(), s, dim, f.degree())?
        } else {
            integrated
        };
        let consumed = c2_gap(f, &candidate);
        if consumed > budget {
            return Err(Error::PerturbationFailed { budget, attempts });
        }
        let new_t = tantrix(&candidate)?;
        let new_report = hull_thickness(&new_t, &x0);
        if new_report.thickness > flat_tol {
            return Ok(NonflatOutcome {
                curve: candidate,
                report: new_report,
                consumed,
            });
        }
        amp *= 2.0;
    }
    Err(Error::PerturbationFailed { budget, attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{c1_distance, curvature_at, Domain};
    use crate::presets;

    fn circle_curve(n: usize) -> ParamCurve {
        presets::circle(1.0, n, 5).unwrap()
    }

    #[test]
    fn great_circle_tantrix_is_flat() {
        let t = tantrix(&circle_curve(512)).unwrap();
        let x0 = average(t.curve());
        let rep = hull_thickness(&t, &x0);
        assert!(rep.thickness < 1e-9, "flat hull, got {}", rep.thickness);
        assert!(rep.witness_simplex.is_none());
    }

    #[test]
    fn trefoil_tantrix_is_nonflat() {
        let (g, _, _) = crate::geom::resample_unit_speed(&presets::trefoil(1024, 5).unwrap()).unwrap();
        let t = tantrix(&g).unwrap();
        let x0 = average(t.curve());
        let rep = hull_thickness(&t, &x0);
        assert!(rep.thickness > 0.05, "trefoil thickness {}", rep.thickness);
        let w = rep.witness_simplex.unwrap();
        assert_eq!(w.len(), 4);
    }

    #[test]
    fn simplex_thickness_matches_direct_computation() {
        // four sphere points spanning a fat simplex around their mean
        let pts: [[f64; 3]; 4] = [
            [1.0, 0.0, 0.0],
            [-0.5, 0.8, 0.0],
            [-0.5, -0.6, 0.5],
            [-0.3, -0.2, -0.9],
        ];
        let mut samples = Vec::new();
        for p in &pts {
            let mut v = p.to_vec();
            vecn::normalize_mut(&mut v);
            samples.extend_from_slice(&v);
        }
        // oracle: min distance from centroid to the four facet planes
        let mut centroid = vecn::zeros(3);
        for i in 0..4 {
            vecn::axpy(&mut centroid, 0.25, &samples[i * 3..i * 3 + 3]);
        }
        let idx = [0usize, 1, 2, 3];
        let expect = thickness_of_simplex(&samples, 3, &idx, &centroid);
        assert!(expect > 0.0);
        // the witness search on exactly these four samples must find it;
        // a curve needs more samples, so repeat each point in a block
        let mut blocks = Vec::new();
        for rep in 0..4 {
            for _ in 0..8 {
                blocks.extend_from_slice(&samples[rep * 3..rep * 3 + 3]);
            }
        }
        let sc = SphericalCurve::from_samples_renormalized(
            Domain::circle(0.0, 1.0),
            blocks,
            3,
            3,
            1e-9,
        )
        .unwrap();
        let rep = hull_thickness(&sc, &centroid);
        assert!(
            (rep.thickness - expect).abs() < 1e-9,
            "{} vs {expect}",
            rep.thickness
        );
    }

    #[test]
    fn nonflat_passthrough_for_trefoil() {
        let (g, _, _) = crate::geom::resample_unit_speed(&presets::trefoil(512, 5).unwrap()).unwrap();
        let out = ensure_nonflat(&g, 1e-2).unwrap();
        assert_eq!(out.consumed, 0.0);
        assert_eq!(out.curve.samples(), g.samples());
    }

    #[test]
    fn circle_gets_fattened_within_budget() {
        let f = circle_curve(512);
        let budget = 1e-2;
        let out = ensure_nonflat(&f, budget).unwrap();
        assert!(out.report.thickness > FLAT_TOL);
        assert!(out.consumed <= budget);
        // unit speed preserved
        let (lo, hi) = out.curve.speed_range(4);
        assert!((lo - 1.0).abs() < 1e-6 && (hi - 1.0).abs() < 1e-6);
        // curve stays C1-close
        let d = c1_distance(&f, &out.curve).unwrap();
        assert!(d <= budget * 1.5, "c1 gap {d}");
        // curvature still positive
        for i in 0..64 {
            let t = std::f64::consts::TAU * i as f64 / 64.0;
            assert!(curvature_at(&out.curve, t) > 0.0);
        }
    }

    #[test]
    fn zero_budget_fails_on_flat_input() {
        let f = circle_curve(256);
        assert!(matches!(
            ensure_nonflat(&f, 0.0),
            Err(Error::PerturbationFailed { .. })
        ));
    }

    #[test]
    fn interval_perturbation_preserves_endpoints() {
        // half circle as an interval curve
        let f = ParamCurve::from_fn(
            Domain::interval(0.0, std::f64::consts::PI),
            257,
            3,
            5,
            |t, out| {
                out[0] = t.cos();
                out[1] = t.sin();
                out[2] = 0.0;
            },
        )
        .unwrap();
        let out = ensure_nonflat(&f, 2e-2).unwrap();
        assert!(out.report.thickness > FLAT_TOL);
        let b = std::f64::consts::PI;
        assert!(vecn::dist(&out.curve.eval(0.0), &f.eval(0.0)) < 1e-10);
        assert!(vecn::dist(&out.curve.eval(b), &f.eval(b)) < 1e-9);
        assert!(vecn::dist(&out.curve.deriv(0.0, 1), &f.deriv(0.0, 1)) < 1e-7);
        assert!(vecn::dist(&out.curve.deriv(b, 1), &f.deriv(b, 1)) < 1e-7);
    }

    #[test]
    fn thickness_monotone_in_budget() {
        let f = circle_curve(384);
        let small = ensure_nonflat(&f, 4e-3).unwrap();
        let large = ensure_nonflat(&f, 4e-2).unwrap();
        assert!(large.report.thickness >= small.report.thickness * 0.99);
    }
}
