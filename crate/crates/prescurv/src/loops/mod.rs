//! Spherical loop insertion: raising the tantrix speed to the target by
//! composite loops at piece midpoints.
//!
//! Each piece of the (reparametrized) tantrix gets a detour at its arclength
//! midpoint q: pairs of circular lobes through q tangent to the curve,
//! tilted to opposite sides so the pair's center of mass stays at q to
//! second order. A budget fixes the detour length; full pairs plus one
//! nested remainder pair realize any budget continuously. Corners are
//! rounded by smoothstep blends, and the final length is matched exactly by
//! a root find on the raw loop length, so tracing the whole piece at the
//! target speed lands precisely on the piece boundary.

pub mod path;

#[cfg(test)]
use crate::geom::Domain;
use crate::geom::SphericalCurve;
use crate::num::gauss::gl8;
use crate::num::rootfind::solve_monotone_no_deriv;
use crate::num::{vecn, MonotoneCum, Smoothstep};
use crate::{Error, Result};
use path::{Arc, CompositePath, LobeFrame, PathSeg};

/// Geometry knobs for loop construction.
#[derive(Debug, Clone)]
pub struct LoopConfig {
    /// Geodesic radius of the cap about each midpoint that hosts the loops
    /// (lobe radius is half of this).
    pub cap_radius: f64,
    /// Blend window as a fraction of the shorter adjacent arc half.
    pub blend_frac: f64,
    /// Absolute cap on blend windows (arclength).
    pub blend_cap: f64,
    /// Refuse budgets that would need more than this many lobe pairs.
    pub max_pairs: usize,
}

impl LoopConfig {
    /// The containment-faithful scaling: caps of 0.9 * R/4 about each
    /// midpoint, pieces no longer than 0.9 * R/2.
    pub fn for_ball_radius(r: f64) -> Self {
        Self {
            cap_radius: 0.225 * r,
            // windows stay below ~0.16 of the lobe radius so the blend's
            // speed wobble is negligible against the lobe curvature
            blend_frac: 0.05,
            blend_cap: 0.1125 * r,
            max_pairs: 4096,
        }
    }

    pub fn lobe_radius(&self) -> f64 {
        0.5 * self.cap_radius
    }

    pub fn pair_length(&self) -> f64 {
        2.0 * std::f64::consts::TAU * self.lobe_radius().sin()
    }
}

/// Split [0, 1] into spans whose tantrix arclength stays below
/// `max_piece_len`, optionally checking discrete injectivity per span.
pub fn segment_spans(
    tbar: &SphericalCurve,
    arclen: &MonotoneCum,
    max_piece_len: f64,
    require_injective: bool,
) -> Result<Vec<(f64, f64)>> {
    let total = arclen.total();
    if !(max_piece_len > 0.0) {
        return Err(Error::CannotSegment("piece length bound must be positive".into()));
    }
    let n_pieces = (total / max_piece_len).ceil() as usize;
    let n_samples = tbar.n_samples();
    if n_pieces * 4 > n_samples {
        return Err(Error::CannotSegment(format!(
            "{n_pieces} pieces exceed the grid resolution ({n_samples} samples)"
        )));
    }
    let mut spans = Vec::with_capacity(n_pieces);
    let mut prev = 0.0;
    for j in 1..=n_pieces {
        let s = if j == n_pieces {
            1.0
        } else {
            arclen.invert(total * j as f64 / n_pieces as f64)
        };
        spans.push((prev, s));
        prev = s;
    }
    if require_injective {
        for &(s0, s1) in &spans {
            check_span_injective(tbar, s0, s1)?;
        }
    }
    Ok(spans)
}

/// Discrete injectivity: chords between well-separated samples of the span
/// must not collapse.
fn check_span_injective(tbar: &SphericalCurve, s0: f64, s1: f64) -> Result<()> {
    let m = 24;
    let pts: Vec<Vec<f64>> = (0..=m)
        .map(|i| tbar.eval_unit(s0 + (s1 - s0) * i as f64 / m as f64))
        .collect();
    for i in 0..=m {
        for j in (i + 3)..=m {
            if vecn::dist(&pts[i], &pts[j]) < 1e-12 {
                return Err(Error::CannotSegment(format!(
                    "tantrix revisits itself within piece [{s0:.4}, {s1:.4}]"
                )));
            }
        }
    }
    Ok(())
}

/// Spec-shaped segmentation: pieces of arclength below 0.45 R with a
/// discrete injectivity check, so each piece sits in a ball of radius R/4
/// about its midpoint.
pub fn segment_for_loops(tbar: &SphericalCurve, r: f64) -> Result<Vec<(f64, f64)>> {
    let arclen = tantrix_arclen(tbar);
    segment_spans(tbar, &arclen, 0.45 * r, true)
}

/// Arclength table of a spherical curve on its own parameter.
pub fn tantrix_arclen(tbar: &SphericalCurve) -> MonotoneCum {
    let t = tbar.clone();
    let dom = *tbar.domain();
    MonotoneCum::uniform(
        dom.a,
        dom.b,
        tbar.n_samples().max(64) * 2,
        Box::new(move |s| t.speed(s)),
    )
}

/// The loop length budget of a span: integral of the target speed minus the
/// arclength of the span. Fails if the target speed does not strictly
/// dominate the tantrix speed on the span.
pub fn loop_budget(
    vtilde: &dyn Fn(f64) -> f64,
    tbar: &SphericalCurve,
    span: (f64, f64),
) -> Result<f64> {
    let (s0, s1) = span;
    let m = 64;
    for i in 0..=m {
        let s = s0 + (s1 - s0) * i as f64 / m as f64;
        let margin = vtilde(s) - tbar.speed(s);
        if margin <= 0.0 {
            return Err(Error::SpeedMarginViolated { t: s, margin });
        }
    }
    let cells = 16;
    let h = (s1 - s0) / cells as f64;
    let mut acc = 0.0;
    for i in 0..cells {
        let lo = s0 + i as f64 * h;
        acc += gl8(|s| vtilde(s) - tbar.speed(s), lo, lo + h);
    }
    Ok(acc)
}

/// A family of nested composite loops at a fixed base point.
#[derive(Debug, Clone)]
pub struct LoopFamily {
    /// Base point on the sphere (arclength midpoint of the host span).
    pub base: Vec<f64>,
    /// Unit tangent of the host curve at the base.
    pub tangent: Vec<f64>,
    /// Lateral tilt direction (orthogonal to base and tangent).
    pub lateral: Vec<f64>,
    /// All loops stay within this geodesic distance of the base.
    pub cap_radius: f64,
    /// Length of the outermost composite unit (one lobe pair).
    pub max_length: f64,
    /// Blend window scale.
    pub blend_frac: f64,
    pub blend_cap: f64,
}

/// Orthonormal completion of (q, tau): the lateral tilt direction.
fn lateral_direction(q: &[f64], tau: &[f64]) -> Result<Vec<f64>> {
    let dim = q.len();
    if dim == 3 {
        let mut w = vecn::cross3(q, tau);
        vecn::normalize_mut(&mut w);
        return Ok(w);
    }
    // higher dimensions: take the axis least aligned with span{q, tau}
    let mut best: Option<(f64, Vec<f64>)> = None;
    for axis in 0..dim {
        let mut e = vecn::zeros(dim);
        e[axis] = 1.0;
        let mut r = vecn::reject_unit(&e, q);
        let d = vecn::dot(&r, tau);
        vecn::axpy(&mut r, -d, tau);
        let n = vecn::norm(&r);
        if best.as_ref().map_or(true, |(bn, _)| n > *bn) {
            best = Some((n, vecn::scale(&r, 1.0 / n.max(1e-300))));
        }
    }
    let (n, w) = best.unwrap();
    if n < 1e-6 {
        return Err(Error::CapTooSmall {
            cap: 0.0,
            requested: 0.0,
        });
    }
    Ok(w)
}

/// Build the loop family at the arclength midpoint of a span.
pub fn build_loop_family(
    tbar: &SphericalCurve,
    span: (f64, f64),
    config: &LoopConfig,
) -> Result<LoopFamily> {
    if config.cap_radius < 1e-9 {
        return Err(Error::CapTooSmall {
            cap: config.cap_radius,
            requested: 0.0,
        });
    }
    let arclen = tantrix_arclen(tbar);
    let (s0, s1) = span;
    let mid_len = 0.5 * (arclen.eval(s0) + arclen.eval(s1));
    let u_mid = arclen.invert(mid_len);
    let q = tbar.eval_unit(u_mid);
    let mut tau = tbar.deriv(u_mid, 1);
    let d = vecn::dot(&tau, &q);
    vecn::axpy(&mut tau, -d, &q);
    vecn::normalize_mut(&mut tau);
    let lateral = lateral_direction(&q, &tau)?;
    Ok(LoopFamily {
        base: q,
        tangent: tau,
        lateral,
        cap_radius: config.cap_radius,
        max_length: config.pair_length(),
        blend_frac: config.blend_frac,
        blend_cap: config.blend_cap,
    })
}

/// A concrete composite loop, sampled and measured.
#[derive(Debug, Clone)]
pub struct LoopPath {
    pub dim: usize,
    /// Dense samples along the loop (row-major points).
    pub points: Vec<f64>,
    /// Measured total arclength of the blended path.
    pub length: f64,
    pub start_tangent: Vec<f64>,
    pub end_tangent: Vec<f64>,
    /// Full outer pairs traversed.
    pub pairs: usize,
    /// Length assigned to the nested remainder pair.
    pub remainder: f64,
    /// Largest geodesic distance of any sample from the base point.
    pub max_cap_excursion: f64,
}

/// Lobe radii sequence for a raw loop length: full outer pairs plus one
/// nested remainder pair.
fn lobe_sequence(raw: f64, r_out: f64, max_pairs: usize) -> Result<(usize, f64, Vec<LobeRadius>)> {
    let pair = 2.0 * std::f64::consts::TAU * r_out.sin();
    let m = (raw / pair).floor() as usize;
    if m > max_pairs {
        return Err(Error::CapTooSmall {
            cap: 2.0 * r_out,
            requested: raw,
        });
    }
    let rem = raw - m as f64 * pair;
    let mut lobes = Vec::with_capacity(2 * m + 2);
    for _ in 0..m {
        lobes.push(LobeRadius { r: r_out, side: 1.0 });
        lobes.push(LobeRadius { r: r_out, side: -1.0 });
    }
    // nested remainder pair (skipped when negligible)
    if rem > 1e-13 * (1.0 + raw) {
        let s = (rem / (2.0 * std::f64::consts::TAU)).min(1.0);
        let r_rem = s.asin();
        lobes.push(LobeRadius { r: r_rem, side: 1.0 });
        lobes.push(LobeRadius { r: r_rem, side: -1.0 });
    }
    Ok((m, rem, lobes))
}

#[derive(Debug, Clone, Copy)]
struct LobeRadius {
    r: f64,
    side: f64,
}

/// Assemble the loop-only path (no host arcs): lobes with blends at the
/// internal junctions. Start and end are exact lobe points at the base.
fn loop_segments<'a>(
    family: &LoopFamily,
    lobes: &[LobeRadius],
    step: &'a Smoothstep,
) -> Vec<PathSeg<'a>> {
    let dim = family.base.len();
    let frames: Vec<LobeFrame> = lobes
        .iter()
        .map(|l| LobeFrame {
            q: family.base.clone(),
            tangent: family.tangent.clone(),
            lateral: vecn::scale(&family.lateral, l.side),
            radius: l.r,
        })
        .collect();
    let circs: Vec<f64> = frames.iter().map(|f| f.circumference()).collect();
    let mut segs: Vec<PathSeg<'a>> = Vec::new();
    let nl = frames.len();
    let window = |i: usize| -> f64 {
        // junction between lobe i and i+1
        let half_l = 0.5 * circs[i];
        let half_r = 0.5 * circs[i + 1];
        (family.blend_frac * half_l.min(half_r)).min(family.blend_cap)
    };
    for (i, frame) in frames.iter().enumerate() {
        let w_prev = if i == 0 { 0.0 } else { window(i - 1) };
        let w_next = if i + 1 == nl { 0.0 } else { window(i) };
        segs.push(PathSeg::Plain {
            arc: Arc::Lobe(frame.clone()),
            start: w_prev,
            len: circs[i] - w_prev - w_next,
        });
        if i + 1 < nl {
            let w = window(i);
            segs.push(PathSeg::Blend {
                left: Arc::Lobe(frame.clone()),
                l_at: circs[i],
                right: Arc::Lobe(frames[i + 1].clone()),
                r_at: 0.0,
                w,
                step,
            });
        }
    }
    let _ = dim;
    segs
}

/// Build the composite loop of exact length `target` at the family's base.
pub fn composite_loop(family: &LoopFamily, target: f64) -> Result<LoopPath> {
    if !(target > 0.0) {
        return Err(Error::CapTooSmall {
            cap: family.cap_radius,
            requested: target,
        });
    }
    let r_out = 0.5 * family.cap_radius;
    let step = Smoothstep::new(4);
    let dim = family.base.len();
    let build_len = |raw: f64| -> Result<f64> {
        let (_, _, lobes) = lobe_sequence(raw, r_out, usize::MAX)?;
        if lobes.is_empty() {
            return Ok(0.0);
        }
        let segs = loop_segments(family, &lobes, &step);
        Ok(CompositePath::new(dim, segs).total_len())
    };
    // blends only shorten slightly; bracket around the target and solve
    let mut lo = (target * 0.8).max(target - 1.0);
    let mut hi = target * 1.25 + 1e-9;
    for _ in 0..8 {
        if build_len(lo)? <= target {
            break;
        }
        lo *= 0.5;
    }
    for _ in 0..8 {
        if build_len(hi)? >= target {
            break;
        }
        hi *= 1.5;
    }
    let raw = solve_monotone_no_deriv(
        |r| build_len(r).unwrap_or(f64::NAN) - target,
        lo,
        hi,
        1e-13 * target.max(1.0),
        200,
    );
    let (pairs, remainder, lobes) = lobe_sequence(raw, r_out, usize::MAX)?;
    let segs = loop_segments(family, &lobes, &step);
    let path = CompositePath::new(dim, segs);
    let length = path.total_len();
    let n = 64 * lobes.len().max(1);
    let mut points = vec![0.0; (n + 1) * dim];
    let mut max_exc = 0.0f64;
    for i in 0..=n {
        let s = length * i as f64 / n as f64;
        let row = &mut points[i * dim..(i + 1) * dim];
        path.eval(s, row);
        max_exc = max_exc.max(vecn::sphere_dist(row, &family.base));
    }
    let mut start_tangent = vec![0.0; dim];
    let mut end_tangent = vec![0.0; dim];
    if let Some(PathSeg::Plain { arc, start, .. }) = path.segs.first() {
        arc.deriv(*start, &mut start_tangent);
    }
    if let Some(PathSeg::Plain { arc, start, len }) = path.segs.last() {
        arc.deriv(start + len, &mut end_tangent);
    }
    Ok(LoopPath {
        dim,
        points,
        length,
        start_tangent,
        end_tangent,
        pairs,
        remainder,
        max_cap_excursion: max_exc,
    })
}

/// Per-span loop plan entry.
#[derive(Debug, Clone)]
pub struct LoopPlanEntry {
    pub span: (f64, f64),
    /// Parameter of the arclength midpoint.
    pub midpoint: f64,
    pub base: Vec<f64>,
    pub budget: f64,
    pub pairs: usize,
    pub remainder: f64,
}

#[derive(Debug, Clone, Default)]
pub struct LoopPlan {
    pub entries: Vec<LoopPlanEntry>,
}

pub use insert::{build_tantrix_path, insert_loops, InsertDiagnostics, TantrixPath};

mod insert;

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn great_circle_arc(len: f64, n: usize) -> SphericalCurve {
        SphericalCurve::from_fn(Domain::interval(0.0, 1.0), n, 3, 5, |s, out| {
            let a = len * s;
            out[0] = a.cos();
            out[1] = a.sin();
            out[2] = 0.0;
        })
        .unwrap()
    }

    #[test]
    fn segmentation_on_arc() {
        // arc of length 1 with R = 4: a single span suffices
        let t = great_circle_arc(1.0, 256);
        let spans = segment_for_loops(&t, 4.0).unwrap();
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0], (0.0, 1.0));
        // full circle length 2 pi with R = 1: at least ceil(2 pi / 0.5) = 13
        let t = great_circle_arc(TAU, 1024);
        let spans = segment_for_loops(&t, 1.0).unwrap();
        assert!(spans.len() >= 13, "{}", spans.len());
        // spans partition [0, 1]
        assert_eq!(spans.first().unwrap().0, 0.0);
        assert_eq!(spans.last().unwrap().1, 1.0);
        for w in spans.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        // each piece: chord diameter <= arc length < R/2
        let arclen = tantrix_arclen(&t);
        for &(s0, s1) in &spans {
            let arc = arclen.eval(s1) - arclen.eval(s0);
            assert!(arc < 0.5, "arc {arc}");
            let p0 = t.eval_unit(s0);
            let p1 = t.eval_unit(s1);
            assert!(vecn::dist(&p0, &p1) <= arc + 1e-12);
        }
    }

    #[test]
    fn segmentation_needs_resolution() {
        let t = great_circle_arc(TAU, 64);
        assert!(matches!(
            segment_for_loops(&t, 1e-3),
            Err(Error::CannotSegment(_))
        ));
    }

    #[test]
    fn budget_arithmetic() {
        // |Tbar'| = 1, vtilde = 2, span width 0.3 -> budget 0.3
        let t = great_circle_arc(1.0, 256);
        let b = loop_budget(&|_| 2.0, &t, (0.2, 0.5)).unwrap();
        assert!((b - 0.3).abs() < 1e-10, "{b}");
        // zero margin is rejected
        assert!(matches!(
            loop_budget(&|s| if s < 0.35 { 1.0 } else { 2.0 }, &t, (0.2, 0.5)),
            Err(Error::SpeedMarginViolated { .. })
        ));
    }

    #[test]
    fn family_frames_are_orthonormal() {
        let t = great_circle_arc(1.0, 256);
        let config = LoopConfig::for_ball_radius(0.4);
        let fam = build_loop_family(&t, (0.0, 1.0), &config).unwrap();
        assert!((vecn::norm(&fam.base) - 1.0).abs() < 1e-12);
        assert!((vecn::norm(&fam.tangent) - 1.0).abs() < 1e-12);
        assert!((vecn::norm(&fam.lateral) - 1.0).abs() < 1e-12);
        assert!(vecn::dot(&fam.base, &fam.tangent).abs() < 1e-12);
        assert!(vecn::dot(&fam.base, &fam.lateral).abs() < 1e-12);
        assert!(vecn::dot(&fam.tangent, &fam.lateral).abs() < 1e-12);
        // midpoint of the arc [0, 1] is at arclength 1/2
        assert!(vecn::dist(&fam.base, &[0.5f64.cos(), 0.5f64.sin(), 0.0]) < 1e-9);
    }

    #[test]
    fn composite_loop_exact_lengths() {
        let t = great_circle_arc(1.0, 256);
        let config = LoopConfig::for_ball_radius(0.5);
        let fam = build_loop_family(&t, (0.0, 1.0), &config).unwrap();
        // one full outer unit
        let lp = composite_loop(&fam, fam.max_length).unwrap();
        assert!((lp.length - fam.max_length).abs() < 1e-9);
        assert_eq!(lp.pairs + usize::from(lp.remainder > 0.0), 1);
        // 2.5 outer units: 2 pairs plus half-length remainder
        let lp = composite_loop(&fam, 2.5 * fam.max_length).unwrap();
        assert!((lp.length - 2.5 * fam.max_length).abs() < 1e-8);
        assert_eq!(lp.pairs, 2);
        assert!((lp.remainder - 0.5 * fam.max_length).abs() < 0.02 * fam.max_length);
        // random lengths are matched to 1e-8
        for i in 1..=10 {
            let target = fam.max_length * (0.13 + 0.41 * i as f64);
            let lp = composite_loop(&fam, target).unwrap();
            assert!((lp.length - target).abs() < 1e-8, "target {target}");
            // starts and ends at the base with the host tangent
            let p0 = &lp.points[..3];
            let pn = &lp.points[lp.points.len() - 3..];
            assert!(vecn::dist(p0, &fam.base) < 1e-9);
            assert!(vecn::dist(pn, &fam.base) < 1e-9);
            assert!(vecn::dist(&lp.start_tangent, &fam.tangent) < 1e-9);
            assert!(vecn::dist(&lp.end_tangent, &fam.tangent) < 1e-9);
            // cap containment
            assert!(lp.max_cap_excursion <= fam.cap_radius + 1e-9);
        }
    }
}
