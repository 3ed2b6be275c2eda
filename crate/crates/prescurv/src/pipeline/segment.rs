//! Global segmentation: split the domain into intervals whose tantrix image
//! sits in a small spherical ball, with prescribed points on the boundary.

use crate::geom::{Domain, ParamCurve};
use crate::Result;

/// A segment of the global parameter domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub a: f64,
    pub b: f64,
}

impl Span {
    pub fn len(&self) -> f64 {
        self.b - self.a
    }
}

/// Split the domain so that every piece keeps its tantrix image inside a
/// ball of radius `ball_radius`, has parameter length at most
/// `max_len`, and has all `pinned` parameters on piece boundaries. Circle
/// domains are split into at least two pieces so every piece is an interval.
pub fn segment_global(
    f: &ParamCurve,
    ball_radius: f64,
    max_len: f64,
    pinned: &[f64],
) -> Result<Vec<Span>> {
    let domain = *f.domain();
    let dim = f.dim();
    // anchor points: pinned parameters wrapped into the domain and sorted
    let mut anchors: Vec<f64> = pinned.iter().map(|&p| domain.wrap(p)).collect();
    anchors.sort_by(|x, y| x.partial_cmp(y).unwrap());
    anchors.dedup_by(|x, y| (*x - *y).abs() < 1e-12 * domain.len());

    // stretches between anchors covering the whole domain
    let mut stretches: Vec<(f64, f64)> = Vec::new();
    if domain.is_circle() {
        if anchors.is_empty() {
            stretches.push((domain.a, domain.b));
        } else {
            for i in 0..anchors.len() {
                let s = anchors[i];
                let e = if i + 1 < anchors.len() {
                    anchors[i + 1]
                } else {
                    anchors[0] + domain.len()
                };
                stretches.push((s, e));
            }
        }
    } else {
        let mut pts = anchors.clone();
        if pts.first().map_or(true, |&p| p > domain.a + 1e-12) {
            pts.insert(0, domain.a);
        }
        if pts.last().map_or(true, |&p| p < domain.b - 1e-12) {
            pts.push(domain.b);
        }
        for w in pts.windows(2) {
            stretches.push((w[0], w[1]));
        }
    }

    // greedy refinement within each stretch: extend while the tangent image
    // fits the ball (tracked by a bounding box) and the length cap holds
    let n_scan = f.n_samples() * 2;
    let h_scan = domain.len() / n_scan as f64;
    let mut spans = Vec::new();
    let mut tang = vec![0.0; dim];
    for &(s, e) in &stretches {
        let mut start = s;
        loop {
            let mut lo = vec![f64::INFINITY; dim];
            let mut hi = vec![f64::NEG_INFINITY; dim];
            let mut t = start;
            let mut end = start;
            while t < e - 1e-15 {
                let tn = (t + h_scan).min(e);
                f.deriv_into(tn, 1, &mut tang);
                let nrm = crate::num::vecn::norm(&tang);
                for (d, v) in tang.iter().enumerate() {
                    let u = v / nrm;
                    lo[d] = lo[d].min(u);
                    hi[d] = hi[d].max(u);
                }
                let diag: f64 = lo
                    .iter()
                    .zip(&hi)
                    .map(|(l, h)| (h - l) * (h - l))
                    .sum::<f64>()
                    .sqrt();
                if diag > 2.0 * ball_radius || tn - start > max_len {
                    break;
                }
                t = tn;
                end = tn;
            }
            if end <= start + 1e-15 {
                end = (start + h_scan).min(e);
            }
            spans.push(Span { a: start, b: end });
            if end >= e - 1e-15 {
                break;
            }
            start = end;
        }
    }

    // circles need at least two pieces so each one is a plain interval
    if domain.is_circle() && spans.len() < 2 {
        let only = spans[0];
        let mid = 0.5 * (only.a + only.b);
        spans = vec![Span { a: only.a, b: mid }, Span { a: mid, b: only.b }];
    }
    Ok(spans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn straight_ish_segment_stays_single() {
        // gentle arc with a huge ball: one segment
        let f = ParamCurve::from_fn(Domain::interval(0.0, 0.8), 129, 3, 5, |t, out| {
            out[0] = t.cos();
            out[1] = t.sin();
            out[2] = 0.0;
        })
        .unwrap();
        let spans = segment_global(&f, 2.0, 1.0, &[]).unwrap();
        assert_eq!(spans.len(), 1);
    }

    #[test]
    fn circle_segment_count_scales_with_ball() {
        let f = presets::circle(1.0, 2048, 5).unwrap();
        // tantrix moves at unit rate: ball radius eps/4 with eps = 0.1
        // means ~ 2 pi / (eps / 2) pieces or more
        let spans = segment_global(&f, 0.025, 1.0, &[]).unwrap();
        assert!(spans.len() >= 125, "{}", spans.len());
        // partition covers the domain
        let total: f64 = spans.iter().map(|s| s.len()).sum();
        assert!((total - std::f64::consts::TAU).abs() < 1e-9);
    }

    #[test]
    fn pinned_points_are_boundaries() {
        let f = presets::circle(1.0, 1024, 5).unwrap();
        let pinned = [0.0, 1.3, 4.0];
        let spans = segment_global(&f, 0.05, 1.0, &pinned).unwrap();
        for p in pinned {
            assert!(
                spans.iter().any(|s| (s.a - p).abs() < 1e-9 || (s.b - p).abs() < 1e-9),
                "pinned {p} not on a boundary"
            );
        }
        for s in &spans {
            assert!(s.len() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn closed_domain_gets_two_pieces_minimum() {
        let f = presets::circle(1.0, 512, 5).unwrap();
        let spans = segment_global(&f, 10.0, 10.0, &[]).unwrap();
        assert!(spans.len() >= 2);
    }
}
