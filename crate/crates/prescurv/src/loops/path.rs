//! Piecewise spherical paths: tantrix arcs, circular lobes, and smooth
//! blends between them, all addressable by true arclength.

use crate::geom::SphericalCurve;
use crate::num::cumint::Cum;
use crate::num::gauss::GL16;
use crate::num::{vecn, Smoothstep};
use std::cell::RefCell;
use std::sync::OnceLock;

thread_local! {
    static SCRATCH: RefCell<Vec<f64>> = const { RefCell::new(Vec::new()) };
}

/// Run `f` with six scratch slices of length `dim` without allocating on
/// the steady path.
fn with_scratch<R>(dim: usize, f: impl FnOnce(&mut [f64]) -> R) -> R {
    SCRATCH.with(|cell| {
        let mut buf = cell.borrow_mut();
        if buf.len() < 6 * dim {
            buf.resize(6 * dim, 0.0);
        }
        f(&mut buf[..6 * dim])
    })
}

/// One lobe: a spherical circle through a base point with given tangent,
/// tilted sideways, traversed by arclength.
#[derive(Debug, Clone)]
pub struct LobeFrame {
    pub q: Vec<f64>,
    pub tangent: Vec<f64>,
    pub lateral: Vec<f64>,
    pub radius: f64, // geodesic radius r; circumference 2 pi sin r
}

impl LobeFrame {
    pub fn circumference(&self) -> f64 {
        std::f64::consts::TAU * self.radius.sin()
    }

    /// Point at arclength s from q (s may run outside one lap).
    pub fn eval(&self, s: f64, out: &mut [f64]) {
        let r = self.radius;
        let (sr, cr) = (r.sin(), r.cos());
        let ang = s / sr;
        let (sa, ca) = (ang.sin(), ang.cos());
        // center direction m = cos r q + sin r w; in-plane frame
        // a = sin r q - cos r w, b = tangent
        for ((o, (&qv, &wv)), &tv) in out
            .iter_mut()
            .zip(self.q.iter().zip(&self.lateral))
            .zip(&self.tangent)
        {
            let m = cr * qv + sr * wv;
            let a = sr * qv - cr * wv;
            *o = cr * m + sr * (ca * a + sa * tv);
        }
    }

    /// Unit tangent at arclength s.
    pub fn deriv(&self, s: f64, out: &mut [f64]) {
        let r = self.radius;
        let (sr, cr) = (r.sin(), r.cos());
        let ang = s / sr;
        let (sa, ca) = (ang.sin(), ang.cos());
        for ((o, (&qv, &wv)), &tv) in out
            .iter_mut()
            .zip(self.q.iter().zip(&self.lateral))
            .zip(&self.tangent)
        {
            let a = sr * qv - cr * wv;
            *o = -sa * a + ca * tv;
        }
    }
}

/// An arclength-parametrized analytic arc.
#[derive(Clone)]
pub enum Arc<'a> {
    /// Slice of the base tantrix, addressed through its arclength table:
    /// local arclength 0 corresponds to table value `at`.
    Tantrix {
        tantrix: &'a SphericalCurve,
        arclen: &'a Cum<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
        at: f64,
    },
    Lobe(LobeFrame),
}

impl<'a> Arc<'a> {
    pub fn eval(&self, s: f64, out: &mut [f64]) {
        match self {
            Arc::Tantrix {
                tantrix,
                arclen,
                at,
            } => {
                let u = arclen.invert(at + s);
                tantrix.eval_into(u, out);
                vecn::normalize_mut(out);
            }
            Arc::Lobe(f) => f.eval(s, out),
        }
    }

    pub fn deriv(&self, s: f64, out: &mut [f64]) {
        match self {
            Arc::Tantrix {
                tantrix,
                arclen,
                at,
            } => {
                let u = arclen.invert(at + s);
                tantrix.curve().deriv_into(u, 1, out);
                vecn::normalize_mut(out);
            }
            Arc::Lobe(f) => f.deriv(s, out),
        }
    }
}

/// One segment of a composite path, parametrized by a local coordinate in
/// [0, len] (nominal arclength).
pub enum PathSeg<'a> {
    Plain {
        arc: Arc<'a>,
        /// Arc-local coordinate of the segment start.
        start: f64,
        len: f64,
    },
    /// Smooth bridge across a junction: left arc ends at the junction
    /// (local coordinate `l_at`), right arc starts there (`r_at`). The local
    /// coordinate runs over [0, 2w] with the junction at w.
    Blend {
        left: Arc<'a>,
        l_at: f64,
        right: Arc<'a>,
        r_at: f64,
        w: f64,
        step: &'a Smoothstep,
    },
}

impl<'a> PathSeg<'a> {
    pub fn nominal_len(&self) -> f64 {
        match self {
            PathSeg::Plain { len, .. } => *len,
            PathSeg::Blend { w, .. } => 2.0 * w,
        }
    }

    pub fn eval(&self, s: f64, out: &mut [f64]) {
        match self {
            PathSeg::Plain { arc, start, .. } => arc.eval(start + s, out),
            PathSeg::Blend {
                left,
                l_at,
                right,
                r_at,
                w,
                step,
            } => {
                let sigma = s - w; // signed offset from the junction
                let mix = step.eval(s / (2.0 * w));
                let dim = out.len();
                with_scratch(dim, |buf| {
                    let (pl, rest) = buf.split_at_mut(dim);
                    let pr = &mut rest[..dim];
                    left.eval(l_at + sigma, pl);
                    right.eval(r_at + sigma, pr);
                    for ((o, &a), &b) in out.iter_mut().zip(pl.iter()).zip(pr.iter()) {
                        *o = (1.0 - mix) * a + mix * b;
                    }
                });
                vecn::normalize_mut(out);
            }
        }
    }

    /// Parametric speed |dP/ds| of the (normalized) segment. Plain segments
    /// are arclength-parametrized; blends deviate slightly.
    pub fn param_speed(&self, s: f64, dim: usize) -> f64 {
        match self {
            PathSeg::Plain { .. } => 1.0,
            PathSeg::Blend {
                left,
                l_at,
                right,
                r_at,
                w,
                step,
            } => {
                let sigma = s - w;
                let x = s / (2.0 * w);
                let mix = step.eval(x);
                let dmix = step.deriv(x) / (2.0 * w);
                with_scratch(dim, |buf| {
                    let (pl, rest) = buf.split_at_mut(dim);
                    let (pr, rest) = rest.split_at_mut(dim);
                    let (dl, rest) = rest.split_at_mut(dim);
                    let (dr, rest) = rest.split_at_mut(dim);
                    let (v, rest) = rest.split_at_mut(dim);
                    let dv = &mut rest[..dim];
                    left.eval(l_at + sigma, pl);
                    right.eval(r_at + sigma, pr);
                    left.deriv(l_at + sigma, dl);
                    right.deriv(r_at + sigma, dr);
                    for i in 0..dim {
                        v[i] = (1.0 - mix) * pl[i] + mix * pr[i];
                        dv[i] = dmix * (pr[i] - pl[i]) + (1.0 - mix) * dl[i] + mix * dr[i];
                    }
                    // speed of v/|v|: |dv - (vhat . dv) vhat| / |v|
                    let nv = vecn::norm(v);
                    let vd = vecn::dot(v, dv) / nv;
                    let mut tang2 = 0.0;
                    for i in 0..dim {
                        let c = dv[i] - vd * v[i] / nv;
                        tang2 += c * c;
                    }
                    tang2.sqrt() / nv
                })
            }
        }
    }
}

/// Cumulative-arclength mini-table for one blend, built lazily on first use.
#[derive(Debug, Clone)]
struct BlendTable {
    xs: Vec<f64>,
    cum: Vec<f64>,
    slope: Vec<f64>,
}

impl BlendTable {
    fn build(seg: &PathSeg<'_>, dim: usize, w: f64) -> Self {
        let nodes = 49;
        let xs: Vec<f64> = (0..nodes)
            .map(|i| 2.0 * w * i as f64 / (nodes - 1) as f64)
            .collect();
        let mut cum = Vec::with_capacity(nodes);
        cum.push(0.0);
        let mut acc = 0.0;
        for i in 1..nodes {
            let (a, b) = (xs[i - 1], xs[i]);
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            let mut sum = 0.0;
            for &(x, wt) in &crate::num::gauss::GL4 {
                sum += wt * seg.param_speed(c + h * x, dim);
            }
            acc += sum * h;
            cum.push(acc);
        }
        let slope: Vec<f64> = xs.iter().map(|&x| seg.param_speed(x, dim)).collect();
        Self { xs, cum, slope }
    }

    fn hermite(&self, i: usize, t: f64) -> (f64, f64) {
        let (t0, t1) = (self.xs[i], self.xs[i + 1]);
        let h = t1 - t0;
        let x = (t - t0) / h;
        let (y0, y1) = (self.cum[i], self.cum[i + 1]);
        let (d0, d1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let x2 = x * x;
        let x3 = x2 * x;
        let v = y0 * (2.0 * x3 - 3.0 * x2 + 1.0)
            + d0 * (x3 - 2.0 * x2 + x)
            + y1 * (-2.0 * x3 + 3.0 * x2)
            + d1 * (x3 - x2);
        let dv = (y0 * (6.0 * x2 - 6.0 * x)
            + d0 * (3.0 * x2 - 4.0 * x + 1.0)
            + y1 * (-6.0 * x2 + 6.0 * x)
            + d1 * (3.0 * x2 - 2.0 * x))
            / h;
        (v, dv)
    }

    /// Nominal coordinate whose cumulative true length equals `s`.
    fn invert(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, *self.cum.last().unwrap());
        let i = match self.cum.binary_search_by(|p| p.partial_cmp(&s).unwrap()) {
            Ok(i) => return self.xs[i.min(self.xs.len() - 1)],
            Err(i) => (i - 1).min(self.xs.len() - 2),
        };
        let (mut lo, mut hi) = (self.xs[i], self.xs[i + 1]);
        let mut t = 0.5 * (lo + hi);
        for _ in 0..30 {
            let (v, d) = self.hermite(i, t);
            if v > s {
                hi = t;
            } else {
                lo = t;
            }
            let mut tn = if d > 0.0 { t - (v - s) / d } else { f64::NAN };
            if !(tn >= lo && tn <= hi) {
                tn = 0.5 * (lo + hi);
            }
            if (tn - t).abs() < 1e-16 + 1e-14 * hi {
                return tn;
            }
            t = tn;
        }
        t
    }
}

/// Composite path with a true-arclength table over its segments.
pub struct CompositePath<'a> {
    pub dim: usize,
    pub segs: Vec<PathSeg<'a>>,
    /// True length of each segment.
    true_len: Vec<f64>,
    /// Prefix sums of true lengths (len + 1 entries).
    prefix: Vec<f64>,
    /// Lazily built inversion tables, one slot per segment (blends only).
    tables: Vec<OnceLock<BlendTable>>,
}

impl<'a> CompositePath<'a> {
    pub fn new(dim: usize, segs: Vec<PathSeg<'a>>) -> Self {
        let mut true_len = Vec::with_capacity(segs.len());
        for seg in &segs {
            let l = match seg {
                PathSeg::Plain { len, .. } => *len,
                PathSeg::Blend { w, .. } => {
                    // GL16 is plenty for the short, smooth bridge
                    let (a, b) = (0.0, 2.0 * w);
                    let c = 0.5 * (a + b);
                    let h = 0.5 * (b - a);
                    let mut s = 0.0;
                    for &(x, wt) in &GL16 {
                        s += wt * seg.param_speed(c + h * x, dim);
                    }
                    s * h
                }
            };
            true_len.push(l);
        }
        let mut prefix = Vec::with_capacity(true_len.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &l in &true_len {
            acc += l;
            prefix.push(acc);
        }
        let tables = (0..segs.len()).map(|_| OnceLock::new()).collect();
        Self {
            dim,
            segs,
            true_len,
            prefix,
            tables,
        }
    }

    pub fn total_len(&self) -> f64 {
        *self.prefix.last().unwrap()
    }

    /// Boundaries of the segments in true arclength.
    pub fn seg_boundaries(&self) -> &[f64] {
        &self.prefix
    }

    /// Map true arclength to (segment index, local nominal coordinate).
    fn locate(&self, s: f64) -> (usize, f64) {
        let s = s.clamp(0.0, self.total_len());
        let i = match self
            .prefix
            .binary_search_by(|p| p.partial_cmp(&s).unwrap())
        {
            Ok(i) => i.min(self.segs.len() - 1),
            Err(i) => i - 1,
        };
        let local_true = s - self.prefix[i];
        let local = match &self.segs[i] {
            PathSeg::Plain { .. } => local_true,
            seg @ PathSeg::Blend { w, .. } => {
                let table = self.tables[i]
                    .get_or_init(|| BlendTable::build(seg, self.dim, *w));
                table.invert(local_true)
            }
        };
        (i, local)
    }

    /// Point at true arclength s from the path start.
    pub fn eval(&self, s: f64, out: &mut [f64]) {
        let (i, local) = self.locate(s);
        self.segs[i].eval(local, out);
    }

    pub fn true_seg_len(&self, i: usize) -> f64 {
        self.true_len[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(radius: f64, side: f64) -> LobeFrame {
        LobeFrame {
            q: vec![0.0, 0.0, 1.0],
            tangent: vec![1.0, 0.0, 0.0],
            lateral: vec![0.0, side, 0.0],
            radius,
        }
    }

    #[test]
    fn lobe_passes_through_base_with_tangent() {
        let f = frame(0.2, 1.0);
        let mut p = vec![0.0; 3];
        f.eval(0.0, &mut p);
        assert!(vecn::dist(&p, &[0.0, 0.0, 1.0]) < 1e-15);
        let mut d = vec![0.0; 3];
        f.deriv(0.0, &mut d);
        assert!(vecn::dist(&d, &[1.0, 0.0, 0.0]) < 1e-15);
        // closes after one circumference
        f.eval(f.circumference(), &mut p);
        assert!(vecn::dist(&p, &[0.0, 0.0, 1.0]) < 1e-12);
        // stays on the sphere and within the 2r cap
        for i in 0..=50 {
            let s = f.circumference() * i as f64 / 50.0;
            f.eval(s, &mut p);
            assert!((vecn::norm(&p) - 1.0).abs() < 1e-14);
            assert!(vecn::sphere_dist(&p, &f.q) <= 2.0 * f.radius + 1e-12);
        }
    }

    #[test]
    fn lobe_arclength_parametrized() {
        let f = frame(0.15, -1.0);
        let mut a = vec![0.0; 3];
        let mut b = vec![0.0; 3];
        let h = 1e-6;
        for i in 0..10 {
            let s = 0.08 * i as f64;
            f.eval(s + h, &mut a);
            f.eval(s - h, &mut b);
            let speed = vecn::dist(&a, &b) / (2.0 * h);
            assert!((speed - 1.0).abs() < 1e-8, "s={s}: {speed}");
        }
    }

    #[test]
    fn blend_between_lobes_is_smooth_and_measured() {
        let step = Smoothstep::new(4);
        let left = Arc::Lobe(frame(0.2, 1.0));
        let right = Arc::Lobe(frame(0.2, -1.0));
        let w = 0.02;
        let lcirc = std::f64::consts::TAU * 0.2f64.sin();
        let segs = vec![
            PathSeg::Plain {
                arc: left.clone(),
                start: 0.0,
                len: lcirc - w,
            },
            PathSeg::Blend {
                left: left.clone(),
                l_at: lcirc,
                right: right.clone(),
                r_at: 0.0,
                w,
                step: &step,
            },
            PathSeg::Plain {
                arc: right.clone(),
                start: w,
                len: lcirc - w,
            },
        ];
        let path = CompositePath::new(3, segs);
        // total should be near 2*circumference (blend shortcut is tiny)
        let total = path.total_len();
        assert!((total - 2.0 * lcirc).abs() < 1e-3 * lcirc, "{total}");
        // the path is arclength-parametrized through the blend
        let mut a = vec![0.0; 3];
        let mut b = vec![0.0; 3];
        let h = 1e-6;
        for i in 1..200 {
            let s = total * i as f64 / 200.0;
            path.eval(s + h, &mut a);
            path.eval(s - h, &mut b);
            let speed = vecn::dist(&a, &b) / (2.0 * h);
            assert!((speed - 1.0).abs() < 1e-6, "s={s}: {speed}");
        }
        // continuity across the junction
        let sj = path.seg_boundaries()[1];
        path.eval(sj - 1e-9, &mut a);
        path.eval(sj + 1e-9, &mut b);
        assert!(vecn::dist(&a, &b) < 1e-8);
        // everything stays on the sphere
        for i in 0..=300 {
            let s = total * i as f64 / 300.0;
            path.eval(s, &mut a);
            assert!((vecn::norm(&a) - 1.0).abs() < 1e-12);
        }
    }
}
