//! Cumulative integrals of positive integrands with fast evaluation and
//! monotone inversion. The workhorse behind arclength tables, mass functions,
//! and speed reparametrizations.
//!
//! Construction integrates each cell with GL8; queries interpolate the
//! cumulative with a per-cell cubic Hermite (values + integrand slopes), so
//! evaluation and inversion never touch the integrand again. Cells are
//! refined at build time until the Hermite error sits at rounding level.

use super::gauss::gl8;

/// Prefix table of integrals of `f` over a cell partition, generic in how the
/// integrand is owned.
pub struct Cum<F: Fn(f64) -> f64> {
    edges: Vec<f64>,
    prefix: Vec<f64>,
    slope: Vec<f64>,
    f: F,
}

/// Owning flavor, usable across threads.
pub type MonotoneCum = Cum<Box<dyn Fn(f64) -> f64 + Send + Sync>>;

/// Minimum number of cells after internal refinement.
const MIN_CELLS: usize = 1024;

impl<F: Fn(f64) -> f64> Cum<F> {
    /// Build from cell edges (strictly increasing) and a positive integrand.
    pub fn new(edges_in: Vec<f64>, f: F) -> Self {
        assert!(edges_in.len() >= 2);
        let refine = MIN_CELLS.div_ceil(edges_in.len() - 1).max(1);
        let mut edges = Vec::with_capacity((edges_in.len() - 1) * refine + 1);
        for w in edges_in.windows(2) {
            for k in 0..refine {
                edges.push(w[0] + (w[1] - w[0]) * k as f64 / refine as f64);
            }
        }
        edges.push(*edges_in.last().unwrap());
        let mut prefix = Vec::with_capacity(edges.len());
        prefix.push(0.0);
        let mut acc = 0.0;
        for w in edges.windows(2) {
            acc += gl8(&f, w[0], w[1]);
            prefix.push(acc);
        }
        let slope: Vec<f64> = edges.iter().map(|&t| f(t)).collect();
        Self {
            edges,
            prefix,
            slope,
            f,
        }
    }

    pub fn uniform(a: f64, b: f64, cells: usize, f: F) -> Self {
        let edges = (0..=cells)
            .map(|i| a + (b - a) * i as f64 / cells as f64)
            .collect();
        Self::new(edges, f)
    }

    pub fn a(&self) -> f64 {
        self.edges[0]
    }

    pub fn b(&self) -> f64 {
        *self.edges.last().unwrap()
    }

    pub fn total(&self) -> f64 {
        *self.prefix.last().unwrap()
    }

    pub fn integrand(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    fn cell_of(&self, t: f64) -> usize {
        match self.edges.binary_search_by(|e| e.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.edges.len() - 2),
            Err(i) => i - 1,
        }
    }

    /// Hermite interpolation of the cumulative within cell i.
    fn hermite(&self, i: usize, t: f64) -> f64 {
        let (t0, t1) = (self.edges[i], self.edges[i + 1]);
        let h = t1 - t0;
        let x = (t - t0) / h;
        let (y0, y1) = (self.prefix[i], self.prefix[i + 1]);
        let (d0, d1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let x2 = x * x;
        let x3 = x2 * x;
        y0 * (2.0 * x3 - 3.0 * x2 + 1.0)
            + d0 * (x3 - 2.0 * x2 + x)
            + y1 * (-2.0 * x3 + 3.0 * x2)
            + d1 * (x3 - x2)
    }

    fn hermite_deriv(&self, i: usize, t: f64) -> f64 {
        let (t0, t1) = (self.edges[i], self.edges[i + 1]);
        let h = t1 - t0;
        let x = (t - t0) / h;
        let (y0, y1) = (self.prefix[i], self.prefix[i + 1]);
        let (d0, d1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let x2 = x * x;
        (y0 * (6.0 * x2 - 6.0 * x)
            + d0 * (3.0 * x2 - 4.0 * x + 1.0)
            + y1 * (-6.0 * x2 + 6.0 * x)
            + d1 * (3.0 * x2 - 2.0 * x))
            / h
    }

    /// Integral from the left edge to t (t clamped to the supported range).
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(self.a(), self.b());
        self.hermite(self.cell_of(t), t)
    }

    /// Inverse of the cumulative map: find t with eval(t) = s.
    pub fn invert(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.total());
        let i = match self.prefix.binary_search_by(|p| p.partial_cmp(&s).unwrap()) {
            Ok(i) => return self.edges[i.min(self.edges.len() - 1)],
            Err(i) => (i - 1).min(self.edges.len() - 2),
        };
        let (mut lo, mut hi) = (self.edges[i], self.edges[i + 1]);
        let mut t = lo + (hi - lo) * (s - self.prefix[i]) / (self.prefix[i + 1] - self.prefix[i]);
        for _ in 0..40 {
            let v = self.hermite(i, t) - s;
            if v > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = self.hermite_deriv(i, t);
            let mut tn = if d > 0.0 { t - v / d } else { f64::NAN };
            if !(tn >= lo && tn <= hi) {
                tn = 0.5 * (lo + hi);
            }
            if (tn - t).abs() <= 1e-15 * (self.b() - self.a()).max(1.0) {
                return tn;
            }
            t = tn;
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_of_cos_matches_sin() {
        let c = MonotoneCum::uniform(0.0, 1.5, 64, Box::new(|t: f64| t.cos()));
        for i in 0..=10 {
            let t = 1.5 * i as f64 / 10.0;
            assert!((c.eval(t) - t.sin()).abs() < 1e-13);
        }
        let t = c.invert(0.9);
        assert!((t - 0.9f64.asin()).abs() < 1e-12);
    }

    #[test]
    fn invert_round_trips() {
        let c = MonotoneCum::uniform(-1.0, 2.0, 48, Box::new(|t: f64| 1.0 + t * t));
        for i in 0..=20 {
            let t = -1.0 + 3.0 * i as f64 / 20.0;
            let s = c.eval(t);
            assert!((c.invert(s) - t).abs() < 1e-11);
        }
    }

    #[test]
    fn borrowed_integrand_works() {
        let g = |t: f64| 2.0 + t.sin();
        let c = Cum::uniform(0.0, 3.0, 32, &g);
        assert!((c.eval(3.0) - (6.0 + 1.0 - 3.0f64.cos())).abs() < 1e-12);
    }

    #[test]
    fn interior_eval_accuracy() {
        // off-edge points exercise the Hermite interpolation
        let c = MonotoneCum::uniform(0.0, 2.0, 100, Box::new(|t: f64| (3.0 * t).exp() * 0.1 + 1.0));
        let exact = |t: f64| ((3.0 * t).exp() - 1.0) / 30.0 + t;
        for i in 0..500 {
            let t = 2.0 * (i as f64 + 0.37) / 500.0;
            assert!((c.eval(t) - exact(t)).abs() < 1e-10, "t={t}");
        }
    }
}
