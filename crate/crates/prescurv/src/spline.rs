//! Vector-valued interpolating splines on uniform grids.
//!
//! Interval curves use a clamped knot vector with not-a-knot interior elision
//! so the collocation system stays square; circle curves use uniform cardinal
//! B-splines whose circulant interpolation system is solved by FFT. Both give
//! C^(degree-1) reconstructions evaluable with derivatives of any order up to
//! the degree.

use crate::num::banded::{self, BandMatrix};
use rustfft::{num_complex::Complex, FftPlanner};

#[derive(Debug, Clone)]
enum SplineKind {
    Clamped { knots: Vec<f64> },
    Periodic { a: f64, h: f64, n: usize },
}

#[derive(Debug, Clone)]
pub struct VecSpline {
    degree: usize,
    dim: usize,
    kind: SplineKind,
    /// ncoef x dim, row-major.
    coefs: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum SplineError {
    #[error("need at least {need} samples for degree {degree}, got {got}")]
    TooFewSamples { need: usize, got: usize, degree: usize },
    #[error("spline degree must be odd and between 1 and 7, got {0}")]
    BadDegree(usize),
    #[error("collocation matrix is singular")]
    Singular,
}

/// Cardinal B-spline of degree p evaluated at integer offsets 1..=p.
fn cardinal_mask(p: usize) -> Vec<f64> {
    fn b(p: usize, x: f64) -> f64 {
        if p == 0 {
            return if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 };
        }
        let pf = p as f64;
        (x / pf) * b(p - 1, x) + ((pf + 1.0 - x) / pf) * b(p - 1, x - 1.0)
    }
    (1..=p).map(|d| b(p, d as f64)).collect()
}

/// Largest supported degree; lets every scratch buffer live on the stack.
const MAX_DEGREE: usize = 7;
type Scratch = [[f64; MAX_DEGREE + 1]; MAX_DEGREE + 1];

/// Derivatives 0..=n of the p+1 basis functions alive on the span.
/// `ders[k][j]` is the k-th derivative of basis `span - p + j` at `t`.
fn ders_basis_funs(span: usize, t: f64, p: usize, n: usize, knots: &[f64]) -> Scratch {
    let mut ndu: Scratch = [[0.0; MAX_DEGREE + 1]; MAX_DEGREE + 1];
    ndu[0][0] = 1.0;
    let mut left = [0.0; MAX_DEGREE + 1];
    let mut right = [0.0; MAX_DEGREE + 1];
    for j in 1..=p {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let mut ders: Scratch = [[0.0; MAX_DEGREE + 1]; MAX_DEGREE + 1];
    for j in 0..=p {
        ders[0][j] = ndu[j][p];
    }
    if n == 0 {
        return ders;
    }
    let mut a = [[0.0; MAX_DEGREE + 1]; 2];
    for r in 0..=p {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0] = [0.0; MAX_DEGREE + 1];
        a[1] = [0.0; MAX_DEGREE + 1];
        a[0][0] = 1.0;
        for k in 1..=n.min(p) {
            let mut d = 0.0;
            let rk = r as isize - k as isize;
            let pk = p - k;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if r as isize - 1 <= pk as isize { k - 1 } else { p - r };
            for j in j1..=j2 {
                let rj = (rk + j as isize) as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rj];
                d += a[s2][j] * ndu[rj][pk];
            }
            if r <= pk {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut f = p as f64;
    for k in 1..=n.min(p) {
        for j in 0..=p {
            ders[k][j] *= f;
        }
        f *= (p - k) as f64;
    }
    ders
}

fn find_span(knots: &[f64], p: usize, ncoef: usize, t: f64) -> usize {
    if t >= knots[ncoef] {
        return ncoef - 1;
    }
    if t <= knots[p] {
        return p;
    }
    let mut lo = p;
    let mut hi = ncoef;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if t < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

fn check_degree(degree: usize) -> Result<(), SplineError> {
    if degree % 2 == 1 && (1..=7).contains(&degree) {
        Ok(())
    } else {
        Err(SplineError::BadDegree(degree))
    }
}

impl VecSpline {
    /// Interpolate `values` (n x dim, row-major) at uniform sites on [a, b],
    /// endpoint inclusive, with a clamped not-a-knot spline.
    pub fn fit_clamped(
        a: f64,
        b: f64,
        values: &[f64],
        dim: usize,
        degree: usize,
    ) -> Result<Self, SplineError> {
        check_degree(degree)?;
        let n = values.len() / dim;
        assert_eq!(values.len(), n * dim);
        if n < degree + 3 {
            return Err(SplineError::TooFewSamples {
                need: degree + 3,
                got: n,
                degree,
            });
        }
        let p = degree;
        let q = (p + 1) / 2;
        let h = (b - a) / (n - 1) as f64;
        let site = |i: usize| a + h * i as f64;
        let mut knots = Vec::with_capacity(n + p + 1);
        for _ in 0..=p {
            knots.push(a);
        }
        for i in q..=(n - 1 - q) {
            knots.push(site(i));
        }
        for _ in 0..=p {
            knots.push(b);
        }
        debug_assert_eq!(knots.len(), n + p + 1);

        let mut m = BandMatrix::zeros(n, p, p);
        for i in 0..n {
            let t = site(i);
            let span = find_span(&knots, p, n, t);
            let basis = ders_basis_funs(span, t, p, 0, &knots);
            for (j, &v) in basis[0][..=p].iter().enumerate() {
                let col = span - p + j;
                if v != 0.0 {
                    m.set(i, col, v);
                }
            }
        }
        let lu = banded::factorize(m).map_err(|_| SplineError::Singular)?;
        let mut coefs = vec![0.0; n * dim];
        let mut rhs = vec![0.0; n];
        for d in 0..dim {
            for i in 0..n {
                rhs[i] = values[i * dim + d];
            }
            lu.solve(&mut rhs);
            for i in 0..n {
                coefs[i * dim + d] = rhs[i];
            }
        }
        Ok(Self {
            degree,
            dim,
            kind: SplineKind::Clamped { knots },
            coefs,
        })
    }

    /// Interpolate `values` (n x dim) at `a + i*(b-a)/n`, i = 0..n, as a
    /// periodic spline on the circle of circumference b - a.
    pub fn fit_periodic(
        a: f64,
        b: f64,
        values: &[f64],
        dim: usize,
        degree: usize,
    ) -> Result<Self, SplineError> {
        check_degree(degree)?;
        let n = values.len() / dim;
        assert_eq!(values.len(), n * dim);
        if n < 2 * (degree + 1) {
            return Err(SplineError::TooFewSamples {
                need: 2 * (degree + 1),
                got: n,
                degree,
            });
        }
        let p = degree;
        let h = (b - a) / n as f64;
        let mask = cardinal_mask(p); // offsets 1..=p, symmetric
        let half = (p - 1) / 2;

        // Fourier symbol of the symmetric interpolation stencil.
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let mut sym: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); n];
        // mask[d-1] = B_p(d); center value is B_p(half+1) at offset 0
        for (d, &mv) in mask.iter().enumerate() {
            let off = d as isize - half as isize; // -half ..= half+? (p values)
            let idx = off.rem_euclid(n as isize) as usize;
            sym[idx] += Complex::new(mv, 0.0);
        }
        fft.process(&mut sym);

        let mut coefs = vec![0.0; n * dim];
        let scale = 1.0 / n as f64;
        let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); n];
        for d in 0..dim {
            for i in 0..n {
                buf[i] = Complex::new(values[i * dim + d], 0.0);
            }
            fft.process(&mut buf);
            for (v, s) in buf.iter_mut().zip(&sym) {
                *v /= *s;
            }
            ifft.process(&mut buf);
            // the stencil was centered, so coefficient j is c'_{j - half}
            for j in 0..n {
                let src = (j as isize - half as isize).rem_euclid(n as isize) as usize;
                coefs[j * dim + d] = buf[src].re * scale;
            }
        }
        Ok(Self {
            degree,
            dim,
            kind: SplineKind::Periodic { a, h, n },
            coefs,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Evaluate the derivative of given order into `out`.
    pub fn deriv_into(&self, t: f64, order: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        out.fill(0.0);
        if order > self.degree {
            return;
        }
        let p = self.degree;
        match &self.kind {
            SplineKind::Clamped { knots } => {
                let ncoef = self.coefs.len() / self.dim;
                let t = t.clamp(knots[p], knots[ncoef]);
                let span = find_span(knots, p, ncoef, t);
                let ders = ders_basis_funs(span, t, p, order, knots);
                for (j, &w) in ders[order][..=p].iter().enumerate() {
                    if w != 0.0 {
                        let c = &self.coefs[(span - p + j) * self.dim..][..self.dim];
                        for (o, cv) in out.iter_mut().zip(c) {
                            *o += w * cv;
                        }
                    }
                }
            }
            SplineKind::Periodic { a, h, n } => {
                let period = h * *n as f64;
                let mut u = (t - a) % period;
                if u < 0.0 {
                    u += period;
                }
                let cell = ((u / h) as usize).min(n - 1);
                let span = p + cell;
                // local uniform knots U_m = a + (m - p) h for m near span
                let lo = span - p;
                let mut local = [0.0; 2 * MAX_DEGREE + 2];
                for (i, m) in (lo..=span + p + 1).enumerate() {
                    local[i] = a + (m as f64 - p as f64) * h;
                }
                let tt = a + u;
                let ders = ders_basis_funs(p, tt, p, order, &local[..2 * p + 2]);
                for (j, &w) in ders[order][..=p].iter().enumerate() {
                    if w != 0.0 {
                        let idx = (lo + j) % n;
                        let c = &self.coefs[idx * self.dim..][..self.dim];
                        for (o, cv) in out.iter_mut().zip(c) {
                            *o += w * cv;
                        }
                    }
                }
            }
        }
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        self.deriv_into(t, 0, out);
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
}
