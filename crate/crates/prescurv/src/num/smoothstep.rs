//! Polynomial smoothsteps S_m: monotone ramps from 0 to 1 on [0, 1] whose
//! first m derivatives vanish at both ends, with the point symmetry
//! S_m(x) + S_m(1 - x) = 1.

use super::poly::Poly;

#[derive(Debug, Clone)]
pub struct Smoothstep {
    pub order: usize,
    poly: Poly,
    dpoly: Poly,
    ipoly: Poly,
}

fn binom(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

impl Smoothstep {
    /// The classic ramps: m = 1 gives 3x^2 - 2x^3, m = 2 the quintic, etc.
    pub fn new(m: usize) -> Self {
        // S_m(x) = x^(m+1) * sum_j C(m+j, j) C(2m+1, m-j) (-x)^j
        let mut c = vec![0.0; 2 * m + 2];
        for j in 0..=m {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            c[m + 1 + j] = sign * binom(m + j, j) * binom(2 * m + 1, m - j);
        }
        let poly = Poly::new(c);
        let dpoly = poly.deriv();
        let ipoly = poly.antideriv();
        Self {
            order: m,
            poly,
            dpoly,
            ipoly,
        }
    }

    /// Value, clamped outside [0, 1]. The polynomial cancels to ~1e-14 noise
    /// at the ends, so the output range is clamped too.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            self.poly.eval(x).clamp(0.0, 1.0)
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            0.0
        } else {
            self.dpoly.eval(x).max(0.0)
        }
    }

    /// Integral of the step from 0 to x, clamped linearly past 1.
    pub fn integral(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            // by symmetry the integral over [0, 1] is exactly 1/2
            0.5 + (x - 1.0)
        } else {
            self.ipoly.eval(x)
        }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_shapes() {
        let s1 = Smoothstep::new(1);
        assert_eq!(s1.poly.c, vec![0.0, 0.0, 3.0, -2.0]);
        let s2 = Smoothstep::new(2);
        assert_eq!(s2.poly.c, vec![0.0, 0.0, 0.0, 10.0, -15.0, 6.0]);
    }

    #[test]
    fn symmetry_and_endpoint_derivatives() {
        for m in 1..=5 {
            let s = Smoothstep::new(m);
            assert!((s.eval(0.5) - 0.5).abs() < 1e-14);
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                assert!((s.eval(x) + s.eval(1.0 - x) - 1.0).abs() < 1e-12);
            }
            // derivatives up to m vanish at 0 and 1
            let mut d = s.poly.clone();
            for _ in 0..m {
                d = d.deriv();
                assert!(d.eval(0.0).abs() < 1e-9, "m={m}");
                assert!(d.eval(1.0).abs() < 1e-9, "m={m}");
            }
        }
    }

    #[test]
    fn integral_is_half() {
        for m in 1..=5 {
            let s = Smoothstep::new(m);
            assert!((s.integral(1.0) - 0.5).abs() < 1e-14);
        }
    }
}
