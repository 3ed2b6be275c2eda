//! Dense univariate polynomials in the monomial basis.

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    /// Coefficients, lowest degree first.
    pub c: Vec<f64>,
}

impl Poly {
    pub fn new(c: Vec<f64>) -> Self {
        Self { c }
    }

    pub fn zero() -> Self {
        Self { c: vec![0.0] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &ci in self.c.iter().rev() {
            acc = acc * x + ci;
        }
        acc
    }

    pub fn deriv(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &ci)| ci * i as f64)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antideriv(&self) -> Poly {
        let mut c = vec![0.0];
        c.extend(
            self.c
                .iter()
                .enumerate()
                .map(|(i, &ci)| ci / (i as f64 + 1.0)),
        );
        Poly::new(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_deriv_antideriv() {
        // p(x) = 1 + 2x + 3x^2
        let p = Poly::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(2.0), 17.0);
        assert_eq!(p.deriv().c, vec![2.0, 6.0]);
        let q = p.antideriv();
        assert!((q.eval(1.0) - (1.0 + 1.0 + 1.0)).abs() < 1e-15);
        assert_eq!(q.eval(0.0), 0.0);
    }
}
