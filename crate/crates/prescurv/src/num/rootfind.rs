//! Safeguarded scalar root finding for monotone functions: Newton steps
//! polished inside a shrinking bisection bracket.

/// Solve f(x) = target for increasing f on [lo, hi], to absolute tolerance
/// `xtol` in the argument. `df` is the derivative.
pub fn invert_monotone(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
) -> f64 {
    debug_assert!(hi >= lo);
    let flo = f(lo) - target;
    if flo >= 0.0 {
        return lo;
    }
    let fhi = f(hi) - target;
    if fhi <= 0.0 {
        return hi;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let fx = f(x) - target;
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if hi - lo <= xtol {
            break;
        }
        let d = df(x);
        let mut xn = if d > 0.0 { x - fx / d } else { f64::NAN };
        if !(xn > lo && xn < hi) {
            xn = 0.5 * (lo + hi);
        }
        if (xn - x).abs() <= xtol && fx.abs() <= d.abs() * xtol * 4.0 {
            return xn;
        }
        x = xn;
    }
    0.5 * (lo + hi)
}

/// Solve g(x) = 0 for continuous monotone-increasing g on [lo, hi] without a
/// derivative (secant steps inside a bisection bracket).
pub fn solve_monotone_no_deriv(
    g: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    max_iter: usize,
) -> f64 {
    let mut glo = g(lo);
    if glo >= 0.0 {
        return lo;
    }
    let mut ghi = g(hi);
    if ghi <= 0.0 {
        return hi;
    }
    for _ in 0..max_iter {
        if hi - lo <= xtol {
            break;
        }
        // regula falsi with a bisection safeguard
        let mut x = lo + (hi - lo) * (-glo) / (ghi - glo);
        let margin = 0.01 * (hi - lo);
        if !(x > lo + margin && x < hi - margin) {
            x = 0.5 * (lo + hi);
        }
        let gx = g(x);
        if gx == 0.0 {
            return x;
        }
        if gx > 0.0 {
            hi = x;
            ghi = gx;
        } else {
            lo = x;
            glo = gx;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_cubic() {
        let f = |x: f64| x * x * x + x;
        let df = |x: f64| 3.0 * x * x + 1.0;
        let x = invert_monotone(f, df, 10.0, 0.0, 3.0, 1e-14);
        assert!((f(x) - 10.0).abs() < 1e-10);
    }

    #[test]
    fn clamps_outside_bracket() {
        let f = |x: f64| x;
        assert_eq!(invert_monotone(f, |_| 1.0, -5.0, 0.0, 1.0, 1e-12), 0.0);
        assert_eq!(invert_monotone(f, |_| 1.0, 5.0, 0.0, 1.0, 1e-12), 1.0);
    }

    #[test]
    fn derivative_free_root() {
        let g = |x: f64| x.exp() - 2.0;
        let x = solve_monotone_no_deriv(g, 0.0, 2.0, 1e-13, 200);
        assert!((x - 2.0f64.ln()).abs() < 1e-10);
    }
}
