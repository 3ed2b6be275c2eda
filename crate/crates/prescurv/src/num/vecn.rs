//! Operations on points/vectors of arbitrary ambient dimension, stored as
//! plain `f64` slices.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `y += s * x`
pub fn axpy(y: &mut [f64], s: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    scale(a, 1.0 / n)
}

pub fn normalize_mut(a: &mut [f64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        for x in a.iter_mut() {
            *x /= n;
        }
    }
    n
}

pub fn zeros(dim: usize) -> Vec<f64> {
    vec![0.0; dim]
}

pub fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert!(a.len() == 3 && b.len() == 3);
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Component of `a` orthogonal to the unit vector `u`.
pub fn reject_unit(a: &[f64], u: &[f64]) -> Vec<f64> {
    let d = dot(a, u);
    a.iter().zip(u).map(|(x, y)| x - d * y).collect()
}

/// Geodesic distance between two unit vectors.
pub fn sphere_dist(a: &[f64], b: &[f64]) -> f64 {
    let c = dot(a, b).clamp(-1.0, 1.0);
    c.acos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a = [1.0, 2.0, 2.0];
        let b = [0.0, 1.0, 0.0];
        assert_eq!(norm(&a), 3.0);
        assert_eq!(dot(&a, &b), 2.0);
        assert_eq!(cross3(&[1.0, 0.0, 0.0], &b), vec![0.0, 0.0, 1.0]);
        let r = reject_unit(&a, &b);
        assert!(dot(&r, &b).abs() < 1e-15);
    }

    #[test]
    fn sphere_distance_clamps() {
        let a = [1.0, 0.0, 0.0];
        assert!(sphere_dist(&a, &a) == 0.0);
        assert!((sphere_dist(&a, &[-1.0, 0.0, 0.0]) - std::f64::consts::PI).abs() < 1e-15);
    }
}
