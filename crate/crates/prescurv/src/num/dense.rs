//! Small dense linear algebra: pivoted LU for the node systems, plus a
//! column-pivoted independence selector.

#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>, // row-major
    piv: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularMatrix;

impl DenseLu {
    /// Factor a row-major n x n matrix with partial pivoting.
    pub fn factor(a: &[f64], n: usize) -> Result<Self, SingularMatrix> {
        assert_eq!(a.len(), n * n);
        let mut lu = a.to_vec();
        let mut piv = vec![0usize; n];
        for j in 0..n {
            let mut p = j;
            let mut best = lu[j * n + j].abs();
            for i in j + 1..n {
                let v = lu[i * n + j].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(SingularMatrix);
            }
            piv[j] = p;
            if p != j {
                for c in 0..n {
                    lu.swap(j * n + c, p * n + c);
                }
            }
            let d = lu[j * n + j];
            for i in j + 1..n {
                let l = lu[i * n + j] / d;
                lu[i * n + j] = l;
                for c in j + 1..n {
                    lu[i * n + c] -= l * lu[j * n + c];
                }
            }
        }
        Ok(Self { n, lu, piv })
    }

    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        // factor keeps multipliers in their final row positions, so all
        // interchanges go first
        for j in 0..n {
            if self.piv[j] != j {
                b.swap(j, self.piv[j]);
            }
        }
        for j in 0..n {
            for i in j + 1..n {
                b[i] -= self.lu[i * n + j] * b[j];
            }
        }
        for j in (0..n).rev() {
            for c in j + 1..n {
                b[j] -= self.lu[j * n + c] * b[c];
            }
            b[j] /= self.lu[j * n + j];
        }
    }

    /// Full inverse, row-major.
    pub fn inverse(&self) -> Vec<f64> {
        let n = self.n;
        let mut inv = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        for c in 0..n {
            e.fill(0.0);
            e[c] = 1.0;
            self.solve(&mut e);
            for r in 0..n {
                inv[r * n + c] = e[r];
            }
        }
        inv
    }
}

/// Greedily select `want` columns of maximal independent extent from a set of
/// column vectors (each of length `dim`). Returns indices in selection order,
/// or fewer if the residual extent drops below `tol`.
pub fn select_independent(cols: &[Vec<f64>], dim: usize, want: usize, tol: f64) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut chosen = Vec::new();
    let scale = cols
        .iter()
        .map(|c| super::vecn::norm(c))
        .fold(0.0f64, f64::max)
        .max(1e-300);
    for _ in 0..want.min(dim) {
        let mut best = -1.0;
        let mut best_i = usize::MAX;
        for (i, c) in cols.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut r = c.clone();
            for b in &basis {
                let d = super::vecn::dot(&r, b);
                super::vecn::axpy(&mut r, -d, b);
            }
            let nr = super::vecn::norm(&r);
            if nr > best {
                best = nr;
                best_i = i;
            }
        }
        if best_i == usize::MAX || best < tol * scale {
            break;
        }
        let mut r = cols[best_i].clone();
        for b in &basis {
            let d = super::vecn::dot(&r, b);
            super::vecn::axpy(&mut r, -d, b);
        }
        super::vecn::normalize_mut(&mut r);
        basis.push(r);
        chosen.push(best_i);
    }
    chosen
}

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi.
/// Returns (eigenvalues ascending, eigenvectors as columns, row-major).
pub fn sym_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let vals: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..n {
            vecs[r * n + new_c] = v[r * n + old_c];
        }
    }
    (vals, vecs)
}
