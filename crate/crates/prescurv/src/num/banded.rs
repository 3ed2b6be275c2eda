//! Banded LU factorization with partial pivoting (LAPACK-style band storage).

/// Band matrix with `kl` subdiagonals and `ku` superdiagonals. Storage leaves
/// room for the `kl` extra superdiagonals that pivoting can fill in.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    ldab: usize,
    ab: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            ab: vec![0.0; ldab * n],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        // entry (i, j) lives at row kl + ku + i - j of band column j
        (self.kl + self.ku + i - j) + j * self.ldab
    }

    /// Valid for j - (kl + ku) <= i <= j + kl (the fill region included).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.ab[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.ab[k] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.ab[k] += v;
    }
}

/// LU factors of a band matrix, ready for repeated solves.
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    piv: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Singular;

/// Factorize in place with partial pivoting.
pub fn factorize(mut m: BandMatrix) -> Result<BandLu, Singular> {
    let n = m.n;
    let (kl, ku) = (m.kl, m.ku);
    let mut piv = vec![0usize; n];
    for j in 0..n {
        let imax = (j + kl).min(n - 1);
        let mut p = j;
        let mut best = m.get(j, j).abs();
        for i in (j + 1)..=imax {
            let v = m.get(i, j).abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Err(Singular);
        }
        piv[j] = p;
        let jmax = (j + kl + ku).min(n - 1);
        if p != j {
            for c in j..=jmax {
                let a = m.get(j, c);
                let b = m.get(p, c);
                m.set(j, c, b);
                m.set(p, c, a);
            }
        }
        let d = m.get(j, j);
        for i in (j + 1)..=imax {
            let l = m.get(i, j) / d;
            m.set(i, j, l);
            if l != 0.0 {
                for c in (j + 1)..=jmax {
                    let u = m.get(j, c);
                    if u != 0.0 {
                        m.add(i, c, -l * u);
                    }
                }
            }
        }
    }
    Ok(BandLu { m, piv })
}

impl BandLu {
    /// Solve A x = b in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.m.n;
        let kl = self.m.kl;
        let ku = self.m.ku;
        assert_eq!(b.len(), n);
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                b.swap(p, j);
            }
            let bj = b[j];
            if bj != 0.0 {
                let imax = (j + kl).min(n - 1);
                for i in (j + 1)..=imax {
                    b[i] -= self.m.get(i, j) * bj;
                }
            }
        }
        for j in (0..n).rev() {
            let jmin = j.saturating_sub(kl + ku);
            let mut s = b[j];
            let cmax = (j + kl + ku).min(n - 1);
            for c in (j + 1)..=cmax {
                s -= self.m.get(j, c) * b[c];
            }
            b[j] = s / self.m.get(j, j);
            let _ = jmin;
        }
    }
}
