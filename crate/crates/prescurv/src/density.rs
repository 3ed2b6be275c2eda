//! Steering reparametrizations of the tantrix.
//!
//! A partition of unity on the parameter interval splits the tantrix into k
//! lobes with node points p_i (the per-lobe averages). Barycentric
//! coefficients c_i(x), affine in x and positive on a ball around the mean
//! x0, turn any ball point x into a density rho_x whose mass
//! reparametrization steers the tantrix average onto x. The construction is
//! exact up to quadrature: with symmetric transitions the normalizer is
//! constant and the steered average equals x to rounding.

use crate::geom::{Diffeo, Domain, SphericalCurve};
use crate::num::dense::{select_independent, DenseLu};
use crate::num::gauss::GL8;
use crate::num::rootfind::invert_monotone;
use crate::num::{vecn, Smoothstep};
use crate::{Error, Result};

/// Fraction of a segment occupied by each transition half-width.
pub const POU_TRANSITION_FRAC: f64 = 0.3;

/// Smoothstep order for the transitions (4 vanishing derivatives).
pub const POU_STEP_ORDER: usize = 4;

/// A partition of unity on an interval: k bumps on equal segments with
/// point-symmetric polynomial transitions, so the bumps sum to one exactly
/// and each integrates to exactly a 1/k share.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    pub k: usize,
    domain: Domain,
    half_width: f64,
    step: Smoothstep,
}

impl PartitionOfUnity {
    fn segment(&self) -> f64 {
        self.domain.len() / self.k as f64
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Integral of each bump over the domain (exact).
    pub fn bump_mass(&self) -> f64 {
        self.segment()
    }

    fn boundary(&self, j: usize) -> f64 {
        self.domain.a + self.segment() * j as f64
    }

    /// Rising transition centered at boundary j, evaluated at t.
    fn up(&self, j: usize, t: f64) -> f64 {
        let w = self.half_width;
        self.step.eval((t - (self.boundary(j) - w)) / (2.0 * w))
    }

    fn up_deriv(&self, j: usize, t: f64) -> f64 {
        let w = self.half_width;
        self.step.deriv((t - (self.boundary(j) - w)) / (2.0 * w)) / (2.0 * w)
    }

    /// Integral of the rising transition from far left to t.
    fn up_integral(&self, j: usize, t: f64) -> f64 {
        let w = self.half_width;
        2.0 * w * self.step.integral((t - (self.boundary(j) - w)) / (2.0 * w))
    }

    pub fn eval(&self, i: usize, t: f64) -> f64 {
        debug_assert!(i < self.k);
        let left = if i == 0 { 1.0 } else { self.up(i, t) };
        let right = if i == self.k - 1 {
            1.0
        } else {
            1.0 - self.up(i + 1, t)
        };
        left * right
    }

    pub fn deriv(&self, i: usize, t: f64) -> f64 {
        // transitions never overlap, so at most one factor varies
        let mut d = 0.0;
        if i > 0 {
            let right = if i == self.k - 1 {
                1.0
            } else {
                1.0 - self.up(i + 1, t)
            };
            d += self.up_deriv(i, t) * right;
        }
        if i < self.k - 1 {
            let left = if i == 0 { 1.0 } else { self.up(i, t) };
            d -= self.up_deriv(i + 1, t) * left;
        }
        d
    }

    /// Integral of bump i from the left end of the domain to t. Exact: the
    /// transitions integrate to polynomial pieces, and the linear extension
    /// of the smoothstep integral matches the plateau beyond each window.
    pub fn cumulative(&self, i: usize, t: f64) -> f64 {
        let t = t.clamp(self.domain.a, self.domain.b);
        let plateau_start = if i == 0 {
            self.domain.a
        } else {
            self.boundary(i) + self.half_width
        };
        let plateau_end = self.plateau_end(i);
        let mut acc = 0.0;
        if i > 0 {
            acc += self.up_integral(i, t.min(plateau_start));
        }
        if t > plateau_start {
            acc += t.min(plateau_end) - plateau_start;
        }
        if i < self.k - 1 && t > plateau_end {
            acc += (t - plateau_end) - self.up_integral(i + 1, t);
        }
        acc
    }

    fn plateau_end(&self, i: usize) -> f64 {
        if i == self.k - 1 {
            self.domain.b
        } else {
            self.boundary(i + 1) - self.half_width
        }
    }

    /// Transition edges, for exact quadrature cell splitting.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for j in 1..self.k {
            v.push(self.boundary(j) - self.half_width);
            v.push(self.boundary(j) + self.half_width);
        }
        v
    }
}

/// Build a partition of unity with k > ambient_dim bumps.
pub fn build_pou(domain: Domain, k: usize, ambient_dim: usize) -> Result<PartitionOfUnity> {
    if k <= ambient_dim {
        return Err(Error::BadK {
            k,
            n: ambient_dim,
        });
    }
    if domain.is_circle() {
        return Err(Error::DomainMismatch(
            "partition of unity is built on intervals".into(),
        ));
    }
    let segment = domain.len() / k as f64;
    Ok(PartitionOfUnity {
        k,
        domain,
        half_width: POU_TRANSITION_FRAC * segment,
        step: Smoothstep::new(POU_STEP_ORDER),
    })
}

/// Check that the tantrix lives on the normalized interval [0, 1].
fn require_unit_interval(domain: &Domain) -> Result<()> {
    if domain.is_circle() || domain.a.abs() > 1e-12 || (domain.b - 1.0).abs() > 1e-12 {
        return Err(Error::DomainMismatch(format!(
            "expected the normalized interval [0, 1], got [{}, {}]",
            domain.a, domain.b
        )));
    }
    Ok(())
}

/// Node points p_i: the bump-weighted averages of the tantrix,
/// p_i = (1/bump_mass) * integral of theta_i T.
pub fn node_points(t: &SphericalCurve, pou: &PartitionOfUnity) -> Result<Vec<f64>> {
    require_unit_interval(t.domain())?;
    let dim = t.dim();
    let k = pou.k;
    let n = t.n_samples();
    // quadrature cells: sample cells split at transition edges; on each cell
    // both factors are polynomial, so GL8 is exact
    let mut edges: Vec<f64> = (0..n)
        .map(|i| t.domain().a + t.domain().len() * i as f64 / (n - 1) as f64)
        .collect();
    edges.extend(pou.breakpoints());
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut nodes = vec![0.0; k * dim];
    let mut point = vec![0.0; dim];
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo < 1e-15 {
            continue;
        }
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        for &(xg, wg) in &GL8 {
            let tt = c + h * xg;
            t.eval_into(tt, &mut point);
            let scale = wg * h;
            for i in 0..k {
                let th = pou.eval(i, tt);
                if th != 0.0 {
                    vecn::axpy(&mut nodes[i * dim..(i + 1) * dim], scale * th, &point);
                }
            }
        }
    }
    let inv_mass = 1.0 / pou.bump_mass();
    for v in nodes.iter_mut() {
        *v *= inv_mass;
    }
    Ok(nodes)
}

/// The steering family: nodes, their barycentric coefficient gradients, and
/// the admissible ball.
#[derive(Debug, Clone)]
pub struct DensityFamily {
    dim: usize,
    k: usize,
    nodes: Vec<f64>, // k x dim
    x0: Vec<f64>,
    radius: f64,
    /// Gradient of c_i as a row per node (zero rows for unselected nodes
    /// outside the independent subset).
    grad_c: Vec<f64>, // k x dim
    selected: Vec<usize>,
    pou: PartitionOfUnity,
}

impl DensityFamily {
    /// Build from a nonflat tantrix on [0, 1].
    pub fn from_tantrix(t: &SphericalCurve, k: usize) -> Result<Self> {
        let pou = build_pou(Domain::interval(0.0, 1.0), k, t.dim())?;
        require_unit_interval(t.domain())?;
        let nodes = node_points(t, &pou)?;
        Self::from_nodes_with_pou(nodes, t.dim(), pou)
    }

    /// Build from raw node points (k x dim, row-major).
    pub fn from_nodes(nodes: Vec<f64>, dim: usize) -> Result<Self> {
        let k = nodes.len() / dim;
        let pou = build_pou(Domain::interval(0.0, 1.0), k, dim)?;
        Self::from_nodes_with_pou(nodes, dim, pou)
    }

    fn from_nodes_with_pou(nodes: Vec<f64>, dim: usize, pou: PartitionOfUnity) -> Result<Self> {
        let k = nodes.len() / dim;
        if k <= dim {
            return Err(Error::BadK { k, n: dim });
        }
        let mut x0 = vecn::zeros(dim);
        for row in nodes.chunks(dim) {
            vecn::axpy(&mut x0, 1.0 / k as f64, row);
        }
        let centered: Vec<Vec<f64>> = nodes
            .chunks(dim)
            .map(|row| vecn::sub(row, &x0))
            .collect();
        let selected = select_independent(&centered, dim, dim, 1e-12);
        if selected.len() < dim {
            return Err(Error::RTooLarge {
                reason: "node points are affinely degenerate (flat tantrix?)".into(),
            });
        }
        // P has the selected centered nodes as columns; rows of P^-1 are the
        // gradients of the linear coordinates a_i
        let mut p = vec![0.0; dim * dim];
        for (col, &si) in selected.iter().enumerate() {
            for r in 0..dim {
                p[r * dim + col] = centered[si][r];
            }
        }
        let lu = DenseLu::factor(&p, dim).map_err(|_| Error::RTooLarge {
            reason: "selected node matrix is singular".into(),
        })?;
        let pinv = lu.inverse();
        let mut grad_a = vec![0.0; k * dim]; // zero for unselected
        for (m, &si) in selected.iter().enumerate() {
            for c in 0..dim {
                grad_a[si * dim + c] = pinv[m * dim + c];
            }
        }
        let mut grad_sum = vecn::zeros(dim);
        for row in grad_a.chunks(dim) {
            vecn::axpy(&mut grad_sum, 1.0, row);
        }
        let mut grad_c = vec![0.0; k * dim];
        for i in 0..k {
            for c in 0..dim {
                grad_c[i * dim + c] = grad_a[i * dim + c] - grad_sum[c] / k as f64;
            }
        }
        // positivity radius: c_i = 1/k + <grad_c_i, x - x0> stays positive
        let mut radius = f64::INFINITY;
        for row in grad_c.chunks(dim) {
            let g = vecn::norm(row);
            if g > 0.0 {
                radius = radius.min(1.0 / (k as f64 * g));
            }
        }
        Ok(Self {
            dim,
            k,
            nodes,
            x0,
            radius,
            grad_c,
            selected,
            pou,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn pou(&self) -> &PartitionOfUnity {
        &self.pou
    }

    /// Largest radius on which every coefficient stays positive.
    pub fn positivity_radius(&self) -> f64 {
        self.radius
    }

    pub fn check_in_ball(&self, x: &[f64], radius: f64) -> Result<()> {
        let dist = vecn::dist(x, &self.x0);
        if dist > radius * (1.0 + 1e-12) {
            return Err(Error::OutsideBall { dist, radius });
        }
        Ok(())
    }

    /// Barycentric coefficients c_i(x): affine in x, summing to one,
    /// reconstructing x, equal to 1/k at x0, positive on the ball.
    pub fn barycentric_coeffs(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_in_ball(x, self.radius)?;
        let xc = vecn::sub(x, &self.x0);
        let mut c = Vec::with_capacity(self.k);
        for row in self.grad_c.chunks(self.dim) {
            c.push(1.0 / self.k as f64 + vecn::dot(row, &xc));
        }
        for (i, &ci) in c.iter().enumerate() {
            if ci <= 0.0 {
                return Err(Error::NegativeCoefficient { index: i, value: ci });
            }
        }
        Ok(c)
    }

    /// The normalizer lambda(x) = 1 / integral of sum c_i theta_i. With the
    /// symmetric bumps this equals k / ((b-a) sum c_i) exactly.
    pub fn lambda(&self, coeffs: &[f64]) -> f64 {
        let s: f64 = coeffs.iter().sum();
        1.0 / (self.pou.bump_mass() * s)
    }

    /// The steered density rho_x as an evaluator plus its exact cumulative.
    pub fn density(&self, x: &[f64]) -> Result<SteeredDensity<'_>> {
        let coeffs = self.barycentric_coeffs(x)?;
        let lam = self.lambda(&coeffs);
        Ok(SteeredDensity {
            family: self,
            coeffs,
            lam,
        })
    }
}

/// rho_x = lambda(x) sum_i c_i(x) theta_i, with exact cumulative mass.
#[derive(Debug, Clone)]
pub struct SteeredDensity<'a> {
    family: &'a DensityFamily,
    pub coeffs: Vec<f64>,
    pub lam: f64,
}

impl<'a> SteeredDensity<'a> {
    pub fn eval(&self, t: f64) -> f64 {
        let pou = &self.family.pou;
        let mut s = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate() {
            let th = pou.eval(i, t);
            if th != 0.0 {
                s += c * th;
            }
        }
        self.lam * s
    }

    /// Exact integral of the density from the domain start to t.
    pub fn mass(&self, t: f64) -> f64 {
        let pou = &self.family.pou;
        let mut s = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate() {
            s += c * pou.cumulative(i, t);
        }
        self.lam * s
    }

    /// Inverse of the mass map (the steering reparametrization phi_x).
    pub fn mass_inverse(&self, s: f64) -> f64 {
        let dom = self.family.pou.domain();
        invert_monotone(
            |t| self.mass(t),
            |t| self.eval(t),
            s,
            dom.a,
            dom.b,
            1e-15 * dom.len(),
        )
    }
}

/// The reparametrized tantrix T(phi_x(t)), evaluated lazily.
pub struct SteeredTantrix<'a> {
    pub tantrix: &'a SphericalCurve,
    pub density: SteeredDensity<'a>,
}

impl<'a> SteeredTantrix<'a> {
    pub fn phi(&self, t: f64) -> f64 {
        self.density.mass_inverse(t)
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.tantrix.eval_unit(self.phi(t))
    }

    /// |Tbar'(t)| = |T'(phi)| / rho(phi).
    pub fn speed(&self, t: f64) -> f64 {
        let u = self.phi(t);
        self.tantrix.speed(u) / self.density.eval(u)
    }

    /// Speed at an already-known source parameter u = phi(t).
    pub fn speed_at_source(&self, u: f64) -> f64 {
        self.tantrix.speed(u) / self.density.eval(u)
    }

    /// Average of the steered tantrix, computed as the density-weighted
    /// average of the original (GL8-exact on the refined cells).
    pub fn average(&self) -> Vec<f64> {
        let t = self.tantrix;
        let dim = t.dim();
        let n = t.n_samples();
        let mut edges: Vec<f64> = (0..n)
            .map(|i| t.domain().a + t.domain().len() * i as f64 / (n - 1) as f64)
            .collect();
        edges.extend(self.density.family.pou.breakpoints());
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let mut acc = vecn::zeros(dim);
        let mut point = vec![0.0; dim];
        for w in edges.windows(2) {
            let c = 0.5 * (w[0] + w[1]);
            let h = 0.5 * (w[1] - w[0]);
            if h < 1e-16 {
                continue;
            }
            for &(xg, wg) in &GL8 {
                let tt = c + h * xg;
                t.eval_into(tt, &mut point);
                vecn::axpy(&mut acc, wg * h * self.density.eval(tt), &point);
            }
        }
        acc
    }
}

/// Build the steered tantrix together with a sampled diffeo, checking the
/// normalizer bound |lambda/k - 1| < 1/2.
pub fn reparam_family<'a>(
    t: &'a SphericalCurve,
    family: &'a DensityFamily,
    x: &[f64],
) -> Result<(SteeredTantrix<'a>, Diffeo)> {
    let density = family.density(x)?;
    let lam_ratio = density.lam / family.k as f64;
    if (lam_ratio - 1.0).abs() >= 0.5 {
        return Err(Error::RTooLarge {
            reason: format!("normalizer ratio {lam_ratio:.3} strays from 1"),
        });
    }
    let steered = SteeredTantrix {
        tantrix: t,
        density,
    };
    let n = t.n_samples().max(64);
    let lift: Vec<f64> = (0..=n)
        .map(|i| steered.phi(i as f64 / n as f64))
        .collect();
    let dom = Domain::interval(0.0, 1.0);
    let phi = Diffeo::from_lift_samples(dom, dom, lift, t.curve().degree())?;
    Ok((steered, phi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pou_partitions_unity() {
        let pou = build_pou(Domain::interval(0.0, 1.0), 4, 3).unwrap();
        for i in 0..=10_000 {
            let t = i as f64 / 10_000.0;
            let s: f64 = (0..4).map(|j| pou.eval(j, t)).sum();
            assert!((s - 1.0).abs() < 1e-12, "t={t} s={s}");
            for j in 0..4 {
                assert!(pou.eval(j, t) >= 0.0);
            }
        }
    }

    #[test]
    fn pou_bump_masses_equal() {
        let pou = build_pou(Domain::interval(0.0, 1.0), 8, 3).unwrap();
        for i in 0..8 {
            let m = pou.cumulative(i, 1.0);
            assert!((m - 0.125).abs() < 1e-13, "bump {i}: {m}");
        }
    }

    #[test]
    fn pou_cumulative_matches_quadrature() {
        let pou = build_pou(Domain::interval(0.0, 1.0), 5, 3).unwrap();
        for i in 0..5 {
            for j in 1..=20 {
                let t = j as f64 / 20.0;
                let brute = crate::num::gauss::composite_gl8(|u| pou.eval(i, u), 0.0, t, 400);
                let exact = pou.cumulative(i, t);
                assert!(
                    (brute - exact).abs() < 1e-10,
                    "bump {i} t={t}: {brute} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn pou_derivative_matches_fd() {
        let pou = build_pou(Domain::interval(0.0, 1.0), 4, 3).unwrap();
        let h = 1e-7;
        for i in 0..4 {
            for j in 1..100 {
                let t = j as f64 / 100.0;
                if t + h > 1.0 {
                    continue;
                }
                let fd = (pou.eval(i, t + h) - pou.eval(i, t - h)) / (2.0 * h);
                assert!((pou.deriv(i, t) - fd).abs() < 1e-5, "i={i} t={t}");
            }
        }
    }

    #[test]
    fn pou_supports_overlap_only_adjacent() {
        let k = 6;
        let pou = build_pou(Domain::interval(0.0, 1.0), k, 3).unwrap();
        for i in 0..k {
            for j in 0..k {
                if i + 1 < j || j + 1 < i {
                    // disjoint supports: the product vanishes everywhere
                    for s in 0..=2000 {
                        let t = s as f64 / 2000.0;
                        assert!(pou.eval(i, t) * pou.eval(j, t) == 0.0, "i={i} j={j} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn bad_k_rejected() {
        assert!(matches!(
            build_pou(Domain::interval(0.0, 1.0), 3, 3),
            Err(Error::BadK { .. })
        ));
    }

    #[test]
    fn frozen_barycentric_example() {
        // nodes e1, e2, e3, (-1,-1,-1): mean 0; at x = (0.1, 0, 0) the
        // coefficients are (0.325, 0.225, 0.225, 0.225)
        let nodes = vec![
            1.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, //
            0.0, 0.0, 1.0, //
            -1.0, -1.0, -1.0,
        ];
        let fam = DensityFamily::from_nodes(nodes, 3).unwrap();
        assert!(vecn::norm(fam.x0()) < 1e-14);
        let c = fam.barycentric_coeffs(&[0.1, 0.0, 0.0]).unwrap();
        let expect = [0.325, 0.225, 0.225, 0.225];
        for (v, e) in c.iter().zip(expect) {
            assert!((v - e).abs() < 1e-13, "{c:?}");
        }
        // x0 gives 1/k exactly
        let c0 = fam.barycentric_coeffs(&[0.0; 3]).unwrap();
        for v in &c0 {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn coefficients_reconstruct_and_sum() {
        let nodes = vec![
            0.9, 0.1, 0.0, //
            -0.2, 0.8, 0.1, //
            -0.6, -0.7, 0.2, //
            0.1, -0.4, -0.8, //
            0.3, 0.3, 0.6,
        ];
        let fam = DensityFamily::from_nodes(nodes.clone(), 3).unwrap();
        let r = fam.positivity_radius();
        assert!(r > 0.0);
        // sample ball points deterministically
        for s in 0..50 {
            let th = s as f64 * 0.7;
            let ph = s as f64 * 1.3;
            let rad = r * (0.2 + 0.79 * ((s * 7 % 11) as f64 / 11.0));
            let x = [
                fam.x0()[0] + rad * th.sin() * ph.cos(),
                fam.x0()[1] + rad * th.sin() * ph.sin(),
                fam.x0()[2] + rad * th.cos(),
            ];
            let c = fam.barycentric_coeffs(&x).unwrap();
            let sum: f64 = c.iter().sum();
            assert!((sum - 1.0).abs() < 1e-14);
            let mut rec = vecn::zeros(3);
            for (i, &ci) in c.iter().enumerate() {
                vecn::axpy(&mut rec, ci, fam.node(i));
            }
            assert!(vecn::dist(&rec, &x) < 1e-12, "reconstruction failed");
            assert!(c.iter().all(|&v| v > 0.0));
        }
        // outside the ball is rejected
        let far = [fam.x0()[0] + 2.0 * r, fam.x0()[1], fam.x0()[2]];
        assert!(matches!(
            fam.barycentric_coeffs(&far),
            Err(Error::OutsideBall { .. })
        ));
    }

    #[test]
    fn coefficients_affine_in_x() {
        let nodes = vec![
            1.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, //
            0.0, 0.0, 1.0, //
            -0.5, -0.5, -0.5, //
            -0.5, 0.5, -0.5,
        ];
        let fam = DensityFamily::from_nodes(nodes, 3).unwrap();
        let r = fam.positivity_radius();
        let x0 = fam.x0().to_vec();
        let x = [x0[0] + 0.3 * r, x0[1] - 0.2 * r, x0[2] + 0.1 * r];
        let y = [x0[0] - 0.1 * r, x0[1] + 0.4 * r, x0[2] + 0.2 * r];
        for alpha in [0.0, 0.3, 0.7, 1.0] {
            let z: Vec<f64> = x
                .iter()
                .zip(&y)
                .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                .collect();
            let cx = fam.barycentric_coeffs(&x).unwrap();
            let cy = fam.barycentric_coeffs(&y).unwrap();
            let cz = fam.barycentric_coeffs(&z).unwrap();
            for i in 0..cz.len() {
                let lin = alpha * cx[i] + (1.0 - alpha) * cy[i];
                assert!((cz[i] - lin).abs() < 1e-14);
            }
        }
    }
}
