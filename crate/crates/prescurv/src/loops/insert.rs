//! Assembling the loop-decorated tantrix: per-piece composite paths glued
//! into an evaluator that traces the whole construction at the target speed.

use super::path::{Arc, CompositePath, LobeFrame, PathSeg};
use super::{LoopConfig, LoopPlan, LoopPlanEntry};
use crate::geom::{Domain, SphericalCurve};
use crate::num::gauss::GL8;
use crate::num::rootfind::solve_monotone_no_deriv;
use crate::num::{vecn, MonotoneCum, Smoothstep};
use crate::{Error, Result};

pub struct PieceBuild<'a> {
    pub span: (f64, f64),
    /// Target length: integral of the target speed over the span.
    pub target_len: f64,
    /// Arclength of the undecorated span.
    pub base_len: f64,
    pub budget: f64,
    pub base: Vec<f64>,
    pub midpoint: f64,
    pub pairs: usize,
    pub remainder: f64,
    pub path: CompositePath<'a>,
}

pub struct TantrixPath<'a> {
    pub tbar: &'a SphericalCurve,
    sigma: &'a MonotoneCum,
    pub pieces: Vec<PieceBuild<'a>>,
    prefix: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct InsertDiagnostics {
    /// Sup over the parameter of |decorated - undecorated|.
    pub sup_dist_to_base: f64,
    /// Largest geodesic excursion of any piece from its loop base.
    pub max_cap_excursion: f64,
    /// Worst |measured - target| piece length error.
    pub worst_length_error: f64,
    /// Min of (target speed - tantrix speed) over all spans.
    pub min_speed_margin: f64,
}

fn lobe_frames(
    base: &[f64],
    tangent: &[f64],
    lateral: &[f64],
    lobes: &[super::LobeRadius],
) -> Vec<LobeFrame> {
    lobes
        .iter()
        .map(|l| LobeFrame {
            q: base.to_vec(),
            tangent: tangent.to_vec(),
            lateral: vecn::scale(lateral, l.side),
            radius: l.r,
        })
        .collect()
}

/// Build one piece: host arc halves around the midpoint, the lobe sequence
/// between them, blends at every junction, and a root find on the raw loop
/// length so the measured total matches the target exactly.
#[allow(clippy::too_many_arguments)]
fn build_piece<'a>(
    tbar: &'a SphericalCurve,
    arclen: &'a MonotoneCum,
    span: (f64, f64),
    target_len: f64,
    config: &LoopConfig,
    step: &'a Smoothstep,
) -> Result<PieceBuild<'a>> {
    let (s0, s1) = span;
    let a0 = arclen.eval(s0);
    let a1 = arclen.eval(s1);
    let base_len = a1 - a0;
    let budget = target_len - base_len;
    if budget <= 0.0 {
        return Err(Error::SpeedMarginViolated {
            t: s0,
            margin: budget,
        });
    }
    let mid_len = 0.5 * (a0 + a1);
    let u_mid = arclen.invert(mid_len);
    let q = tbar.eval_unit(u_mid);
    let mut tau = tbar.deriv(u_mid, 1);
    let d = vecn::dot(&tau, &q);
    vecn::axpy(&mut tau, -d, &q);
    vecn::normalize_mut(&mut tau);
    let lateral = super::lateral_direction(&q, &tau)?;
    let r_out = config.lobe_radius();
    let dim = tbar.dim();
    let half = 0.5 * base_len;

    let assemble = |raw: f64| -> Result<CompositePath<'a>> {
        let (_m, _rem, lobes) = super::lobe_sequence(raw, r_out, config.max_pairs)?;
        if lobes.is_empty() {
            return Ok(CompositePath::new(
                dim,
                vec![PathSeg::Plain {
                    arc: Arc::Tantrix {
                        tantrix: tbar,
                        arclen,
                        at: a0,
                    },
                    start: 0.0,
                    len: base_len,
                }],
            ));
        }
        let frames = lobe_frames(&q, &tau, &lateral, &lobes);
        let circs: Vec<f64> = frames.iter().map(|f| f.circumference()).collect();
        let nl = frames.len();
        let window = |left_half: f64, right_half: f64| -> f64 {
            (config.blend_frac * left_half.min(right_half)).min(config.blend_cap)
        };
        let w_entry = window(0.9 * half, 0.5 * circs[0]);
        let w_exit = window(0.5 * circs[nl - 1], 0.9 * half);
        let t_entry = Arc::Tantrix {
            tantrix: tbar,
            arclen,
            at: a0,
        };
        let t_exit = Arc::Tantrix {
            tantrix: tbar,
            arclen,
            at: mid_len,
        };
        let mut segs: Vec<PathSeg<'a>> = Vec::with_capacity(2 * nl + 3);
        segs.push(PathSeg::Plain {
            arc: t_entry.clone(),
            start: 0.0,
            len: half - w_entry,
        });
        segs.push(PathSeg::Blend {
            left: t_entry,
            l_at: half,
            right: Arc::Lobe(frames[0].clone()),
            r_at: 0.0,
            w: w_entry,
            step,
        });
        for i in 0..nl {
            let w_prev = if i == 0 {
                w_entry
            } else {
                window(0.5 * circs[i - 1], 0.5 * circs[i])
            };
            let w_next = if i + 1 == nl {
                w_exit
            } else {
                window(0.5 * circs[i], 0.5 * circs[i + 1])
            };
            segs.push(PathSeg::Plain {
                arc: Arc::Lobe(frames[i].clone()),
                start: w_prev,
                len: circs[i] - w_prev - w_next,
            });
            if i + 1 < nl {
                segs.push(PathSeg::Blend {
                    left: Arc::Lobe(frames[i].clone()),
                    l_at: circs[i],
                    right: Arc::Lobe(frames[i + 1].clone()),
                    r_at: 0.0,
                    w: w_next,
                    step,
                });
            }
        }
        segs.push(PathSeg::Blend {
            left: Arc::Lobe(frames[nl - 1].clone()),
            l_at: circs[nl - 1],
            right: t_exit.clone(),
            r_at: 0.0,
            w: w_exit,
            step,
        });
        segs.push(PathSeg::Plain {
            arc: t_exit,
            start: w_exit,
            len: half - w_exit,
        });
        Ok(CompositePath::new(dim, segs))
    };

    // root find the raw loop length so the blended total hits the target
    let mut lo = 0.5 * budget;
    let mut hi = 1.5 * budget + 1e-9;
    for _ in 0..12 {
        if assemble(lo)?.total_len() <= target_len {
            break;
        }
        lo *= 0.5;
    }
    for _ in 0..12 {
        if assemble(hi)?.total_len() >= target_len {
            break;
        }
        hi = hi * 1.5 + 1e-9;
    }
    let raw = solve_monotone_no_deriv(
        |r| match assemble(r) {
            Ok(p) => p.total_len() - target_len,
            Err(_) => f64::NAN,
        },
        lo,
        hi,
        1e-12 * target_len.max(1.0),
        200,
    );
    let (pairs, remainder, _) = super::lobe_sequence(raw, r_out, config.max_pairs)?;
    let path = assemble(raw)?;
    Ok(PieceBuild {
        span,
        target_len,
        base_len,
        budget,
        base: q,
        midpoint: u_mid,
        pairs,
        remainder,
        path,
    })
}

/// Build the loop-decorated tantrix over all spans. `sigma` is the
/// cumulative target speed (its integrand is the target speed itself).
pub fn build_tantrix_path<'a>(
    tbar: &'a SphericalCurve,
    arclen: &'a MonotoneCum,
    sigma: &'a MonotoneCum,
    spans: &[(f64, f64)],
    config: &LoopConfig,
    step: &'a Smoothstep,
) -> Result<TantrixPath<'a>> {
    let mut min_margin = f64::INFINITY;
    for &(s0, s1) in spans {
        let m = 48;
        for i in 0..=m {
            let s = s0 + (s1 - s0) * i as f64 / m as f64;
            let margin = sigma.integrand(s) - tbar.speed(s);
            min_margin = min_margin.min(margin);
            if margin <= 0.0 {
                return Err(Error::SpeedMarginViolated { t: s, margin });
            }
        }
    }
    let mut pieces = Vec::with_capacity(spans.len());
    let mut prefix = Vec::with_capacity(spans.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &span in spans {
        let target = sigma.eval(span.1) - sigma.eval(span.0);
        let piece = build_piece(tbar, arclen, span, target, config, step)?;
        acc += piece.path.total_len();
        prefix.push(acc);
        pieces.push(piece);
    }
    Ok(TantrixPath {
        tbar,
        sigma,
        pieces,
        prefix,
    })
}

impl<'a> TantrixPath<'a> {
    pub fn dim(&self) -> usize {
        self.tbar.dim()
    }

    /// Total measured length (equals the integral of the target speed).
    pub fn total_len(&self) -> f64 {
        *self.prefix.last().unwrap()
    }

    fn piece_of_sigma(&self, sg: f64) -> (usize, f64) {
        let sg = sg.clamp(0.0, self.total_len());
        let i = match self
            .prefix
            .binary_search_by(|p| p.partial_cmp(&sg).unwrap())
        {
            Ok(i) => i.min(self.pieces.len() - 1),
            Err(i) => i - 1,
        };
        (i, sg - self.prefix[i])
    }

    /// The decorated tantrix at parameter s: trace the composite path at the
    /// accumulated target-speed mass.
    pub fn eval_into(&self, s: f64, out: &mut [f64]) {
        let sg = self.sigma.eval(s);
        let (i, local) = self.piece_of_sigma(sg);
        self.pieces[i].path.eval(local, out);
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(s, &mut out);
        out
    }

    /// Quadrature cells in s, split at every path segment boundary and with
    /// long segments quartered so an oscillating lobe never hides inside a
    /// single cell.
    fn quadrature_cells(&self) -> Vec<f64> {
        let mut cuts = vec![0.0f64];
        // ~8 cells per lobe turn, and no sigma cell wider than a few base
        // sample spacings
        let h_sigma = 4.0 * self.total_len() / self.tbar.n_samples() as f64;
        for (i, piece) in self.pieces.iter().enumerate() {
            let offset = self.prefix[i];
            let bounds = piece.path.seg_boundaries().to_vec();
            for w in bounds.windows(2) {
                let len = w[1] - w[0];
                let subs = (len / h_sigma).ceil().clamp(4.0, 96.0) as usize;
                for k in 1..=subs {
                    cuts.push(offset + w[0] + len * k as f64 / subs as f64);
                }
            }
        }
        // map from sigma to s
        let mut cells: Vec<f64> = cuts
            .into_iter()
            .map(|sg| self.sigma.invert(sg))
            .collect();
        cells.push(0.0);
        cells.push(1.0);
        cells.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cells.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        cells
    }

    /// Average of the decorated tantrix over its parameter.
    pub fn average(&self) -> Vec<f64> {
        let dim = self.dim();
        let cells = self.quadrature_cells();
        let mut acc = vecn::zeros(dim);
        let mut point = vec![0.0; dim];
        for w in cells.windows(2) {
            let c = 0.5 * (w[0] + w[1]);
            let h = 0.5 * (w[1] - w[0]);
            if h <= 0.0 {
                continue;
            }
            for &(x, wt) in &GL8 {
                self.eval_into(c + h * x, &mut point);
                vecn::axpy(&mut acc, wt * h, &point);
            }
        }
        acc
    }

    /// Diagnostics: sup distance to the undecorated tantrix, cap
    /// excursions, and per-piece length errors.
    pub fn diagnostics(&self, probes_per_piece: usize) -> InsertDiagnostics {
        let mut d = InsertDiagnostics {
            min_speed_margin: f64::INFINITY,
            ..Default::default()
        };
        let mut p = vec![0.0; self.dim()];
        for (i, piece) in self.pieces.iter().enumerate() {
            let (s0, s1) = piece.span;
            for k in 0..=probes_per_piece {
                let s = s0 + (s1 - s0) * k as f64 / probes_per_piece as f64;
                self.eval_into(s, &mut p);
                let base = self.tbar.eval_unit(s);
                d.sup_dist_to_base = d.sup_dist_to_base.max(vecn::dist(&p, &base));
                d.max_cap_excursion = d
                    .max_cap_excursion
                    .max(vecn::sphere_dist(&p, &piece.base));
                d.min_speed_margin = d
                    .min_speed_margin
                    .min(self.sigma.integrand(s) - self.tbar.speed(s));
            }
            let measured = self.prefix[i + 1] - self.prefix[i];
            d.worst_length_error = d.worst_length_error.max((measured - piece.target_len).abs());
        }
        d
    }

    pub fn to_plan(&self) -> LoopPlan {
        LoopPlan {
            entries: self
                .pieces
                .iter()
                .map(|p| LoopPlanEntry {
                    span: p.span,
                    midpoint: p.midpoint,
                    base: p.base.clone(),
                    budget: p.budget,
                    pairs: p.pairs,
                    remainder: p.remainder,
                })
                .collect(),
        }
    }

    /// Sample onto a fresh spherical curve.
    pub fn sample(&self, n: usize) -> Result<SphericalCurve> {
        let dim = self.dim();
        SphericalCurve::from_fn(Domain::interval(0.0, 1.0), n, dim, self.tbar.curve().degree(), |s, out| {
            self.eval_into(s, out);
        })
    }
}

/// Decorate a tantrix with loops so its speed becomes `vtilde`, returning
/// the sampled curve, the realized plan, and diagnostics.
pub fn insert_loops(
    tbar: &SphericalCurve,
    vtilde: &dyn Fn(f64) -> f64,
    spans: &[(f64, f64)],
    config: &LoopConfig,
    n_out: usize,
) -> Result<(SphericalCurve, LoopPlan, InsertDiagnostics)> {
    let arclen = super::tantrix_arclen(tbar);
    let owned_v: Box<dyn Fn(f64) -> f64 + Send + Sync> = {
        // materialize vtilde on a grid so the cumulative table owns it
        let dom = Domain::interval(0.0, 1.0);
        let field = crate::geom::ScalarField::from_fn(
            dom,
            tbar.n_samples().max(256),
            tbar.curve().degree(),
            vtilde,
        )?;
        Box::new(move |s| field.eval(s))
    };
    let sigma = MonotoneCum::uniform(0.0, 1.0, tbar.n_samples().max(256), owned_v);
    let step = Smoothstep::new(4);
    let path = build_tantrix_path(tbar, &arclen, &sigma, spans, config, &step)?;
    let diag = path.diagnostics(96);
    let plan = path.to_plan();
    let curve = path.sample(n_out)?;
    Ok((curve, plan, diag))
}
