//! Average-matching ball solver.
//!
//! The construction guarantees |F(x) - x| < R on the steering ball, so the
//! displaced map G(x) = target + x - F(x) sends the ball into itself and the
//! target is attained somewhere. A damped fixed point on G finds it; a small
//! projected Nelder-Mead on |F(x) - target|^2 backs it up when the fixed
//! point stalls. Side-condition failures shrink R geometrically and restart.

use crate::num::vecn;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct BallSpec {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl BallSpec {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        assert!(radius > 0.0);
        Self { center, radius }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        vecn::dist(x, &self.center) <= self.radius * (1.0 + 1e-12)
    }

    /// Pull a point to the given fraction of the radius if it strayed out.
    pub fn clamp(&self, x: &[f64], frac: f64) -> Vec<f64> {
        let d = vecn::dist(x, &self.center);
        let lim = self.radius * frac;
        if d <= lim {
            return x.to_vec();
        }
        let mut out = self.center.clone();
        vecn::axpy(&mut out, lim / d, &vecn::sub(x, &self.center));
        out
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub omega0: f64,
    pub r_min: f64,
    /// Iterations without meaningful progress before the simplex fallback.
    pub patience: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            omega0: 1.0,
            r_min: 1e-5,
            patience: 30,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x_star: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub f_evals: usize,
    pub r_history: Vec<f64>,
    pub condition_flags: Vec<String>,
}

/// Errors that call for a smaller ball rather than giving up.
pub fn is_shrink_signal(e: &Error) -> bool {
    matches!(
        e,
        Error::RTooLarge { .. }
            | Error::SpeedMarginViolated { .. }
            | Error::NegativeCoefficient { .. }
            | Error::CapTooSmall { .. }
    )
}

/// Halve the ball, or report underflow below the configured minimum.
pub fn shrink_r(ball: &BallSpec, reason: &str, r_min: f64) -> Result<BallSpec> {
    let radius = 0.5 * ball.radius;
    if radius < r_min {
        return Err(Error::RUnderflow {
            radius,
            min: r_min,
            context: reason.to_string(),
        });
    }
    Ok(BallSpec {
        center: ball.center.clone(),
        radius,
    })
}

struct Eval<'f> {
    f: &'f mut dyn FnMut(&[f64]) -> Result<Vec<f64>>,
    ball: &'f BallSpec,
    count: usize,
}

impl<'f> Eval<'f> {
    /// Evaluate F and enforce the ball self-map bound |F(x) - x| < R.
    fn call(&mut self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        debug_assert!(self.ball.contains(x));
        self.count += 1;
        let fx = (self.f)(x)?;
        let displacement = vecn::dist(&fx, x);
        if displacement >= self.ball.radius {
            return Err(Error::RTooLarge {
                reason: format!(
                    "self-map bound violated: |F(x) - x| = {displacement:.3e} >= R = {:.3e}",
                    self.ball.radius
                ),
            });
        }
        Ok((fx, displacement))
    }
}

/// Find x in the ball with F(x) = target, for a fixed ball.
pub fn solve_average_constraint(
    f: &mut dyn FnMut(&[f64]) -> Result<Vec<f64>>,
    ball: &BallSpec,
    target: &[f64],
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let mut ev = Eval { f, ball, count: 0 };
    let mut flags = Vec::new();
    let mut x = ball.center.clone();
    let (fx, _) = ev.call(&x)?;
    let mut res = vecn::dist(&fx, target);
    let mut fx = fx;
    let mut omega = cfg.omega0;
    let mut iterations = 0;
    let mut best = (x.clone(), res);
    let mut last_progress = 0usize;

    while res > cfg.tol && iterations < cfg.max_iter {
        iterations += 1;
        // damped displaced step with residual backtracking
        let mut step_ok = false;
        for _ in 0..8 {
            let mut xn = x.clone();
            for ((v, &t), &fv) in xn.iter_mut().zip(target).zip(&fx) {
                *v += omega * (t - fv);
            }
            let xn = ball.clamp(&xn, 1.0 - 1e-9);
            let (fxn, _) = ev.call(&xn)?;
            let resn = vecn::dist(&fxn, target);
            if resn <= res {
                x = xn;
                fx = fxn;
                res = resn;
                omega = (omega * 1.4).min(1.0);
                step_ok = true;
                break;
            }
            omega *= 0.5;
        }
        if res < best.1 * 0.9 {
            best = (x.clone(), res);
            last_progress = iterations;
        } else if res < best.1 {
            best = (x.clone(), res);
        }
        if !step_ok || iterations - last_progress > cfg.patience {
            flags.push("fixed point stalled; switching to simplex descent".into());
            let (xs, rs, _its) = nelder_mead(&mut ev, ball, target, &best.0, cfg)?;
            if rs < best.1 {
                best = (xs, rs);
            }
            x = best.0.clone();
            res = best.1;
            break;
        }
    }
    if res > cfg.tol {
        return Err(Error::NoConvergence {
            residual: res,
            iterations,
        });
    }
    Ok(SolveReport {
        x_star: x,
        residual: res,
        iterations,
        f_evals: ev.count,
        r_history: vec![ball.radius],
        condition_flags: flags,
    })
}

/// Derivative-free simplex descent on |F(x) - target|^2, kept inside the
/// ball by clamping reflected points.
fn nelder_mead(
    ev: &mut Eval<'_>,
    ball: &BallSpec,
    target: &[f64],
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, f64, usize)> {
    let n = x0.len();
    let frac = 1.0 - 1e-9;
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(ball.clamp(x0, frac));
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += 0.25 * ball.radius;
        pts.push(ball.clamp(&p, frac));
    }
    let mut vals = Vec::with_capacity(n + 1);
    for p in &pts {
        let (fp, _) = ev.call(p)?;
        vals.push(vecn::dist(&fp, target));
    }
    let budget = 40 * (n + 1).max(4) + cfg.max_iter;
    for it in 0..budget {
        // order ascending
        let mut idx: Vec<usize> = (0..pts.len()).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let reorder = |v: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            idx.iter().map(|&i| v[i].clone()).collect()
        };
        pts = reorder(&pts);
        vals = idx.iter().map(|&i| vals[i]).collect();
        if vals[0] <= cfg.tol {
            return Ok((pts[0].clone(), vals[0], it));
        }
        // centroid of all but worst
        let mut c = vecn::zeros(n);
        for p in &pts[..n] {
            vecn::axpy(&mut c, 1.0 / n as f64, p);
        }
        let worst = pts[n].clone();
        let trial = |alpha: f64, c: &[f64], w: &[f64]| -> Vec<f64> {
            let mut t = c.to_vec();
            for ((tv, &cv), &wv) in t.iter_mut().zip(c).zip(w) {
                *tv = cv + alpha * (cv - wv);
            }
            ball.clamp(&t, frac)
        };
        let xr = trial(1.0, &c, &worst);
        let (fr, _) = ev.call(&xr)?;
        let vr = vecn::dist(&fr, target);
        if vr < vals[0] {
            let xe = trial(2.0, &c, &worst);
            let (fe, _) = ev.call(&xe)?;
            let ve = vecn::dist(&fe, target);
            if ve < vr {
                pts[n] = xe;
                vals[n] = ve;
            } else {
                pts[n] = xr;
                vals[n] = vr;
            }
        } else if vr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = vr;
        } else {
            let xc = trial(-0.5, &c, &worst);
            let (fc, _) = ev.call(&xc)?;
            let vc = vecn::dist(&fc, target);
            if vc < vals[n] {
                pts[n] = xc;
                vals[n] = vc;
            } else {
                // shrink toward the best point
                for i in 1..=n {
                    let keep = pts[0].clone();
                    for (pv, &bv) in pts[i].iter_mut().zip(&keep) {
                        *pv = bv + 0.5 * (*pv - bv);
                    }
                    let (fp, _) = ev.call(&pts[i])?;
                    vals[i] = vecn::dist(&fp, target);
                }
            }
        }
    }
    let mut ibest = 0;
    for i in 1..vals.len() {
        if vals[i] < vals[ibest] {
            ibest = i;
        }
    }
    Ok((pts[ibest].clone(), vals[ibest], budget))
}

/// Full solve with shrink management: `prepare(R)` builds the average map
/// for a ball of radius R (it may refuse with a shrink signal), and the
/// solve restarts on any shrink-class failure with R halved.
pub fn solve_with_shrink<P, F>(
    mut prepare: P,
    ball0: BallSpec,
    target: &[f64],
    cfg: &SolverConfig,
) -> Result<SolveReport>
where
    P: FnMut(f64) -> Result<F>,
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut ball = ball0;
    let mut r_history = vec![ball.radius];
    let mut flags: Vec<String> = Vec::new();
    let mut evals = 0usize;
    loop {
        let attempt = (|| -> Result<SolveReport> {
            let mut f = prepare(ball.radius)?;
            solve_average_constraint(&mut f, &ball, target, cfg)
        })();
        match attempt {
            Ok(mut report) => {
                report.r_history = r_history;
                report.condition_flags.append(&mut flags);
                report.f_evals += evals;
                return Ok(report);
            }
            Err(e) if is_shrink_signal(&e) => {
                flags.push(format!("shrinking R = {:.3e}: {e}", ball.radius));
                ball = shrink_r(&ball, &e.to_string(), cfg.r_min)?;
                r_history.push(ball.radius);
                evals += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball() -> BallSpec {
        BallSpec::new(vec![0.5, -0.25, 1.0], 0.2)
    }

    #[test]
    fn identity_map_converges_immediately() {
        let b = ball();
        let mut f = |x: &[f64]| -> Result<Vec<f64>> { Ok(x.to_vec()) };
        let r = solve_average_constraint(&mut f, &b, &b.center.clone(), &SolverConfig::default())
            .unwrap();
        assert!(r.residual <= 1e-12);
        assert!(r.iterations <= 1, "{}", r.iterations);
    }

    #[test]
    fn translation_map_converges_fast() {
        let b = ball();
        let d = [0.03, -0.05, 0.02];
        let mut f = |x: &[f64]| -> Result<Vec<f64>> {
            Ok(x.iter().zip(&d).map(|(a, b)| a + b).collect())
        };
        let r = solve_average_constraint(&mut f, &b, &b.center.clone(), &SolverConfig::default())
            .unwrap();
        assert!(r.residual <= 1e-12, "{}", r.residual);
        assert!(r.iterations <= 3, "{}", r.iterations);
        // the fixed point is center - d
        for i in 0..3 {
            assert!((r.x_star[i] - (b.center[i] - d[i])).abs() < 1e-10);
        }
    }

    #[test]
    fn out_of_ball_displacement_is_flagged() {
        let b = ball();
        let mut f = |x: &[f64]| -> Result<Vec<f64>> {
            Ok(x.iter().map(|v| v + 0.5).collect()) // |F - x| > R
        };
        let e = solve_average_constraint(&mut f, &b, &b.center.clone(), &SolverConfig::default());
        assert!(matches!(e, Err(Error::RTooLarge { .. })));
    }

    #[test]
    fn rotation_needs_simplex_fallback() {
        // F(x) = x0 + Rot120(x - x0) + d: the displaced iteration diverges
        // (|I - Rot| = sqrt(3) > 1) but the simplex finds the solution.
        let b = ball();
        let c = b.center.clone();
        let d = [0.02, 0.01, -0.015];
        let (co, si) = ((2.0 * std::f64::consts::PI / 3.0).cos(), (2.0 * std::f64::consts::PI / 3.0).sin());
        let mut f = |x: &[f64]| -> Result<Vec<f64>> {
            let u = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
            let rot = [co * u[0] - si * u[1], si * u[0] + co * u[1], u[2]];
            Ok(vec![
                c[0] + rot[0] + d[0],
                c[1] + rot[1] + d[1],
                c[2] + rot[2] + d[2],
            ])
        };
        let cfg = SolverConfig {
            tol: 1e-9,
            patience: 10,
            ..Default::default()
        };
        let r = solve_average_constraint(&mut f, &b, &c.clone(), &cfg).unwrap();
        assert!(r.residual <= 1e-9, "{}", r.residual);
        assert!(r.condition_flags.iter().any(|s| s.contains("simplex")));
    }

    #[test]
    fn shrink_halves_and_underflows() {
        let b = ball();
        let s = shrink_r(&b, "test", 1e-5).unwrap();
        assert_eq!(s.radius, 0.1);
        let tiny = BallSpec::new(b.center.clone(), 1.5e-5);
        assert!(matches!(
            shrink_r(&tiny, "test", 1e-5),
            Err(Error::RUnderflow { .. })
        ));
    }

    #[test]
    fn shrink_loop_resolves_signals() {
        // prepare refuses until R <= 0.05, then the map is a small translation
        let b = ball();
        let c = b.center.clone();
        let r = solve_with_shrink(
            |radius| -> Result<_> {
                if radius > 0.05 {
                    return Err(Error::SpeedMarginViolated {
                        t: 0.0,
                        margin: -1.0,
                    });
                }
                let c = c.clone();
                Ok(move |x: &[f64]| -> Result<Vec<f64>> {
                    let _ = &c;
                    Ok(x.iter().map(|v| v + 0.001).collect())
                })
            },
            b,
            &ball().center,
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(r.residual <= 1e-8);
        assert!(r.r_history.len() >= 3, "{:?}", r.r_history);
        assert!(r.r_history.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn underflow_reported_from_shrink_loop() {
        let b = BallSpec::new(vec![0.0; 3], 4e-5);
        let r = solve_with_shrink(
            |_radius| -> Result<Box<dyn FnMut(&[f64]) -> Result<Vec<f64>>>> {
                Err(Error::RTooLarge {
                    reason: "always".into(),
                })
            },
            b,
            &[0.0; 3],
            &SolverConfig::default(),
        );
        assert!(matches!(r, Err(Error::RUnderflow { .. })));
    }
}
