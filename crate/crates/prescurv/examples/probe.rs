use prescurv::density::{reparam_family, DensityFamily};
use prescurv::geom::{resample_unit_speed, tantrix, Domain, SphericalCurve};
use prescurv::loops::{self, build_tantrix_path, segment_spans, LoopConfig};
use prescurv::num::{vecn, MonotoneCum, Smoothstep};
use prescurv::presets;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let (g, _, _) = resample_unit_speed(&presets::trefoil(2048, 5).unwrap()).unwrap();
    let t_closed = tantrix(&g).unwrap();
    let n = 2049;
    let len = t_closed.domain().len();
    let t01 = SphericalCurve::from_fn(Domain::interval(0.0, 1.0), n, 3, 5, |u, out| {
        t_closed.eval_into(len * u, out);
    })
    .unwrap();
    let fam = DensityFamily::from_tantrix(&t01, 8).unwrap();
    let x0 = fam.x0().to_vec();
    let r449 = fam.positivity_radius();
    let hull = prescurv::nonflat::hull_thickness(&t01, &x0).thickness;
    let r = 0.9 * r449.min(hull);
    println!("R = {r:.4} (pos {r449:.4}, hull {hull:.4})  setup {:?}", t0.elapsed());

    // target speed: vtilde(s) = len * kappa_tilde with kappa_tilde = 1.3 * kappa_max
    let kt = 1.6 * 3.08;
    let vt = len * kt / len; // tantrix speed in s-units: |T01'(s)| = len * kappa(s * len / len)... probe actual speeds
    let mut smax: f64 = 0.0;
    for i in 0..=400 {
        let s = i as f64 / 400.0;
        smax = smax.max(t01.speed(s));
    }
    println!("max |T01'| = {smax:.3}, target speed = {:.3}", vt * len);

    // steer to a ball point, refit, decorate
    let x = [x0[0] + 0.3 * r, x0[1] + 0.15 * r, x0[2] - 0.2 * r];
    let t1 = Instant::now();
    let (steered, _) = reparam_family(&t01, &fam, &x).unwrap();
    let tbar = SphericalCurve::from_fn(Domain::interval(0.0, 1.0), n, 3, 5, |s, out| {
        let p = steered.eval(s);
        out.copy_from_slice(&p);
    })
    .unwrap();
    println!("steer+refit {:?}", t1.elapsed());
    let t2 = Instant::now();
    let arclen = loops::tantrix_arclen(&tbar);
    let vtilde = len * kt;
    let sigma = MonotoneCum::uniform(0.0, 1.0, n, Box::new(move |_s: f64| vtilde));
    let config = LoopConfig::for_ball_radius(r);
    let spans = segment_spans(&tbar, &arclen, 0.45 * r, false).unwrap();
    println!("pieces: {}", spans.len());
    let step = Smoothstep::new(4);
    let path = build_tantrix_path(&tbar, &arclen, &sigma, &spans, &config, &step).unwrap();
    println!("build path {:?}", t2.elapsed());
    let t3 = Instant::now();
    let ave_decorated = path.average();
    let ave_steered = steered.average();
    println!("average {:?}", t3.elapsed());
    println!("|ave(Ttilde) - ave(Tbar)| = {:.4e}  (R/2 = {:.4e})", vecn::dist(&ave_decorated, &ave_steered), r / 2.0);
    println!("|ave(Ttilde) - x| = {:.4e}  (R = {:.4e})", vecn::dist(&ave_decorated, &x), r);
    let diag = path.diagnostics(64);
    println!("sup|Ttilde - Tbar| = {:.4e} (R/2 = {:.4e})", diag.sup_dist_to_base, r / 2.0);
    println!("max cap excursion = {:.4e} (R/4 = {:.4e})", diag.max_cap_excursion, r / 4.0);
    println!("worst length err = {:.3e}", diag.worst_length_error);
    println!("min speed margin = {:.4}", diag.min_speed_margin);
    // speed of decorated tantrix via finite differences
    let mut worst_speed = 0.0f64;
    let fd = |s: f64, h: f64| {
        let a = path.eval(s + h);
        let b = path.eval(s - h);
        vecn::dist(&a, &b) / (2.0 * h)
    };
    for i in 1..500 {
        let s = i as f64 / 500.0;
        let h = 4e-7;
        let sp = (4.0 * fd(s, h) - fd(s, 2.0 * h)) / 3.0;
        worst_speed = worst_speed.max((sp - vtilde).abs() / vtilde);
    }
    println!("max rel speed error (FD): {worst_speed:.3e}");
    println!("total {:?}", t0.elapsed());
}
