//! Gauss–Legendre quadrature rules and composite integration helpers.

/// 8-point rule on [-1, 1]; exact for polynomials of degree <= 15.
pub const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

/// 4-point rule on [-1, 1]; exact for polynomials of degree <= 7.
pub const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
    (-0.339_981_043_584_856_26, 0.652_145_154_862_546_2),
    (0.339_981_043_584_856_26, 0.652_145_154_862_546_2),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
];

/// 16-point rule on [-1, 1]; exact for polynomials of degree <= 31.
pub const GL16: [(f64, f64); 16] = [
    (-0.989_400_934_991_649_9, 0.027_152_459_411_754_094),
    (-0.944_575_023_073_232_6, 0.062_253_523_938_647_89),
    (-0.865_631_202_387_831_7, 0.095_158_511_682_492_78),
    (-0.755_404_408_355_003, 0.124_628_971_255_533_87),
    (-0.617_876_244_402_643_7, 0.149_595_988_816_576_73),
    (-0.458_016_777_657_227_4, 0.169_156_519_395_002_53),
    (-0.281_603_550_779_258_9, 0.182_603_415_044_923_59),
    (-0.095_012_509_837_637_44, 0.189_450_610_455_068_5),
    (0.095_012_509_837_637_44, 0.189_450_610_455_068_5),
    (0.281_603_550_779_258_9, 0.182_603_415_044_923_59),
    (0.458_016_777_657_227_4, 0.169_156_519_395_002_53),
    (0.617_876_244_402_643_7, 0.149_595_988_816_576_73),
    (0.755_404_408_355_003, 0.124_628_971_255_533_87),
    (0.865_631_202_387_831_7, 0.095_158_511_682_492_78),
    (0.944_575_023_073_232_6, 0.062_253_523_938_647_89),
    (0.989_400_934_991_649_9, 0.027_152_459_411_754_094),
];

/// Integrate `f` over [a, b] with the 8-point rule.
pub fn gl8(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for &(x, w) in &GL8 {
        s += w * f(c + h * x);
    }
    s * h
}

/// Integrate `f` over [a, b] with the 16-point rule.
pub fn gl16(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for &(x, w) in &GL16 {
        s += w * f(c + h * x);
    }
    s * h
}

/// Composite 8-point rule over `cells` consecutive equal cells of [a, b].
pub fn composite_gl8(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> f64 {
    let h = (b - a) / cells as f64;
    let mut s = 0.0;
    for i in 0..cells {
        let lo = a + i as f64 * h;
        s += gl8(&f, lo, lo + h);
    }
    s
}

/// Vector-valued 8-point rule over [a, b]; `f` writes into the scratch buffer.
pub fn gl8_vec(mut f: impl FnMut(f64, &mut [f64]), a: f64, b: f64, out: &mut [f64]) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    out.fill(0.0);
    let mut buf = vec![0.0; out.len()];
    for &(x, w) in &GL8 {
        f(c + h * x, &mut buf);
        for (o, v) in out.iter_mut().zip(&buf) {
            *o += w * v;
        }
    }
    for o in out.iter_mut() {
        *o *= h;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_exactness() {
        // GL8 integrates x^15 exactly on [0, 1]: 1/16.
        let v = gl8(|x| x.powi(15), 0.0, 1.0);
        assert!((v - 1.0 / 16.0).abs() < 1e-15, "{v}");
        let v16 = gl16(|x| x.powi(31), 0.0, 1.0);
        assert!((v16 - 1.0 / 32.0).abs() < 1e-15, "{v16}");
    }

    #[test]
    fn composite_smooth() {
        let v = composite_gl8(f64::sin, 0.0, std::f64::consts::PI, 16);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_two() {
        let s8: f64 = GL8.iter().map(|&(_, w)| w).sum();
        let s16: f64 = GL16.iter().map(|&(_, w)| w).sum();
        assert!((s8 - 2.0).abs() < 1e-14);
        assert!((s16 - 2.0).abs() < 1e-14);
    }
}
