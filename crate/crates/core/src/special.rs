//! Scalar special functions: the Gaussian tail and its inverse, the upper
//! incomplete gamma function for arbitrary real order, and the Rayleigh
//! moment integral built on top of it.

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

const MAX_ITER: usize = 100_000;

/// Taylor coefficients of `Γ(1+b)` about `b = 0`, from order 1 upward.
const GAMMA1P_TAYLOR: [f64; 14] = [
    -0.577_215_664_901_532_860_61,
    0.989_055_995_327_972_555_4,
    -0.907_479_076_080_886_289_02,
    0.981_728_086_834_400_187_34,
    -0.981_995_068_903_145_202_1,
    0.993_149_114_621_276_193_15,
    -0.996_001_760_442_431_533_97,
    0.998_105_693_783_128_921_98,
    -0.999_025_267_621_954_867_79,
    0.999_515_656_072_777_441_07,
    -0.999_756_597_508_601_287_03,
    0.999_878_271_315_133_275_73,
    -0.999_939_064_206_444_316_84,
    0.999_969_517_763_482_104_5,
];

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `∫₀^∞ (1+snr·z)^order e^{−z} dz`, the moment of a unit-mean exponential
/// fade that every gamma term of the capacity formulas reduces to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMoment<T> {
    pub order: T,
    pub snr: T,
    pub value: T,
}

/// Natural log of `Γ(x)` for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::lit(i as f64));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    half * (T::lit(2.0) * T::PI()).ln() + (x + half) * t.ln() - t + acc.ln()
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn gaussian_q<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(domain("gaussian_q argument", x.as_f64()));
    }
    if x < T::zero() {
        return Ok(T::one() - gaussian_q(-x)?);
    }
    let half = T::lit(0.5);
    Ok(half * upper_regularized_half(half * x * x))
}

/// `Γ(1/2, y) / Γ(1/2)`.
fn upper_regularized_half<T: Real>(y: T) -> T {
    let half = T::lit(0.5);
    if y == T::zero() {
        return T::one();
    }
    let ln_sqrt_pi = half * T::PI().ln();
    if y < T::lit(1.5) {
        T::one() - lower_series(half, y) * (-y + half * y.ln() - ln_sqrt_pi).exp()
    } else {
        // continued fraction cannot fail to converge for y >= 1.5
        let s = continued_fraction(half, y).unwrap_or(T::zero());
        s * (-y + half * y.ln() - ln_sqrt_pi).exp()
    }
}

/// Inverse of [`gaussian_q`]: the `x` with `Q(x) = p`.
///
/// Wichura's AS241 rational approximation, polished with one Halley step
/// against [`gaussian_q`] so that the pair round-trips consistently.
pub fn gaussian_q_inv<T: Real>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(domain("gaussian_q_inv probability", p.as_f64()));
    }
    // Q^{-1}(p) = Φ^{-1}(1 − p) = −Φ^{-1}(p)
    let mut x = -normal_quantile_as241(p.as_f64());
    if x.abs() > 37.0 {
        return Ok(T::lit(x));
    }
    for _ in 0..2 {
        let xt = T::lit(x);
        let pdf = (-(xt * xt) * T::lit(0.5)).exp() / (T::lit(2.0) * T::PI()).sqrt();
        if pdf == T::zero() {
            break;
        }
        let t = (gaussian_q(xt)? - p) / pdf;
        let step = t / (T::one() - xt * t * T::lit(0.5));
        x = (xt + step).as_f64();
        if step.abs() <= T::epsilon() * xt.abs().max(T::one()) {
            break;
        }
    }
    Ok(T::lit(x))
}

fn normal_quantile_as241(p: f64) -> f64 {
    fn poly(c: &[f64], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
    }
    const A: [f64; 8] = [
        3.387_132_872_796_366_608,
        133.141_667_891_784_377_45,
        1_971.590_950_306_551_442_7,
        13_731.693_765_509_461_125,
        45_921.953_931_549_871_457,
        67_265.770_927_008_700_853,
        33_430.575_583_588_128_105,
        2_509.080_928_730_122_672_7,
    ];
    const B: [f64; 8] = [
        1.0,
        42.313_330_701_600_911_252,
        687.187_007_492_057_908_3,
        5_394.196_021_424_751_107_7,
        21_213.794_301_586_595_867,
        39_307.895_800_092_710_61,
        28_729.085_735_721_942_674,
        5_226.495_278_852_854_561,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34,
        4.630_337_846_156_545_295_9,
        5.769_497_221_460_691_405_5,
        3.647_848_324_763_204_605_04,
        1.270_458_252_452_368_382_58,
        0.241_780_725_177_450_611_77,
        0.022_723_844_989_269_184_583_3,
        7.745_450_142_783_414_076_4e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87,
        1.676_384_830_183_803_849_4,
        0.689_767_334_985_100_004_55,
        0.148_103_976_427_480_074_59,
        0.015_198_666_563_616_457_196_6,
        5.475_938_084_995_344_946e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_2,
        5.463_784_911_164_114_369_9,
        1.784_826_539_917_291_335_8,
        0.296_560_571_828_504_891_23,
        0.026_532_189_526_576_123_093,
        0.001_242_660_947_388_078_438_6,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        0.599_832_206_555_887_937_69,
        0.136_929_880_922_735_805_31,
        0.014_875_361_290_850_614_852_5,
        7.868_691_311_456_132_591e-4,
        1.846_318_317_510_054_681_8e-5,
        1.421_511_758_316_445_888_7e-7,
        2.044_263_103_389_939_785_64e-15,
    ];

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let v = if r <= 5.0 {
        r -= 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -v
    } else {
        v
    }
}

/// Derivative of [`gaussian_q_inv`]: `−√(2π)·exp(Q⁻¹(p)²/2)`.
pub fn q_inv_derivative<T: Real>(p: T) -> Result<T> {
    let x = gaussian_q_inv(p)?;
    Ok(-(T::lit(2.0) * T::PI()).sqrt() * (x * x * T::lit(0.5)).exp())
}

/// Upper incomplete gamma `Γ(a, x) = ∫ₓ^∞ t^{a−1} e^{−t} dt` for any finite
/// real `a` (negative non-integer orders included) and `x > 0`.
pub fn upper_inc_gamma<T: Real>(a: T, x: T) -> Result<T> {
    check_args(a, x)?;
    let s = scaled_upper_gamma(a, x)?;
    let v = (s.ln() + a * x.ln() - x).exp();
    if !v.is_finite() {
        return Err(Error::Range {
            what: "upper_inc_gamma",
            detail: format!("a = {}, x = {}", a, x),
        });
    }
    Ok(v)
}

/// `e^{1/snr} · snr^a · Γ(a+1, 1/snr)`, evaluated without ever forming the
/// (possibly overflowing) exponential prefactor.
pub fn rayleigh_moment<T: Real>(a: T, snr: T) -> Result<ScaledMoment<T>> {
    if !(snr > T::zero()) || !snr.is_finite() {
        return Err(domain("rayleigh_moment snr", snr.as_f64()));
    }
    let x = snr.recip();
    check_args(a, x)?;
    let value = x * scaled_upper_gamma(a + T::one(), x)?;
    if !value.is_finite() || value <= T::zero() {
        return Err(Error::Range {
            what: "rayleigh_moment",
            detail: format!("order = {}, snr = {}, value = {}", a, snr, value),
        });
    }
    Ok(ScaledMoment {
        order: a,
        snr,
        value,
    })
}

fn check_args<T: Real>(a: T, x: T) -> Result<()> {
    if !a.is_finite() {
        return Err(domain("incomplete gamma order", a.as_f64()));
    }
    if !(x > T::zero()) || !x.is_finite() {
        return Err(domain("incomplete gamma argument", x.as_f64()));
    }
    Ok(())
}

/// `S(b, x) = e^x x^{−b} Γ(b, x)`, which stays moderate where `Γ(b, x)`
/// itself under- or overflows. Satisfies `x·S(b+1, x) = b·S(b, x) + 1`.
pub(crate) fn scaled_upper_gamma<T: Real>(b: T, x: T) -> Result<T> {
    let half = T::lit(0.5);
    if b > half {
        if x < b + T::one() {
            let ln_prefix = -x + b * x.ln() - ln_gamma(b);
            let upper = T::one() - lower_series(b, x) * ln_prefix.exp();
            let s = (x - b * x.ln() + ln_gamma(b) + upper.ln()).exp();
            return finite_or_range(s, b, x);
        }
        return continued_fraction(b, x);
    }
    if x >= T::one() {
        return continued_fraction(b, x);
    }
    // x < 1, b <= 1/2: start in (-1/2, 1/2] and recur downward, |x/b| < 2.
    let steps = (-b - half).ceil().max(T::zero());
    let top = b + steps;
    let mut s = (x - top * x.ln()).exp() * small_order_upper(top, x);
    let n = steps.to_usize().unwrap_or(0);
    for j in 1..=n {
        let order = top - T::lit(j as f64);
        s = (x * s - T::one()) / order;
    }
    finite_or_range(s, b, x)
}

fn finite_or_range<T: Real>(s: T, b: T, x: T) -> Result<T> {
    if s.is_finite() && s > T::zero() {
        Ok(s)
    } else {
        Err(Error::Range {
            what: "scaled incomplete gamma",
            detail: format!("b = {}, x = {}, S = {}", b, x, s),
        })
    }
}

/// `Σ x^n / (b (b+1) ⋯ (b+n))`, so that `γ(b, x) = e^{−x} x^b · series`.
fn lower_series<T: Real>(b: T, x: T) -> T {
    let mut ap = b;
    let mut term = b.recip();
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap = ap + T::one();
        term = term * x / ap;
        sum = sum + term;
        if term.abs() < sum.abs() * T::epsilon() {
            break;
        }
    }
    sum
}

/// Modified Lentz evaluation of the Legendre continued fraction, returning
/// `e^x x^{−b} Γ(b, x)` directly. Valid for every real `b` when `x > 0`.
fn continued_fraction<T: Real>(b: T, x: T) -> Result<T> {
    let tiny = T::min_positive_value() / T::epsilon();
    let mut bn = x + T::one() - b;
    let mut c = tiny.recip();
    let mut d = if bn.abs() < tiny { tiny.recip() } else { bn.recip() };
    let mut h = d;
    for i in 1..MAX_ITER {
        let fi = T::lit(i as f64);
        let an = -fi * (fi - b);
        bn = bn + T::lit(2.0);
        d = an * d + bn;
        if d.abs() < tiny {
            d = tiny;
        }
        c = bn + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = d * c;
        h = h * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            return finite_or_range(h, b, x);
        }
    }
    Err(Error::Convergence {
        what: "incomplete gamma continued fraction",
        iterations: MAX_ITER,
        detail: format!("b = {}, x = {}", b, x),
    })
}

/// `Γ(b, x)` for `|b| ≤ 1/2` and `0 < x < 1`, written so the `1/b` poles of
/// `Γ(b)` and `x^b / b` cancel analytically.
fn small_order_upper<T: Real>(b: T, x: T) -> T {
    let ln_x = x.ln();
    let gamma_part = gamma1p_minus_one_over(b);
    let power_part = if b == T::zero() {
        ln_x
    } else {
        (b * ln_x).exp_m1() / b
    };
    // Σ_{n≥1} (−x)^n / (n! (b+n))
    let mut term = T::one();
    let mut tail = T::zero();
    for n in 1..MAX_ITER {
        let fnn = T::lit(n as f64);
        term = term * (-x) / fnn;
        let add = term / (b + fnn);
        tail = tail + add;
        if add.abs() <= tail.abs() * T::epsilon() {
            break;
        }
    }
    gamma_part - power_part - (b * ln_x).exp() * tail
}

/// `(Γ(1+b) − 1) / b`, continuous through `b = 0` where it equals `−γ`.
fn gamma1p_minus_one_over<T: Real>(b: T) -> T {
    if b.abs() < T::lit(0.05) {
        GAMMA1P_TAYLOR
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * b + T::lit(c))
    } else {
        ln_gamma(T::one() + b).exp_m1() / b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn q_symmetry_and_median() {
        assert_eq!(gaussian_q(0.0_f64).unwrap(), 0.5);
        for &x in &[0.1, 0.9, 1.7, 3.3, 6.0] {
            let s = gaussian_q(x).unwrap() + gaussian_q(-x).unwrap();
            assert!((s - 1.0_f64).abs() < 1e-15);
        }
    }

    #[test]
    fn q_rejects_non_finite() {
        assert!(gaussian_q(f64::NAN).is_err());
        assert!(gaussian_q(f64::INFINITY).is_err());
    }

    #[test]
    fn q_inv_domain() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(gaussian_q_inv(p).is_err(), "{p}");
            assert!(q_inv_derivative(p).is_err(), "{p}");
        }
        assert_eq!(gaussian_q_inv(0.5_f64).unwrap(), 0.0);
    }

    #[test]
    fn q_inv_derivative_at_median() {
        let v = q_inv_derivative(0.5_f64).unwrap();
        assert!(rel(v, -(2.0 * std::f64::consts::PI).sqrt()) < 1e-15);
    }

    #[test]
    fn gamma_low_orders() {
        for &x in &[1e-3, 0.3, 1.0, 4.0, 70.0] {
            let g1: f64 = upper_inc_gamma(1.0, x).unwrap();
            assert!(rel(g1, (-x).exp()) < 1e-13, "x={x}");
            let g2: f64 = upper_inc_gamma(2.0, x).unwrap();
            assert!(rel(g2, (x + 1.0) * (-x).exp()) < 1e-13, "x={x}");
        }
    }

    #[test]
    fn gamma_integer_nonpositive_orders() {
        // Γ(0, x) = E1(x); Γ(-1, x) = (e^{-x}/x − E1(x))
        let x = 0.25_f64;
        let e1 = 1.044_282_634_443_738_3; // E1(0.25)
        let g0 = upper_inc_gamma(0.0, x).unwrap();
        assert!(rel(g0, e1) < 1e-13);
        let gm1 = upper_inc_gamma(-1.0, x).unwrap();
        assert!(rel(gm1, (-x).exp() / x - e1) < 1e-13);
    }

    #[test]
    fn gamma_domain_errors() {
        assert!(upper_inc_gamma(1.0_f64, 0.0).is_err());
        assert!(upper_inc_gamma(1.0_f64, -2.0).is_err());
        assert!(upper_inc_gamma(f64::NAN, 1.0).is_err());
        assert!(rayleigh_moment(1.0_f64, 0.0).is_err());
    }

    #[test]
    fn gamma_overflow_is_range_error() {
        let err = upper_inc_gamma(-400.0_f64, 1e-3).unwrap_err();
        assert!(matches!(err, Error::Range { .. }), "{err:?}");
    }

    #[test]
    fn moment_trivial_orders() {
        for &snr in &[1e-3, 0.2, 1.0, 2.0, 55.0] {
            let m0 = rayleigh_moment(0.0_f64, snr).unwrap().value;
            assert!(rel(m0, 1.0) < 1e-14, "snr={snr}");
            let m1 = rayleigh_moment(1.0_f64, snr).unwrap().value;
            assert!(rel(m1, 1.0 + snr) < 1e-14, "snr={snr}");
        }
    }

    #[test]
    fn moment_survives_tiny_snr() {
        // e^{1/snr} alone overflows for snr = 1e-3
        let m = rayleigh_moment(-14.43_f64, 1e-3).unwrap().value;
        assert!(m > 0.98 && m < 1.0);
    }

    #[test]
    fn small_order_matches_recurrence_neighbour() {
        // Γ(b, x) = (Γ(b+1, x) − x^b e^{−x}) / b across the b = 0 seam
        for &b in &[-0.45, -0.3, 0.04, 0.2, 0.5] {
            let x = 0.4_f64;
            let lhs = upper_inc_gamma(b, x).unwrap();
            let up = upper_inc_gamma(b + 1.0, x).unwrap();
            let rhs = (up - x.powf(b) * (-x).exp()) / b;
            assert!(rel(lhs, rhs) < 1e-7, "b={b}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn single_precision_instantiation() {
        let q: f32 = gaussian_q(1.0_f32).unwrap();
        assert!((q - 0.158_655_25).abs() < 1e-6);
        let m: f32 = rayleigh_moment(-3.0_f32, 2.0).unwrap().value;
        let m64: f64 = rayleigh_moment(-3.0_f64, 2.0).unwrap().value;
        assert!(((m as f64) - m64).abs() / m64 < 1e-5);
    }
}
