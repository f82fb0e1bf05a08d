//! Complex log-gamma.
//!
//! The binary64 path is a Lanczos sum (Godfrey's g = 607/128, 15 terms) with
//! an upward shift for `Re z < 1/2`. The double-double path is an independent
//! Stirling series and backs the connection coefficients and the tests.

use num_complex::Complex64;

use super::dd::{ComplexDD, DoubleDouble};
use super::SpecialFnError;

const POLE_TOL: f64 = 1e-12;

const LANCZOS_G_HALF: f64 = 5.242_187_5;
const LANCZOS_SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

/// True when `z` lies within `1e-12` of a nonpositive integer.
pub fn is_gamma_pole(z: Complex64) -> bool {
    z.im.abs() < POLE_TOL && z.re < POLE_TOL && (z.re - z.re.round()).abs() < POLE_TOL
}

fn lanczos_ln_gamma(z: Complex64) -> Complex64 {
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    for (j, c) in LANCZOS.iter().enumerate() {
        ser += *c / (z + (j + 1) as f64);
    }
    let tmp = z + LANCZOS_G_HALF;
    (z + 0.5) * tmp.ln() - tmp + (ser * LANCZOS_SQRT_2PI / z).ln()
}

/// Log-gamma on the principal branch (continuous in the upper and lower half
/// planes, real on the positive real axis).
///
/// For `|Im z| <= 50` the relative error of `exp(ln_gamma(z))` is below 1e-13.
pub fn ln_gamma(z: Complex64) -> Result<Complex64, SpecialFnError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(SpecialFnError::NonFinite("ln_gamma argument"));
    }
    if is_gamma_pole(z) {
        return Err(SpecialFnError::Pole { re: z.re, im: z.im });
    }
    if z.re >= 0.5 {
        return Ok(lanczos_ln_gamma(z));
    }
    if z.re >= -60.0 {
        // ln Γ(z) = ln Γ(z + N) - Σ ln(z + k)
        let n = (0.5 - z.re).ceil() as usize;
        let mut acc = lanczos_ln_gamma(z + n as f64);
        for k in 0..n {
            acc -= (z + k as f64).ln();
        }
        return Ok(acc);
    }
    // reflection; deep in the left half plane only the exponential matters
    let pi = std::f64::consts::PI;
    let s = (z * pi).sin();
    Ok(Complex64::new(pi.ln(), 0.0) - s.ln() - lanczos_ln_gamma(1.0 - z))
}

pub fn gamma(z: Complex64) -> Result<Complex64, SpecialFnError> {
    ln_gamma(z).map(|l| l.exp())
}

/// `1/Γ(z)`, entire: exactly zero at the poles of Γ.
pub fn recip_gamma(z: Complex64) -> Result<Complex64, SpecialFnError> {
    match ln_gamma(z) {
        Ok(l) => Ok((-l).exp()),
        Err(SpecialFnError::Pole { .. }) => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

/// Bernoulli numbers B_2 .. B_34 as exact rationals.
const BERNOULLI: [(f64, f64); 17] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174_611.0, 330.0),
    (854_513.0, 138.0),
    (-236_364_091.0, 2730.0),
    (8_553_103.0, 6.0),
    (-23_749_461_029.0, 870.0),
    (8_615_841_276_005.0, 14322.0),
    (-7_709_321_041_217.0, 510.0),
    (2_577_687_858_367.0, 6.0),
];

const STIRLING_MIN_RE: f64 = 24.0;

fn stirling_dd(w: ComplexDD) -> ComplexDD {
    let two_pi = DoubleDouble::PI.mul_f64(2.0);
    let half_ln_2pi = two_pi.ln().mul_f64(0.5);
    let ln_w = w.ln();
    let half = ComplexDD::from_real(DoubleDouble::from_f64(0.5));
    let mut acc = (w - half) * ln_w - w + ComplexDD::from_real(half_ln_2pi);

    let inv = ComplexDD::ONE / w;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut prev = f64::INFINITY;
    for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
        let m = 2.0 * (k + 1) as f64;
        let coef = DoubleDouble::from_f64(num) / (DoubleDouble::from_f64(den) * (m * (m - 1.0)));
        let term = pow.scale(coef);
        let mag = term.abs_f64();
        acc += term;
        if mag < 1e-34 * acc.abs_f64() || mag > prev {
            break;
        }
        prev = mag;
        pow *= inv2;
    }
    acc
}

/// Double-double log-gamma via the Stirling series after an upward shift.
///
/// Same branch convention as [`ln_gamma`]. Intended for moderate arguments
/// (`Re z > -60`, `|Im z| <= 100`).
pub fn ln_gamma_dd(z: ComplexDD) -> Result<ComplexDD, SpecialFnError> {
    let zc = z.to_c64();
    if !(zc.re.is_finite() && zc.im.is_finite()) {
        return Err(SpecialFnError::NonFinite("ln_gamma_dd argument"));
    }
    if is_gamma_pole(zc) {
        return Err(SpecialFnError::Pole {
            re: zc.re,
            im: zc.im,
        });
    }
    let shift = if zc.re < STIRLING_MIN_RE {
        (STIRLING_MIN_RE - zc.re).ceil() as usize
    } else {
        0
    };
    let w = z + ComplexDD::from_real(DoubleDouble::from_f64(shift as f64));
    let mut acc = stirling_dd(w);
    for k in 0..shift {
        let zk = z + ComplexDD::from_real(DoubleDouble::from_f64(k as f64));
        acc = acc - zk.ln();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn simple_values() {
        assert!(ln_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(ln_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-15);
        let half = ln_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - 0.572_364_942_924_700_1).abs() < 1e-15);
        assert!(half.im.abs() < 1e-15);
        let g5 = gamma(c(5.0, 0.0)).unwrap();
        assert!((g5.re - 24.0).abs() < 1e-12);
    }

    #[test]
    fn poles_are_reported() {
        for k in 0..5 {
            let z = c(-(k as f64), 0.0);
            assert!(matches!(ln_gamma(z), Err(SpecialFnError::Pole { .. })));
            assert_eq!(recip_gamma(z).unwrap(), c(0.0, 0.0));
        }
        assert!(ln_gamma(c(-1.0 + 1e-13, 0.0)).is_err());
        assert!(ln_gamma(c(-1.0 + 1e-9, 0.0)).is_ok());
    }

    #[test]
    fn modulus_identity_on_imaginary_shift() {
        // |Γ(1 - ix)|² = πx / sinh(πx)
        for &x in &[0.1, 0.5, 1.0, 2.0, 4.5] {
            let g = gamma(c(1.0, -x)).unwrap();
            let expect = PI * x / (PI * x).sinh();
            assert!((g.norm_sqr() / expect - 1.0).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn left_half_plane_via_shift() {
        // Γ(-1/2) = -2√π
        let g = gamma(c(-0.5, 0.0)).unwrap();
        assert!((g.re + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(g.im.abs() < 1e-13);
        // reflection Γ(z)Γ(1-z) = π / sin(πz)
        let z = c(-3.3, 1.7);
        let lhs = gamma(z).unwrap() * gamma(1.0 - z).unwrap();
        let rhs = PI / (z * PI).sin();
        assert!((lhs / rhs - 1.0).norm() < 1e-13);
    }

    #[test]
    fn branch_is_continuous_across_shift_boundary() {
        // ln Γ(z+1) = ln Γ(z) + ln z holds exactly on the continuous branch
        for &(re, im) in &[(0.4, 3.0), (-2.7, 5.0), (-10.2, -8.0), (0.49, -40.0)] {
            let z = c(re, im);
            let lhs = ln_gamma(z + 1.0).unwrap();
            let rhs = ln_gamma(z).unwrap() + z.ln();
            assert!((lhs - rhs).norm() < 1e-11, "{z}");
        }
    }

    #[test]
    fn binary64_agrees_with_double_double_stirling() {
        for &(re, im) in &[
            (0.5, 0.0),
            (1.0, -0.5),
            (1.0, -4.5),
            (3.3, 12.0),
            (0.7, 50.0),
            (0.7, -50.0),
            (-4.2, 3.1),
            (25.0, 1.0),
        ] {
            let z = c(re, im);
            let lf = ln_gamma(z).unwrap();
            let ld = ln_gamma_dd(ComplexDD::from_c64(z)).unwrap().to_c64();
            // relative error in Γ equals the absolute error in ln Γ
            assert!((lf - ld).norm() < 1e-13, "{z}: {lf} vs {ld}");
        }
    }

    #[test]
    fn double_double_reaches_extra_digits() {
        // ln Γ(1/2) = ln √π, to be compared in double-double
        let l = ln_gamma_dd(ComplexDD::from_c64(c(0.5, 0.0))).unwrap();
        let expect = DoubleDouble::PI.sqrt().ln();
        assert!((l.re - expect).abs().to_f64() < 1e-30);
        assert!(l.im.abs().to_f64() < 1e-30);
        // Γ(6) = 120
        let l6 = ln_gamma_dd(ComplexDD::from_c64(c(6.0, 0.0))).unwrap();
        assert!((l6.re.exp() - 120.0).abs().to_f64() < 1e-27);
    }
}
