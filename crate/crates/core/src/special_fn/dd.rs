//! Double-double ("doubled precision") arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving
//! roughly 32 significant decimal digits. Only what the series, oracle and
//! connection-coefficient paths need is provided: the four operations, `sqrt`,
//! `exp`, `ln`, `sin_cos`, `atan2`, and a complex type built on top.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Real double-double number.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DD({:e} + {:e})", self.hi, self.lo)
    }
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const LN_2: Self = Self {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    /// Division by a binary64 value without rounding the divisor's reciprocal.
    #[inline]
    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p1, p2) = two_prod(q1, b);
        let (s, e) = two_sum(self.hi, -p1);
        let e = e - p2 + self.lo;
        let q2 = (s + e) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }
    }

    /// Exact scaling by a power of two.
    #[inline]
    pub fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Self {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    #[inline]
    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::ZERO
            } else {
                Self::from_f64(f64::NAN)
            };
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let ax_dd = Self::from_f64(ax);
        let corr = (self - ax_dd.sqr()).hi * (x * 0.5);
        ax_dd + corr
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.7 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        let k = (self.hi / Self::LN_2.hi).round();
        let r = (self - Self::LN_2.mul_f64(k)).ldexp(-10);
        // expm1(r) by Taylor, |r| < 3.4e-4
        let mut term = r;
        let mut sum = r;
        let mut n = 1.0;
        loop {
            n += 1.0;
            term = (term * r).div_f64(n);
            sum += term;
            if term.hi.abs() < 1e-36 * sum.hi.abs().max(1e-300) || n > 30.0 {
                break;
            }
        }
        // (1 + s)^2 - 1 = s (s + 2), ten times
        for _ in 0..10 {
            sum = sum * (sum + 2.0);
        }
        (sum + 1.0).ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(if self.hi == 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::NAN
            });
        }
        let y = Self::from_f64(self.hi.ln());
        y + self * (-y).exp() - 1.0
    }

    /// `(sin x, cos x)`; accurate for moderate `|x|` (argument reduction uses a
    /// double-double pi).
    pub fn sin_cos(self) -> (Self, Self) {
        let half_pi = Self::PI.mul_f64(0.5);
        let k = (self.hi / half_pi.hi).round();
        let r = self - half_pi.mul_f64(k);
        let r2 = r.sqr();

        let mut s_term = r;
        let mut s = r;
        let mut c_term = Self::ONE;
        let mut c = Self::ONE;
        let mut n = 1.0;
        loop {
            // sin: r^(2j+1)/(2j+1)!, cos: r^(2j)/(2j)!
            c_term = -(c_term * r2).div_f64(n * (n + 1.0));
            s_term = -(s_term * r2).div_f64((n + 1.0) * (n + 2.0));
            c += c_term;
            s += s_term;
            n += 2.0;
            if c_term.hi.abs() < 1e-36 && s_term.hi.abs() < 1e-36 || n > 60.0 {
                break;
            }
        }
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn atan2(y: Self, x: Self) -> Self {
        let theta0 = y.hi.atan2(x.hi);
        let t0 = Self::from_f64(theta0);
        let (s, c) = t0.sin_cos();
        let num = y * c - x * s;
        let den = x * c + y * s;
        t0 + num / den
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Add<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Sub<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: f64) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: f64) -> Self {
        self.mul_f64(b)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 } + q3
    }
}

impl Div<f64> for DoubleDouble {
    type Output = Self;
    fn div(self, b: f64) -> Self {
        self.div_f64(b)
    }
}

impl AddAssign for DoubleDouble {
    #[inline]
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl SubAssign for DoubleDouble {
    #[inline]
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}

impl MulAssign for DoubleDouble {
    #[inline]
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}

/// Complex number with double-double parts.
#[derive(Clone, Copy, Default, PartialEq, Debug)]
pub struct ComplexDD {
    pub re: DoubleDouble,
    pub im: DoubleDouble,
}

impl ComplexDD {
    pub const ZERO: Self = Self {
        re: DoubleDouble::ZERO,
        im: DoubleDouble::ZERO,
    };
    pub const ONE: Self = Self {
        re: DoubleDouble::ONE,
        im: DoubleDouble::ZERO,
    };

    #[inline]
    pub fn new(re: DoubleDouble, im: DoubleDouble) -> Self {
        Self { re, im }
    }

    #[inline]
    pub fn from_c64(z: Complex64) -> Self {
        Self {
            re: DoubleDouble::from_f64(z.re),
            im: DoubleDouble::from_f64(z.im),
        }
    }

    #[inline]
    pub fn from_real(x: DoubleDouble) -> Self {
        Self {
            re: x,
            im: DoubleDouble::ZERO,
        }
    }

    #[inline]
    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
        }
    }

    /// Multiplication by the imaginary unit.
    #[inline]
    pub fn mul_i(self) -> Self {
        Self {
            re: -self.im,
            im: self.re,
        }
    }

    #[inline]
    pub fn scale(self, s: DoubleDouble) -> Self {
        Self {
            re: self.re * s,
            im: self.im * s,
        }
    }

    #[inline]
    pub fn scale_f64(self, s: f64) -> Self {
        Self {
            re: self.re.mul_f64(s),
            im: self.im.mul_f64(s),
        }
    }

    #[inline]
    pub fn div_f64(self, s: f64) -> Self {
        Self {
            re: self.re.div_f64(s),
            im: self.im.div_f64(s),
        }
    }

    #[inline]
    pub fn norm_sqr(self) -> DoubleDouble {
        self.re.sqr() + self.im.sqr()
    }

    pub fn abs(self) -> DoubleDouble {
        self.norm_sqr().sqrt()
    }

    /// Cheap magnitude estimate in binary64.
    #[inline]
    pub fn abs_f64(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    pub fn exp(self) -> Self {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        Self {
            re: m * c,
            im: m * s,
        }
    }

    /// Principal logarithm.
    pub fn ln(self) -> Self {
        Self {
            re: self.norm_sqr().ln().mul_f64(0.5),
            im: DoubleDouble::atan2(self.im, self.re),
        }
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl From<Complex64> for ComplexDD {
    fn from(z: Complex64) -> Self {
        Self::from_c64(z)
    }
}

impl Neg for ComplexDD {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Add for ComplexDD {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        Self {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl Sub for ComplexDD {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        Self {
            re: self.re - b.re,
            im: self.im - b.im,
        }
    }
}

impl Mul for ComplexDD {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        Self {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl Div for ComplexDD {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let den = b.norm_sqr();
        let num = self * b.conj();
        Self {
            re: num.re / den,
            im: num.im / den,
        }
    }
}

impl AddAssign for ComplexDD {
    #[inline]
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl MulAssign for ComplexDD {
    #[inline]
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd_close(a: DoubleDouble, b: DoubleDouble, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol * b.abs().to_f64().max(1.0)
    }

    #[test]
    fn arithmetic_carries_extra_digits() {
        let third = DoubleDouble::ONE / DoubleDouble::from_f64(3.0);
        let back = third * 3.0;
        assert!((back - 1.0).abs().to_f64() < 1e-31);
        // 1 + 2^-80 survives in double-double but not in binary64
        let tiny = DoubleDouble::ONE.ldexp(-80);
        let s = DoubleDouble::ONE + tiny;
        assert_eq!(s.hi, 1.0);
        assert_eq!(s.lo, 2f64.powi(-80));
    }

    #[test]
    fn sqrt_of_two_squares_back() {
        let r = DoubleDouble::from_f64(2.0).sqrt();
        assert!((r.sqr() - 2.0).abs().to_f64() < 1e-31);
    }

    #[test]
    fn exp_ln_inverse() {
        for &x in &[-20.0, -1.5, -1e-3, 0.0, 0.3, 1.0, 7.25, 40.0] {
            let d = DoubleDouble::from_f64(x);
            let back = d.exp().ln();
            assert!(dd_close(back, d, 1e-30), "x = {x}: {back:?}");
        }
        // e^1 reference digits 2.71828182845904523536028747135266
        let e = DoubleDouble::ONE.exp();
        let e_ref = DoubleDouble::new(std::f64::consts::E, 1.445_646_891_729_250_2e-16);
        assert!(dd_close(e, e_ref, 1e-31));
    }

    #[test]
    fn exp_of_ln2_is_two() {
        let two = DoubleDouble::LN_2.exp();
        assert!((two - 2.0).abs().to_f64() < 1e-31);
    }

    #[test]
    fn sin_cos_identities() {
        for &x in &[-9.0, -2.0, 0.1, 0.785, 1.0, 3.0, 10.0, 100.0] {
            let (s, c) = DoubleDouble::from_f64(x).sin_cos();
            assert!((s.sqr() + c.sqr() - 1.0).abs().to_f64() < 1e-30);
            assert!((s.to_f64() - x.sin()).abs() < 1e-15);
            assert!((c.to_f64() - x.cos()).abs() < 1e-15);
        }
        let (s, c) = DoubleDouble::PI.div_f64(6.0).sin_cos();
        assert!((s - 0.5).abs().to_f64() < 1e-31);
        assert!((c.sqr() - 0.75).abs().to_f64() < 1e-31);
    }

    #[test]
    fn atan2_recovers_angle() {
        for &t in &[-3.0, -1.0, 0.2, 1.5, 3.1] {
            let th = DoubleDouble::from_f64(t);
            let (s, c) = th.sin_cos();
            let back = DoubleDouble::atan2(s.mul_f64(2.5), c.mul_f64(2.5));
            assert!((back - th).abs().to_f64() < 1e-30, "{t}");
        }
    }

    #[test]
    fn complex_exp_ln_roundtrip() {
        let z = ComplexDD::from_c64(Complex64::new(0.7, -2.3));
        let back = z.ln().exp();
        assert!((back - z).abs().to_f64() < 1e-30);
        let q = z / z;
        assert!((q - ComplexDD::ONE).abs().to_f64() < 1e-31);
    }
}
