//! Large-|t| behaviour and the scattering map.
//!
//! For `|t| → ∞` solutions of `i w' + t w + a conj(w) = 0` take the form
//!
//! ```text
//! w = φ₀ e^{iΩ} + (ψ₁ / t) e^{-iΩ} + O(t⁻²),   Ω = t²/2 + ω ln|t|,
//! ```
//!
//! with `ψ₁ = -a conj(φ₀) / 2` and `ω = -a²/2`. An incoming amplitude `V` at
//! `t → -∞` leaves as `W = α V + β conj(V)` at `t → +∞`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special_fn::dd::{ComplexDD, DoubleDouble};
use crate::special_fn::{ln_gamma_dd, SpecialFnError};

/// Default distance from the origin beyond which the two-term form is used.
pub const T_FAR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error("t = {t} is not on the {side} side")]
    Domain { t: f64, side: WkbSide },
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    SpecialFn(#[from] SpecialFnError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WkbSide {
    MinusInfinity,
    PlusInfinity,
}

impl WkbSide {
    fn contains(self, t: f64) -> bool {
        match self {
            WkbSide::MinusInfinity => t < 0.0,
            WkbSide::PlusInfinity => t > 0.0,
        }
    }
}

impl fmt::Display for WkbSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WkbSide::MinusInfinity => "t < 0",
            WkbSide::PlusInfinity => "t > 0",
        })
    }
}

/// The leading constant of the expansion together with the side it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WkbAmplitude {
    pub u: Complex64,
    pub side: WkbSide,
}

impl WkbAmplitude {
    pub fn new(u: Complex64, side: WkbSide) -> Result<Self, AsymptoticsError> {
        if !(u.re.is_finite() && u.im.is_finite()) {
            return Err(AsymptoticsError::NonFinite("WKB amplitude"));
        }
        Ok(Self { u, side })
    }
}

/// `exp(i k t²)` with `k t²` formed and reduced modulo 2π in double-double,
/// so the phase stays accurate to ~1e-16 absolute even when `t²` is large.
pub fn chirp(t: f64, k: f64) -> Complex64 {
    let arg = (DoubleDouble::from_f64(t) * t).mul_f64(k);
    let two_pi = DoubleDouble::PI.ldexp(1);
    let turns = (arg.hi / two_pi.hi).round();
    let r = (arg - two_pi.mul_f64(turns)).to_f64();
    let (s, c) = r.sin_cos();
    Complex64::new(c, s)
}

/// `exp(iΩ(t))` with `Ω = t²/2 - (a²/2) ln|t|`.
pub fn wkb_phase_factor(t: f64, a: f64) -> Complex64 {
    chirp(t, 0.5) * Complex64::from_polar(1.0, -0.5 * a * a * t.abs().ln())
}

/// Two-term expansion built from its leading constant.
///
/// The lower-order constants are obtained by balancing the powers of `t`
/// after substitution and are checked against those balances on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbExpansion {
    pub a: f64,
    pub amplitude: WkbAmplitude,
    /// Coefficient of `e^{-iΩ}/t`.
    pub psi1: Complex64,
    /// Coefficient of `ln|t|` in the phase.
    pub omega: f64,
}

impl WkbExpansion {
    pub fn new(a: f64, amplitude: WkbAmplitude) -> Result<Self, AsymptoticsError> {
        if !a.is_finite() {
            return Err(AsymptoticsError::NonFinite("coupling"));
        }
        let phi0 = amplitude.u;
        // O(1) in e^{-iΩ}: 2ψ₁ + a conj(φ₀) = 0
        let psi1 = -0.5 * a * phi0.conj();
        // O(1/t) in e^{iΩ}: ωφ₀ = a conj(ψ₁)
        let omega = -0.5 * a * a;

        let scale = (a.abs() + 1.0).powi(2) * (phi0.norm() + f64::MIN_POSITIVE);
        assert!(
            (2.0 * psi1 + a * phi0.conj()).norm() <= 4.0 * f64::EPSILON * scale,
            "counter-rotating balance violated"
        );
        assert!(
            (omega * phi0 - a * psi1.conj()).norm() <= 4.0 * f64::EPSILON * scale,
            "phase balance violated"
        );
        // O(t) in e^{iΩ}: Ω' = t + ω/t must cancel t w at leading order
        for &t in &[2.0, 7.5, 31.0] {
            let lead = Self::phase_rate_with(omega, t) - t;
            assert!((lead * t - omega).abs() <= 1e-12 * (1.0 + omega.abs()));
        }
        Ok(Self {
            a,
            amplitude,
            psi1,
            omega,
        })
    }

    fn phase_rate_with(omega: f64, t: f64) -> f64 {
        t + omega / t
    }

    /// Ω'(t).
    pub fn phase_rate(&self, t: f64) -> f64 {
        Self::phase_rate_with(self.omega, t)
    }

    /// Ω(t); for display only, evaluation uses [`wkb_phase_factor`].
    pub fn phase(&self, t: f64) -> f64 {
        0.5 * t * t + self.omega * t.abs().ln()
    }

    fn check(&self, t: f64) -> Result<(), AsymptoticsError> {
        if !t.is_finite() || !self.amplitude.side.contains(t) {
            return Err(AsymptoticsError::Domain {
                t,
                side: self.amplitude.side,
            });
        }
        Ok(())
    }

    /// Leading term only.
    pub fn leading(&self, t: f64) -> Result<Complex64, AsymptoticsError> {
        self.check(t)?;
        Ok(self.amplitude.u * wkb_phase_factor(t, self.a))
    }

    /// Leading plus counter-rotating term.
    pub fn eval(&self, t: f64) -> Result<Complex64, AsymptoticsError> {
        self.check(t)?;
        let e = wkb_phase_factor(t, self.a);
        Ok(self.amplitude.u * e + self.psi1 / t * e.conj())
    }

    /// Time derivative of [`eval`](Self::eval), exact for the two-term form.
    pub fn eval_derivative(&self, t: f64) -> Result<Complex64, AsymptoticsError> {
        self.check(t)?;
        let e = wkb_phase_factor(t, self.a);
        let rate = self.phase_rate(t);
        let i = Complex64::i();
        let lead = i * rate * self.amplitude.u * e;
        let counter = (-i * rate / t - 1.0 / (t * t)) * self.psi1 * e.conj();
        Ok(lead + counter)
    }

    /// Magnitude of `i w' + t w + a conj(w)` for the two-term form. Everything
    /// cancels except `(ω - i) ψ₁ / t²` in front of `e^{-iΩ}`.
    pub fn residual_magnitude(&self, t: f64) -> f64 {
        self.psi1.norm() * Complex64::new(self.omega, -1.0).norm() / (t * t)
    }
}

/// Two-term expansion at `t < 0`.
pub fn wkb_minus(t: f64, a: f64, u: Complex64) -> Result<Complex64, AsymptoticsError> {
    WkbExpansion::new(a, WkbAmplitude::new(u, WkbSide::MinusInfinity)?)?.eval(t)
}

/// Leading outgoing waveform `W e^{iΩ(t)}` at `t > 0`.
pub fn wkb_plus_leading(t: f64, a: f64, w: Complex64) -> Result<Complex64, AsymptoticsError> {
    WkbExpansion::new(a, WkbAmplitude::new(w, WkbSide::PlusInfinity)?)?.leading(t)
}

/// Incoming-to-outgoing map `V ↦ α V + β conj(V)`.
///
/// The coefficients are held in double-double so that
/// `|α|² - |β|² = 1` can be checked to absolute precision even when
/// `|α|² = e^{πa²}` is large.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringCoefficients {
    pub a: f64,
    alpha: ComplexDD,
    beta: ComplexDD,
}

impl ScatteringCoefficients {
    pub fn alpha(&self) -> Complex64 {
        self.alpha.to_c64()
    }

    pub fn beta(&self) -> Complex64 {
        self.beta.to_c64()
    }

    pub fn alpha_dd(&self) -> ComplexDD {
        self.alpha
    }

    pub fn beta_dd(&self) -> ComplexDD {
        self.beta
    }

    /// `|α|² - |β|²`, the determinant of [`transfer_matrix`](Self::transfer_matrix).
    pub fn determinant(&self) -> f64 {
        (self.alpha.norm_sqr() - self.beta.norm_sqr()).to_f64()
    }

    /// Map acting on the pair `(W, conj W)`.
    pub fn transfer_matrix(&self) -> [[Complex64; 2]; 2] {
        let (al, be) = (self.alpha(), self.beta());
        [[al, be], [be.conj(), al.conj()]]
    }

    pub fn apply(&self, v: Complex64) -> Complex64 {
        let v = ComplexDD::from_c64(v);
        (self.alpha * v + self.beta * v.conj()).to_c64()
    }
}

/// `α = e^{πa²/2}`, `β = e^{i(π - 2a² ln 2)/4 + πa²/4} a √π / Γ(1 - i a²/2)`.
pub fn scattering_coefficients(a: f64) -> Result<ScatteringCoefficients, AsymptoticsError> {
    if !a.is_finite() {
        return Err(AsymptoticsError::NonFinite("coupling"));
    }
    let pi = DoubleDouble::PI;
    let a2 = DoubleDouble::from_f64(a) * a;
    let alpha = ComplexDD::from_real((pi * a2).ldexp(-1).exp());
    if a == 0.0 {
        return Ok(ScatteringCoefficients {
            a,
            alpha,
            beta: ComplexDD::ZERO,
        });
    }
    let gamma_arg = ComplexDD::new(DoubleDouble::ONE, -a2.ldexp(-1));
    let ln_g = ln_gamma_dd(gamma_arg)?;
    let phase = (pi - (a2 * DoubleDouble::LN_2).ldexp(1)).ldexp(-2);
    let log_mod = (pi * a2).ldexp(-2) + (pi * a2).ln().ldexp(-1);
    let ln_beta = ComplexDD::new(log_mod, phase) - ln_g;
    let mut beta = ln_beta.exp();
    if a < 0.0 {
        beta = -beta;
    }
    if !beta.is_finite() {
        return Err(AsymptoticsError::NonFinite("beta"));
    }
    Ok(ScatteringCoefficients { a, alpha, beta })
}

/// Outgoing amplitude for incoming amplitude `v`.
pub fn scattering_map(v: Complex64, a: f64) -> Result<Complex64, AsymptoticsError> {
    Ok(scattering_coefficients(a)?.apply(v))
}
