//! Parabolic cylinder functions D_ν(ζ) for complex order and argument.
//!
//! Three evaluation paths:
//!
//! * Taylor series about the origin, generated by the differential equation
//!   `W'' = (ζ²/4 - ν - 1/2) W` and seeded with `D_ν(0)`, `D_ν'(0)`. The terms
//!   are carried in double-double, seeds included, so the series stays
//!   accurate through the cancellation of e^{|ζ|²/2} size seen inside the
//!   crossover radius.
//! * The large-|ζ| expansion in one of three overlapping sectors of arg ζ.
//!   Outside the principal sector it includes the second exponential
//!   `√(2π)/Γ(-ν) e^{±iπν} e^{ζ²/4} ζ^{-ν-1}`.
//! * Inward continuation: the expansion at |ζ| = 10 on the same ray carried
//!   inward by Taylor steps of the differential equation. Used only when the
//!   series cancels badly and the continuation's own estimate is better, e.g.
//!   for orders outside the double-double gamma range.
//!
//! Orders are expected to be moderate (|ν| up to about 5); uniform large-order
//! expansions are not provided.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dd::{ComplexDD, DoubleDouble};
use super::gamma::{is_gamma_pole, ln_gamma, ln_gamma_dd, recip_gamma};
use super::SpecialFnError;

/// Series/asymptotic switch radius.
pub const CROSSOVER_RADIUS: f64 = 8.0;
/// Radius at which inward continuation starts.
pub const CONTINUATION_RADIUS: f64 = 10.0;

const CONTINUATION_STEP: f64 = 0.5;
const MAX_CANCELLATION: f64 = 50.0;
const SEED_REL_ERROR: f64 = 1e-15;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Order ν of a parabolic cylinder function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcfOrder(Complex64);

impl PcfOrder {
    pub fn new(nu: Complex64) -> Result<Self, SpecialFnError> {
        if nu.re.is_finite() && nu.im.is_finite() {
            Ok(Self(nu))
        } else {
            Err(SpecialFnError::NonFinite("PCF order"))
        }
    }

    pub fn real(nu: f64) -> Result<Self, SpecialFnError> {
        Self::new(Complex64::new(nu, 0.0))
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }

    fn shifted(self, by: f64) -> Self {
        Self(self.0 + by)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Asymptotic,
    /// Inward Taylor stepping from the asymptotic region along a ray.
    Continuation,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Asymptotic => "asymptotic",
            Method::Continuation => "continuation",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcfEvaluation {
    pub value: Complex64,
    pub method_used: Method,
    pub est_abs_error: f64,
}

/// Sector of arg ζ in which one large-|ζ| representation holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    /// |arg ζ| < 3π/4
    Principal,
    /// π/4 < arg ζ < 5π/4
    Upper,
    /// -5π/4 < arg ζ < -π/4
    Lower,
}

impl Sector {
    pub const ALL: [Sector; 3] = [Sector::Principal, Sector::Upper, Sector::Lower];

    /// Open range of the argument, in radians.
    pub fn range(self) -> (f64, f64) {
        match self {
            Sector::Principal => (-3.0 * FRAC_PI_4, 3.0 * FRAC_PI_4),
            Sector::Upper => (FRAC_PI_4, 5.0 * FRAC_PI_4),
            Sector::Lower => (-5.0 * FRAC_PI_4, -FRAC_PI_4),
        }
    }

    /// The determination of arg ζ lying inside this sector, if any.
    ///
    /// On the boundary rays of the principal sector the argument is accepted
    /// (up to rounding of `atan2`) so that points such as `(-1+i)t` can be
    /// evaluated with Upper or Principal as the caller decides.
    pub fn branch_arg(self, zeta: Complex64) -> Option<f64> {
        let theta = zeta.arg();
        let (lo, hi) = self.range();
        [theta, theta + 2.0 * PI, theta - 2.0 * PI]
            .into_iter()
            .find(|&t| t > lo - 1e-14 && t < hi + 1e-14)
    }

    /// Angular distance from arg ζ to the nearest sector boundary.
    pub fn boundary_distance(self, zeta: Complex64) -> Option<f64> {
        let (lo, hi) = self.range();
        self.branch_arg(zeta).map(|t| (t - lo).min(hi - t))
    }

    /// Sector whose boundary is farthest from arg ζ (ties go to the earlier
    /// entry of [`Sector::ALL`]).
    pub fn for_argument(zeta: Complex64) -> Sector {
        let mut best = Sector::Principal;
        let mut best_d = f64::NEG_INFINITY;
        for s in Sector::ALL {
            if let Some(d) = s.boundary_distance(zeta) {
                if d > best_d + 1e-12 {
                    best = s;
                    best_d = d;
                }
            }
        }
        best
    }
}

/// Arithmetic used for the series terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    /// binary64 terms, compensated (two-sum) accumulation.
    Binary64,
    /// double-double terms and accumulation.
    DoubleDouble,
}

#[derive(Clone, Copy, Debug)]
pub struct SeriesOptions {
    pub max_terms: usize,
    /// Required bound on the truncated tail relative to the size of the
    /// summed terms.
    pub rel_tol: f64,
    pub precision: Precision,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            max_terms: 600,
            rel_tol: 1e-16,
            precision: Precision::DoubleDouble,
        }
    }
}

/// `D_ν(0)` and `D_ν'(0)` with the relative error of each.
///
/// Computed in double-double where the Stirling path covers the gamma
/// arguments, which matters when the series cancels heavily.
fn origin_values(nu: Complex64) -> Result<(ComplexDD, ComplexDD, f64), SpecialFnError> {
    let g0 = (1.0 - nu) * 0.5;
    let g1 = -nu * 0.5;
    let in_range = |z: Complex64| z.re > -50.0 && z.im.abs() <= 100.0;
    if in_range(g0) && in_range(g1) {
        let ln2 = DoubleDouble::LN_2;
        let ln_sqrt_pi = DoubleDouble::PI.ln().ldexp(-1);
        let nu_dd = ComplexDD::from_c64(nu);
        let half = ComplexDD::from_real(DoubleDouble::from_f64(0.5));
        // 2^p √π / Γ(g)
        let one = |g: ComplexDD, p: ComplexDD| -> Result<ComplexDD, SpecialFnError> {
            if is_gamma_pole(g.to_c64()) {
                return Ok(ComplexDD::ZERO);
            }
            let lg = ln_gamma_dd(g)?;
            Ok((p.scale(ln2) + ComplexDD::from_real(ln_sqrt_pi) - lg).exp())
        };
        let d0 = one((ComplexDD::ONE - nu_dd) * half, nu_dd * half)?;
        let d1 = -one(-nu_dd * half, (nu_dd + ComplexDD::ONE) * half)?;
        return Ok((d0, d1, 1e-30));
    }
    let sqrt_pi = PI.sqrt();
    let two = Complex64::new(2.0, 0.0);
    let d0 = two.powc(nu * 0.5) * sqrt_pi * recip_gamma(g0)?;
    let d1 = -two.powc((nu + 1.0) * 0.5) * sqrt_pi * recip_gamma(g1)?;
    Ok((
        ComplexDD::from_c64(d0),
        ComplexDD::from_c64(d1),
        SEED_REL_ERROR,
    ))
}

struct SeriesSums {
    even: ComplexDD,
    odd: ComplexDD,
    abs_terms: f64,
    tail: f64,
    terms: usize,
}

fn taylor_about_origin(
    nu: Complex64,
    zeta: Complex64,
    seeds: (ComplexDD, ComplexDD),
    opts: &SeriesOptions,
) -> SeriesSums {
    let round = |x: ComplexDD| match opts.precision {
        Precision::Binary64 => ComplexDD::from_c64(x.to_c64()),
        Precision::DoubleDouble => x,
    };
    let tiny = match opts.precision {
        Precision::Binary64 => 1e-18,
        Precision::DoubleDouble => 1e-33,
    };
    let p = ComplexDD::new(
        DoubleDouble::from_f64(nu.re) + 0.5,
        DoubleDouble::from_f64(nu.im),
    );
    let z = ComplexDD::from_c64(zeta);
    let r2 = zeta.norm_sqr();

    // c[k-2], c[k-1], c[k], c[k+1]
    let mut cm2 = ComplexDD::ZERO;
    let mut cm1 = ComplexDD::ZERO;
    let mut c0 = round(seeds.0);
    let mut c1 = round(seeds.1);
    let mut pow = ComplexDD::ONE;

    let mut even = ComplexDD::ZERO;
    let mut odd = ComplexDD::ZERO;
    let mut abs_terms = 0.0;
    let mut last;
    let mut k = 0usize;
    loop {
        // term k (coefficient c0) then term k+1 (coefficient c1)
        let t0 = round(c0 * pow);
        pow = round(pow * z);
        let t1 = round(c1 * pow);
        pow = round(pow * z);
        // k is even
        even += t0;
        odd += t1;
        let (m0, m1) = (t0.abs_f64(), t1.abs_f64());
        abs_terms += m0 + m1;
        last = [m0, m1];

        let kk = k as f64;
        let scale = (even.abs_f64() + odd.abs_f64()).max(1e-300);
        // past k ≈ |ζ|² consecutive ratios drop below 1/2
        let tail = 2.0 * (m0 + m1);
        if (kk >= r2 + 2.0 && tail <= tiny * scale) || (m0 == 0.0 && m1 == 0.0 && kk >= r2 + 2.0) {
            break;
        }
        if k + 2 >= opts.max_terms {
            break;
        }

        // advance by two: c[k+2], c[k+3]
        let n2 = round((cm2.scale_f64(0.25) - p * c0).div_f64((kk + 2.0) * (kk + 1.0)));
        let n3 = round((cm1.scale_f64(0.25) - p * c1).div_f64((kk + 3.0) * (kk + 2.0)));
        cm2 = c0;
        cm1 = c1;
        c0 = n2;
        c1 = n3;
        k += 2;
    }
    SeriesSums {
        even,
        odd,
        abs_terms,
        tail: 2.0 * (last[0] + last[1]),
        terms: k + 2,
    }
}

/// Maclaurin series of D_ν(ζ) with the default options and `terms` as the
/// term budget.
pub fn pcf_d_series(
    nu: PcfOrder,
    zeta: Complex64,
    terms: usize,
) -> Result<PcfEvaluation, SpecialFnError> {
    pcf_d_series_with(
        nu,
        zeta,
        &SeriesOptions {
            max_terms: terms,
            ..SeriesOptions::default()
        },
    )
}

pub fn pcf_d_series_with(
    nu: PcfOrder,
    zeta: Complex64,
    opts: &SeriesOptions,
) -> Result<PcfEvaluation, SpecialFnError> {
    series_eval(nu, zeta, opts).map(|(e, _)| e)
}

/// Series evaluation plus the cancellation ratio `(|even| + |odd|) / |value|`.
fn series_eval(
    nu: PcfOrder,
    zeta: Complex64,
    opts: &SeriesOptions,
) -> Result<(PcfEvaluation, f64), SpecialFnError> {
    if opts.max_terms < 1 {
        return Err(SpecialFnError::InvalidTerms);
    }
    if !(zeta.re.is_finite() && zeta.im.is_finite()) {
        return Err(SpecialFnError::NonFinite("PCF argument"));
    }
    let nu = nu.value();
    let (s0, s1, seed_err) = origin_values(nu)?;
    let seed_err = match opts.precision {
        Precision::Binary64 => seed_err.max(1.2e-16),
        Precision::DoubleDouble => seed_err,
    };
    let sums = taylor_about_origin(nu, zeta, (s0, s1), opts);
    let value = (sums.even + sums.odd).to_c64();
    let parts = sums.even.abs_f64() + sums.odd.abs_f64();
    if sums.tail > opts.rel_tol * parts.max(value.norm()).max(1e-300) {
        return Err(SpecialFnError::NonConvergence {
            bound: sums.tail,
            tolerance: opts.rel_tol,
        });
    }
    let arith = match opts.precision {
        Precision::Binary64 => 1.2e-16,
        Precision::DoubleDouble => 1e-31,
    } * sums.terms as f64;
    let est =
        sums.tail + seed_err * parts + arith * sums.abs_terms + f64::EPSILON * 0.5 * value.norm();
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(SpecialFnError::NonFinite("PCF series value"));
    }
    let cancellation = parts / value.norm().max(1e-300);
    Ok((
        PcfEvaluation {
            value,
            method_used: Method::Series,
            est_abs_error: est,
        },
        cancellation,
    ))
}

/// Partial sum of `Σ_s (±1)^s (μ)_{2s} / (s! (2ζ²)^s)` truncated before the
/// smallest term. Returns the sum and the magnitude of the first omitted term.
fn asymptotic_tail_sum(
    mu: Complex64,
    inv_two_z2: Complex64,
    alternating: bool,
    max_terms: usize,
) -> (Complex64, f64) {
    let sign = if alternating { -1.0 } else { 1.0 };
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev = 1.0;
    for s in 0..max_terms {
        let sf = s as f64;
        let next =
            term * (mu + 2.0 * sf) * (mu + 2.0 * sf + 1.0) * inv_two_z2 * (sign / (sf + 1.0));
        let m = next.norm();
        if m == 0.0 {
            return (sum, 0.0);
        }
        if m >= prev {
            return (sum, m);
        }
        if m < 1e-18 * sum.norm() {
            return (sum + next, m * 0.5);
        }
        sum += next;
        term = next;
        prev = m;
    }
    let sf = max_terms as f64;
    let omitted = term * (mu + 2.0 * sf) * (mu + 2.0 * sf + 1.0) * inv_two_z2 / (sf + 1.0);
    (sum, omitted.norm())
}

/// Large-|ζ| expansion of D_ν(ζ) in the given sector, at most `order` terms
/// per series (optimal truncation applies first).
pub fn pcf_d_asymptotic(
    nu: PcfOrder,
    zeta: Complex64,
    sector: Sector,
    order: usize,
) -> Result<PcfEvaluation, SpecialFnError> {
    if !(zeta.re.is_finite() && zeta.im.is_finite()) {
        return Err(SpecialFnError::NonFinite("PCF argument"));
    }
    if zeta.norm() == 0.0 {
        return Err(SpecialFnError::SectorMismatch { arg: 0.0, sector });
    }
    let theta = sector
        .branch_arg(zeta)
        .ok_or(SpecialFnError::SectorMismatch {
            arg: zeta.arg(),
            sector,
        })?;
    let nu = nu.value();
    let log_z = Complex64::new(zeta.norm().ln(), theta);
    let z2 = zeta * zeta;
    let inv_two_z2 = 1.0 / (2.0 * z2);

    let (s1, e1) = asymptotic_tail_sum(-nu, inv_two_z2, true, order);
    let pref1 = (-z2 * 0.25 + nu * log_z).exp();
    let term1 = pref1 * s1;
    let mut value = term1;
    let mut est = pref1.norm() * e1;

    // second exponential, present outside the principal sector
    let second = |phase_sign: f64| -> Result<(Complex64, f64, f64), SpecialFnError> {
        if super::gamma::is_gamma_pole(-nu) {
            return Ok((Complex64::new(0.0, 0.0), 0.0, 0.0));
        }
        let i_pi_nu = Complex64::new(0.0, phase_sign * PI) * nu;
        let pref2 = (z2 * 0.25 + (-nu - 1.0) * log_z + i_pi_nu - ln_gamma(-nu)?).exp() * SQRT_2PI;
        let (s2, e2) = asymptotic_tail_sum(nu + 1.0, inv_two_z2, false, order);
        Ok((pref2 * s2, pref2.norm() * e2, pref2.norm()))
    };

    match sector {
        Sector::Principal => {
            // near the Stokes lines arg ζ = ±π/2 the omitted exponential is
            // comparable to the truncation error
            if (theta.abs() - PI / 2.0).abs() < PI / 8.0 {
                let (_, _, m2) = second(theta.signum())?;
                est += m2;
            }
        }
        Sector::Upper | Sector::Lower => {
            let sign = if sector == Sector::Upper { 1.0 } else { -1.0 };
            let (t2, e2, _) = second(sign)?;
            value -= t2;
            est += e2;
            if theta.abs() > 7.0 * PI / 8.0 {
                est += pref1.norm();
            }
        }
    }
    // optimal truncation leaves a few times the first omitted term
    est *= ASYMPTOTIC_EST_FACTOR;
    // rounding of the exponent: ζ²/4 and ν ln ζ carry relative errors of eps
    let exponent_scale = 0.5 * z2.norm() + (nu * log_z).norm() + 4.0;
    est += f64::EPSILON * exponent_scale * (term1.norm() + value.norm());
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(SpecialFnError::NonFinite("PCF asymptotic value"));
    }
    Ok(PcfEvaluation {
        value,
        method_used: Method::Asymptotic,
        est_abs_error: est,
    })
}

const DEFAULT_ASYMPTOTIC_ORDER: usize = 200;
const ASYMPTOTIC_EST_FACTOR: f64 = 8.0;

fn asymptotic_auto(nu: PcfOrder, zeta: Complex64) -> Result<PcfEvaluation, SpecialFnError> {
    pcf_d_asymptotic(
        nu,
        zeta,
        Sector::for_argument(zeta),
        DEFAULT_ASYMPTOTIC_ORDER,
    )
}

/// One Taylor step of `W'' = (ζ²/4 - ν - 1/2) W` from `center` by `h`.
fn taylor_step(
    p: ComplexDD,
    center: ComplexDD,
    h: ComplexDD,
    w: ComplexDD,
    dw: ComplexDD,
) -> (ComplexDD, ComplexDD) {
    let q0 = (center * center).scale_f64(0.25) - p;
    let q1 = center.scale_f64(0.5);
    let mut a = [ComplexDD::ZERO, ComplexDD::ZERO, w, dw]; // a[k-3..=k]
                                                           // a[2] index holds a_{k-1}, a[3] holds a_k; start with k = 1
    let mut hp = h; // h^k
    let mut val = w + dw * h;
    let mut der = dw;
    let mut k = 1usize;
    let scale = w.abs_f64().max(1e-300);
    let mut small = 0;
    while k < 200 {
        // a_{k+1} = (q0 a_{k-1} + q1 a_{k-2} + q2 a_{k-3}) / ((k+1) k)
        let kf = k as f64;
        let next = (q0 * a[2] + q1 * a[1] + a[0].scale_f64(0.25)).div_f64((kf + 1.0) * kf);
        der += (next * hp).scale_f64(kf + 1.0);
        hp *= h;
        let t = next * hp;
        val += t;
        a = [a[1], a[2], a[3], next];
        k += 1;
        if t.abs_f64() < 1e-34 * scale.max(val.abs_f64()) {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    (val, der)
}

/// Relative growth of the other solution of the PCF equation against D_ν
/// along the ray from `start` to `zeta`; seed errors scale with it.
fn contamination_growth(nu: Complex64, start: Complex64, zeta: Complex64) -> f64 {
    let ratio = (start.norm() / zeta.norm().max(1e-300)).powf(2.0 * nu.re + 1.0);
    let exp = ((zeta * zeta - start * start).re * 0.5).min(700.0).exp();
    (ratio * exp).max(1.0)
}

fn continuation(nu: PcfOrder, zeta: Complex64) -> Result<PcfEvaluation, SpecialFnError> {
    let theta = zeta.arg();
    let start = Complex64::from_polar(CONTINUATION_RADIUS, theta);
    let sector = Sector::for_argument(start);
    let d0 = pcf_d_asymptotic(nu, start, sector, DEFAULT_ASYMPTOTIC_ORDER)?;
    let d1 = pcf_d_asymptotic(nu.shifted(1.0), start, sector, DEFAULT_ASYMPTOTIC_ORDER)?;
    // D_ν' = ζ/2 D_ν - D_{ν+1}
    let dprime = start * 0.5 * d0.value - d1.value;
    let rel0 = d0.est_abs_error / d0.value.norm().max(1e-300)
        + d1.est_abs_error / d1.value.norm().max(1e-300);

    let nu_c = nu.value();
    let p = ComplexDD::new(
        DoubleDouble::from_f64(nu_c.re) + 0.5,
        DoubleDouble::from_f64(nu_c.im),
    );
    let path = zeta - start;
    let steps = (path.norm() / CONTINUATION_STEP).ceil().max(1.0) as usize;
    let h = ComplexDD::from_c64(path / steps as f64);
    let mut center = ComplexDD::from_c64(start);
    let mut w = ComplexDD::from_c64(d0.value);
    let mut dw = ComplexDD::from_c64(dprime);
    for _ in 0..steps {
        let (nw, ndw) = taylor_step(p, center, h, w, dw);
        w = nw;
        dw = ndw;
        center += h;
    }
    let value = w.to_c64();
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(SpecialFnError::NonFinite("PCF continuation value"));
    }
    Ok(PcfEvaluation {
        value,
        method_used: Method::Continuation,
        est_abs_error: (rel0 + 1e-15) * contamination_growth(nu_c, start, zeta) * value.norm(),
    })
}

/// D_ν(ζ), choosing the evaluation path from |ζ| and the cancellation seen in
/// the series.
pub fn pcf_d(nu: PcfOrder, zeta: Complex64) -> Result<PcfEvaluation, SpecialFnError> {
    if !(zeta.re.is_finite() && zeta.im.is_finite()) {
        return Err(SpecialFnError::NonFinite("PCF argument"));
    }
    let r = zeta.norm();
    if r >= CROSSOVER_RADIUS {
        return asymptotic_auto(nu, zeta);
    }
    let (series, cancellation) = series_eval(nu, zeta, &SeriesOptions::default())?;
    if cancellation > MAX_CANCELLATION && r > 2.0 {
        let cont = continuation(nu, zeta)?;
        if cont.est_abs_error < series.est_abs_error {
            return Ok(cont);
        }
    }
    Ok(series)
}

/// D_ν'(ζ) from `D_ν' = ζ/2 D_ν - D_{ν+1}`.
pub fn pcf_d_prime(nu: PcfOrder, zeta: Complex64) -> Result<PcfEvaluation, SpecialFnError> {
    let d0 = pcf_d(nu, zeta)?;
    let d1 = pcf_d(nu.shifted(1.0), zeta)?;
    Ok(PcfEvaluation {
        value: zeta * 0.5 * d0.value - d1.value,
        method_used: d0.method_used,
        est_abs_error: zeta.norm() * 0.5 * d0.est_abs_error + d1.est_abs_error,
    })
}
