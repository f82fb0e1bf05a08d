//! Checks of the exact solution and of the scattering map against the
//! integrator.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics::{scattering_map, wkb_minus, wkb_phase_factor, AsymptoticsError};
use crate::closed_form::{closed_form_w, ClosedFormError, ClosedFormState};
use crate::ode_oracle::{
    integrate_with_stops, wkb_initial_data, Frame, IntegratorConfig, OdeError, Trajectory,
};

/// Smallest half-span accepted by [`verify_connection`].
pub const MIN_T: f64 = 20.0;
/// Minimum number of trajectory samples inside a fit window.
pub const MIN_FIT_SAMPLES: usize = 50;
/// Floor for the denominator of the relative error.
pub const REL_ERROR_FLOOR: f64 = 1e-300;

/// Fits whose basis functions have normalised overlap above this are rejected.
const MAX_BASIS_OVERLAP: f64 = 1.0 - 1e-6;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error("fit window [{lo}, {hi}] must satisfy 0 < lo < hi")]
    InvalidWindow { lo: f64, hi: f64 },
    #[error("fit window holds {found} samples, need at least {needed}")]
    TooFewSamples { found: usize, needed: usize },
    #[error("fit basis is numerically collinear over the window (overlap {overlap})")]
    IllConditioned { overlap: f64 },
    #[error("T = {t} is below the minimum {min}")]
    TBelowMinimum { t: f64, min: f64 },
    #[error("{0}")]
    InvalidArgument(&'static str),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Least-squares fit `w ≈ W e^{iφ} + (c/t) e^{-iφ}` with
/// `φ = t²/2 - (a²/2) ln t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeFit {
    #[serde(rename = "W")]
    pub w: Complex64,
    pub counter: Complex64,
    pub residual_rms: f64,
    pub t_window: (f64, f64),
}

/// Fit the outgoing waveform over `window` (times `> 0`; the asymptotic form
/// is only meaningful well beyond the origin). Samples are weighted by the
/// trapezoid rule so that a non-uniform step sequence does not bias the fit.
pub fn fit_outgoing_amplitude(
    traj: &Trajectory,
    a: f64,
    window: (f64, f64),
) -> Result<AmplitudeFit, VerifyError> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(VerifyError::InvalidWindow { lo, hi });
    }
    let mut pts: Vec<(f64, Complex64)> = traj.window(lo, hi).map(|p| (p.t, p.w())).collect();
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    fit_samples(&pts, a, window)
}

/// As [`fit_outgoing_amplitude`] on explicit `(t, w)` samples sorted by `t`.
pub fn fit_samples(
    pts: &[(f64, Complex64)],
    a: f64,
    window: (f64, f64),
) -> Result<AmplitudeFit, VerifyError> {
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(VerifyError::TooFewSamples {
            found: pts.len(),
            needed: MIN_FIT_SAMPLES,
        });
    }
    let n = pts.len();
    let weight = |k: usize| {
        let left = if k == 0 { pts[0].0 } else { pts[k - 1].0 };
        let right = if k + 1 == n {
            pts[n - 1].0
        } else {
            pts[k + 1].0
        };
        0.5 * (right - left)
    };

    let zero = Complex64::new(0.0, 0.0);
    let (mut g11, mut g22, mut g12) = (0.0, 0.0, zero);
    let (mut r1, mut r2) = (zero, zero);
    let mut basis = Vec::with_capacity(n);
    for (k, &(t, w)) in pts.iter().enumerate() {
        let e = wkb_phase_factor(t, a);
        let b1 = e;
        let b2 = e.conj() / t;
        let wk = weight(k);
        g11 += wk * b1.norm_sqr();
        g22 += wk * b2.norm_sqr();
        g12 += wk * b1.conj() * b2;
        r1 += wk * b1.conj() * w;
        r2 += wk * b2.conj() * w;
        basis.push((b1, b2, wk));
    }
    let overlap = g12.norm_sqr() / (g11 * g22);
    if !overlap.is_finite() || overlap > MAX_BASIS_OVERLAP {
        return Err(VerifyError::IllConditioned { overlap });
    }
    // [[g11, g12], [conj g12, g22]] [W, c]^T = [r1, r2]^T
    let det = g11 * g22 - g12.norm_sqr();
    let w_fit = (g22 * r1 - g12 * r2) / det;
    let c_fit = (g11 * r2 - g12.conj() * r1) / det;

    let (mut ss, mut wsum) = (0.0, 0.0);
    for (&(_, w), &(b1, b2, wk)) in pts.iter().zip(&basis) {
        ss += wk * (w - w_fit * b1 - c_fit * b2).norm_sqr();
        wsum += wk;
    }
    Ok(AmplitudeFit {
        w: w_fit,
        counter: c_fit,
        residual_rms: (ss / wsum).sqrt(),
        t_window: window,
    })
}

/// Two-run extrapolation over `(T, factor·T)` assuming a remainder `K T^{-order}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Richardson {
    pub factor: f64,
    pub order: f64,
}

impl Default for Richardson {
    fn default() -> Self {
        Self {
            factor: 2.0,
            order: 2.0,
        }
    }
}

impl Richardson {
    pub fn combine(&self, coarse: Complex64, fine: Complex64) -> Complex64 {
        let r = self.factor.powf(self.order);
        (r * fine - coarse) / (r - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// The fit window is `[window_fraction·T, T]`.
    pub window_fraction: f64,
    pub richardson: Option<Richardson>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            window_fraction: 0.75,
            richardson: None,
        }
    }
}

impl VerifyOptions {
    pub fn with_richardson() -> Self {
        Self {
            richardson: Some(Richardson::default()),
            ..Self::default()
        }
    }
}

/// Integrator and extrapolation settings echoed into each report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub frame: Frame,
    pub window_fraction: f64,
    pub richardson: Option<Richardson>,
}

impl ConfigEcho {
    fn new(config: &IntegratorConfig, opts: &VerifyOptions) -> Self {
        Self {
            rel_tol: config.rel_tol,
            abs_tol: config.abs_tol,
            max_step: config.max_step,
            min_step: config.min_step,
            frame: config.frame,
            window_fraction: opts.window_fraction,
            richardson: opts.richardson,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct VerificationReport {
    pub a: f64,
    pub V_in: Complex64,
    pub W_predicted: Complex64,
    pub W_measured: Complex64,
    pub rel_error: f64,
    pub config_echo: ConfigEcho,
    pub T_used: f64,
}

pub fn rel_error(measured: Complex64, predicted: Complex64) -> f64 {
    (measured - predicted).norm() / predicted.norm().max(REL_ERROR_FLOOR)
}

/// Phase advance between fit samples, in radians.
const FIT_PHASE_STEP: f64 = 0.1;

/// Uniform grid on `[lo, hi]` resolving the local frequency `hi` of the
/// waveform, so the fit does not depend on where the integrator stepped.
fn fit_grid(lo: f64, hi: f64) -> Vec<f64> {
    let h = FIT_PHASE_STEP / hi;
    let n = ((hi - lo) / h).ceil() as usize;
    (0..=n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .collect()
}

/// Outgoing amplitude measured from one run seeded at `-t` and fitted on
/// `[window_fraction·t, t]`.
pub fn measure_outgoing(
    a: f64,
    v: Complex64,
    t: f64,
    config: &IntegratorConfig,
    window_fraction: f64,
) -> Result<AmplitudeFit, VerifyError> {
    if !(window_fraction > 0.0 && window_fraction < 1.0) {
        return Err(VerifyError::InvalidArgument(
            "window fraction must lie in (0, 1)",
        ));
    }
    let w0 = wkb_initial_data(a, -t, v)?;
    let lo = window_fraction * t;
    let traj = integrate_with_stops(a, -t, t, w0, *config, &fit_grid(lo, t))?;
    fit_outgoing_amplitude(&traj, a, (lo, t))
}

pub fn verify_connection(
    a: f64,
    v: Complex64,
    t: f64,
    config: IntegratorConfig,
) -> Result<VerificationReport, VerifyError> {
    verify_connection_with(a, v, t, config, &VerifyOptions::default())
}

/// Seed at `-T`, integrate to `T`, fit, and compare with the scattering map.
/// With Richardson enabled a second run at `factor·T` is combined with the
/// first.
pub fn verify_connection_with(
    a: f64,
    v: Complex64,
    t: f64,
    config: IntegratorConfig,
    opts: &VerifyOptions,
) -> Result<VerificationReport, VerifyError> {
    if !a.is_finite() || !(v.re.is_finite() && v.im.is_finite()) {
        return Err(VerifyError::InvalidArgument(
            "non-finite coupling or amplitude",
        ));
    }
    if t.is_nan() || t < MIN_T || !t.is_finite() {
        return Err(VerifyError::TBelowMinimum { t, min: MIN_T });
    }
    config.validate()?;
    let predicted = scattering_map(v, a)?;
    let coarse = measure_outgoing(a, v, t, &config, opts.window_fraction)?;
    let measured = match opts.richardson {
        None => coarse.w,
        Some(r) => {
            let fine = measure_outgoing(a, v, r.factor * t, &config, opts.window_fraction)?;
            r.combine(coarse.w, fine.w)
        }
    };
    Ok(VerificationReport {
        a,
        V_in: v,
        W_predicted: predicted,
        W_measured: measured,
        rel_error: rel_error(measured, predicted),
        config_echo: ConfigEcho::new(&config, opts),
        T_used: t,
    })
}

/// `|closed_form_w(U, t) - wkb_minus(t, a, U)|` at `t_probe < 0`.
pub fn verify_theorem1_matching(a: f64, u: Complex64, t_probe: f64) -> Result<f64, VerifyError> {
    if t_probe.is_nan() || t_probe >= 0.0 {
        return Err(VerifyError::InvalidArgument("probe time must be negative"));
    }
    let state = ClosedFormState::new(a, u)?;
    let exact = closed_form_w(state, t_probe)?;
    let wkb = wkb_minus(t_probe, a, u)?;
    Ok((exact - wkb).norm())
}

/// Least-squares slope of `ln gap` against `ln |t|` over the probe times.
pub fn matching_decay_slope(a: f64, u: Complex64, probes: &[f64]) -> Result<f64, VerifyError> {
    if probes.len() < 2 {
        return Err(VerifyError::InvalidArgument(
            "need at least two probe times",
        ));
    }
    let mut xs = Vec::with_capacity(probes.len());
    let mut ys = Vec::with_capacity(probes.len());
    for &t in probes {
        xs.push(t.abs().ln());
        ys.push(verify_theorem1_matching(a, u, t)?.ln());
    }
    Ok(log_log_slope(&xs, &ys))
}

fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Scattering pair recovered from the runs `V = 1` and `V = i`:
/// `W(1) = α + β`, `W(i) = i(α - β)`.
pub fn measure_scattering_pair(
    a: f64,
    t: f64,
    config: IntegratorConfig,
    opts: &VerifyOptions,
) -> Result<(Complex64, Complex64), VerifyError> {
    let one = verify_connection_with(a, Complex64::new(1.0, 0.0), t, config, opts)?;
    let i = verify_connection_with(a, Complex64::i(), t, config, opts)?;
    let w1 = one.W_measured;
    let wi = i.W_measured;
    let alpha = (w1 - Complex64::i() * wi) * 0.5;
    let beta = (w1 + Complex64::i() * wi) * 0.5;
    Ok((alpha, beta))
}

pub fn sweep(
    a_values: &[f64],
    v: Complex64,
    t: f64,
    config: IntegratorConfig,
) -> Result<Vec<Result<VerificationReport, VerifyError>>, VerifyError> {
    sweep_with(a_values, v, t, config, &VerifyOptions::default())
}

/// Independent runs per coupling, in input order. A failing item does not
/// stop the others.
pub fn sweep_with(
    a_values: &[f64],
    v: Complex64,
    t: f64,
    config: IntegratorConfig,
    opts: &VerifyOptions,
) -> Result<Vec<Result<VerificationReport, VerifyError>>, VerifyError> {
    if a_values.is_empty() {
        return Err(VerifyError::InvalidArgument("coupling list is empty"));
    }
    Ok(a_values
        .par_iter()
        .map(|&a| verify_connection_with(a, v, t, config, opts))
        .collect())
}

pub fn write_reports_json<W: Write>(
    reports: &[VerificationReport],
    out: W,
) -> Result<(), VerifyError> {
    serde_json::to_writer_pretty(out, reports)?;
    Ok(())
}

/// CSV summary; numbers carry 17 significant digits.
pub fn write_reports_csv<W: Write>(
    reports: &[VerificationReport],
    out: W,
) -> Result<(), VerifyError> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record([
        "a",
        "reV",
        "imV",
        "reW_pred",
        "imW_pred",
        "reW_meas",
        "imW_meas",
        "rel_error",
        "T",
    ])?;
    for r in reports {
        let row = [
            r.a,
            r.V_in.re,
            r.V_in.im,
            r.W_predicted.re,
            r.W_predicted.im,
            r.W_measured.re,
            r.W_measured.im,
            r.rel_error,
            r.T_used,
        ];
        wr.write_record(row.iter().map(|x| format!("{x:.16e}")))?;
    }
    wr.flush().map_err(csv::Error::from)?;
    Ok(())
}
