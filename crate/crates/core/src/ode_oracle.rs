//! Adaptive Dormand-Prince 5(4) integration of the real system
//! `x' = (a - t) y`, `y' = (a + t) x`, i.e. of `i w' + t w + a conj(w) = 0`
//! with `w = x + i y`.
//!
//! In the rotating frame the state is `u = w e^{-i t²/2}`. Substituting
//! `w = u e^{i t²/2}` in `w' = i (t w + a conj(w))` cancels the `t w` term and
//! leaves `u' = i a conj(u) e^{-i t²}`, whose solution has no `t²/2` phase.
//!
//! The tolerances target the endpoint rather than each step: a step of size
//! `h` over a span `L` may commit a local error of `tol·sqrt(h/L)`, so that
//! local errors adding up like a random walk total about `tol`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics::{chirp, wkb_minus, AsymptoticsError};

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("empty integration span (t0 = t1 = {0})")]
    EmptySpan(f64),
    #[error("non-finite {what} at t = {t}")]
    NonFinite { what: &'static str, t: f64 },
    #[error("step size underflow at t = {t} (needed h < {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("stop time {0} lies outside the integration span")]
    StopOutsideSpan(f64),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Integrate `(x, y)` directly.
    Lab,
    /// Integrate `u = w e^{-i t²/2}`.
    Rotating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub frame: Frame,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.25,
            min_step: 1e-12,
            frame: Frame::Rotating,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn with_frame(self, frame: Frame) -> Self {
        Self { frame, ..self }
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if !pos(self.rel_tol) || !pos(self.abs_tol) {
            return Err(OdeError::InvalidConfig("tolerances must be positive"));
        }
        if !pos(self.min_step) || !pos(self.max_step) || self.min_step > self.max_step {
            return Err(OdeError::InvalidConfig("need 0 < min_step <= max_step"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl TrajectoryPoint {
    pub fn w(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub config_used: IntegratorConfig,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> TrajectoryPoint {
        *self
            .points
            .last()
            .expect("trajectory holds the initial point")
    }

    /// Point whose time equals `t` exactly (stop times are hit exactly).
    pub fn find(&self, t: f64) -> Option<TrajectoryPoint> {
        self.points.iter().find(|p| p.t == t).copied()
    }

    /// Points with `lo <= t <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> impl Iterator<Item = &TrajectoryPoint> {
        self.points.iter().filter(move |p| p.t >= lo && p.t <= hi)
    }

    /// CSV with columns `t, x, y, |w|, arg w`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), OdeError> {
        let mut wr = csv::Writer::from_writer(out);
        wr.write_record(["t", "x", "y", "|w|", "arg w"])?;
        for p in &self.points {
            let w = p.w();
            let row = [p.t, p.x, p.y, w.norm(), w.arg()];
            wr.write_record(row.iter().map(|x| format!("{x:.16e}")))?;
        }
        wr.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

type State = [f64; 2];

fn rhs(frame: Frame, a: f64, t: f64, s: State) -> State {
    match frame {
        Frame::Lab => [(a - t) * s[1], (a + t) * s[0]],
        Frame::Rotating => {
            // i a conj(u) e^{-i t²}
            let f = Complex64::new(0.0, a) * Complex64::new(s[0], -s[1]) * chirp(t, -1.0);
            [f.re, f.im]
        }
    }
}

fn to_state(frame: Frame, t: f64, w: Complex64) -> State {
    match frame {
        Frame::Lab => [w.re, w.im],
        Frame::Rotating => {
            let u = w * chirp(t, -0.5);
            [u.re, u.im]
        }
    }
}

fn to_w(frame: Frame, t: f64, s: State) -> Complex64 {
    match frame {
        Frame::Lab => Complex64::new(s[0], s[1]),
        Frame::Rotating => Complex64::new(s[0], s[1]) * chirp(t, 0.5),
    }
}

// Dormand-Prince 5(4) tableau
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// difference between the fifth- and fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;
const PI_BETA: f64 = 0.04;
// the scaled error behaves like h^{4.5}
const ERR_ORDER: f64 = 4.5;
const PI_ALPHA: f64 = 1.0 / ERR_ORDER - 0.75 * PI_BETA;

struct Stepper {
    frame: Frame,
    a: f64,
    config: IntegratorConfig,
    /// `|t1 - t0|`
    span: f64,
}

impl Stepper {
    /// One trial step; returns the new state, its derivative, and the scaled
    /// error norm.
    fn trial(&self, t: f64, y: State, k1: State, h: f64) -> (State, State, f64) {
        let mut k = [[0.0; 2]; 7];
        k[0] = k1;
        let mut y_new = y;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let c = A[s][j];
                if c != 0.0 {
                    ys[0] += h * c * kj[0];
                    ys[1] += h * c * kj[1];
                }
            }
            k[s] = rhs(self.frame, self.a, t + C[s] * h, ys);
            if s == 6 {
                y_new = ys;
            }
        }
        let mut acc = 0.0;
        for i in 0..2 {
            let err: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * h;
            let sc = self.config.abs_tol + self.config.rel_tol * y[i].abs().max(y_new[i].abs());
            acc += (err / sc).powi(2);
        }
        (
            y_new,
            k[6],
            (acc / 2.0).sqrt() * (self.span / h.abs()).sqrt(),
        )
    }
}

/// Integrate from `t0` to `t1` (either direction), starting from `w0`.
pub fn integrate(
    a: f64,
    t0: f64,
    t1: f64,
    w0: Complex64,
    config: IntegratorConfig,
) -> Result<Trajectory, OdeError> {
    integrate_with_stops(a, t0, t1, w0, config, &[])
}

/// As [`integrate`], additionally landing exactly on each time in `stops`
/// so that [`Trajectory::find`] returns them.
pub fn integrate_with_stops(
    a: f64,
    t0: f64,
    t1: f64,
    w0: Complex64,
    config: IntegratorConfig,
    stops: &[f64],
) -> Result<Trajectory, OdeError> {
    config.validate()?;
    if !(a.is_finite() && t0.is_finite() && t1.is_finite()) {
        return Err(OdeError::NonFinite {
            what: "parameter",
            t: t0,
        });
    }
    if !(w0.re.is_finite() && w0.im.is_finite()) {
        return Err(OdeError::NonFinite {
            what: "initial value",
            t: t0,
        });
    }
    if t0 == t1 {
        return Err(OdeError::EmptySpan(t0));
    }
    let dir = (t1 - t0).signum();
    let mut targets: Vec<f64> = Vec::with_capacity(stops.len() + 1);
    for &s in stops {
        if (s - t0) * dir < 0.0 || (t1 - s) * dir < 0.0 || !s.is_finite() {
            return Err(OdeError::StopOutsideSpan(s));
        }
        if s != t0 {
            targets.push(s);
        }
    }
    targets.push(t1);
    targets.sort_by(|x, y| (dir * x).total_cmp(&(dir * y)));
    targets.dedup();

    let st = Stepper {
        frame: config.frame,
        a,
        config,
        span: (t1 - t0).abs(),
    };
    let mut t = t0;
    let mut y = to_state(config.frame, t0, w0);
    let mut k1 = rhs(config.frame, a, t, y);
    let mut points = vec![TrajectoryPoint {
        t: t0,
        x: w0.re,
        y: w0.im,
    }];
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut h = (0.01 / (1.0 + t0.abs() + a.abs())).clamp(config.min_step, config.max_step);
    let mut err_prev: f64 = 1e-4;

    for &target in &targets {
        while (target - t) * dir > 0.0 {
            let remaining = (target - t).abs();
            let mut landing = false;
            let mut step = h.min(config.max_step);
            if step >= remaining {
                step = remaining;
                landing = true;
            } else if step > 0.5 * remaining && step < remaining {
                // avoid leaving a sliver before the target
                step = 0.5 * remaining;
            }
            let (y_new, k_new, err) = st.trial(t, y, k1, dir * step);
            if !err.is_finite() || !(y_new[0].is_finite() && y_new[1].is_finite()) {
                if step <= config.min_step {
                    return Err(OdeError::NonFinite { what: "state", t });
                }
                h = (step * FAC_MIN).max(config.min_step);
                rejected += 1;
                continue;
            }
            if err <= 1.0 {
                t = if landing { target } else { t + dir * step };
                y = y_new;
                k1 = k_new;
                accepted += 1;
                let w = to_w(config.frame, t, y);
                points.push(TrajectoryPoint {
                    t,
                    x: w.re,
                    y: w.im,
                });
                let fac = if err == 0.0 {
                    FAC_MAX
                } else {
                    SAFETY * err.powf(-PI_ALPHA) * err_prev.powf(PI_BETA)
                };
                err_prev = err.max(1e-4);
                // a forced landing step says nothing about the natural size
                let base = if landing { h.max(step) } else { step };
                h = (base * fac.clamp(FAC_MIN, FAC_MAX)).min(config.max_step);
            } else {
                rejected += 1;
                if step <= config.min_step {
                    return Err(OdeError::StepUnderflow { t, h: step });
                }
                let fac = (SAFETY * err.powf(-1.0 / ERR_ORDER)).clamp(FAC_MIN, 1.0);
                h = (step * fac).max(config.min_step);
            }
        }
    }
    Ok(Trajectory {
        points,
        config_used: config,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}

/// Initial value at `t0 < 0` for incoming amplitude `v`: the two-term
/// expansion, whose O(1/t0) part is exact so the seed error is O(t0⁻²).
pub fn wkb_initial_data(a: f64, t0: f64, v: Complex64) -> Result<Complex64, OdeError> {
    Ok(wkb_minus(t0, a, v)?)
}
