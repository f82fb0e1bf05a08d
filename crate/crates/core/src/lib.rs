//! Exact solution, WKB asymptotics and connection formulas for the local
//! parametric resonance equation
//!
//! ```text
//! i w'(t) + t w(t) + a conj(w(t)) = 0,   a real,
//! ```
//!
//! together with an independent adaptive Runge-Kutta oracle and a harness
//! that checks the connection formula against raw integration.

pub mod asymptotics;
pub mod closed_form;
pub mod ode_oracle;
pub mod special_fn;
pub mod verify;

pub use num_complex::Complex64;

pub use asymptotics::{
    scattering_coefficients, scattering_map, wkb_minus, wkb_plus_leading, ScatteringCoefficients,
    WkbAmplitude, WkbSide,
};
pub use closed_form::{closed_form_w, ClosedFormState, ResonanceParams, SolutionCoefficients};
pub use ode_oracle::{integrate, Frame, IntegratorConfig, Trajectory, TrajectoryPoint};
pub use special_fn::{pcf_d, Method, PcfEvaluation, PcfOrder, Sector};
pub use verify::{AmplitudeFit, VerificationReport};
