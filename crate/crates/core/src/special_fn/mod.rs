//! Complex gamma and parabolic cylinder functions.

pub mod dd;
pub mod gamma;
pub mod pcf;

use thiserror::Error;

pub use gamma::{gamma, ln_gamma, ln_gamma_dd, recip_gamma};
pub use pcf::{
    pcf_d, pcf_d_asymptotic, pcf_d_prime, pcf_d_series, pcf_d_series_with, Method, PcfEvaluation,
    PcfOrder, Precision, Sector, SeriesOptions, CROSSOVER_RADIUS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFnError {
    #[error("gamma pole at {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("series did not converge: tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    NonConvergence { bound: f64, tolerance: f64 },
    #[error("arg {arg} is outside the {sector:?} sector")]
    SectorMismatch { arg: f64, sector: Sector },
    #[error("term count must be at least 1")]
    InvalidTerms,
}
