use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use resonance_core::ode_oracle::{Frame, IntegratorConfig};

/// Exact solution, asymptotics and connection formulas for
/// `i w' + t w + a conj(w) = 0`.
#[derive(Debug, Parser)]
#[command(name = "resonance", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the closed-form solution on a time grid.
    Eval(EvalArgs),
    /// Scattering coefficients and the outgoing amplitude for one input.
    Scatter(ScatterArgs),
    /// Reproduce the connection formula by direct integration.
    Verify(VerifyArgs),
    /// Evaluate a parabolic cylinder function D_nu(zeta).
    Pcf(PcfArgs),
    /// Integrate the equation and emit the trajectory.
    Integrate(IntegrateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameArg {
    Lab,
    Rotating,
}

impl From<FrameArg> for Frame {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Lab => Frame::Lab,
            FrameArg::Rotating => Frame::Rotating,
        }
    }
}

/// Parses `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let mut parts = s.split(',');
    let (Some(re), Some(im), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(format!("expected \"re,im\", got {s:?}"));
    };
    let num = |p: &str| -> Result<f64, String> {
        let x: f64 = p
            .trim()
            .parse()
            .map_err(|_| format!("{p:?} is not a number"))?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(format!("{p:?} is not finite"))
        }
    };
    Ok(Complex64::new(num(re)?, num(im)?))
}

fn parse_finite(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        Ok(_) => Err(format!("{s:?} is not finite")),
        Err(_) => Err(format!("{s:?} is not a number")),
    }
}

#[derive(Debug, Args)]
pub struct FormatArg {
    #[arg(long, value_enum, default_value_t = OutputFormat::Pretty)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_finite)]
    pub a: f64,
    /// Incoming amplitude as "re,im".
    #[arg(long = "U", allow_hyphen_values = true, value_parser = parse_complex)]
    pub u: Complex64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_finite)]
    pub t_min: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_finite)]
    pub t_max: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_finite)]
    pub step: f64,
    #[command(flatten)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_finite)]
    pub a: f64,
    /// Incoming amplitude as "re,im".
    #[arg(long = "V", allow_hyphen_values = true, value_parser = parse_complex)]
    pub v: Complex64,
    #[command(flatten)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct ToleranceArgs {
    #[arg(long, value_parser = parse_finite)]
    pub rel_tol: Option<f64>,
    #[arg(long, value_parser = parse_finite)]
    pub abs_tol: Option<f64>,
    #[arg(long, value_parser = parse_finite)]
    pub max_step: Option<f64>,
    #[arg(long, value_parser = parse_finite)]
    pub min_step: Option<f64>,
    #[arg(long, value_enum)]
    pub frame: Option<FrameArg>,
}

impl ToleranceArgs {
    pub fn config(&self) -> IntegratorConfig {
        let d = IntegratorConfig::default();
        IntegratorConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_step: self.max_step.unwrap_or(d.max_step),
            min_step: self.min_step.unwrap_or(d.min_step),
            frame: self.frame.map_or(d.frame, Frame::from),
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated couplings.
    #[arg(
        long,
        allow_hyphen_values = true,
        value_delimiter = ',',
        required = true,
        value_parser = parse_finite
    )]
    pub a: Vec<f64>,
    #[arg(long = "V", allow_hyphen_values = true, value_parser = parse_complex, default_value = "1,0")]
    pub v: Complex64,
    #[arg(long = "T", value_parser = parse_finite, default_value_t = 40.0)]
    pub t: f64,
    /// Largest acceptable rel_error.
    #[arg(long, value_parser = parse_finite, default_value_t = 1e-3)]
    pub threshold: f64,
    /// Extrapolate over runs at T and 2T.
    #[arg(long)]
    pub richardson: bool,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(flatten)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct PcfArgs {
    /// Order as "re,im".
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub nu: Complex64,
    /// Argument as "re,im".
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub zeta: Complex64,
    #[command(flatten)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("start").required(true).args(["w0", "v"])))]
pub struct IntegrateArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_finite)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_finite)]
    pub t0: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_finite)]
    pub t1: f64,
    /// Initial value w(t0) as "re,im".
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub w0: Option<Complex64>,
    /// Incoming amplitude; seeds w(t0) from the two-term expansion (t0 < 0).
    #[arg(long = "V", allow_hyphen_values = true, value_parser = parse_complex)]
    pub v: Option<Complex64>,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(flatten)]
    pub format: FormatArg,
}
