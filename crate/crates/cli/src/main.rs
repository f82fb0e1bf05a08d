mod args;
mod output;

use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use num_complex::Complex64;
use resonance_core::asymptotics::{scattering_coefficients, AsymptoticsError};
use resonance_core::closed_form::{closed_form_w, ClosedFormState};
use resonance_core::ode_oracle::{integrate, wkb_initial_data, OdeError};
use resonance_core::special_fn::{pcf_d, PcfOrder};
use resonance_core::verify::{
    sweep_with, write_reports_csv, write_reports_json, VerifyError, VerifyOptions, MIN_T,
};
use thiserror::Error;

use args::{Cli, Command, EvalArgs, IntegrateArgs, OutputFormat, PcfArgs, ScatterArgs, VerifyArgs};
use output::{sig10, Cell, Table};

const THREADS_VAR: &str = "RESONANCE_THREADS";
const MAX_GRID_POINTS: f64 = 1e7;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 3,
        }
    }
}

fn numeric(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

fn classify_ode(e: OdeError) -> CliError {
    match e {
        OdeError::InvalidConfig(_)
        | OdeError::EmptySpan(_)
        | OdeError::StopOutsideSpan(_)
        | OdeError::Asymptotics(AsymptoticsError::Domain { .. }) => CliError::Usage(e.to_string()),
        e => numeric(e),
    }
}

fn classify_verify(e: VerifyError) -> CliError {
    match e {
        VerifyError::Ode(e) => classify_ode(e),
        VerifyError::TBelowMinimum { .. } | VerifyError::InvalidArgument(_) => {
            CliError::Usage(e.to_string())
        }
        e => numeric(e),
    }
}

enum Outcome {
    Success,
    ThresholdExceeded,
}

fn parts(z: Complex64) -> [Cell; 2] {
    [Cell::Num(z.re), Cell::Num(z.im)]
}

fn cmd_eval(args: &EvalArgs, out: &mut impl Write) -> Result<Outcome, CliError> {
    if args.step.is_nan() || args.step <= 0.0 {
        return Err(CliError::Usage("--step must be positive".into()));
    }
    if args.t_min.is_nan() || args.t_max.is_nan() || args.t_min >= args.t_max {
        return Err(CliError::Usage("need --t-min < --t-max".into()));
    }
    let span = (args.t_max - args.t_min) / args.step;
    if span > MAX_GRID_POINTS {
        return Err(CliError::Usage(format!(
            "grid would exceed {MAX_GRID_POINTS} points"
        )));
    }
    let n = (span * (1.0 + 1e-12)).floor() as usize;
    let state = ClosedFormState::new(args.a, args.u).map_err(numeric)?;
    let mut table = Table::new(vec!["t", "re_w", "im_w", "abs_w"]);
    for k in 0..=n {
        let t = args.t_min + k as f64 * args.step;
        let w = closed_form_w(state, t).map_err(numeric)?;
        table.push(vec![t.into(), w.re.into(), w.im.into(), w.norm().into()]);
    }
    table.write(args.format.format, out)?;
    Ok(Outcome::Success)
}

fn cmd_scatter(args: &ScatterArgs, out: &mut impl Write) -> Result<Outcome, CliError> {
    let s = scattering_coefficients(args.a).map_err(numeric)?;
    let w = s.apply(args.v);
    let mut table = Table::record(vec![
        "a",
        "reV",
        "imV",
        "re_alpha",
        "im_alpha",
        "re_beta",
        "im_beta",
        "reW",
        "imW",
        "determinant",
    ]);
    let mut row = vec![Cell::Num(args.a)];
    row.extend(parts(args.v));
    row.extend(parts(s.alpha()));
    row.extend(parts(s.beta()));
    row.extend(parts(w));
    row.push(Cell::Num(s.determinant()));
    table.push(row);
    table.write(args.format.format, out)?;
    Ok(Outcome::Success)
}

fn cmd_pcf(args: &PcfArgs, out: &mut impl Write) -> Result<Outcome, CliError> {
    let order = PcfOrder::new(args.nu).map_err(|e| CliError::Usage(e.to_string()))?;
    let e = pcf_d(order, args.zeta).map_err(numeric)?;
    let mut table = Table::record(vec!["re_value", "im_value", "method_used", "est_abs_error"]);
    table.push(vec![
        e.value.re.into(),
        e.value.im.into(),
        e.method_used.as_str().into(),
        e.est_abs_error.into(),
    ]);
    table.write(args.format.format, out)?;
    Ok(Outcome::Success)
}

fn cmd_verify(args: &VerifyArgs, out: &mut impl Write) -> Result<Outcome, CliError> {
    if args.t.is_nan() || args.t < MIN_T {
        return Err(CliError::Usage(format!(
            "--T {} is below the minimum {MIN_T}",
            args.t
        )));
    }
    if args.threshold.is_nan() || args.threshold <= 0.0 {
        return Err(CliError::Usage("--threshold must be positive".into()));
    }
    let config = args.tolerances.config();
    config.validate().map_err(classify_ode)?;
    let opts = if args.richardson {
        VerifyOptions::with_richardson()
    } else {
        VerifyOptions::default()
    };
    let results = sweep_with(&args.a, args.v, args.t, config, &opts).map_err(classify_verify)?;
    let mut reports = Vec::with_capacity(results.len());
    let mut failure = None;
    for (a, r) in args.a.iter().zip(results) {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => {
                eprintln!("a = {a}: {e}");
                failure.get_or_insert(classify_verify(e));
            }
        }
    }
    match args.format.format {
        OutputFormat::Json => {
            write_reports_json(&reports, &mut *out).map_err(numeric)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => write_reports_csv(&reports, &mut *out).map_err(numeric)?,
        OutputFormat::Pretty => {
            let mut table = Table::new(vec!["a", "V", "W_predicted", "W_measured", "rel_error"]);
            let z = |z: Complex64| {
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                Cell::Text(format!("{} {sign} {}i", sig10(z.re), sig10(z.im.abs())))
            };
            for r in &reports {
                table.push(vec![
                    r.a.into(),
                    z(r.V_in),
                    z(r.W_predicted),
                    z(r.W_measured),
                    r.rel_error.into(),
                ]);
            }
            table.write(OutputFormat::Pretty, &mut *out)?;
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    if reports.iter().all(|r| r.rel_error <= args.threshold) {
        Ok(Outcome::Success)
    } else {
        Ok(Outcome::ThresholdExceeded)
    }
}

fn cmd_integrate(args: &IntegrateArgs, out: &mut impl Write) -> Result<Outcome, CliError> {
    let config = args.tolerances.config();
    let w0 = match (args.w0, args.v) {
        (Some(w0), _) => w0,
        (None, Some(v)) => wkb_initial_data(args.a, args.t0, v).map_err(classify_ode)?,
        (None, None) => return Err(CliError::Usage("give --w0 or --V".into())),
    };
    let traj = integrate(args.a, args.t0, args.t1, w0, config).map_err(classify_ode)?;
    if args.format.format == OutputFormat::Csv {
        traj.write_csv(&mut *out).map_err(numeric)?;
        return Ok(Outcome::Success);
    }
    let mut table = Table::new(vec!["t", "x", "y", "abs_w", "arg_w"]);
    for p in &traj.points {
        let w = p.w();
        table.push(vec![
            p.t.into(),
            p.x.into(),
            p.y.into(),
            w.norm().into(),
            w.arg().into(),
        ]);
    }
    table.write(args.format.format, out)?;
    Ok(Outcome::Success)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("{THREADS_VAR}: {e}")))
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    configure_threads()?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let outcome = match &cli.command {
        Command::Eval(a) => cmd_eval(a, &mut out),
        Command::Scatter(a) => cmd_scatter(a, &mut out),
        Command::Verify(a) => cmd_verify(a, &mut out),
        Command::Pcf(a) => cmd_pcf(a, &mut out),
        Command::Integrate(a) => cmd_integrate(a, &mut out),
    };
    out.flush()?;
    outcome
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::ThresholdExceeded) => {
            eprintln!("rel_error above threshold");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
