use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gmib::complex::{self, ComplexValue};
use gmib::error::{Error, Result};
use gmib::foxwright::{self, FoxWrightParams, SeriesResult};
use gmib::fraccalc::{self, real_pow, Direction, PowerSeriesFn, QuadratureResult};
use gmib::gmbessel::{self, GmibParams};
use gmib::harness::{self, GridSpec, IdentityReport, TolOverrides};
use gmib::identities::IdentityId;

#[derive(Parser)]
#[command(
    name = "gmib",
    version,
    about = "Generalized multiindex Bessel function: evaluation, fractional calculus, identity checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate J(z) for parameters in a JSON file.
    EvalGmib(EvalArgs),
    /// Evaluate a Fox–Wright function ₚΨ_q(z).
    EvalFw(EvalArgs),
    /// Riemann–Liouville integral of t^{δ−1}J(t) (left) or t^{−δ}J(1/t) (right).
    FracInt(FracArgs),
    /// Riemann–Liouville derivative of the same functions, by series transport.
    FracDiff(FracArgs),
    /// Sweep one identity over a grid.
    Verify(VerifyArgs),
    /// Sweep every identity.
    Report(ReportArgs),
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    params: PathBuf,
    /// Argument as `re,im` or `re`.
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Left,
    Right,
}

#[derive(Args)]
struct FracArgs {
    /// GMIB parameters; without them the function is the bare power.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Side::Left)]
    side: Side,
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    #[arg(long, allow_hyphen_values = true)]
    delta: String,
    #[arg(long)]
    x: f64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Args)]
struct SweepArgs {
    /// Grid JSON; omitted fields take the default grid.
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Relative tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    #[arg(long)]
    points_cap: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
}

#[derive(Args)]
struct VerifyArgs {
    /// T1..T8, OBER or LAVOIE.
    id: String,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_reader(io::BufReader::new(file))
        .map_err(|e| Error::Param(format!("{}: {e}", path.display())))
}

fn print_series(r: &SeriesResult, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => harness::write_json(r, io::stdout().lock()),
        OutputFormat::Text => {
            println!("value      = {} {:+}i", r.value.re, r.value.im);
            println!("terms_used = {}", r.terms_used);
            println!("last_term  = {:e}", r.last_term_magnitude);
            println!("status     = {:?}", r.status);
            for w in &r.warnings {
                println!("warning    = {w}");
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct FracOutput {
    #[serde(with = "complex::serde_pair")]
    value: ComplexValue,
    abs_error_estimate: f64,
    evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    power_rule: Option<[f64; 2]>,
}

fn print_frac(out: &FracOutput, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => harness::write_json(out, io::stdout().lock()),
        OutputFormat::Text => {
            println!("value       = {} {:+}i", out.value.re, out.value.im);
            println!("error_est   = {:e}", out.abs_error_estimate);
            println!("evaluations = {}", out.evaluations);
            if let Some([re, im]) = out.power_rule {
                println!("power_rule  = {re} {im:+}i");
            }
            Ok(())
        }
    }
}

fn frac_int(a: &FracArgs) -> Result<i32> {
    let lambda = complex::parse(&a.lambda)?;
    let delta = complex::parse(&a.delta)?;
    let params: Option<GmibParams> = a.params.as_deref().map(read_json).transpose()?;
    let (r, rule): (QuadratureResult, Option<ComplexValue>) = match (a.side, &params) {
        (Side::Left, None) => {
            let f = |t: f64| real_pow(t, delta - 1.0);
            (
                fraccalc::rl_integral_left(f, lambda, a.x, a.tol)?,
                Some(fraccalc::power_rule_left(lambda, delta, a.x)?),
            )
        }
        (Side::Right, None) => {
            let f = |t: f64| real_pow(t, -delta);
            (
                fraccalc::rl_integral_right(f, lambda, a.x, a.tol)?,
                Some(fraccalc::power_rule_right(lambda, delta, a.x)?),
            )
        }
        (Side::Left, Some(p)) => {
            let j = gmbessel::taylor(p, a.x, 1e-17)?;
            let f = |t: f64| real_pow(t, delta - 1.0) * j.eval_real(t);
            (fraccalc::rl_integral_left(f, lambda, a.x, a.tol)?, None)
        }
        (Side::Right, Some(p)) => {
            let j = gmbessel::taylor(p, 1.0 / a.x, 1e-17)?;
            let f = |t: f64| real_pow(t, -delta) * j.eval_real(1.0 / t);
            (fraccalc::rl_integral_right(f, lambda, a.x, a.tol)?, None)
        }
    };
    print_frac(
        &FracOutput {
            value: r.value,
            abs_error_estimate: r.abs_error_estimate,
            evaluations: r.evaluations,
            power_rule: rule.map(|z| [z.re, z.im]),
        },
        a.format,
    )?;
    Ok(0)
}

fn frac_diff(a: &FracArgs) -> Result<i32> {
    let lambda = complex::parse(&a.lambda)?;
    let delta = complex::parse(&a.delta)?;
    let params: Option<GmibParams> = a.params.as_deref().map(read_json).transpose()?;
    let (direction, offset) = match a.side {
        Side::Left => (Direction::Ascending, delta - 1.0),
        Side::Right => (Direction::Descending, delta),
    };
    let f = match &params {
        None => PowerSeriesFn::monomial(direction, offset),
        Some(p) => PowerSeriesFn::new(direction, offset, gmbessel::coefficient_fn(p)?),
    };
    let r = match a.side {
        Side::Left => fraccalc::rl_derivative_left_series(&f, lambda, a.x, a.tol)?,
        Side::Right => fraccalc::rl_derivative_right_series(&f, lambda, a.x, a.tol)?,
    };
    print_series(&r, a.format)?;
    Ok(0)
}

fn load_grid(s: &SweepArgs) -> Result<(GridSpec, TolOverrides)> {
    let mut grid: GridSpec = match &s.grid {
        Some(path) => read_json(path)?,
        None => GridSpec::default(),
    };
    if let Some(seed) = s.seed {
        grid.seed = seed;
    }
    if let Some(cap) = s.points_cap {
        grid.points_cap = cap;
    }
    Ok((
        grid,
        TolOverrides {
            rtol: s.tol,
            atol: s.atol,
        },
    ))
}

fn write_reports(reports: &[IdentityReport], s: &SweepArgs) -> Result<()> {
    let sink: Box<dyn Write> = match &s.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match s.format {
        ReportFormat::Csv => harness::write_csv(reports, sink),
        ReportFormat::Json if reports.len() == 1 => harness::write_json(&reports[0], sink),
        ReportFormat::Json => harness::write_json(reports, sink),
    }
}

fn summary_line(r: &IdentityReport) {
    let s = &r.summary;
    eprintln!(
        "{}: {}/{} pass (printed {}, corrected {}, both fail {}), max err printed {:.2e} corrected {:.2e}, resolved {:?}",
        r.id,
        s.passed,
        s.evaluated,
        s.pass_printed,
        s.pass_corrected,
        s.both_failed,
        s.max_rel_err_printed.unwrap_or(f64::NAN),
        s.max_rel_err_corrected.unwrap_or(f64::NAN),
        s.resolved_variant,
    );
}

fn sweep(ids: &[IdentityId], s: &SweepArgs) -> Result<i32> {
    let (grid, tol) = load_grid(s)?;
    let reports = ids
        .iter()
        .map(|&id| harness::verify(id, &grid, tol))
        .collect::<Result<Vec<_>>>()?;
    reports.iter().for_each(summary_line);
    write_reports(&reports, s)?;
    Ok(if reports.iter().all(IdentityReport::all_pass) {
        0
    } else {
        1
    })
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::EvalGmib(a) => {
            let p: GmibParams = read_json(&a.params)?;
            print_series(&gmbessel::eval(&p, complex::parse(&a.z)?, a.tol)?, a.format)?;
            Ok(0)
        }
        Command::EvalFw(a) => {
            let p: FoxWrightParams = read_json(&a.params)?;
            print_series(
                &foxwright::eval(&p, complex::parse(&a.z)?, a.tol)?,
                a.format,
            )?;
            Ok(0)
        }
        Command::FracInt(a) => frac_int(&a),
        Command::FracDiff(a) => frac_diff(&a),
        Command::Verify(a) => sweep(&[a.id.parse()?], &a.sweep),
        Command::Report(a) => sweep(&IdentityId::ALL, &a.sweep),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
