use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mechsqueeze_core::exact::opo_output_correlators;
use mechsqueeze_core::experiments::{load_config, parse_config, run_scenario, write_to, Format, Method, Scenario};
use mechsqueeze_core::squeezing::input_correlators;
use mechsqueeze_core::{Error, OpoParams};
use serde::Serialize;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const SOURCE_TOLERANCE: f64 = 1e-6;
const SOURCE_POINTS: usize = 201;

#[derive(Parser)]
#[command(
    name = "mechsqueeze",
    version,
    about = "Squeezed-light cooling of a membrane: closed forms vs exact Gaussian steady states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form predictions only.
    Analytic(Common),
    /// Exact cascaded-OPO solver only.
    Exact(Common),
    /// Every method in the config; failed points are reported as error rows.
    Sweep(Common),
    /// Check the OPO output correlators against the closed-form two-time correlators.
    ValidateSource(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config with [system], [squeezing] and [scenario]; built-in fig3a defaults if omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Worker threads for the sweep.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

enum Failure {
    Config(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

fn scenario(common: &Common) -> Result<Scenario, Failure> {
    Ok(match &common.config {
        Some(path) => load_config(path)?,
        None => parse_config("[scenario]\nkind = \"fig3a\"\n")?,
    })
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::Config(format!("cannot create {}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn finish(mut w: Box<dyn Write>) -> Result<(), Failure> {
    w.flush().map_err(|e| Failure::Config(format!("cannot write output: {e}")))
}

fn run_methods(
    common: &Common,
    keep: impl Fn(Method) -> bool,
    fallback: &[Method],
    strict: bool,
) -> Result<(), Failure> {
    let mut scenario = scenario(common)?;
    scenario.methods.retain(|&m| keep(m));
    if scenario.methods.is_empty() {
        scenario.methods = fallback.to_vec();
    }
    let result = run_scenario(&scenario, common.jobs.map(usize::from))?;
    let mut w = sink(&common.out)?;
    write_to(&result, common.format.into(), &mut w)?;
    finish(w)?;
    if strict {
        if let Some(bad) = result.rows.iter().find(|r| r.error.is_some()) {
            return Err(Failure::Numeric(format!(
                "{} at axis value {}: {}",
                bad.method.name(),
                bad.axis,
                bad.error.as_deref().unwrap_or_default()
            )));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SourceRow {
    tau_bx: f64,
    c_mm_re: f64,
    c_mm_im: f64,
    c_nm: f64,
    closed_mm_re: f64,
    closed_mm_im: f64,
    closed_nm: f64,
    deviation: f64,
}

#[derive(Serialize)]
struct SourceReport {
    gamma_o_over_bx: f64,
    epsilon_over_bx: [f64; 2],
    tolerance: f64,
    max_deviation: f64,
    pass: bool,
    rows: Vec<SourceRow>,
}

fn validate_source(common: &Common) -> Result<(), Failure> {
    let scenario = scenario(common)?;
    let spec = scenario.squeezing.spec()?;
    let opo = spec.opo.ok_or(Error::MissingOpo)?;
    // Natural units: every rate in units of b_x.
    let unit = spec.b_x;
    let scaled = spec.with_bandwidth_scaled(1.0 / unit);
    let opo_n = OpoParams { gamma: opo.gamma / unit, epsilon: opo.epsilon / unit };
    let mut rows = Vec::with_capacity(SOURCE_POINTS);
    for k in 0..SOURCE_POINTS {
        let tau = 10.0 * k as f64 / (SOURCE_POINTS - 1) as f64;
        let c = opo_output_correlators(&opo_n, tau)?;
        let (mm, nm) = input_correlators(&scaled, tau);
        let deviation = (c.mm - mm).norm().max((c.nm - nm).norm());
        rows.push(SourceRow {
            tau_bx: tau,
            c_mm_re: c.mm.re,
            c_mm_im: c.mm.im,
            c_nm: c.nm.re,
            closed_mm_re: mm.re,
            closed_mm_im: mm.im,
            closed_nm: nm,
            deviation,
        });
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let report = SourceReport {
        gamma_o_over_bx: opo_n.gamma,
        epsilon_over_bx: [opo_n.epsilon.re, opo_n.epsilon.im],
        tolerance: SOURCE_TOLERANCE,
        max_deviation,
        pass: max_deviation < SOURCE_TOLERANCE,
        rows,
    };

    let mut w = sink(&common.out)?;
    let io_err = |e: io::Error| Failure::Config(format!("cannot write output: {e}"));
    match common.format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Failure::Config(e.to_string()))?;
            writeln!(w).map_err(io_err)?;
        }
        OutputFormat::Csv => {
            writeln!(w, "tau_bx,c_mm_re,c_mm_im,c_nm,closed_mm_re,closed_mm_im,closed_nm,deviation").map_err(io_err)?;
            for r in &report.rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    r.tau_bx, r.c_mm_re, r.c_mm_im, r.c_nm, r.closed_mm_re, r.closed_mm_im, r.closed_nm, r.deviation
                )
                .map_err(io_err)?;
            }
        }
    }
    finish(w)?;
    if !report.pass {
        return Err(Failure::Numeric(format!(
            "source correlators deviate by {max_deviation:e} (tolerance {SOURCE_TOLERANCE:e})"
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let analytic = [Method::AnalyticRsl, Method::AnalyticWhite, Method::AnalyticFiniteBw];
    let outcome = match &cli.command {
        Command::Analytic(c) => run_methods(c, Method::is_analytic, &analytic, true),
        Command::Exact(c) => run_methods(c, |m| m == Method::Exact, &[Method::Exact], true),
        Command::Sweep(c) => run_methods(c, |_| true, &[], false),
        Command::ValidateSource(c) => validate_source(c),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
