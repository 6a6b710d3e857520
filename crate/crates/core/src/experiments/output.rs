use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiments::scenario::{Method, Scenario};
use crate::params::MechanicalDamping;

pub const CSV_HEADER: [&str; 9] =
    ["axis", "method", "V_min", "V_max", "phi_star_rad", "squeeze_db", "occupancy", "micromotion_pp", "stable"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// One method at one axis point. Failed evaluations keep their error text and
/// leave the numeric fields empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub axis: f64,
    pub method: Method,
    #[serde(rename = "V_min")]
    pub v_min: Option<f64>,
    #[serde(rename = "V_max")]
    pub v_max: Option<f64>,
    pub phi_star_rad: Option<f64>,
    pub squeeze_db: Option<f64>,
    pub occupancy: Option<f64>,
    pub micromotion_pp: Option<f64>,
    pub stable: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch when the result was produced.
    pub generated_unix_s: u64,
    pub axis_unit: String,
    pub input_db_definition: String,
    pub damping_convention: String,
    /// Fully resolved scenario, all rates in rad/s.
    pub scenario: Scenario,
}

impl Metadata {
    pub fn for_scenario(scenario: &Scenario) -> Self {
        Metadata {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            generated_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            axis_unit: scenario.axis.variable.unit().to_string(),
            input_db_definition: "-10 log10(2 V) with V = N + 1/2 - |M| = (1/2)(b_x/b_y)^2, the white-noise minimum quadrature variance of the source"
                .to_string(),
            damping_convention: match scenario.system.damping {
                MechanicalDamping::QualityFactor(_) => "gamma_m = omega_m0 / Q (amplitude decay rate)",
                MechanicalDamping::Rate(_) => "gamma_m given directly (amplitude decay rate)",
            }
            .to_string(),
            scenario: scenario.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub metadata: Metadata,
    pub rows: Vec<Row>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Rows as RFC 4180 CSV. Deterministic: no metadata, shortest round-trip floats.
pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.axis.to_string(),
            r.method.name().to_string(),
            cell(r.v_min),
            cell(r.v_max),
            cell(r.phi_star_rad),
            cell(r.squeeze_db),
            cell(r.occupancy),
            cell(r.micromotion_pp),
            r.stable.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(result: &SweepResult, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, result)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_to<W: Write>(result: &SweepResult, format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(&result.rows, out),
        Format::Json => write_json(result, out),
    }
}

pub fn write_output(result: &SweepResult, format: Format, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_to(result, format, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<SweepResult> {
    Ok(serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?)
}
