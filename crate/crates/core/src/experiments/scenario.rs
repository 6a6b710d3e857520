use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{
    cooling_rates, quadrature_extrema, variance_finite_bandwidth_form, variance_white_general_form,
    variance_white_rsl_form, QuadratureStats,
};
use crate::error::{Error, Result};
use crate::exact::{build_cascade, solve_cascade, PeriodicOptions, ResonanceReference};
use crate::experiments::output::{Metadata, Row, SweepResult};
use crate::params::{derive_params, hz, Drive, SystemParams};
use crate::squeezing::{nm_to_opo, opo_to_nm, SqueezingSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioKind {
    #[serde(rename = "fig3a_input_sweep", alias = "fig3a")]
    Fig3aInputSweep,
    #[serde(rename = "fig3b_detuning_sweep", alias = "fig3b")]
    Fig3bDetuningSweep,
    #[serde(rename = "fig3c_bandwidth_sweep", alias = "fig3c")]
    Fig3cBandwidthSweep,
    #[serde(rename = "fig3d_temperature_sweep", alias = "fig3d")]
    Fig3dTemperatureSweep,
    #[serde(rename = "squashing")]
    Squashing,
    #[serde(rename = "custom")]
    Custom,
}

/// Swept variable. Values are stored in config units: dB, Hz, dimensionless, K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisVariable {
    InputDb,
    /// Squeezing-carrier mismatch delta (Hz).
    Delta,
    /// Narrow squeezing bandwidth b_x (Hz).
    BX,
    /// Sideband parameter kappa / w_m0, realized by scaling kappa with G^2/kappa fixed.
    Eta,
    /// Bath temperature (K).
    Temperature,
}

impl AxisVariable {
    pub fn unit(self) -> &'static str {
        match self {
            AxisVariable::InputDb => "dB",
            AxisVariable::Delta | AxisVariable::BX => "Hz",
            AxisVariable::Eta => "1",
            AxisVariable::Temperature => "K",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub variable: AxisVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let mut v: Vec<f64> = (0..n)
            .map(|k| {
                let s = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * s,
                    Spacing::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * s).exp(),
                }
            })
            .collect();
        // Land exactly on the endpoints.
        if n > 0 {
            v[0] = self.start;
        }
        if n > 1 {
            v[n - 1] = self.stop;
        }
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::config("scenario.points", format!("need at least 2 points, got {}", self.points)));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::config("scenario.start", "axis range must be finite"));
        }
        if self.spacing == Spacing::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(Error::config("scenario.spacing", "log spacing needs a strictly positive range"));
        }
        let positive = matches!(self.variable, AxisVariable::BX | AxisVariable::Eta | AxisVariable::Temperature);
        if positive && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(Error::config("scenario.start", format!("{:?} must stay > 0 across the sweep", self.variable)));
        }
        if self.variable == AxisVariable::InputDb && self.start.min(self.stop) < 0.0 {
            return Err(Error::config("scenario.start", "input squeezing must be >= 0 dB"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    AnalyticRsl,
    AnalyticWhite,
    AnalyticFiniteBw,
    Exact,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::AnalyticRsl, Method::AnalyticWhite, Method::AnalyticFiniteBw, Method::Exact];

    pub fn name(self) -> &'static str {
        match self {
            Method::AnalyticRsl => "analytic_rsl",
            Method::AnalyticWhite => "analytic_white",
            Method::AnalyticFiniteBw => "analytic_finite_bw",
            Method::Exact => "exact",
        }
    }

    pub fn is_analytic(self) -> bool {
        self != Method::Exact
    }
}

/// Squeezed input as given in the config (rates in rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "form")]
pub enum SqueezingInput {
    /// Pure squeezing of `input_db` below vacuum with narrow bandwidth `b_x`; `phase`
    /// is `arg M`.
    Decibel {
        input_db: f64,
        b_x: f64,
        phase: f64,
    },
    Opo {
        gamma: f64,
        epsilon: Complex64,
    },
    Correlations {
        n: f64,
        m: Complex64,
        b_x: f64,
        b_y: f64,
    },
}

impl SqueezingInput {
    pub fn spec(&self) -> Result<SqueezingSpec> {
        match *self {
            SqueezingInput::Decibel { input_db, b_x, phase } => {
                let base = nm_to_opo(input_db, b_x)?;
                let opo = base.opo.ok_or(Error::MissingOpo)?;
                opo_to_nm(opo.gamma, opo.epsilon * Complex64::from_polar(1.0, phase))
            }
            SqueezingInput::Opo { gamma, epsilon } => opo_to_nm(gamma, epsilon),
            SqueezingInput::Correlations { n, m, b_x, b_y } => SqueezingSpec::new(n, m, b_x, b_y),
        }
    }

    /// Same source re-expressed as (dB, b_x, phase), when it is a pure OPO output.
    pub fn as_decibel(&self) -> Option<(f64, f64, f64)> {
        match *self {
            SqueezingInput::Decibel { input_db, b_x, phase } => Some((input_db, b_x, phase)),
            SqueezingInput::Opo { gamma, epsilon } => {
                let s = opo_to_nm(gamma, epsilon).ok()?;
                Some((s.input_db(), s.b_x, epsilon.arg()))
            }
            SqueezingInput::Correlations { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactSettings {
    pub resonance_reference: ResonanceReference,
    /// Default `b_x / w_m0` standing in for white squeezing in the exact solver.
    pub white_bandwidth_factor: f64,
    pub periodic: PeriodicOptions,
}

impl Default for ExactSettings {
    fn default() -> Self {
        ExactSettings {
            resonance_reference: ResonanceReference::Dressed,
            white_bandwidth_factor: 20.0,
            periodic: PeriodicOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub system: SystemParams,
    pub squeezing: SqueezingInput,
    pub axis: Axis,
    pub methods: Vec<Method>,
    pub exact: ExactSettings,
}

/// Everything one sweep point needs.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSetup {
    pub system: SystemParams,
    pub spec: SqueezingSpec,
}

/// Result of one method at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub stats: QuadratureStats,
    pub micromotion_pp: Option<f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.axis.validate()?;
        let needs_db = matches!(self.axis.variable, AxisVariable::InputDb | AxisVariable::BX);
        if needs_db && self.squeezing.as_decibel().is_none() {
            return Err(Error::config(
                "squeezing",
                "sweeping input_db or b_x needs a pure source (input_db or gamma_o/epsilon), not raw N/M",
            ));
        }
        if self.axis.variable == AxisVariable::Eta && !matches!(self.system.drive, Drive::Coupling(_)) {
            return Err(Error::config("scenario.axis", "the eta sweep keeps G^2/kappa fixed and needs coupling_hz"));
        }
        // Every point must be a valid, below-threshold source.
        for x in self.axis.values() {
            self.point(x).map_err(|e| match e {
                Error::OpoThreshold { .. } => Error::config("squeezing.epsilon_hz", e.to_string()),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Parameters at axis value `x` (config units).
    pub fn point(&self, x: f64) -> Result<PointSetup> {
        let mut system = self.system.clone();
        let mut squeezing = self.squeezing;
        match self.axis.variable {
            AxisVariable::InputDb | AxisVariable::BX => {
                let (db, bx, phase) = squeezing.as_decibel().ok_or(Error::MissingOpo)?;
                squeezing = if self.axis.variable == AxisVariable::InputDb {
                    SqueezingInput::Decibel { input_db: x, b_x: bx, phase }
                } else {
                    SqueezingInput::Decibel { input_db: db, b_x: hz(x), phase }
                };
            }
            AxisVariable::Delta => system.squeeze_detuning = hz(x),
            AxisVariable::Eta => {
                let kappa = x * system.omega_m0;
                if let Drive::Coupling(g) = system.drive {
                    system.drive = Drive::Coupling(g * (kappa / system.kappa).sqrt());
                }
                system.kappa = kappa;
            }
            AxisVariable::Temperature => system.temperature = x,
        }
        Ok(PointSetup { system, spec: squeezing.spec()? })
    }

    pub fn evaluate(&self, setup: &PointSetup, method: Method) -> Result<MethodOutcome> {
        let d = derive_params(&setup.system)?;
        let rates = cooling_rates(d.coupling, d.kappa, d.omega_m0, d.gamma_m)?;
        let spec = &setup.spec;
        let analytic = |form: crate::analytics::HarmonicForm| -> Result<MethodOutcome> {
            Ok(MethodOutcome { stats: quadrature_extrema(&form.into())?, micromotion_pp: None })
        };
        match method {
            Method::AnalyticRsl => analytic(variance_white_rsl_form(spec, &rates, d.n_th)),
            Method::AnalyticWhite => analytic(variance_white_general_form(spec, d.coupling, d.kappa, &rates, d.n_th)),
            Method::AnalyticFiniteBw => {
                analytic(variance_finite_bandwidth_form(spec, d.coupling, d.kappa, &rates, d.n_th))
            }
            Method::Exact => {
                let cascade = build_cascade(&d, &rates, spec, d.squeeze_detuning, self.exact.resonance_reference)?;
                let sol = solve_cascade(&cascade, &self.exact.periodic)?;
                Ok(MethodOutcome { stats: sol.readout.stats, micromotion_pp: Some(sol.readout.micromotion_pp) })
            }
        }
    }
}

fn row(axis: f64, method: Method, outcome: Result<MethodOutcome>) -> Row {
    match outcome {
        Ok(o) => Row {
            axis,
            method,
            v_min: Some(o.stats.v_min),
            v_max: Some(o.stats.v_max),
            phi_star_rad: Some(o.stats.phi_star),
            squeeze_db: Some(o.stats.squeeze_db),
            occupancy: Some(o.stats.occupancy),
            micromotion_pp: o.micromotion_pp,
            stable: true,
            error: None,
        },
        Err(e) => Row {
            axis,
            method,
            v_min: None,
            v_max: None,
            phi_star_rad: None,
            squeeze_db: None,
            occupancy: None,
            micromotion_pp: None,
            stable: false,
            error: Some(e.to_string()),
        },
    }
}

/// Evaluate every requested method at every axis point. Numerical failures become
/// per-row error records; only an invalid scenario fails the whole call.
///
/// `jobs = None` uses the global rayon pool; the output does not depend on it.
pub fn run_scenario(scenario: &Scenario, jobs: Option<usize>) -> Result<SweepResult> {
    scenario.validate()?;
    let mut methods = scenario.methods.clone();
    methods.sort();
    methods.dedup();
    let tasks: Vec<(f64, Method)> =
        scenario.axis.values().into_iter().flat_map(|x| methods.iter().map(move |&m| (x, m))).collect();
    let eval = |&(x, m): &(f64, Method)| row(x, m, scenario.point(x).and_then(|p| scenario.evaluate(&p, m)));
    let rows: Vec<Row> = match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::config("jobs", e.to_string()))?;
            pool.install(|| tasks.par_iter().map(eval).collect())
        }
        None => tasks.par_iter().map(eval).collect(),
    };
    Ok(SweepResult { metadata: Metadata::for_scenario(scenario), rows })
}
