//! TOML configuration with `[system]`, `[squeezing]` and `[scenario]` sections.
//!
//! Frequencies and rates are ordinary Hz (keys ending in `_hz`) and are converted
//! by 2 pi; temperature is K, mass kg, power W. Keys left out take the defaults of
//! the chosen scenario kind, and [`Scenario::to_toml`] echoes every resolved value.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{PeriodicOptions, ResonanceReference};
use crate::experiments::scenario::{
    Axis, AxisVariable, ExactSettings, Method, Scenario, ScenarioKind, Spacing, SqueezingInput,
};
use crate::params::{hz, to_hz, DetuningPolicy, Drive, MechanicalDamping, SystemParams};
use crate::squeezing::OpoParams;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSystem {
    pub omega_m0_hz: Option<f64>,
    pub mass_kg: Option<f64>,
    pub quality_factor: Option<f64>,
    pub gamma_m_hz: Option<f64>,
    pub kappa_hz: Option<f64>,
    pub temperature_k: Option<f64>,
    pub coupling_hz: Option<f64>,
    pub power_w: Option<f64>,
    pub cavity_length_m: Option<f64>,
    pub reflectivity: Option<f64>,
    pub optical_frequency_hz: Option<f64>,
    /// Only `"sideband-cooling"` is accepted; use `detuning_hz` for a fixed value.
    pub detuning: Option<String>,
    pub detuning_hz: Option<f64>,
    pub laser_detuning_hz: Option<f64>,
    pub delta_hz: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSqueezing {
    pub input_db: Option<f64>,
    pub b_x_hz: Option<f64>,
    pub phase_rad: Option<f64>,
    pub gamma_o_hz: Option<f64>,
    pub epsilon_hz: Option<f64>,
    pub epsilon_phase_rad: Option<f64>,
    pub n: Option<f64>,
    pub m_re: Option<f64>,
    pub m_im: Option<f64>,
    pub b_y_hz: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub kind: Option<ScenarioKind>,
    pub axis: Option<AxisVariable>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    pub spacing: Option<Spacing>,
    pub methods: Option<Vec<Method>>,
    pub resonance_reference: Option<ResonanceReference>,
    pub white_bandwidth_factor: Option<f64>,
    pub phase_samples: Option<usize>,
    pub rtol: Option<f64>,
    pub periodic_tol: Option<f64>,
    pub max_periods: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub system: RawSystem,
    #[serde(default)]
    pub squeezing: RawSqueezing,
    #[serde(default)]
    pub scenario: RawScenario,
}

fn exclusive(section: &str, keys: &[(&str, bool)]) -> Result<()> {
    let given: Vec<&str> = keys.iter().filter(|(_, p)| *p).map(|(k, _)| *k).collect();
    if given.len() > 1 {
        return Err(Error::config(
            format!("{section}.{}", given[1]),
            format!(
                "mutually exclusive with `{}`; give exactly one of {:?}",
                given[0],
                keys.iter().map(|k| k.0).collect::<Vec<_>>()
            ),
        ));
    }
    Ok(())
}

fn require<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::config(key, "required here"))
}

fn default_axis(kind: ScenarioKind) -> Option<Axis> {
    let axis = |variable, start, stop, points, spacing| Axis { variable, start, stop, points, spacing };
    match kind {
        ScenarioKind::Fig3aInputSweep => Some(axis(AxisVariable::InputDb, 0.0, 9.0, 10, Spacing::Linear)),
        ScenarioKind::Fig3bDetuningSweep => Some(axis(AxisVariable::Delta, -40e3, 40e3, 33, Spacing::Linear)),
        ScenarioKind::Fig3cBandwidthSweep => Some(axis(AxisVariable::BX, 1e4, 1e8, 25, Spacing::Log)),
        ScenarioKind::Fig3dTemperatureSweep => Some(axis(AxisVariable::Temperature, 1e-3, 10.0, 9, Spacing::Log)),
        ScenarioKind::Squashing => Some(axis(AxisVariable::InputDb, 0.0, 6.0, 2, Spacing::Linear)),
        ScenarioKind::Custom => None,
    }
}

fn default_methods(kind: ScenarioKind) -> Vec<Method> {
    match kind {
        ScenarioKind::Fig3cBandwidthSweep => vec![Method::AnalyticFiniteBw, Method::Exact],
        ScenarioKind::Squashing => vec![Method::AnalyticRsl, Method::AnalyticWhite, Method::Exact],
        _ => Method::ALL.to_vec(),
    }
}

fn resolve_system(raw: &RawSystem, kind: ScenarioKind) -> Result<SystemParams> {
    let mut p = match kind {
        ScenarioKind::Squashing => SystemParams::squashing_reference(),
        _ => SystemParams::transfer_reference(),
    };
    exclusive("system", &[("quality_factor", raw.quality_factor.is_some()), ("gamma_m_hz", raw.gamma_m_hz.is_some())])?;
    exclusive("system", &[("coupling_hz", raw.coupling_hz.is_some()), ("power_w", raw.power_w.is_some())])?;
    exclusive(
        "system",
        &[
            ("detuning", raw.detuning.is_some()),
            ("detuning_hz", raw.detuning_hz.is_some()),
            ("laser_detuning_hz", raw.laser_detuning_hz.is_some()),
        ],
    )?;

    if let Some(v) = raw.omega_m0_hz {
        p.omega_m0 = hz(v);
    }
    if let Some(v) = raw.mass_kg {
        p.mass = v;
    }
    if let Some(q) = raw.quality_factor {
        p.damping = MechanicalDamping::QualityFactor(q);
    }
    if let Some(g) = raw.gamma_m_hz {
        p.damping = MechanicalDamping::Rate(hz(g));
    }
    if let Some(v) = raw.kappa_hz {
        p.kappa = hz(v);
    }
    if let Some(v) = raw.temperature_k {
        p.temperature = v;
    }
    if let Some(v) = raw.optical_frequency_hz {
        p.omega_c = Some(hz(v));
    }
    if let Some(g) = raw.coupling_hz {
        p.drive = Drive::Coupling(hz(g));
    }
    if let Some(power) = raw.power_w {
        p.drive = Drive::Power {
            power,
            cavity_length: require(raw.cavity_length_m, "system.cavity_length_m")?,
            reflectivity: require(raw.reflectivity, "system.reflectivity")?,
        };
        if p.omega_c.is_none() {
            return Err(Error::config("system.optical_frequency_hz", "required for a power drive"));
        }
    } else {
        for (key, present) in
            [("cavity_length_m", raw.cavity_length_m.is_some()), ("reflectivity", raw.reflectivity.is_some())]
        {
            if present {
                return Err(Error::config(format!("system.{key}"), "only meaningful together with power_w"));
            }
        }
    }
    match raw.detuning.as_deref() {
        Some("sideband-cooling") => p.detuning = DetuningPolicy::SidebandCooling,
        Some(other) => {
            return Err(Error::config(
                "system.detuning",
                format!("unknown policy `{other}`; use \"sideband-cooling\" or detuning_hz / laser_detuning_hz"),
            ))
        }
        None => {}
    }
    if let Some(d) = raw.detuning_hz {
        p.detuning = DetuningPolicy::Effective(hz(d));
    }
    if let Some(d) = raw.laser_detuning_hz {
        p.detuning = DetuningPolicy::Laser(hz(d));
    }
    if let Some(d) = raw.delta_hz {
        p.squeeze_detuning = hz(d);
    }
    p.validate().map_err(|e| match e {
        Error::InvalidParameter { name, reason } => Error::config(format!("system.{}", system_key(name)), reason),
        other => other,
    })?;
    Ok(p)
}

fn system_key(name: &str) -> &str {
    match name {
        "omega_m0" => "omega_m0_hz",
        "mass" => "mass_kg",
        "kappa" => "kappa_hz",
        "temperature" => "temperature_k",
        "omega_c" => "optical_frequency_hz",
        "gamma_m" => "gamma_m_hz",
        "G" => "coupling_hz",
        "power" => "power_w",
        "cavity_length" => "cavity_length_m",
        "detuning" => "detuning_hz",
        "delta" => "delta_hz",
        other => other,
    }
}

fn resolve_squeezing(raw: &RawSqueezing, system: &SystemParams, white_factor: f64) -> Result<SqueezingInput> {
    let opo_form = raw.gamma_o_hz.is_some() || raw.epsilon_hz.is_some();
    let nm_form = raw.n.is_some() || raw.m_re.is_some() || raw.m_im.is_some() || raw.b_y_hz.is_some();
    exclusive("squeezing", &[("input_db", raw.input_db.is_some()), ("gamma_o_hz", opo_form), ("n", nm_form)])?;
    if opo_form {
        let gamma = hz(require(raw.gamma_o_hz, "squeezing.gamma_o_hz")?);
        let epsilon = Complex64::from_polar(
            hz(require(raw.epsilon_hz, "squeezing.epsilon_hz")?),
            raw.epsilon_phase_rad.unwrap_or(0.0),
        );
        for (key, present) in [("b_x_hz", raw.b_x_hz.is_some()), ("phase_rad", raw.phase_rad.is_some())] {
            if present {
                return Err(Error::config(format!("squeezing.{key}"), "not used with gamma_o_hz/epsilon_hz"));
            }
        }
        OpoParams { gamma, epsilon }.check_threshold().map_err(|e| match e {
            Error::OpoThreshold { .. } => Error::config("squeezing.epsilon_hz", e.to_string()),
            Error::InvalidParameter { reason, .. } => Error::config("squeezing.gamma_o_hz", reason),
            other => other,
        })?;
        return Ok(SqueezingInput::Opo { gamma, epsilon });
    }
    if nm_form {
        return Ok(SqueezingInput::Correlations {
            n: require(raw.n, "squeezing.n")?,
            m: Complex64::new(require(raw.m_re, "squeezing.m_re")?, raw.m_im.unwrap_or(0.0)),
            b_x: hz(require(raw.b_x_hz, "squeezing.b_x_hz")?),
            b_y: hz(require(raw.b_y_hz, "squeezing.b_y_hz")?),
        });
    }
    if raw.epsilon_phase_rad.is_some() {
        return Err(Error::config("squeezing.epsilon_phase_rad", "only used with gamma_o_hz/epsilon_hz"));
    }
    Ok(SqueezingInput::Decibel {
        input_db: raw.input_db.unwrap_or(6.0),
        b_x: raw.b_x_hz.map(hz).unwrap_or(white_factor * system.omega_m0),
        phase: raw.phase_rad.unwrap_or(0.0),
    })
}

impl RawConfig {
    pub fn resolve(&self) -> Result<Scenario> {
        let sc = &self.scenario;
        let kind = sc.kind.unwrap_or(ScenarioKind::Custom);
        let system = resolve_system(&self.system, kind)?;

        let defaults = ExactSettings::default();
        let periodic_defaults = PeriodicOptions::default();
        let exact = ExactSettings {
            resonance_reference: sc.resonance_reference.unwrap_or(defaults.resonance_reference),
            white_bandwidth_factor: sc.white_bandwidth_factor.unwrap_or(defaults.white_bandwidth_factor),
            periodic: PeriodicOptions {
                rtol: sc.rtol.unwrap_or(periodic_defaults.rtol),
                tol: sc.periodic_tol.unwrap_or(periodic_defaults.tol),
                max_periods: sc.max_periods.unwrap_or(periodic_defaults.max_periods),
                phase_samples: sc.phase_samples.unwrap_or(periodic_defaults.phase_samples),
            },
        };
        if !(exact.white_bandwidth_factor > 0.0) {
            return Err(Error::config("scenario.white_bandwidth_factor", "must be > 0"));
        }
        if exact.periodic.phase_samples < 64 {
            return Err(Error::config("scenario.phase_samples", "must be at least 64"));
        }
        for (key, v) in [("scenario.rtol", exact.periodic.rtol), ("scenario.periodic_tol", exact.periodic.tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::config(key, format!("must lie in (0, 1), got {v}")));
            }
        }

        let squeezing = resolve_squeezing(&self.squeezing, &system, exact.white_bandwidth_factor)?;

        let base_axis = default_axis(kind);
        let axis = Axis {
            variable: match (sc.axis, base_axis) {
                (Some(v), _) => v,
                (None, Some(a)) => a.variable,
                (None, None) => return Err(Error::config("scenario.axis", "required for a custom scenario")),
            },
            start: require(sc.start.or(base_axis.map(|a| a.start)), "scenario.start")?,
            stop: require(sc.stop.or(base_axis.map(|a| a.stop)), "scenario.stop")?,
            points: require(sc.points.or(base_axis.map(|a| a.points)), "scenario.points")?,
            spacing: sc.spacing.or(base_axis.map(|a| a.spacing)).unwrap_or(Spacing::Linear),
        };
        if let (Some(a), Some(v)) = (base_axis, sc.axis) {
            if a.variable != v && (sc.start.is_none() || sc.stop.is_none()) {
                return Err(Error::config("scenario.start", "set start and stop when overriding the axis variable"));
            }
        }
        let methods = sc.methods.clone().unwrap_or_else(|| default_methods(kind));

        let scenario = Scenario { kind, system, squeezing, axis, methods, exact };
        scenario.validate()?;
        Ok(scenario)
    }
}

pub fn parse_config(text: &str) -> Result<Scenario> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let key = e.span().map(|s| format!("byte {}..{}", s.start, s.end)).unwrap_or_else(|| "toml".to_string());
        Error::config(key, e.to_string())
    })?;
    raw.resolve()
}

pub fn load_config(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(path.display().to_string(), format!("cannot read config: {e}")))?;
    parse_config(&text)
}

impl Scenario {
    /// Resolved configuration with every default spelled out; parses back to `self`
    /// up to the Hz <-> rad/s round trip.
    pub fn to_raw(&self) -> RawConfig {
        let p = &self.system;
        let mut system = RawSystem {
            omega_m0_hz: Some(to_hz(p.omega_m0)),
            mass_kg: Some(p.mass),
            kappa_hz: Some(to_hz(p.kappa)),
            temperature_k: Some(p.temperature),
            optical_frequency_hz: p.omega_c.map(to_hz),
            delta_hz: Some(to_hz(p.squeeze_detuning)),
            ..RawSystem::default()
        };
        match p.damping {
            MechanicalDamping::QualityFactor(q) => system.quality_factor = Some(q),
            MechanicalDamping::Rate(g) => system.gamma_m_hz = Some(to_hz(g)),
        }
        match p.drive {
            Drive::Coupling(g) => system.coupling_hz = Some(to_hz(g)),
            Drive::Power { power, cavity_length, reflectivity } => {
                system.power_w = Some(power);
                system.cavity_length_m = Some(cavity_length);
                system.reflectivity = Some(reflectivity);
            }
        }
        match p.detuning {
            DetuningPolicy::SidebandCooling => system.detuning = Some("sideband-cooling".to_string()),
            DetuningPolicy::Effective(d) => system.detuning_hz = Some(to_hz(d)),
            DetuningPolicy::Laser(d) => system.laser_detuning_hz = Some(to_hz(d)),
        }
        let squeezing = match self.squeezing {
            SqueezingInput::Decibel { input_db, b_x, phase } => RawSqueezing {
                input_db: Some(input_db),
                b_x_hz: Some(to_hz(b_x)),
                phase_rad: Some(phase),
                ..RawSqueezing::default()
            },
            SqueezingInput::Opo { gamma, epsilon } => RawSqueezing {
                gamma_o_hz: Some(to_hz(gamma)),
                epsilon_hz: Some(to_hz(epsilon.norm())),
                epsilon_phase_rad: Some(epsilon.arg()),
                ..RawSqueezing::default()
            },
            SqueezingInput::Correlations { n, m, b_x, b_y } => RawSqueezing {
                n: Some(n),
                m_re: Some(m.re),
                m_im: Some(m.im),
                b_x_hz: Some(to_hz(b_x)),
                b_y_hz: Some(to_hz(b_y)),
                ..RawSqueezing::default()
            },
        };
        let e = &self.exact;
        let scenario = RawScenario {
            kind: Some(self.kind),
            axis: Some(self.axis.variable),
            start: Some(self.axis.start),
            stop: Some(self.axis.stop),
            points: Some(self.axis.points),
            spacing: Some(self.axis.spacing),
            methods: Some(self.methods.clone()),
            resonance_reference: Some(e.resonance_reference),
            white_bandwidth_factor: Some(e.white_bandwidth_factor),
            phase_samples: Some(e.periodic.phase_samples),
            rtol: Some(e.periodic.rtol),
            periodic_tol: Some(e.periodic.tol),
            max_periods: Some(e.periodic.max_periods),
        };
        RawConfig { system, squeezing, scenario }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_raw()).unwrap_or_default()
    }
}
