use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiments::scenario::{
    Axis, AxisVariable, ExactSettings, Method, Scenario, ScenarioKind, Spacing, SqueezingInput,
};
use crate::params::SystemParams;

/// Variance imbalance `(V_max - V_min)/V_mean` under squeezed drive, and the
/// occupancy reached without squeezing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquashingReport {
    pub input_db: f64,
    pub imbalance_exact: f64,
    /// From the resolved-sideband white-noise closed form.
    pub imbalance_rsl: f64,
    pub imbalance_white: f64,
    pub baseline_occupancy_exact: f64,
    pub baseline_occupancy_rsl: f64,
    pub baseline_occupancy_white: f64,
}

pub fn squashing_report(params: &SystemParams, input_db: f64, exact: &ExactSettings) -> Result<SquashingReport> {
    let scenario = Scenario {
        kind: ScenarioKind::Squashing,
        system: params.clone(),
        squeezing: SqueezingInput::Decibel {
            input_db,
            b_x: exact.white_bandwidth_factor * params.omega_m0,
            phase: 0.0,
        },
        axis: Axis { variable: AxisVariable::InputDb, start: 0.0, stop: input_db, points: 2, spacing: Spacing::Linear },
        methods: vec![Method::AnalyticRsl, Method::AnalyticWhite, Method::Exact],
        exact: *exact,
    };
    scenario.validate()?;
    let base = scenario.point(0.0)?;
    let squeezed = scenario.point(input_db)?;
    let at = |p, m| scenario.evaluate(p, m).map(|o| o.stats);
    Ok(SquashingReport {
        input_db,
        imbalance_exact: at(&squeezed, Method::Exact)?.imbalance(),
        imbalance_rsl: at(&squeezed, Method::AnalyticRsl)?.imbalance(),
        imbalance_white: at(&squeezed, Method::AnalyticWhite)?.imbalance(),
        baseline_occupancy_exact: at(&base, Method::Exact)?.occupancy,
        baseline_occupancy_rsl: at(&base, Method::AnalyticRsl)?.occupancy,
        baseline_occupancy_white: at(&base, Method::AnalyticWhite)?.occupancy,
    })
}
