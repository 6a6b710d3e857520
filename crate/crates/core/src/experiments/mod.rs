//! Parameter sweeps comparing the closed forms with the exact solver, plus config
//! ingestion and CSV/JSON output.

pub mod config;
pub mod output;
pub mod scenario;
mod squashing;

pub use config::{load_config, parse_config, RawConfig};
pub use output::{read_json, write_csv, write_json, write_output, write_to, Format, Metadata, Row, SweepResult};
pub use scenario::{
    run_scenario, Axis, AxisVariable, ExactSettings, Method, MethodOutcome, PointSetup, Scenario, ScenarioKind,
    Spacing, SqueezingInput,
};
pub use squashing::{squashing_report, SquashingReport};
