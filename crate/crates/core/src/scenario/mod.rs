//! Scenario files on disk and the bundled synthetic study.
//!
//! A scenario is a directory holding `scenario.toml` (scalars, catalogs,
//! house parameters) and one CSV per representative day (time series). Both
//! formats carry a versioned schema marker.

mod io;
mod synth;

pub use io::{
    load_scenario, save_scenario, Location, LocatedViolation, ScenarioError, ScenarioFileSet, CONFIG_FILE,
    CONFIG_SCHEMA, SERIES_SCHEMA_LINE,
};
pub use synth::{
    synthesize_default_problem, synthesize_default_scenario, SynthSettings, DEFAULT_SEED, NON_HVAC_PEAK_KW,
};
