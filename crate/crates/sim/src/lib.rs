//! Scenario files, result formats, experiment pipelines and the command
//! line front end for `hts-core`.
//!
//! Exit codes of the `hts-sim` binary:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | usage error |
//! | 3 | scenario or data file does not parse |
//! | 4 | scenario violates an invariant or lacks a required section |
//! | 5 | a model rejected its inputs |
//! | 6 | file system error |

pub mod cli;
pub mod error;
pub mod experiments;
pub mod formats;
pub mod results;
pub mod scenario_io;

pub use error::{Result, SimError};
pub use experiments::{run, Experiment, RunOptions, RunOutput};
pub use scenario_io::{load_scenario, LoadedScenario};
