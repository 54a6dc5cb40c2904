//! Experiment orchestration: JSON specs, the verification pipeline,
//! self-verifying reports and the seeded fuzz campaign.

pub mod fuzz;
pub mod report;
pub mod run;
pub mod spec;

pub use fuzz::{fuzz_campaign, generate_system, EquationCount, FuzzConfig, FuzzGrid, FuzzSummary};
pub use report::{recheck, RecheckSummary, Report, Stage, StageStatus, Status, Verdict, Witness};
pub use run::{run_experiment, run_experiment_with, RunOptions};
pub use spec::{parse_spec, Check, ExperimentSpec, SpecError};
