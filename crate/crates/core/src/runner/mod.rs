//! Config-driven experiment runs and the self-check suite.

pub mod config;
pub mod run;
pub mod verify;

pub use config::{parse_manifest, parse_model, Experiment, Manifest};
pub use run::{execute, model_spectrum, run, RunOutput, Table, Written};
pub use verify::{verify_suite, Check, Level, VerifyReport};
