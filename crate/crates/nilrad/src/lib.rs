//! Command-line front end for `nilrad-core`: JSON formats and the verbs
//! `invariants`, `classify`, `preeinstein`, `nilsoliton`, `verify`, `dual`,
//! `synth`, `witness` and `sample`.

pub mod commands;
pub mod error;
pub mod json;
pub mod sample;

pub use commands::{execute, Cli};
pub use error::CliError;
