//! Library side of the CLI harness: config handling, CSV IO, synthetic
//! instance generation, experiment execution and verification. The binary in
//! `main.rs` is a thin dispatcher over these functions, so everything it does
//! is reachable through this API with identical results.

pub mod config;
pub mod csvio;
pub mod experiment;
pub mod sweep;
pub mod synth;
pub mod verify;
