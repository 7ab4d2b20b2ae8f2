//! Files, model access and experiment running for the simtom toolkit.
//!
//! The pure logic (story model, oracle, prompts, metric arithmetic) lives
//! in `simtom-core`; this crate adds the dataset formats, the chat gateway
//! with its cassette and mock backends, the runner and report output.

pub mod dataset;
pub mod gateway;
pub mod harness;
pub mod report;

pub use simtom_core as core;
