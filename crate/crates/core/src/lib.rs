//! Core of the simtom toolkit: the Sally-Anne story model, a symbolic belief
//! oracle, the two-stage perspective-taking prompt kit and metric arithmetic.
//!
//! Everything here is pure and allocation-only. File formats, the chat
//! gateway and the experiment runner live in the `simtom` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod corpus;
pub mod metrics;
pub mod oracle;
pub mod prompt;

pub use corpus::{
    BeliefKind, Benchmark, BigTomAxis, BigTomQuestion, Choice, CorpusError, Event, EventKind, Order, QuestionType,
    Sample, Story, StoryContent, TomiQuestion,
};
pub use metrics::{Metrics, ReportRow, ScoreError};
pub use oracle::{BeliefState, OracleError, Perspective, WorldState};
pub use prompt::{Message, Method, ModelFamily, ParsedAnswer, PromptError, Role, Stage, Verdict};
