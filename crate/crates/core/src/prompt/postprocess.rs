//! Cleaning perspective-stage output before it is fed to the second stage.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::Benchmark;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Postprocessed {
    pub text: String,
    /// True when nothing usable was left and the original story is used.
    pub fell_back: bool,
}

/// Strips the answer-format scaffolding the perspective prompts ask for.
/// Falls back to `original_story` when nothing remains.
pub fn perspective_postprocess(raw: &str, benchmark: Benchmark, original_story: &str) -> Postprocessed {
    let text = match benchmark {
        Benchmark::BigTom => clean_bigtom(raw),
        Benchmark::Tomi => clean_tomi(raw),
    };
    if text.is_empty() {
        Postprocessed { text: original_story.to_string(), fell_back: true }
    } else {
        Postprocessed { text, fell_back: false }
    }
}

fn clean_bigtom(raw: &str) -> String {
    if let Some(pos) = raw.rfind("Edit:") {
        return raw[pos + "Edit:".len()..].trim().to_string();
    }
    let kept: Vec<&str> = raw
        .lines()
        .filter(|l| {
            let t = l.trim_start();
            !(t.starts_with("Sees/Notices/Realizes:") || t == "Story:")
        })
        .map(|l| l.trim_start().strip_prefix("Story:").map_or(l, str::trim_start))
        .collect();
    kept.join("\n").trim().to_string()
}

fn clean_tomi(raw: &str) -> String {
    let kept: Vec<&str> = raw
        .lines()
        .filter(|l| {
            let t = l.trim();
            !t.ends_with("knows about the following events:") && t != "Story:"
        })
        .collect();
    kept.join("\n").trim().to_string()
}
