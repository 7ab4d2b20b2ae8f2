//! Prompt templates, prompting methods, rendering and output parsing.
//!
//! Template bodies live as plain-text assets under `templates/` next to a
//! `manifest.json` describing which method, benchmark, model family and
//! stage each one serves.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{Benchmark, Sample};

mod answer;
mod postprocess;

pub use answer::{parse_answer, ParsedAnswer, Verdict};
pub use postprocess::{perspective_postprocess, Postprocessed};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("{method} has no {stage} stage")]
    WrongStage { method: Method, stage: Stage },
    #[error("the question-answering stage of {0} needs a perspective")]
    MissingPerspective(Method),
    #[error("a perspective is only accepted by the question-answering stage of a two-stage method")]
    UnexpectedPerspective,
    #[error("{method} is not defined for {benchmark}")]
    UnsupportedBenchmark { method: Method, benchmark: Benchmark },
    #[error("template placeholder {{{0}}} was left unfilled")]
    UnfilledPlaceholder(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ZeroShot,
    ZeroShotCot,
    ZeroShotRules,
    CotRules,
    Simtom,
    SimtomSingle,
    SimtomMulti,
    SimtomDomain,
    SimtomOracle,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::ZeroShot,
        Method::ZeroShotCot,
        Method::ZeroShotRules,
        Method::CotRules,
        Method::Simtom,
        Method::SimtomSingle,
        Method::SimtomMulti,
        Method::SimtomDomain,
        Method::SimtomOracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::ZeroShot => "zero_shot",
            Method::ZeroShotCot => "zero_shot_cot",
            Method::ZeroShotRules => "zero_shot_rules",
            Method::CotRules => "cot_rules",
            Method::Simtom => "simtom",
            Method::SimtomSingle => "simtom_single",
            Method::SimtomMulti => "simtom_multi",
            Method::SimtomDomain => "simtom_domain",
            Method::SimtomOracle => "simtom_oracle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.replace('-', "_");
        Method::ALL.into_iter().find(|m| m.as_str() == s)
    }

    /// Number of model calls per sample when every stage is prompted.
    pub fn stages(self) -> u8 {
        match self {
            Method::Simtom | Method::SimtomMulti | Method::SimtomDomain | Method::SimtomOracle => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Perspective,
    Qa,
    Combined,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Perspective => "perspective",
            Stage::Qa => "qa",
            Stage::Combined => "combined",
        })
    }
}

/// Prompt dialect. Llama-chat variants add instructions against refusals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    #[default]
    Gpt,
    LlamaChat,
}

impl ModelFamily {
    pub fn from_model_id(model: &str) -> Self {
        if model.to_ascii_lowercase().contains("llama") {
            ModelFamily::LlamaChat
        } else {
            ModelFamily::Gpt
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.replace('-', "_").as_str() {
            "gpt" => Some(ModelFamily::Gpt),
            "llama" | "llama_chat" => Some(ModelFamily::LlamaChat),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn user(content: impl Into<String>) -> Self {
        Message { role: Role::User, content: content.into() }
    }
}

pub mod templates {
    //! Raw template bodies, byte-identical to the files under `templates/`.

    macro_rules! asset {
        ($name:ident, $file:literal) => {
            pub const $name: &str = include_str!(concat!("../../templates/", $file));
        };
    }

    asset!(TOMI_PERSPECTIVE, "tomi_perspective.txt");
    asset!(TOMI_SIMULATION_GPT, "tomi_simulation_gpt.txt");
    asset!(TOMI_SIMULATION_LLAMA, "tomi_simulation_llama.txt");
    asset!(BIGTOM_PERSPECTIVE_GPT, "bigtom_perspective_gpt.txt");
    asset!(BIGTOM_PERSPECTIVE_LLAMA, "bigtom_perspective_llama.txt");
    asset!(BIGTOM_SIMULATION_GPT, "bigtom_simulation_gpt.txt");
    asset!(BIGTOM_SIMULATION_LLAMA, "bigtom_simulation_llama.txt");
    asset!(TOMI_SINGLE, "tomi_single.txt");
    asset!(BIGTOM_SINGLE, "bigtom_single.txt");
    asset!(TOMI_DOMAIN, "tomi_domain.txt");
    asset!(BIGTOM_DOMAIN, "bigtom_domain.txt");
    asset!(FEW_SHOT_TOMI, "few_shot_tomi.txt");
    asset!(FEW_SHOT_BIGTOM, "few_shot_bigtom.txt");
    asset!(ZERO_SHOT, "zero_shot.txt");
    asset!(ZERO_SHOT_COT, "zero_shot_cot.txt");
    asset!(TOMI_RULES, "tomi_rules.txt");
    asset!(PROBE, "probe.txt");
    asset!(MULTI_REASONING, "multi_reasoning.txt");

    /// `(file name, body)` for every asset.
    pub const ALL: &[(&str, &str)] = &[
        ("tomi_perspective.txt", TOMI_PERSPECTIVE),
        ("tomi_simulation_gpt.txt", TOMI_SIMULATION_GPT),
        ("tomi_simulation_llama.txt", TOMI_SIMULATION_LLAMA),
        ("bigtom_perspective_gpt.txt", BIGTOM_PERSPECTIVE_GPT),
        ("bigtom_perspective_llama.txt", BIGTOM_PERSPECTIVE_LLAMA),
        ("bigtom_simulation_gpt.txt", BIGTOM_SIMULATION_GPT),
        ("bigtom_simulation_llama.txt", BIGTOM_SIMULATION_LLAMA),
        ("tomi_single.txt", TOMI_SINGLE),
        ("bigtom_single.txt", BIGTOM_SINGLE),
        ("tomi_domain.txt", TOMI_DOMAIN),
        ("bigtom_domain.txt", BIGTOM_DOMAIN),
        ("few_shot_tomi.txt", FEW_SHOT_TOMI),
        ("few_shot_bigtom.txt", FEW_SHOT_BIGTOM),
        ("zero_shot.txt", ZERO_SHOT),
        ("zero_shot_cot.txt", ZERO_SHOT_COT),
        ("tomi_rules.txt", TOMI_RULES),
        ("probe.txt", PROBE),
        ("multi_reasoning.txt", MULTI_REASONING),
    ];
}

const PLACEHOLDERS: &[&str] =
    &["story", "character", "name", "question", "perspective", "examples", "instructions", "answer choices"];

/// Asset files end with a newline; prompts do not.
fn body(asset: &str) -> &str {
    asset.strip_suffix('\n').unwrap_or(asset)
}

/// Single-pass substitution: inserted values are never rescanned.
pub fn fill(template: &str, values: &[(&str, &str)]) -> Result<String, PromptError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        match after.find('}') {
            Some(close) if PLACEHOLDERS.contains(&&after[..close]) => {
                let key = &after[..close];
                let value = values
                    .iter()
                    .find(|(k, _)| *k == key)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| PromptError::UnfilledPlaceholder(key.to_string()))?;
                out.push_str(value);
                rest = &after[close + 1..];
            }
            _ => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    Ok(out)
}

/// The in-domain perspective-taking exemplars prepended by `simtom_domain`.
pub fn few_shot_block(benchmark: Benchmark) -> &'static str {
    match benchmark {
        Benchmark::Tomi => body(templates::FEW_SHOT_TOMI),
        Benchmark::BigTom => body(templates::FEW_SHOT_BIGTOM),
    }
}

/// The question followed by its two lettered choices.
pub fn question_with_choices(sample: &Sample) -> String {
    format!("{}\n{}", sample.question, sample.choices_block())
}

/// Renders the messages for one stage of `method` on `sample`.
pub fn render(
    method: Method,
    stage: Stage,
    sample: &Sample,
    family: ModelFamily,
    perspective: Option<&str>,
) -> Result<Vec<Message>, PromptError> {
    use templates::*;

    let benchmark = sample.story.benchmark();
    let story = sample.story.text();
    let character = sample.character.as_str();
    let question = question_with_choices(sample);
    let choices = sample.choices_block();
    let wrong_stage = || PromptError::WrongStage { method, stage };

    if perspective.is_some() && !(stage == Stage::Qa && method.stages() == 2) {
        return Err(PromptError::UnexpectedPerspective);
    }

    let content = match (method, stage) {
        (Method::ZeroShot | Method::ZeroShotCot | Method::ZeroShotRules | Method::CotRules, Stage::Combined) => {
            let base = match method {
                Method::ZeroShot | Method::ZeroShotRules => {
                    format!("{}\n{}\n{}", body(ZERO_SHOT), sample.question, choices)
                }
                _ => fill(body(ZERO_SHOT_COT), &[("question", &sample.question), ("answer choices", &choices)])?,
            };
            let instructions = match method {
                Method::ZeroShotRules | Method::CotRules => {
                    if benchmark != Benchmark::Tomi {
                        return Err(PromptError::UnsupportedBenchmark { method, benchmark });
                    }
                    format!("{}\n\n{}", body(TOMI_RULES), base)
                }
                _ => base,
            };
            fill(body(PROBE), &[("story", &story), ("instructions", &instructions)])?
        }
        (Method::SimtomSingle, Stage::Combined) => {
            let template = match benchmark {
                Benchmark::Tomi => TOMI_SINGLE,
                Benchmark::BigTom => BIGTOM_SINGLE,
            };
            fill(
                body(template),
                &[("story", &story), ("character", character), ("name", character), ("question", &question)],
            )?
        }
        (Method::Simtom | Method::SimtomOracle, Stage::Perspective) => {
            let template = match (benchmark, family) {
                (Benchmark::Tomi, _) => TOMI_PERSPECTIVE,
                (Benchmark::BigTom, ModelFamily::Gpt) => BIGTOM_PERSPECTIVE_GPT,
                (Benchmark::BigTom, ModelFamily::LlamaChat) => BIGTOM_PERSPECTIVE_LLAMA,
            };
            fill(body(template), &[("story", &story), ("character", character), ("name", character)])?
        }
        (Method::SimtomDomain, Stage::Perspective) => {
            let template = match benchmark {
                Benchmark::Tomi => TOMI_DOMAIN,
                Benchmark::BigTom => BIGTOM_DOMAIN,
            };
            fill(
                body(template),
                &[("examples", few_shot_block(benchmark)), ("story", &story), ("character", character)],
            )?
        }
        (Method::SimtomMulti, Stage::Perspective) => fill(body(MULTI_REASONING), &[("story", &story)])?,
        (Method::Simtom | Method::SimtomMulti | Method::SimtomDomain | Method::SimtomOracle, Stage::Qa) => {
            let perspective = perspective.ok_or(PromptError::MissingPerspective(method))?;
            let template = match (benchmark, family) {
                (Benchmark::Tomi, ModelFamily::Gpt) => TOMI_SIMULATION_GPT,
                (Benchmark::Tomi, ModelFamily::LlamaChat) => TOMI_SIMULATION_LLAMA,
                (Benchmark::BigTom, ModelFamily::Gpt) => BIGTOM_SIMULATION_GPT,
                (Benchmark::BigTom, ModelFamily::LlamaChat) => BIGTOM_SIMULATION_LLAMA,
            };
            fill(body(template), &[("perspective", perspective), ("name", character), ("question", &question)])?
        }
        _ => return Err(wrong_stage()),
    };
    Ok(vec![Message::user(content)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_tomi_corpus, Choice, QuestionType, Story};

    fn tomi_sample() -> Sample {
        generate_tomi_corpus(7, 1).remove(3)
    }

    fn bigtom_sample() -> Sample {
        Sample {
            id: "b".into(),
            story: Story::bigtom("b", "Noor is a barista. Noor fills a cup with whole milk."),
            question: "Does Noor believe the cup has whole milk or oat milk?".into(),
            qtype: QuestionType::all_bigtom()[2],
            character: "Noor".into(),
            choices: ("whole milk".into(), "oat milk".into()),
            correct: Choice::A,
        }
    }

    #[test]
    fn stage_counts() {
        for m in Method::ALL {
            let two = matches!(m, Method::Simtom | Method::SimtomMulti | Method::SimtomDomain | Method::SimtomOracle);
            assert_eq!(m.stages(), if two { 2 } else { 1 }, "{m}");
            assert_eq!(Method::parse(m.as_str()), Some(m));
        }
    }

    #[test]
    fn perspective_prompt_ends_with_instruction() {
        let s = tomi_sample();
        let msgs = render(Method::Simtom, Stage::Perspective, &s, ModelFamily::Gpt, None).unwrap();
        assert_eq!(msgs.len(), 1);
        assert!(msgs[0].content.ends_with("do not provide an explanation."));
        assert!(msgs[0].content.contains(&s.story.text()));
        assert!(!msgs[0].content.contains(&s.question));
    }

    #[test]
    fn cot_and_single_markers() {
        let s = tomi_sample();
        let cot = render(Method::ZeroShotCot, Stage::Combined, &s, ModelFamily::Gpt, None).unwrap();
        assert!(cot[0].content.contains("Reason step by step before answering"));
        assert!(cot[0].content.contains(&s.question) && cot[0].content.contains("b) "));
        let single = render(Method::SimtomSingle, Stage::Combined, &s, ModelFamily::Gpt, None).unwrap();
        assert!(single[0].content.contains("Your task is in two steps."));
        let b = render(Method::SimtomSingle, Stage::Combined, &bigtom_sample(), ModelFamily::Gpt, None).unwrap();
        assert_eq!(b[0].content.matches("Noor fills a cup").count(), 2);
    }

    #[test]
    fn qa_requires_perspective() {
        let s = tomi_sample();
        assert_eq!(
            render(Method::Simtom, Stage::Qa, &s, ModelFamily::Gpt, None),
            Err(PromptError::MissingPerspective(Method::Simtom))
        );
        assert_eq!(
            render(Method::ZeroShot, Stage::Combined, &s, ModelFamily::Gpt, Some("x")),
            Err(PromptError::UnexpectedPerspective)
        );
        assert!(matches!(
            render(Method::ZeroShot, Stage::Qa, &s, ModelFamily::Gpt, None),
            Err(PromptError::WrongStage { .. })
        ));
        assert!(matches!(
            render(Method::Simtom, Stage::Combined, &s, ModelFamily::Gpt, None),
            Err(PromptError::WrongStage { .. })
        ));
    }

    #[test]
    fn qa_uses_only_the_perspective() {
        let s = tomi_sample();
        let msgs =
            render(Method::Simtom, Stage::Qa, &s, ModelFamily::LlamaChat, Some("2 X entered the hall.")).unwrap();
        let c = &msgs[0].content;
        assert!(c.starts_with("2 X entered the hall.\n\nYou are "));
        assert!(c.contains(&format!("You are {}.", s.character)));
        assert!(c.contains("do not say there is not enough information"));
        assert!(!c.contains(&s.story.text()));
    }

    #[test]
    fn domain_prompt_embeds_exemplars() {
        let s = tomi_sample();
        let block = few_shot_block(Benchmark::Tomi);
        assert!(block.contains("2 William entered the dining room."));
        assert!(few_shot_block(Benchmark::BigTom).contains("Knows about or notices change: No"));
        let msgs = render(Method::SimtomDomain, Stage::Perspective, &s, ModelFamily::Gpt, None).unwrap();
        assert!(msgs[0].content.contains(block));
        assert!(msgs[0].content.ends_with(&format!("What events does {} know about?", s.character)));
        let b = render(Method::SimtomDomain, Stage::Perspective, &bigtom_sample(), ModelFamily::Gpt, None).unwrap();
        assert!(b[0].content.contains(few_shot_block(Benchmark::BigTom)));
    }

    #[test]
    fn rules_baselines_are_tomi_only() {
        let s = tomi_sample();
        let r = render(Method::ZeroShotRules, Stage::Combined, &s, ModelFamily::Gpt, None).unwrap();
        assert!(r[0].content.contains("1. A character knows about all events that they do."));
        assert!(matches!(
            render(Method::CotRules, Stage::Combined, &bigtom_sample(), ModelFamily::Gpt, None),
            Err(PromptError::UnsupportedBenchmark { .. })
        ));
    }

    #[test]
    fn fill_reports_missing_and_ignores_foreign_braces() {
        assert_eq!(fill("{story} {x}", &[("story", "{question}")]).unwrap(), "{question} {x}");
        assert_eq!(fill("{question}", &[]), Err(PromptError::UnfilledPlaceholder("question".into())));
    }

    #[test]
    fn rendered_prompts_have_no_placeholders() {
        let samples = [tomi_sample(), bigtom_sample()];
        for s in &samples {
            for m in Method::ALL {
                for (stage, p) in [(Stage::Combined, None), (Stage::Perspective, None), (Stage::Qa, Some("ctx"))] {
                    if let Ok(msgs) = render(m, stage, s, ModelFamily::Gpt, p) {
                        for key in PLACEHOLDERS {
                            assert!(!msgs[0].content.contains(&format!("{{{key}}}")), "{m} {stage} {key}");
                        }
                    }
                }
            }
        }
    }
}
