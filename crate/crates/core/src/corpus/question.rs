//! ToMI question templates and the character-name rules.

use alloc::format;
use alloc::string::{String, ToString};

use super::{Benchmark, CorpusError};

pub fn first_order_question(character: &str, object: &str) -> String {
    format!("Where will {character} look for the {object}?")
}

pub fn second_order_question(outer: &str, inner: &str, object: &str) -> String {
    format!("Where does {outer} think that {inner} searches for the {object}?")
}

pub fn memory_question(object: &str) -> String {
    format!("Where was the {object} at the beginning?")
}

pub fn reality_question(object: &str) -> String {
    format!("Where is the {object} really?")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuestionShape {
    FirstOrder { character: String },
    SecondOrder { outer: String, inner: String },
    Memory,
    Reality,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TomiQuestionText {
    pub shape: QuestionShape,
    pub object: String,
}

fn strip_punct(word: &str) -> &str {
    word.trim_matches(|c: char| c.is_ascii_punctuation())
}

/// Recognises the ToMI question templates, including the
/// `Where does X think the O is?` phrasing of the original release.
pub fn parse_tomi_question(text: &str) -> Result<TomiQuestionText, CorpusError> {
    let unknown = || CorpusError::UnknownQuestion(text.to_string());
    let q = text.trim();
    let body = q.strip_suffix('?').ok_or_else(unknown)?;

    if let Some(object) = body.strip_prefix("Where was the ").and_then(|r| r.strip_suffix(" at the beginning")) {
        return Ok(TomiQuestionText { shape: QuestionShape::Memory, object: object.to_string() });
    }
    if let Some(object) = body.strip_prefix("Where is the ").and_then(|r| r.strip_suffix(" really")) {
        return Ok(TomiQuestionText { shape: QuestionShape::Reality, object: object.to_string() });
    }

    let words: alloc::vec::Vec<&str> = body.split_whitespace().collect();
    if words.len() < 3 || words[0] != "Where" {
        return Err(unknown());
    }
    let first = strip_punct(words[2]).to_string();

    for marker in [" think that ", " thinks that "] {
        if let Some((_, after)) = body.split_once(marker) {
            let (inner, rest) = after.split_once(' ').ok_or_else(unknown)?;
            let object = object_after(rest).ok_or_else(unknown)?;
            return Ok(TomiQuestionText {
                shape: QuestionShape::SecondOrder { outer: first, inner: strip_punct(inner).to_string() },
                object,
            });
        }
    }
    let object = object_after(body).ok_or_else(unknown)?;
    Ok(TomiQuestionText { shape: QuestionShape::FirstOrder { character: first }, object })
}

fn object_after(rest: &str) -> Option<String> {
    if let Some((_, object)) = rest.rsplit_once(" for the ") {
        return Some(object.to_string());
    }
    // `... think the O is`
    let (_, tail) = rest.rsplit_once(" the ")?;
    tail.strip_suffix(" is").map(ToString::to_string)
}

/// First word of a text with surrounding punctuation removed.
pub(crate) fn first_word_name(text: &str) -> Option<String> {
    let word = strip_punct(text.split_whitespace().next()?);
    (!word.is_empty()).then(|| word.to_string())
}

/// The queried character: the third word of a ToMI question, or the first
/// word of a BigTOM story.
pub fn extract_question_character(
    question: &str,
    benchmark: Benchmark,
    story_text: &str,
) -> Result<String, CorpusError> {
    match benchmark {
        Benchmark::Tomi => {
            let word = question
                .split_whitespace()
                .nth(2)
                .ok_or_else(|| CorpusError::QuestionTooShort(question.to_string()))?;
            Ok(strip_punct(word).to_string())
        }
        Benchmark::BigTom => first_word_name(story_text).ok_or(CorpusError::EmptyText),
    }
}
