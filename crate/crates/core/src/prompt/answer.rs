//! Mapping free-text model output onto one of the two answer choices.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::Choice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ChoiceA,
    ChoiceB,
    /// The model refused or said it could not tell.
    Declined,
    /// Both or neither choice could be read from the output.
    Ambiguous,
}

impl Verdict {
    pub fn choice(self) -> Option<Choice> {
        match self {
            Verdict::ChoiceA => Some(Choice::A),
            Verdict::ChoiceB => Some(Choice::B),
            _ => None,
        }
    }

    fn of(choice: Choice) -> Self {
        match choice {
            Choice::A => Verdict::ChoiceA,
            Choice::B => Verdict::ChoiceB,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedAnswer {
    pub verdict: Verdict,
    pub raw: String,
    /// The part of `raw` the verdict was read from.
    pub matched_span: Option<String>,
}

const DECLINES: &[&str] = &[
    "not enough information",
    "insufficient information",
    "not enough context",
    "cannot determine",
    "can't determine",
    "cannot be determined",
    "can't be determined",
    "unable to determine",
    "impossible to determine",
    "impossible to know",
    "no way to know",
    "cannot answer",
    "can't answer",
    "unable to answer",
    "i'm sorry",
    "i am sorry",
    "i apologize",
    "as an ai",
    "none of the above",
];

/// Reads a verdict from `raw`. Never fails: unreadable output is
/// `Ambiguous`.
///
/// In order: an `Answer:` marker followed by a letter, a bare option
/// letter, a refusal phrase, then whole-word mention of exactly one choice
/// in the final line or else the whole text.
pub fn parse_answer(raw: &str, choices: (&str, &str)) -> ParsedAnswer {
    let (verdict, span) = classify(raw, choices);
    ParsedAnswer { verdict, raw: raw.to_string(), matched_span: span.map(ToString::to_string) }
}

fn classify<'a>(raw: &'a str, choices: (&str, &str)) -> (Verdict, Option<&'a str>) {
    let lower = raw.to_ascii_lowercase();
    let lines: Vec<(usize, &str)> = line_spans(raw).filter(|(_, l)| !l.trim().is_empty()).collect();

    // Answer markers, last one wins.
    if let Some(pos) = lower.rfind("answer:") {
        let after = &raw[pos + "answer:".len()..];
        let line_end = after.find('\n').map_or(raw.len(), |i| pos + "answer:".len() + i);
        let span = &raw[pos..line_end];
        if let Some((choice, rest)) = leading_letter(after.lines().next().unwrap_or("")) {
            return (letter_verdict(choice, rest, choices), Some(span.trim()));
        }
    }

    // An option letter opening the final or the first line.
    for &(_, line) in lines.last().into_iter().chain(lines.first()) {
        let t = line.trim();
        if let Some((choice, rest)) = leading_letter(t) {
            return (letter_verdict(choice, rest, choices), Some(t));
        }
    }

    if DECLINES.iter().any(|p| lower.contains(p)) {
        return (Verdict::Declined, None);
    }

    if let Some(&(_, last)) = lines.last() {
        match mentioned(last, choices) {
            (true, false) => return (Verdict::ChoiceA, Some(last.trim())),
            (false, true) => return (Verdict::ChoiceB, Some(last.trim())),
            (true, true) => return (Verdict::Ambiguous, Some(last.trim())),
            (false, false) => {}
        }
    }
    match mentioned(raw, choices) {
        (true, false) => (Verdict::ChoiceA, None),
        (false, true) => (Verdict::ChoiceB, None),
        _ => (Verdict::Ambiguous, None),
    }
}

fn line_spans(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut start = 0;
    text.split('\n').map(move |l| {
        let s = start;
        start += l.len() + 1;
        (s, l)
    })
}

/// `a)`, `(b)`, `A.`, `b:` or a lone letter at the start of `text`.
/// Returns the choice and the text following the letter's punctuation.
fn leading_letter(text: &str) -> Option<(Choice, &str)> {
    let t = text.trim_start();
    let (t, paren) = match t.strip_prefix('(') {
        Some(r) => (r, true),
        None => (t, false),
    };
    let mut chars = t.chars();
    let c = chars.next()?;
    let choice = Choice::from_letter(c.to_ascii_lowercase())?;
    let rest = chars.as_str();
    match rest.chars().next() {
        None => Some((choice, "")),
        Some(')') => Some((choice, rest[1..].trim())),
        Some('.' | ':') if !paren => {
            let r = rest[1..].trim();
            // `A. Smith` style prose is not a letter answer.
            if r.is_empty() || r.starts_with(|ch: char| ch.is_ascii_lowercase()) || r.len() < 40 {
                Some((choice, r))
            } else {
                None
            }
        }
        Some(ch) if ch.is_whitespace() && rest.trim().is_empty() => Some((choice, "")),
        _ => None,
    }
}

/// Trusts the letter unless the text after it names only the other choice.
fn letter_verdict(choice: Choice, rest: &str, choices: (&str, &str)) -> Verdict {
    let (a, b) = mentioned(rest, choices);
    let (own, other) = match choice {
        Choice::A => (a, b),
        Choice::B => (b, a),
    };
    if other && !own {
        Verdict::Ambiguous
    } else {
        Verdict::of(choice)
    }
}

/// Whole-word, case-insensitive occurrence of each choice in `text`. When
/// one choice contains the other, the longer one is masked out first so
/// that `box` is not found inside `red box`.
fn mentioned(text: &str, choices: (&str, &str)) -> (bool, bool) {
    let a = choices.0.trim().to_ascii_lowercase();
    let b = choices.1.trim().to_ascii_lowercase();
    if a.is_empty() || b.is_empty() || a == b {
        return (false, false);
    }
    let hay = text.to_ascii_lowercase();
    if a.len() >= b.len() && contains_word(&a, &b) {
        let (found, masked) = find_and_mask(&hay, &a);
        (found, find_and_mask(&masked, &b).0)
    } else if b.len() > a.len() && contains_word(&b, &a) {
        let (found, masked) = find_and_mask(&hay, &b);
        (find_and_mask(&masked, &a).0, found)
    } else {
        (find_and_mask(&hay, &a).0, find_and_mask(&hay, &b).0)
    }
}

fn contains_word(hay: &str, needle: &str) -> bool {
    find_and_mask(hay, needle).0
}

fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric()
}

/// Whether `needle` occurs as a whole word, and `hay` with every such
/// occurrence replaced by spaces.
fn find_and_mask(hay: &str, needle: &str) -> (bool, String) {
    let bytes = hay.as_bytes();
    let mut masked = String::with_capacity(hay.len());
    let mut found = false;
    let mut from = 0;
    let mut copied = 0;
    while let Some(i) = hay[from..].find(needle) {
        let start = from + i;
        let end = start + needle.len();
        let before = start == 0 || !is_word_byte(bytes[start - 1]);
        let after = end == bytes.len() || !is_word_byte(bytes[end]);
        if before && after {
            found = true;
            masked.push_str(&hay[copied..start]);
            masked.extend(core::iter::repeat_n(' ', needle.len()));
            copied = end;
            from = end;
        } else {
            from = start + hay[start..].chars().next().map_or(1, char::len_utf8);
        }
        if from >= hay.len() {
            break;
        }
    }
    masked.push_str(&hay[copied..]);
    (found, masked)
}
