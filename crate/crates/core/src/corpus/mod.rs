//! Story and question data model for ToMI-style and BigTOM-style samples.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

mod generate;
mod question;
mod text;
mod vocab;

pub use generate::{attach_choices, generate_tomi_corpus, DraftSample};
pub use question::{
    extract_question_character, first_order_question, memory_question, parse_tomi_question, reality_question,
    second_order_question, QuestionShape, TomiQuestionText,
};
pub use text::{parse_event_lines, parse_tomi_story, render_events, render_line, render_story};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("story has no events")]
    EmptyStory,
    #[error("story {0} is raw text and cannot be rendered as numbered events")]
    NotEventStory(String),
    #[error("question has fewer than three words: {0:?}")]
    QuestionTooShort(String),
    #[error("story text is empty")]
    EmptyText,
    #[error("expected exactly two candidate containers for {object:?}, found {found}")]
    CandidateCount { object: String, found: usize },
    #[error("answer choices must be distinct and non-empty")]
    BadChoices,
    #[error("unrecognised question: {0:?}")]
    UnknownQuestion(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Benchmark {
    Tomi,
    BigTom,
}

impl Benchmark {
    pub fn as_str(self) -> &'static str {
        match self {
            Benchmark::Tomi => "tomi",
            Benchmark::BigTom => "bigtom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tomi" => Some(Benchmark::Tomi),
            "bigtom" => Some(Benchmark::BigTom),
            _ => None,
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One numbered line of a ToMI story.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    /// 1-based line number.
    pub index: u32,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Enter {
        character: String,
        location: String,
    },
    Exit {
        character: String,
        location: String,
    },
    ObjectDeclare {
        object: String,
        container: String,
    },
    ContainerDeclare {
        container: String,
        location: String,
    },
    Move {
        character: String,
        object: String,
        container: String,
    },
    /// A line irrelevant to object locations. `text` is the full sentence as written.
    Distractor {
        character: String,
        text: String,
    },
}

impl EventKind {
    /// The character performing the event, if any.
    pub fn actor(&self) -> Option<&str> {
        match self {
            EventKind::Enter { character, .. }
            | EventKind::Exit { character, .. }
            | EventKind::Move { character, .. }
            | EventKind::Distractor { character, .. } => Some(character),
            EventKind::ObjectDeclare { .. } | EventKind::ContainerDeclare { .. } => None,
        }
    }

    pub fn is_distractor(&self) -> bool {
        matches!(self, EventKind::Distractor { .. })
    }
}

impl Event {
    pub fn new(index: u32, kind: EventKind) -> Self {
        Event { index, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoryContent {
    Events(Vec<Event>),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Story {
    pub id: String,
    pub content: StoryContent,
}

impl Story {
    pub fn tomi(id: impl Into<String>, events: Vec<Event>) -> Self {
        Story { id: id.into(), content: StoryContent::Events(events) }
    }

    pub fn bigtom(id: impl Into<String>, text: impl Into<String>) -> Self {
        Story { id: id.into(), content: StoryContent::Text(text.into()) }
    }

    pub fn benchmark(&self) -> Benchmark {
        match self.content {
            StoryContent::Events(_) => Benchmark::Tomi,
            StoryContent::Text(_) => Benchmark::BigTom,
        }
    }

    pub fn events(&self) -> Option<&[Event]> {
        match &self.content {
            StoryContent::Events(events) => Some(events),
            StoryContent::Text(_) => None,
        }
    }

    /// The story as prompt text: numbered lines for ToMI, raw text for BigTOM.
    pub fn text(&self) -> String {
        match &self.content {
            StoryContent::Events(events) => render_events(events),
            StoryContent::Text(text) => text.clone(),
        }
    }

    /// Characters who enter, exit or move something. For BigTOM stories the
    /// protagonist named by the first word.
    pub fn characters(&self) -> BTreeSet<String> {
        match &self.content {
            StoryContent::Events(events) => events
                .iter()
                .filter_map(|e| match &e.kind {
                    EventKind::Enter { character, .. }
                    | EventKind::Exit { character, .. }
                    | EventKind::Move { character, .. } => Some(character.clone()),
                    _ => None,
                })
                .collect(),
            StoryContent::Text(text) => question::first_word_name(text).into_iter().collect(),
        }
    }

    pub fn locations(&self) -> BTreeSet<String> {
        match &self.content {
            StoryContent::Events(events) => events
                .iter()
                .filter_map(|e| match &e.kind {
                    EventKind::Enter { location, .. }
                    | EventKind::Exit { location, .. }
                    | EventKind::ContainerDeclare { location, .. } => Some(location.clone()),
                    _ => None,
                })
                .collect(),
            StoryContent::Text(_) => BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BeliefKind {
    TrueBelief,
    FalseBelief,
}

impl BeliefKind {
    fn as_str(self) -> &'static str {
        match self {
            BeliefKind::TrueBelief => "true_belief",
            BeliefKind::FalseBelief => "false_belief",
        }
    }
}

/// The ten ToMI question types.
///
/// `belief` is the story type: in a false-belief story the observer leaves
/// before the decisive move. `tom` marks questions whose belief chain runs
/// through that observer; `no_tom` questions are the controls asked about
/// characters who witness everything relevant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TomiQuestion {
    Belief { order: Order, belief: BeliefKind, tom: bool },
    Memory,
    Reality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BigTomAxis {
    ForwardAction,
    ForwardBelief,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigTomQuestion {
    pub axis: BigTomAxis,
    pub belief: BeliefKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QuestionType {
    Tomi(TomiQuestion),
    BigTom(BigTomQuestion),
}

impl QuestionType {
    pub fn all_tomi() -> [QuestionType; 10] {
        use BeliefKind::*;
        use Order::*;
        let b = |order, belief, tom| QuestionType::Tomi(TomiQuestion::Belief { order, belief, tom });
        [
            b(First, TrueBelief, false),
            b(First, TrueBelief, true),
            b(First, FalseBelief, false),
            b(First, FalseBelief, true),
            b(Second, TrueBelief, false),
            b(Second, TrueBelief, true),
            b(Second, FalseBelief, false),
            b(Second, FalseBelief, true),
            QuestionType::Tomi(TomiQuestion::Memory),
            QuestionType::Tomi(TomiQuestion::Reality),
        ]
    }

    pub fn all_bigtom() -> [QuestionType; 4] {
        use BeliefKind::*;
        use BigTomAxis::*;
        let q = |axis, belief| QuestionType::BigTom(BigTomQuestion { axis, belief });
        [
            q(ForwardAction, FalseBelief),
            q(ForwardAction, TrueBelief),
            q(ForwardBelief, FalseBelief),
            q(ForwardBelief, TrueBelief),
        ]
    }

    pub fn benchmark(&self) -> Benchmark {
        match self {
            QuestionType::Tomi(_) => Benchmark::Tomi,
            QuestionType::BigTom(_) => Benchmark::BigTom,
        }
    }

    /// Stable snake_case label, e.g. `first_order_false_belief_tom`.
    pub fn label(&self) -> String {
        match self {
            QuestionType::Tomi(TomiQuestion::Memory) => "memory".to_string(),
            QuestionType::Tomi(TomiQuestion::Reality) => "reality".to_string(),
            QuestionType::Tomi(TomiQuestion::Belief { order, belief, tom }) => {
                let order = match order {
                    Order::First => "first_order",
                    Order::Second => "second_order",
                };
                let tom = if *tom { "tom" } else { "no_tom" };
                alloc::format!("{order}_{}_{tom}", belief.as_str())
            }
            QuestionType::BigTom(q) => {
                let axis = match q.axis {
                    BigTomAxis::ForwardAction => "forward_action",
                    BigTomAxis::ForwardBelief => "forward_belief",
                };
                alloc::format!("{axis}_{}", q.belief.as_str())
            }
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        QuestionType::all_tomi().into_iter().chain(QuestionType::all_bigtom()).find(|q| q.label() == label)
    }

    /// `"first"`, `"second"` or `"none"`.
    pub fn order_label(&self) -> &'static str {
        match self {
            QuestionType::Tomi(TomiQuestion::Belief { order: Order::First, .. }) => "first",
            QuestionType::Tomi(TomiQuestion::Belief { order: Order::Second, .. }) => "second",
            _ => "none",
        }
    }

    /// `"tom"`, `"no_tom"` or `"none"`.
    pub fn tom_label(&self) -> &'static str {
        match self {
            QuestionType::Tomi(TomiQuestion::Belief { tom: true, .. }) => "tom",
            QuestionType::Tomi(TomiQuestion::Belief { tom: false, .. }) => "no_tom",
            _ => "none",
        }
    }
}

impl fmt::Display for QuestionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Choice {
    A,
    B,
}

impl Choice {
    pub fn letter(self) -> char {
        match self {
            Choice::A => 'a',
            Choice::B => 'b',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_lowercase() {
            'a' => Some(Choice::A),
            'b' => Some(Choice::B),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Choice::A => Choice::B,
            Choice::B => Choice::A,
        }
    }
}

/// A binary multiple-choice question about a story.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub id: String,
    pub story: Story,
    pub question: String,
    pub qtype: QuestionType,
    /// The character whose perspective the question is about.
    pub character: String,
    pub choices: (String, String),
    pub correct: Choice,
}

impl Sample {
    pub fn choice(&self, which: Choice) -> &str {
        match which {
            Choice::A => &self.choices.0,
            Choice::B => &self.choices.1,
        }
    }

    pub fn correct_text(&self) -> &str {
        self.choice(self.correct)
    }

    /// `a) first\nb) second`, the layout used in every prompt.
    pub fn choices_block(&self) -> String {
        alloc::format!("a) {}\nb) {}", self.choices.0, self.choices.1)
    }

    /// Checks the choice and character invariants.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let (a, b) = (&self.choices.0, &self.choices.1);
        if a.trim().is_empty() || b.trim().is_empty() || a == b {
            return Err(CorpusError::BadChoices);
        }
        Ok(())
    }
}
