//! Symbolic perspective-taking and belief tracking over ToMI event lists.
//!
//! A character knows every event they perform and every other event that
//! takes place in the location they currently occupy. Nothing before their
//! first entrance is known, nothing that happens while they are away is
//! known, and distractor lines are never part of a perspective.
//!
//! Declarations are placed in a scene by first binding every container to
//! the location its `ContainerDeclare` names; an object declaration then
//! happens wherever its container is. A move happens where the mover is.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{
    parse_tomi_question, render_events, Benchmark, Choice, CorpusError, Event, EventKind, QuestionShape, Sample, Story,
    TomiQuestionText,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("character {0:?} does not appear in the story")]
    UnknownCharacter(String),
    #[error("{0} stories have no symbolic oracle")]
    UnsupportedBenchmark(Benchmark),
    #[error("event {index} moves {object:?}, which was never declared")]
    UndeclaredObject { index: u32, object: String },
    #[error("neither answer choice matches the derived answer {0:?}")]
    NoMatchingChoice(String),
    #[error("the story never places {0:?}")]
    UnplacedObject(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// The event indices one character knows about, in story order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perspective {
    pub character: String,
    pub known_indices: Vec<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WorldState {
    pub object_in: BTreeMap<String, String>,
    pub container_in: BTreeMap<String, String>,
    /// `None` once a character has left; characters never seen are absent.
    pub character_at: BTreeMap<String, Option<String>>,
    /// Where each object was first put. Written once.
    pub first_container: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simulation {
    pub final_state: WorldState,
    /// State after each event; one entry per event.
    pub timeline: Vec<WorldState>,
}

/// Where one character (or a chain of characters) believes each object is.
/// Objects the observer never saw placed are missing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BeliefState {
    pub believes_in: BTreeMap<String, String>,
}

impl BeliefState {
    pub fn location_of(&self, object: &str) -> Option<&str> {
        self.believes_in.get(object).map(String::as_str)
    }
}

fn story_events(story: &Story) -> Result<&[Event], OracleError> {
    story.events().ok_or(OracleError::UnsupportedBenchmark(Benchmark::BigTom))
}

fn check_character(story: &Story, character: &str) -> Result<(), OracleError> {
    if story.characters().contains(character) {
        Ok(())
    } else {
        Err(OracleError::UnknownCharacter(character.to_string()))
    }
}

/// Container → location from every `ContainerDeclare`, later lines winning.
fn bind_containers(events: &[Event]) -> BTreeMap<&str, &str> {
    events
        .iter()
        .filter_map(|e| match &e.kind {
            EventKind::ContainerDeclare { container, location } => Some((container.as_str(), location.as_str())),
            _ => None,
        })
        .collect()
}

/// The events of `events` that `character` knows about.
pub fn known_events<'a>(events: &'a [Event], character: &str) -> Vec<&'a Event> {
    let containers = bind_containers(events);
    let mut whereabouts: BTreeMap<&str, &str> = BTreeMap::new();
    let mut known = Vec::new();
    for e in events {
        let scene = match &e.kind {
            EventKind::Enter { location, .. } | EventKind::Exit { location, .. } => Some(location.as_str()),
            EventKind::ObjectDeclare { container, .. } => containers.get(container.as_str()).copied(),
            EventKind::ContainerDeclare { location, .. } => Some(location.as_str()),
            EventKind::Move { character: mover, container, .. } => {
                whereabouts.get(mover.as_str()).copied().or_else(|| containers.get(container.as_str()).copied())
            }
            EventKind::Distractor { .. } => None,
        };
        if !e.kind.is_distractor() {
            let own = e.kind.actor() == Some(character);
            let here = whereabouts.get(character).copied();
            if own || (here.is_some() && here == scene) {
                known.push(e);
            }
        }
        match &e.kind {
            EventKind::Enter { character: who, location } => {
                whereabouts.insert(who, location);
            }
            EventKind::Exit { character: who, .. } => {
                whereabouts.remove(who.as_str());
            }
            _ => {}
        }
    }
    known
}

pub fn perspective_filter(story: &Story, character: &str) -> Result<Perspective, OracleError> {
    let events = story_events(story)?;
    check_character(story, character)?;
    Ok(Perspective {
        character: character.to_string(),
        known_indices: known_events(events, character).iter().map(|e| e.index).collect(),
    })
}

/// Replays the story, failing on moves of undeclared objects.
pub fn simulate_events(events: &[Event]) -> Result<Simulation, OracleError> {
    let mut state = WorldState::default();
    let mut timeline = Vec::with_capacity(events.len());
    for e in events {
        match &e.kind {
            EventKind::Enter { character, location } => {
                state.character_at.insert(character.clone(), Some(location.clone()));
            }
            EventKind::Exit { character, .. } => {
                state.character_at.insert(character.clone(), None);
            }
            EventKind::ObjectDeclare { object, container } => {
                state.object_in.insert(object.clone(), container.clone());
                state.first_container.entry(object.clone()).or_insert_with(|| container.clone());
            }
            EventKind::ContainerDeclare { container, location } => {
                state.container_in.insert(container.clone(), location.clone());
            }
            EventKind::Move { object, container, .. } => {
                if !state.object_in.contains_key(object) {
                    return Err(OracleError::UndeclaredObject { index: e.index, object: object.clone() });
                }
                state.object_in.insert(object.clone(), container.clone());
            }
            EventKind::Distractor { .. } => {}
        }
        timeline.push(state.clone());
    }
    Ok(Simulation { final_state: state, timeline })
}

pub fn simulate_world(story: &Story) -> Result<Simulation, OracleError> {
    simulate_events(story_events(story)?)
}

/// Last placement of every object within `events`.
fn placements<'a, I: IntoIterator<Item = &'a Event>>(events: I) -> BeliefState {
    let mut believes_in = BTreeMap::new();
    for e in events {
        if let EventKind::ObjectDeclare { object, container } | EventKind::Move { object, container, .. } = &e.kind {
            believes_in.insert(object.clone(), container.clone());
        }
    }
    BeliefState { believes_in }
}

/// Belief of `character` reconstructed from `events` alone.
pub fn belief_in(events: &[Event], character: &str) -> BeliefState {
    placements(known_events(events, character))
}

/// What `outer` can reconstruct of `inner`'s belief from `events`.
pub fn nested_belief_in(events: &[Event], outer: &str, inner: &str) -> BeliefState {
    let seen: Vec<Event> = known_events(events, outer).into_iter().cloned().collect();
    belief_in(&seen, inner)
}

pub fn belief_of(story: &Story, character: &str) -> Result<BeliefState, OracleError> {
    let events = story_events(story)?;
    check_character(story, character)?;
    Ok(belief_in(events, character))
}

pub fn nested_belief(story: &Story, outer: &str, inner: &str) -> Result<BeliefState, OracleError> {
    let events = story_events(story)?;
    check_character(story, outer)?;
    check_character(story, inner)?;
    Ok(nested_belief_in(events, outer, inner))
}

/// The container answering a ToMI question, using only `events` as context.
pub fn answer_in_context(events: &[Event], question: &TomiQuestionText) -> Option<String> {
    let object = question.object.as_str();
    let found = match &question.shape {
        QuestionShape::Reality => placements(events).believes_in.remove(object),
        QuestionShape::Memory => events.iter().find_map(|e| match &e.kind {
            EventKind::ObjectDeclare { object: o, container } | EventKind::Move { object: o, container, .. }
                if o == object =>
            {
                Some(container.clone())
            }
            _ => None,
        }),
        QuestionShape::FirstOrder { character } => belief_in(events, character).believes_in.remove(object),
        QuestionShape::SecondOrder { outer, inner } => {
            nested_belief_in(events, outer, inner).believes_in.remove(object)
        }
    };
    found
}

/// Which choice is correct according to the symbolic oracle.
pub fn answer_ground_truth(sample: &Sample) -> Result<Choice, OracleError> {
    let events = story_events(&sample.story)?;
    let question = parse_tomi_question(&sample.question)?;
    match &question.shape {
        QuestionShape::FirstOrder { character } => check_character(&sample.story, character)?,
        QuestionShape::SecondOrder { outer, inner } => {
            check_character(&sample.story, outer)?;
            check_character(&sample.story, inner)?;
        }
        QuestionShape::Memory | QuestionShape::Reality => {}
    }
    let container = match question.shape {
        QuestionShape::Reality => simulate_events(events)?.final_state.object_in.remove(&question.object),
        QuestionShape::Memory => simulate_events(events)?.final_state.first_container.remove(&question.object),
        _ => answer_in_context(events, &question),
    }
    .ok_or_else(|| OracleError::UnplacedObject(question.object.clone()))?;
    if container == sample.choices.0 {
        Ok(Choice::A)
    } else if container == sample.choices.1 {
        Ok(Choice::B)
    } else {
        Err(OracleError::NoMatchingChoice(container))
    }
}

/// The sample's story restricted to what its character knows, keeping the
/// original line numbers.
pub fn oracle_perspective_text(sample: &Sample) -> Result<String, OracleError> {
    let events = story_events(&sample.story)?;
    check_character(&sample.story, &sample.character)?;
    let known: Vec<Event> = known_events(events, &sample.character).into_iter().cloned().collect();
    Ok(render_events(&known))
}
