//! Numbered-line ToMI text: `N <sentence>` per line.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{CorpusError, Event, EventKind, Story};

/// Renders one event as its sentence (without the line number).
pub fn sentence(kind: &EventKind) -> String {
    match kind {
        EventKind::Enter { character, location } => format!("{character} entered the {location}."),
        EventKind::Exit { character, location } => format!("{character} exited the {location}."),
        EventKind::ObjectDeclare { object, container } => format!("The {object} is in the {container}."),
        EventKind::ContainerDeclare { container, location } => {
            format!("The {container} is in the {location}.")
        }
        EventKind::Move { character, object, container } => {
            format!("{character} moved the {object} to the {container}.")
        }
        EventKind::Distractor { text, .. } => text.clone(),
    }
}

pub fn render_line(event: &Event) -> String {
    format!("{} {}", event.index, sentence(&event.kind))
}

/// Numbered lines joined by `\n`, no trailing newline.
pub fn render_events(events: &[Event]) -> String {
    let mut out = String::new();
    for (i, e) in events.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&render_line(e));
    }
    out
}

pub fn render_story(story: &Story) -> Result<String, CorpusError> {
    match story.events() {
        None => Err(CorpusError::NotEventStory(story.id.clone())),
        Some([]) => Err(CorpusError::EmptyStory),
        Some(events) => Ok(render_events(events)),
    }
}

/// Parses a complete story. Line numbers must run 1, 2, 3, ... without gaps.
pub fn parse_tomi_story(text: &str) -> Result<Story, CorpusError> {
    let lines = split_numbered(text)?;
    if lines.is_empty() {
        return Err(CorpusError::EmptyStory);
    }
    for (pos, (line_no, index, _)) in lines.iter().enumerate() {
        if *index as usize != pos + 1 {
            return Err(CorpusError::Parse {
                line: *line_no,
                reason: format!("expected line number {}, found {index}", pos + 1),
            });
        }
    }
    Ok(Story::tomi(String::new(), classify(&lines)))
}

/// Parses an excerpt of numbered lines such as a perspective. Numbers only
/// need to increase strictly; blank lines are skipped.
pub fn parse_event_lines(text: &str) -> Result<Vec<Event>, CorpusError> {
    let lines = split_numbered(text)?;
    let mut last = 0u32;
    for (line_no, index, _) in &lines {
        if *index <= last {
            return Err(CorpusError::Parse {
                line: *line_no,
                reason: format!("line number {index} does not increase"),
            });
        }
        last = *index;
    }
    Ok(classify(&lines))
}

/// `(line position, story index, sentence)` for every non-blank line.
fn split_numbered(text: &str) -> Result<Vec<(usize, u32, &str)>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let digits = line.bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(CorpusError::Parse { line: line_no, reason: "missing line number".to_string() });
        }
        let index: u32 = line[..digits]
            .parse()
            .map_err(|_| CorpusError::Parse { line: line_no, reason: "line number out of range".to_string() })?;
        let rest = &line[digits..];
        let sentence = match rest.strip_prefix(' ') {
            Some(s) if !s.trim().is_empty() => s,
            _ => {
                return Err(CorpusError::Parse {
                    line: line_no,
                    reason: "expected a space and a sentence after the line number".to_string(),
                })
            }
        };
        out.push((line_no, index, sentence));
    }
    Ok(out)
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && !s.contains(char::is_whitespace)
}

fn two_part<'a>(sentence: &'a str, infix: &str) -> Option<(&'a str, &'a str)> {
    let body = sentence.strip_suffix('.')?;
    let (who, what) = body.split_once(infix)?;
    (is_name(who) && !what.is_empty()).then_some((who, what))
}

fn move_parts(sentence: &str) -> Option<(&str, &str, &str)> {
    let (who, rest) = two_part(sentence, " moved the ")?;
    let (object, container) = rest.split_once(" to the ")?;
    (!object.is_empty() && !container.is_empty()).then_some((who, object, container))
}

fn declare_parts(sentence: &str) -> Option<(&str, &str)> {
    let body = sentence.strip_suffix('.')?.strip_prefix("The ")?;
    let (thing, place) = body.split_once(" is in the ")?;
    (!thing.is_empty() && !place.is_empty()).then_some((thing, place))
}

fn classify(lines: &[(usize, u32, &str)]) -> Vec<Event> {
    // Pass 1: names that are certainly locations or containers.
    let mut locations = BTreeSet::new();
    let mut containers = BTreeSet::new();
    let mut declared_things = BTreeSet::new();
    let mut declared_places = BTreeSet::new();
    for (_, _, s) in lines {
        if let Some((_, l)) = two_part(s, " entered the ").or_else(|| two_part(s, " exited the ")) {
            locations.insert(l);
        } else if let Some((_, _, c)) = move_parts(s) {
            containers.insert(c);
        } else if let Some((x, y)) = declare_parts(s) {
            declared_things.insert(x);
            declared_places.insert(y);
        }
    }

    lines
        .iter()
        .map(|(_, index, s)| {
            let kind = if let Some((c, l)) = two_part(s, " entered the ") {
                EventKind::Enter { character: c.to_string(), location: l.to_string() }
            } else if let Some((c, l)) = two_part(s, " exited the ") {
                EventKind::Exit { character: c.to_string(), location: l.to_string() }
            } else if let Some((c, o, t)) = move_parts(s) {
                EventKind::Move { character: c.to_string(), object: o.to_string(), container: t.to_string() }
            } else if let Some((x, y)) = declare_parts(s) {
                let container_declare = if locations.contains(y) {
                    true
                } else if containers.contains(y) {
                    false
                } else if containers.contains(x) {
                    true
                } else if declared_things.contains(y) {
                    false
                } else {
                    declared_places.contains(x)
                };
                if container_declare {
                    EventKind::ContainerDeclare { container: x.to_string(), location: y.to_string() }
                } else {
                    EventKind::ObjectDeclare { object: x.to_string(), container: y.to_string() }
                }
            } else {
                let first = s.split_whitespace().next().unwrap_or("");
                let character = first.trim_end_matches(|c: char| c.is_ascii_punctuation());
                EventKind::Distractor { character: character.to_string(), text: s.to_string() }
            };
            Event::new(*index, kind)
        })
        .collect()
}
