//! Offline readers for ToMI prompts. Both read the story lines embedded in
//! the prompt, so they only ever use the context they were given.

use simtom_core::corpus::{parse_event_lines, parse_tomi_question, render_line, QuestionShape, TomiQuestionText};
use simtom_core::oracle::{answer_in_context, known_events};
use simtom_core::Event;

use super::{ChatBackend, ChatRequest, ChatResponse, GatewayError};

const PERSPECTIVE_ASK: &str = "What events does ";
const REASONING_ASK: &str = "Do not answer any question yet.";
const REASONING_STORY: &str = "sequence of events: ";

/// Answers every stage as an ideal reader would.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockPerfect;

/// Answers every question with where the object really is, and passes the
/// story through the perspective stage untouched.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockConfound;

fn unrecognized(prompt: &str) -> GatewayError {
    let head: String = prompt.chars().take(80).collect();
    GatewayError::Unrecognized(head)
}

/// `N sentence` lines, ignoring `Story:` prefixes and `1.`-style list items.
fn event_lines(text: &str) -> Vec<&str> {
    text.lines()
        .map(|l| {
            let t = l.trim_start();
            t.strip_prefix("Story:").map_or(t, str::trim_start)
        })
        .filter(|l| {
            let (n, rest) = l.split_once(' ').unwrap_or((l, ""));
            !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) && !rest.trim().is_empty()
        })
        .collect()
}

fn events_in(text: &str, prompt: &str) -> Result<Vec<Event>, GatewayError> {
    let lines = event_lines(text);
    if lines.is_empty() {
        return Err(unrecognized(prompt));
    }
    parse_event_lines(&lines.join("\n")).map_err(|_| unrecognized(prompt))
}

fn question_in(prompt: &str) -> Option<TomiQuestionText> {
    prompt.lines().find_map(|l| {
        let t = l.trim();
        parse_tomi_question(t.strip_prefix("Question:").map_or(t, str::trim_start)).ok()
    })
}

fn choices_in(prompt: &str) -> Option<(String, String)> {
    let find = |p: &str| prompt.lines().find_map(|l| l.trim().strip_prefix(p).map(|c| c.trim().to_string()));
    Some((find("a) ")?, find("b) ")?))
}

fn format_answer(prompt: &str, container: Option<String>) -> Result<ChatResponse, GatewayError> {
    let (a, b) = choices_in(prompt).ok_or_else(|| unrecognized(prompt))?;
    let content = match container {
        Some(c) if c == a => format!("Answer: a) {a}"),
        Some(c) if c == b => format!("Answer: b) {b}"),
        _ => "There is not enough information to answer.".to_string(),
    };
    Ok(ChatResponse::text(content))
}

/// The story block a perspective prompt asks about and the character named.
fn perspective_request(prompt: &str) -> Option<(&str, &str)> {
    let ask = prompt.rfind(PERSPECTIVE_ASK)?;
    let who = prompt[ask + PERSPECTIVE_ASK.len()..].split(" know about?").next()?;
    let before = &prompt[..ask];
    let story = before.rfind("Story:").map_or(before, |i| &before[i + "Story:".len()..]);
    Some((story, who))
}

fn respond(prompt: &str, confound: bool) -> Result<ChatResponse, GatewayError> {
    if let Some(q) = question_in(prompt) {
        let events = events_in(prompt, prompt)?;
        let asked = if confound { TomiQuestionText { shape: QuestionShape::Reality, object: q.object } } else { q };
        return format_answer(prompt, answer_in_context(&events, &asked));
    }
    if let Some((story, who)) = perspective_request(prompt) {
        let events = events_in(story, prompt)?;
        let lines: Vec<String> = if confound {
            events.iter().map(render_line).collect()
        } else {
            known_events(&events, who).into_iter().map(render_line).collect()
        };
        return Ok(ChatResponse::text(lines.join("\n")));
    }
    if prompt.contains(REASONING_ASK) {
        let story = prompt.split_once(REASONING_STORY).map_or(prompt, |(_, rest)| rest);
        let lines = event_lines(story);
        if lines.is_empty() {
            return Err(unrecognized(prompt));
        }
        return Ok(ChatResponse::text(lines.join("\n")));
    }
    Err(unrecognized(prompt))
}

impl ChatBackend for MockPerfect {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        respond(request.prompt(), false)
    }
}

impl ChatBackend for MockConfound {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        respond(request.prompt(), true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use simtom_core::corpus::{parse_tomi_story, render_events, Choice, QuestionType, Sample, TomiQuestion};
    use simtom_core::oracle::oracle_perspective_text;
    use simtom_core::prompt::render;
    use simtom_core::{Message, Method, ModelFamily, Stage};

    const JIM_AVI: &str = "1 Jim entered the playroom.\n2 Avi entered the playroom.\n3 The ball is in the box.\n\
                           4 The box is in the playroom.\n5 Jim exited the playroom.\n\
                           6 Avi moved the ball to the basket.\n7 The basket is in the playroom.";

    fn jim_sample() -> Sample {
        let mut story = parse_tomi_story(JIM_AVI).unwrap();
        story.id = "jim".into();
        Sample {
            id: "jim".into(),
            story,
            question: "Where will Jim look for the ball?".into(),
            qtype: QuestionType::Tomi(TomiQuestion::Belief {
                order: simtom_core::Order::First,
                belief: simtom_core::BeliefKind::FalseBelief,
                tom: true,
            }),
            character: "Jim".into(),
            choices: ("basket".into(), "box".into()),
            correct: Choice::B,
        }
    }

    fn ask(backend: &dyn ChatBackend, method: Method, stage: Stage, s: &Sample, p: Option<&str>) -> String {
        let msgs = render(method, stage, s, ModelFamily::Gpt, p).unwrap();
        backend.complete(&ChatRequest::new("mock", msgs, None)).unwrap().content
    }

    #[test]
    fn perfect_perspective_is_the_oracle_text() {
        let s = jim_sample();
        let out = ask(&MockPerfect, Method::Simtom, Stage::Perspective, &s, None);
        assert_eq!(out, oracle_perspective_text(&s).unwrap());
        let out = ask(&MockPerfect, Method::SimtomDomain, Stage::Perspective, &s, None);
        assert_eq!(out, oracle_perspective_text(&s).unwrap());
    }

    #[test]
    fn answers_from_the_context_only() {
        let s = jim_sample();
        let pre_move = render_events(&s.story.events().unwrap()[..4]);
        assert_eq!(ask(&MockPerfect, Method::Simtom, Stage::Qa, &s, Some(&pre_move)), "Answer: b) box");
        assert_eq!(ask(&MockPerfect, Method::ZeroShot, Stage::Combined, &s, None), "Answer: b) box");
        assert_eq!(ask(&MockPerfect, Method::SimtomSingle, Stage::Combined, &s, None), "Answer: b) box");
    }

    #[test]
    fn confound_reports_the_world() {
        let s = jim_sample();
        assert_eq!(ask(&MockConfound, Method::ZeroShot, Stage::Combined, &s, None), "Answer: a) basket");
        assert_eq!(ask(&MockConfound, Method::Simtom, Stage::Perspective, &s, None), JIM_AVI);
    }

    #[test]
    fn reasoning_stage_echoes_the_story() {
        let s = jim_sample();
        assert_eq!(ask(&MockPerfect, Method::SimtomMulti, Stage::Perspective, &s, None), JIM_AVI);
    }

    #[test]
    fn deterministic_and_rejects_foreign_prompts() {
        let s = jim_sample();
        let a = ask(&MockPerfect, Method::ZeroShotCot, Stage::Combined, &s, None);
        assert_eq!(a, ask(&MockPerfect, Method::ZeroShotCot, Stage::Combined, &s, None));
        let req = ChatRequest::new("mock", vec![Message::user("Olumide carves a sculpture.")], None);
        assert!(matches!(MockPerfect.complete(&req), Err(GatewayError::Unrecognized(_))));
    }
}
