//! Seeded generator for balanced ToMI-style corpora.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::question::{first_order_question, memory_question, reality_question, second_order_question};
use super::vocab::{CONTAINERS, DISLIKES, LOCATIONS, NAMES, OBJECTS, WEARABLES};
use super::{BeliefKind, Choice, CorpusError, Event, EventKind, Order, QuestionType, Sample, Story, TomiQuestion};

/// A sample before its answer choices are laid out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DraftSample {
    pub id: String,
    pub story: Story,
    pub question: String,
    pub qtype: QuestionType,
    pub character: String,
    /// The object the question asks about.
    pub object: String,
    /// The container that answers the question.
    pub answer: String,
}

/// Sets the two answer choices to the containers the queried object has
/// occupied, in an order drawn from `rng`.
pub fn attach_choices<R: Rng + ?Sized>(draft: DraftSample, rng: &mut R) -> Result<Sample, CorpusError> {
    let events = draft.story.events().ok_or_else(|| CorpusError::NotEventStory(draft.story.id.clone()))?;
    let mut candidates: Vec<&str> = Vec::new();
    for e in events {
        let container = match &e.kind {
            EventKind::ObjectDeclare { object, container } if *object == draft.object => container,
            EventKind::Move { object, container, .. } if *object == draft.object => container,
            _ => continue,
        };
        if !candidates.contains(&container.as_str()) {
            candidates.push(container);
        }
    }
    if candidates.len() != 2 {
        return Err(CorpusError::CandidateCount { object: draft.object, found: candidates.len() });
    }
    let mut choices = (candidates[0].to_string(), candidates[1].to_string());
    if rng.gen_bool(0.5) {
        core::mem::swap(&mut choices.0, &mut choices.1);
    }
    let correct = if choices.0 == draft.answer {
        Choice::A
    } else if choices.1 == draft.answer {
        Choice::B
    } else {
        return Err(CorpusError::BadChoices);
    };
    let sample = Sample {
        id: draft.id,
        story: draft.story,
        question: draft.question,
        qtype: draft.qtype,
        character: draft.character,
        choices,
        correct,
    };
    sample.validate()?;
    Ok(sample)
}

/// `n_per_type` samples for each of the ten ToMI question types, in type
/// order. The output is a pure function of the arguments.
pub fn generate_tomi_corpus(seed: u64, n_per_type: usize) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = n_per_type.saturating_sub(1).max(1).ilog10() as usize + 1;
    let width = width.max(4);
    let mut out = Vec::with_capacity(10 * n_per_type);
    for (t, qtype) in QuestionType::all_tomi().into_iter().enumerate() {
        let QuestionType::Tomi(kind) = qtype else { unreachable!() };
        for i in 0..n_per_type {
            let id = format!("tomi-{seed}-{t:02}-{i:0width$}");
            let draft = draft_sample(&mut rng, id, kind);
            let sample = attach_choices(draft, &mut rng).expect("generated stories place the object in two containers");
            out.push(sample);
        }
    }
    out
}

fn pick<'a, R: Rng>(rng: &mut R, words: &[&'a str], n: usize) -> Vec<&'a str> {
    words.choose_multiple(rng, n).copied().collect()
}

fn draft_sample<R: Rng>(rng: &mut R, id: String, kind: TomiQuestion) -> DraftSample {
    let names = pick(rng, NAMES, 4);
    let (mover, observer, witness, bystander) = (names[0], names[1], names[2], names[3]);
    let places = pick(rng, LOCATIONS, 2);
    let (room, elsewhere) = (places[0], places[1]);
    let boxes = pick(rng, CONTAINERS, 2);
    let (first, second) = (boxes[0], boxes[1]);
    let object = *OBJECTS.choose(rng).unwrap();

    let belief = match kind {
        TomiQuestion::Belief { belief, .. } => belief,
        _ if rng.gen_bool(0.5) => BeliefKind::FalseBelief,
        _ => BeliefKind::TrueBelief,
    };
    let order = match kind {
        TomiQuestion::Belief { order, .. } => Some(order),
        _ => None,
    };
    let with_witness = order == Some(Order::Second) || rng.gen_bool(0.5);

    // Queried character(s): `(outer, inner)` for second order.
    let (character, chain, question, answer) = match kind {
        TomiQuestion::Memory => (mover, None, memory_question(object), first),
        TomiQuestion::Reality => (mover, None, reality_question(object), second),
        TomiQuestion::Belief { order, belief, tom } => {
            let fooled = tom && belief == BeliefKind::FalseBelief;
            let answer = if fooled { first } else { second };
            match order {
                Order::First => {
                    let who = if tom {
                        observer
                    } else if with_witness && rng.gen_bool(0.5) {
                        witness
                    } else {
                        mover
                    };
                    (who, None, first_order_question(who, object), answer)
                }
                Order::Second => {
                    let (a, b) = if tom {
                        let other = if rng.gen_bool(0.5) { mover } else { witness };
                        (other, observer)
                    } else {
                        (mover, witness)
                    };
                    let (outer, inner) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
                    (outer, Some((outer, inner)), second_order_question(outer, inner, object), answer)
                }
            }
        }
    };

    let mut present = vec![mover, observer];
    if with_witness {
        present.push(witness);
    }
    present.shuffle(rng);
    if let Some((outer, inner)) = chain {
        // The outer character must see the inner one arrive.
        let po = present.iter().position(|c| *c == outer).unwrap();
        let pi = present.iter().position(|c| *c == inner).unwrap();
        if po > pi {
            present.swap(po, pi);
        }
    }

    let enter = |c: &str, l: &str| EventKind::Enter { character: c.to_string(), location: l.to_string() };
    let exit = |c: &str, l: &str| EventKind::Exit { character: c.to_string(), location: l.to_string() };
    let place = |c: &str| EventKind::ContainerDeclare { container: c.to_string(), location: room.to_string() };

    let mut beats: Vec<EventKind> = present.iter().map(|c| enter(c, room)).collect();
    beats.push(EventKind::ObjectDeclare { object: object.to_string(), container: first.to_string() });
    beats.push(place(first));
    if belief == BeliefKind::FalseBelief {
        beats.push(exit(observer, room));
    }
    beats.push(EventKind::Move {
        character: mover.to_string(),
        object: object.to_string(),
        container: second.to_string(),
    });
    beats.push(place(second));
    let mut leavers: Vec<&str> = Vec::new();
    if belief == BeliefKind::TrueBelief && rng.gen_bool(0.5) {
        leavers.push(observer);
    }
    if rng.gen_bool(0.3) {
        leavers.push(mover);
    }
    if with_witness && rng.gen_bool(0.3) {
        leavers.push(witness);
    }
    leavers.shuffle(rng);
    beats.extend(leavers.iter().map(|c| exit(c, room)));

    // Someone busy in another room.
    if rng.gen_bool(0.5) {
        let mut pos = rng.gen_range(0..=beats.len());
        beats.insert(pos, enter(bystander, elsewhere));
        if rng.gen_bool(0.5) {
            pos = rng.gen_range(pos + 1..=beats.len());
            beats.insert(pos, exit(bystander, elsewhere));
        }
    }
    let mut cast = present.clone();
    cast.push(bystander);
    for _ in 0..rng.gen_range(0..=2) {
        let who = *cast.choose(rng).unwrap();
        let text = if rng.gen_bool(0.5) {
            format!("{who} dislikes the {}", DISLIKES.choose(rng).unwrap())
        } else {
            format!("{who} is wearing the {}", WEARABLES.choose(rng).unwrap())
        };
        let pos = rng.gen_range(0..=beats.len());
        beats.insert(pos, EventKind::Distractor { character: who.to_string(), text });
    }

    let events = beats.into_iter().enumerate().map(|(i, kind)| Event::new(i as u32 + 1, kind)).collect();
    DraftSample {
        story: Story::tomi(id.clone(), events),
        id,
        question,
        qtype: QuestionType::Tomi(kind),
        character: character.to_string(),
        object: object.to_string(),
        answer: answer.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_tomi_story, render_story};

    #[test]
    fn minimal_corpus_covers_every_type_once() {
        let corpus = generate_tomi_corpus(7, 1);
        assert_eq!(corpus.len(), 10);
        let types: std::collections::BTreeSet<_> = corpus.iter().map(|s| s.qtype).collect();
        assert_eq!(types.len(), 10);
    }

    #[test]
    fn thousand_sample_corpus_is_balanced() {
        let corpus = generate_tomi_corpus(7, 100);
        assert_eq!(corpus.len(), 1000);
        for qt in QuestionType::all_tomi() {
            assert_eq!(corpus.iter().filter(|s| s.qtype == qt).count(), 100, "{qt}");
        }
        let a = corpus.iter().filter(|s| s.correct == Choice::A).count();
        assert!((450..=550).contains(&a), "correct answer at position a {a} times");
    }

    #[test]
    fn same_seed_same_corpus() {
        assert_eq!(generate_tomi_corpus(11, 20), generate_tomi_corpus(11, 20));
        assert_ne!(generate_tomi_corpus(11, 20), generate_tomi_corpus(12, 20));
    }

    #[test]
    fn generated_stories_round_trip() {
        for s in generate_tomi_corpus(3, 100) {
            let text = render_story(&s.story).unwrap();
            let back = parse_tomi_story(&text).unwrap();
            assert_eq!(back.events(), s.story.events(), "{}", s.id);
        }
    }

    #[test]
    fn samples_satisfy_invariants() {
        for s in generate_tomi_corpus(5, 50) {
            s.validate().unwrap();
            assert!(s.story.characters().contains(&s.character), "{}", s.id);
            let events = s.story.events().unwrap();
            assert!(events.iter().any(|e| matches!(e.kind, EventKind::Enter { .. })));
            assert!(events.iter().any(|e| matches!(e.kind, EventKind::Move { .. })));
        }
    }

    fn draft(events: Vec<Event>, answer: &str) -> DraftSample {
        DraftSample {
            id: "d".into(),
            story: Story::tomi("d", events),
            question: "Where will Anne look for the ball?".into(),
            qtype: QuestionType::Tomi(TomiQuestion::Reality),
            character: "Anne".into(),
            object: "ball".into(),
            answer: answer.into(),
        }
    }

    #[test]
    fn choices_are_the_two_containers() {
        let story = parse_tomi_story(
            "1 Anne entered the room.\n2 The ball is in the basket.\n3 The basket is in the room.\n\
             4 Anne moved the ball to the box.\n5 The box is in the room.",
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = attach_choices(draft(story.events().unwrap().to_vec(), "box"), &mut rng).unwrap();
        let mut pair = [s.choices.0.as_str(), s.choices.1.as_str()];
        pair.sort();
        assert_eq!(pair, ["basket", "box"]);
        assert_eq!(s.correct_text(), "box");
    }

    #[test]
    fn identical_candidates_rejected() {
        let story = parse_tomi_story(
            "1 Anne entered the room.\n2 The ball is in the box.\n3 The box is in the room.\n\
             4 Anne moved the ball to the box.",
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = attach_choices(draft(story.events().unwrap().to_vec(), "box"), &mut rng).unwrap_err();
        assert_eq!(err, CorpusError::CandidateCount { object: "ball".into(), found: 1 });
    }
}
