mod support {
    pub mod brute;
}

use simtom_core::corpus::{generate_tomi_corpus, parse_tomi_question, QuestionShape};
use simtom_core::oracle::{answer_ground_truth, perspective_filter};
use support::brute;

#[test]
fn perspective_filter_matches_presence_replay() {
    for s in generate_tomi_corpus(2024, 100) {
        let events = s.story.events().unwrap();
        for c in s.story.characters() {
            let p = perspective_filter(&s.story, &c).unwrap();
            assert_eq!(p.known_indices, brute::presence(events, &c), "{} {c}", s.id);
        }
    }
}

#[test]
fn ground_truth_matches_enumeration() {
    for s in generate_tomi_corpus(2024, 100) {
        let events = s.story.events().unwrap();
        let q = parse_tomi_question(&s.question).unwrap();
        let expected = match &q.shape {
            QuestionShape::Memory => brute::answer(events, &[], &q.object, true),
            QuestionShape::Reality => brute::answer(events, &[], &q.object, false),
            QuestionShape::FirstOrder { character } => brute::answer(events, &[character], &q.object, false),
            QuestionShape::SecondOrder { outer, inner } => brute::answer(events, &[outer, inner], &q.object, false),
        }
        .unwrap();
        let oracle = answer_ground_truth(&s).unwrap();
        assert_eq!(s.choice(oracle), expected, "{}", s.id);
        assert_eq!(oracle, s.correct, "generated label disagrees for {}", s.id);
    }
}
