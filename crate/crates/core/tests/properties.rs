use proptest::prelude::*;
use simtom_core::corpus::{generate_tomi_corpus, parse_tomi_story, render_story};
use simtom_core::oracle::{answer_ground_truth, belief_in, known_events, simulate_world};
use simtom_core::prompt::{fill, parse_answer, Verdict};
use simtom_core::{BeliefKind, Event, EventKind, QuestionType, TomiQuestion};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_then_parse_is_identity(seed in any::<u64>()) {
        for s in generate_tomi_corpus(seed, 1) {
            let text = render_story(&s.story).unwrap();
            let back = parse_tomi_story(&text).unwrap();
            prop_assert_eq!(back.events(), s.story.events());
            prop_assert_eq!(render_story(&back).unwrap(), text);
        }
    }

    #[test]
    fn labels_agree_with_the_oracle(seed in any::<u64>()) {
        for s in generate_tomi_corpus(seed, 1) {
            prop_assert_eq!(answer_ground_truth(&s).unwrap(), s.correct);
        }
    }

    #[test]
    fn perspectives_are_ordered_subsets_without_distractors(seed in any::<u64>()) {
        for s in generate_tomi_corpus(seed, 1) {
            let events = s.story.events().unwrap();
            for c in s.story.characters() {
                let known = known_events(events, &c);
                prop_assert!(known.windows(2).all(|w| w[0].index < w[1].index));
                prop_assert!(known.iter().all(|e| events.contains(e) && !e.kind.is_distractor()));
            }
        }
    }

    #[test]
    fn filtering_first_does_not_change_beliefs(seed in any::<u64>()) {
        for s in generate_tomi_corpus(seed, 1) {
            let events = s.story.events().unwrap();
            for c in s.story.characters() {
                let seen: Vec<Event> = known_events(events, &c).into_iter().cloned().collect();
                prop_assert_eq!(belief_in(&seen, &c), belief_in(events, &c));
            }
        }
    }

    #[test]
    fn true_belief_witnesses_match_reality(seed in any::<u64>()) {
        for s in generate_tomi_corpus(seed, 1) {
            let QuestionType::Tomi(TomiQuestion::Belief { belief: BeliefKind::TrueBelief, .. }) = s.qtype else {
                continue;
            };
            let events = s.story.events().unwrap();
            let world = simulate_world(&s.story).unwrap().final_state;
            for c in s.story.characters() {
                let known = known_events(events, &c);
                if known.iter().any(|e| matches!(e.kind, EventKind::Move { .. })) {
                    prop_assert_eq!(belief_in(events, &c).believes_in, world.object_in.clone());
                }
            }
        }
    }

    #[test]
    fn parse_answer_is_total(raw in any::<String>(), a in any::<String>(), b in any::<String>()) {
        let p = parse_answer(&raw, (&a, &b));
        prop_assert_eq!(p.raw, raw);
    }

    #[test]
    fn parse_answer_never_picks_the_absent_choice(
        filler in "[ ,.;0-9]{0,20}",
        a in "[c-z]{3,8}",
        b in "[c-z]{3,8}",
    ) {
        prop_assume!(!a.contains(&b) && !b.contains(&a));
        let raw = format!("{filler} the {b} {filler}");
        prop_assert_eq!(parse_answer(&raw, (&a, &b)).verdict, Verdict::ChoiceB);
    }

    #[test]
    fn fill_is_total(template in any::<String>(), value in any::<String>()) {
        let _ = fill(&template, &[("story", &value)]);
    }
}
