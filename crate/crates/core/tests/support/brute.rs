//! Reference implementations written without the library's oracle: every
//! query replays the story from the first line.

use simtom_core::{Event, EventKind};

/// Where `who` stands just before line `upto` (exclusive), counting only
/// lines accepted by `visible`.
pub fn whereabouts(events: &[Event], who: &str, upto: usize, visible: &dyn Fn(usize) -> bool) -> Option<String> {
    let mut at = None;
    for (i, e) in events.iter().enumerate().take(upto) {
        if !visible(i) {
            continue;
        }
        match &e.kind {
            EventKind::Enter { character, location } if character == who => at = Some(location.clone()),
            EventKind::Exit { character, .. } if character == who => at = None,
            _ => {}
        }
    }
    at
}

fn container_home(events: &[Event], container: &str) -> Option<String> {
    events.iter().find_map(|e| match &e.kind {
        EventKind::ContainerDeclare { container: c, location } if c == container => Some(location.clone()),
        _ => None,
    })
}

/// Where line `i` takes place, as seen through `visible`.
fn scene(events: &[Event], i: usize, visible: &dyn Fn(usize) -> bool) -> Option<String> {
    match &events[i].kind {
        EventKind::Enter { location, .. } | EventKind::Exit { location, .. } => Some(location.clone()),
        EventKind::ContainerDeclare { location, .. } => Some(location.clone()),
        EventKind::ObjectDeclare { container, .. } => container_home(events, container),
        EventKind::Move { character, container, .. } => {
            whereabouts(events, character, i, visible).or_else(|| container_home(events, container))
        }
        EventKind::Distractor { .. } => None,
    }
}

fn actor(e: &Event) -> Option<&str> {
    match &e.kind {
        EventKind::Enter { character, .. } | EventKind::Exit { character, .. } | EventKind::Move { character, .. } => {
            Some(character)
        }
        _ => None,
    }
}

/// Whether `who` witnesses line `i`, judged from the lines `visible` admits.
pub fn witnesses(events: &[Event], who: &str, i: usize, visible: &dyn Fn(usize) -> bool) -> bool {
    if matches!(events[i].kind, EventKind::Distractor { .. }) {
        return false;
    }
    if actor(&events[i]) == Some(who) {
        return true;
    }
    match (whereabouts(events, who, i, visible), scene(events, i, visible)) {
        (Some(here), Some(there)) => here == there,
        _ => false,
    }
}

/// Indices (as numbered in the story) of the lines `who` witnesses.
pub fn presence(events: &[Event], who: &str) -> Vec<u32> {
    let all = |_: usize| true;
    (0..events.len()).filter(|&i| witnesses(events, who, i, &all)).map(|i| events[i].index).collect()
}

fn placement(e: &Event, object: &str) -> Option<String> {
    match &e.kind {
        EventKind::ObjectDeclare { object: o, container } | EventKind::Move { object: o, container, .. }
            if o == object =>
        {
            Some(container.clone())
        }
        _ => None,
    }
}

/// The answer to a question, by enumerating which placements of `object`
/// survive the chain of observers (empty chain: reality).
pub fn answer(events: &[Event], chain: &[&str], object: &str, memory: bool) -> Option<String> {
    if memory {
        return events.iter().find_map(|e| placement(e, object));
    }
    let mut last = None;
    for i in 0..events.len() {
        let Some(container) = placement(&events[i], object) else { continue };
        if seen_through(events, chain, i) {
            last = Some(container);
        }
    }
    last
}

/// Whether line `i` reaches the innermost character of `chain`, each link
/// judging presence only from what the previous link saw.
fn seen_through(events: &[Event], chain: &[&str], i: usize) -> bool {
    fn go(events: &[Event], chain: &[&str], i: usize, visible: &dyn Fn(usize) -> bool) -> bool {
        let Some((who, rest)) = chain.split_first() else { return true };
        if !visible(i) || !witnesses(events, who, i, visible) {
            return false;
        }
        let seen = |j: usize| visible(j) && witnesses(events, who, j, visible);
        go(events, rest, i, &seen)
    }
    go(events, chain, i, &|_| true)
}
