//! Reachability-based analysis: soundness checking and bounded language
//! enumeration.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::eventlog::ActivityLabel;
use crate::petrinet::{Marking, WorkflowNet};

#[derive(Debug, Clone)]
pub struct SoundnessReport {
    pub is_sound: bool,
    pub safe: bool,
    pub proper_completion: bool,
    pub option_to_complete: bool,
    pub dead_tasks: Vec<usize>,
    pub states_explored: usize,
    /// Exploration hit the state bound; the verdict is not trustworthy and is
    /// never reported sound.
    pub indeterminate: bool,
}

/// Explores the reachability graph from the initial marking (up to
/// `state_bound` markings) and checks safeness, proper completion, option to
/// complete, and absence of dead tasks.
pub fn check_soundness(net: &WorkflowNet, state_bound: usize) -> SoundnessReport {
    let initial = net.initial_marking();
    let final_marking = net.final_marking();

    let mut ids: HashMap<Marking, usize> = HashMap::new();
    let mut markings: Vec<Marking> = Vec::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut safe = true;
    let mut proper_completion = true;
    let mut fired = vec![false; net.num_transitions()];
    let mut indeterminate = false;

    ids.insert(initial.clone(), 0);
    markings.push(initial);
    edges.push(Vec::new());
    queue.push_back(0);

    while let Some(id) = queue.pop_front() {
        let marking = markings[id].clone();
        if marking.iter().any(|&c| c >= 2) {
            safe = false;
        }
        if marking[net.sink] >= 1 && marking != final_marking {
            proper_completion = false;
        }
        // unsafe markings are recorded but not expanded further once a place
        // piles up tokens, so unbounded nets cannot blow up the search
        if marking.iter().any(|&c| c > 2) {
            continue;
        }
        #[allow(clippy::needless_range_loop)]
        for t in 0..net.num_transitions() {
            if !net.enabled(&marking, t) {
                continue;
            }
            fired[t] = true;
            let next = net.fire(&marking, t);
            let next_id = match ids.get(&next) {
                Some(&i) => i,
                None => {
                    if markings.len() >= state_bound {
                        indeterminate = true;
                        continue;
                    }
                    let i = markings.len();
                    ids.insert(next.clone(), i);
                    markings.push(next);
                    edges.push(Vec::new());
                    queue.push_back(i);
                    i
                }
            };
            edges[id].push(next_id);
        }
    }

    // option to complete: every explored marking must reach the final one
    let option_to_complete = match ids.get(&final_marking) {
        None => false,
        Some(&final_id) => {
            let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); markings.len()];
            for (from, tos) in edges.iter().enumerate() {
                for &to in tos {
                    reverse[to].push(from);
                }
            }
            let mut reaches = vec![false; markings.len()];
            let mut stack = vec![final_id];
            reaches[final_id] = true;
            while let Some(s) = stack.pop() {
                for &p in &reverse[s] {
                    if !reaches[p] {
                        reaches[p] = true;
                        stack.push(p);
                    }
                }
            }
            reaches.iter().all(|&r| r)
        }
    };

    let dead_tasks: Vec<usize> = (0..net.num_transitions()).filter(|&t| !fired[t]).collect();
    let is_sound =
        safe && proper_completion && option_to_complete && dead_tasks.is_empty() && !indeterminate;
    SoundnessReport {
        is_sound,
        safe,
        proper_completion,
        option_to_complete,
        dead_tasks,
        states_explored: markings.len(),
        indeterminate,
    }
}

#[derive(Debug, Clone)]
pub struct Language {
    pub words: BTreeSet<Vec<ActivityLabel>>,
    /// The state bound was hit; the word set may be incomplete.
    pub truncated: bool,
}

/// All visible-projection firing sequences of length at most `max_length`
/// from the initial to the final marking. Silent firings contribute no
/// symbols.
pub fn enumerate_language(net: &WorkflowNet, max_length: usize, state_bound: usize) -> Language {
    let final_marking = net.final_marking();
    let mut words = BTreeSet::new();
    let mut truncated = false;

    let start = (net.initial_marking(), Vec::<ActivityLabel>::new());
    let mut seen: BTreeSet<(Marking, Vec<ActivityLabel>)> = BTreeSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some((marking, word)) = queue.pop_front() {
        if marking == final_marking {
            words.insert(word.clone());
        }
        for t in 0..net.num_transitions() {
            if !net.enabled(&marking, t) {
                continue;
            }
            let next = net.fire(&marking, t);
            if next.iter().any(|&c| c > 2) {
                continue;
            }
            let mut next_word = word.clone();
            if let Some(label) = net.transitions[t].kind.label() {
                if word.len() >= max_length {
                    continue;
                }
                next_word.push(label.clone());
            }
            let state = (next, next_word);
            if seen.contains(&state) {
                continue;
            }
            if seen.len() >= state_bound {
                truncated = true;
                continue;
            }
            seen.insert(state.clone());
            queue.push_back(state);
        }
    }
    Language { words, truncated }
}

/// Minimal number of visible transitions on any path from the initial to the
/// final marking; silent transitions are free. Returns `None` when the final
/// marking is unreachable within the state bound.
pub fn shortest_visible_completion(net: &WorkflowNet, state_bound: usize) -> Option<usize> {
    shortest_visible_from(net, &net.initial_marking(), state_bound)
}

/// Same as [`shortest_visible_completion`] but from an arbitrary marking.
pub(crate) fn shortest_visible_from(
    net: &WorkflowNet,
    from: &Marking,
    state_bound: usize,
) -> Option<usize> {
    let final_marking = net.final_marking();
    // 0/1-weight BFS with a two-tier deque
    let mut dist: HashMap<Marking, usize> = HashMap::new();
    let mut queue: VecDeque<Marking> = VecDeque::new();
    dist.insert(from.clone(), 0);
    queue.push_back(from.clone());
    let mut best: Option<usize> = None;
    while let Some(marking) = queue.pop_front() {
        let d = dist[&marking];
        if best.is_some_and(|b| d >= b) {
            continue;
        }
        if marking == final_marking {
            best = Some(best.map_or(d, |b| b.min(d)));
            continue;
        }
        for t in 0..net.num_transitions() {
            if !net.enabled(&marking, t) {
                continue;
            }
            let next = net.fire(&marking, t);
            if next.iter().any(|&c| c > 2) {
                continue;
            }
            let cost = if net.transitions[t].kind.is_silent() {
                0
            } else {
                1
            };
            let nd = d + cost;
            let better = dist.get(&next).is_none_or(|&old| nd < old);
            if better && dist.len() < state_bound {
                dist.insert(next.clone(), nd);
                if cost == 0 {
                    queue.push_front(next);
                } else {
                    queue.push_back(next);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petrinet::{translate, TransitionKind};
    use crate::tree::parse_tree;

    #[test]
    fn single_transition_net_is_sound() {
        let net = translate(&parse_tree("a").unwrap()).unwrap();
        let report = check_soundness(&net, 10_000);
        assert!(report.is_sound);
        assert_eq!(report.states_explored, 2);
    }

    #[test]
    fn fig1_net_is_sound() {
        let net = translate(&parse_tree("X(->(A, B=>{E}, C), ->(D, E, F))").unwrap()).unwrap();
        assert!(check_soundness(&net, 10_000).is_sound);
    }

    #[test]
    fn unpruned_violation_translates_to_unsound_net() {
        // bypass validation by attaching the bad switch by hand
        let mut net = translate(&parse_tree("->(A, B)").unwrap()).unwrap();
        let skipped = crate::petrinet::attach_switches(
            &mut net,
            &[(
                crate::eventlog::ActivityLabel::new("A"),
                crate::eventlog::ActivityLabel::new("B"),
            )],
        );
        assert!(skipped.is_empty());
        // A's output place is B's input place: the switch forms a self-loop on
        // it, which keeps the net sound, so this particular wiring stays
        // harmless; a cross-parallel switch is the genuinely unsound case.
        let tree = parse_tree("/\\(X(A, C), B)").unwrap();
        let mut net = translate(&tree).unwrap();
        crate::petrinet::attach_switches(
            &mut net,
            &[(
                crate::eventlog::ActivityLabel::new("A"),
                crate::eventlog::ActivityLabel::new("B"),
            )],
        );
        let report = check_soundness(&net, 10_000);
        assert!(!report.is_sound);
    }

    #[test]
    fn flower_language_over_one_activity() {
        let net = translate(&parse_tree("loop(tau, a)").unwrap()).unwrap();
        let language = enumerate_language(&net, 2, 100_000);
        let words: BTreeSet<Vec<String>> = language
            .words
            .into_iter()
            .map(|w| w.into_iter().map(|l| l.text).collect())
            .collect();
        let expected: BTreeSet<Vec<String>> = [
            vec![],
            vec!["a".to_string()],
            vec!["a".to_string(), "a".to_string()],
        ]
        .into_iter()
        .collect();
        assert_eq!(words, expected);
    }

    #[test]
    fn loop_language() {
        let net = translate(&parse_tree("loop(a, b)").unwrap()).unwrap();
        let language = enumerate_language(&net, 5, 100_000);
        let words: BTreeSet<Vec<String>> = language
            .words
            .into_iter()
            .map(|w| w.into_iter().map(|l| l.text).collect())
            .collect();
        let expected: BTreeSet<Vec<String>> = [
            vec!["a"],
            vec!["a", "b", "a"],
            vec!["a", "b", "a", "b", "a"],
        ]
        .into_iter()
        .map(|w| w.into_iter().map(String::from).collect())
        .collect();
        assert_eq!(words, expected);
    }

    #[test]
    fn indeterminate_is_not_sound() {
        let net = translate(&parse_tree("X(->(A, B=>{E}, C), ->(D, E, F))").unwrap()).unwrap();
        let report = check_soundness(&net, 3);
        assert!(report.indeterminate);
        assert!(!report.is_sound);
    }

    #[test]
    fn shortest_completion_counts_visible_only() {
        let net = translate(&parse_tree("->(a, X(b, tau), c)").unwrap()).unwrap();
        assert_eq!(shortest_visible_completion(&net, 100_000), Some(2));
        let flower = translate(&parse_tree("loop(tau, a, b)").unwrap()).unwrap();
        assert_eq!(shortest_visible_completion(&flower, 100_000), Some(0));
    }

    #[test]
    fn dead_transition_detected() {
        let mut net = WorkflowNet::new();
        let t = net.add_transition(TransitionKind::Visible(
            crate::eventlog::ActivityLabel::new("a"),
        ));
        let dead = net.add_transition(TransitionKind::Visible(
            crate::eventlog::ActivityLabel::new("unreachable"),
        ));
        let orphan = net.add_place("orphan");
        let (source, sink) = (net.source, net.sink);
        net.add_arc_pt(source, t);
        net.add_arc_tp(t, sink);
        net.add_arc_pt(orphan, dead);
        net.add_arc_tp(dead, sink);
        let report = check_soundness(&net, 10_000);
        assert!(!report.is_sound);
        assert_eq!(report.dead_tasks, vec![dead]);
    }
}
