//! Log generation from switch process trees: exhaustive bounded playout,
//! seeded random sampling, and random tree generators for testing.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::eventlog::{ActivityLabel, EventLog, Trace};
use crate::petrinet::{enumerate_language, translate};
use crate::tree::{Operator, SwitchProcessTree};

#[derive(Debug, Clone)]
pub enum PlayoutMode {
    Exhaustive {
        max_length: usize,
    },
    Sample {
        n_traces: usize,
        max_length: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone)]
pub struct PlayoutConfig {
    pub mode: PlayoutMode,
    /// Scales the state budget of the bounded exploration.
    pub loop_unroll_cap: usize,
}

impl Default for PlayoutConfig {
    fn default() -> Self {
        PlayoutConfig {
            mode: PlayoutMode::Exhaustive { max_length: 10 },
            loop_unroll_cap: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlayoutOutcome {
    pub log: EventLog,
    /// Exploration or sampling budgets were exhausted; the log may be
    /// incomplete.
    pub partial: bool,
}

pub fn playout(tree: &SwitchProcessTree, config: &PlayoutConfig) -> Result<PlayoutOutcome> {
    let net = translate(tree)?;
    match config.mode {
        PlayoutMode::Exhaustive { max_length } => {
            let state_bound = 50_000 * config.loop_unroll_cap.max(1);
            let language = enumerate_language(&net, max_length, state_bound);
            let traces = language
                .words
                .iter()
                .enumerate()
                .map(|(i, word)| Trace::new(format!("case_{i}"), word.clone()))
                .collect();
            Ok(PlayoutOutcome {
                log: EventLog { traces },
                partial: language.truncated,
            })
        }
        PlayoutMode::Sample {
            n_traces,
            max_length,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let final_marking = net.final_marking();
            let mut traces = Vec::new();
            let mut attempts = 0usize;
            let attempt_budget = n_traces.saturating_mul(100).max(100);
            while traces.len() < n_traces && attempts < attempt_budget {
                attempts += 1;
                let mut marking = net.initial_marking();
                let mut word: Vec<ActivityLabel> = Vec::new();
                let step_budget = 10 * max_length + 50;
                let mut completed = false;
                for _ in 0..step_budget {
                    if marking == final_marking {
                        completed = true;
                        break;
                    }
                    let enabled: Vec<usize> = (0..net.num_transitions())
                        .filter(|&t| net.enabled(&marking, t))
                        .collect();
                    if enabled.is_empty() {
                        break;
                    }
                    let t = enabled[rng.gen_range(0..enabled.len())];
                    if let Some(label) = net.transitions[t].kind.label() {
                        if word.len() >= max_length {
                            break;
                        }
                        word.push(label.clone());
                    }
                    marking = net.fire(&marking, t);
                }
                if completed {
                    traces.push(Trace::new(format!("case_{}", traces.len()), word));
                }
            }
            let partial = traces.len() < n_traces;
            Ok(PlayoutOutcome {
                log: EventLog { traces },
                partial,
            })
        }
    }
}

fn fresh_label(counter: &mut usize) -> ActivityLabel {
    let label = ActivityLabel::new(format!("a{counter}"));
    *counter += 1;
    label
}

/// Random process tree over fresh labels with switch leaves inserted only
/// where the structural constraints hold, so the result always validates.
pub fn random_valid_tree(
    seed: u64,
    size_budget: usize,
    switch_probability: f64,
) -> SwitchProcessTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counter = 0usize;
    let mut tree = random_plain_tree(&mut rng, size_budget.max(1), &mut counter);
    if switch_probability > 0.0 {
        insert_random_switches(&mut tree, &mut rng, switch_probability);
    }
    debug_assert!(crate::tree::validate_switches(&tree).is_empty());
    tree
}

fn random_plain_tree(
    rng: &mut ChaCha8Rng,
    budget: usize,
    counter: &mut usize,
) -> SwitchProcessTree {
    if budget <= 1 {
        return SwitchProcessTree::Activity(fresh_label(counter));
    }
    let operator = match rng.gen_range(0..4u32) {
        0 => Operator::Xor,
        1 => Operator::Seq,
        2 => Operator::Par,
        _ => Operator::Loop,
    };
    let arity = if budget >= 3 && rng.gen_bool(0.4) {
        3
    } else {
        2
    };
    let mut remaining = budget - 1;
    let mut children = Vec::new();
    for i in 0..arity {
        let left = arity - i - 1;
        let share = if left == 0 {
            remaining
        } else {
            rng.gen_range(1..=remaining.saturating_sub(left).max(1))
        };
        remaining = remaining.saturating_sub(share);
        children.push(random_plain_tree(rng, share.max(1), counter));
    }
    SwitchProcessTree::Operator(operator, children)
}

/// Leaves of `node` reachable without passing through a concurrent operator,
/// so a switch endpoint here cannot cross into or out of a parallel scope.
fn concurrency_free_leaves(node: &SwitchProcessTree) -> Vec<ActivityLabel> {
    match node {
        SwitchProcessTree::Operator(Operator::Par, _) => Vec::new(),
        SwitchProcessTree::Operator(_, children) => {
            children.iter().flat_map(concurrency_free_leaves).collect()
        }
        other => other.leaf_activity().cloned().into_iter().collect(),
    }
}

fn insert_random_switches(tree: &mut SwitchProcessTree, rng: &mut ChaCha8Rng, probability: f64) {
    let mut pairs: Vec<(ActivityLabel, ActivityLabel)> = Vec::new();
    collect_switch_candidates(tree, rng, probability, &mut pairs);
    for (src, dst) in pairs {
        convert_leaf_to_switch(tree, &src, &dst);
    }
}

fn collect_switch_candidates(
    node: &SwitchProcessTree,
    rng: &mut ChaCha8Rng,
    probability: f64,
    out: &mut Vec<(ActivityLabel, ActivityLabel)>,
) {
    if let SwitchProcessTree::Operator(operator, children) = node {
        if *operator == Operator::Xor && children.len() >= 2 && rng.gen_bool(probability) {
            let i = rng.gen_range(0..children.len());
            let mut j = rng.gen_range(0..children.len() - 1);
            if j >= i {
                j += 1;
            }
            let sources = concurrency_free_leaves(&children[i]);
            let dests = concurrency_free_leaves(&children[j]);
            if !sources.is_empty() && !dests.is_empty() {
                let src = sources[rng.gen_range(0..sources.len())].clone();
                let dst = dests[rng.gen_range(0..dests.len())].clone();
                out.push((src, dst));
            }
        }
        for c in children {
            collect_switch_candidates(c, rng, probability, out);
        }
    }
}

fn convert_leaf_to_switch(
    node: &mut SwitchProcessTree,
    src: &ActivityLabel,
    dst: &ActivityLabel,
) -> bool {
    match node {
        SwitchProcessTree::Operator(_, children) => children
            .iter_mut()
            .any(|c| convert_leaf_to_switch(c, src, dst)),
        SwitchProcessTree::Activity(label) if label == src => {
            let mut destinations = BTreeSet::new();
            destinations.insert(dst.clone());
            *node = SwitchProcessTree::Switch {
                source: src.clone(),
                destinations,
            };
            true
        }
        SwitchProcessTree::Switch {
            source,
            destinations,
        } if source == src => {
            destinations.insert(dst.clone());
            true
        }
        _ => false,
    }
}

/// Exclusive choice of plain activity sequences over fresh labels, with
/// `n_switches` switch behaviours between distinct branches. The shape mirrors
/// the structured logs the discovery round-trips exactly.
pub fn random_choice_of_sequences(
    seed: u64,
    branches: usize,
    branch_len: usize,
    n_switches: usize,
) -> SwitchProcessTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let branches = branches.max(2);
    let branch_len = branch_len.max(2);
    let mut counter = 0usize;
    let labels: Vec<Vec<ActivityLabel>> = (0..branches)
        .map(|_| (0..branch_len).map(|_| fresh_label(&mut counter)).collect())
        .collect();
    let mut tree = SwitchProcessTree::xor(
        labels
            .iter()
            .map(|branch| {
                SwitchProcessTree::seq(
                    branch
                        .iter()
                        .map(|l| SwitchProcessTree::Activity(l.clone()))
                        .collect(),
                )
            })
            .collect(),
    );
    // endpoints are kept disjoint across switches: a label serving as both a
    // destination and a source would chain the switches and destroy the
    // directly-follows witnesses the detection needs
    let mut used: BTreeSet<ActivityLabel> = BTreeSet::new();
    let mut placed = 0usize;
    let mut guard = 0usize;
    while placed < n_switches && guard < 100 {
        guard += 1;
        // switches only flow towards higher-numbered branches; opposite
        // directions between the same branches would let tokens cycle and
        // make the language unbounded
        let bi = rng.gen_range(0..branches - 1);
        let bj = rng.gen_range(bi + 1..branches);
        // interior positions keep the surrounding directly-follows context
        // that the switch detection relies on
        let src = labels[bi][rng.gen_range(1..branch_len)].clone();
        let dst = labels[bj][rng.gen_range(1..branch_len)].clone();
        if used.contains(&src) || used.contains(&dst) {
            continue;
        }
        used.insert(src.clone());
        used.insert(dst.clone());
        convert_leaf_to_switch(&mut tree, &src, &dst);
        placed += 1;
    }
    tree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{parse_tree, validate_switches};

    fn words(log: &EventLog) -> BTreeSet<Vec<String>> {
        log.traces
            .iter()
            .map(|t| t.events.iter().map(|l| l.text.clone()).collect())
            .collect()
    }

    #[test]
    fn exhaustive_fig1() {
        let tree = parse_tree("X(->(A, B=>{E}, C), ->(D, E, F))").unwrap();
        let outcome = playout(&tree, &PlayoutConfig::default()).unwrap();
        assert!(!outcome.partial);
        let expected: BTreeSet<Vec<String>> = [
            vec!["A", "B", "C"],
            vec!["D", "E", "F"],
            vec!["A", "B", "E", "F"],
        ]
        .into_iter()
        .map(|w| w.into_iter().map(String::from).collect())
        .collect();
        assert_eq!(words(&outcome.log), expected);
    }

    #[test]
    fn exhaustive_single_activity() {
        let outcome =
            playout(&SwitchProcessTree::activity("a"), &PlayoutConfig::default()).unwrap();
        assert_eq!(outcome.log.traces.len(), 1);
        assert_eq!(outcome.log.traces[0].events, vec![ActivityLabel::new("a")]);
    }

    #[test]
    fn exhaustive_loop_bounded() {
        let tree = parse_tree("loop(a, b)").unwrap();
        let outcome = playout(
            &tree,
            &PlayoutConfig {
                mode: PlayoutMode::Exhaustive { max_length: 5 },
                ..PlayoutConfig::default()
            },
        )
        .unwrap();
        let expected: BTreeSet<Vec<String>> = [
            vec!["a"],
            vec!["a", "b", "a"],
            vec!["a", "b", "a", "b", "a"],
        ]
        .into_iter()
        .map(|w| w.into_iter().map(String::from).collect())
        .collect();
        assert_eq!(words(&outcome.log), expected);
    }

    #[test]
    fn sampling_is_seed_deterministic_and_fits() {
        let tree = parse_tree("X(->(A, B=>{E}, C), ->(D, E, F))").unwrap();
        let config = PlayoutConfig {
            mode: PlayoutMode::Sample {
                n_traces: 20,
                max_length: 10,
                seed: 7,
            },
            ..PlayoutConfig::default()
        };
        let a = playout(&tree, &config).unwrap();
        let b = playout(&tree, &config).unwrap();
        assert_eq!(a.log, b.log);
        assert!(!a.partial);
        // every sampled trace is a word of the model
        let language = words(&playout(&tree, &PlayoutConfig::default()).unwrap().log);
        for w in words(&a.log) {
            assert!(language.contains(&w));
        }
    }

    #[test]
    fn random_trees_always_validate() {
        for seed in 0..50 {
            let tree = random_valid_tree(seed, 12, 0.7);
            assert!(validate_switches(&tree).is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn zero_probability_means_no_switches() {
        let tree = random_valid_tree(3, 10, 0.0);
        assert!(tree.switches().is_empty());
    }

    #[test]
    fn fixed_seed_reproduces_tree() {
        assert_eq!(
            random_valid_tree(42, 10, 0.5),
            random_valid_tree(42, 10, 0.5)
        );
    }

    #[test]
    fn choice_of_sequences_shape() {
        let tree = random_choice_of_sequences(5, 3, 4, 2);
        assert!(validate_switches(&tree).is_empty());
        let SwitchProcessTree::Operator(Operator::Xor, children) = &tree else {
            panic!("expected exclusive choice root");
        };
        assert_eq!(children.len(), 3);
        assert_eq!(tree.switches().len(), 2);
    }
}
