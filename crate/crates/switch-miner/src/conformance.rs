//! Alignment-based fitness, escaping-edges precision, F-score, and the size
//! and control-flow-complexity measures.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};

use serde::Serialize;

use crate::eventlog::{ActivityLabel, EventLog};
use crate::petrinet::{check_soundness, shortest_visible_completion, Marking, WorkflowNet};

#[derive(Debug, Clone, Serialize)]
pub struct ConformanceReport {
    pub fitness: f64,
    pub precision: f64,
    pub f_score: f64,
    /// Number of places plus transitions.
    pub size: usize,
    /// Control-flow complexity: XOR-split places contribute their out-degree,
    /// AND-split transitions contribute one each.
    pub cfc: usize,
    pub sound: bool,
    /// Minimal alignment cost per distinct trace (comma-joined labels).
    pub per_trace_costs: BTreeMap<String, usize>,
    /// Distinct traces whose alignment search exceeded the budget.
    pub unaligned_traces: usize,
}

/// Minimal alignment cost between a trace and the net: synchronous and silent
/// model moves are free, log-only and visible-model-only moves cost 1.
/// Returns `None` when the search exceeds `node_budget` explored states.
pub fn align_trace(
    net: &WorkflowNet,
    trace: &[ActivityLabel],
    node_budget: usize,
) -> Option<usize> {
    let final_marking = net.final_marking();
    let visible = net.visible_labels();
    // admissible remaining-cost bound: labels the net cannot produce must be
    // log moves
    let heuristic = |pos: usize| {
        trace[pos..]
            .iter()
            .filter(|l| !visible.contains(*l))
            .count()
    };

    let mut best: HashMap<(Marking, usize), usize> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(usize, usize, Marking, usize)>> = BinaryHeap::new();
    let start = (net.initial_marking(), 0usize);
    best.insert(start.clone(), 0);
    heap.push(Reverse((heuristic(0), 0, start.0, start.1)));
    let mut explored = 0usize;

    while let Some(Reverse((_, cost, marking, pos))) = heap.pop() {
        if best.get(&(marking.clone(), pos)).is_some_and(|&b| b < cost) {
            continue;
        }
        if marking == final_marking && pos == trace.len() {
            return Some(cost);
        }
        explored += 1;
        if explored > node_budget {
            return None;
        }

        let push = |best: &mut HashMap<(Marking, usize), usize>,
                    heap: &mut BinaryHeap<Reverse<(usize, usize, Marking, usize)>>,
                    m: Marking,
                    p: usize,
                    c: usize| {
            if best.get(&(m.clone(), p)).is_none_or(|&b| c < b) {
                best.insert((m.clone(), p), c);
                heap.push(Reverse((c + heuristic(p), c, m, p)));
            }
        };

        // log-only move
        if pos < trace.len() {
            push(&mut best, &mut heap, marking.clone(), pos + 1, cost + 1);
        }
        for t in 0..net.num_transitions() {
            if !net.enabled(&marking, t) {
                continue;
            }
            let next = net.fire(&marking, t);
            if next.iter().any(|&c| c > 2) {
                continue;
            }
            match net.transitions[t].kind.label() {
                None => push(&mut best, &mut heap, next, pos, cost),
                Some(label) => {
                    if pos < trace.len() && trace[pos] == *label {
                        push(&mut best, &mut heap, next.clone(), pos + 1, cost);
                    }
                    push(&mut best, &mut heap, next, pos, cost + 1);
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct FitnessResult {
    pub value: f64,
    pub per_trace_costs: BTreeMap<String, usize>,
    pub unaligned_traces: usize,
}

fn trace_key(events: &[ActivityLabel]) -> String {
    events
        .iter()
        .map(|l| l.text.as_str())
        .collect::<Vec<_>>()
        .join(",")
}

/// Frequency-weighted mean of per-trace alignment fitness,
/// 1 − cost / (trace length + cheapest visible completion of the net).
pub fn fitness(log: &EventLog, net: &WorkflowNet, node_budget: usize) -> FitnessResult {
    let shortest = shortest_visible_completion(net, node_budget);
    let mut distinct: BTreeMap<Vec<ActivityLabel>, usize> = BTreeMap::new();
    for trace in &log.traces {
        *distinct.entry(trace.events.clone()).or_insert(0) += 1;
    }
    let mut per_trace_costs = BTreeMap::new();
    let mut unaligned = 0usize;
    let mut weighted_sum = 0.0;
    let mut weight_total = 0usize;
    for (events, count) in &distinct {
        let aligned = shortest.and_then(|_| align_trace(net, events, node_budget));
        match aligned {
            None => unaligned += count,
            Some(cost) => {
                per_trace_costs.insert(trace_key(events), cost);
                let denom = events.len() + shortest.unwrap_or(0);
                let trace_fitness = if denom == 0 {
                    1.0
                } else {
                    1.0 - cost as f64 / denom as f64
                };
                weighted_sum += trace_fitness * *count as f64;
                weight_total += count;
            }
        }
    }
    let value = if weight_total == 0 {
        0.0
    } else {
        weighted_sum / weight_total as f64
    };
    FitnessResult {
        value,
        per_trace_costs,
        unaligned_traces: unaligned,
    }
}

/// Markings reachable from `seeds` by firing silent transitions only.
fn silent_closure(net: &WorkflowNet, seeds: BTreeSet<Marking>) -> BTreeSet<Marking> {
    let mut closure = seeds;
    let mut stack: Vec<Marking> = closure.iter().cloned().collect();
    while let Some(marking) = stack.pop() {
        for t in 0..net.num_transitions() {
            if !net.transitions[t].kind.is_silent() || !net.enabled(&marking, t) {
                continue;
            }
            let next = net.fire(&marking, t);
            if next.iter().any(|&c| c > 2) {
                continue;
            }
            if closure.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
    closure
}

fn enabled_labels(net: &WorkflowNet, closure: &BTreeSet<Marking>) -> BTreeSet<ActivityLabel> {
    let mut labels = BTreeSet::new();
    for marking in closure {
        for t in 0..net.num_transitions() {
            if let Some(label) = net.transitions[t].kind.label() {
                if net.enabled(marking, t) {
                    labels.insert(label.clone());
                }
            }
        }
    }
    labels
}

/// Escaping-edges precision over the log's prefix automaton: each prefix
/// state is weighted by its visit frequency; "executed" are the activities
/// the log actually continues with, "enabled" the visible labels fireable
/// after silently closing the model state reached by replaying the prefix.
/// Unreplayable prefixes are skipped.
pub fn precision(log: &EventLog, net: &WorkflowNet) -> f64 {
    #[derive(Default)]
    struct PrefixInfo {
        weight: usize,
        next: BTreeSet<ActivityLabel>,
    }
    let mut prefixes: BTreeMap<Vec<ActivityLabel>, PrefixInfo> = BTreeMap::new();
    for trace in &log.traces {
        for pos in 0..=trace.events.len() {
            let info = prefixes.entry(trace.events[..pos].to_vec()).or_default();
            info.weight += 1;
            if pos < trace.events.len() {
                info.next.insert(trace.events[pos].clone());
            }
        }
    }

    // replay each prefix to its determinized model state; BTreeMap order
    // guarantees a prefix is processed before its extensions
    let mut states: BTreeMap<Vec<ActivityLabel>, BTreeSet<Marking>> = BTreeMap::new();
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for (prefix, info) in &prefixes {
        let closure = match prefix.split_last() {
            None => silent_closure(net, BTreeSet::from([net.initial_marking()])),
            Some((last, head)) => {
                let Some(parent) = states.get(head) else {
                    continue;
                };
                let mut seeds = BTreeSet::new();
                for marking in parent {
                    for t in 0..net.num_transitions() {
                        if net.transitions[t].kind.label() == Some(last) && net.enabled(marking, t)
                        {
                            let next = net.fire(marking, t);
                            if next.iter().all(|&c| c <= 2) {
                                seeds.insert(next);
                            }
                        }
                    }
                }
                if seeds.is_empty() {
                    continue;
                }
                silent_closure(net, seeds)
            }
        };
        let enabled = enabled_labels(net, &closure);
        let executed = info.next.intersection(&enabled).count();
        numerator += info.weight as f64 * executed as f64;
        denominator += info.weight as f64 * enabled.len() as f64;
        states.insert(prefix.clone(), closure);
    }
    if denominator == 0.0 {
        1.0
    } else {
        numerator / denominator
    }
}

/// Harmonic mean of fitness and precision; 0 when both are 0.
pub fn f_score(fitness: f64, precision: f64) -> f64 {
    if fitness + precision <= 0.0 {
        0.0
    } else {
        2.0 * fitness * precision / (fitness + precision)
    }
}

/// Size (places + transitions) and control-flow complexity derived from the
/// net's gateway structure.
pub fn complexity(net: &WorkflowNet) -> (usize, usize) {
    let size = net.num_places() + net.num_transitions();
    let mut cfc = 0;
    for p in 0..net.num_places() {
        let out = net.place_consumers(p).len();
        if out >= 2 {
            cfc += out;
        }
    }
    for t in 0..net.num_transitions() {
        if net.transition_outputs(t).len() >= 2 {
            cfc += 1;
        }
    }
    (size, cfc)
}

/// Full evaluation of a net against a log.
pub fn evaluate(log: &EventLog, net: &WorkflowNet, state_bound: usize) -> ConformanceReport {
    let soundness = check_soundness(net, state_bound);
    let fit = fitness(log, net, state_bound);
    let prec = precision(log, net);
    let (size, cfc) = complexity(net);
    ConformanceReport {
        fitness: fit.value,
        precision: prec,
        f_score: f_score(fit.value, prec),
        size,
        cfc,
        sound: soundness.is_sound,
        per_trace_costs: fit.per_trace_costs,
        unaligned_traces: fit.unaligned_traces,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petrinet::translate;
    use crate::tree::parse_tree;

    const BUDGET: usize = 1_000_000;

    fn labels(names: &[&str]) -> Vec<ActivityLabel> {
        names.iter().map(|n| ActivityLabel::new(*n)).collect()
    }

    #[test]
    fn alignment_cost_examples() {
        let net = translate(&parse_tree("->(A, C)").unwrap()).unwrap();
        assert_eq!(align_trace(&net, &labels(&["A", "C"]), BUDGET), Some(0));
        assert_eq!(
            align_trace(&net, &labels(&["A", "X", "C"]), BUDGET),
            Some(1)
        );
        assert_eq!(align_trace(&net, &labels(&["C"]), BUDGET), Some(1));
        assert_eq!(align_trace(&net, &labels(&[]), BUDGET), Some(2));
    }

    #[test]
    fn fitness_hand_computed() {
        // one skipped event against a two-step net: 1 - 1/(3+2) = 0.8
        let net = translate(&parse_tree("->(A, C)").unwrap()).unwrap();
        let log = EventLog::from_label_seqs(&[vec!["A", "X", "C"]]);
        let result = fitness(&log, &net, BUDGET);
        assert!((result.value - 0.8).abs() < 1e-12);
        assert_eq!(result.per_trace_costs["A,X,C"], 1);
    }

    #[test]
    fn fitness_perfect_on_model_language() {
        let net = translate(&parse_tree("X(->(A, B=>{E}, C), ->(D, E, F))").unwrap()).unwrap();
        let log = EventLog::from_label_seqs(&[
            vec!["A", "B", "C"],
            vec!["D", "E", "F"],
            vec!["A", "B", "E", "F"],
        ]);
        let result = fitness(&log, &net, BUDGET);
        assert_eq!(result.value, 1.0);
        assert_eq!(result.unaligned_traces, 0);
    }

    #[test]
    fn fitness_budget_exhaustion_reported() {
        let net = translate(&parse_tree("->(A, C)").unwrap()).unwrap();
        let log = EventLog::from_label_seqs(&[vec!["A", "X", "C"]]);
        let result = fitness(&log, &net, 1);
        assert_eq!(result.unaligned_traces, 1);
        assert_eq!(result.value, 0.0);
    }

    #[test]
    fn precision_perfect_when_language_matches() {
        let net = translate(&parse_tree("X(->(A=>{F}, B, C), ->(D, E, F))").unwrap()).unwrap();
        let log =
            EventLog::from_label_seqs(&[vec!["A", "B", "C"], vec!["D", "E", "F"], vec!["A", "F"]]);
        assert_eq!(precision(&log, &net), 1.0);
    }

    #[test]
    fn precision_penalizes_flower() {
        // every prefix state of the flower enables all six activities
        let net = translate(&parse_tree("loop(tau, A, B, C, D, E, F)").unwrap()).unwrap();
        let log =
            EventLog::from_label_seqs(&[vec!["A", "B", "C"], vec!["D", "E", "F"], vec!["A", "F"]]);
        let p = precision(&log, &net);
        assert!((p - 13.0 / 66.0).abs() < 1e-12, "got {p}");
        assert!(p < 0.5);
    }

    #[test]
    fn precision_single_path() {
        let net = translate(&parse_tree("->(a, b)").unwrap()).unwrap();
        let log = EventLog::from_label_seqs(&[vec!["a", "b"]]);
        assert_eq!(precision(&log, &net), 1.0);
    }

    #[test]
    fn f_score_values() {
        assert_eq!(f_score(1.0, 1.0), 1.0);
        assert_eq!(f_score(0.0, 0.0), 0.0);
        assert!((f_score(1.0, 0.38) - 0.5507246376811594).abs() < 1e-12);
        let rounded = (f_score(0.97, 0.80) * 100.0).round() / 100.0;
        assert_eq!(rounded, 0.88);
        for x in [0.1, 0.5, 0.9, 1.0] {
            assert!((f_score(x, x) - x).abs() < 1e-12);
            assert_eq!(f_score(x, 0.3), f_score(0.3, x));
        }
    }

    #[test]
    fn complexity_counts_gateways() {
        let net = translate(&parse_tree("a").unwrap()).unwrap();
        assert_eq!(complexity(&net), (3, 0));
        // X-split at the source (2) plus the switch choice after B (2)
        let fig1 = translate(&parse_tree("X(->(A, B=>{E}, C), ->(D, E, F))").unwrap()).unwrap();
        assert_eq!(complexity(&fig1).1, 4);
        // an AND-split contributes one
        let par = translate(&parse_tree("/\\(a, b)").unwrap()).unwrap();
        assert_eq!(complexity(&par).1, 1);
    }

    #[test]
    fn evaluate_full_report() {
        let net = translate(&parse_tree("X(->(A, B=>{E}, C), ->(D, E, F))").unwrap()).unwrap();
        let log = EventLog::from_label_seqs(&[
            vec!["A", "B", "C"],
            vec!["D", "E", "F"],
            vec!["A", "B", "E", "F"],
        ]);
        let report = evaluate(&log, &net, BUDGET);
        assert_eq!(report.fitness, 1.0);
        assert_eq!(report.precision, 1.0);
        assert_eq!(report.f_score, 1.0);
        assert!(report.sound);
        assert!(serde_json::to_string(&report).is_ok());
    }
}
