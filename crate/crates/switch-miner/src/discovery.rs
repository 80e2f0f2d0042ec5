//! The extended inductive-miner recursion: switch exclusive choice cut first,
//! then the classical sequence, concurrent, and loop cuts, with log splitting,
//! activity-count verification for switch cuts, and a flower fallthrough.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::eventlog::{
    add_artificial_endpoints, count_distinct_activities, ActivityLabel, EventLog, Trace,
};
use crate::relations::{annotate_invisible_edges, build_dfg, mendacious_dependencies, Dfg};
use crate::tree::{prune_invalid_switches, Operator, SwitchProcessTree};

#[derive(Debug, Clone)]
pub struct DiscoveryConfig {
    /// Remove traces containing a switch adjacency before splitting an
    /// exclusive choice with switches.
    pub delete_switch_traces: bool,
    /// Relative edge-frequency threshold in [0, 1]; 0 keeps every edge.
    pub noise_threshold: f64,
    /// Depth guard; each recursion strictly shrinks the log, so hitting this
    /// is an internal error.
    pub max_recursion_guard: usize,
    /// Disable to fall back to the plain exclusive choice cut (baseline
    /// behaviour without switch detection).
    pub enable_switch_cut: bool,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        DiscoveryConfig {
            delete_switch_traces: false,
            noise_threshold: 0.0,
            max_recursion_guard: 10_000,
            enable_switch_cut: true,
        }
    }
}

/// An operator cut: ordered disjoint partitions covering the log alphabet,
/// plus the switch behaviours crossing partitions (nonempty only for switch
/// exclusive choice cuts).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub operator: Operator,
    pub partitions: Vec<BTreeSet<ActivityLabel>>,
    pub switches: BTreeSet<(ActivityLabel, ActivityLabel)>,
}

impl Cut {
    fn plain(operator: Operator, partitions: Vec<BTreeSet<ActivityLabel>>) -> Self {
        Cut {
            operator,
            partitions,
            switches: BTreeSet::new(),
        }
    }
}

pub fn discover(log: &EventLog, config: &DiscoveryConfig) -> Result<SwitchProcessTree> {
    if !(0.0..=1.0).contains(&config.noise_threshold) {
        return Err(Error::Config(format!(
            "noise threshold {} outside [0, 1]",
            config.noise_threshold
        )));
    }
    let tree = discover_rec(log, config, 0)?;
    Ok(prune_invalid_switches(&tree))
}

fn discover_rec(
    log: &EventLog,
    config: &DiscoveryConfig,
    depth: usize,
) -> Result<SwitchProcessTree> {
    if depth > config.max_recursion_guard {
        return Err(Error::Internal("recursion guard exceeded".into()));
    }
    if let Some(tree) = base_case(log) {
        return Ok(tree);
    }
    let dfg = apply_noise_filter(&build_dfg(log), config.noise_threshold);

    let mut cut = if config.enable_switch_cut {
        switch_exclusive_choice_cut_filtered(log, config.noise_threshold)
    } else {
        xor_cut(&dfg)
    };
    if cut.is_none() {
        cut = sequence_cut(&dfg);
    }
    if cut.is_none() {
        cut = concurrent_cut(&dfg);
    }
    if cut.is_none() {
        cut = loop_cut(&dfg);
    }
    let Some(mut cut) = cut else {
        return Ok(fallthrough(log));
    };

    let activities_before = count_distinct_activities([log]);
    let mut sublogs = split_log(log, &cut, config);

    // splitting a switch cut may lose activities; abort and redo with the
    // plain exclusive choice cut, keeping switch detection enabled for the
    // sub-recursions
    if !cut.switches.is_empty() && count_distinct_activities(sublogs.iter()) != activities_before {
        let mut redo = xor_cut(&dfg);
        if redo.is_none() {
            redo = sequence_cut(&dfg);
        }
        if redo.is_none() {
            redo = concurrent_cut(&dfg);
        }
        if redo.is_none() {
            redo = loop_cut(&dfg);
        }
        let Some(redo) = redo else {
            return Ok(fallthrough(log));
        };
        cut = redo;
        sublogs = split_log(log, &cut, config);
    }

    debug_assert!(sublogs
        .iter()
        .all(|sub| count_distinct_activities([sub]) < activities_before));

    let children = sublogs
        .iter()
        .map(|sub| discover_rec(sub, config, depth + 1))
        .collect::<Result<Vec<_>>>()?;
    let mut node = SwitchProcessTree::Operator(cut.operator, children);
    for (src, dst) in &cut.switches {
        graft_switch(&mut node, src, dst);
    }
    Ok(node)
}

/// Base cases of the recursion: empty logs, a single activity, and their
/// variations with empty traces or repetitions.
pub fn base_case(log: &EventLog) -> Option<SwitchProcessTree> {
    let alphabet = log.alphabet();
    if alphabet.is_empty() {
        return Some(SwitchProcessTree::Tau);
    }
    if alphabet.len() > 1 {
        return None;
    }
    let label = alphabet.into_iter().next().unwrap();
    let has_empty = log.traces.iter().any(|t| t.events.is_empty());
    let max_len = log.traces.iter().map(|t| t.events.len()).max().unwrap_or(0);
    let activity = SwitchProcessTree::Activity(label);
    Some(match (has_empty, max_len) {
        (false, 1) => activity,
        (true, 1) => SwitchProcessTree::xor(vec![activity, SwitchProcessTree::Tau]),
        // repetitions: a+ without empties, a* with them
        (false, _) => SwitchProcessTree::looped(vec![activity, SwitchProcessTree::Tau]),
        (true, _) => SwitchProcessTree::looped(vec![SwitchProcessTree::Tau, activity]),
    })
}

/// Flower model over the log alphabet: replays anything, including the empty
/// trace.
pub fn fallthrough(log: &EventLog) -> SwitchProcessTree {
    let mut children = vec![SwitchProcessTree::Tau];
    children.extend(log.alphabet().into_iter().map(SwitchProcessTree::Activity));
    SwitchProcessTree::looped(children)
}

/// Drops DFG edges rarer than `threshold` times the strongest outgoing edge
/// of their source node.
pub fn apply_noise_filter(dfg: &Dfg, threshold: f64) -> Dfg {
    if threshold <= 0.0 {
        return dfg.clone();
    }
    let mut max_out: BTreeMap<&ActivityLabel, u64> = BTreeMap::new();
    for ((a, _), &count) in &dfg.edge_count {
        let entry = max_out.entry(a).or_insert(0);
        *entry = (*entry).max(count);
    }
    let mut filtered = dfg.clone();
    filtered
        .edge_count
        .retain(|(a, _), count| (*count as f64) >= threshold * max_out[a] as f64);
    filtered
}

/// Weakly connected components over the given nodes and edges, ordered by
/// their smallest member.
fn components<'a>(
    nodes: &BTreeSet<ActivityLabel>,
    edges: impl Iterator<Item = (&'a ActivityLabel, &'a ActivityLabel)>,
) -> Vec<BTreeSet<ActivityLabel>> {
    let index: BTreeMap<&ActivityLabel, usize> = nodes.iter().zip(0..).collect();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, index[a]), find(&mut parent, index[b]));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<ActivityLabel>> = BTreeMap::new();
    for (label, &i) in &index {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().insert((*label).clone());
    }
    let mut out: Vec<BTreeSet<ActivityLabel>> = groups.into_values().collect();
    out.sort_by(|a, b| a.iter().next().cmp(&b.iter().next()));
    out
}

/// Switch exclusive choice cut: augment, detect mendacious dependencies,
/// strip, mark invisible edges, and partition by the remaining visible edges.
pub fn switch_exclusive_choice_cut(log: &EventLog) -> Option<Cut> {
    switch_exclusive_choice_cut_filtered(log, 0.0)
}

fn switch_exclusive_choice_cut_filtered(log: &EventLog, noise_threshold: f64) -> Option<Cut> {
    let augmented = add_artificial_endpoints(log);
    let mendacious = mendacious_dependencies(&augmented);
    let dfg = apply_noise_filter(&build_dfg(log), noise_threshold);
    let annotated = annotate_invisible_edges(&dfg, &mendacious);
    let visible_edges = dfg
        .edges()
        .filter(|(a, b)| !annotated.invisible.contains(&((*a).clone(), (*b).clone())));
    let partitions = components(&dfg.nodes, visible_edges);
    if partitions.len() < 2 {
        return None;
    }
    let part_of: BTreeMap<&ActivityLabel, usize> = partitions
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.iter().map(move |l| (l, i)))
        .collect();
    let switches = annotated
        .invisible
        .iter()
        .filter(|(a, b)| part_of[a] != part_of[b])
        .cloned()
        .collect();
    Some(Cut {
        operator: Operator::Xor,
        partitions,
        switches,
    })
}

/// Plain exclusive choice cut: weakly connected components of the full DFG.
pub fn xor_cut(dfg: &Dfg) -> Option<Cut> {
    let partitions = components(&dfg.nodes, dfg.edges());
    (partitions.len() >= 2).then(|| Cut::plain(Operator::Xor, partitions))
}

fn reachability(dfg: &Dfg) -> BTreeMap<ActivityLabel, BTreeSet<ActivityLabel>> {
    let mut succ: BTreeMap<&ActivityLabel, Vec<&ActivityLabel>> = BTreeMap::new();
    for (a, b) in dfg.edges() {
        succ.entry(a).or_default().push(b);
    }
    let mut reach = BTreeMap::new();
    for start in &dfg.nodes {
        let mut seen: BTreeSet<ActivityLabel> = BTreeSet::new();
        let mut stack: Vec<&ActivityLabel> = vec![start];
        while let Some(n) = stack.pop() {
            for &next in succ.get(n).map(Vec::as_slice).unwrap_or_default() {
                if seen.insert(next.clone()) {
                    stack.push(next);
                }
            }
        }
        reach.insert(start.clone(), seen);
    }
    reach
}

/// Sequence cut: strongly connected components merged when mutually
/// unreachable, valid only if the resulting groups are totally ordered with
/// strict one-way reachability between every cross-group pair.
pub fn sequence_cut(dfg: &Dfg) -> Option<Cut> {
    if dfg.nodes.len() < 2 {
        return None;
    }
    let reach = reachability(dfg);
    let reaches = |a: &ActivityLabel, b: &ActivityLabel| reach[a].contains(b);

    // merge mutually reachable (SCC) and mutually unreachable pairs alike
    let nodes: Vec<&ActivityLabel> = dfg.nodes.iter().collect();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            let forward = reaches(nodes[i], nodes[j]);
            let backward = reaches(nodes[j], nodes[i]);
            if forward == backward {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<ActivityLabel>> = BTreeMap::new();
    for (i, label) in nodes.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().insert((*label).clone());
    }
    if groups.len() < 2 {
        return None;
    }
    let mut partitions: Vec<BTreeSet<ActivityLabel>> = groups.into_values().collect();
    // order groups by reachability and verify strict pairwise one-way reach
    partitions.sort_by(|left, right| {
        let l = left.iter().next().unwrap();
        let r = right.iter().next().unwrap();
        match (reaches(l, r), reaches(r, l)) {
            (true, false) => std::cmp::Ordering::Less,
            (false, true) => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Equal,
        }
    });
    for i in 0..partitions.len() {
        for j in (i + 1)..partitions.len() {
            for a in &partitions[i] {
                for b in &partitions[j] {
                    if !reaches(a, b) || reaches(b, a) {
                        return None;
                    }
                }
            }
        }
    }
    Some(Cut::plain(Operator::Seq, partitions))
}

/// Concurrent cut: components of the "missing double edge" graph, where every
/// partition must contain at least one start and one end activity.
pub fn concurrent_cut(dfg: &Dfg) -> Option<Cut> {
    if dfg.nodes.len() < 2 {
        return None;
    }
    let double = |a: &ActivityLabel, b: &ActivityLabel| dfg.has_edge(a, b) && dfg.has_edge(b, a);
    let nodes: Vec<&ActivityLabel> = dfg.nodes.iter().collect();
    let mut weak_edges: Vec<(ActivityLabel, ActivityLabel)> = Vec::new();
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            if !double(nodes[i], nodes[j]) {
                weak_edges.push((nodes[i].clone(), nodes[j].clone()));
            }
        }
    }
    let mut partitions = components(&dfg.nodes, weak_edges.iter().map(|(a, b)| (a, b)));
    if partitions.len() < 2 {
        return None;
    }
    let starts: BTreeSet<&ActivityLabel> = dfg.start_activities.keys().collect();
    let ends: BTreeSet<&ActivityLabel> = dfg.end_activities.keys().collect();
    let complete = |p: &BTreeSet<ActivityLabel>| {
        p.iter().any(|l| starts.contains(l)) && p.iter().any(|l| ends.contains(l))
    };
    // merge partitions missing a start or end into the first complete one
    let anchor = partitions.iter().position(&complete)?;
    let mut merged: Vec<BTreeSet<ActivityLabel>> = Vec::new();
    let mut extra: BTreeSet<ActivityLabel> = BTreeSet::new();
    for (i, p) in partitions.drain(..).enumerate() {
        if i == anchor || complete(&p) {
            merged.push(p);
        } else {
            extra.extend(p);
        }
    }
    merged[0].extend(extra);
    (merged.len() >= 2).then(|| Cut::plain(Operator::Par, merged))
}

/// Loop cut: the body holds all start and end activities; redo components may
/// connect only from end activities and back to start activities, and must
/// connect to all of them.
pub fn loop_cut(dfg: &Dfg) -> Option<Cut> {
    let starts: BTreeSet<ActivityLabel> = dfg.start_activities.keys().cloned().collect();
    let ends: BTreeSet<ActivityLabel> = dfg.end_activities.keys().cloned().collect();
    if starts.is_empty() || ends.is_empty() {
        return None;
    }
    let mut body: BTreeSet<ActivityLabel> = starts.union(&ends).cloned().collect();
    loop {
        let rest: BTreeSet<ActivityLabel> = dfg
            .nodes
            .iter()
            .filter(|n| !body.contains(*n))
            .cloned()
            .collect();
        if rest.is_empty() {
            return None;
        }
        let rest_edges = dfg
            .edges()
            .filter(|(a, b)| rest.contains(*a) && rest.contains(*b));
        let comps = components(&rest, rest_edges);
        let mut changed = false;
        for comp in &comps {
            if !redo_component_valid(dfg, comp, &body, &starts, &ends) {
                body.extend(comp.iter().cloned());
                changed = true;
            }
        }
        if !changed {
            let mut partitions = vec![body];
            partitions.extend(comps);
            return Some(Cut::plain(Operator::Loop, partitions));
        }
    }
}

fn redo_component_valid(
    dfg: &Dfg,
    comp: &BTreeSet<ActivityLabel>,
    body: &BTreeSet<ActivityLabel>,
    starts: &BTreeSet<ActivityLabel>,
    ends: &BTreeSet<ActivityLabel>,
) -> bool {
    for (a, b) in dfg.edges() {
        let a_in = comp.contains(a);
        let b_in = comp.contains(b);
        // body -> redo only from ends; redo -> body only to starts
        if b_in && !a_in && body.contains(a) && !ends.contains(a) {
            return false;
        }
        if a_in && !b_in && body.contains(b) && !starts.contains(b) {
            return false;
        }
    }
    // boundary totality: an entry must be fed by all ends, an exit must feed
    // all starts
    for a in comp {
        let entered = ends.iter().any(|e| dfg.has_edge(e, a));
        if entered && !ends.iter().all(|e| dfg.has_edge(e, a)) {
            return false;
        }
        let exits = starts.iter().any(|s| dfg.has_edge(a, s));
        if exits && !starts.iter().all(|s| dfg.has_edge(a, s)) {
            return false;
        }
    }
    true
}

/// Splits the log along a cut. Exclusive choice assigns each trace to the
/// partition holding most of its events (ties to the partition of the
/// earliest event) and projects foreign events away; sequence and concurrent
/// project; loop segments traces into body and redo parts.
pub fn split_log(log: &EventLog, cut: &Cut, config: &DiscoveryConfig) -> Vec<EventLog> {
    let part_of: BTreeMap<&ActivityLabel, usize> = cut
        .partitions
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.iter().map(move |l| (l, i)))
        .collect();
    let k = cut.partitions.len();
    let mut sublogs: Vec<EventLog> = vec![EventLog::default(); k];

    match cut.operator {
        Operator::Xor => {
            let has_switch_adjacency = |trace: &Trace| {
                trace
                    .events
                    .windows(2)
                    .any(|w| cut.switches.contains(&(w[0].clone(), w[1].clone())))
            };
            for trace in &log.traces {
                if config.delete_switch_traces
                    && !cut.switches.is_empty()
                    && has_switch_adjacency(trace)
                {
                    continue;
                }
                let mut counts = vec![0usize; k];
                for e in &trace.events {
                    if let Some(&i) = part_of.get(e) {
                        counts[i] += 1;
                    }
                }
                let best = counts.iter().max().copied().unwrap_or(0);
                let target = if best == 0 {
                    0
                } else {
                    let tied: BTreeSet<usize> = counts
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c == best)
                        .map(|(i, _)| i)
                        .collect();
                    if tied.len() == 1 {
                        *tied.iter().next().unwrap()
                    } else {
                        trace
                            .events
                            .iter()
                            .find_map(|e| part_of.get(e).filter(|i| tied.contains(i)))
                            .copied()
                            .unwrap_or(0)
                    }
                };
                let events: Vec<ActivityLabel> = trace
                    .events
                    .iter()
                    .filter(|e| part_of.get(e) == Some(&target))
                    .cloned()
                    .collect();
                sublogs[target]
                    .traces
                    .push(Trace::new(trace.case_id.clone(), events));
            }
        }
        Operator::Seq | Operator::Par => {
            for trace in &log.traces {
                for (i, partition) in cut.partitions.iter().enumerate() {
                    let events: Vec<ActivityLabel> = trace
                        .events
                        .iter()
                        .filter(|e| partition.contains(*e))
                        .cloned()
                        .collect();
                    sublogs[i]
                        .traces
                        .push(Trace::new(trace.case_id.clone(), events));
                }
            }
        }
        Operator::Loop => {
            for trace in &log.traces {
                let mut segments: Vec<(usize, Vec<ActivityLabel>)> = Vec::new();
                for e in &trace.events {
                    let i = part_of.get(e).copied().unwrap_or(0);
                    match segments.last_mut() {
                        Some((cur, events)) if *cur == i => events.push(e.clone()),
                        _ => segments.push((i, vec![e.clone()])),
                    }
                }
                // body segments must open, close, and separate redo segments
                let mut expanded: Vec<(usize, Vec<ActivityLabel>)> = Vec::new();
                for seg in segments {
                    if seg.0 != 0 && !matches!(expanded.last(), Some((0, _))) {
                        expanded.push((0, Vec::new()));
                    }
                    expanded.push(seg);
                }
                if !matches!(expanded.last(), Some((0, _))) {
                    expanded.push((0, Vec::new()));
                }
                for (i, events) in expanded {
                    sublogs[i]
                        .traces
                        .push(Trace::new(trace.case_id.clone(), events));
                }
            }
        }
    }
    sublogs
}

/// Verification step for switch cuts: accept only if no activity disappeared.
pub fn verify_switch_cut(log: &EventLog, sublogs: &[EventLog]) -> bool {
    count_distinct_activities([log]) == count_distinct_activities(sublogs.iter())
}

/// Converts the activity leaf of `src` into (or extends) a switch leaf, if
/// both endpoints still have leaves in the tree.
fn graft_switch(node: &mut SwitchProcessTree, src: &ActivityLabel, dst: &ActivityLabel) {
    fn has_leaf(node: &SwitchProcessTree, label: &ActivityLabel) -> bool {
        match node {
            SwitchProcessTree::Operator(_, children) => children.iter().any(|c| has_leaf(c, label)),
            other => other.leaf_activity() == Some(label),
        }
    }
    fn graft(node: &mut SwitchProcessTree, src: &ActivityLabel, dst: &ActivityLabel) -> bool {
        match node {
            SwitchProcessTree::Operator(_, children) => {
                children.iter_mut().any(|c| graft(c, src, dst))
            }
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
    if has_leaf(node, dst) {
        graft(node, src, dst);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{parse_tree, render_tree};

    fn l1() -> EventLog {
        EventLog::from_label_seqs(&[
            vec!["A", "B", "C"],
            vec!["D", "E", "F"],
            vec!["A", "B", "E", "F"],
        ])
    }

    fn label(s: &str) -> ActivityLabel {
        ActivityLabel::new(s)
    }

    fn set(labels: &[&str]) -> BTreeSet<ActivityLabel> {
        labels.iter().map(|l| label(l)).collect()
    }

    fn labels_of(names: &[&str]) -> Vec<ActivityLabel> {
        names.iter().map(|l| label(l)).collect()
    }

    #[test]
    fn base_cases() {
        assert_eq!(
            base_case(&EventLog::default()),
            Some(SwitchProcessTree::Tau)
        );
        let empties = EventLog::from_label_seqs(&[Vec::<&str>::new(), Vec::new()]);
        assert_eq!(base_case(&empties), Some(SwitchProcessTree::Tau));
        let single = EventLog::from_label_seqs(&vec![vec!["a"]; 5]);
        assert_eq!(base_case(&single), Some(SwitchProcessTree::activity("a")));
        let optional = EventLog::from_label_seqs(&[vec!["a"], vec![]]);
        assert_eq!(base_case(&optional), Some(parse_tree("X(a, tau)").unwrap()));
        let repeated = EventLog::from_label_seqs(&[vec!["a"], vec!["a", "a", "a"]]);
        assert_eq!(
            base_case(&repeated),
            Some(parse_tree("loop(a, tau)").unwrap())
        );
        assert_eq!(base_case(&l1()), None);
    }

    #[test]
    fn switch_cut_on_l1() {
        let cut = switch_exclusive_choice_cut(&l1()).unwrap();
        assert_eq!(cut.operator, Operator::Xor);
        assert_eq!(
            cut.partitions,
            vec![set(&["A", "B", "C"]), set(&["D", "E", "F"])]
        );
        let switches: BTreeSet<_> = [(label("B"), label("E"))].into_iter().collect();
        assert_eq!(cut.switches, switches);
    }

    #[test]
    fn switch_cut_none_when_connected() {
        let log = EventLog::from_label_seqs(&[vec!["a", "b"], vec!["b", "a"]]);
        assert!(switch_exclusive_choice_cut(&log).is_none());
    }

    #[test]
    fn switch_cut_table1_row4() {
        let log = EventLog::from_label_seqs(&[
            vec!["A", "B", "C"],
            vec!["D", "E", "F"],
            vec!["D", "E", "C"],
            vec!["A", "F"],
            vec!["A", "C"],
        ]);
        let cut = switch_exclusive_choice_cut(&log).unwrap();
        assert_eq!(
            cut.partitions,
            vec![set(&["A", "B", "C"]), set(&["D", "E", "F"])]
        );
        let switches: BTreeSet<_> = [(label("A"), label("F")), (label("E"), label("C"))]
            .into_iter()
            .collect();
        assert_eq!(cut.switches, switches);
    }

    #[test]
    fn classical_cuts() {
        let seq = build_dfg(&EventLog::from_label_seqs(&[vec!["a", "b"]]));
        let cut = sequence_cut(&seq).unwrap();
        assert_eq!(cut.operator, Operator::Seq);
        assert_eq!(cut.partitions, vec![set(&["a"]), set(&["b"])]);

        let par = build_dfg(&EventLog::from_label_seqs(&[
            vec!["a", "b"],
            vec!["b", "a"],
        ]));
        let cut = concurrent_cut(&par).unwrap();
        assert_eq!(cut.operator, Operator::Par);
        assert_eq!(cut.partitions, vec![set(&["a"]), set(&["b"])]);

        let lp = build_dfg(&EventLog::from_label_seqs(&[
            vec!["a"],
            vec!["a", "b", "a"],
        ]));
        let cut = loop_cut(&lp).unwrap();
        assert_eq!(cut.operator, Operator::Loop);
        assert_eq!(cut.partitions, vec![set(&["a"]), set(&["b"])]);

        let xor = build_dfg(&EventLog::from_label_seqs(&[vec!["a"], vec!["b"]]));
        let cut = xor_cut(&xor).unwrap();
        assert_eq!(cut.operator, Operator::Xor);
        assert_eq!(cut.partitions, vec![set(&["a"]), set(&["b"])]);
    }

    #[test]
    fn sequence_cut_needs_total_reachability() {
        // A->B, D->E, A->F style gaps make the merged groups invalid
        let dfg = build_dfg(&EventLog::from_label_seqs(&[
            vec!["A", "B", "C"],
            vec!["D", "E", "F"],
            vec!["A", "F"],
        ]));
        assert!(sequence_cut(&dfg).is_none());
        assert!(concurrent_cut(&dfg).is_none());
        assert!(loop_cut(&dfg).is_none());
    }

    #[test]
    fn split_l1_delete_on() {
        let cut = switch_exclusive_choice_cut(&l1()).unwrap();
        let config = DiscoveryConfig {
            delete_switch_traces: true,
            ..DiscoveryConfig::default()
        };
        let sublogs = split_log(&l1(), &cut, &config);
        assert_eq!(
            sublogs[0],
            EventLog::from_label_seqs(&[vec!["A", "B", "C"]])
        );
        assert_eq!(sublogs[1].traces.len(), 1);
        assert_eq!(sublogs[1].traces[0].events, labels_of(&["D", "E", "F"]));
    }

    #[test]
    fn split_l1_delete_off_tiebreak() {
        let cut = switch_exclusive_choice_cut(&l1()).unwrap();
        let sublogs = split_log(&l1(), &cut, &DiscoveryConfig::default());
        // <A,B,E,F> ties 2-2 and goes to the partition of its earliest event
        let first: Vec<Vec<&str>> = sublogs[0]
            .traces
            .iter()
            .map(|t| t.events.iter().map(|e| e.text.as_str()).collect())
            .collect();
        assert_eq!(first, vec![vec!["A", "B", "C"], vec!["A", "B"]]);
    }

    #[test]
    fn split_sequence() {
        let log = EventLog::from_label_seqs(&[vec!["a", "b"]]);
        let cut = Cut::plain(Operator::Seq, vec![set(&["a"]), set(&["b"])]);
        let sublogs = split_log(&log, &cut, &DiscoveryConfig::default());
        assert_eq!(sublogs[0], EventLog::from_label_seqs(&[vec!["a"]]));
        assert_eq!(sublogs[1].traces[0].events, vec![label("b")]);
    }

    #[test]
    fn discover_l1_delete_on() {
        let config = DiscoveryConfig {
            delete_switch_traces: true,
            ..DiscoveryConfig::default()
        };
        let tree = discover(&l1(), &config).unwrap();
        assert_eq!(render_tree(&tree), "X(->(A, B=>{E}, C), ->(D, E, F))");
    }

    #[test]
    fn discover_singleton() {
        let log = EventLog::from_label_seqs(&[vec!["A"], vec!["A"]]);
        let tree = discover(&log, &DiscoveryConfig::default()).unwrap();
        assert_eq!(tree, SwitchProcessTree::activity("A"));
    }

    #[test]
    fn discover_table1_row2_switches() {
        let log = EventLog::from_label_seqs(&[
            vec!["A", "B", "C"],
            vec!["D", "E", "F"],
            vec!["A", "E", "F"],
            vec!["D", "E", "C"],
            vec!["A", "E", "C"],
        ]);
        let cut = switch_exclusive_choice_cut(&log).unwrap();
        assert_eq!(
            cut.partitions,
            vec![set(&["A", "B", "C"]), set(&["D", "E", "F"])]
        );
        let switches: BTreeSet<_> = [(label("A"), label("E")), (label("E"), label("C"))]
            .into_iter()
            .collect();
        assert_eq!(cut.switches, switches);
        let config = DiscoveryConfig {
            delete_switch_traces: true,
            ..DiscoveryConfig::default()
        };
        let tree = discover(&log, &config).unwrap();
        assert_eq!(render_tree(&tree), "X(->(A=>{E}, B, C), ->(D, E=>{C}, F))");
    }

    #[test]
    fn verify_abort_falls_back_to_plain_path() {
        // G occurs only in switch traces; deleting them would lose it
        let log = EventLog::from_label_seqs(&[
            vec!["A", "B", "C"],
            vec!["D", "E", "F"],
            vec!["A", "F"],
            vec!["A", "F", "G"],
        ]);
        let cut = switch_exclusive_choice_cut(&log).unwrap();
        assert!(!cut.switches.is_empty());
        let config = DiscoveryConfig {
            delete_switch_traces: true,
            ..DiscoveryConfig::default()
        };
        let sublogs = split_log(&log, &cut, &config);
        assert!(!verify_switch_cut(&log, &sublogs));
        // the whole discovery still covers every activity
        let tree = discover(&log, &config).unwrap();
        let mut leaves = BTreeSet::new();
        fn collect(node: &SwitchProcessTree, out: &mut BTreeSet<ActivityLabel>) {
            match node {
                SwitchProcessTree::Operator(_, children) => {
                    children.iter().for_each(|c| collect(c, out))
                }
                other => {
                    if let Some(l) = other.leaf_activity() {
                        out.insert(l.clone());
                    }
                }
            }
        }
        collect(&tree, &mut leaves);
        assert_eq!(leaves, set(&["A", "B", "C", "D", "E", "F", "G"]));
    }

    #[test]
    fn noise_filter() {
        let mut dfg = Dfg {
            nodes: set(&["A", "B", "C"]),
            ..Dfg::default()
        };
        dfg.edge_count.insert((label("A"), label("B")), 99);
        dfg.edge_count.insert((label("A"), label("C")), 1);
        let filtered = apply_noise_filter(&dfg, 0.2);
        assert!(filtered.has_edge(&label("A"), &label("B")));
        assert!(!filtered.has_edge(&label("A"), &label("C")));
        assert_eq!(apply_noise_filter(&dfg, 0.0), dfg);
        assert!(filtered.edge_count.len() <= dfg.edge_count.len());
    }

    #[test]
    fn fallthrough_is_flower() {
        let log = EventLog::from_label_seqs(&[vec!["a", "b"], vec!["b", "a"], vec!["a"]]);
        let flower = fallthrough(&log);
        assert_eq!(render_tree(&flower), "loop(tau, a, b)");
    }

    #[test]
    fn baseline_without_switch_cut() {
        let config = DiscoveryConfig {
            enable_switch_cut: false,
            ..DiscoveryConfig::default()
        };
        let log =
            EventLog::from_label_seqs(&[vec!["A", "B", "C"], vec!["D", "E", "F"], vec!["A", "F"]]);
        let tree = discover(&log, &config).unwrap();
        // plain inductive miner cannot cut this log and returns a flower
        assert!(matches!(
            tree,
            SwitchProcessTree::Operator(Operator::Loop, _)
        ));
    }
}
