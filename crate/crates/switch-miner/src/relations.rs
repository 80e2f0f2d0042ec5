//! Directly-follows graphs, the ordering relations derived from them, and
//! mendacious dependencies (the log-level signal for a hidden transition
//! between two activities).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::eventlog::{ActivityLabel, EventLog};

/// Directly-follows graph: `edge_count[(a,b)]` counts adjacencies `<.., a, b, ..>`
/// over the trace multiset. Absent key means a is never directly followed by b.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dfg {
    pub nodes: BTreeSet<ActivityLabel>,
    pub edge_count: BTreeMap<(ActivityLabel, ActivityLabel), u64>,
    pub start_activities: BTreeMap<ActivityLabel, u64>,
    pub end_activities: BTreeMap<ActivityLabel, u64>,
}

impl Dfg {
    pub fn has_edge(&self, a: &ActivityLabel, b: &ActivityLabel) -> bool {
        self.edge_count.contains_key(&(a.clone(), b.clone()))
    }

    pub fn edges(&self) -> impl Iterator<Item = (&ActivityLabel, &ActivityLabel)> {
        self.edge_count.keys().map(|(a, b)| (a, b))
    }
}

pub fn build_dfg(log: &EventLog) -> Dfg {
    let mut dfg = Dfg::default();
    for trace in &log.traces {
        for e in &trace.events {
            dfg.nodes.insert(e.clone());
        }
        if let (Some(first), Some(last)) = (trace.events.first(), trace.events.last()) {
            *dfg.start_activities.entry(first.clone()).or_insert(0) += 1;
            *dfg.end_activities.entry(last.clone()).or_insert(0) += 1;
        }
        for pair in trace.events.windows(2) {
            *dfg.edge_count
                .entry((pair[0].clone(), pair[1].clone()))
                .or_insert(0) += 1;
        }
    }
    dfg
}

/// One of the Definition 1 classifications for an unordered activity pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRelation {
    /// a ->_L b only.
    Follows,
    /// b ->_L a only.
    FollowedBy,
    /// Both directions via a two-loop (a ~ b).
    TwoLoop,
    /// a || b.
    Parallel,
    /// a # b: no direct succession either way.
    Independent,
}

/// Raw ordering predicates plus the derived Definition 1 classification.
/// Two-loop detection scans traces for `<.., a, b, a, ..>` patterns; the DFG
/// alone cannot distinguish a two-loop from two one-way traces.
#[derive(Debug, Clone, Default)]
pub struct RelationTable {
    gt: BTreeSet<(ActivityLabel, ActivityLabel)>,
    twoloop: BTreeSet<(ActivityLabel, ActivityLabel)>,
    pub nodes: BTreeSet<ActivityLabel>,
}

impl RelationTable {
    pub fn from_log(log: &EventLog) -> Self {
        let mut table = RelationTable::default();
        let mut aba: BTreeSet<(ActivityLabel, ActivityLabel)> = BTreeSet::new();
        for trace in &log.traces {
            for e in &trace.events {
                table.nodes.insert(e.clone());
            }
            for pair in trace.events.windows(2) {
                table.gt.insert((pair[0].clone(), pair[1].clone()));
            }
            for w in trace.events.windows(3) {
                if w[0] == w[2] && w[0] != w[1] {
                    aba.insert((w[0].clone(), w[1].clone()));
                }
            }
        }
        // a ~ b needs both <..,a,b,a,..> and <..,b,a,b,..>
        for (a, b) in &aba {
            if aba.contains(&(b.clone(), a.clone())) {
                table.twoloop.insert((a.clone(), b.clone()));
                table.twoloop.insert((b.clone(), a.clone()));
            }
        }
        table
    }

    /// a >_L b
    pub fn gt(&self, a: &ActivityLabel, b: &ActivityLabel) -> bool {
        self.gt.contains(&(a.clone(), b.clone()))
    }

    /// a ~_L b
    pub fn twoloop(&self, a: &ActivityLabel, b: &ActivityLabel) -> bool {
        self.twoloop.contains(&(a.clone(), b.clone()))
    }

    /// a ->_L b
    pub fn follows(&self, a: &ActivityLabel, b: &ActivityLabel) -> bool {
        self.gt(a, b) && (!self.gt(b, a) || self.twoloop(a, b))
    }

    /// a ||_L b
    pub fn parallel(&self, a: &ActivityLabel, b: &ActivityLabel) -> bool {
        self.gt(a, b) && self.gt(b, a) && !self.twoloop(a, b)
    }

    /// a #_L b: neither follows the other directly (alpha-algorithm relation).
    pub fn independent(&self, a: &ActivityLabel, b: &ActivityLabel) -> bool {
        !self.gt(a, b) && !self.gt(b, a)
    }

    pub fn classify(&self, a: &ActivityLabel, b: &ActivityLabel) -> PairRelation {
        if self.independent(a, b) {
            PairRelation::Independent
        } else if self.parallel(a, b) {
            PairRelation::Parallel
        } else if self.twoloop(a, b) {
            PairRelation::TwoLoop
        } else if self.follows(a, b) {
            PairRelation::Follows
        } else {
            PairRelation::FollowedBy
        }
    }
}

/// Builds the relation table for a DFG. The log must be the one the DFG was
/// built from; it is consulted for two-loop patterns.
pub fn derive_relations(dfg: &Dfg, log: &EventLog) -> RelationTable {
    let table = RelationTable::from_log(log);
    debug_assert_eq!(table.nodes, dfg.nodes);
    table
}

/// Ordered pairs (a, b) with a hidden-transition signal a ~>_L b, plus one
/// recorded witness pair per dependency for diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MendaciousSet {
    pub pairs: BTreeSet<(ActivityLabel, ActivityLabel)>,
    pub witness: BTreeMap<(ActivityLabel, ActivityLabel), (ActivityLabel, ActivityLabel)>,
}

impl MendaciousSet {
    pub fn contains(&self, a: &ActivityLabel, b: &ActivityLabel) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }
}

/// Computes all mendacious dependencies of an (already augmented) log.
///
/// A pair (a, b) of non-artificial activities qualifies when a ->_L b and
/// there are witnesses x, y with a ->_L x, y ->_L b, not y >_L x, x #_L b and
/// a #_L y. Artificial endpoint labels may serve as witnesses but never as
/// dependency endpoints.
pub fn mendacious_dependencies(log: &EventLog) -> MendaciousSet {
    let table = RelationTable::from_log(log);
    let mut set = MendaciousSet::default();
    let labels: Vec<&ActivityLabel> = table.nodes.iter().collect();
    for a in &labels {
        if a.is_artificial() {
            continue;
        }
        for b in &labels {
            if b.is_artificial() || a == b || !table.follows(a, b) {
                continue;
            }
            'witness: for x in &labels {
                if !table.follows(a, x) || !table.independent(x, b) {
                    continue;
                }
                for y in &labels {
                    if table.follows(y, b) && !table.gt(y, x) && table.independent(a, y) {
                        set.pairs.insert(((*a).clone(), (*b).clone()));
                        set.witness
                            .insert(((*a).clone(), (*b).clone()), ((*x).clone(), (*y).clone()));
                        break 'witness;
                    }
                }
            }
        }
    }
    set
}

/// A DFG whose mendacious edges are marked invisible (Definition 6).
#[derive(Debug, Clone)]
pub struct InvisibleEdgeDfg {
    pub base: Dfg,
    pub invisible: BTreeSet<(ActivityLabel, ActivityLabel)>,
}

pub fn annotate_invisible_edges(dfg: &Dfg, m: &MendaciousSet) -> InvisibleEdgeDfg {
    let invisible = dfg
        .edge_count
        .keys()
        .filter(|pair| m.pairs.contains(pair))
        .cloned()
        .collect();
    InvisibleEdgeDfg {
        base: dfg.clone(),
        invisible,
    }
}

/// DOT rendering of a DFG; invisible edges are drawn dashed.
pub fn dfg_to_dot(dfg: &InvisibleEdgeDfg) -> String {
    let mut out = String::from("digraph dfg {\n  rankdir=LR;\n");
    let ids: BTreeMap<&ActivityLabel, usize> = dfg.base.nodes.iter().zip(0..).collect();
    for (label, id) in &ids {
        let _ = writeln!(out, "  n{id} [label=\"{}\"];", label);
    }
    for ((a, b), count) in &dfg.base.edge_count {
        let style = if dfg.invisible.contains(&(a.clone(), b.clone())) {
            ", style=dashed"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  n{} -> n{} [label=\"{count}\"{style}];",
            ids[a], ids[b]
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eventlog::add_artificial_endpoints;

    fn label(s: &str) -> ActivityLabel {
        ActivityLabel::new(s)
    }

    fn l1() -> EventLog {
        EventLog::from_label_seqs(&[
            vec!["A", "B", "C"],
            vec!["D", "E", "F"],
            vec!["A", "B", "E", "F"],
        ])
    }

    #[test]
    fn dfg_of_l1() {
        let dfg = build_dfg(&l1());
        let count = |a: &str, b: &str| dfg.edge_count.get(&(label(a), label(b))).copied();
        assert_eq!(count("A", "B"), Some(2));
        assert_eq!(count("B", "C"), Some(1));
        assert_eq!(count("D", "E"), Some(1));
        assert_eq!(count("E", "F"), Some(2));
        assert_eq!(count("B", "E"), Some(1));
        assert_eq!(dfg.edge_count.len(), 5);
        assert_eq!(dfg.start_activities.get(&label("A")), Some(&2));
        assert_eq!(dfg.start_activities.get(&label("D")), Some(&1));
        assert_eq!(dfg.end_activities.get(&label("C")), Some(&1));
        assert_eq!(dfg.end_activities.get(&label("F")), Some(&2));
    }

    #[test]
    fn dfg_empty_and_self_loop() {
        assert_eq!(build_dfg(&EventLog::default()), Dfg::default());
        let dfg = build_dfg(&EventLog::from_label_seqs(&[vec!["A", "A"]]));
        assert_eq!(dfg.edge_count.get(&(label("A"), label("A"))), Some(&1));
    }

    #[test]
    fn relations_on_l1() {
        let log = l1();
        let table = derive_relations(&build_dfg(&log), &log);
        assert!(table.follows(&label("B"), &label("E")));
        assert!(!table.follows(&label("E"), &label("B")));
        assert!(table.independent(&label("C"), &label("D")));
        assert_eq!(
            table.classify(&label("C"), &label("D")),
            PairRelation::Independent
        );
    }

    #[test]
    fn two_loop_gives_mutual_follows() {
        let log = EventLog::from_label_seqs(&[vec!["a", "b", "a"], vec!["b", "a", "b"]]);
        let table = RelationTable::from_log(&log);
        assert!(table.twoloop(&label("a"), &label("b")));
        assert!(table.follows(&label("a"), &label("b")));
        assert!(table.follows(&label("b"), &label("a")));
        assert!(!table.parallel(&label("a"), &label("b")));
        assert_eq!(
            table.classify(&label("a"), &label("b")),
            PairRelation::TwoLoop
        );
    }

    #[test]
    fn two_loop_needs_both_patterns() {
        // <a,b,a> alone plus <b,a> in another trace is not a two-loop
        let log = EventLog::from_label_seqs(&[vec!["a", "b", "a"]]);
        let table = RelationTable::from_log(&log);
        assert!(!table.twoloop(&label("a"), &label("b")));
        assert!(table.parallel(&label("a"), &label("b")));
    }

    #[test]
    fn mendacious_on_l1_star() {
        let set = mendacious_dependencies(&add_artificial_endpoints(&l1()));
        let expected: BTreeSet<_> = [(label("B"), label("E"))].into_iter().collect();
        assert_eq!(set.pairs, expected);
        let (x, y) = &set.witness[&(label("B"), label("E"))];
        assert_eq!((x, y), (&label("C"), &label("D")));
    }

    #[test]
    fn mendacious_table1_row1() {
        let log =
            EventLog::from_label_seqs(&[vec!["A", "B", "C"], vec!["D", "E", "F"], vec!["A", "F"]]);
        let set = mendacious_dependencies(&add_artificial_endpoints(&log));
        let expected: BTreeSet<_> = [(label("A"), label("F"))].into_iter().collect();
        assert_eq!(set.pairs, expected);
    }

    #[test]
    fn mendacious_needs_artificial_witness() {
        // Table 1 row 3: detection of (B, D) requires the artificial start of D.
        let log = EventLog::from_label_seqs(&[
            vec!["A", "B", "C"],
            vec!["D", "E", "F"],
            vec!["A", "B", "D", "E", "F"],
        ]);
        let set = mendacious_dependencies(&add_artificial_endpoints(&log));
        let expected: BTreeSet<_> = [(label("B"), label("D"))].into_iter().collect();
        assert_eq!(set.pairs, expected);
        let (x, y) = &set.witness[&(label("B"), label("D"))];
        assert_eq!(x, &label("C"));
        assert!(y.is_artificial());
        // without augmentation the dependency is invisible
        assert!(mendacious_dependencies(&log).pairs.is_empty());
    }

    #[test]
    fn no_mendacious_without_cross_branch_adjacency() {
        // complete log of X(->(A,B), ->(C,D)) without switches
        let log = EventLog::from_label_seqs(&[vec!["A", "B"], vec!["C", "D"]]);
        let set = mendacious_dependencies(&add_artificial_endpoints(&log));
        assert!(set.pairs.is_empty());
    }

    #[test]
    fn invisible_edges_are_subset_of_dfg() {
        let log = l1();
        let dfg = build_dfg(&log);
        let m = mendacious_dependencies(&add_artificial_endpoints(&log));
        let annotated = annotate_invisible_edges(&dfg, &m);
        let expected: BTreeSet<_> = [(label("B"), label("E"))].into_iter().collect();
        assert_eq!(annotated.invisible, expected);
        // pair absent from the DFG produces no invisible edge
        let mut phantom = MendaciousSet::default();
        phantom.pairs.insert((label("A"), label("F")));
        assert!(annotate_invisible_edges(&dfg, &phantom)
            .invisible
            .is_empty());
        // empty set
        assert!(annotate_invisible_edges(&dfg, &MendaciousSet::default())
            .invisible
            .is_empty());
    }

    #[test]
    fn dot_marks_invisible_dashed() {
        let log = l1();
        let dfg = build_dfg(&log);
        let m = mendacious_dependencies(&add_artificial_endpoints(&log));
        let dot = dfg_to_dot(&annotate_invisible_edges(&dfg, &m));
        assert!(dot.contains("style=dashed"));
    }
}
