//! Switch process trees: the standard operator tree extended with switch
//! leaves `a => B` that transfer control from one exclusive-choice branch to
//! another.

mod text;

pub use text::{parse_tree, render_tree};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::eventlog::ActivityLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Operator {
    Xor,
    Seq,
    Par,
    /// children[0] is the body, children[1..] are redo parts.
    Loop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SwitchProcessTree {
    Operator(Operator, Vec<SwitchProcessTree>),
    Activity(ActivityLabel),
    Tau,
    Switch {
        source: ActivityLabel,
        destinations: BTreeSet<ActivityLabel>,
    },
}

impl SwitchProcessTree {
    pub fn activity(text: &str) -> Self {
        SwitchProcessTree::Activity(ActivityLabel::new(text))
    }

    pub fn xor(children: Vec<SwitchProcessTree>) -> Self {
        SwitchProcessTree::Operator(Operator::Xor, children)
    }

    pub fn seq(children: Vec<SwitchProcessTree>) -> Self {
        SwitchProcessTree::Operator(Operator::Seq, children)
    }

    pub fn par(children: Vec<SwitchProcessTree>) -> Self {
        SwitchProcessTree::Operator(Operator::Par, children)
    }

    pub fn looped(children: Vec<SwitchProcessTree>) -> Self {
        SwitchProcessTree::Operator(Operator::Loop, children)
    }

    pub fn switch(source: &str, destinations: &[&str]) -> Self {
        SwitchProcessTree::Switch {
            source: ActivityLabel::new(source),
            destinations: destinations
                .iter()
                .map(|d| ActivityLabel::new(*d))
                .collect(),
        }
    }

    /// The activity a leaf stands for: the label of an activity leaf or the
    /// source of a switch leaf.
    pub fn leaf_activity(&self) -> Option<&ActivityLabel> {
        match self {
            SwitchProcessTree::Activity(l) => Some(l),
            SwitchProcessTree::Switch { source, .. } => Some(source),
            _ => None,
        }
    }

    /// All (source, destination) switch behaviours in the tree.
    pub fn switches(&self) -> Vec<(ActivityLabel, ActivityLabel)> {
        let mut out = Vec::new();
        self.visit(&mut |node| {
            if let SwitchProcessTree::Switch {
                source,
                destinations,
            } = node
            {
                for d in destinations {
                    out.push((source.clone(), d.clone()));
                }
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&SwitchProcessTree)) {
        f(self);
        if let SwitchProcessTree::Operator(_, children) = self {
            for c in children {
                c.visit(f);
            }
        }
    }
}

/// Preorder node id within a [`TreeIndex`].
pub type NodeId = usize;

/// Flattened view of a tree with parent pointers, for ancestor and path
/// queries over node references.
pub struct TreeIndex<'a> {
    nodes: Vec<&'a SwitchProcessTree>,
    parent: Vec<Option<NodeId>>,
}

impl<'a> TreeIndex<'a> {
    pub fn new(tree: &'a SwitchProcessTree) -> Self {
        let mut index = TreeIndex {
            nodes: Vec::new(),
            parent: Vec::new(),
        };
        index.push(tree, None);
        index
    }

    fn push(&mut self, node: &'a SwitchProcessTree, parent: Option<NodeId>) {
        let id = self.nodes.len();
        self.nodes.push(node);
        self.parent.push(parent);
        if let SwitchProcessTree::Operator(_, children) = node {
            for c in children {
                self.push(c, Some(id));
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &'a SwitchProcessTree {
        self.nodes[id]
    }

    pub fn operator(&self, id: NodeId) -> Option<Operator> {
        match self.nodes[id] {
            SwitchProcessTree::Operator(op, _) => Some(*op),
            _ => None,
        }
    }

    /// Nearest strict ancestor of `n` with the given operator kind.
    pub fn first_ancestor(&self, n: NodeId, kind: Operator) -> Result<Option<NodeId>> {
        if n >= self.nodes.len() {
            return Err(Error::Internal(format!("node id {n} out of range")));
        }
        let mut cur = self.parent[n];
        while let Some(id) = cur {
            if self.operator(id) == Some(kind) {
                return Ok(Some(id));
            }
            cur = self.parent[id];
        }
        Ok(None)
    }

    /// Intermediate nodes on the downward path from `n1` to `n2`, excluding
    /// both endpoints. Empty when `n2` is not a strict descendant of `n1`.
    pub fn path_between(&self, n1: NodeId, n2: NodeId) -> Vec<NodeId> {
        if n1 == n2 {
            return Vec::new();
        }
        let mut path = Vec::new();
        let mut cur = self.parent.get(n2).copied().flatten();
        while let Some(id) = cur {
            if id == n1 {
                path.reverse();
                return path;
            }
            path.push(id);
            cur = self.parent[id];
        }
        Vec::new()
    }

    pub fn ancestors(&self, n: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = self.parent[n];
        while let Some(id) = cur {
            out.push(id);
            cur = self.parent[id];
        }
        out
    }

    pub fn lowest_common_ancestor(&self, a: NodeId, b: NodeId) -> Option<NodeId> {
        let anc_a: Vec<NodeId> = {
            let mut v = self.ancestors(a);
            v.push(a);
            v
        };
        let set: BTreeSet<NodeId> = anc_a.into_iter().collect();
        let mut cur = Some(b);
        while let Some(id) = cur {
            if set.contains(&id) {
                return Some(id);
            }
            cur = self.parent[id];
        }
        None
    }

    /// Leaf ids keyed by the activity they stand for.
    pub fn activity_leaves(&self) -> Vec<(ActivityLabel, NodeId)> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(id, n)| n.leaf_activity().map(|l| (l.clone(), id)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationRule {
    /// The lowest common ancestor of the switch leaf and the destination leaf
    /// is not an exclusive choice, or the destination has no leaf at all.
    CrossBranch,
    /// The switch would move a token out of (or into) a parallel branch.
    Parallel,
}

#[derive(Debug, Clone)]
pub struct ConstraintViolation {
    pub switch_leaf: NodeId,
    pub source: ActivityLabel,
    pub destination: ActivityLabel,
    pub rule: ViolationRule,
    pub detail: String,
}

/// Checks both Definition-4 constraints for every switch destination.
pub fn validate_switches(tree: &SwitchProcessTree) -> Vec<ConstraintViolation> {
    let index = TreeIndex::new(tree);
    let leaves = index.activity_leaves();
    let leaf_of = |label: &ActivityLabel| -> Option<NodeId> {
        leaves.iter().find(|(l, _)| l == label).map(|(_, id)| *id)
    };

    let mut violations = Vec::new();
    for (id, node) in (0..index.len()).map(|id| (id, index.node(id))) {
        let SwitchProcessTree::Switch {
            source,
            destinations,
        } = node
        else {
            continue;
        };
        for dest in destinations {
            let Some(dest_id) = leaf_of(dest) else {
                violations.push(ConstraintViolation {
                    switch_leaf: id,
                    source: source.clone(),
                    destination: dest.clone(),
                    rule: ViolationRule::CrossBranch,
                    detail: format!("destination {dest} has no leaf in the tree"),
                });
                continue;
            };
            let lca = index
                .lowest_common_ancestor(id, dest_id)
                .expect("nodes share the root");
            match index.operator(lca) {
                Some(Operator::Par) => {
                    // the two leaves meet at a parallel operator: the switch
                    // would move the token from one parallel branch to another
                    violations.push(ConstraintViolation {
                        switch_leaf: id,
                        source: source.clone(),
                        destination: dest.clone(),
                        rule: ViolationRule::Parallel,
                        detail: format!(
                            "switching between {source} and {dest} crosses a parallel branch"
                        ),
                    });
                    continue;
                }
                Some(Operator::Xor) => {}
                _ => {
                    violations.push(ConstraintViolation {
                        switch_leaf: id,
                        source: source.clone(),
                        destination: dest.clone(),
                        rule: ViolationRule::CrossBranch,
                        detail: format!(
                            "{source} and {dest} are not on different branches of an exclusive choice"
                        ),
                    });
                    continue;
                }
            }
            // A parallel operator strictly between the crossing exclusive
            // choice and either leaf means the switch enters or leaves a
            // parallel branch. When no such operator exists, the nearest
            // parallel ancestors of both leaves coincide above the LCA.
            let par_between = index
                .path_between(lca, id)
                .into_iter()
                .chain(index.path_between(lca, dest_id))
                .any(|n| index.operator(n) == Some(Operator::Par));
            if par_between {
                violations.push(ConstraintViolation {
                    switch_leaf: id,
                    source: source.clone(),
                    destination: dest.clone(),
                    rule: ViolationRule::Parallel,
                    detail: format!(
                        "a parallel operator separates {source} or {dest} from the crossing exclusive choice"
                    ),
                });
            }
        }
    }
    violations
}

/// Deletes every violating destination; a switch leaf whose destination set
/// empties degrades to a plain activity leaf. Idempotent.
pub fn prune_invalid_switches(tree: &SwitchProcessTree) -> SwitchProcessTree {
    let violations = validate_switches(tree);
    if violations.is_empty() {
        return tree.clone();
    }
    let bad: BTreeSet<(ActivityLabel, ActivityLabel)> = violations
        .into_iter()
        .map(|v| (v.source, v.destination))
        .collect();
    fn rebuild(
        node: &SwitchProcessTree,
        bad: &BTreeSet<(ActivityLabel, ActivityLabel)>,
    ) -> SwitchProcessTree {
        match node {
            SwitchProcessTree::Operator(op, children) => {
                SwitchProcessTree::Operator(*op, children.iter().map(|c| rebuild(c, bad)).collect())
            }
            SwitchProcessTree::Switch {
                source,
                destinations,
            } => {
                let kept: BTreeSet<ActivityLabel> = destinations
                    .iter()
                    .filter(|d| !bad.contains(&(source.clone(), (*d).clone())))
                    .cloned()
                    .collect();
                if kept.is_empty() {
                    SwitchProcessTree::Activity(source.clone())
                } else {
                    SwitchProcessTree::Switch {
                        source: source.clone(),
                        destinations: kept,
                    }
                }
            }
            other => other.clone(),
        }
    }
    let pruned = rebuild(tree, &bad);
    debug_assert!(validate_switches(&pruned).is_empty());
    pruned
}

/// DOT rendering of a tree for documentation.
pub fn tree_to_dot(tree: &SwitchProcessTree) -> String {
    use std::fmt::Write as _;
    let index = TreeIndex::new(tree);
    let mut out = String::from("digraph tree {\n  node [shape=box];\n");
    for id in 0..index.len() {
        let label = match index.node(id) {
            SwitchProcessTree::Operator(Operator::Xor, _) => "X".to_string(),
            SwitchProcessTree::Operator(Operator::Seq, _) => "\u{2192}".to_string(),
            SwitchProcessTree::Operator(Operator::Par, _) => "\u{2227}".to_string(),
            SwitchProcessTree::Operator(Operator::Loop, _) => "loop".to_string(),
            SwitchProcessTree::Activity(l) => l.to_string(),
            SwitchProcessTree::Tau => "\u{03C4}".to_string(),
            SwitchProcessTree::Switch {
                source,
                destinations,
            } => {
                let dests: Vec<String> = destinations.iter().map(|d| d.to_string()).collect();
                format!("{source} \u{21D2} {{{}}}", dests.join(","))
            }
        };
        let _ = writeln!(out, "  n{id} [label=\"{label}\"];");
    }
    for id in 1..index.len() {
        if let Some(p) = index.parent[id] {
            let _ = writeln!(out, "  n{p} -> n{id};");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use SwitchProcessTree as T;

    fn fig1_tree() -> SwitchProcessTree {
        T::xor(vec![
            T::seq(vec![
                T::activity("A"),
                T::switch("B", &["E"]),
                T::activity("C"),
            ]),
            T::seq(vec![T::activity("D"), T::activity("E"), T::activity("F")]),
        ])
    }

    #[test]
    fn first_ancestor_basics() {
        let tree = fig1_tree();
        let index = TreeIndex::new(&tree);
        // node 2 is leaf A (0 root, 1 first seq)
        assert_eq!(index.first_ancestor(2, Operator::Xor).unwrap(), Some(0));
        assert_eq!(index.first_ancestor(2, Operator::Seq).unwrap(), Some(1));
        assert_eq!(index.first_ancestor(2, Operator::Par).unwrap(), None);
        assert!(index.first_ancestor(999, Operator::Par).is_err());
    }

    #[test]
    fn first_ancestor_nearest_skips_other_kinds() {
        let tree = T::par(vec![
            T::seq(vec![T::activity("a"), T::activity("b")]),
            T::activity("c"),
        ]);
        let index = TreeIndex::new(&tree);
        // leaf a is node 2
        assert_eq!(index.first_ancestor(2, Operator::Par).unwrap(), Some(0));
    }

    #[test]
    fn path_between_cases() {
        let tree = fig1_tree();
        let index = TreeIndex::new(&tree);
        assert!(index.path_between(0, 0).is_empty());
        // root -> direct child: no intermediates
        assert!(index.path_between(0, 1).is_empty());
        // root -> leaf A through the first sequence node
        assert_eq!(index.path_between(0, 2), vec![1]);
        // not a descendant
        assert!(index.path_between(2, 0).is_empty());
    }

    #[test]
    fn fig1_tree_is_valid() {
        assert!(validate_switches(&fig1_tree()).is_empty());
    }

    #[test]
    fn seq_lca_violates_cross_branch() {
        let tree = T::seq(vec![T::switch("A", &["B"]), T::activity("B")]);
        let violations = validate_switches(&tree);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].rule, ViolationRule::CrossBranch);
        assert_eq!(
            prune_invalid_switches(&tree),
            T::seq(vec![T::activity("A"), T::activity("B")])
        );
    }

    #[test]
    fn switching_out_of_parallel_branch_violates() {
        // A => {B} sits inside a parallel branch; B is on the other parallel branch.
        let tree = T::par(vec![
            T::xor(vec![T::switch("A", &["B"]), T::activity("C")]),
            T::activity("B"),
        ]);
        let violations = validate_switches(&tree);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].rule, ViolationRule::Parallel);
    }

    #[test]
    fn missing_destination_is_pruned() {
        let tree = T::xor(vec![T::switch("A", &["B", "Z"]), T::activity("B")]);
        let violations = validate_switches(&tree);
        assert_eq!(violations.len(), 1);
        let pruned = prune_invalid_switches(&tree);
        assert_eq!(
            pruned,
            T::xor(vec![T::switch("A", &["B"]), T::activity("B")])
        );
        // idempotent
        assert_eq!(prune_invalid_switches(&pruned), pruned);
    }

    #[test]
    fn prune_keeps_valid_tree_unchanged() {
        let tree = fig1_tree();
        assert_eq!(prune_invalid_switches(&tree), tree);
    }

    #[test]
    fn same_parallel_scope_is_allowed() {
        // both branches of the X live under the same parallel node
        let tree = T::par(vec![
            T::xor(vec![
                T::seq(vec![T::switch("A", &["C"]), T::activity("B")]),
                T::seq(vec![T::activity("C"), T::activity("D")]),
            ]),
            T::activity("E"),
        ]);
        assert!(validate_switches(&tree).is_empty());
    }
}
