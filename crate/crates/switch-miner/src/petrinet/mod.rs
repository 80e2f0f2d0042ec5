//! Workflow nets: block-structured translation of switch process trees,
//! silent switch/bridge attachment, soundness checking, and bounded language
//! enumeration.

mod analysis;
mod dot;
mod pnml;

pub use analysis::{
    check_soundness, enumerate_language, shortest_visible_completion, Language, SoundnessReport,
};
pub use dot::export_dot;
pub use pnml::{export_pnml, import_pnml};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::eventlog::ActivityLabel;
use crate::tree::{validate_switches, Operator, SwitchProcessTree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransitionKind {
    Visible(ActivityLabel),
    /// Plain silent step from the block-structured translation.
    Tau,
    /// Silent step realizing a switch behaviour source -> destination.
    Switch(ActivityLabel, ActivityLabel),
    /// Silent step isolating an attachment point.
    Bridge,
}

impl TransitionKind {
    pub fn is_silent(&self) -> bool {
        !matches!(self, TransitionKind::Visible(_))
    }

    pub fn is_switch(&self) -> bool {
        matches!(self, TransitionKind::Switch(_, _))
    }

    pub fn label(&self) -> Option<&ActivityLabel> {
        match self {
            TransitionKind::Visible(l) => Some(l),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub kind: TransitionKind,
}

/// Petri net with one source and one sink place. Arcs are kept as adjacency
/// lists in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkflowNet {
    pub place_names: Vec<String>,
    pub transitions: Vec<Transition>,
    /// place -> consuming transitions
    place_out: Vec<Vec<usize>>,
    /// place -> producing transitions
    place_in: Vec<Vec<usize>>,
    /// transition -> input places
    trans_in: Vec<Vec<usize>>,
    /// transition -> output places
    trans_out: Vec<Vec<usize>>,
    pub source: usize,
    pub sink: usize,
}

/// Token count per place.
pub type Marking = Vec<u32>;

impl WorkflowNet {
    pub fn new() -> Self {
        let mut net = WorkflowNet {
            place_names: Vec::new(),
            transitions: Vec::new(),
            place_out: Vec::new(),
            place_in: Vec::new(),
            trans_in: Vec::new(),
            trans_out: Vec::new(),
            source: 0,
            sink: 0,
        };
        net.source = net.add_place("source");
        net.sink = net.add_place("sink");
        net
    }

    pub fn add_place(&mut self, name: impl Into<String>) -> usize {
        self.place_names.push(name.into());
        self.place_out.push(Vec::new());
        self.place_in.push(Vec::new());
        self.place_names.len() - 1
    }

    pub fn add_transition(&mut self, kind: TransitionKind) -> usize {
        self.transitions.push(Transition { kind });
        self.trans_in.push(Vec::new());
        self.trans_out.push(Vec::new());
        self.transitions.len() - 1
    }

    pub fn add_arc_pt(&mut self, place: usize, transition: usize) {
        self.place_out[place].push(transition);
        self.trans_in[transition].push(place);
    }

    pub fn add_arc_tp(&mut self, transition: usize, place: usize) {
        self.trans_out[transition].push(place);
        self.place_in[place].push(transition);
    }

    pub fn remove_arc_pt(&mut self, place: usize, transition: usize) {
        self.place_out[place].retain(|&t| t != transition);
        self.trans_in[transition].retain(|&p| p != place);
    }

    pub fn remove_arc_tp(&mut self, transition: usize, place: usize) {
        self.trans_out[transition].retain(|&p| p != place);
        self.place_in[place].retain(|&t| t != transition);
    }

    pub fn transition_inputs(&self, t: usize) -> &[usize] {
        &self.trans_in[t]
    }

    pub fn transition_outputs(&self, t: usize) -> &[usize] {
        &self.trans_out[t]
    }

    pub fn place_consumers(&self, p: usize) -> &[usize] {
        &self.place_out[p]
    }

    pub fn place_producers(&self, p: usize) -> &[usize] {
        &self.place_in[p]
    }

    pub fn num_places(&self) -> usize {
        self.place_names.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.trans_in.iter().map(Vec::len).sum::<usize>()
            + self.trans_out.iter().map(Vec::len).sum::<usize>()
    }

    pub fn initial_marking(&self) -> Marking {
        let mut m = vec![0; self.num_places()];
        m[self.source] = 1;
        m
    }

    pub fn final_marking(&self) -> Marking {
        let mut m = vec![0; self.num_places()];
        m[self.sink] = 1;
        m
    }

    pub fn enabled(&self, marking: &Marking, t: usize) -> bool {
        self.trans_in[t].iter().all(|&p| marking[p] >= 1) && !self.trans_in[t].is_empty()
    }

    pub fn fire(&self, marking: &Marking, t: usize) -> Marking {
        let mut m = marking.clone();
        for &p in &self.trans_in[t] {
            m[p] -= 1;
        }
        for &p in &self.trans_out[t] {
            m[p] += 1;
        }
        m
    }

    /// Index of the unique visible transition carrying the label, if any.
    pub fn find_visible(&self, label: &ActivityLabel) -> Option<usize> {
        self.transitions
            .iter()
            .position(|t| t.kind.label() == Some(label))
    }

    /// Set of visible labels.
    pub fn visible_labels(&self) -> BTreeSet<ActivityLabel> {
        self.transitions
            .iter()
            .filter_map(|t| t.kind.label().cloned())
            .collect()
    }
}

impl Default for WorkflowNet {
    fn default() -> Self {
        WorkflowNet::new()
    }
}

/// Translates a switch process tree into a workflow net: the standard
/// block-structured translation with switch leaves treated as their source
/// activity, followed by silent switch attachment.
pub fn translate(tree: &SwitchProcessTree) -> Result<WorkflowNet> {
    let violations = validate_switches(tree);
    if let Some(v) = violations.first() {
        return Err(Error::InvalidTree(format!(
            "switch {} => {} violates {:?}: {}",
            v.source, v.destination, v.rule, v.detail
        )));
    }
    let mut net = WorkflowNet::new();
    let (source, sink) = (net.source, net.sink);
    build_block(&mut net, tree, source, sink);
    let switches = tree.switches();
    attach_switches(&mut net, &switches);
    Ok(net)
}

fn build_block(net: &mut WorkflowNet, node: &SwitchProcessTree, entry: usize, exit: usize) {
    match node {
        SwitchProcessTree::Activity(label) | SwitchProcessTree::Switch { source: label, .. } => {
            let t = net.add_transition(TransitionKind::Visible(label.clone()));
            net.add_arc_pt(entry, t);
            net.add_arc_tp(t, exit);
        }
        SwitchProcessTree::Tau => {
            let t = net.add_transition(TransitionKind::Tau);
            net.add_arc_pt(entry, t);
            net.add_arc_tp(t, exit);
        }
        SwitchProcessTree::Operator(Operator::Xor, children) => {
            for c in children {
                build_block(net, c, entry, exit);
            }
        }
        SwitchProcessTree::Operator(Operator::Seq, children) => {
            let mut cur = entry;
            for (i, c) in children.iter().enumerate() {
                let next = if i + 1 == children.len() {
                    exit
                } else {
                    net.add_place(format!("seq_{}", net.num_places()))
                };
                build_block(net, c, cur, next);
                cur = next;
            }
        }
        SwitchProcessTree::Operator(Operator::Par, children) => {
            let fork = net.add_transition(TransitionKind::Tau);
            let join = net.add_transition(TransitionKind::Tau);
            net.add_arc_pt(entry, fork);
            net.add_arc_tp(join, exit);
            for c in children {
                let child_entry = net.add_place(format!("par_in_{}", net.num_places()));
                let child_exit = net.add_place(format!("par_out_{}", net.num_places()));
                net.add_arc_tp(fork, child_entry);
                net.add_arc_pt(child_exit, join);
                build_block(net, c, child_entry, child_exit);
            }
        }
        SwitchProcessTree::Operator(Operator::Loop, children) => {
            // body from entry to mid; redo parts from mid back to entry;
            // a silent exit from mid to exit
            let mid = net.add_place(format!("loop_{}", net.num_places()));
            if let Some((body, redos)) = children.split_first() {
                build_block(net, body, entry, mid);
                for r in redos {
                    build_block(net, r, mid, entry);
                }
            }
            let t_exit = net.add_transition(TransitionKind::Tau);
            net.add_arc_pt(mid, t_exit);
            net.add_arc_tp(t_exit, exit);
        }
    }
}

/// Connects each switch behaviour with a silent transition, inserting bridge
/// transitions where the attachment place is shared (Definition 5 cases 1-6).
/// Switches whose source or destination transition is missing are skipped;
/// the returned list names the skipped pairs.
pub fn attach_switches(
    net: &mut WorkflowNet,
    switches: &[(ActivityLabel, ActivityLabel)],
) -> Vec<(ActivityLabel, ActivityLabel)> {
    let mut ordered: Vec<_> = switches.to_vec();
    ordered.sort();
    ordered.dedup();
    let mut skipped = Vec::new();
    for (src, dst) in ordered {
        let (Some(t_src), Some(t_dst)) = (net.find_visible(&src), net.find_visible(&dst)) else {
            skipped.push((src, dst));
            continue;
        };
        // cases 5/6: isolate an AND-split source or AND-join destination so
        // the switch attaches to a single place
        if net.trans_out[t_src].len() > 1 {
            let bridge = net.add_transition(TransitionKind::Bridge);
            let p_new = net.add_place(format!("split_{}", net.num_places()));
            for p in net.trans_out[t_src].clone() {
                net.remove_arc_tp(t_src, p);
                net.add_arc_tp(bridge, p);
            }
            net.add_arc_tp(t_src, p_new);
            net.add_arc_pt(p_new, bridge);
        }
        if net.trans_in[t_dst].len() > 1 {
            let bridge = net.add_transition(TransitionKind::Bridge);
            let p_new = net.add_place(format!("join_{}", net.num_places()));
            for p in net.trans_in[t_dst].clone() {
                net.remove_arc_pt(p, t_dst);
                net.add_arc_pt(p, bridge);
            }
            net.add_arc_pt(p_new, t_dst);
            net.add_arc_tp(bridge, p_new);
        }

        let p_out = net.trans_out[t_src][0];
        let p_in = net.trans_in[t_dst][0];
        let t_switch = net.add_transition(TransitionKind::Switch(src.clone(), dst.clone()));

        // source side: cases 1/3, keyed on non-switch producers of p_out
        let producers = net.place_in[p_out]
            .iter()
            .filter(|&&t| !net.transitions[t].kind.is_switch())
            .count();
        if producers <= 1 {
            net.add_arc_pt(p_out, t_switch);
        } else {
            let p_bridge = net.add_place(format!("bridge_{}", net.num_places()));
            let t_bridge = net.add_transition(TransitionKind::Bridge);
            net.remove_arc_tp(t_src, p_out);
            net.add_arc_tp(t_src, p_bridge);
            net.add_arc_pt(p_bridge, t_bridge);
            net.add_arc_tp(t_bridge, p_out);
            net.add_arc_pt(p_bridge, t_switch);
        }

        // destination side: cases 2/4, keyed on non-switch consumers of p_in
        let consumers = net.place_out[p_in]
            .iter()
            .filter(|&&t| !net.transitions[t].kind.is_switch())
            .count();
        if consumers <= 1 {
            net.add_arc_tp(t_switch, p_in);
        } else {
            let p_bridge = net.add_place(format!("bridge_{}", net.num_places()));
            let t_bridge = net.add_transition(TransitionKind::Bridge);
            net.remove_arc_pt(p_in, t_dst);
            net.add_arc_pt(p_bridge, t_dst);
            net.add_arc_tp(t_bridge, p_bridge);
            net.add_arc_pt(p_in, t_bridge);
            net.add_arc_tp(t_switch, p_bridge);
        }
    }
    skipped
}
