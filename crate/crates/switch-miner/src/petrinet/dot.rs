//! DOT rendering of workflow nets: places as circles, visible transitions as
//! labelled boxes, silent transitions as filled boxes.

use std::fmt::Write as _;

use crate::petrinet::{TransitionKind, WorkflowNet};

pub fn export_dot(net: &WorkflowNet) -> String {
    let mut out = String::from("digraph net {\n  rankdir=LR;\n");
    for (i, name) in net.place_names.iter().enumerate() {
        let label = if i == net.source {
            "source"
        } else if i == net.sink {
            "sink"
        } else {
            name.as_str()
        };
        let _ = writeln!(out, "  p{i} [shape=circle, label=\"{label}\"];");
    }
    for (i, t) in net.transitions.iter().enumerate() {
        match &t.kind {
            TransitionKind::Visible(l) => {
                let _ = writeln!(out, "  t{i} [shape=box, label=\"{l}\"];");
            }
            silent => {
                let hint = match silent {
                    TransitionKind::Tau => String::new(),
                    TransitionKind::Bridge => String::new(),
                    TransitionKind::Switch(a, b) => format!("{a}\u{21D2}{b}"),
                    TransitionKind::Visible(_) => unreachable!(),
                };
                let _ = writeln!(
                    out,
                    "  t{i} [shape=box, style=filled, fillcolor=black, fontcolor=white, label=\"{hint}\"];"
                );
            }
        }
    }
    for t in 0..net.num_transitions() {
        for &p in net.transition_inputs(t) {
            let _ = writeln!(out, "  p{p} -> t{t};");
        }
        for &p in net.transition_outputs(t) {
            let _ = writeln!(out, "  t{t} -> p{p};");
        }
    }
    out.push_str("}\n");
    out
}
