//! Event logs: traces of activity labels, with the artificial start/end
//! augmentation used by the switch exclusive choice cut.

mod csvlog;
mod xes;

pub use csvlog::{parse_csv, CsvColumns};
pub use xes::{parse_xes, write_xes, Classifier, XesParseOutcome};

use std::collections::BTreeSet;
use std::fmt;

/// Distinguishes real activities from the artificial endpoint labels added
/// before mendacious-dependency detection. Keeping the kind out of the text
/// makes collision with user data impossible.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelKind {
    Real,
    /// Unique start label for traces beginning with the wrapped activity.
    ArtificialStart,
    /// Unique end label for traces finishing with the wrapped activity.
    ArtificialEnd,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActivityLabel {
    pub kind: LabelKind,
    pub text: String,
}

impl ActivityLabel {
    pub fn new(text: impl Into<String>) -> Self {
        ActivityLabel {
            kind: LabelKind::Real,
            text: text.into(),
        }
    }

    pub fn artificial_start(of: &ActivityLabel) -> Self {
        ActivityLabel {
            kind: LabelKind::ArtificialStart,
            text: of.text.clone(),
        }
    }

    pub fn artificial_end(of: &ActivityLabel) -> Self {
        ActivityLabel {
            kind: LabelKind::ArtificialEnd,
            text: of.text.clone(),
        }
    }

    pub fn is_artificial(&self) -> bool {
        self.kind != LabelKind::Real
    }
}

impl fmt::Display for ActivityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LabelKind::Real => write!(f, "{}", self.text),
            LabelKind::ArtificialStart => write!(f, "\u{25B8}start:{}", self.text),
            LabelKind::ArtificialEnd => write!(f, "\u{25B8}end:{}", self.text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub case_id: String,
    pub events: Vec<ActivityLabel>,
}

impl Trace {
    pub fn new(case_id: impl Into<String>, events: Vec<ActivityLabel>) -> Self {
        Trace {
            case_id: case_id.into(),
            events,
        }
    }
}

/// Multiset of traces; duplicates are preserved with multiplicity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventLog {
    pub traces: Vec<Trace>,
}

impl EventLog {
    pub fn new(traces: Vec<Trace>) -> Self {
        EventLog { traces }
    }

    /// Convenience constructor from bare label texts.
    pub fn from_label_seqs<S: AsRef<str>>(seqs: &[Vec<S>]) -> Self {
        let traces = seqs
            .iter()
            .enumerate()
            .map(|(i, seq)| {
                Trace::new(
                    format!("case_{i}"),
                    seq.iter().map(|s| ActivityLabel::new(s.as_ref())).collect(),
                )
            })
            .collect();
        EventLog { traces }
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn total_events(&self) -> usize {
        self.traces.iter().map(|t| t.events.len()).sum()
    }

    /// Union of labels occurring in any trace.
    pub fn alphabet(&self) -> BTreeSet<ActivityLabel> {
        self.traces
            .iter()
            .flat_map(|t| t.events.iter().cloned())
            .collect()
    }
}

/// Wraps every non-empty trace `<a, ..., z>` as `<Start_a, a, ..., z, End_z>`.
/// Empty traces are left unchanged.
pub fn add_artificial_endpoints(log: &EventLog) -> EventLog {
    let traces = log
        .traces
        .iter()
        .map(|t| {
            debug_assert!(t.events.iter().all(|e| !e.is_artificial()));
            if t.events.is_empty() {
                return t.clone();
            }
            let mut events = Vec::with_capacity(t.events.len() + 2);
            events.push(ActivityLabel::artificial_start(&t.events[0]));
            events.extend(t.events.iter().cloned());
            events.push(ActivityLabel::artificial_end(t.events.last().unwrap()));
            Trace::new(t.case_id.clone(), events)
        })
        .collect();
    EventLog { traces }
}

/// Removes all artificial labels; inverse of [`add_artificial_endpoints`] on
/// artificial-free logs.
pub fn strip_artificial(log: &EventLog) -> EventLog {
    let traces = log
        .traces
        .iter()
        .map(|t| {
            Trace::new(
                t.case_id.clone(),
                t.events
                    .iter()
                    .filter(|e| !e.is_artificial())
                    .cloned()
                    .collect(),
            )
        })
        .collect();
    EventLog { traces }
}

/// Number of distinct non-artificial labels across the given logs.
pub fn count_distinct_activities<'a>(logs: impl IntoIterator<Item = &'a EventLog>) -> usize {
    let mut seen: BTreeSet<ActivityLabel> = BTreeSet::new();
    for log in logs {
        for trace in &log.traces {
            for e in &trace.events {
                if !e.is_artificial() {
                    seen.insert(e.clone());
                }
            }
        }
    }
    seen.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l1() -> EventLog {
        EventLog::from_label_seqs(&[
            vec!["A", "B", "C"],
            vec!["D", "E", "F"],
            vec!["A", "B", "E", "F"],
        ])
    }

    #[test]
    fn augment_l1() {
        let augmented = add_artificial_endpoints(&l1());
        let expect = |first: &str, mid: &[&str], last: &str| {
            let mut v = vec![ActivityLabel::artificial_start(&ActivityLabel::new(first))];
            v.extend(mid.iter().map(|s| ActivityLabel::new(*s)));
            v.push(ActivityLabel::artificial_end(&ActivityLabel::new(last)));
            v
        };
        assert_eq!(
            augmented.traces[0].events,
            expect("A", &["A", "B", "C"], "C")
        );
        assert_eq!(
            augmented.traces[1].events,
            expect("D", &["D", "E", "F"], "F")
        );
        assert_eq!(
            augmented.traces[2].events,
            expect("A", &["A", "B", "E", "F"], "F")
        );
    }

    #[test]
    fn augment_single_event_trace() {
        let log = EventLog::from_label_seqs(&[vec!["A"]]);
        let augmented = add_artificial_endpoints(&log);
        assert_eq!(augmented.traces[0].events.len(), 3);
        assert!(augmented.traces[0].events[0].is_artificial());
        assert!(augmented.traces[0].events[2].is_artificial());
        assert_eq!(strip_artificial(&augmented), log);
    }

    #[test]
    fn augment_empty_log_and_empty_trace() {
        assert!(add_artificial_endpoints(&EventLog::default()).is_empty());
        let log = EventLog::from_label_seqs(&[Vec::<&str>::new()]);
        assert_eq!(add_artificial_endpoints(&log), log);
    }

    #[test]
    fn strip_is_inverse_of_augment() {
        let log = l1();
        assert_eq!(strip_artificial(&add_artificial_endpoints(&log)), log);
        // identity on artificial-free logs
        assert_eq!(strip_artificial(&log), log);
    }

    #[test]
    fn count_activities_excludes_artificial() {
        let log = l1();
        assert_eq!(count_distinct_activities([&log]), 6);
        assert_eq!(
            count_distinct_activities([&add_artificial_endpoints(&log)]),
            6
        );
        let a = EventLog::from_label_seqs(&[vec!["A", "B", "C"]]);
        let b = EventLog::from_label_seqs(&[vec!["D", "E", "F"]]);
        assert_eq!(count_distinct_activities([&a, &b]), 6);
        assert_eq!(count_distinct_activities([&EventLog::default()]), 0);
    }

    #[test]
    fn augment_alphabet_growth() {
        let log = l1();
        let before = log.alphabet().len();
        let after = add_artificial_endpoints(&log).alphabet().len();
        // distinct firsts {A, D}, distinct lasts {C, F}
        assert_eq!(after, before + 4);
    }
}
