//! Reader and writer for a documented subset of XES: `<log>`, `<trace>`,
//! `<event>` with string attributes. Extension registries and non-string
//! attributes are ignored on input and never produced on output.

use std::io::{Read, Write};

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, Event};
use quick_xml::{Reader, Writer};

use crate::error::{Error, Result};
use crate::eventlog::{ActivityLabel, EventLog, Trace};

/// How an event maps to an activity label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classifier {
    /// `concept:name` only.
    Name,
    /// `concept:name + "+" + lifecycle:transition` (name only when the
    /// lifecycle attribute is missing).
    NamePlusLifecycle,
}

#[derive(Debug)]
pub struct XesParseOutcome {
    pub log: EventLog,
    /// Events skipped because they carried no `concept:name`.
    pub skipped_events: usize,
}

fn line_of(input: &str, byte_pos: usize) -> usize {
    input
        .as_bytes()
        .iter()
        .take(byte_pos.min(input.len()))
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

pub fn parse_xes(mut stream: impl Read, classifier: Classifier) -> Result<XesParseOutcome> {
    let mut input = String::new();
    stream.read_to_string(&mut input)?;

    let mut reader = Reader::from_str(&input);
    reader.trim_text(true);

    let mut traces: Vec<Trace> = Vec::new();
    let mut skipped_events = 0usize;

    // Parser state: inside a trace / inside an event.
    let mut cur_trace: Option<(String, Vec<ActivityLabel>)> = None;
    let mut cur_event: Option<(Option<String>, Option<String>)> = None; // (name, lifecycle)
    let mut trace_count = 0usize;

    loop {
        let ev = reader
            .read_event()
            .map_err(|e| Error::parse(line_of(&input, reader.buffer_position()), e.to_string()))?;
        match ev {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(ev, Event::Empty(_));
                match e.local_name().as_ref() {
                    b"trace" => {
                        trace_count += 1;
                        cur_trace = Some((format!("case_{trace_count}"), Vec::new()));
                        if is_empty {
                            let (case_id, events) = cur_trace.take().unwrap();
                            traces.push(Trace::new(case_id, events));
                        }
                    }
                    b"event" => {
                        cur_event = Some((None, None));
                        if is_empty {
                            finish_event(
                                &mut cur_trace,
                                &mut cur_event,
                                classifier,
                                &mut skipped_events,
                            );
                        }
                    }
                    b"string" => {
                        let (mut key, mut value) = (None, None);
                        for attr in e.attributes().flatten() {
                            let v = attr.unescape_value().unwrap_or_default().into_owned();
                            match attr.key.local_name().as_ref() {
                                b"key" => key = Some(v),
                                b"value" => value = Some(v),
                                _ => {}
                            }
                        }
                        if let (Some(key), Some(value)) = (key, value) {
                            if let Some((name, lifecycle)) = cur_event.as_mut() {
                                match key.as_str() {
                                    "concept:name" => *name = Some(value),
                                    "lifecycle:transition" => *lifecycle = Some(value),
                                    _ => {}
                                }
                            } else if let Some((case_id, _)) = cur_trace.as_mut() {
                                if key == "concept:name" {
                                    *case_id = value;
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
            Event::End(ref e) => match e.local_name().as_ref() {
                b"event" => finish_event(
                    &mut cur_trace,
                    &mut cur_event,
                    classifier,
                    &mut skipped_events,
                ),
                b"trace" => {
                    if let Some((case_id, events)) = cur_trace.take() {
                        traces.push(Trace::new(case_id, events));
                    }
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }

    Ok(XesParseOutcome {
        log: EventLog::new(traces),
        skipped_events,
    })
}

fn finish_event(
    cur_trace: &mut Option<(String, Vec<ActivityLabel>)>,
    cur_event: &mut Option<(Option<String>, Option<String>)>,
    classifier: Classifier,
    skipped: &mut usize,
) {
    let Some((name, lifecycle)) = cur_event.take() else {
        return;
    };
    let Some((_, events)) = cur_trace.as_mut() else {
        return;
    };
    match name {
        Some(name) => {
            let text = match (classifier, lifecycle) {
                (Classifier::NamePlusLifecycle, Some(lc)) => format!("{name}+{lc}"),
                _ => name,
            };
            events.push(ActivityLabel::new(text));
        }
        None => *skipped += 1,
    }
}

/// Serializes a log back to the XES subset read by [`parse_xes`]. Artificial
/// labels must not appear in the log.
pub fn write_xes(log: &EventLog, out: impl Write) -> Result<()> {
    let mut writer = Writer::new_with_indent(out, b' ', 2);
    writer
        .write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
        .map_err(io_err)?;
    let mut log_el = BytesStart::new("log");
    log_el.push_attribute(("xes.version", "1.0"));
    writer.write_event(Event::Start(log_el)).map_err(io_err)?;
    for trace in &log.traces {
        writer
            .write_event(Event::Start(BytesStart::new("trace")))
            .map_err(io_err)?;
        write_string_attr(&mut writer, "concept:name", &trace.case_id)?;
        for event in &trace.events {
            writer
                .write_event(Event::Start(BytesStart::new("event")))
                .map_err(io_err)?;
            write_string_attr(&mut writer, "concept:name", &event.text)?;
            writer
                .write_event(Event::End(BytesEnd::new("event")))
                .map_err(io_err)?;
        }
        writer
            .write_event(Event::End(BytesEnd::new("trace")))
            .map_err(io_err)?;
    }
    writer
        .write_event(Event::End(BytesEnd::new("log")))
        .map_err(io_err)?;
    Ok(())
}

fn write_string_attr(writer: &mut Writer<impl Write>, key: &str, value: &str) -> Result<()> {
    let mut el = BytesStart::new("string");
    el.push_attribute(("key", key));
    el.push_attribute(("value", value));
    writer.write_event(Event::Empty(el)).map_err(io_err)?;
    Ok(())
}

fn io_err(e: quick_xml::Error) -> Error {
    Error::Xml(e)
}
