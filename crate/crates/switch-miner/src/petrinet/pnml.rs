//! PNML read/write. Silent transitions carry no name text and a
//! `<toolspecific>` marker recording their kind; visible transitions carry
//! their label as name text.

use std::collections::HashMap;
use std::io::Write as _;

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::{Reader, Writer};

use crate::error::{Error, Result};
use crate::eventlog::ActivityLabel;
use crate::petrinet::{TransitionKind, WorkflowNet};

const TOOL_NAME: &str = "switch-miner";

pub fn export_pnml(net: &WorkflowNet) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut w = Writer::new_with_indent(&mut buf, b' ', 2);
    let write = |w: &mut Writer<&mut Vec<u8>>, ev: Event| w.write_event(ev).map_err(Error::Xml);

    write(
        &mut w,
        Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)),
    )?;
    let mut pnml = BytesStart::new("pnml");
    pnml.push_attribute(("xmlns", "http://www.pnml.org/version-2009/grammar/pnml"));
    write(&mut w, Event::Start(pnml))?;
    let mut net_el = BytesStart::new("net");
    net_el.push_attribute(("id", "net1"));
    net_el.push_attribute(("type", "http://www.pnml.org/version-2009/grammar/ptnet"));
    write(&mut w, Event::Start(net_el))?;
    let mut page = BytesStart::new("page");
    page.push_attribute(("id", "page1"));
    write(&mut w, Event::Start(page))?;

    for (i, name) in net.place_names.iter().enumerate() {
        let mut place = BytesStart::new("place");
        place.push_attribute(("id", format!("p{i}").as_str()));
        write(&mut w, Event::Start(place))?;
        write_name(&mut w, name)?;
        if i == net.source {
            write(&mut w, Event::Start(BytesStart::new("initialMarking")))?;
            write(&mut w, Event::Start(BytesStart::new("text")))?;
            write(&mut w, Event::Text(BytesText::new("1")))?;
            write(&mut w, Event::End(BytesEnd::new("text")))?;
            write(&mut w, Event::End(BytesEnd::new("initialMarking")))?;
        }
        write(&mut w, Event::End(BytesEnd::new("place")))?;
    }

    for (i, t) in net.transitions.iter().enumerate() {
        let mut el = BytesStart::new("transition");
        el.push_attribute(("id", format!("t{i}").as_str()));
        write(&mut w, Event::Start(el))?;
        match &t.kind {
            TransitionKind::Visible(label) => write_name(&mut w, &label.text)?,
            silent => {
                let mut tool = BytesStart::new("toolspecific");
                tool.push_attribute(("tool", TOOL_NAME));
                tool.push_attribute(("version", "1.0"));
                match silent {
                    TransitionKind::Tau => tool.push_attribute(("kind", "tau")),
                    TransitionKind::Bridge => tool.push_attribute(("kind", "bridge")),
                    TransitionKind::Switch(src, dst) => {
                        tool.push_attribute(("kind", "switch"));
                        tool.push_attribute(("source", src.text.as_str()));
                        tool.push_attribute(("destination", dst.text.as_str()));
                    }
                    TransitionKind::Visible(_) => unreachable!(),
                }
                write(&mut w, Event::Empty(tool))?;
            }
        }
        write(&mut w, Event::End(BytesEnd::new("transition")))?;
    }

    let mut arc_id = 0usize;
    for (t, places) in (0..net.num_transitions()).map(|t| (t, net.transition_inputs(t))) {
        for &p in places {
            write_arc(&mut w, arc_id, &format!("p{p}"), &format!("t{t}"))?;
            arc_id += 1;
        }
    }
    for (t, places) in (0..net.num_transitions()).map(|t| (t, net.transition_outputs(t))) {
        for &p in places {
            write_arc(&mut w, arc_id, &format!("t{t}"), &format!("p{p}"))?;
            arc_id += 1;
        }
    }

    write(&mut w, Event::End(BytesEnd::new("page")))?;
    write(&mut w, Event::End(BytesEnd::new("net")))?;
    write(&mut w, Event::End(BytesEnd::new("pnml")))?;
    let mut out = Vec::new();
    out.write_all(&buf)?;
    Ok(out)
}

fn write_name(w: &mut Writer<&mut Vec<u8>>, text: &str) -> Result<()> {
    w.write_event(Event::Start(BytesStart::new("name")))
        .map_err(Error::Xml)?;
    w.write_event(Event::Start(BytesStart::new("text")))
        .map_err(Error::Xml)?;
    w.write_event(Event::Text(BytesText::new(text)))
        .map_err(Error::Xml)?;
    w.write_event(Event::End(BytesEnd::new("text")))
        .map_err(Error::Xml)?;
    w.write_event(Event::End(BytesEnd::new("name")))
        .map_err(Error::Xml)?;
    Ok(())
}

fn write_arc(w: &mut Writer<&mut Vec<u8>>, id: usize, source: &str, target: &str) -> Result<()> {
    let mut arc = BytesStart::new("arc");
    arc.push_attribute(("id", format!("a{id}").as_str()));
    arc.push_attribute(("source", source));
    arc.push_attribute(("target", target));
    w.write_event(Event::Empty(arc)).map_err(Error::Xml)?;
    Ok(())
}

pub fn import_pnml(bytes: &[u8]) -> Result<WorkflowNet> {
    let input = std::str::from_utf8(bytes)
        .map_err(|_| Error::InvalidModel("pnml is not valid utf-8".into()))?;
    let mut reader = Reader::from_str(input);
    reader.trim_text(true);

    struct RawTransition {
        id: String,
        name: Option<String>,
        tool_kind: Option<(String, Option<String>, Option<String>)>,
    }
    let mut places: Vec<(String, String, bool)> = Vec::new(); // (id, name, initially marked)
    let mut transitions: Vec<RawTransition> = Vec::new();
    let mut arcs: Vec<(String, String)> = Vec::new();

    #[derive(PartialEq)]
    enum Ctx {
        None,
        Place,
        Transition,
        PlaceName,
        TransitionName,
        InitialMarking,
    }
    let mut ctx = Ctx::None;
    let mut in_text = false;

    loop {
        let ev = reader
            .read_event()
            .map_err(|e| Error::InvalidModel(format!("malformed pnml: {e}")))?;
        match ev {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let attrs = |e: &BytesStart| -> HashMap<String, String> {
                    e.attributes()
                        .flatten()
                        .map(|a| {
                            (
                                String::from_utf8_lossy(a.key.local_name().as_ref()).into_owned(),
                                a.unescape_value().unwrap_or_default().into_owned(),
                            )
                        })
                        .collect()
                };
                match e.local_name().as_ref() {
                    b"place" => {
                        let a = attrs(e);
                        let id = a
                            .get("id")
                            .cloned()
                            .ok_or_else(|| Error::InvalidModel("place without id".into()))?;
                        places.push((id.clone(), id, false));
                        ctx = Ctx::Place;
                    }
                    b"transition" => {
                        let a = attrs(e);
                        let id = a
                            .get("id")
                            .cloned()
                            .ok_or_else(|| Error::InvalidModel("transition without id".into()))?;
                        transitions.push(RawTransition {
                            id,
                            name: None,
                            tool_kind: None,
                        });
                        ctx = Ctx::Transition;
                    }
                    b"arc" => {
                        let a = attrs(e);
                        let source = a
                            .get("source")
                            .cloned()
                            .ok_or_else(|| Error::InvalidModel("arc without source".into()))?;
                        let target = a
                            .get("target")
                            .cloned()
                            .ok_or_else(|| Error::InvalidModel("arc without target".into()))?;
                        arcs.push((source, target));
                    }
                    b"name" => {
                        ctx = match ctx {
                            Ctx::Place => Ctx::PlaceName,
                            Ctx::Transition => Ctx::TransitionName,
                            other => other,
                        }
                    }
                    b"initialMarking" => {
                        if ctx == Ctx::Place {
                            ctx = Ctx::InitialMarking;
                        }
                    }
                    b"text" => in_text = true,
                    b"toolspecific" => {
                        if let (Ctx::Transition | Ctx::TransitionName, Some(t)) =
                            (&ctx, transitions.last_mut())
                        {
                            let a = attrs(e);
                            if let Some(kind) = a.get("kind") {
                                t.tool_kind = Some((
                                    kind.clone(),
                                    a.get("source").cloned(),
                                    a.get("destination").cloned(),
                                ));
                            }
                        }
                    }
                    _ => {}
                }
            }
            Event::Text(ref text) => {
                if in_text {
                    let value = text
                        .unescape()
                        .map_err(|e| Error::InvalidModel(e.to_string()))?
                        .into_owned();
                    match ctx {
                        Ctx::PlaceName => {
                            if let Some(p) = places.last_mut() {
                                p.1 = value;
                            }
                        }
                        Ctx::TransitionName => {
                            if let Some(t) = transitions.last_mut() {
                                t.name = Some(value);
                            }
                        }
                        Ctx::InitialMarking => {
                            if let Some(p) = places.last_mut() {
                                p.2 = value.trim().parse::<u32>().unwrap_or(0) >= 1;
                            }
                        }
                        _ => {}
                    }
                }
            }
            Event::End(ref e) => match e.local_name().as_ref() {
                b"place" | b"transition" => ctx = Ctx::None,
                b"name" => {
                    ctx = match ctx {
                        Ctx::PlaceName => Ctx::Place,
                        Ctx::TransitionName => Ctx::Transition,
                        other => other,
                    }
                }
                b"initialMarking" => ctx = Ctx::Place,
                b"text" => in_text = false,
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }

    if places.is_empty() {
        return Err(Error::InvalidModel("pnml contains no places".into()));
    }

    let mut net = WorkflowNet::new();
    // discard the implicit source/sink of the fresh net and rebuild
    net.place_names.clear();
    net.transitions.clear();
    net.place_out.clear();
    net.place_in.clear();
    net.trans_in.clear();
    net.trans_out.clear();

    let mut place_ids: HashMap<String, usize> = HashMap::new();
    let mut marked: Vec<usize> = Vec::new();
    for (id, name, initially_marked) in places {
        let idx = net.add_place(name);
        if initially_marked {
            marked.push(idx);
        }
        place_ids.insert(id, idx);
    }
    let mut transition_ids: HashMap<String, usize> = HashMap::new();
    for raw in transitions {
        let kind = match (&raw.tool_kind, &raw.name) {
            (Some((kind, src, dst)), _) => match kind.as_str() {
                "tau" => TransitionKind::Tau,
                "bridge" => TransitionKind::Bridge,
                "switch" => TransitionKind::Switch(
                    ActivityLabel::new(src.clone().unwrap_or_default()),
                    ActivityLabel::new(dst.clone().unwrap_or_default()),
                ),
                other => {
                    return Err(Error::InvalidModel(format!(
                        "unknown silent transition kind {other:?}"
                    )))
                }
            },
            (None, Some(name)) if !name.is_empty() => {
                TransitionKind::Visible(ActivityLabel::new(name.clone()))
            }
            (None, _) => TransitionKind::Tau,
        };
        let idx = net.add_transition(kind);
        transition_ids.insert(raw.id, idx);
    }
    for (source, target) in arcs {
        match (place_ids.get(&source), transition_ids.get(&target)) {
            (Some(&p), Some(&t)) => net.add_arc_pt(p, t),
            _ => match (transition_ids.get(&source), place_ids.get(&target)) {
                (Some(&t), Some(&p)) => net.add_arc_tp(t, p),
                _ => {
                    return Err(Error::InvalidModel(format!(
                        "arc references unknown nodes {source} -> {target}"
                    )))
                }
            },
        }
    }

    // identify source/sink: prefer the initial marking, fall back to structure
    let sources: Vec<usize> = (0..net.num_places())
        .filter(|&p| net.place_producers(p).is_empty())
        .collect();
    let sinks: Vec<usize> = (0..net.num_places())
        .filter(|&p| net.place_consumers(p).is_empty())
        .collect();
    net.source = match (marked.as_slice(), sources.as_slice()) {
        ([p], _) => *p,
        ([], [p]) => *p,
        _ => {
            return Err(Error::InvalidModel(
                "expected exactly one source place".into(),
            ))
        }
    };
    net.sink = match sinks.as_slice() {
        [p] => *p,
        _ => {
            return Err(Error::InvalidModel(
                "expected exactly one sink place".into(),
            ))
        }
    };
    Ok(net)
}
