//! Canonical textual grammar for switch process trees:
//! `X(...)`, `->(...)`, `/\(...)`, `loop(...)`, `tau`, bare labels, and
//! switch leaves `A=>{E,F}`. Labels containing special characters are
//! single-quoted.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::eventlog::ActivityLabel;
use crate::tree::{Operator, SwitchProcessTree};

fn label_needs_quoting(text: &str) -> bool {
    text.is_empty()
        || text == "tau"
        || text
            .chars()
            .any(|c| c.is_whitespace() || "(),{}=>'\\/".contains(c))
}

fn render_label(label: &ActivityLabel) -> String {
    let text = label.to_string();
    if label_needs_quoting(&text) {
        format!("'{}'", text.replace('\\', "\\\\").replace('\'', "\\'"))
    } else {
        text
    }
}

pub fn render_tree(tree: &SwitchProcessTree) -> String {
    match tree {
        SwitchProcessTree::Operator(op, children) => {
            let name = match op {
                Operator::Xor => "X",
                Operator::Seq => "->",
                Operator::Par => "/\\",
                Operator::Loop => "loop",
            };
            let inner: Vec<String> = children.iter().map(render_tree).collect();
            format!("{name}({})", inner.join(", "))
        }
        SwitchProcessTree::Activity(l) => render_label(l),
        SwitchProcessTree::Tau => "tau".to_string(),
        SwitchProcessTree::Switch {
            source,
            destinations,
        } => {
            let dests: Vec<String> = destinations.iter().map(render_label).collect();
            format!("{}=>{{{}}}", render_label(source), dests.join(","))
        }
    }
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: 1,
            message: format!("at byte {}: {}", self.pos, message.into()),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn eat(&mut self, expected: u8) -> Result<()> {
        if self.peek() == Some(expected) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {:?}", expected as char)))
        }
    }

    fn starts_with(&self, s: &str) -> bool {
        self.input[self.pos..].starts_with(s.as_bytes())
    }

    fn parse_label(&mut self) -> Result<ActivityLabel> {
        self.skip_ws();
        if self.peek() == Some(b'\'') {
            self.pos += 1;
            let mut text = String::new();
            loop {
                match self.peek() {
                    Some(b'\\') => {
                        self.pos += 1;
                        match self.peek() {
                            Some(c @ (b'\'' | b'\\')) => {
                                text.push(c as char);
                                self.pos += 1;
                            }
                            _ => return Err(self.error("bad escape in quoted label")),
                        }
                    }
                    Some(b'\'') => {
                        self.pos += 1;
                        return Ok(ActivityLabel::new(text));
                    }
                    Some(c) => {
                        // collect a full utf-8 scalar
                        let start = self.pos;
                        let len = utf8_len(c);
                        self.pos += len;
                        text.push_str(
                            std::str::from_utf8(&self.input[start..self.pos])
                                .map_err(|_| self.error("invalid utf-8"))?,
                        );
                    }
                    None => return Err(self.error("unterminated quoted label")),
                }
            }
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() || b"(),{}='\\/".contains(&c) || self.starts_with("=>") {
                break;
            }
            self.pos += utf8_len(c);
        }
        if self.pos == start {
            return Err(self.error("expected a label"));
        }
        let text = std::str::from_utf8(&self.input[start..self.pos])
            .map_err(|_| self.error("invalid utf-8"))?;
        Ok(ActivityLabel::new(text))
    }

    fn parse_children(&mut self) -> Result<Vec<SwitchProcessTree>> {
        self.eat(b'(')?;
        let mut children = Vec::new();
        loop {
            children.push(self.parse_tree()?);
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b')') => {
                    self.pos += 1;
                    return Ok(children);
                }
                _ => return Err(self.error("expected ',' or ')'")),
            }
        }
    }

    fn parse_tree(&mut self) -> Result<SwitchProcessTree> {
        self.skip_ws();
        for (name, op) in [("->", Operator::Seq), ("/\\", Operator::Par)] {
            if self.starts_with(name) {
                self.pos += name.len();
                self.skip_ws();
                return Ok(SwitchProcessTree::Operator(op, self.parse_children()?));
            }
        }
        for (name, op) in [("X", Operator::Xor), ("loop", Operator::Loop)] {
            if self.starts_with(name) {
                let after = self.pos + name.len();
                let mut probe = after;
                while probe < self.input.len() && self.input[probe].is_ascii_whitespace() {
                    probe += 1;
                }
                if self.input.get(probe) == Some(&b'(') {
                    self.pos = probe;
                    return Ok(SwitchProcessTree::Operator(op, self.parse_children()?));
                }
            }
        }
        if self.starts_with("tau") {
            let after = self.pos + 3;
            let next = self.input.get(after).copied();
            let terminates = next
                .map(|c| c.is_ascii_whitespace() || b"(),{}".contains(&c))
                .unwrap_or(true);
            if terminates {
                self.pos = after;
                return Ok(SwitchProcessTree::Tau);
            }
        }
        let label = self.parse_label()?;
        self.skip_ws();
        if self.starts_with("=>") {
            self.pos += 2;
            self.skip_ws();
            self.eat(b'{')?;
            let mut destinations = BTreeSet::new();
            loop {
                destinations.insert(self.parse_label()?);
                self.skip_ws();
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                    }
                    Some(b'}') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected ',' or '}'")),
                }
            }
            if destinations.contains(&label) {
                return Err(self.error("switch destinations must not contain the source"));
            }
            return Ok(SwitchProcessTree::Switch {
                source: label,
                destinations,
            });
        }
        Ok(SwitchProcessTree::Activity(label))
    }
}

fn utf8_len(first_byte: u8) -> usize {
    match first_byte {
        b if b < 0x80 => 1,
        b if b >= 0xF0 => 4,
        b if b >= 0xE0 => 3,
        _ => 2,
    }
}

pub fn parse_tree(input: &str) -> Result<SwitchProcessTree> {
    let mut parser = Parser {
        input: input.as_bytes(),
        pos: 0,
    };
    let tree = parser.parse_tree()?;
    parser.skip_ws();
    if parser.pos != parser.input.len() {
        return Err(parser.error("trailing input after tree"));
    }
    Ok(tree)
}
