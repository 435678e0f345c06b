use std::fmt::Write as _;

use crate::instances::{content_lines, Tournament, VertexSet};

use super::DiagError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Klsw,
    Dkls,
}

impl Construction {
    pub fn as_str(self) -> &'static str {
        match self {
            Construction::Klsw => "klsw",
            Construction::Dkls => "dkls",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    /// Requirement `e` reads the group of its guesser's least claims.
    Claim { s: usize, e: usize, group: Vec<usize> },
    /// Requirement `e` picks `u, w` with `T(u,w)`.
    Pick { s: usize, e: usize, u: usize, w: usize },
    /// Requirement `e` acquires its first (`which = 0`) or second witness.
    Witness { s: usize, e: usize, which: u8, x: usize, set: VertexSet },
    /// The witnesses of requirement `e` are cancelled.
    Cancel { s: usize, e: usize },
    Edge { s: usize, from: usize, to: usize, e: usize },
    /// A write refused because the pair was already declared.
    Collision { s: usize, from: usize, to: usize, e: usize },
    /// `T(x,s)` by default.
    Default { s: usize, x: usize },
}

impl Event {
    pub fn stage(&self) -> usize {
        match *self {
            Event::Claim { s, .. }
            | Event::Pick { s, .. }
            | Event::Witness { s, .. }
            | Event::Cancel { s, .. }
            | Event::Edge { s, .. }
            | Event::Collision { s, .. }
            | Event::Default { s, .. } => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub construction: Construction,
    pub horizon: usize,
    pub events: Vec<Event>,
}

fn list(v: impl IntoIterator<Item = usize>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn serialize_trace(t: &Trace) -> String {
    let mut out = format!("rmwb-trace v1\nconstruction {}\nhorizon {}\n", t.construction.as_str(), t.horizon);
    for ev in &t.events {
        let _ = match ev {
            Event::Claim { s, e, group } => writeln!(out, "CLAIM {s} {e} {{{}}}", list(group.iter().copied())),
            Event::Pick { s, e, u, w } => writeln!(out, "PICK {s} {e} {u} {w}"),
            Event::Witness { s, e, which, x, set } => {
                let tag = if *which == 0 { "first" } else { "second" };
                writeln!(out, "WITNESS {s} {e} {tag} {x} {{{}}}", list(set.iter().copied()))
            }
            Event::Cancel { s, e } => writeln!(out, "CANCEL {s} {e}"),
            Event::Edge { s, from, to, e } => writeln!(out, "EDGE {s} {from} {to} {e}"),
            Event::Collision { s, from, to, e } => writeln!(out, "COLLISION {s} {from} {to} {e}"),
            Event::Default { s, x } => writeln!(out, "DEFAULT {s} {x}"),
        };
    }
    out
}

fn err(line: usize, msg: impl Into<String>) -> DiagError {
    DiagError::Parse { line, msg: msg.into() }
}

fn num(line: usize, t: &str) -> Result<usize, DiagError> {
    t.parse().map_err(|_| err(line, format!("bad number '{t}'")))
}

fn braced(line: usize, t: &str) -> Result<Vec<usize>, DiagError> {
    let inner = t
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| err(line, format!("expected '{{…}}', found '{t}'")))?;
    inner.split(',').filter(|s| !s.is_empty()).map(|s| num(line, s.trim())).collect()
}

pub fn parse_trace(text: &str) -> Result<Trace, DiagError> {
    let lines = content_lines(text);
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, "rmwb-trace v1")) => {}
        Some((l, s)) => return Err(err(l, format!("expected header \"rmwb-trace v1\", found {s:?}"))),
        None => return Err(err(1, "empty input")),
    }
    let construction = match it.next() {
        Some((_, "construction klsw")) => Construction::Klsw,
        Some((_, "construction dkls")) => Construction::Dkls,
        Some((l, s)) => return Err(err(l, format!("bad construction line {s:?}"))),
        None => return Err(err(2, "missing construction line")),
    };
    let horizon = match it.next() {
        Some((l, s)) => num(l, s.strip_prefix("horizon ").ok_or_else(|| err(l, "expected 'horizon N'"))?)?,
        None => return Err(err(3, "missing horizon line")),
    };
    let mut events = Vec::new();
    for (l, s) in it {
        let t: Vec<&str> = s.split_whitespace().collect();
        let n = |i: usize| num(l, t[i]);
        let ev = match (t.first().copied(), t.len()) {
            (Some("CLAIM"), 4) => Event::Claim { s: n(1)?, e: n(2)?, group: braced(l, t[3])? },
            (Some("PICK"), 5) => Event::Pick { s: n(1)?, e: n(2)?, u: n(3)?, w: n(4)? },
            (Some("WITNESS"), 6) => Event::Witness {
                s: n(1)?,
                e: n(2)?,
                which: match t[3] {
                    "first" => 0,
                    "second" => 1,
                    w => return Err(err(l, format!("bad witness tag '{w}'"))),
                },
                x: n(4)?,
                set: braced(l, t[5])?.into_iter().collect(),
            },
            (Some("CANCEL"), 3) => Event::Cancel { s: n(1)?, e: n(2)? },
            (Some("EDGE"), 5) => Event::Edge { s: n(1)?, from: n(2)?, to: n(3)?, e: n(4)? },
            (Some("COLLISION"), 5) => Event::Collision { s: n(1)?, from: n(2)?, to: n(3)?, e: n(4)? },
            (Some("DEFAULT"), 3) => Event::Default { s: n(1)?, x: n(2)? },
            _ => return Err(err(l, format!("unrecognized event {s:?}"))),
        };
        events.push(ev);
    }
    Ok(Trace { construction, horizon, events })
}

/// Rebuilds the tournament from the EDGE and DEFAULT events. Every pair must
/// be decided exactly once, at the stage of its larger vertex.
pub fn replay(t: &Trace) -> Result<Tournament, DiagError> {
    let n = t.horizon;
    let mut dir: Vec<Vec<Option<bool>>> = (0..n).map(|s| vec![None; s]).collect();
    let bad = |m: String| Err(DiagError::TraceMismatch(m));
    for ev in &t.events {
        let (s, lo, hi, lower_wins) = match *ev {
            Event::Edge { s, from, to, .. } => (s, from.min(to), from.max(to), from < to),
            Event::Default { s, x } => (s, x, s, true),
            _ => continue,
        };
        if hi >= n || lo == hi {
            return bad(format!("edge {lo}-{hi} outside the horizon {n}"));
        }
        if hi != s {
            return bad(format!("edge {lo}-{hi} declared at stage {s}"));
        }
        if dir[hi][lo].replace(lower_wins).is_some() {
            return bad(format!("edge {lo}-{hi} declared twice"));
        }
    }
    for (hi, row) in dir.iter().enumerate() {
        if let Some(lo) = row.iter().position(Option::is_none) {
            return bad(format!("edge {lo}-{hi} never declared"));
        }
    }
    Ok(Tournament::from_fn(n, |i, j| dir[j][i] == Some(true)))
}

/// Every cancellation of requirement `i` at stage `s` must follow a witness
/// acquired at `s` by some requirement `e < i`.
pub fn check_priority(t: &Trace) -> Result<(), String> {
    let mut acquired: Option<(usize, usize)> = None;
    for ev in &t.events {
        match *ev {
            Event::Witness { s, e, .. } => {
                acquired = Some(match acquired {
                    Some((s0, e0)) if s0 == s => (s, e0.min(e)),
                    _ => (s, e),
                })
            }
            Event::Cancel { s, e } => match acquired {
                Some((s0, e0)) if s0 == s && e0 < e => {}
                _ => return Err(format!("requirement {e} cancelled at stage {s} without a higher-priority witness")),
            },
            _ => {}
        }
    }
    Ok(())
}
