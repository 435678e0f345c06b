use crate::instances::{content_lines, parse_instance, serialize_instance, Instance, InstanceError, VertexSet};
use crate::solvers::{Endpoint, IntervalSpec};

use super::ground::{
    Clause, FunctionalEntry, FunctionalTable, GroundColoringCondition, GroundCondition, GroundKind,
    GroundPosetCondition,
};
use super::requirement::parse_braced;
use super::ForcingError;

fn err(line: usize, msg: impl Into<String>) -> ForcingError {
    ForcingError::Parse { line, msg: msg.into() }
}

fn header<'a>(
    it: &mut impl Iterator<Item = (usize, &'a str)>,
    magic: &str,
) -> Result<(), ForcingError> {
    match it.next() {
        Some((_, l)) if l == magic => Ok(()),
        Some((l, s)) => Err(err(l, format!("expected header {magic:?}, found {s:?}"))),
        None => Err(err(1, "empty input")),
    }
}

fn parse_kind(line: usize, s: &str) -> Result<GroundKind, ForcingError> {
    match s.strip_prefix("kind ").map(str::trim) {
        Some("poset") => Ok(GroundKind::Poset),
        Some("coloring") => Ok(GroundKind::Coloring),
        _ => Err(err(line, format!("expected 'kind poset' or 'kind coloring', found {s:?}"))),
    }
}

fn parse_num(line: usize, t: &str) -> Result<usize, ForcingError> {
    t.parse().map_err(|_| err(line, format!("bad number '{t}'")))
}

/// `rmwb-fun v1`, `kind poset|coloring`, then `fire x 1 [: clause ; clause …]`
/// with clauses `edge i j v` or `color i j v`.
pub fn parse_functional(text: &str) -> Result<FunctionalTable, ForcingError> {
    let lines = content_lines(text);
    let mut it = lines.into_iter().filter(|(_, s)| !s.trim().is_empty());
    header(&mut it, "rmwb-fun v1")?;
    let (l, s) = it.next().ok_or_else(|| err(2, "missing kind line"))?;
    let kind = parse_kind(l, s)?;
    let tag = match kind {
        GroundKind::Poset => "edge",
        GroundKind::Coloring => "color",
    };
    let mut entries = Vec::new();
    for (l, s) in it {
        let (head, body) = s.split_once(':').unwrap_or((s, ""));
        let toks: Vec<&str> = head.split_whitespace().collect();
        let ["fire", x, out] = toks[..] else {
            return Err(err(l, "expected 'fire x 1 : clauses'"));
        };
        let x = parse_num(l, x)?;
        match out {
            "1" => {}
            "0" => return Err(ForcingError::NonMonotone(l)),
            _ => return Err(err(l, format!("bad output '{out}'"))),
        }
        let mut clauses = Vec::new();
        for c in body.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let toks: Vec<&str> = c.split_whitespace().collect();
            let [t, i, j, v] = toks[..] else {
                return Err(err(l, format!("bad clause {c:?}")));
            };
            if t != tag {
                return Err(err(l, format!("{t} clause in a {} table", kind.as_str())));
            }
            let (i, j) = (parse_num(l, i)?, parse_num(l, j)?);
            if i == j {
                return Err(err(l, format!("clause on the diagonal pair ({i},{i})")));
            }
            let v = match v {
                "0" => 0,
                "1" => 1,
                _ => return Err(err(l, format!("bad clause value '{v}'"))),
            };
            clauses.push(Clause { i, j, v });
        }
        entries.push(FunctionalEntry { x, clauses });
    }
    Ok(FunctionalTable { kind, entries })
}

pub fn serialize_functional(phi: &FunctionalTable) -> String {
    let tag = match phi.kind {
        GroundKind::Poset => "edge",
        GroundKind::Coloring => "color",
    };
    let mut out = format!("rmwb-fun v1\nkind {}\n", phi.kind.as_str());
    for e in &phi.entries {
        out.push_str(&format!("fire {} 1", e.x));
        if !e.clauses.is_empty() {
            let cs: Vec<String> = e.clauses.iter().map(|c| format!("{tag} {} {} {}", c.i, c.j, c.v)).collect();
            out.push_str(&format!(" : {}", cs.join(" ; ")));
        }
        out.push('\n');
    }
    out
}

fn join(s: &VertexSet) -> String {
    s.iter().map(|v| format!(" {v}")).collect()
}

/// `rmwb-gc v1`, `kind …`, `astar …`, `bstar …`, then the embedded instance
/// (omitted for the empty domain).
pub fn parse_ground(text: &str) -> Result<GroundCondition, ForcingError> {
    let raw: Vec<&str> = text.strip_suffix('\n').unwrap_or(text).split('\n').collect();
    let split = raw.iter().position(|l| *l == "rmwb v1").unwrap_or(raw.len());
    let head = raw[..split].join("\n");
    let lines = content_lines(&head);
    let mut it = lines.into_iter();
    header(&mut it, "rmwb-gc v1")?;
    let (l, s) = it.next().ok_or_else(|| err(2, "missing kind line"))?;
    let kind = parse_kind(l, s)?;
    let (mut astar, mut bstar) = (VertexSet::new(), VertexSet::new());
    for (l, s) in it {
        let (tag, rest) = s.split_once(' ').unwrap_or((s, ""));
        let target = match tag {
            "astar" => &mut astar,
            "bstar" => &mut bstar,
            _ => return Err(err(l, format!("expected astar/bstar or an instance, found {s:?}"))),
        };
        for t in rest.split_whitespace() {
            target.insert(parse_num(l, t)?);
        }
    }
    let mut cond = GroundCondition::empty(kind);
    if split < raw.len() {
        let inst = parse_instance(&raw[split..].join("\n")).map_err(|e| match e {
            InstanceError::Parse { line, msg } => err(line + split, msg),
            e => e.into(),
        })?;
        cond = match (kind, inst) {
            (GroundKind::Poset, Instance::Poset(f)) => {
                GroundCondition::Poset(GroundPosetCondition { f, astar, bstar })
            }
            (GroundKind::Coloring, Instance::Coloring(c)) => {
                GroundCondition::Coloring(GroundColoringCondition { c, astar, bstar })
            }
            (_, inst) => return Err(err(split + 2, format!("embedded {} in a {} condition", inst.kind(), kind.as_str()))),
        };
    } else if !astar.is_empty() || !bstar.is_empty() {
        return Err(err(raw.len(), "A*/B* given for an empty domain"));
    }
    cond.validate()?;
    Ok(cond)
}

pub fn serialize_ground(cond: &GroundCondition) -> String {
    let mut out = format!(
        "rmwb-gc v1\nkind {}\nastar{}\nbstar{}\n",
        cond.kind().as_str(),
        join(cond.astar()),
        join(cond.bstar())
    );
    match cond {
        _ if cond.domain() == 0 => {}
        GroundCondition::Poset(p) => out.push_str(&serialize_instance(&Instance::Poset(p.f.clone()))),
        GroundCondition::Coloring(c) => out.push_str(&serialize_instance(&Instance::Coloring(c.c.clone()))),
    }
    out
}

/// An EM condition as stored on disk; the ambient tournament is a path
/// resolved by the caller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmConditionFile {
    pub ambient: String,
    pub f: VertexSet,
    pub interval: IntervalSpec,
    pub levels: Vec<Vec<VertexSet>>,
}

fn parse_endpoint(line: usize, s: &str) -> Result<Endpoint, ForcingError> {
    Endpoint::parse(s.trim()).ok_or_else(|| err(line, format!("bad endpoint '{}'", s.trim())))
}

/// `rmwb-emc v1`, `ambient <path>`, `F {…}`, `I (lo, hi)`, then `level k: {…} …`.
pub fn parse_em_condition(text: &str) -> Result<EmConditionFile, ForcingError> {
    let lines = content_lines(text);
    let mut it = lines.into_iter();
    header(&mut it, "rmwb-emc v1")?;
    let mut next = |what: &str, n: usize| it.next().ok_or_else(|| err(n, format!("missing {what} line")));
    let (l, s) = next("ambient", 2)?;
    let ambient = s
        .strip_prefix("ambient ")
        .map(|r| r.trim().to_string())
        .filter(|r| !r.is_empty())
        .ok_or_else(|| err(l, "expected 'ambient <path>'"))?;
    let (l, s) = next("F", 3)?;
    let body = s.strip_prefix("F ").ok_or_else(|| err(l, "expected 'F {…}'"))?;
    let (f, rest) = parse_braced(l, body)?;
    if !rest.trim().is_empty() {
        return Err(err(l, "trailing text after F"));
    }
    let (l, s) = next("I", 4)?;
    let inner = s
        .strip_prefix("I ")
        .and_then(|r| r.trim().strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| err(l, "expected 'I (lo, hi)'"))?;
    let (lo, hi) = inner.split_once(',').ok_or_else(|| err(l, "expected 'I (lo, hi)'"))?;
    let interval = IntervalSpec::new(parse_endpoint(l, lo)?, parse_endpoint(l, hi)?);
    let mut levels = Vec::new();
    for (l, s) in it {
        let (head, mut body) = s.split_once(':').ok_or_else(|| err(l, "expected 'level k:'"))?;
        let k: usize = head
            .strip_prefix("level ")
            .and_then(|k| k.trim().parse().ok())
            .ok_or_else(|| err(l, "expected 'level k:'"))?;
        if k != levels.len() {
            return Err(err(l, format!("expected level {}, found {k}", levels.len())));
        }
        let mut sets = Vec::new();
        while !body.trim().is_empty() {
            let (set, rest) = parse_braced(l, body)?;
            sets.push(set.into_iter().collect());
            body = rest;
        }
        levels.push(sets);
    }
    Ok(EmConditionFile { ambient, f: f.into_iter().collect(), interval, levels })
}

pub fn serialize_em_condition(q: &EmConditionFile) -> String {
    let braces = |s: &VertexSet| {
        let items: Vec<String> = s.iter().map(|v| v.to_string()).collect();
        format!("{{{}}}", items.join(","))
    };
    let mut out = format!("rmwb-emc v1\nambient {}\nF {}\nI {}\n", q.ambient, braces(&q.f), q.interval);
    for (k, level) in q.levels.iter().enumerate() {
        out.push_str(&format!("level {k}:"));
        for e in level {
            out.push(' ');
            out.push_str(&braces(e));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{Coloring, Poset};

    #[test]
    fn functional_round_trip() {
        let text = "rmwb-fun v1\nkind poset\nfire 5 1\nfire 9 1 : edge 0 3 1 ; edge 2 4 0\n";
        let phi = parse_functional(text).unwrap();
        assert_eq!(phi.entries.len(), 2);
        assert_eq!(phi.entries[1].clauses[1], Clause { i: 2, j: 4, v: 0 });
        assert_eq!(serialize_functional(&phi), text);
    }

    #[test]
    fn functional_rejects_output_zero_and_wrong_clauses() {
        let e = parse_functional("rmwb-fun v1\nkind poset\nfire 5 0\n").unwrap_err();
        assert_eq!(e, ForcingError::NonMonotone(3));
        let e = parse_functional("rmwb-fun v1\nkind poset\nfire 5 1 : color 0 1 1\n").unwrap_err();
        assert!(matches!(e, ForcingError::Parse { line: 3, .. }));
        assert!(parse_functional("rmwb-fun v1\nkind poset\nfire 5 1 : edge 1 1 1\n").is_err());
    }

    #[test]
    fn ground_round_trip() {
        let cond = GroundCondition::Poset(GroundPosetCondition {
            f: Poset::closure_of(3, &[(0, 1)]).unwrap(),
            astar: VertexSet::from([0]),
            bstar: VertexSet::from([2]),
        });
        let text = serialize_ground(&cond);
        assert_eq!(parse_ground(&text).unwrap(), cond);
        let col = GroundCondition::Coloring(GroundColoringCondition {
            c: Coloring::constant(4, 1),
            astar: VertexSet::new(),
            bstar: VertexSet::from([3]),
        });
        assert_eq!(parse_ground(&serialize_ground(&col)).unwrap(), col);
        let empty = GroundCondition::empty(GroundKind::Coloring);
        assert_eq!(parse_ground(&serialize_ground(&empty)).unwrap(), empty);
    }

    #[test]
    fn ground_rejects_bad_closure() {
        let cond = GroundCondition::Poset(GroundPosetCondition {
            f: Poset::closure_of(3, &[(0, 1)]).unwrap(),
            astar: VertexSet::from([1]),
            bstar: VertexSet::new(),
        });
        assert!(matches!(parse_ground(&serialize_ground(&cond)), Err(ForcingError::InvalidCondition(_))));
    }

    #[test]
    fn em_condition_round_trip() {
        let text = "rmwb-emc v1\nambient t.rmwb\nF {0,2}\nI (2, +inf)\nlevel 0: {3} {4,5}\nlevel 1: {3,6}\n";
        let q = parse_em_condition(text).unwrap();
        assert_eq!(q.interval, IntervalSpec::new(Endpoint::Vertex(2), Endpoint::PosInf));
        assert_eq!(q.levels[0].len(), 2);
        assert_eq!(serialize_em_condition(&q), text);
        assert!(parse_em_condition("rmwb-emc v1\nambient t\nF {0}\nI (0, 1)\nlevel 1: {}\n").is_err());
    }
}
