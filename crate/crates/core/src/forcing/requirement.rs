use std::collections::BTreeSet;
use std::fmt;

use super::ForcingError;
use crate::instances::{content_lines, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    AdsASide,
    AdsDSide,
    AdsFull,
    Em,
}

impl Flavor {
    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::AdsASide => "ads-A-side",
            Flavor::AdsDSide => "ads-D-side",
            Flavor::AdsFull => "ads-full",
            Flavor::Em => "em",
        }
    }

    pub fn parse(s: &str) -> Option<Flavor> {
        [Flavor::AdsASide, Flavor::AdsDSide, Flavor::AdsFull, Flavor::Em]
            .into_iter()
            .find(|f| f.as_str() == s)
    }
}

/// A queried or recorded object. ADS sides are sequences, full ADS objects
/// are `(σ,τ)` pairs, EM objects are transitive vertex sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Object {
    Seq(Vec<usize>),
    Pair(Vec<usize>, Vec<usize>),
    Set(VertexSet),
}

impl Object {
    fn fits(&self, flavor: Flavor) -> bool {
        matches!(
            (self, flavor),
            (Object::Seq(_), Flavor::AdsASide | Flavor::AdsDSide)
                | (Object::Pair(..), Flavor::AdsFull)
                | (Object::Set(_), Flavor::Em)
        )
    }

    fn size(&self) -> usize {
        match self {
            Object::Seq(s) => s.len(),
            Object::Pair(s, t) => s.len() + t.len(),
            Object::Set(s) => s.len(),
        }
    }

    /// Whether `self` is `base` or one of its extensions: end-extension for
    /// sequences, and for sets `base ⊆ self` with the new part above `base`.
    pub fn extends(&self, base: &Object) -> bool {
        match (self, base) {
            (Object::Seq(s), Object::Seq(b)) => s.starts_with(b),
            (Object::Pair(s, t), Object::Pair(bs, bt)) => s.starts_with(bs) && t.starts_with(bt),
            (Object::Set(s), Object::Set(b)) => set_extends(s, b),
            _ => false,
        }
    }
}

pub(crate) fn set_extends(s: &VertexSet, base: &VertexSet) -> bool {
    base.is_subset(s) && base.last().is_none_or(|&top| s.difference(base).all(|&x| x > top))
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: impl IntoIterator<Item = usize>) -> fmt::Result {
    let items: Vec<String> = xs.into_iter().map(|x| x.to_string()).collect();
    write!(f, "{{{}}}", items.join(","))
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Object::Seq(s) => write_list(f, s.iter().copied()),
            Object::Pair(s, t) => {
                write_list(f, s.iter().copied())?;
                f.write_str("|")?;
                write_list(f, t.iter().copied())
            }
            Object::Set(s) => write_list(f, s.iter().copied()),
        }
    }
}

/// A set of natural-number parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueSet {
    Finite(BTreeSet<usize>),
    /// Open interval `(lo, hi)`.
    Between(usize, usize),
    /// `(lo, ∞)`.
    Above(usize),
    All,
}

impl ValueSet {
    pub fn single(v: usize) -> Self {
        ValueSet::Finite(BTreeSet::from([v]))
    }

    pub fn contains(&self, v: usize) -> bool {
        match self {
            ValueSet::Finite(s) => s.contains(&v),
            ValueSet::Between(lo, hi) => *lo < v && v < *hi,
            ValueSet::Above(lo) => *lo < v,
            ValueSet::All => true,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ValueSet::Finite(s) => s.is_empty(),
            ValueSet::Between(lo, hi) => lo + 1 >= *hi,
            ValueSet::Above(_) | ValueSet::All => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// Every object (every nonempty object in the EM flavor).
    Total,
    /// Objects with at least `k` vertices.
    SizeAtLeast(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementTable {
    pub flavor: Flavor,
    pub entries: Vec<(Object, usize, usize)>,
    pub builtin: Option<Builtin>,
    /// `a_K` values on recorded sets, inherited by their extensions.
    pub a_entries: Vec<(VertexSet, usize)>,
    pub a_const: Option<usize>,
    pub astar: Option<BTreeSet<usize>>,
    pub bstar: Option<BTreeSet<usize>>,
}

impl RequirementTable {
    pub fn empty(flavor: Flavor) -> Self {
        RequirementTable {
            flavor,
            entries: Vec::new(),
            builtin: None,
            a_entries: Vec::new(),
            a_const: None,
            astar: None,
            bstar: None,
        }
    }

    pub fn total(flavor: Flavor) -> Self {
        RequirementTable {
            builtin: Some(Builtin::Total),
            ..Self::empty(flavor)
        }
    }

    /// Builder: `a_K` constant on every set.
    pub fn with_a(mut self, a: usize) -> Self {
        self.a_const = Some(a);
        self
    }

    pub fn with_entry(mut self, o: Object, a: usize, b: usize) -> Self {
        self.entries.push((o, a, b));
        self
    }

    /// The accepted-value universe `(A*, B*)`; all values when undeclared.
    pub fn universe(&self) -> (ValueSet, ValueSet) {
        let side = |s: &Option<BTreeSet<usize>>| s.clone().map_or(ValueSet::All, ValueSet::Finite);
        (side(&self.astar), side(&self.bstar))
    }

    /// Largest recorded value, used to bound searches over `b`.
    pub fn max_value(&self) -> usize {
        self.entries.iter().map(|&(_, a, b)| a.max(b)).max().unwrap_or(0)
    }

    /// `a_K(F)`: the constant, or the value recorded on a set that `F`
    /// extends. Disagreeing applicable records are an error.
    pub fn a_value(&self, f: &VertexSet) -> Result<Option<usize>, ForcingError> {
        let mut found = self.a_const;
        for (base, v) in &self.a_entries {
            if set_extends(f, base) {
                match found {
                    Some(w) if w != *v => {
                        return Err(ForcingError::Table(format!("a_K values {w} and {v} both apply to {f:?}")))
                    }
                    _ => found = Some(*v),
                }
            }
        }
        Ok(found)
    }

    /// Checks that `a_K` persists along extensions of recorded sets.
    pub fn check_persistence(&self) -> Result<(), ForcingError> {
        for (i, (f1, v1)) in self.a_entries.iter().enumerate() {
            if let Some(c) = self.a_const.filter(|c| c != v1) {
                return Err(ForcingError::Table(format!("a_K({f1:?})={v1} contradicts the constant {c}")));
            }
            for (f2, v2) in &self.a_entries[i + 1..] {
                if v1 != v2 && (set_extends(f1, f2) || set_extends(f2, f1)) {
                    return Err(ForcingError::Table(format!(
                        "a_K({f1:?})={v1} and a_K({f2:?})={v2} break persistence"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `object ∈ K^{A,B}`: some recorded object that `object` extends is accepted
/// with `a ∈ A`, `b ∈ B`. The EM relation is symmetric in `a` and `b`.
pub fn requirement_member(k: &RequirementTable, object: &Object, a: &ValueSet, b: &ValueSet) -> Result<bool, ForcingError> {
    if !object.fits(k.flavor) {
        return Err(ForcingError::FlavorMismatch(k.flavor.as_str()));
    }
    let sym = k.flavor == Flavor::Em;
    let values_ok = !a.is_empty() && !b.is_empty();
    let by_builtin = match k.builtin {
        Some(Builtin::Total) => values_ok && (k.flavor != Flavor::Em || object.size() > 0),
        Some(Builtin::SizeAtLeast(n)) => values_ok && object.size() >= n,
        None => false,
    };
    if by_builtin {
        return Ok(true);
    }
    Ok(k.entries.iter().any(|(o, x, y)| {
        object.extends(o) && ((a.contains(*x) && b.contains(*y)) || (sym && a.contains(*y) && b.contains(*x)))
    }))
}

fn err(line: usize, msg: impl Into<String>) -> ForcingError {
    ForcingError::Parse { line, msg: msg.into() }
}

pub(crate) fn parse_braced(line: usize, s: &str) -> Result<(Vec<usize>, &str), ForcingError> {
    let body = s.trim_start().strip_prefix('{').ok_or_else(|| err(line, "expected '{'"))?;
    let close = body.find('}').ok_or_else(|| err(line, "unclosed '{'"))?;
    let inner = body[..close].trim();
    let mut out = Vec::new();
    if !inner.is_empty() {
        for tok in inner.split(',') {
            out.push(tok.trim().parse().map_err(|_| err(line, format!("bad vertex '{}'", tok.trim())))?);
        }
    }
    Ok((out, &body[close + 1..]))
}

fn parse_values(line: usize, rest: &str) -> Result<BTreeSet<usize>, ForcingError> {
    rest.split_whitespace()
        .map(|t| t.parse().map_err(|_| err(line, format!("bad value '{t}'"))))
        .collect()
}

fn parse_pair(line: usize, rest: &str) -> Result<(usize, usize), ForcingError> {
    let vals: Vec<&str> = rest.split_whitespace().collect();
    match vals[..] {
        [a, b] => Ok((
            a.parse().map_err(|_| err(line, format!("bad value '{a}'")))?,
            b.parse().map_err(|_| err(line, format!("bad value '{b}'")))?,
        )),
        _ => Err(err(line, "expected two values after the object")),
    }
}

pub fn parse_requirement(text: &str) -> Result<RequirementTable, ForcingError> {
    let lines = content_lines(text);
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, "rmwb-req v1")) => {}
        Some((l, _)) => return Err(err(l, "expected header 'rmwb-req v1'")),
        None => return Err(err(1, "empty input")),
    }
    let flavor = match it.next() {
        Some((l, s)) => s
            .strip_prefix("flavor ")
            .and_then(|f| Flavor::parse(f.trim()))
            .ok_or_else(|| err(l, "expected 'flavor ads-A-side|ads-D-side|ads-full|em'"))?,
        None => return Err(err(2, "missing flavor line")),
    };
    let mut k = RequirementTable::empty(flavor);
    for (l, s) in it {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("builtin ") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            k.builtin = Some(match toks[..] {
                ["total"] => Builtin::Total,
                ["size-at-least", n] => Builtin::SizeAtLeast(n.parse().map_err(|_| err(l, "bad size"))?),
                _ => return Err(err(l, format!("unknown builtin '{rest}'"))),
            });
        } else if let Some(rest) = s.strip_prefix("astar") {
            k.astar = Some(parse_values(l, rest)?);
        } else if let Some(rest) = s.strip_prefix("bstar") {
            k.bstar = Some(parse_values(l, rest)?);
        } else if let Some(rest) = s.strip_prefix("a ") {
            let rest = rest.trim_start();
            if let Some(v) = rest.strip_prefix('*') {
                k.a_const = Some(v.trim().parse().map_err(|_| err(l, "bad a_K value"))?);
            } else {
                let (set, tail) = parse_braced(l, rest)?;
                let v = tail.trim().parse().map_err(|_| err(l, "bad a_K value"))?;
                k.a_entries.push((set.into_iter().collect(), v));
            }
        } else if s.starts_with('{') {
            let (first, tail) = parse_braced(l, s)?;
            let (object, tail) = match (flavor, tail.strip_prefix('|')) {
                (Flavor::AdsFull, Some(t)) => {
                    let (second, tail) = parse_braced(l, t)?;
                    (Object::Pair(first, second), tail)
                }
                (Flavor::AdsFull, None) => return Err(err(l, "ads-full entries are '{σ}|{τ} a b'")),
                (_, Some(_)) => return Err(err(l, "pair objects need flavor ads-full")),
                (Flavor::Em, None) => (Object::Set(first.into_iter().collect()), tail),
                (_, None) => (Object::Seq(first), tail),
            };
            let (a, b) = parse_pair(l, tail)?;
            k.entries.push((object, a, b));
        } else {
            return Err(err(l, format!("unrecognized line '{s}'")));
        }
    }
    k.check_persistence()?;
    Ok(k)
}

pub fn serialize_requirement(k: &RequirementTable) -> String {
    let mut out = format!("rmwb-req v1\nflavor {}\n", k.flavor.as_str());
    match k.builtin {
        Some(Builtin::Total) => out.push_str("builtin total\n"),
        Some(Builtin::SizeAtLeast(n)) => out.push_str(&format!("builtin size-at-least {n}\n")),
        None => {}
    }
    let values = |s: &BTreeSet<usize>| s.iter().map(|v| format!(" {v}")).collect::<String>();
    if let Some(s) = &k.astar {
        out.push_str(&format!("astar{}\n", values(s)));
    }
    if let Some(s) = &k.bstar {
        out.push_str(&format!("bstar{}\n", values(s)));
    }
    if let Some(c) = k.a_const {
        out.push_str(&format!("a * {c}\n"));
    }
    for (f, v) in &k.a_entries {
        out.push_str(&format!("a {} {v}\n", Object::Set(f.clone())));
    }
    for (o, a, b) in &k.entries {
        out.push_str(&format!("{o} {a} {b}\n"));
    }
    out
}
