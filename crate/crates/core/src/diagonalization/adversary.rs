use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::instances::{content_lines, VertexSet};
use crate::prng::XorShift64Star;

use super::DiagError;

/// A 0/1 approximation `g(x,s)` whose limit in `s` is the guessed set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitGuesser {
    /// Explicit ones on `[0,rect)²`; everything else is 0.
    Table { rect: usize, ones: BTreeSet<(usize, usize)> },
    /// Claims `target` from stage `s0` on; before that, pseudo-random noise
    /// (or nothing without a seed).
    StableTarget { target: VertexSet, s0: usize, noise: Option<u64> },
    /// Claims `first` before stage `switch` and `second` from then on.
    Injurious { first: VertexSet, second: VertexSet, switch: usize },
}

fn noise_bit(seed: u64, x: usize, s: usize) -> bool {
    let mix = seed ^ (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (s as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    let mut r = XorShift64Star::new(mix);
    r.next_u64();
    r.next_bit()
}

impl LimitGuesser {
    pub fn claims(&self, x: usize, s: usize) -> bool {
        match self {
            LimitGuesser::Table { ones, .. } => ones.contains(&(x, s)),
            LimitGuesser::StableTarget { target, s0, noise } => {
                if s >= *s0 {
                    target.contains(&x)
                } else {
                    noise.is_some_and(|seed| noise_bit(seed, x, s))
                }
            }
            LimitGuesser::Injurious { first, second, switch } => {
                if s < *switch {
                    first.contains(&x)
                } else {
                    second.contains(&x)
                }
            }
        }
    }

    /// Side of the declared square, `None` for generators.
    pub fn rect(&self) -> Option<usize> {
        match self {
            LimitGuesser::Table { rect, .. } => Some(*rect),
            _ => None,
        }
    }
}

/// Approximation to a strong array: `D(x)` together with the stage at which
/// it converges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrongArrayApprox {
    Table(BTreeMap<usize, (usize, VertexSet)>),
    /// `D(x) = [kx, kx+k)`, converging at stage `k(x+1) + delay`.
    CanonicalInterval { k: usize, delay: usize },
}

impl StrongArrayApprox {
    /// `D(x)` if it has converged by stage `s`.
    pub fn at(&self, x: usize, s: usize) -> Option<VertexSet> {
        match self {
            StrongArrayApprox::Table(m) => m.get(&x).filter(|(st, _)| *st <= s).map(|(_, d)| d.clone()),
            StrongArrayApprox::CanonicalInterval { k, delay } => {
                (k * (x + 1) + delay <= s).then(|| (k * x..k * x + k).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Adversaries {
    pub guessers: Vec<LimitGuesser>,
    pub arrays: Vec<StrongArrayApprox>,
}

fn unknown(spec: &str) -> DiagError {
    DiagError::UnknownFamily(spec.to_string())
}

fn params(spec: &str) -> Result<(&str, BTreeMap<&str, &str>), DiagError> {
    let mut toks = spec.split_whitespace();
    let name = toks.next().ok_or_else(|| unknown(spec))?;
    let mut map = BTreeMap::new();
    for t in toks {
        let (k, v) = t.split_once('=').ok_or_else(|| unknown(spec))?;
        map.insert(k, v);
    }
    Ok((name, map))
}

fn get_num(spec: &str, p: &BTreeMap<&str, &str>, key: &str, default: Option<usize>) -> Result<usize, DiagError> {
    match p.get(key) {
        Some(v) => v.parse().map_err(|_| unknown(spec)),
        None => default.ok_or_else(|| unknown(spec)),
    }
}

fn get_set(spec: &str, p: &BTreeMap<&str, &str>, key: &str) -> Result<VertexSet, DiagError> {
    let v = p.get(key).ok_or_else(|| unknown(spec))?;
    v.split(',').filter(|t| !t.is_empty()).map(|t| t.parse().map_err(|_| unknown(spec))).collect()
}

/// Documented generator families:
///
/// - `stable-target D=0,1,2,3 s0=0 [noise=SEED]`
/// - `injurious D=0,1 E=5,6 switch=50`
/// - `canonical-interval k=3 [delay=0]`
/// - `klsw-suite`: four stable-target guessers, requirement `e` targeting
///   `2e+4` points from stage `25(e+1)` with noise before
/// - `dkls-suite`: canonical-interval arrays for `k = 2..5`, delay `3e`
pub fn builtin_adversaries(spec: &str) -> Result<Adversaries, DiagError> {
    let (name, p) = params(spec)?;
    let mut out = Adversaries::default();
    match name {
        "stable-target" => out.guessers.push(LimitGuesser::StableTarget {
            target: get_set(spec, &p, "D")?,
            s0: get_num(spec, &p, "s0", Some(0))?,
            noise: p.get("noise").map(|v| v.parse().map_err(|_| unknown(spec))).transpose()?,
        }),
        "injurious" => out.guessers.push(LimitGuesser::Injurious {
            first: get_set(spec, &p, "D")?,
            second: get_set(spec, &p, "E")?,
            switch: get_num(spec, &p, "switch", None)?,
        }),
        "canonical-interval" => {
            let k = get_num(spec, &p, "k", None)?;
            if k == 0 {
                return Err(unknown(spec));
            }
            out.arrays.push(StrongArrayApprox::CanonicalInterval { k, delay: get_num(spec, &p, "delay", Some(0))? });
        }
        "klsw-suite" if p.is_empty() => {
            for e in 0..4 {
                out.guessers.push(LimitGuesser::StableTarget {
                    target: (15 * e..15 * e + 2 * e + 4).collect(),
                    s0: 25 * (e + 1),
                    noise: Some(e as u64 + 1),
                });
            }
        }
        "dkls-suite" if p.is_empty() => {
            for e in 0..4 {
                out.arrays.push(StrongArrayApprox::CanonicalInterval { k: e + 2, delay: 3 * e });
            }
        }
        _ => return Err(unknown(spec)),
    }
    Ok(out)
}

fn set_list(s: &VertexSet) -> String {
    s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn guesser_spec(g: &LimitGuesser) -> Option<String> {
    match g {
        LimitGuesser::Table { .. } => None,
        LimitGuesser::StableTarget { target, s0, noise } => Some(match noise {
            Some(n) => format!("stable-target D={} s0={s0} noise={n}", set_list(target)),
            None => format!("stable-target D={} s0={s0}", set_list(target)),
        }),
        LimitGuesser::Injurious { first, second, switch } => {
            Some(format!("injurious D={} E={} switch={switch}", set_list(first), set_list(second)))
        }
    }
}

fn err(line: usize, msg: impl Into<String>) -> DiagError {
    DiagError::Parse { line, msg: msg.into() }
}

fn num(line: usize, t: &str) -> Result<usize, DiagError> {
    t.parse().map_err(|_| err(line, format!("bad number '{t}'")))
}

enum Section {
    Guesser(usize),
    Array(usize),
    None,
}

/// `rmwb-adv v1`, then sections `guesser <id> table <rect>` (rows `x s v`),
/// `array <id> table` (rows `x stage {elements}`), or either kind with
/// `builtin <spec>` and no rows. Ids count up from 0 within each kind.
pub fn parse_adversaries(text: &str) -> Result<Adversaries, DiagError> {
    let lines = content_lines(text);
    let mut it = lines.into_iter().filter(|(_, s)| !s.trim().is_empty());
    match it.next() {
        Some((_, "rmwb-adv v1")) => {}
        Some((l, s)) => return Err(err(l, format!("expected header \"rmwb-adv v1\", found {s:?}"))),
        None => return Err(err(1, "empty input")),
    }
    let mut out = Adversaries::default();
    let mut cur = Section::None;
    for (l, s) in it {
        let t: Vec<&str> = s.split_whitespace().collect();
        match t[0] {
            "guesser" | "array" => {
                let id = num(l, t.get(1).copied().unwrap_or(""))?;
                let is_guesser = t[0] == "guesser";
                let expected = if is_guesser { out.guessers.len() } else { out.arrays.len() };
                if id != expected {
                    return Err(err(l, format!("expected {} {expected}, found {id}", t[0])));
                }
                match t.get(2).copied() {
                    Some("builtin") => {
                        let spec = t[3..].join(" ");
                        let adv = builtin_adversaries(&spec).map_err(|e| err(l, e.to_string()))?;
                        let (g, a) = (adv.guessers.len(), adv.arrays.len());
                        if (is_guesser && (g, a) != (1, 0)) || (!is_guesser && (g, a) != (0, 1)) {
                            return Err(err(l, format!("'{spec}' is not a single {}", t[0])));
                        }
                        out.guessers.extend(adv.guessers);
                        out.arrays.extend(adv.arrays);
                        cur = Section::None;
                    }
                    Some("table") if is_guesser => {
                        let rect = num(l, t.get(3).copied().unwrap_or(""))?;
                        out.guessers.push(LimitGuesser::Table { rect, ones: BTreeSet::new() });
                        cur = Section::Guesser(id);
                    }
                    Some("table") if t.len() == 3 => {
                        out.arrays.push(StrongArrayApprox::Table(BTreeMap::new()));
                        cur = Section::Array(id);
                    }
                    _ => return Err(err(l, format!("bad section header {s:?}"))),
                }
            }
            _ => match cur {
                Section::Guesser(id) => {
                    let [x, st, v] = t[..] else {
                        return Err(err(l, "expected a guesser row 'x s v'"));
                    };
                    let (x, st) = (num(l, x)?, num(l, st)?);
                    let LimitGuesser::Table { rect, ones } = &mut out.guessers[id] else { unreachable!() };
                    if x >= *rect || st >= *rect {
                        return Err(err(l, format!("row ({x},{st}) outside the rectangle [0,{rect})²")));
                    }
                    match v {
                        "1" => {
                            ones.insert((x, st));
                        }
                        "0" => {
                            ones.remove(&(x, st));
                        }
                        _ => return Err(err(l, format!("bad value '{v}'"))),
                    }
                }
                Section::Array(id) => {
                    let [x, st, set] = t[..] else {
                        return Err(err(l, "expected an array row 'x stage {elements}'"));
                    };
                    let (x, st) = (num(l, x)?, num(l, st)?);
                    let inner = set
                        .strip_prefix('{')
                        .and_then(|r| r.strip_suffix('}'))
                        .ok_or_else(|| err(l, "expected '{elements}'"))?;
                    let d: VertexSet =
                        inner.split(',').filter(|v| !v.is_empty()).map(|v| num(l, v)).collect::<Result<_, _>>()?;
                    if d.is_empty() {
                        return Err(DiagError::Array { id, msg: format!("D({x}) is empty (line {l})") });
                    }
                    let StrongArrayApprox::Table(m) = &mut out.arrays[id] else { unreachable!() };
                    if m.insert(x, (st, d)).is_some() {
                        return Err(DiagError::Array { id, msg: format!("second entry for x={x} (line {l})") });
                    }
                }
                Section::None => return Err(err(l, "row outside a table section")),
            },
        }
    }
    Ok(out)
}

pub fn serialize_adversaries(a: &Adversaries) -> String {
    let mut out = String::from("rmwb-adv v1\n");
    for (id, g) in a.guessers.iter().enumerate() {
        match (g, guesser_spec(g)) {
            (_, Some(spec)) => {
                let _ = writeln!(out, "guesser {id} builtin {spec}");
            }
            (LimitGuesser::Table { rect, ones }, None) => {
                let _ = writeln!(out, "guesser {id} table {rect}");
                for (x, s) in ones {
                    let _ = writeln!(out, "{x} {s} 1");
                }
            }
            _ => unreachable!(),
        }
    }
    for (id, arr) in a.arrays.iter().enumerate() {
        match arr {
            StrongArrayApprox::CanonicalInterval { k, delay } => {
                let _ = writeln!(out, "array {id} builtin canonical-interval k={k} delay={delay}");
            }
            StrongArrayApprox::Table(m) => {
                let _ = writeln!(out, "array {id} table");
                for (x, (st, d)) in m {
                    let _ = writeln!(out, "{x} {st} {{{}}}", set_list(d));
                }
            }
        }
    }
    out
}
