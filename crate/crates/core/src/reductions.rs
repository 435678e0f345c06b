//! Instance translations between colorings, posets, tournaments and linear
//! orders, with the matching solution pullbacks.

use std::fmt;

use thiserror::Error;

use crate::instances::{content_lines, Coloring, Instance, Kind, LinearOrder, Poset, Tournament};
use crate::solvers::lex_least_lis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolutionKind {
    Homogeneous(u8),
    Chain,
    Antichain,
    Ascending,
    Descending,
    Transitive,
}

impl SolutionKind {
    /// Instance kind the solution refers to.
    pub fn instance_kind(self) -> Kind {
        match self {
            SolutionKind::Homogeneous(_) => Kind::Coloring,
            SolutionKind::Chain | SolutionKind::Antichain => Kind::Poset,
            SolutionKind::Ascending | SolutionKind::Descending => Kind::LinOrder,
            SolutionKind::Transitive => Kind::Tournament,
        }
    }
}

impl fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionKind::Homogeneous(c) => write!(f, "homogeneous color {c}"),
            SolutionKind::Chain => f.write_str("chain"),
            SolutionKind::Antichain => f.write_str("antichain"),
            SolutionKind::Ascending => f.write_str("ascending"),
            SolutionKind::Descending => f.write_str("descending"),
            SolutionKind::Transitive => f.write_str("transitive"),
        }
    }
}

/// A claimed solution: vertices are listed in increasing ℕ order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SolutionSet {
    pub kind: SolutionKind,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("not a valid {kind} solution: {reason}")]
    NotSolution { kind: SolutionKind, reason: String },
    #[error("a {kind} solution does not apply to a {instance} instance")]
    WrongInstance { kind: SolutionKind, instance: Kind },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl SolutionSet {
    pub fn new(kind: SolutionKind, vertices: Vec<usize>) -> Self {
        SolutionSet { kind, vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn fail(&self, reason: impl Into<String>) -> ReductionError {
        ReductionError::NotSolution {
            kind: self.kind,
            reason: reason.into(),
        }
    }
}

/// Checks the solution verbatim against the instance.
pub fn check_solution(x: &Instance, s: &SolutionSet) -> Result<(), ReductionError> {
    if s.kind.instance_kind() != x.kind() {
        return Err(ReductionError::WrongInstance {
            kind: s.kind,
            instance: x.kind(),
        });
    }
    let v = &s.vertices;
    if let Some(w) = v.windows(2).find(|w| w[0] >= w[1]) {
        return Err(s.fail(format!("vertices not strictly increasing at {} {}", w[0], w[1])));
    }
    if let Some(&bad) = v.iter().find(|&&u| u >= x.n()) {
        return Err(s.fail(format!("vertex {bad} out of range")));
    }
    let ok = match (x, s.kind) {
        (Instance::Coloring(c), SolutionKind::Homogeneous(col)) => col <= 1 && c.is_homogeneous(v, col),
        (Instance::Poset(p), SolutionKind::Chain) => p.is_chain(v),
        (Instance::Poset(p), SolutionKind::Antichain) => p.is_antichain(v),
        (Instance::LinOrder(l), SolutionKind::Ascending) => l.is_ascending(v),
        (Instance::LinOrder(l), SolutionKind::Descending) => l.is_descending(v),
        (Instance::Tournament(t), SolutionKind::Transitive) => t.is_transitive(v),
        _ => unreachable!(),
    };
    if ok {
        Ok(())
    } else {
        Err(s.fail("property fails"))
    }
}

/// `c_M(x,y) = 0` iff `x` and `y` are comparable.
pub fn poset_to_coloring(m: &Poset) -> Coloring {
    Coloring::from_fn(m.n(), |i, j| if m.comparable(i, j) { 0 } else { 1 })
}

pub fn homogeneous_to_chain_antichain(m: &Poset, h: &SolutionSet) -> Result<SolutionSet, ReductionError> {
    let color = match h.kind {
        SolutionKind::Homogeneous(c) => c,
        other => {
            return Err(ReductionError::WrongInstance {
                kind: other,
                instance: Kind::Coloring,
            })
        }
    };
    check_solution(&poset_to_coloring(m).into(), h)?;
    let kind = if color == 0 {
        SolutionKind::Chain
    } else {
        SolutionKind::Antichain
    };
    let out = SolutionSet::new(kind, h.vertices.clone());
    check_solution(&m.clone().into(), &out)?;
    Ok(out)
}

/// `x ⪯ y` iff `x ≤_L y` and `x ≤ y`.
pub fn linear_to_poset(l: &LinearOrder) -> Poset {
    Poset::from_fn(l.n(), |x, y| x == y || (x < y && l.precedes(x, y))).expect("intersection of two linear orders")
}

pub fn solution_to_monotone(l: &LinearOrder, s: &SolutionSet) -> Result<SolutionSet, ReductionError> {
    let kind = match s.kind {
        SolutionKind::Chain => SolutionKind::Ascending,
        SolutionKind::Antichain => SolutionKind::Descending,
        other => {
            return Err(ReductionError::WrongInstance {
                kind: other,
                instance: Kind::Poset,
            })
        }
    };
    check_solution(&linear_to_poset(l).into(), s)?;
    let out = SolutionSet::new(kind, s.vertices.clone());
    check_solution(&l.clone().into(), &out)?;
    Ok(out)
}

/// For `x<y`: `T(x,y)` iff `c(x,y) = 1`.
pub fn coloring_to_tournament(c: &Coloring) -> Tournament {
    Tournament::from_fn(c.n(), |i, j| c.color(i, j) == 1)
}

/// For `x<y`: `c(x,y) = 0` iff `T(x,y)`.
pub fn tournament_to_coloring(t: &Tournament) -> Coloring {
    Coloring::from_fn(t.n(), |i, j| if t.beats(i, j) { 0 } else { 1 })
}

/// Linear order on the positions of `s.vertices`: position `a` precedes `b`
/// iff `T(s[a], s[b])`. Returns the order and the position → vertex map.
pub fn induced_order(t: &Tournament, s: &SolutionSet) -> Result<(LinearOrder, Vec<usize>), ReductionError> {
    if s.kind != SolutionKind::Transitive {
        return Err(ReductionError::WrongInstance {
            kind: s.kind,
            instance: Kind::Tournament,
        });
    }
    check_solution(&t.clone().into(), s)?;
    let v = &s.vertices;
    let ranks: Vec<usize> = v
        .iter()
        .map(|&u| v.iter().filter(|&&w| t.beats(w, u)).count())
        .collect();
    Ok((LinearOrder::from_ranks(ranks).expect("transitive"), v.clone()))
}

/// Thins a transitive set of `T_c` to a homogeneous set of `c` by taking the
/// longer of the longest ascending and descending runs (ascending on ties).
pub fn transitive_to_homogeneous(c: &Coloring, s: &SolutionSet) -> Result<SolutionSet, ReductionError> {
    let t = coloring_to_tournament(c);
    let (order, verts) = induced_order(&t, s)?;
    let m = verts.len();
    let ranks = order.ranks();
    let asc = lex_least_lis(ranks);
    let flipped: Vec<usize> = ranks.iter().map(|&r| m - 1 - r).collect();
    let desc = lex_least_lis(&flipped);
    let (picked, color) = if asc.len() >= desc.len() { (asc, 1) } else { (desc, 0) };
    let out = SolutionSet::new(
        SolutionKind::Homogeneous(color),
        picked.into_iter().map(|i| verts[i]).collect(),
    );
    check_solution(&c.clone().into(), &out)?;
    Ok(out)
}

pub fn serialize_solution(s: &SolutionSet) -> String {
    let kind = match s.kind {
        SolutionKind::Homogeneous(c) => format!("homogeneous color {c}"),
        k => k.to_string(),
    };
    let ids: Vec<String> = s.vertices.iter().map(|v| v.to_string()).collect();
    format!("rmwb-sol v1\nkind {kind}\n{}\n", ids.join(" "))
}

pub fn parse_solution(text: &str) -> Result<SolutionSet, ReductionError> {
    let perr = |line: usize, msg: String| ReductionError::Parse { line, msg };
    let lines = content_lines(text);
    let mut it = lines.into_iter();
    let (ln, magic) = it.next().ok_or_else(|| perr(1, "empty input".into()))?;
    if magic != "rmwb-sol v1" {
        return Err(perr(ln, format!("expected header \"rmwb-sol v1\", found {magic:?}")));
    }
    let (ln, kline) = it.next().ok_or_else(|| perr(ln + 1, "missing kind line".into()))?;
    let kind = match kline.strip_prefix("kind ") {
        Some("chain") => SolutionKind::Chain,
        Some("antichain") => SolutionKind::Antichain,
        Some("ascending") => SolutionKind::Ascending,
        Some("descending") => SolutionKind::Descending,
        Some("transitive") => SolutionKind::Transitive,
        Some("homogeneous color 0") => SolutionKind::Homogeneous(0),
        Some("homogeneous color 1") => SolutionKind::Homogeneous(1),
        _ => return Err(perr(ln, format!("bad kind line {kline:?}"))),
    };
    let (ln, vline) = it.next().unwrap_or((ln + 1, ""));
    let mut vertices = Vec::new();
    for tok in vline.split_whitespace() {
        vertices.push(tok.parse().map_err(|_| perr(ln, format!("bad vertex {tok:?}")))?);
    }
    if let Some((ln, extra)) = it.next() {
        if !extra.is_empty() {
            return Err(perr(ln, "unexpected trailing line".into()));
        }
    }
    Ok(SolutionSet { kind, vertices })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(kind: SolutionKind, v: &[usize]) -> SolutionSet {
        SolutionSet::new(kind, v.to_vec())
    }

    #[test]
    fn poset_colorings() {
        assert_eq!(poset_to_coloring(&Poset::chain(2)).color(0, 1), 0);
        assert_eq!(poset_to_coloring(&Poset::antichain(2)).color(0, 1), 1);
        let m = Poset::closure_of(3, &[(0, 1)]).unwrap();
        let c = poset_to_coloring(&m);
        assert_eq!((c.color(0, 1), c.color(0, 2), c.color(1, 2)), (0, 1, 1));
    }

    #[test]
    fn homogeneous_pullback_to_poset() {
        let chain = Poset::chain(4);
        let h = sol(SolutionKind::Homogeneous(0), &[0, 1, 2, 3]);
        assert_eq!(homogeneous_to_chain_antichain(&chain, &h).unwrap().kind, SolutionKind::Chain);
        let anti = Poset::antichain(4);
        let h = sol(SolutionKind::Homogeneous(1), &[0, 1, 2, 3]);
        assert_eq!(homogeneous_to_chain_antichain(&anti, &h).unwrap().kind, SolutionKind::Antichain);
        let two_chains = Poset::closure_of(4, &[(0, 1), (2, 3)]).unwrap();
        let out = homogeneous_to_chain_antichain(&two_chains, &sol(SolutionKind::Homogeneous(1), &[0, 2])).unwrap();
        assert_eq!(out, sol(SolutionKind::Antichain, &[0, 2]));
        assert!(homogeneous_to_chain_antichain(&two_chains, &sol(SolutionKind::Homogeneous(1), &[0, 1])).is_err());
    }

    #[test]
    fn linear_to_poset_examples() {
        let p = linear_to_poset(&LinearOrder::identity(4));
        assert!(p.is_chain(&[0, 1, 2, 3]));
        let p = linear_to_poset(&LinearOrder::reversed(3));
        assert!(p.is_antichain(&[0, 1, 2]));
        let p = linear_to_poset(&LinearOrder::from_ranks(vec![1, 0, 2]).unwrap());
        let comparable: Vec<(usize, usize)> = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .filter(|&(i, j)| p.comparable(i, j))
            .collect();
        assert_eq!(comparable, vec![(0, 2), (1, 2)]);
    }

    #[test]
    fn monotone_pullbacks() {
        let id = LinearOrder::identity(4);
        let out = solution_to_monotone(&id, &sol(SolutionKind::Chain, &[0, 1, 2, 3])).unwrap();
        assert_eq!(out.kind, SolutionKind::Ascending);
        let rev = LinearOrder::reversed(4);
        let out = solution_to_monotone(&rev, &sol(SolutionKind::Antichain, &[0, 1, 2, 3])).unwrap();
        assert_eq!(out.kind, SolutionKind::Descending);
        let l = LinearOrder::from_ranks(vec![1, 0, 2]).unwrap();
        let out = solution_to_monotone(&l, &sol(SolutionKind::Antichain, &[0, 1])).unwrap();
        assert_eq!(out, sol(SolutionKind::Descending, &[0, 1]));
    }

    #[test]
    fn coloring_tournament_translations() {
        let c1 = Coloring::constant(2, 1);
        assert!(coloring_to_tournament(&c1).beats(0, 1));
        let c0 = Coloring::constant(2, 0);
        assert!(coloring_to_tournament(&c0).beats(1, 0));
        let t = coloring_to_tournament(&Coloring::constant(3, 0));
        assert!(t.beats(1, 0) && t.beats(2, 0) && t.beats(2, 1));
        assert_eq!(tournament_to_coloring(&Tournament::lower_wins(2)).color(0, 1), 0);
        assert_eq!(tournament_to_coloring(&Tournament::upper_wins(2)).color(0, 1), 1);
    }

    #[test]
    fn induced_orders() {
        let t = Tournament::upper_wins(3);
        let (l, v) = induced_order(&t, &sol(SolutionKind::Transitive, &[0, 1, 2])).unwrap();
        assert_eq!(v, vec![0, 1, 2]);
        assert_eq!(l.listing(), &[2, 1, 0]);
        let (l, _) = induced_order(&t, &sol(SolutionKind::Transitive, &[1])).unwrap();
        assert_eq!(l.n(), 1);
        let cyc = Tournament::from_fn(3, |i, j| !(i == 0 && j == 2));
        let (l, _) = induced_order(&cyc, &sol(SolutionKind::Transitive, &[0, 1])).unwrap();
        assert_eq!(l.listing(), &[0, 1]);
        assert!(induced_order(&cyc, &sol(SolutionKind::Transitive, &[0, 1, 2])).is_err());
    }

    #[test]
    fn thinning_constant_colorings() {
        let all = sol(SolutionKind::Transitive, &[0, 1, 2, 3]);
        let h = transitive_to_homogeneous(&Coloring::constant(4, 1), &all).unwrap();
        assert_eq!(h, sol(SolutionKind::Homogeneous(1), &[0, 1, 2, 3]));
        let h = transitive_to_homogeneous(&Coloring::constant(4, 0), &all).unwrap();
        assert_eq!(h, sol(SolutionKind::Homogeneous(0), &[0, 1, 2, 3]));
    }

    #[test]
    fn thinning_zig_zag() {
        // Induced order 1 ≺ 3 ≺ 0 ≺ 2 over S = [0,4): colors follow from T_c.
        let order = [1usize, 3, 0, 2];
        let pos = |v: usize| order.iter().position(|&x| x == v).unwrap();
        let c = Coloring::from_fn(4, |i, j| (pos(i) < pos(j)) as u8);
        let h = transitive_to_homogeneous(&c, &sol(SolutionKind::Transitive, &[0, 1, 2, 3])).unwrap();
        // Exhaustive oracle over all subsets for the best monotone size.
        let best = (0u32..16)
            .filter(|m| {
                let v: Vec<usize> = (0..4).filter(|i| m >> i & 1 == 1).collect();
                c.is_homogeneous(&v, 0) || c.is_homogeneous(&v, 1)
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap();
        assert_eq!(h.len(), best);
        assert!(h.len() >= 2);
    }

    #[test]
    fn solution_format_round_trip() {
        for s in [
            sol(SolutionKind::Homogeneous(1), &[0, 3, 5]),
            sol(SolutionKind::Transitive, &[]),
            sol(SolutionKind::Descending, &[2]),
        ] {
            assert_eq!(parse_solution(&serialize_solution(&s)).unwrap(), s);
        }
        assert!(parse_solution("rmwb-sol v1\nkind clique\n1\n").is_err());
    }
}
