use super::{Instance, InstanceError, Kind, LinearOrder, VertexSet};

/// Finite-horizon stability classification with tail start `τ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub kind: Kind,
    pub tail_start: usize,
    pub a_star: VertexSet,
    pub b_star: VertexSet,
    pub c_star: VertexSet,
    pub unresolved: VertexSet,
}

pub fn default_tail_start(n: usize) -> usize {
    n.div_ceil(2)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    A,
    B,
    C,
}

/// Classifies every vertex by its relation to the tail `[max(v+1,τ), n)`.
///
/// Colorings: color 0 gives A, color 1 gives B. Tournaments: `T(v,y)` gives A,
/// `T(y,v)` gives B. Posets: `v⪯y` gives A, incomparable gives B, `y⪯v` gives C.
/// A vertex whose tail is empty takes the class of its pair with `n-1`, and
/// `n-1` itself goes to A; this keeps the classes disjoint and monotone in `τ`.
pub fn stability_report(x: &Instance, tau: usize) -> Result<StabilityReport, InstanceError> {
    let n = x.n();
    if tau > n {
        return Err(InstanceError::TailStart { tau, n });
    }
    let side = |v: usize, y: usize| -> Side {
        match x {
            Instance::Coloring(c) => {
                if c.color(v, y) == 0 {
                    Side::A
                } else {
                    Side::B
                }
            }
            Instance::Tournament(t) => {
                if t.beats(v, y) {
                    Side::A
                } else {
                    Side::B
                }
            }
            Instance::Poset(p) => {
                if p.leq(v, y) {
                    Side::A
                } else if p.leq(y, v) {
                    Side::C
                } else {
                    Side::B
                }
            }
            Instance::LinOrder(_) => unreachable!(),
        }
    };
    if let Instance::LinOrder(_) = x {
        return Err(InstanceError::KindMismatch(Kind::LinOrder));
    }
    let mut report = StabilityReport {
        kind: x.kind(),
        tail_start: tau,
        a_star: VertexSet::new(),
        b_star: VertexSet::new(),
        c_star: VertexSet::new(),
        unresolved: VertexSet::new(),
    };
    for v in 0..n {
        let start = (v + 1).max(tau);
        let class = if start >= n {
            if v + 1 < n {
                Some(side(v, n - 1))
            } else {
                Some(Side::A)
            }
        } else {
            let first = side(v, start);
            (start + 1..n).all(|y| side(v, y) == first).then_some(first)
        };
        match class {
            Some(Side::A) => report.a_star.insert(v),
            Some(Side::B) => report.b_star.insert(v),
            Some(Side::C) => report.c_star.insert(v),
            None => report.unresolved.insert(v),
        };
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutMode {
    Explicit(VertexSet),
    /// Vertices with fewer than θ predecessors.
    Threshold(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutMethod {
    Explicit,
    Threshold(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableishReport {
    pub cut: VertexSet,
    pub method: CutMethod,
    /// Threshold cuts are guesses; only explicit cuts are exact.
    pub heuristic: bool,
    pub max_in_cut: Option<usize>,
    pub min_outside: Option<usize>,
}

pub fn stableish_classify(l: &LinearOrder, mode: &CutMode) -> Result<StableishReport, InstanceError> {
    let n = l.n();
    let (cut, method) = match mode {
        CutMode::Explicit(v) => {
            if let Some(&bad) = v.iter().find(|&&x| x >= n) {
                return Err(InstanceError::VertexRange(bad));
            }
            for &member in v {
                if let Some(&below) = l.listing()[..l.rank(member)].iter().find(|u| !v.contains(u)) {
                    return Err(InstanceError::CutNotDownward { member, below });
                }
            }
            (v.clone(), CutMethod::Explicit)
        }
        CutMode::Threshold(theta) => (
            (0..n).filter(|&x| l.rank(x) < *theta).collect(),
            CutMethod::Threshold(*theta),
        ),
    };
    let k = cut.len();
    Ok(StableishReport {
        max_in_cut: k.checked_sub(1).map(|r| l.listing()[r]),
        min_outside: (k < n).then(|| l.listing()[k]),
        heuristic: matches!(method, CutMethod::Threshold(_)),
        cut,
        method,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneSide {
    AscendingInCut,
    DescendingInComplement,
}

/// Greedy search inside one side of the cut: start at the least index, then
/// repeatedly take the least later index that continues the monotone run.
pub fn extract_monotone_from_cut(
    l: &LinearOrder,
    report: &StableishReport,
    side: MonotoneSide,
) -> Result<Vec<usize>, InstanceError> {
    let n = l.n();
    let in_side = |x: usize| match side {
        MonotoneSide::AscendingInCut => report.cut.contains(&x),
        MonotoneSide::DescendingInComplement => !report.cut.contains(&x),
    };
    let extends = |last: usize, x: usize| match side {
        MonotoneSide::AscendingInCut => l.precedes(last, x),
        MonotoneSide::DescendingInComplement => l.precedes(x, last),
    };
    let first = (0..n).find(|&x| in_side(x)).ok_or(InstanceError::EmptySide)?;
    let mut seq = vec![first];
    for x in first + 1..n {
        if in_side(x) && extends(*seq.last().unwrap(), x) {
            seq.push(x);
        }
    }
    Ok(seq)
}
