use crate::instances::{Coloring, Poset, VertexSet};

use super::ForcingError;

/// `(F, A*, B*)` with `F` an order-respecting poset on `[0,n)`, `A*`
/// downward and `B*` upward closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundPosetCondition {
    pub f: Poset,
    pub astar: VertexSet,
    pub bstar: VertexSet,
}

/// `(c, A*, B*)` with `c` a 2-coloring of pairs of `[0,n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundColoringCondition {
    pub c: Coloring,
    pub astar: VertexSet,
    pub bstar: VertexSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundCondition {
    Poset(GroundPosetCondition),
    Coloring(GroundColoringCondition),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundKind {
    Poset,
    Coloring,
}

impl GroundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GroundKind::Poset => "poset",
            GroundKind::Coloring => "coloring",
        }
    }
}

impl GroundCondition {
    pub fn empty(kind: GroundKind) -> Self {
        match kind {
            GroundKind::Poset => GroundCondition::Poset(GroundPosetCondition {
                f: Poset::antichain(0),
                astar: VertexSet::new(),
                bstar: VertexSet::new(),
            }),
            GroundKind::Coloring => GroundCondition::Coloring(GroundColoringCondition {
                c: Coloring::constant(0, 0),
                astar: VertexSet::new(),
                bstar: VertexSet::new(),
            }),
        }
    }

    pub fn kind(&self) -> GroundKind {
        match self {
            GroundCondition::Poset(_) => GroundKind::Poset,
            GroundCondition::Coloring(_) => GroundKind::Coloring,
        }
    }

    pub fn domain(&self) -> usize {
        match self {
            GroundCondition::Poset(p) => p.f.n(),
            GroundCondition::Coloring(c) => c.c.n(),
        }
    }

    pub fn astar(&self) -> &VertexSet {
        match self {
            GroundCondition::Poset(p) => &p.astar,
            GroundCondition::Coloring(c) => &c.astar,
        }
    }

    pub fn bstar(&self) -> &VertexSet {
        match self {
            GroundCondition::Poset(p) => &p.bstar,
            GroundCondition::Coloring(c) => &c.bstar,
        }
    }

    pub fn validate(&self) -> Result<(), ForcingError> {
        let bad = |m: String| Err(ForcingError::InvalidCondition(m));
        let n = self.domain();
        if let Some(&v) = self.astar().iter().chain(self.bstar()).find(|&&v| v >= n) {
            return bad(format!("{v} is outside the domain [0,{n})"));
        }
        if let Some(v) = self.astar().intersection(self.bstar()).next() {
            return bad(format!("{v} is in both A* and B*"));
        }
        if let GroundCondition::Poset(p) = self {
            if !p.f.order_respecting() {
                return bad("poset does not respect the natural order".into());
            }
            for &a in &p.astar {
                if let Some(b) = (0..n).find(|&b| p.f.leq(b, a) && !p.astar.contains(&b)) {
                    return bad(format!("A* is not downward closed: {b} ⪯ {a}"));
                }
            }
            for &a in &p.bstar {
                if let Some(b) = (0..n).find(|&b| p.f.leq(a, b) && !p.bstar.contains(&b)) {
                    return bad(format!("B* is not upward closed: {a} ⪯ {b}"));
                }
            }
        }
        Ok(())
    }
}

/// Checks `new ≤ old`. `Err` carries the first broken clause.
pub fn ground_extends(new: &GroundCondition, old: &GroundCondition) -> Result<(), String> {
    let (n0, n1) = (old.domain(), new.domain());
    if new.kind() != old.kind() {
        return Err("conditions of different kinds".into());
    }
    if n1 < n0 {
        return Err(format!("domain shrinks from {n0} to {n1}"));
    }
    if !old.astar().is_subset(new.astar()) {
        return Err("A* shrinks".into());
    }
    if !old.bstar().is_subset(new.bstar()) {
        return Err("B* shrinks".into());
    }
    match (new, old) {
        (GroundCondition::Poset(p1), GroundCondition::Poset(p0)) => {
            for i in 0..n0 {
                for j in 0..n0 {
                    if p1.f.leq(i, j) != p0.f.leq(i, j) {
                        return Err(format!("order between {i} and {j} changes"));
                    }
                }
            }
            for x in n0..n1 {
                if let Some(a) = p0.astar.iter().find(|&&a| !p1.f.leq(a, x)) {
                    return Err(format!("new element {x} is not above {a} ∈ A*"));
                }
                if let Some(b) = p0.bstar.iter().find(|&&b| p1.f.leq(b, x)) {
                    return Err(format!("new element {x} is above {b} ∈ B*"));
                }
            }
        }
        (GroundCondition::Coloring(c1), GroundCondition::Coloring(c0)) => {
            for i in 0..n0 {
                for j in i + 1..n0 {
                    if c1.c.color(i, j) != c0.c.color(i, j) {
                        return Err(format!("color of {{{i},{j}}} changes"));
                    }
                }
            }
            for x in n0..n1 {
                if let Some(a) = c0.astar.iter().find(|&&a| c1.c.color(a, x) != 0) {
                    return Err(format!("c({a},{x}) must be 0 for {a} ∈ A*"));
                }
                if let Some(b) = c0.bstar.iter().find(|&&b| c1.c.color(b, x) != 1) {
                    return Err(format!("c({b},{x}) must be 1 for {b} ∈ B*"));
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

/// One literal of a functional table entry: `i ⪯ j` (edge) or `c(i,j)`
/// (color) must equal `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clause {
    pub i: usize,
    pub j: usize,
    pub v: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalEntry {
    pub x: usize,
    pub clauses: Vec<Clause>,
}

impl FunctionalEntry {
    /// Least domain on which every clause and `x` are defined.
    pub fn span(&self) -> usize {
        self.clauses.iter().map(|c| c.i.max(c.j)).fold(self.x, usize::max) + 1
    }
}

/// A monotone functional: `Φ(G)` is the set of `x` for which some entry
/// fires in the finite object `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalTable {
    pub kind: GroundKind,
    pub entries: Vec<FunctionalEntry>,
}

fn clause_holds(cond: &GroundCondition, c: &Clause) -> bool {
    match cond {
        GroundCondition::Poset(p) => p.f.leq(c.i, c.j) == (c.v == 1),
        GroundCondition::Coloring(g) => g.c.color(c.i, c.j) == c.v,
    }
}

impl FunctionalTable {
    pub fn fires(&self, cond: &GroundCondition, e: &FunctionalEntry) -> bool {
        e.span() <= cond.domain() && e.clauses.iter().all(|c| clause_holds(cond, c))
    }

    /// `x ∈ Φ(F)` as witnessed inside the finite condition.
    pub fn eval(&self, cond: &GroundCondition, x: usize) -> bool {
        self.entries.iter().any(|e| e.x == x && self.fires(cond, e))
    }

    pub fn outputs(&self, cond: &GroundCondition) -> VertexSet {
        self.entries.iter().filter(|e| self.fires(cond, e)).map(|e| e.x).collect()
    }
}

/// The one-step extension deciding `i`. `i` may be at most one past the
/// domain; a new vertex is placed in B*.
pub fn ground_decide(cond: &GroundCondition, i: usize) -> Result<GroundCondition, ForcingError> {
    cond.validate()?;
    let n = cond.domain();
    if i > n {
        return Err(ForcingError::Precondition(format!("vertex {i} is beyond the domain [0,{n}]")));
    }
    let mut out = if i == n { extend(cond, n + 1, &[]).expect("unconstrained extension") } else { cond.clone() };
    if out.astar().contains(&i) || out.bstar().contains(&i) {
        return Ok(out);
    }
    match &mut out {
        GroundCondition::Poset(p) => {
            let up = p.f.up_closure(i);
            p.bstar.extend(up);
        }
        GroundCondition::Coloring(c) => {
            c.bstar.insert(i);
        }
    }
    Ok(out)
}

/// Least extension of `cond` to domain `m` satisfying `clauses`, if any.
/// New points sit above A*; colors not fixed by A*, B* or the clauses are 0.
fn extend(cond: &GroundCondition, m: usize, clauses: &[Clause]) -> Option<GroundCondition> {
    let n = cond.domain();
    match cond {
        GroundCondition::Poset(p) => {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if p.f.leq(i, j) {
                        edges.push((i, j));
                    }
                }
            }
            for y in n..m {
                edges.extend(p.astar.iter().map(|&a| (a, y)));
            }
            for c in clauses.iter().filter(|c| c.v == 1 && c.i != c.j) {
                if c.i > c.j {
                    return None;
                }
                edges.push((c.i, c.j));
            }
            let f = Poset::closure_of(m, &edges).ok()?;
            let next = GroundCondition::Poset(GroundPosetCondition {
                f,
                astar: p.astar.clone(),
                bstar: p.bstar.clone(),
            });
            let ok = clauses.iter().all(|c| clause_holds(&next, c)) && ground_extends(&next, cond).is_ok();
            ok.then_some(next)
        }
        GroundCondition::Coloring(g) => {
            let mut fixed = std::collections::HashMap::new();
            for c in clauses {
                let key = (c.i.min(c.j), c.i.max(c.j));
                if c.i == c.j || fixed.insert(key, c.v).is_some_and(|v| v != c.v) {
                    return None;
                }
            }
            let forced = |i: usize| {
                if g.astar.contains(&i) {
                    Some(0)
                } else if g.bstar.contains(&i) {
                    Some(1)
                } else {
                    None
                }
            };
            let mut conflict = false;
            let c = Coloring::from_fn(m, |i, j| {
                let (i, j) = (i.min(j), i.max(j));
                if j < n {
                    return g.c.color(i, j);
                }
                let f = if i < n { forced(i) } else { None };
                match (f, fixed.get(&(i, j))) {
                    (Some(a), Some(&b)) if a != b => {
                        conflict = true;
                        a
                    }
                    (Some(a), _) => a,
                    (None, Some(&b)) => b,
                    (None, None) => 0,
                }
            });
            let next = GroundCondition::Coloring(GroundColoringCondition {
                c,
                astar: g.astar.clone(),
                bstar: g.bstar.clone(),
            });
            let ok = !conflict && clauses.iter().all(|c| clause_holds(&next, c));
            ok.then_some(next)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalRound {
    pub x: usize,
    pub entry: usize,
    pub domain: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagonalOutcome {
    /// `a ∈ Φ ∩ A*` and `b ∈ Φ ∩ B*` are both forced by `condition`.
    Success {
        condition: GroundCondition,
        a: usize,
        b: usize,
        rounds: [DiagonalRound; 2],
    },
    /// No entry could be made to fire within the budget in `round` (1 or 2).
    Budget { round: u8, budget: usize, condition: GroundCondition },
}

fn diagonal_round(
    cond: &GroundCondition,
    phi: &FunctionalTable,
    budget: usize,
) -> Option<(GroundCondition, DiagonalRound)> {
    let n = cond.domain();
    let mut order: Vec<usize> = (0..phi.entries.len()).collect();
    order.sort_by_key(|&k| (phi.entries[k].x, k));
    for k in order {
        let e = &phi.entries[k];
        if e.x < n || cond.astar().contains(&e.x) || cond.bstar().contains(&e.x) {
            continue;
        }
        let m = e.span().max(n);
        if m - n > budget {
            continue;
        }
        if let Some(next) = extend(cond, m, &e.clauses) {
            return Some((next, DiagonalRound { x: e.x, entry: k, domain: m }));
        }
    }
    None
}

/// Extends `cond` so that `Φ` meets both A* and B*, adding at most `budget`
/// points per round.
pub fn ground_diagonalize(
    cond: &GroundCondition,
    phi: &FunctionalTable,
    budget: usize,
) -> Result<DiagonalOutcome, ForcingError> {
    cond.validate()?;
    if phi.kind != cond.kind() {
        return Err(ForcingError::Precondition(format!(
            "table is over {} clauses, condition is a {}",
            phi.kind.as_str(),
            cond.kind().as_str()
        )));
    }
    let Some((mut c1, r1)) = diagonal_round(cond, phi, budget) else {
        return Ok(DiagonalOutcome::Budget { round: 1, budget, condition: cond.clone() });
    };
    match &mut c1 {
        GroundCondition::Poset(p) => {
            let down = p.f.down_closure(r1.x);
            p.astar.extend(down);
        }
        GroundCondition::Coloring(g) => {
            g.astar.insert(r1.x);
        }
    }
    let Some((mut c2, r2)) = diagonal_round(&c1, phi, budget) else {
        return Ok(DiagonalOutcome::Budget { round: 2, budget, condition: c1 });
    };
    match &mut c2 {
        GroundCondition::Poset(p) => {
            let up = p.f.up_closure(r2.x);
            p.bstar.extend(up);
        }
        GroundCondition::Coloring(g) => {
            g.bstar.insert(r2.x);
        }
    }
    let out = DiagonalOutcome::Success { condition: c2, a: r1.x, b: r2.x, rounds: [r1, r2] };
    verify_diagonalization(cond, phi, &out)?;
    Ok(out)
}

pub fn verify_diagonalization(
    input: &GroundCondition,
    phi: &FunctionalTable,
    out: &DiagonalOutcome,
) -> Result<(), ForcingError> {
    let DiagonalOutcome::Success { condition, a, b, .. } = out else {
        return Ok(());
    };
    let fail = |m: String| Err(ForcingError::Audit(m));
    condition.validate().or_else(|e| fail(format!("result is not a condition: {e}")))?;
    if let Err(m) = ground_extends(condition, input) {
        return fail(format!("result does not extend the input: {m}"));
    }
    if !condition.astar().contains(a) || !phi.eval(condition, *a) {
        return fail(format!("{a} is not a forced output in A*"));
    }
    if !condition.bstar().contains(b) || !phi.eval(condition, *b) {
        return fail(format!("{b} is not a forced output in B*"));
    }
    Ok(())
}
