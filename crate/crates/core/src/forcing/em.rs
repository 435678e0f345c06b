use std::sync::Arc;

use crate::families::{family_leq, prepend, validate_family, Family};
use crate::instances::{Tournament, VertexSet};
use crate::solvers::{slot_index, slot_of, transitive_order, Endpoint, IntervalSpec};

use super::requirement::{requirement_member, Flavor, Object, RequirementTable, ValueSet};
use super::{EssentialBounds, ForcingError};

/// Largest set whose partitions are enumerated.
pub const PARTITION_BITS_LIMIT: usize = 20;

/// A condition `(F,I,S)`: `F` transitive, `I` a minimal interval of `F`, and
/// every set of `S` above `F` and inside the slot `I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmCondition {
    pub f: VertexSet,
    pub interval: IntervalSpec,
    pub family: Family,
}

impl EmCondition {
    pub fn new(f: VertexSet, interval: IntervalSpec, family: Family) -> Self {
        EmCondition { f, interval, family }
    }

    pub fn ambient(&self) -> &Arc<Tournament> {
        self.family.ambient()
    }
}

/// Sorted order of `F` and the slot index of `I`.
pub(crate) fn slot_of_condition(q: &EmCondition) -> Result<(Vec<usize>, usize), ForcingError> {
    let t = q.ambient();
    let order = transitive_order(t, &q.f).map_err(|e| ForcingError::InvalidCondition(format!("F: {e}")))?;
    let k = slot_index(&order, &q.interval)
        .ok_or_else(|| ForcingError::InvalidCondition(format!("{} is not a minimal interval of F", q.interval)))?;
    Ok((order, k))
}

pub fn validate_em(q: &EmCondition) -> Result<(), ForcingError> {
    let (order, k) = slot_of_condition(q)?;
    let t = q.ambient();
    let top = q.f.last().copied();
    for (level, sets) in q.family.levels().iter().enumerate() {
        for e in sets {
            for &x in e {
                if top.is_some_and(|m| x <= m) {
                    return Err(ForcingError::InvalidCondition(format!(
                        "level {level}: {x} is not above F"
                    )));
                }
                if x >= t.n() || slot_of(t, &order, x) != Some(k) {
                    return Err(ForcingError::InvalidCondition(format!(
                        "level {level}: {x} is outside {}",
                        q.interval
                    )));
                }
            }
        }
    }
    validate_family(&q.family, q.family.depth())?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionCheck {
    pub holds: bool,
    pub reason: Option<String>,
}

impl ExtensionCheck {
    fn fail(m: impl Into<String>) -> Self {
        ExtensionCheck {
            holds: false,
            reason: Some(m.into()),
        }
    }
}

/// `(F′,I′,S′) ≤ (F,I,S)`.
pub fn validate_em_extension(q2: &EmCondition, q: &EmCondition) -> Result<ExtensionCheck, ForcingError> {
    validate_em(q)?;
    validate_em(q2)?;
    if !Arc::ptr_eq(q.ambient(), q2.ambient()) && q.ambient() != q2.ambient() {
        return Err(ForcingError::Precondition("conditions live over different tournaments".into()));
    }
    if !q.f.is_subset(&q2.f) {
        return Ok(ExtensionCheck::fail("F is not contained in F′"));
    }
    let new: VertexSet = q2.f.difference(&q.f).copied().collect();
    if let (Some(&top), Some(&low)) = (q.f.last(), new.first()) {
        if low <= top {
            return Ok(ExtensionCheck::fail(format!("added element {low} is not above max(F)={top}")));
        }
    }
    let (order, k) = slot_of_condition(q)?;
    let t = q.ambient();
    if let Some(&x) = new.iter().find(|&&x| slot_of(t, &order, x) != Some(k)) {
        return Ok(ExtensionCheck::fail(format!("added element {x} is outside {}", q.interval)));
    }
    let end_ok = |e: Endpoint, old: Endpoint| e == old || matches!(e, Endpoint::Vertex(v) if new.contains(&v));
    if !end_ok(q2.interval.low, q.interval.low) || !end_ok(q2.interval.high, q.interval.high) {
        return Ok(ExtensionCheck::fail(format!("{} is not inside {}", q2.interval, q.interval)));
    }
    let shifted = match prepend(&new, &q2.family) {
        Ok(s) => s,
        Err(e) => return Ok(ExtensionCheck::fail(format!("F′∖F + S′: {e}"))),
    };
    let leq = family_leq(&shifted, &q.family, shifted.depth());
    if !leq.holds {
        return Ok(ExtensionCheck::fail(format!(
            "(F′∖F)+S′ ≰ S at level {}",
            leq.failing_level.unwrap_or(0)
        )));
    }
    Ok(ExtensionCheck {
        holds: true,
        reason: None,
    })
}

/// A set of at most 63 vertices with its beats relation as bitmasks.
pub(crate) struct Local {
    pub verts: Vec<usize>,
    beats: Vec<u64>,
}

impl Local {
    pub fn new(t: &Tournament, e: &VertexSet) -> Result<Local, ForcingError> {
        if e.len() > PARTITION_BITS_LIMIT {
            return Err(ForcingError::TooLarge(e.len()));
        }
        let verts: Vec<usize> = e.iter().copied().collect();
        let beats = verts
            .iter()
            .map(|&u| {
                verts
                    .iter()
                    .enumerate()
                    .filter(|&(_, &v)| t.beats(u, v))
                    .fold(0u64, |m, (i, _)| m | 1 << i)
            })
            .collect();
        Ok(Local { verts, beats })
    }

    pub fn full(&self) -> u64 {
        (1u64 << self.verts.len()) - 1
    }

    pub fn set(&self, m: u64) -> VertexSet {
        (0..self.verts.len()).filter(|i| m >> i & 1 == 1).map(|i| self.verts[i]).collect()
    }

    fn compatible(&self, s: u64, v: usize) -> bool {
        let out = self.beats[v] & s;
        let inn = s & !self.beats[v];
        let mut o = out;
        while o != 0 {
            let w = o.trailing_zeros() as usize;
            o &= o - 1;
            if self.beats[w] & inn != 0 {
                return false;
            }
        }
        true
    }

    /// Every transitive subset, the empty set included.
    pub fn transitive_subsets(&self) -> Vec<u64> {
        let mut out = vec![0u64];
        let mut stack = vec![(0u64, 0usize)];
        while let Some((s, from)) = stack.pop() {
            for v in from..self.verts.len() {
                if self.compatible(s, v) {
                    let next = s | 1 << v;
                    out.push(next);
                    stack.push((next, v + 1));
                }
            }
        }
        out
    }
}

/// `hg[m]`: the subset `m` of `E` contains a transitive `F′` with
/// `F ∪ F′ ∈ K^{A,B}`.
pub(crate) fn good_closure(
    k: &RequirementTable,
    f: &VertexSet,
    local: &Local,
    subsets: &[u64],
    a: &ValueSet,
    b: &ValueSet,
) -> Result<Vec<bool>, ForcingError> {
    let n = local.verts.len();
    let mut hg = vec![false; 1 << n];
    for &m in subsets {
        let obj: VertexSet = f.union(&local.set(m)).copied().collect();
        if requirement_member(k, &Object::Set(obj), a, b)? {
            hg[m as usize] = true;
        }
    }
    for i in 0..n {
        for m in 0..hg.len() {
            if m >> i & 1 == 1 && hg[m ^ (1 << i)] {
                hg[m] = true;
            }
        }
    }
    Ok(hg)
}

/// Whether every partition of `E` has a side holding a transitive `F′` with
/// `F ∪ F′ ∈ K^{A,B}`.
pub(crate) fn every_partition_dense(
    t: &Tournament,
    k: &RequirementTable,
    f: &VertexSet,
    e: &VertexSet,
    a: &ValueSet,
    b: &ValueSet,
) -> Result<bool, ForcingError> {
    let local = Local::new(t, e)?;
    let hg = good_closure(k, f, &local, &local.transitive_subsets(), a, b)?;
    let full = local.full();
    Ok((0..=full).all(|m| hg[m as usize] || hg[(full ^ m) as usize]))
}

/// The side (0 for `E₀`) and least transitive `F′` inside it, by size then
/// lexicographically, with `F ∪ F′ ∈ K^{A,B}`.
pub fn dense_choice(
    t: &Tournament,
    k: &RequirementTable,
    f: &VertexSet,
    e0: &VertexSet,
    e1: &VertexSet,
    a: &ValueSet,
    b: &ValueSet,
) -> Result<Option<(u8, VertexSet)>, ForcingError> {
    for (side, part) in [(0u8, e0), (1u8, e1)] {
        let local = Local::new(t, part)?;
        let mut subs: Vec<VertexSet> = local.transitive_subsets().into_iter().map(|m| local.set(m)).collect();
        subs.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.iter().cmp(y.iter())));
        for s in subs {
            let obj: VertexSet = f.union(&s).copied().collect();
            if requirement_member(k, &Object::Set(obj), a, b)? {
                return Ok(Some((side, s)));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmWitness {
    pub x: usize,
    /// `B = (x, b_high]`.
    pub b_high: usize,
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmEssentialReport {
    pub essential: bool,
    pub a: Option<usize>,
    pub witnesses: Vec<EmWitness>,
    pub failing_x: Option<usize>,
}

/// Bounded reading of "K is essential below (F,I,S)": `a_K(F)` is defined and
/// for each `x ≤ x_max` some `B ⊆ (x, x+set_bound]` and level `n < level_bound`
/// make every partition of every `E ∈ S(n)` dense for `K^{a_K(F),B}`.
/// Witnesses use the least `B`, then the least level.
pub fn em_bounded_essential(
    k: &RequirementTable,
    q: &EmCondition,
    bounds: &EssentialBounds,
) -> Result<EmEssentialReport, ForcingError> {
    if k.flavor != Flavor::Em {
        return Err(ForcingError::FlavorMismatch(k.flavor.as_str()));
    }
    let Some(a) = k.a_value(&q.f)? else {
        return Ok(EmEssentialReport {
            essential: false,
            a: None,
            witnesses: Vec::new(),
            failing_x: None,
        });
    };
    let av = ValueSet::single(a);
    let t = q.ambient();
    let levels = bounds.level_bound.min(q.family.depth());
    let dense_level = |n: usize, b: &ValueSet| -> Result<bool, ForcingError> {
        for e in q.family.level(n) {
            if !every_partition_dense(t, k, &q.f, e, &av, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut witnesses = Vec::new();
    for x in 0..=bounds.x_max {
        let mut found = None;
        'search: for j in 1..=bounds.set_bound {
            let b = ValueSet::Between(x, x + j + 1);
            for n in 0..levels {
                if dense_level(n, &b)? {
                    found = Some(EmWitness { x, b_high: x + j, level: n });
                    break 'search;
                }
            }
        }
        match found {
            Some(w) => witnesses.push(w),
            None => {
                return Ok(EmEssentialReport {
                    essential: false,
                    a: Some(a),
                    witnesses,
                    failing_x: Some(x),
                })
            }
        }
    }
    Ok(EmEssentialReport {
        essential: true,
        a: Some(a),
        witnesses,
        failing_x: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettleCheck {
    pub settles: bool,
    /// `F` itself is accepted over the table's universe.
    pub accepted: bool,
    /// `(level, E, F′)` with `F ∪ F′ ∈ K^{a_K(F),(x,∞)}`.
    pub counterexample: Option<(usize, VertexSet, VertexSet)>,
}

/// Whether `(F,I,S)` settles `K` at `x`, reading survival at depth `d`.
pub fn settles_check(q: &EmCondition, k: &RequirementTable, x: usize, d: usize) -> Result<SettleCheck, ForcingError> {
    if k.flavor != Flavor::Em {
        return Err(ForcingError::FlavorMismatch(k.flavor.as_str()));
    }
    let a = k.a_value(&q.f)?.ok_or_else(|| ForcingError::AUndefined(q.f.clone()))?;
    if d > q.family.depth() {
        return Err(ForcingError::Shallow(format!(
            "family has {} levels, {d} requested",
            q.family.depth()
        )));
    }
    let (ua, ub) = k.universe();
    if requirement_member(k, &Object::Set(q.f.clone()), &ua, &ub)? {
        return Ok(SettleCheck {
            settles: true,
            accepted: true,
            counterexample: None,
        });
    }
    let t = q.ambient();
    let av = ValueSet::single(a);
    let bv = ValueSet::Above(x);
    let alive = q.family.survivors(d);
    for n in 0..d {
        for (i, e) in q.family.level(n).iter().enumerate() {
            if !alive[n][i] {
                continue;
            }
            let local = Local::new(t, e)?;
            let mut subs = local.transitive_subsets();
            subs.sort_by_key(|&m| (m.count_ones(), local.set(m)));
            for m in subs {
                let s = local.set(m);
                let obj: VertexSet = q.f.union(&s).copied().collect();
                if requirement_member(k, &Object::Set(obj), &av, &bv)? {
                    return Ok(SettleCheck {
                        settles: false,
                        accepted: false,
                        counterexample: Some((n, e.clone(), s)),
                    });
                }
            }
        }
    }
    Ok(SettleCheck {
        settles: true,
        accepted: false,
        counterexample: None,
    })
}
