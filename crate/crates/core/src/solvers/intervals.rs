use std::fmt;

use crate::instances::{Tournament, VertexSet};

use super::search::{bits, check_size, mask_of, set_of, TournamentMasks};
use super::SolverError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    NegInf,
    Vertex(usize),
    PosInf,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => f.write_str("-inf"),
            Endpoint::Vertex(v) => write!(f, "{v}"),
            Endpoint::PosInf => f.write_str("+inf"),
        }
    }
}

impl Endpoint {
    pub fn parse(s: &str) -> Option<Endpoint> {
        match s {
            "-inf" => Some(Endpoint::NegInf),
            "+inf" | "inf" => Some(Endpoint::PosInf),
            _ => s.parse().ok().map(Endpoint::Vertex),
        }
    }
}

/// `T` extended with `-∞` beating everything and everything beating `+∞`.
pub fn beats_ext(t: &Tournament, a: Endpoint, b: Endpoint) -> bool {
    match (a, b) {
        (Endpoint::NegInf, Endpoint::NegInf) | (Endpoint::PosInf, Endpoint::PosInf) => false,
        (Endpoint::NegInf, _) | (_, Endpoint::PosInf) => true,
        (_, Endpoint::NegInf) | (Endpoint::PosInf, _) => false,
        (Endpoint::Vertex(u), Endpoint::Vertex(v)) => t.beats(u, v),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntervalSpec {
    pub low: Endpoint,
    pub high: Endpoint,
}

impl IntervalSpec {
    pub const FULL: IntervalSpec = IntervalSpec {
        low: Endpoint::NegInf,
        high: Endpoint::PosInf,
    };

    pub fn new(low: Endpoint, high: Endpoint) -> Self {
        IntervalSpec { low, high }
    }

    /// `T(low,x) ∧ T(x,high)`.
    pub fn between(&self, t: &Tournament, x: usize) -> bool {
        beats_ext(t, self.low, Endpoint::Vertex(x)) && beats_ext(t, Endpoint::Vertex(x), self.high)
    }
}

impl fmt::Display for IntervalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.low, self.high)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalInterval {
    pub spec: IntervalSpec,
    /// Non-members of `F` placed right after the last element of `F` that
    /// beats them; these sets partition the complement of `F`.
    pub members: VertexSet,
    /// Members `x` with `F ∪ {x}` transitive.
    pub extenders: VertexSet,
}

/// `F` sorted by the beats relation, winner first.
pub fn transitive_order(t: &Tournament, f: &VertexSet) -> Result<Vec<usize>, SolverError> {
    let v: Vec<usize> = f.iter().copied().collect();
    if let Some(&bad) = v.iter().find(|&&x| x >= t.n()) {
        return Err(SolverError::VertexRange(bad));
    }
    t.linear_order_of(&v).ok_or(SolverError::NotTransitive(f.clone()))
}

/// Slot of `x` in the sorted transitive set `order`, if `order ∪ {x}` is
/// transitive: slot `k` sits between `order[k-1]` and `order[k]`.
pub fn slot_of(t: &Tournament, order: &[usize], x: usize) -> Option<usize> {
    if order.contains(&x) {
        return None;
    }
    let k = order.iter().take_while(|&&f| t.beats(f, x)).count();
    order[k..].iter().all(|&f| t.beats(x, f)).then_some(k)
}

pub fn slot_spec(order: &[usize], k: usize) -> IntervalSpec {
    IntervalSpec {
        low: if k == 0 { Endpoint::NegInf } else { Endpoint::Vertex(order[k - 1]) },
        high: order.get(k).map_or(Endpoint::PosInf, |&v| Endpoint::Vertex(v)),
    }
}

/// Position of `spec` among the minimal intervals of the sorted set `order`.
pub fn slot_index(order: &[usize], spec: &IntervalSpec) -> Option<usize> {
    (0..=order.len()).find(|&k| slot_spec(order, k) == *spec)
}

pub fn one_point_extensions(t: &Tournament, f: &VertexSet) -> Result<VertexSet, SolverError> {
    let order = transitive_order(t, f)?;
    Ok((0..t.n()).filter(|&a| slot_of(t, &order, a).is_some()).collect())
}

pub fn minimal_intervals(t: &Tournament, f: &VertexSet) -> Result<Vec<MinimalInterval>, SolverError> {
    let order = transitive_order(t, f)?;
    let mut out: Vec<MinimalInterval> = (0..=order.len())
        .map(|k| MinimalInterval {
            spec: slot_spec(&order, k),
            members: VertexSet::new(),
            extenders: VertexSet::new(),
        })
        .collect();
    for x in 0..t.n() {
        if f.contains(&x) {
            continue;
        }
        let k = order.iter().rposition(|&a| t.beats(a, x)).map_or(0, |p| p + 1);
        out[k].members.insert(x);
        if slot_of(t, &order, x) == Some(k) {
            out[k].extenders.insert(x);
        }
    }
    Ok(out)
}

/// Largest `d ≤ k` such that `F` grows to a transitive set of size `|F|+d`
/// using vertices from `pool`.
pub fn extendibility_depth_among(
    t: &Tournament,
    f: &VertexSet,
    pool: &VertexSet,
    k: usize,
) -> Result<usize, SolverError> {
    check_size(t.n())?;
    transitive_order(t, f)?;
    let tm = TournamentMasks::new(t);
    let ext = tm.max_extension(mask_of(f), mask_of(pool), k);
    Ok(ext.count_ones() as usize)
}

pub fn extendibility_depth(t: &Tournament, f: &VertexSet, k: usize) -> Result<usize, SolverError> {
    let pool: VertexSet = (0..t.n()).collect();
    extendibility_depth_among(t, f, &pool, k)
}

/// Witness set for `extendibility_depth`.
pub fn best_extension(t: &Tournament, f: &VertexSet, k: usize) -> Result<VertexSet, SolverError> {
    check_size(t.n())?;
    transitive_order(t, f)?;
    let tm = TournamentMasks::new(t);
    Ok(set_of(tm.max_extension(mask_of(f), super::search::all_mask(t.n()), k)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionChoice {
    pub p: VertexSet,
    pub q: VertexSet,
    pub depth_p: usize,
    pub depth_q: usize,
    /// A minimal interval of `F∪P` inside `I` that still has an extender.
    pub interval_p: Option<IntervalSpec>,
    pub interval_q: Option<IntervalSpec>,
}

pub const PARTITION_LIMIT: usize = 20;

/// Exhaustive search for the partition `J = P ∪ Q` maximizing the smaller of
/// the two extendibility depths; ties go to the lexicographically least `P`.
pub fn partition_extendible(
    t: &Tournament,
    f: &VertexSet,
    i: &IntervalSpec,
    j: &VertexSet,
    k: usize,
) -> Result<PartitionChoice, SolverError> {
    check_size(t.n())?;
    let order = transitive_order(t, f)?;
    let slot = slot_index(&order, i).ok_or_else(|| SolverError::Precondition(format!("{i} is not a minimal interval of F")))?;
    if let Some(&x) = j.iter().find(|&&x| slot_of(t, &order, x) != Some(slot)) {
        return Err(SolverError::Precondition(format!("{x} is not an extender inside {i}")));
    }
    let fj: VertexSet = f.union(j).copied().collect();
    transitive_order(t, &fj).map_err(|_| SolverError::Precondition("F ∪ J is not transitive".into()))?;
    if j.len() > PARTITION_LIMIT {
        return Err(SolverError::TooLarge {
            n: j.len(),
            limit: PARTITION_LIMIT,
        });
    }

    let tm = TournamentMasks::new(t);
    let all = super::search::all_mask(t.n());
    let depth = |h: &VertexSet| tm.max_extension(mask_of(h), all, k).count_ones() as usize;
    let jv: Vec<usize> = j.iter().copied().collect();
    let mut best: Option<(usize, Vec<usize>, VertexSet, VertexSet, usize, usize)> = None;
    for mask in 0u32..(1u32 << jv.len()) {
        let p: VertexSet = bits(mask as u128).map(|b| jv[b]).collect();
        let q: VertexSet = j.difference(&p).copied().collect();
        let fp: VertexSet = f.union(&p).copied().collect();
        let fq: VertexSet = f.union(&q).copied().collect();
        let (dp, dq) = (depth(&fp), depth(&fq));
        let score = dp.min(dq);
        let key: Vec<usize> = p.iter().copied().collect();
        let take = match &best {
            None => true,
            Some((s, bk, ..)) => score > *s || (score == *s && key < *bk),
        };
        if take {
            best = Some((score, key, p, q, dp, dq));
        }
    }
    let (_, _, p, q, depth_p, depth_q) = best.expect("at least the empty partition");
    let surviving = |half: &VertexSet, d: usize| -> Option<IntervalSpec> {
        if d == 0 {
            return None;
        }
        let h: VertexSet = f.union(half).copied().collect();
        let ord = t.linear_order_of(&h.iter().copied().collect::<Vec<_>>())?;
        let pos = |e: Endpoint| match e {
            Endpoint::NegInf => Some(0),
            Endpoint::PosInf => Some(ord.len() + 1),
            Endpoint::Vertex(v) => ord.iter().position(|&x| x == v).map(|p| p + 1),
        };
        let (lo, hi) = (pos(i.low)?, pos(i.high)?);
        (lo..hi).find_map(|k| {
            let spec = slot_spec(&ord, k);
            (0..t.n())
                .any(|x| slot_of(t, &ord, x) == Some(k))
                .then_some(spec)
        })
    };
    Ok(PartitionChoice {
        interval_p: surviving(&p, depth_p),
        interval_q: surviving(&q, depth_q),
        p,
        q,
        depth_p,
        depth_q,
    })
}
