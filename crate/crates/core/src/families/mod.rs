//! Leveled families of finite subtournaments and their algebra.

mod format;
mod random;
mod refine;

use std::sync::Arc;

use thiserror::Error;

use crate::instances::{Tournament, VertexSet};

pub use format::{parse_family, serialize_family, FamilyFile};
pub use random::random_family;
pub use refine::{
    family_split, pieces, pointwise_refine, verify_refinement, verify_split, Label, PointwisePartition, RefineCertificate,
    RefineStep, SplitResult,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("family has {have} levels, {need} required")]
    Shallow { have: usize, need: usize },
    #[error("level {level}: set {set:?} leaves the ambient tournament")]
    OutOfRange { level: usize, set: VertexSet },
    #[error("level {0} is empty")]
    EmptyLevel(usize),
    #[error("level {level}: set {set:?} is listed twice")]
    Duplicate { level: usize, set: VertexSet },
    #[error("level {level}: set {set:?} has no predecessor at level {}", level - 1)]
    NoPredecessor { level: usize, set: VertexSet },
    #[error("set {set:?} is not a member of level {level}")]
    NotMember { level: usize, set: VertexSet },
    #[error("set {0:?} must lie below every set of level 0")]
    NotBelow(VertexSet),
    #[error("set {set:?} at level {level} does not survive to depth {depth}")]
    NotSurviving { level: usize, set: VertexSet, depth: usize },
    #[error("labeling is undefined at vertex {0}")]
    PartialLabeling(usize),
    #[error("set of size {0} is too large to split (limit 64)")]
    SplitTooLarge(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-check failed: {0}")]
    Audit(String),
}

/// Levels of finite vertex sets over an ambient tournament. Construction does
/// not check the family axioms; `validate_family` does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    ambient: Arc<Tournament>,
    levels: Vec<Vec<VertexSet>>,
}

/// Output of `validate_family`: `parents[n][i]` is the index at level `n-1`
/// of the predecessor of set `i` at level `n` (`None` at level 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyReport {
    pub depth: usize,
    pub parents: Vec<Vec<Option<usize>>>,
}

impl Family {
    pub fn new(ambient: Arc<Tournament>, levels: Vec<Vec<VertexSet>>) -> Self {
        Family { ambient, levels }
    }

    /// `S(n) = {[0,n]}` for `n < depth`.
    pub fn trivial(ambient: Arc<Tournament>, depth: usize) -> Self {
        let levels = (0..depth).map(|n| vec![(0..=n).collect()]).collect();
        Family { ambient, levels }
    }

    pub fn ambient(&self) -> &Arc<Tournament> {
        &self.ambient
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Vec<VertexSet>] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &[VertexSet] {
        &self.levels[n]
    }

    /// First `d` levels.
    pub fn truncated(&self, d: usize) -> Family {
        Family {
            ambient: self.ambient.clone(),
            levels: self.levels[..d.min(self.depth())].to_vec(),
        }
    }

    /// `max(∪S(n))`, or None when the level's union is empty.
    pub fn level_max(&self, n: usize) -> Option<usize> {
        self.levels[n].iter().filter_map(|e| e.last().copied()).max()
    }

    pub fn union(&self) -> VertexSet {
        self.levels.iter().flatten().flatten().copied().collect()
    }

    pub fn index_of(&self, n: usize, e: &VertexSet) -> Option<usize> {
        self.levels.get(n)?.iter().position(|x| x == e)
    }

    /// Index at level `n-1` of the predecessor of `levels[n][i]`.
    pub fn predecessor(&self, n: usize, i: usize) -> Option<usize> {
        if n == 0 {
            return None;
        }
        let e = &self.levels[n][i];
        let bound = self.level_max(n - 1);
        let prev: VertexSet = e.iter().copied().filter(|&x| bound.is_some_and(|b| x <= b)).collect();
        if prev.len() == e.len() {
            return None;
        }
        self.index_of(n - 1, &prev)
    }

    /// For every set, whether it has a descendant at level `d-1`.
    pub fn survivors(&self, d: usize) -> Vec<Vec<bool>> {
        let d = d.min(self.depth());
        let mut alive: Vec<Vec<bool>> = self.levels.iter().map(|l| vec![false; l.len()]).collect();
        if d == 0 {
            return alive;
        }
        for flag in alive[d - 1].iter_mut() {
            *flag = true;
        }
        for n in (1..d).rev() {
            for i in 0..self.levels[n].len() {
                if alive[n][i] {
                    if let Some(p) = self.predecessor(n, i) {
                        alive[n - 1][p] = true;
                    }
                }
            }
        }
        alive
    }

    pub fn survives(&self, n: usize, i: usize, d: usize) -> bool {
        n < d && d <= self.depth() && self.survivors(d)[n][i]
    }
}

/// Checks the family axioms on the first `d` levels.
pub fn validate_family(s: &Family, d: usize) -> Result<FamilyReport, FamilyError> {
    if s.depth() < d {
        return Err(FamilyError::Shallow { have: s.depth(), need: d });
    }
    let n_amb = s.ambient.n();
    let mut parents = Vec::with_capacity(d);
    for level in 0..d {
        let sets = &s.levels[level];
        if sets.is_empty() {
            return Err(FamilyError::EmptyLevel(level));
        }
        let mut row = Vec::with_capacity(sets.len());
        for (i, e) in sets.iter().enumerate() {
            if e.iter().any(|&x| x >= n_amb) {
                return Err(FamilyError::OutOfRange { level, set: e.clone() });
            }
            if sets[..i].contains(e) {
                return Err(FamilyError::Duplicate { level, set: e.clone() });
            }
            if level == 0 {
                row.push(None);
            } else {
                match s.predecessor(level, i) {
                    Some(p) => row.push(Some(p)),
                    None => return Err(FamilyError::NoPredecessor { level, set: e.clone() }),
                }
            }
        }
        parents.push(row);
    }
    Ok(FamilyReport { depth: d, parents })
}

/// `(E+S)(n) = {E ∪ E′ : E′ ∈ S(n)}`.
pub fn prepend(e: &VertexSet, s: &Family) -> Result<Family, FamilyError> {
    if let Some(&x) = e.iter().find(|&&x| x >= s.ambient.n()) {
        return Err(FamilyError::OutOfRange {
            level: 0,
            set: VertexSet::from([x]),
        });
    }
    if let Some(&top) = e.last() {
        if s.levels.first().is_some_and(|l0| l0.iter().any(|f| f.first().is_some_and(|&m| m <= top))) {
            return Err(FamilyError::NotBelow(e.clone()));
        }
    }
    let levels = s
        .levels
        .iter()
        .map(|l| l.iter().map(|f| f.union(e).copied().collect()).collect())
        .collect();
    Ok(Family::new(s.ambient.clone(), levels))
}

/// `(S↾E)(m) = {E′ : E′∩E=∅, E′∪E ∈ S(n+m+1), E′ > max S(n)}`, stopping at the
/// first empty level.
pub fn restrict(s: &Family, n: usize, e: &VertexSet) -> Result<Family, FamilyError> {
    if s.index_of(n, e).is_none() {
        return Err(FamilyError::NotMember { level: n, set: e.clone() });
    }
    let bound = s.level_max(n);
    let mut levels = Vec::new();
    for m in n + 1..s.depth() {
        let lvl: Vec<VertexSet> = s.levels[m]
            .iter()
            .filter(|x| e.is_subset(x))
            .map(|x| x.difference(e).copied().collect::<VertexSet>())
            .filter(|rest| rest.iter().all(|&y| bound.is_none_or(|b| y > b)))
            .collect();
        if lvl.is_empty() {
            break;
        }
        levels.push(lvl);
    }
    Ok(Family::new(s.ambient.clone(), levels))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeqReport {
    pub holds: bool,
    /// Least witnessing level of `S` for each checked level of `S′`.
    pub witnesses: Vec<usize>,
    pub failing_level: Option<usize>,
}

/// `S′ ≤ S` on the first `d` levels of `S′`.
pub fn family_leq(s_prime: &Family, s: &Family, d: usize) -> LeqReport {
    let d = d.min(s_prime.depth());
    let mut witnesses = Vec::with_capacity(d);
    for n in 0..d {
        let found = (0..s.depth()).find(|&m| {
            s_prime.levels[n]
                .iter()
                .all(|e1| s.levels[m].iter().any(|e| e1.is_subset(e)))
        });
        match found {
            Some(m) => witnesses.push(m),
            None => {
                return LeqReport {
                    holds: false,
                    witnesses,
                    failing_level: Some(n),
                }
            }
        }
    }
    LeqReport {
        holds: true,
        witnesses,
        failing_level: None,
    }
}
