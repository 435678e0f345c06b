//! Finite instances: colorings, tournaments, posets and linear orders.

mod format;
mod random;
mod stability;

use std::collections::BTreeSet;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub use format::{content_lines, parse_instance, serialize_instance};
pub use random::random_instance;
pub use stability::{
    default_tail_start, extract_monotone_from_cut, stability_report, stableish_classify,
    CutMethod, CutMode, MonotoneSide, StabilityReport, StableishReport,
};

pub type VertexSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("instance needs at least one vertex")]
    Empty,
    #[error("poset axiom violated: {0}")]
    Axiom(String),
    #[error("rank vector is not a permutation of [0,{0})")]
    NotPermutation(usize),
    #[error("tail start {tau} exceeds n = {n}")]
    TailStart { tau: usize, n: usize },
    #[error("cut is not downward closed: {below} precedes {member} but is outside the cut")]
    CutNotDownward { member: usize, below: usize },
    #[error("vertex {0} out of range")]
    VertexRange(usize),
    #[error("requested side of the cut is empty")]
    EmptySide,
    #[error("stability report is not defined for {0}")]
    KindMismatch(Kind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Tournament,
    Coloring,
    Poset,
    LinOrder,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Tournament => "tournament",
            Kind::Coloring => "coloring",
            Kind::Poset => "poset",
            Kind::LinOrder => "linorder",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        match s {
            "tournament" => Some(Kind::Tournament),
            "coloring" => Some(Kind::Coloring),
            "poset" => Some(Kind::Poset),
            "linorder" => Some(Kind::LinOrder),
            _ => None,
        }
    }

    pub const ALL: [Kind; 4] = [Kind::Tournament, Kind::Coloring, Kind::Poset, Kind::LinOrder];
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Index of pair (i, j), i < j, in row-major order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// One bit per unordered pair.
#[derive(Clone, PartialEq, Eq, Hash)]
struct PairBits {
    n: usize,
    bits: FixedBitSet,
}

impl PairBits {
    fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = FixedBitSet::with_capacity(pair_count(n));
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                bits.set(k, f(i, j));
                k += 1;
            }
        }
        PairBits { n, bits }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.bits[pair_index(self.n, a, b)]
    }
}

/// A total 2-coloring of the pairs of `[0,n)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    pairs: PairBits,
}

impl Coloring {
    /// `f(i, j)` with `i < j` gives the color of the pair.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        Coloring {
            pairs: PairBits::from_fn(n, |i, j| f(i, j) != 0),
        }
    }

    /// Colors listed in row-major pair order.
    pub fn from_pair_bits(n: usize, bits: &[bool]) -> Self {
        assert_eq!(bits.len(), pair_count(n));
        let mut k = 0;
        Coloring::from_fn(n, |_, _| {
            k += 1;
            bits[k - 1] as u8
        })
    }

    pub fn constant(n: usize, color: u8) -> Self {
        Coloring::from_fn(n, |_, _| color)
    }

    pub fn n(&self) -> usize {
        self.pairs.n
    }

    pub fn color(&self, i: usize, j: usize) -> u8 {
        assert!(i != j, "color of a loop");
        self.pairs.get(i, j) as u8
    }

    pub fn is_homogeneous(&self, set: &[usize], color: u8) -> bool {
        set.iter()
            .enumerate()
            .all(|(k, &a)| set[k + 1..].iter().all(|&b| self.color(a, b) == color))
    }
}

impl fmt::Debug for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coloring(n={}, ", self.n())?;
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                write!(f, "{}", self.color(i, j))?;
            }
        }
        write!(f, ")")
    }
}

/// A tournament on `[0,n)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tournament {
    pairs: PairBits,
}

impl Tournament {
    /// `f(i, j)` with `i < j` returns true iff `T(i,j)`.
    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> bool) -> Self {
        Tournament {
            pairs: PairBits::from_fn(n, f),
        }
    }

    /// The tournament in which the smaller vertex always wins.
    pub fn lower_wins(n: usize) -> Self {
        Tournament::from_fn(n, |_, _| true)
    }

    /// The tournament in which the larger vertex always wins.
    pub fn upper_wins(n: usize) -> Self {
        Tournament::from_fn(n, |_, _| false)
    }

    pub fn n(&self) -> usize {
        self.pairs.n
    }

    /// `T(u,v)`. False for `u == v`.
    pub fn beats(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        let bit = self.pairs.get(u, v);
        if u < v {
            bit
        } else {
            !bit
        }
    }

    /// Transitive iff no 3-cycle among the vertices.
    pub fn is_transitive(&self, set: &[usize]) -> bool {
        self.linear_order_of(set).is_some()
    }

    /// Sort a transitive set by the beats relation (winner first), or None if
    /// the set contains a cycle.
    pub fn linear_order_of(&self, set: &[usize]) -> Option<Vec<usize>> {
        // In a transitive tournament the element beating k others sits at
        // position |set|-1-k; distinct scores characterize transitivity.
        let m = set.len();
        let mut slots: Vec<Option<usize>> = vec![None; m];
        for &u in set {
            let wins = set.iter().filter(|&&v| self.beats(u, v)).count();
            let pos = m - 1 - wins;
            if slots[pos].is_some() {
                return None;
            }
            slots[pos] = Some(u);
        }
        Some(slots.into_iter().map(|s| s.unwrap()).collect())
    }
}

impl fmt::Debug for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tournament(n={}, ", self.n())?;
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                write!(f, "{}", self.beats(i, j) as u8)?;
            }
        }
        write!(f, ")")
    }
}

/// A finite partial order, stored as its full reflexive relation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poset {
    n: usize,
    leq: FixedBitSet,
    order_respecting: bool,
}

impl Poset {
    /// Builds and checks the axioms. `f(i, j)` is `i ⪯ j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self, InstanceError> {
        let mut leq = FixedBitSet::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                leq.set(i * n + j, f(i, j));
            }
        }
        let p = Poset {
            n,
            leq,
            order_respecting: false,
        };
        p.check_axioms().map_err(|(_, msg)| InstanceError::Axiom(msg))?;
        Ok(p.with_flag())
    }

    /// Reflexive transitive closure of the given strict edges.
    pub fn closure_of(n: usize, edges: &[(usize, usize)]) -> Result<Self, InstanceError> {
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(InstanceError::VertexRange(a.max(b)));
            }
            rel[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if rel[i][k] {
                    for j in 0..n {
                        if rel[k][j] {
                            rel[i][j] = true;
                        }
                    }
                }
            }
        }
        Poset::from_fn(n, |i, j| rel[i][j])
    }

    pub fn chain(n: usize) -> Self {
        Poset::from_fn(n, |i, j| i <= j).expect("chain")
    }

    pub fn antichain(n: usize) -> Self {
        Poset::from_fn(n, |i, j| i == j).expect("antichain")
    }

    fn with_flag(mut self) -> Self {
        let n = self.n;
        self.order_respecting = (0..n).all(|i| (0..i).all(|j| !self.leq(i, j)));
        self
    }

    /// Returns the offending row and a message.
    pub(crate) fn check_axioms(&self) -> Result<(), (usize, String)> {
        let n = self.n;
        for i in 0..n {
            if !self.leq(i, i) {
                return Err((i, format!("{i} is not related to itself")));
            }
            for j in 0..n {
                if i != j && self.leq(i, j) && self.leq(j, i) {
                    return Err((i, format!("{i} and {j} are mutually related")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !self.leq(i, j) {
                    continue;
                }
                for k in 0..n {
                    if self.leq(j, k) && !self.leq(i, k) {
                        return Err((i, format!("{i}⪯{j} and {j}⪯{k} but not {i}⪯{k}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.n + j]
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) || self.leq(j, i)
    }

    pub fn order_respecting(&self) -> bool {
        self.order_respecting
    }

    pub fn is_chain(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(k, &a)| set[k + 1..].iter().all(|&b| self.comparable(a, b)))
    }

    pub fn is_antichain(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(k, &a)| set[k + 1..].iter().all(|&b| !self.comparable(a, b)))
    }

    pub fn down_closure(&self, x: usize) -> VertexSet {
        (0..self.n).filter(|&y| self.leq(y, x)).collect()
    }

    pub fn up_closure(&self, x: usize) -> VertexSet {
        (0..self.n).filter(|&y| self.leq(x, y)).collect()
    }
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poset(n={}, <", self.n)?;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.leq(i, j) {
                    write!(f, " {i}<{j}")?;
                }
            }
        }
        write!(f, ")")
    }
}

/// A linear order on `[0,n)`: `rank[v]` is the position of `v`, rank 0 least.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearOrder {
    rank: Vec<usize>,
    listing: Vec<usize>,
}

impl LinearOrder {
    pub fn from_ranks(rank: Vec<usize>) -> Result<Self, InstanceError> {
        let n = rank.len();
        let mut listing = vec![usize::MAX; n];
        for (v, &r) in rank.iter().enumerate() {
            if r >= n || listing[r] != usize::MAX {
                return Err(InstanceError::NotPermutation(n));
            }
            listing[r] = v;
        }
        Ok(LinearOrder { rank, listing })
    }

    /// Vertices from least to greatest.
    pub fn from_listing(listing: Vec<usize>) -> Result<Self, InstanceError> {
        let n = listing.len();
        let mut rank = vec![usize::MAX; n];
        for (r, &v) in listing.iter().enumerate() {
            if v >= n || rank[v] != usize::MAX {
                return Err(InstanceError::NotPermutation(n));
            }
            rank[v] = r;
        }
        Ok(LinearOrder { rank, listing })
    }

    pub fn identity(n: usize) -> Self {
        LinearOrder::from_ranks((0..n).collect()).unwrap()
    }

    pub fn reversed(n: usize) -> Self {
        LinearOrder::from_ranks((0..n).map(|i| n - 1 - i).collect()).unwrap()
    }

    pub fn n(&self) -> usize {
        self.rank.len()
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    pub fn listing(&self) -> &[usize] {
        &self.listing
    }

    /// `u ≺ v`.
    pub fn precedes(&self, u: usize, v: usize) -> bool {
        self.rank[u] < self.rank[v]
    }

    pub fn is_ascending(&self, seq: &[usize]) -> bool {
        seq.windows(2).all(|w| self.precedes(w[0], w[1]))
    }

    pub fn is_descending(&self, seq: &[usize]) -> bool {
        seq.windows(2).all(|w| self.precedes(w[1], w[0]))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Instance {
    Tournament(Tournament),
    Coloring(Coloring),
    Poset(Poset),
    LinOrder(LinearOrder),
}

impl Instance {
    pub fn kind(&self) -> Kind {
        match self {
            Instance::Tournament(_) => Kind::Tournament,
            Instance::Coloring(_) => Kind::Coloring,
            Instance::Poset(_) => Kind::Poset,
            Instance::LinOrder(_) => Kind::LinOrder,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Instance::Tournament(t) => t.n(),
            Instance::Coloring(c) => c.n(),
            Instance::Poset(p) => p.n(),
            Instance::LinOrder(l) => l.n(),
        }
    }
}

impl From<Tournament> for Instance {
    fn from(t: Tournament) -> Self {
        Instance::Tournament(t)
    }
}

impl From<Coloring> for Instance {
    fn from(c: Coloring) -> Self {
        Instance::Coloring(c)
    }
}

impl From<Poset> for Instance {
    fn from(p: Poset) -> Self {
        Instance::Poset(p)
    }
}

impl From<LinearOrder> for Instance {
    fn from(l: LinearOrder) -> Self {
        Instance::LinOrder(l)
    }
}
