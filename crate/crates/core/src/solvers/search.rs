//! Bitmask branch-and-bound over at most 128 vertices.

use crate::instances::{Coloring, Tournament, VertexSet};

use super::SolverError;

pub const MASK_LIMIT: usize = 128;

pub(crate) fn check_size(n: usize) -> Result<(), SolverError> {
    if n > MASK_LIMIT {
        Err(SolverError::TooLarge { n, limit: MASK_LIMIT })
    } else {
        Ok(())
    }
}

pub(crate) fn mask_of<'a>(vs: impl IntoIterator<Item = &'a usize>) -> u128 {
    vs.into_iter().fold(0u128, |m, &v| m | 1u128 << v)
}

pub(crate) fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

pub(crate) fn set_of(m: u128) -> VertexSet {
    bits(m).collect()
}

fn full(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

fn above(v: usize) -> u128 {
    if v >= 127 {
        0
    } else {
        u128::MAX << (v + 1)
    }
}

/// Lexicographically least maximum clique of the graph with adjacency masks
/// `adj`, searched among `cands`.
pub(crate) fn max_clique(adj: &[u128], cands: u128) -> u128 {
    fn go(adj: &[u128], cur: u128, size: u32, cands: u128, best: &mut (u32, u128)) {
        if size > best.0 {
            *best = (size, cur);
        }
        let mut rest = cands;
        while rest != 0 {
            if size + rest.count_ones() <= best.0 {
                return;
            }
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            go(adj, cur | 1 << v, size + 1, rest & adj[v], best);
        }
    }
    let mut best = (0, 0);
    go(adj, 0, 0, cands, &mut best);
    best.1
}

pub(crate) struct TournamentMasks {
    pub beats: Vec<u128>,
}

impl TournamentMasks {
    pub fn new(t: &Tournament) -> Self {
        let n = t.n();
        let beats = (0..n)
            .map(|u| (0..n).filter(|&v| t.beats(u, v)).fold(0u128, |m, v| m | 1 << v))
            .collect();
        TournamentMasks { beats }
    }

    /// Whether `s ∪ {v}` stays transitive, assuming `s` is.
    pub fn compatible(&self, s: u128, v: usize) -> bool {
        let out = self.beats[v] & s;
        let inn = s & !self.beats[v] & !(1u128 << v);
        bits(out).all(|w| self.beats[w] & inn == 0)
    }

    /// Lexicographically least maximum set `A ⊆ cands` with `base ∪ A`
    /// transitive, stopping as soon as `|A| = cap`.
    pub fn max_extension(&self, base: u128, cands: u128, cap: usize) -> u128 {
        let cap = cap as u32;
        fn go(tm: &TournamentMasks, cur: u128, size: u32, cands: u128, cap: u32, best: &mut (u32, u128)) -> bool {
            if size > best.0 {
                *best = (size, cur);
                if size >= cap {
                    return true;
                }
            }
            let mut rest = cands;
            while rest != 0 {
                if size + rest.count_ones() <= best.0 {
                    return false;
                }
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let next = cur | 1 << v;
                let mut narrowed = 0u128;
                for c in bits(rest) {
                    if tm.compatible(next, c) {
                        narrowed |= 1 << c;
                    }
                }
                if go(tm, next, size + 1, narrowed, cap, best) {
                    return true;
                }
            }
            false
        }
        let mut live = 0u128;
        for c in bits(cands & !base) {
            if self.compatible(base, c) {
                live |= 1 << c;
            }
        }
        let mut best = (0, base);
        if cap > 0 {
            go(self, base, 0, live, cap, &mut best);
        }
        best.1 & !base
    }
}

/// Maximum homogeneous set: lexicographically least over both colors, color 0
/// when the same set serves both.
pub(crate) fn max_homogeneous_mask(c: &Coloring) -> (u128, u8) {
    let n = c.n();
    let mut best: Option<(u128, u8)> = None;
    for color in 0..2u8 {
        let adj: Vec<u128> = (0..n)
            .map(|u| {
                (0..n)
                    .filter(|&v| v != u && c.color(u, v) == color)
                    .fold(0u128, |m, v| m | 1 << v)
            })
            .collect();
        let adj: Vec<u128> = adj.iter().enumerate().map(|(u, &m)| m & above(u)).collect();
        let m = max_clique(&adj, full(n));
        best = match best {
            None => Some((m, color)),
            Some((b, bc)) => {
                if better(m, b) {
                    Some((m, color))
                } else {
                    Some((b, bc))
                }
            }
        };
    }
    best.unwrap()
}

/// Larger, or equal size and lexicographically smaller.
pub(crate) fn better(a: u128, b: u128) -> bool {
    match a.count_ones().cmp(&b.count_ones()) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => {
            let d = a ^ b;
            d != 0 && a & (d & d.wrapping_neg()) != 0
        }
    }
}

pub(crate) fn max_transitive_mask(t: &Tournament) -> u128 {
    let tm = TournamentMasks::new(t);
    tm.max_extension(0, full(t.n()), t.n())
}

pub(crate) fn all_mask(n: usize) -> u128 {
    full(n)
}
