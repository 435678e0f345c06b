use std::sync::Arc;

use super::Family;
use crate::instances::{random_instance, Instance, Kind, VertexSet};
use crate::prng::XorShift64Star;

const MAX_WIDTH: usize = 8;

/// Random family over a random tournament on `n` vertices.
///
/// Each level adds elements from a fresh block of `max(1, n/(depth+1))`
/// vertices above the previous level's maximum. Every set gets between 0 and
/// `branch` children; when a whole level would die out the first set gets one
/// child, so all `depth` levels are populated while side branches may stop.
pub fn random_family(n: usize, depth: usize, branch: usize, seed: u64) -> Family {
    let t = match random_instance(Kind::Tournament, n.max(1), seed).expect("n > 0") {
        Instance::Tournament(t) => t,
        _ => unreachable!(),
    };
    let mut rng = XorShift64Star::new(seed ^ 0xFA41_11E5);
    let span = (n / (depth + 1)).clamp(1, 16);
    let branch = branch.max(1);
    let block = |rng: &mut XorShift64Star, base: usize| -> VertexSet {
        let width = span.min(n.saturating_sub(base));
        let mask = 1 + rng.below((1 << width) - 1);
        (0..width).filter(|i| mask >> i & 1 == 1).map(|i| base + i).collect()
    };
    let mut levels: Vec<Vec<VertexSet>> = Vec::with_capacity(depth);
    for lvl in 0..depth {
        let mut next: Vec<VertexSet> = Vec::new();
        let push = |next: &mut Vec<VertexSet>, e: VertexSet| {
            if next.len() < MAX_WIDTH && !next.contains(&e) {
                next.push(e);
            }
        };
        if lvl == 0 {
            for _ in 0..1 + rng.below(branch) {
                let e = block(&mut rng, 0);
                push(&mut next, e);
            }
        } else {
            let prev = &levels[lvl - 1];
            let base = prev.iter().filter_map(|e| e.last()).max().map_or(0, |m| m + 1);
            if base >= n {
                break;
            }
            for e in prev {
                for _ in 0..rng.below(branch + 1) {
                    let child = e.union(&block(&mut rng, base)).copied().collect();
                    push(&mut next, child);
                }
            }
            if next.is_empty() {
                let child = prev[0].union(&block(&mut rng, base)).copied().collect();
                next.push(child);
            }
        }
        levels.push(next);
    }
    Family::new(Arc::new(t), levels)
}
