use crate::instances::Poset;
use crate::reductions::{SolutionKind, SolutionSet};

fn strictly_below(m: &Poset, x: usize, y: usize) -> bool {
    x != y && m.leq(x, y)
}

/// Length of the longest chain inside `w`.
fn longest_chain_len(m: &Poset, w: &[usize]) -> usize {
    // Sorting by down-set size is a linear extension.
    let mut order = w.to_vec();
    order.sort_by_key(|&x| w.iter().filter(|&&y| m.leq(y, x)).count());
    let mut best = vec![0usize; order.len()];
    let mut top = 0;
    for (i, &y) in order.iter().enumerate() {
        let mut b = 1;
        for (j, &x) in order[..i].iter().enumerate() {
            if strictly_below(m, x, y) {
                b = b.max(best[j] + 1);
            }
        }
        best[i] = b;
        top = top.max(b);
    }
    top
}

/// Largest antichain inside `w`, via Dilworth: |w| minus a maximum matching in
/// the strict-order bipartite graph.
fn width(m: &Poset, w: &[usize]) -> usize {
    let k = w.len();
    let succ: Vec<Vec<usize>> = (0..k)
        .map(|i| (0..k).filter(|&j| strictly_below(m, w[i], w[j])).collect())
        .collect();
    let mut match_right: Vec<Option<usize>> = vec![None; k];
    fn augment(u: usize, succ: &[Vec<usize>], seen: &mut [bool], match_right: &mut [Option<usize>]) -> bool {
        for &v in &succ[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if match_right[v].is_none_or(|u2| augment(u2, succ, seen, match_right)) {
                match_right[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut matching = 0;
    for u in 0..k {
        let mut seen = vec![false; k];
        if augment(u, &succ, &mut seen, &mut match_right) {
            matching += 1;
        }
    }
    k - matching
}

/// Greedy lexicographically least set of size `target` where `fits(chosen, v)`
/// says `v` may join and `capacity(chosen ∪ {v}, v)` bounds how many more
/// elements above index `v` can follow.
fn lex_least(
    n: usize,
    target: usize,
    fits: impl Fn(&[usize], usize) -> bool,
    capacity: impl Fn(&[usize], usize) -> usize,
) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut start = 0;
    while chosen.len() < target {
        let need = target - chosen.len() - 1;
        let v = (start..n)
            .find(|&v| {
                if !fits(&chosen, v) {
                    return false;
                }
                let mut with = chosen.clone();
                with.push(v);
                need == 0 || capacity(&with, v) >= need
            })
            .expect("target is attainable");
        chosen.push(v);
        start = v + 1;
    }
    chosen
}

/// Longest chain and largest antichain, each lexicographically least.
pub fn poset_extremes(m: &Poset) -> (SolutionSet, SolutionSet) {
    let n = m.n();
    let all: Vec<usize> = (0..n).collect();

    let chain_len = longest_chain_len(m, &all);
    let chain = lex_least(
        n,
        chain_len,
        |c, v| c.iter().all(|&u| m.comparable(u, v)),
        |c, v| {
            let w: Vec<usize> = (v + 1..n).filter(|&u| c.iter().all(|&x| m.comparable(x, u))).collect();
            longest_chain_len(m, &w)
        },
    );

    let anti_len = width(m, &all);
    let anti = lex_least(
        n,
        anti_len,
        |c, v| c.iter().all(|&u| !m.comparable(u, v)),
        |c, v| {
            let w: Vec<usize> = (v + 1..n).filter(|&u| c.iter().all(|&x| !m.comparable(x, u))).collect();
            width(m, &w)
        },
    );

    (
        SolutionSet::new(SolutionKind::Chain, chain),
        SolutionSet::new(SolutionKind::Antichain, anti),
    )
}
