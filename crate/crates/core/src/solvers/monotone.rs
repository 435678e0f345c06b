use crate::instances::LinearOrder;
use crate::reductions::{SolutionKind, SolutionSet};

/// Indices of the lexicographically least longest strictly increasing
/// subsequence of `values`.
pub fn lex_least_lis(values: &[usize]) -> Vec<usize> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    // len_from[i]: longest increasing run starting at i. Scanning right to
    // left, a run starting at i is a decreasing run ending at i, so patience
    // sorting on the negated values gives it in O(n log n).
    let mut len_from = vec![0usize; n];
    let mut tails: Vec<usize> = Vec::new();
    let top = *values.iter().max().unwrap();
    for i in (0..n).rev() {
        let u = top - values[i];
        let k = tails.partition_point(|&t| t < u);
        if k == tails.len() {
            tails.push(u);
        } else {
            tails[k] = u;
        }
        len_from[i] = k + 1;
    }
    let best = tails.len();
    let mut out = Vec::with_capacity(best);
    let mut need = best;
    let mut j = 0;
    while need > 0 {
        while !(len_from[j] == need && out.last().is_none_or(|&p: &usize| values[p] < values[j])) {
            j += 1;
        }
        out.push(j);
        need -= 1;
        j += 1;
    }
    out
}

/// Longest ℕ-increasing subsequences that ascend resp. descend in `≺`.
pub fn longest_monotone(l: &LinearOrder) -> (SolutionSet, SolutionSet) {
    let n = l.n();
    let asc = lex_least_lis(l.ranks());
    let flipped: Vec<usize> = l.ranks().iter().map(|&r| n - 1 - r).collect();
    let desc = lex_least_lis(&flipped);
    (
        SolutionSet::new(SolutionKind::Ascending, asc),
        SolutionSet::new(SolutionKind::Descending, desc),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive oracle: lexicographically least longest increasing run.
    fn brute_lis(values: &[usize]) -> Vec<usize> {
        let n = values.len();
        let mut best: Vec<usize> = Vec::new();
        for mask in 0u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if idx.windows(2).all(|w| values[w[0]] < values[w[1]])
                && (idx.len() > best.len() || (idx.len() == best.len() && idx < best))
            {
                best = idx;
            }
        }
        best
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = crate::prng::XorShift64Star::new(5);
        for _ in 0..300 {
            let n = rng.below(10) + 1;
            let v: Vec<usize> = (0..n).map(|_| rng.below(6)).collect();
            assert_eq!(lex_least_lis(&v), brute_lis(&v), "{v:?}");
        }
    }

    #[test]
    fn identity_and_reversed() {
        let (a, d) = longest_monotone(&LinearOrder::identity(5));
        assert_eq!((a.len(), d.len()), (5, 1));
        let (a, d) = longest_monotone(&LinearOrder::reversed(5));
        assert_eq!((a.len(), d.len()), (1, 5));
    }

    #[test]
    fn small_rank_vector() {
        let (a, d) = longest_monotone(&LinearOrder::from_ranks(vec![2, 0, 3, 1]).unwrap());
        assert_eq!((a.len(), d.len()), (2, 2));
    }
}
