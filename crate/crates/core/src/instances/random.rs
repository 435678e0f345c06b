use super::{Coloring, Instance, InstanceError, Kind, LinearOrder, Poset, Tournament};
use crate::prng::XorShift64Star;

/// Poset edges i<j are kept with probability 2^-POSET_EDGE_BITS before closure.
pub const POSET_EDGE_BITS: u32 = 2;

/// Deterministic instance of the given kind from a xorshift64* stream.
///
/// Pair instances take the top bit of successive outputs in row-major pair
/// order. Linear orders shuffle the identity ranks by Fisher–Yates with
/// multiply-high index draws. Posets close a random subset of the `<` edges.
pub fn random_instance(kind: Kind, n: usize, seed: u64) -> Result<Instance, InstanceError> {
    if n == 0 {
        return Err(InstanceError::Empty);
    }
    let mut rng = XorShift64Star::new(seed);
    Ok(match kind {
        Kind::Coloring => Instance::Coloring(Coloring::from_fn(n, |_, _| rng.next_bit() as u8)),
        Kind::Tournament => Instance::Tournament(Tournament::from_fn(n, |_, _| rng.next_bit())),
        Kind::LinOrder => {
            let mut rank: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.below(i + 1);
                rank.swap(i, j);
            }
            Instance::LinOrder(LinearOrder::from_ranks(rank).expect("permutation"))
        }
        Kind::Poset => {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.one_in_pow2(POSET_EDGE_BITS) {
                        edges.push((i, j));
                    }
                }
            }
            Instance::Poset(Poset::closure_of(n, &edges).expect("closure of < edges"))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_vertices_rejected() {
        assert_eq!(random_instance(Kind::Coloring, 0, 1), Err(InstanceError::Empty));
    }

    #[test]
    fn first_tournament_bit_is_top_bit_of_first_output() {
        // Independent oracle: the xorshift64* step written out inline.
        let mut x: u64 = 42;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        let first = x.wrapping_mul(0x2545F4914F6CDD1D);
        let t = match random_instance(Kind::Tournament, 6, 42).unwrap() {
            Instance::Tournament(t) => t,
            _ => unreachable!(),
        };
        assert_eq!(t.beats(0, 1), first >> 63 == 1);
    }

    #[test]
    fn single_vertex_coloring_has_no_pairs() {
        let c = random_instance(Kind::Coloring, 1, 77).unwrap();
        assert_eq!(c.n(), 1);
    }

    #[test]
    fn linear_orders_are_deterministic() {
        for seed in 0..20 {
            assert_eq!(
                random_instance(Kind::LinOrder, 9, seed).unwrap(),
                random_instance(Kind::LinOrder, 9, seed).unwrap()
            );
        }
    }

    #[test]
    fn posets_are_order_respecting() {
        for seed in 0..50 {
            match random_instance(Kind::Poset, 12, seed).unwrap() {
                Instance::Poset(p) => assert!(p.order_respecting()),
                _ => unreachable!(),
            }
        }
    }
}
