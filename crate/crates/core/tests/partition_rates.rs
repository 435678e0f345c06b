//! How often the best partition of a transitive block keeps both halves
//! extendible, and how often inside the original interval, measured on
//! seeded tournaments. The rates are printed rather
//! than asserted; the reported depths and optimality are checked exactly.

use rmwb::instances::{random_instance, Instance, Kind, Tournament, VertexSet};
use rmwb::solvers::{extendibility_depth, minimal_intervals, partition_extendible};

fn tournament(n: usize, seed: u64) -> Tournament {
    match random_instance(Kind::Tournament, n, seed).unwrap() {
        Instance::Tournament(t) => t,
        _ => unreachable!(),
    }
}

fn with(f: &VertexSet, xs: &VertexSet) -> VertexSet {
    f.union(xs).copied().collect()
}

#[test]
fn partition_success_rates() {
    let k = 2;
    for n in [12usize, 16, 20] {
        let (mut tried, mut deep, mut inside) = (0, 0, 0);
        for seed in 0..60u64 {
            let t = tournament(n, seed);
            let f = VertexSet::from([0]);
            let ivs = minimal_intervals(&t, &f).unwrap();
            let iv = ivs.iter().max_by_key(|iv| iv.extenders.len()).unwrap();
            let mut j = VertexSet::new();
            for &x in &iv.extenders {
                let mut g: Vec<usize> = with(&f, &j).into_iter().collect();
                g.push(x);
                if j.len() < 8 && t.is_transitive(&g) {
                    j.insert(x);
                }
            }
            if j.len() < 2 {
                continue;
            }
            tried += 1;
            let c = partition_extendible(&t, &f, &iv.spec, &j, k).unwrap();
            assert!(c.p.is_disjoint(&c.q) && with(&c.p, &c.q) == j);
            assert_eq!(c.depth_p, extendibility_depth(&t, &with(&f, &c.p), k).unwrap());
            assert_eq!(c.depth_q, extendibility_depth(&t, &with(&f, &c.q), k).unwrap());
            let jv: Vec<usize> = j.iter().copied().collect();
            let best = (0u32..1 << jv.len())
                .map(|m| {
                    let p: VertexSet = (0..jv.len()).filter(|b| m >> b & 1 == 1).map(|b| jv[b]).collect();
                    let q: VertexSet = j.difference(&p).copied().collect();
                    let dp = extendibility_depth(&t, &with(&f, &p), k).unwrap();
                    let dq = extendibility_depth(&t, &with(&f, &q), k).unwrap();
                    dp.min(dq)
                })
                .max()
                .unwrap();
            assert_eq!(c.depth_p.min(c.depth_q), best, "n={n} seed={seed}");
            assert!(c.interval_p.is_none() || c.depth_p > 0);
            assert!(c.interval_q.is_none() || c.depth_q > 0);
            if best >= 1 {
                deep += 1;
                // Depth counts extenders anywhere; the interval must lie inside I.
                if c.interval_p.is_some() && c.interval_q.is_some() {
                    inside += 1;
                }
            }
        }
        println!("n={n}: {deep}/{tried} blocks keep both halves extendible, {inside} of them inside the interval");
        assert!(tried > 0);
    }
}
