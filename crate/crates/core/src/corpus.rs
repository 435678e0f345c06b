//! Seeded generators for the engineered test corpora: settling cases,
//! ground conditions, and functional tables that fire twice.

use std::sync::Arc;

use crate::families::{random_family, Family};
use crate::forcing::{
    Builtin, Clause, Flavor, FunctionalEntry, FunctionalTable, GroundColoringCondition, GroundCondition, GroundKind,
    GroundPosetCondition, Object, RequirementTable,
};
use crate::forcing::EmCondition;
use crate::instances::{random_instance, Coloring, Instance, Kind, Tournament, VertexSet};
use crate::prng::XorShift64Star;
use crate::solvers::IntervalSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SettleExpectation {
    /// Not essential at the bounds; the result must settle.
    NonEssential,
    /// Essential and dense; the result adds a nonempty accepted `F′`.
    EssentialDense,
    /// Essential but no level is dense over the universe.
    DensityViolation,
}

#[derive(Debug, Clone)]
pub struct SettleCase {
    pub name: String,
    pub condition: EmCondition,
    pub table: RequirementTable,
    pub expect: SettleExpectation,
}

/// Two disjoint chains over `lower_wins`: evens from 0 and odds from 1.
pub fn two_branch_family(depth: usize) -> Family {
    let t = Arc::new(Tournament::lower_wins(2 * depth + 2));
    let levels = (0..depth)
        .map(|n| vec![(0..=n).map(|i| 2 * i).collect(), (0..=n).map(|i| 2 * i + 1).collect()])
        .collect();
    Family::new(t, levels)
}

fn tournament(n: usize, seed: u64) -> Arc<Tournament> {
    match random_instance(Kind::Tournament, n, seed).expect("n > 0") {
        Instance::Tournament(t) => Arc::new(t),
        _ => unreachable!(),
    }
}

fn bare(family: Family) -> EmCondition {
    EmCondition::new(VertexSet::new(), IntervalSpec::FULL, family)
}

/// `count` settling cases cycling through the three expectations.
pub fn settle_corpus(count: usize, seed: u64) -> Vec<SettleCase> {
    let mut rng = XorShift64Star::new(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let s = rng.next_u64();
        let case = match i % 5 {
            0 => SettleCase {
                name: format!("empty-table-{i}"),
                condition: bare(random_family(18 + rng.below(9), 8, 2, s)),
                table: RequirementTable::empty(Flavor::Em).with_a(rng.below(4)),
                expect: SettleExpectation::NonEssential,
            },
            1 => {
                let depth = 6 + rng.below(3);
                let poisoned = 2 * rng.below(depth) + 1;
                SettleCase {
                    name: format!("poisoned-branch-{i}-v{poisoned}"),
                    condition: bare(two_branch_family(depth)),
                    table: RequirementTable::empty(Flavor::Em).with_a(0).with_entry(
                        Object::Set(VertexSet::from([poisoned])),
                        0,
                        2 + rng.below(6),
                    ),
                    expect: SettleExpectation::NonEssential,
                }
            }
            2 => {
                let mut table = RequirementTable::total(Flavor::Em).with_a(rng.below(3));
                if rng.next_bit() {
                    table.builtin = Some(Builtin::SizeAtLeast(1));
                }
                SettleCase {
                    name: format!("total-{i}"),
                    condition: bare(Family::trivial(tournament(16 + rng.below(9), s), 8)),
                    table,
                    expect: SettleExpectation::EssentialDense,
                }
            }
            3 => {
                let mut table = RequirementTable::total(Flavor::Em).with_a(0);
                if rng.next_bit() {
                    table.astar = Some(Default::default());
                } else {
                    table.bstar = Some(Default::default());
                }
                SettleCase {
                    name: format!("empty-universe-{i}"),
                    condition: bare(Family::trivial(tournament(10 + rng.below(10), s), 6)),
                    table,
                    expect: SettleExpectation::DensityViolation,
                }
            }
            _ => {
                let mut table = RequirementTable::empty(Flavor::Em).with_a(rng.below(3));
                table.builtin = Some(Builtin::SizeAtLeast(1));
                table.bstar = Some(Default::default());
                SettleCase {
                    name: format!("threshold-empty-universe-{i}"),
                    condition: bare(Family::trivial(tournament(12 + rng.below(12), s), 6 + rng.below(3))),
                    table,
                    expect: SettleExpectation::DensityViolation,
                }
            }
        };
        out.push(case);
    }
    out
}

fn random_subset(rng: &mut XorShift64Star, n: usize, bits: u32) -> Vec<usize> {
    (0..n).filter(|_| rng.one_in_pow2(bits)).collect()
}

/// A random valid ground condition on `[0,n)`: A* is the downward closure of
/// a few points and B* the upward closure of points outside it (colorings
/// take the points directly).
pub fn random_ground_condition(kind: GroundKind, n: usize, seed: u64) -> GroundCondition {
    let mut rng = XorShift64Star::new(seed ^ 0x6A0D);
    if n == 0 {
        return GroundCondition::empty(kind);
    }
    match kind {
        GroundKind::Poset => {
            let f = match random_instance(Kind::Poset, n, seed).expect("n > 0") {
                Instance::Poset(p) => p,
                _ => unreachable!(),
            };
            let mut astar = VertexSet::new();
            for x in random_subset(&mut rng, n, 2) {
                astar.extend(f.down_closure(x));
            }
            let mut bstar = VertexSet::new();
            for x in random_subset(&mut rng, n, 2) {
                if !astar.contains(&x) {
                    bstar.extend(f.up_closure(x));
                }
            }
            GroundCondition::Poset(GroundPosetCondition { f, astar, bstar })
        }
        GroundKind::Coloring => {
            let c: Coloring = match random_instance(Kind::Coloring, n, seed).expect("n > 0") {
                Instance::Coloring(c) => c,
                _ => unreachable!(),
            };
            let astar: VertexSet = random_subset(&mut rng, n, 2).into_iter().collect();
            let bstar: VertexSet =
                random_subset(&mut rng, n, 2).into_iter().filter(|x| !astar.contains(x)).collect();
            GroundCondition::Coloring(GroundColoringCondition { c, astar, bstar })
        }
    }
}

fn fresh_clauses(rng: &mut XorShift64Star, kind: GroundKind, lo: usize, hi: usize) -> Vec<Clause> {
    let mut out = Vec::new();
    for _ in 0..rng.below(4) {
        let i = lo + rng.below(hi - lo);
        let j = lo + rng.below(hi - lo);
        if i == j {
            continue;
        }
        let c = match kind {
            // Positive edges go up; negative ones go down and hold in every
            // order-respecting poset.
            GroundKind::Poset if rng.next_bit() => Clause { i: i.min(j), j: i.max(j), v: 1 },
            GroundKind::Poset => Clause { i: i.max(j), j: i.min(j), v: 0 },
            GroundKind::Coloring => {
                let v = rng.next_bit() as u8;
                if out.iter().any(|c: &Clause| (c.i.min(c.j), c.i.max(c.j)) == (i.min(j), i.max(j)) && c.v != v) {
                    continue;
                }
                Clause { i, j, v }
            }
        };
        out.push(c);
    }
    out
}

/// A table with two satisfiable entries past the domain of `cond`, the
/// second lying entirely beyond the first, plus decoys that never fire.
/// Returns the table and the budget that suffices for both rounds.
pub fn two_shot_table(cond: &GroundCondition, seed: u64) -> (FunctionalTable, usize) {
    let mut rng = XorShift64Star::new(seed ^ 0x75A0);
    let kind = cond.kind();
    let n = cond.domain();
    let x1 = n + rng.below(4);
    let span1 = x1 + 1 + rng.below(3);
    let x2 = span1 + rng.below(4);
    let span2 = x2 + 1 + rng.below(3);
    let first = FunctionalEntry { x: x1, clauses: fresh_clauses(&mut rng, kind, n, span1) };
    let second = FunctionalEntry { x: x2, clauses: fresh_clauses(&mut rng, kind, span1, span2) };
    let budget = (first.span() - n).max(second.span() - first.span());
    let mut entries = vec![second, first];
    if n >= 2 {
        // Below the domain: ignored by both rounds.
        entries.push(FunctionalEntry { x: rng.below(n), clauses: vec![] });
    }
    // Past the budget in either round.
    entries.push(FunctionalEntry { x: span2 + 3 * budget + 10, clauses: vec![] });
    (FunctionalTable { kind, entries }, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::{ground_diagonalize, DiagonalOutcome};

    #[test]
    fn ground_conditions_are_valid() {
        for seed in 0..100 {
            for kind in [GroundKind::Poset, GroundKind::Coloring] {
                random_ground_condition(kind, (seed % 13) as usize, seed).validate().unwrap();
            }
        }
    }

    #[test]
    fn two_shot_tables_succeed() {
        for seed in 0..100 {
            for kind in [GroundKind::Poset, GroundKind::Coloring] {
                let cond = random_ground_condition(kind, (seed % 11) as usize, seed);
                let (phi, budget) = two_shot_table(&cond, seed);
                let out = ground_diagonalize(&cond, &phi, budget).unwrap();
                assert!(matches!(out, DiagonalOutcome::Success { .. }), "seed {seed}: {out:?}");
            }
        }
    }

    #[test]
    fn settle_corpus_is_deterministic() {
        let a = settle_corpus(10, 3);
        let b = settle_corpus(10, 3);
        assert!(a.iter().zip(&b).all(|(x, y)| x.name == y.name && x.condition == y.condition));
    }
}
