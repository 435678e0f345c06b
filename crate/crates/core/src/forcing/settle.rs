use std::collections::HashMap;

use crate::families::{family_split, Family};
use crate::instances::VertexSet;
use crate::solvers::{transitive_order, Endpoint, IntervalSpec};

use super::em::{
    dense_choice, em_bounded_essential, every_partition_dense, good_closure, settles_check, validate_em,
    validate_em_extension, EmCondition, EmWitness, Local,
};
use super::requirement::{requirement_member, Flavor, Object, RequirementTable, ValueSet};
use super::{EssentialBounds, ForcingError};

/// Cap on the number of nodes in the tree of left halves.
pub const TREE_NODE_LIMIT: usize = 1 << 21;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SettleCertificate {
    /// `F` is already accepted over the table's universe.
    Accepted,
    /// Essential at the bounds: `F′ ⊆ E_side` was added after splitting `E`.
    Essential {
        witnesses: Vec<EmWitness>,
        level: usize,
        e: VertexSet,
        e0: VertexSet,
        e1: VertexSet,
        side: u8,
        f_prime: VertexSet,
    },
    /// Not essential at `x`, and the input already settles at `x`.
    AlreadySettled { x: usize },
    /// Not essential at `x`; the label `label` persists above node `node` at
    /// `level`, and the output holds the matching right halves.
    PersistingLabel {
        x: usize,
        level: usize,
        label: VertexSet,
        node: usize,
        tree_sizes: Vec<usize>,
    },
    /// Not essential at `x`; no label persists, and the output holds the
    /// left halves at `levels`.
    AbandonedLabels {
        x: usize,
        levels: Vec<usize>,
        tree_sizes: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettleOutcome {
    pub condition: EmCondition,
    pub certificate: SettleCertificate,
}

/// Extends `q` to a condition settling `K`, following the essential /
/// non-essential case split at the given bounds. Every success is audited
/// with `validate_em_extension` and `settles_check` before it is returned.
pub fn settle_extend(
    q: &EmCondition,
    k: &RequirementTable,
    bounds: &EssentialBounds,
) -> Result<SettleOutcome, ForcingError> {
    if k.flavor != Flavor::Em {
        return Err(ForcingError::FlavorMismatch(k.flavor.as_str()));
    }
    validate_em(q)?;
    k.a_value(&q.f)?.ok_or_else(|| ForcingError::AUndefined(q.f.clone()))?;
    let (ua, ub) = k.universe();
    if requirement_member(k, &Object::Set(q.f.clone()), &ua, &ub)? {
        return Ok(SettleOutcome {
            condition: q.clone(),
            certificate: SettleCertificate::Accepted,
        });
    }
    let ess = em_bounded_essential(k, q, bounds)?;
    let out = if ess.essential {
        essential_branch(q, k, bounds, ess.witnesses)?
    } else {
        let x = ess.failing_x.unwrap_or(0);
        non_essential_branch(q, k, x)?
    };
    audit(q, k, &out)?;
    Ok(out)
}

fn audit(q: &EmCondition, k: &RequirementTable, out: &SettleOutcome) -> Result<(), ForcingError> {
    let x = match &out.certificate {
        SettleCertificate::AlreadySettled { x }
        | SettleCertificate::PersistingLabel { x, .. }
        | SettleCertificate::AbandonedLabels { x, .. } => *x,
        _ => 0,
    };
    let ext = validate_em_extension(&out.condition, q)?;
    if !ext.holds {
        return Err(ForcingError::Audit(format!(
            "result does not extend the input: {}",
            ext.reason.unwrap_or_default()
        )));
    }
    let fam = &out.condition.family;
    let check = settles_check(&out.condition, k, x, fam.depth())?;
    if !check.settles {
        let (level, e, f2) = check.counterexample.unwrap_or_default();
        return Err(ForcingError::Shallow(format!(
            "result does not settle at x={x}: {f2:?} inside {e:?} at level {level}; deepen the family"
        )));
    }
    Ok(())
}

fn essential_branch(
    q: &EmCondition,
    k: &RequirementTable,
    bounds: &EssentialBounds,
    witnesses: Vec<EmWitness>,
) -> Result<SettleOutcome, ForcingError> {
    let t = q.ambient();
    let s = &q.family;
    let d = s.depth();
    let (ua, ub) = k.universe();
    let top = bounds.level_bound.min(d.saturating_sub(2));
    let mut level = None;
    'levels: for n in 0..top {
        for e in s.level(n) {
            if !every_partition_dense(t, k, &q.f, e, &ua, &ub)? {
                continue 'levels;
            }
        }
        level = Some(n);
        break;
    }
    let Some(n) = level else {
        return Err(ForcingError::DensityViolation(format!(
            "no level below {top} is dense over the table's universe"
        )));
    };
    let alive = s.survivors(d);
    let idx = alive[n].iter().position(|&a| a).expect("valid families survive");
    let e = s.level(n)[idx].clone();
    let split = family_split(s, n, &e, d)?;
    let (side, f_prime) = dense_choice(t, k, &q.f, &split.e0, &split.e1, &ua, &ub)?
        .ok_or_else(|| ForcingError::Audit("dense level has a partition with no accepted side".into()))?;
    let order = transitive_order(t, &f_prime)?;
    let interval = if side == 0 {
        IntervalSpec::new(Endpoint::Vertex(*order.last().expect("F′ nonempty")), q.interval.high)
    } else {
        IntervalSpec::new(q.interval.low, Endpoint::Vertex(order[0]))
    };
    let f: VertexSet = q.f.union(&f_prime).copied().collect();
    Ok(SettleOutcome {
        condition: EmCondition::new(f, interval, split.family),
        certificate: SettleCertificate::Essential {
            witnesses,
            level: n,
            e,
            e0: split.e0,
            e1: split.e1,
            side,
            f_prime,
        },
    })
}

#[derive(Debug, Clone)]
struct Node {
    set: usize,
    label: VertexSet,
    right: VertexSet,
    parent: Option<usize>,
}

fn window(d: usize) -> usize {
    (d / 2 + 1).max(2)
}

/// Levels of sets `E` satisfying `Q(E,n)`, with the admissible partitions of
/// each as left-side masks.
/// Partition masks kept for each set, level by level.
type LevelParts = Vec<Vec<Vec<u64>>>;

fn q_subfamily(
    q: &EmCondition,
    k: &RequirementTable,
    a: usize,
    x: usize,
) -> Result<(Family, LevelParts), ForcingError> {
    let t = q.ambient();
    let s = &q.family;
    let av = ValueSet::single(a);
    let mut levels: Vec<Vec<VertexSet>> = Vec::new();
    let mut parts: LevelParts = Vec::new();
    for n in 0..s.depth() {
        let b = ValueSet::Between(x, x + n + 2);
        let mut kept = Vec::new();
        let mut kept_parts = Vec::new();
        for e in s.level(n) {
            if n > 0 {
                let bound = s.level_max(n - 1);
                let prev: VertexSet = e.iter().copied().filter(|&v| bound.is_some_and(|m| v <= m)).collect();
                if !levels[n - 1].contains(&prev) {
                    continue;
                }
            }
            let local = Local::new(t, e)?;
            let hg = good_closure(k, &q.f, &local, &local.transitive_subsets(), &av, &b)?;
            let full = local.full();
            let top_bit = if full == 0 { 0 } else { 1u64 << (local.verts.len() - 1) };
            let ok: Vec<u64> = (0..=full)
                .filter(|&m| m & top_bit == 0 || full == 0)
                .filter(|&m| !hg[m as usize] && !hg[(full ^ m) as usize])
                .collect();
            if !ok.is_empty() {
                kept.push(e.clone());
                kept_parts.push(ok);
            }
        }
        if kept.is_empty() {
            break;
        }
        levels.push(kept);
        parts.push(kept_parts);
    }
    Ok((Family::new(s.ambient().clone(), levels), parts))
}

fn build_tree(sq: &Family, parts: &[Vec<Vec<u64>>]) -> Result<Vec<Vec<Node>>, ForcingError> {
    let t = sq.ambient();
    let mut tree: Vec<Vec<Node>> = Vec::new();
    let mut total = 0usize;
    for n in 0..sq.depth() {
        let mut lookup: HashMap<(usize, VertexSet), usize> = HashMap::new();
        if n > 0 {
            for (i, node) in tree[n - 1].iter().enumerate() {
                let key = node.label.clone().min(node.right.clone());
                lookup.insert((node.set, key), i);
            }
        }
        let mut nodes = Vec::new();
        for (si, e) in sq.level(n).iter().enumerate() {
            let local = Local::new(t, e)?;
            let full = local.full();
            let pred = if n > 0 { sq.predecessor(n, si) } else { None };
            for &m in &parts[n][si] {
                let p = local.set(m);
                let r = local.set(full ^ m);
                let (parent, label, right) = match pred {
                    None => {
                        let (l, r2) = if p <= r { (p, r) } else { (r, p) };
                        (None, l, r2)
                    }
                    Some(pi) => {
                        let prev = &sq.level(n - 1)[pi];
                        let pp: VertexSet = p.intersection(prev).copied().collect();
                        let rr: VertexSet = r.intersection(prev).copied().collect();
                        let key = pp.clone().min(rr.clone());
                        let parent = *lookup.get(&(pi, key)).ok_or_else(|| {
                            ForcingError::Audit(format!("partition of {e:?} restricts to an inadmissible one"))
                        })?;
                        let plabel = &tree[n - 1][parent].label;
                        let p_ok = &pp == plabel;
                        let r_ok = &rr == plabel;
                        let (l, r2) = match (p_ok, r_ok) {
                            (true, true) if r < p => (r, p),
                            (true, _) => (p, r),
                            _ => (r, p),
                        };
                        (Some(parent), l, r2)
                    }
                };
                nodes.push(Node {
                    set: si,
                    label,
                    right,
                    parent,
                });
            }
        }
        total += nodes.len();
        if total > TREE_NODE_LIMIT {
            return Err(ForcingError::TooLarge(total));
        }
        tree.push(nodes);
    }
    Ok(tree)
}

fn non_essential_branch(q: &EmCondition, k: &RequirementTable, x: usize) -> Result<SettleOutcome, ForcingError> {
    let d = q.family.depth();
    if settles_check(q, k, x, d)?.settles {
        return Ok(SettleOutcome {
            condition: q.clone(),
            certificate: SettleCertificate::AlreadySettled { x },
        });
    }
    let a = k.a_value(&q.f)?.expect("checked by caller");
    let (sq, parts) = q_subfamily(q, k, a, x)?;
    if sq.depth() == 0 {
        return Err(ForcingError::Shallow(format!("no level-0 set admits a partition avoiding K at x={x}")));
    }
    let tree = build_tree(&sq, &parts)?;
    let l = tree.len();
    let tree_sizes: Vec<usize> = tree.iter().map(|lv| lv.len()).collect();
    let w = window(l);
    let mut ordered_nodes: Vec<Vec<usize>> = tree
        .iter()
        .map(|lv| {
            let mut ix: Vec<usize> = (0..lv.len()).collect();
            ix.sort_by(|&i, &j| lv[i].label.cmp(&lv[j].label).then(i.cmp(&j)));
            ix
        })
        .collect();
    if l >= w {
        for n in 0..=l - w {
            for &delta in &ordered_nodes[n] {
                let label = &tree[n][delta].label;
                let mut frontier = vec![delta];
                let mut layers = vec![frontier.clone()];
                let mut ok = true;
                for m in n + 1..l {
                    frontier = (0..tree[m].len())
                        .filter(|&i| tree[m][i].parent.is_some_and(|p| frontier.contains(&p)))
                        .filter(|&i| &tree[m][i].label == label)
                        .collect();
                    if frontier.is_empty() {
                        ok = false;
                        break;
                    }
                    layers.push(frontier.clone());
                }
                if !ok {
                    continue;
                }
                let levels: Vec<Vec<VertexSet>> = layers
                    .iter()
                    .enumerate()
                    .map(|(off, ids)| {
                        let mut out: Vec<VertexSet> = Vec::new();
                        for &i in ids {
                            let r = &tree[n + off][i].right;
                            if !out.contains(r) {
                                out.push(r.clone());
                            }
                        }
                        out
                    })
                    .collect();
                let family = Family::new(q.family.ambient().clone(), levels);
                return Ok(SettleOutcome {
                    condition: EmCondition::new(q.f.clone(), q.interval, family),
                    certificate: SettleCertificate::PersistingLabel {
                        x,
                        level: n,
                        label: label.clone(),
                        node: delta,
                        tree_sizes,
                    },
                });
            }
        }
    }
    ordered_nodes.clear();
    let labels_at = |m: usize| -> Vec<VertexSet> {
        let mut out: Vec<VertexSet> = Vec::new();
        for node in &tree[m] {
            if !out.contains(&node.label) {
                out.push(node.label.clone());
            }
        }
        out
    };
    let mut levels = vec![0usize];
    let mut current = labels_at(0);
    let mut sets = vec![current.clone()];
    for m in 1..l {
        if tree[m].iter().all(|node| !current.contains(&node.label)) {
            levels.push(m);
            current = labels_at(m);
            sets.push(current.clone());
        }
    }
    let family = Family::new(q.family.ambient().clone(), sets);
    Ok(SettleOutcome {
        condition: EmCondition::new(q.f.clone(), q.interval, family),
        certificate: SettleCertificate::AbandonedLabels { x, levels, tree_sizes },
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::instances::{random_instance, Instance, Kind, Tournament};

    fn set(xs: &[usize]) -> VertexSet {
        xs.iter().copied().collect()
    }

    fn bounds() -> EssentialBounds {
        EssentialBounds { x_max: 3, set_bound: 3, level_bound: 4 }
    }

    #[test]
    fn empty_table_settles_immediately() {
        let q = EmCondition::new(VertexSet::new(), IntervalSpec::FULL, Family::trivial(Arc::new(Tournament::lower_wins(10)), 6));
        let k = RequirementTable::empty(Flavor::Em).with_a(0);
        let out = settle_extend(&q, &k, &bounds()).unwrap();
        assert_eq!(out.certificate, SettleCertificate::AlreadySettled { x: 0 });
        assert_eq!(out.condition, q);
    }

    #[test]
    fn total_builtin_takes_the_essential_branch() {
        let t = match random_instance(Kind::Tournament, 20, 11).unwrap() {
            Instance::Tournament(t) => Arc::new(t),
            _ => unreachable!(),
        };
        let q = EmCondition::new(VertexSet::new(), IntervalSpec::FULL, Family::trivial(t, 8));
        let k = RequirementTable::total(Flavor::Em).with_a(0);
        let out = settle_extend(&q, &k, &bounds()).unwrap();
        match &out.certificate {
            SettleCertificate::Essential { level, f_prime, .. } => {
                assert_eq!(*level, 0);
                assert!(!f_prime.is_empty());
            }
            other => panic!("{other:?}"),
        }
        assert!(!out.condition.f.is_empty());
    }

    #[test]
    fn excluded_universe_reports_density_violation() {
        let q = EmCondition::new(VertexSet::new(), IntervalSpec::FULL, Family::trivial(Arc::new(Tournament::lower_wins(10)), 6));
        let mut k = RequirementTable::total(Flavor::Em).with_a(0);
        k.astar = Some(Default::default());
        assert!(matches!(settle_extend(&q, &k, &bounds()), Err(ForcingError::DensityViolation(_))));
    }

    /// Two branches over `lower_wins(16)`: evens from 0 and odds from 1.
    fn two_branches(depth: usize) -> Family {
        let t = Arc::new(Tournament::lower_wins(2 * depth + 2));
        Family::new(
            t,
            (0..depth)
                .map(|n| {
                    vec![
                        (0..=n).map(|i| 2 * i).collect(),
                        (0..=n).map(|i| 2 * i + 1).collect(),
                    ]
                })
                .collect(),
        )
    }

    #[test]
    fn one_poisoned_branch_gives_a_persisting_label() {
        let fam = two_branches(7);
        let q = EmCondition::new(VertexSet::new(), IntervalSpec::FULL, fam.clone());
        let k = RequirementTable::empty(Flavor::Em)
            .with_a(0)
            .with_entry(Object::Set(set(&[1])), 0, 5);
        let out = settle_extend(&q, &k, &bounds()).unwrap();
        match &out.certificate {
            SettleCertificate::PersistingLabel { x, level, label, .. } => {
                assert_eq!((*x, *level), (0, 0));
                assert!(label.is_empty());
            }
            other => panic!("{other:?}"),
        }
        // The surviving sets are exactly the even branch.
        let levels = out.condition.family.levels();
        for (n, lv) in levels.iter().enumerate() {
            let even: VertexSet = (0..=n).map(|i| 2 * i).collect();
            assert!(lv.contains(&even));
        }
        assert!(levels.last().unwrap().iter().all(|e| e.iter().all(|v| v % 2 == 0)));
    }
}
