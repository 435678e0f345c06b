use std::collections::{BTreeMap, BTreeSet};

use super::{family_leq, prepend, restrict, validate_family, Family, FamilyError};
use crate::instances::VertexSet;

pub type Label = u64;

/// Labels on the vertices of a family's union.
pub type PointwisePartition = BTreeMap<usize, Label>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefineStep {
    /// `piece` carries `label` at every level from `level` to the current depth;
    /// the family continues on the remaining labels above it.
    Persist { label: Label, level: usize, piece: VertexSet },
    /// No piece persisted; the output takes the `label` pieces at `levels`.
    Skip { label: Label, levels: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefineCertificate {
    pub depth: usize,
    pub steps: Vec<RefineStep>,
    pub label: Label,
    pub output_depth: usize,
}

/// `S_ℓ(n) = {E ∩ g⁻¹(ℓ) : E ∈ S(n)}`, first occurrences kept in order.
pub fn pieces(s: &Family, g: &PointwisePartition, label: Label) -> Family {
    let levels = s
        .levels()
        .iter()
        .map(|lvl| {
            let mut out: Vec<VertexSet> = Vec::new();
            for e in lvl {
                let p: VertexSet = e.iter().copied().filter(|x| g.get(x) == Some(&label)).collect();
                if !out.contains(&p) {
                    out.push(p);
                }
            }
            out
        })
        .collect();
    Family::new(s.ambient().clone(), levels)
}

/// Number of trailing levels a piece must persist through to count as
/// persisting at depth `d`.
fn window(d: usize) -> usize {
    (d / 2 + 1).max(2)
}

fn find_persisting(sl: &Family) -> Option<(usize, VertexSet)> {
    let d = sl.depth();
    let w = window(d);
    if d < w {
        return None;
    }
    (0..=d - w).find_map(|n| {
        let mut candidates: Vec<&VertexSet> = sl.level(n).iter().collect();
        candidates.sort();
        candidates
            .into_iter()
            .find(|p| (n + 1..d).all(|m| sl.level(m).contains(p)))
            .map(|p| (n, p.clone()))
    })
}

fn above_piece(cur: &Family, g: &PointwisePartition, label: Label, n: usize, piece: &VertexSet) -> Family {
    let levels = (n..cur.depth())
        .map(|m| {
            let mut out: Vec<VertexSet> = Vec::new();
            for e in cur.level(m) {
                let own: VertexSet = e.iter().copied().filter(|x| g.get(x) == Some(&label)).collect();
                if &own == piece {
                    let rest: VertexSet = e.difference(piece).copied().collect();
                    if !out.contains(&rest) {
                        out.push(rest);
                    }
                }
            }
            out
        })
        .collect();
    Family::new(cur.ambient().clone(), levels)
}

fn skip_levels(sl: &Family) -> Vec<usize> {
    let mut levels = vec![0];
    let mut last = 0;
    for m in 1..sl.depth() {
        if sl.level(m).iter().all(|p| !sl.level(last).contains(p)) {
            levels.push(m);
            last = m;
        }
    }
    levels
}

/// Bounded reading of the pointwise partition lemma. Labels are handled from
/// least to greatest: if some piece of the current label persists through the
/// trailing window the search continues above it on the other labels,
/// otherwise the level-skipping family of that label's pieces is returned.
pub fn pointwise_refine(
    s: &Family,
    g: &PointwisePartition,
    d: usize,
) -> Result<(Label, Family, RefineCertificate), FamilyError> {
    if d < 2 || s.depth() < d {
        return Err(FamilyError::Shallow { have: s.depth().min(d), need: 2.max(d) });
    }
    let mut cur = s.truncated(d);
    if let Some(&x) = cur.union().iter().find(|x| !g.contains_key(x)) {
        return Err(FamilyError::PartialLabeling(x));
    }
    let mut steps = Vec::new();
    loop {
        let labels: BTreeSet<Label> = cur.union().iter().map(|x| g[x]).collect();
        let Some(&label) = labels.first() else {
            return Err(FamilyError::Audit("no labels remain".into()));
        };
        let sl = pieces(&cur, g, label);
        if labels.len() > 1 {
            if let Some((level, piece)) = find_persisting(&sl) {
                cur = above_piece(&cur, g, label, level, &piece);
                steps.push(RefineStep::Persist { label, level, piece });
                continue;
            }
        }
        let levels = skip_levels(&sl);
        let out = Family::new(cur.ambient().clone(), levels.iter().map(|&m| sl.level(m).to_vec()).collect());
        steps.push(RefineStep::Skip { label, levels });
        let cert = RefineCertificate {
            depth: d,
            steps,
            label,
            output_depth: out.depth(),
        };
        return Ok((label, out, cert));
    }
}

/// Replays a certificate against `S` and checks the output: the replay must
/// reproduce `S′`, every claimed persistence must hold, `S′` must be a valid
/// family labeled `i` throughout, and `S′ ≤ S_i`.
pub fn verify_refinement(
    s: &Family,
    g: &PointwisePartition,
    s_prime: &Family,
    cert: &RefineCertificate,
) -> Result<(), FamilyError> {
    let audit = |m: String| Err(FamilyError::Audit(m));
    let mut cur = s.truncated(cert.depth);
    for (i, step) in cert.steps.iter().enumerate() {
        let last = i + 1 == cert.steps.len();
        match step {
            RefineStep::Persist { label, level, piece } => {
                if last {
                    return audit("certificate ends with a persistence step".into());
                }
                let sl = pieces(&cur, g, *label);
                if cur.depth() < level + window(cur.depth()) {
                    return audit(format!("persistence at level {level} is shorter than the window"));
                }
                if !(*level..cur.depth()).all(|m| sl.level(m).contains(piece)) {
                    return audit(format!("piece {piece:?} does not persist from level {level}"));
                }
                cur = above_piece(&cur, g, *label, *level, piece);
            }
            RefineStep::Skip { label, levels } => {
                if !last || *label != cert.label {
                    return audit("skip step must be the last and carry the output label".into());
                }
                let sl = pieces(&cur, g, *label);
                if &skip_levels(&sl) != levels {
                    return audit("skip levels are not the least properly extending ones".into());
                }
                let out = Family::new(cur.ambient().clone(), levels.iter().map(|&m| sl.level(m).to_vec()).collect());
                if &out != s_prime {
                    return audit("replay does not reproduce the output family".into());
                }
            }
        }
    }
    if cert.steps.is_empty() || s_prime.depth() != cert.output_depth {
        return audit("certificate is incomplete".into());
    }
    validate_family(s_prime, s_prime.depth())?;
    if let Some(x) = s_prime.union().into_iter().find(|x| g.get(x) != Some(&cert.label)) {
        return audit(format!("vertex {x} is not labeled {}", cert.label));
    }
    let si = pieces(&s.truncated(cert.depth), g, cert.label);
    if !family_leq(s_prime, &si, s_prime.depth()).holds {
        return audit("output is not below the label's pieces".into());
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitResult {
    pub e0: VertexSet,
    pub e1: VertexSet,
    pub family: Family,
    pub certificate: RefineCertificate,
}

/// Splits `E ∈ S(n)` into the part beating and the part beaten by everything
/// in a refinement of `S↾E`.
pub fn family_split(s: &Family, n: usize, e: &VertexSet, d: usize) -> Result<SplitResult, FamilyError> {
    if s.depth() < d {
        return Err(FamilyError::Shallow { have: s.depth(), need: d });
    }
    let s = s.truncated(d);
    let idx = s.index_of(n, e).ok_or_else(|| FamilyError::NotMember { level: n, set: e.clone() })?;
    if !s.survives(n, idx, d) {
        return Err(FamilyError::NotSurviving { level: n, set: e.clone(), depth: d });
    }
    if e.len() > 64 {
        return Err(FamilyError::SplitTooLarge(e.len()));
    }
    let r = restrict(&s, n, e)?;
    if r.depth() < 2 {
        return Err(FamilyError::Shallow { have: r.depth(), need: 2 });
    }
    let t = s.ambient();
    let members: Vec<usize> = e.iter().copied().collect();
    let g: PointwisePartition = r
        .union()
        .into_iter()
        .map(|x| {
            let mask = members
                .iter()
                .enumerate()
                .filter(|&(_, &a)| t.beats(a, x))
                .fold(0u64, |m, (i, _)| m | 1 << i);
            (x, mask)
        })
        .collect();
    let (label, family, certificate) = pointwise_refine(&r, &g, r.depth())?;
    let e0: VertexSet = members.iter().enumerate().filter(|&(i, _)| label >> i & 1 == 1).map(|(_, &a)| a).collect();
    let e1: VertexSet = e.difference(&e0).copied().collect();
    let out = SplitResult {
        e0,
        e1,
        family,
        certificate,
    };
    verify_split(&s, e, &out)?;
    Ok(out)
}

/// Checks the split postconditions by brute force.
pub fn verify_split(s: &Family, e: &VertexSet, r: &SplitResult) -> Result<(), FamilyError> {
    let audit = |m: &str| Err(FamilyError::Audit(m.to_string()));
    if !r.e0.is_disjoint(&r.e1) || r.e0.union(&r.e1).copied().collect::<VertexSet>() != *e {
        return audit("E₀ and E₁ do not partition E");
    }
    validate_family(&r.family, r.family.depth())?;
    let d = r.family.depth();
    for side in [&r.e0, &r.e1] {
        if !family_leq(&prepend(side, &r.family)?, s, d).holds {
            return audit("prepended side is not below S");
        }
    }
    let t = s.ambient();
    for x in r.family.union() {
        if !r.e0.iter().all(|&a| t.beats(a, x)) || !r.e1.iter().all(|&b| t.beats(x, b)) {
            return audit("direction edge fails");
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::families::random_family;
    use crate::instances::Tournament;

    fn labels(s: &Family, f: impl Fn(usize) -> Label) -> PointwisePartition {
        s.union().into_iter().map(|x| (x, f(x))).collect()
    }

    #[test]
    fn constant_labeling_returns_thinned_copy() {
        let s = Family::trivial(Arc::new(Tournament::lower_wins(12)), 8);
        let g = labels(&s, |_| 0);
        let (label, out, cert) = pointwise_refine(&s, &g, 8).unwrap();
        assert_eq!(label, 0);
        assert_eq!(cert.steps, vec![RefineStep::Skip { label: 0, levels: (0..8).collect() }]);
        assert_eq!(out, s);
        verify_refinement(&s, &g, &out, &cert).unwrap();
    }

    #[test]
    fn parity_labeling_trace() {
        let s = Family::trivial(Arc::new(Tournament::lower_wins(12)), 8);
        let g = labels(&s, |x| (x % 2) as Label);
        let (label, out, cert) = pointwise_refine(&s, &g, 8).unwrap();
        // Even pieces keep growing, so no piece persists and the even side wins.
        assert_eq!(label, 0);
        assert_eq!(cert.steps, vec![RefineStep::Skip { label: 0, levels: vec![0, 2, 4, 6] }]);
        let want: Vec<Vec<VertexSet>> = [0, 2, 4, 6]
            .iter()
            .map(|&m| vec![(0..=m).filter(|x| x % 2 == 0).collect()])
            .collect();
        assert_eq!(out.levels(), &want[..]);
        verify_refinement(&s, &g, &out, &cert).unwrap();
    }

    #[test]
    fn persisting_piece_moves_to_other_side() {
        let s = Family::trivial(Arc::new(Tournament::lower_wins(12)), 8);
        let g = labels(&s, |x| if x < 2 { 0 } else { 1 });
        let (label, out, cert) = pointwise_refine(&s, &g, 8).unwrap();
        assert_eq!(label, 1);
        assert_eq!(
            cert.steps[0],
            RefineStep::Persist { label: 0, level: 1, piece: [0, 1].into() }
        );
        assert_eq!(out.level(0), &[VertexSet::new()]);
        assert_eq!(out.level(1), &[VertexSet::from([2])]);
        verify_refinement(&s, &g, &out, &cert).unwrap();
    }

    #[test]
    fn shallow_and_partial_inputs_fail() {
        let s = Family::trivial(Arc::new(Tournament::lower_wins(12)), 8);
        let g = labels(&s, |_| 0);
        assert!(matches!(pointwise_refine(&s, &g, 1), Err(FamilyError::Shallow { .. })));
        let mut partial = g.clone();
        partial.remove(&3);
        assert_eq!(pointwise_refine(&s, &partial, 8), Err(FamilyError::PartialLabeling(3)));
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let s = Family::trivial(Arc::new(Tournament::lower_wins(12)), 8);
        let g = labels(&s, |x| (x % 2) as Label);
        let (_, out, mut cert) = pointwise_refine(&s, &g, 8).unwrap();
        cert.steps = vec![RefineStep::Skip { label: 0, levels: vec![0, 1, 2] }];
        assert!(verify_refinement(&s, &g, &out, &cert).is_err());
    }

    #[test]
    fn split_on_transitive_ambients() {
        let e: VertexSet = [0, 1].into();
        let up = Family::trivial(Arc::new(Tournament::upper_wins(12)), 8);
        let r = family_split(&up, 1, &e, 8).unwrap();
        assert_eq!((r.e0.clone(), r.e1.clone()), (VertexSet::new(), e.clone()));
        let down = Family::trivial(Arc::new(Tournament::lower_wins(12)), 8);
        let r = family_split(&down, 1, &e, 8).unwrap();
        assert_eq!((r.e0.clone(), r.e1.clone()), (e.clone(), VertexSet::new()));
    }

    #[test]
    fn split_singleton_is_trivial_partition() {
        let up = Family::trivial(Arc::new(Tournament::upper_wins(12)), 8);
        let r = family_split(&up, 0, &[0].into(), 8).unwrap();
        assert!(r.e0.is_empty() || r.e1.is_empty());
    }

    #[test]
    fn split_rejects_non_surviving_sets() {
        let s = random_family(6, 6, 3, 0);
        let alive = s.survivors(6);
        if let Some(i) = alive[1].iter().position(|a| !a) {
            let e = s.level(1)[i].clone();
            assert!(matches!(family_split(&s, 1, &e, 6), Err(FamilyError::NotSurviving { .. })));
        }
        assert!(matches!(
            family_split(&s, 0, &[99].into(), 6),
            Err(FamilyError::NotMember { .. })
        ));
    }

    #[test]
    fn pieces_reassemble_each_set() {
        for seed in 0..20 {
            let s = random_family(30, 8, 3, seed);
            let g = labels(&s, |x| (x % 3) as Label);
            let ps: Vec<Family> = (0..3).map(|l| pieces(&s, &g, l)).collect();
            for n in 0..s.depth() {
                for e in s.level(n) {
                    let parts: Vec<VertexSet> = (0..3)
                        .map(|l| e.iter().copied().filter(|x| g[x] == l).collect())
                        .collect();
                    for (l, p) in parts.iter().enumerate() {
                        assert!(ps[l].level(n).contains(p));
                    }
                    let back: VertexSet = parts.into_iter().flatten().collect();
                    assert_eq!(&back, e);
                }
            }
        }
    }
}
