use crate::instances::{LinearOrder, VertexSet};

use super::requirement::{requirement_member, Flavor, Object, RequirementTable, ValueSet};
use super::{EssentialBounds, ForcingError};

/// A pair `(σ,τ)` of a `≺`-ascending and a `≺`-descending sequence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AdsCondition {
    pub sigma: Vec<usize>,
    pub tau: Vec<usize>,
}

impl AdsCondition {
    pub fn new(sigma: Vec<usize>, tau: Vec<usize>) -> Self {
        AdsCondition { sigma, tau }
    }

    pub fn object(&self, flavor: Flavor) -> Object {
        match flavor {
            Flavor::AdsASide => Object::Seq(self.sigma.clone()),
            Flavor::AdsDSide => Object::Seq(self.tau.clone()),
            _ => Object::Pair(self.sigma.clone(), self.tau.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdsReport {
    pub in_range: bool,
    pub ascending: bool,
    pub descending: bool,
    /// `last(σ) ≺ last(τ)`, vacuous when either is empty.
    pub ordered: bool,
    /// `σ ⊆ V` and `τ ⊆ ℕ∖V`, when a cut `V` was given.
    pub respects_cut: Option<bool>,
}

impl AdsReport {
    pub fn valid(&self) -> bool {
        self.in_range && self.ascending && self.descending && self.ordered
    }

    pub fn in_cut(&self) -> bool {
        self.valid() && self.respects_cut != Some(false)
    }
}

fn ordered(l: &LinearOrder, sigma: &[usize], tau: &[usize]) -> bool {
    match (sigma.last(), tau.last()) {
        (Some(&s), Some(&t)) => l.precedes(s, t),
        _ => true,
    }
}

pub fn validate_ads(l: &LinearOrder, p: &AdsCondition, cut: Option<&VertexSet>) -> AdsReport {
    let in_range = p.sigma.iter().chain(&p.tau).all(|&x| x < l.n());
    if !in_range {
        return AdsReport {
            in_range,
            ascending: false,
            descending: false,
            ordered: false,
            respects_cut: cut.map(|_| false),
        };
    }
    AdsReport {
        in_range,
        ascending: l.is_ascending(&p.sigma),
        descending: l.is_descending(&p.tau),
        ordered: ordered(l, &p.sigma, &p.tau),
        respects_cut: cut.map(|v| p.sigma.iter().all(|x| v.contains(x)) && p.tau.iter().all(|x| !v.contains(x))),
    }
}

/// `q` extends `p`: both sequences are end-extensions.
pub fn ads_extends(q: &AdsCondition, p: &AdsCondition) -> bool {
    q.sigma.starts_with(&p.sigma) && q.tau.starts_with(&p.tau)
}

/// Whether `cut` is a `≺`-initial segment.
pub fn is_initial_segment(l: &LinearOrder, cut: &VertexSet) -> bool {
    cut.iter().all(|&x| x < l.n()) && l.listing()[..cut.len()].iter().all(|x| cut.contains(x))
}

/// The blocks `σ′`, `τ′` of a split pair below `p`, or the reason it is not one.
pub fn split_blocks<'a>(
    l: &LinearOrder,
    p: &AdsCondition,
    q0: &'a AdsCondition,
    q1: &'a AdsCondition,
) -> Result<(&'a [usize], &'a [usize]), ForcingError> {
    let shape = |m: &str| Err(ForcingError::SplitShape(m.to_string()));
    if q0.tau != p.tau || !q0.sigma.starts_with(&p.sigma) || q0.sigma.len() == p.sigma.len() {
        return shape("q₀ must extend σ_p by a nonempty block and keep τ_p");
    }
    if q1.sigma != p.sigma || !q1.tau.starts_with(&p.tau) || q1.tau.len() == p.tau.len() {
        return shape("q₁ must extend τ_p by a nonempty block and keep σ_p");
    }
    for q in [q0, q1] {
        if !validate_ads(l, q, None).valid() {
            return shape("split pair members must be conditions");
        }
    }
    let s = &q0.sigma[p.sigma.len()..];
    let t = &q1.tau[p.tau.len()..];
    if !ordered(l, s, t) {
        return shape("σ′ ≺ τ′ fails");
    }
    Ok((s, t))
}

/// Picks the member of a split pair that respects the cut.
pub fn split_pair_select(
    l: &LinearOrder,
    p: &AdsCondition,
    q0: &AdsCondition,
    q1: &AdsCondition,
    cut: &VertexSet,
) -> Result<usize, ForcingError> {
    if !is_initial_segment(l, cut) {
        return Err(ForcingError::Precondition("cut is not an initial segment".into()));
    }
    if !validate_ads(l, p, Some(cut)).in_cut() {
        return Err(ForcingError::Precondition("p does not respect the cut".into()));
    }
    split_blocks(l, p, q0, q1)?;
    for (i, q) in [q0, q1].into_iter().enumerate() {
        if validate_ads(l, q, Some(cut)).in_cut() {
            return Ok(i);
        }
    }
    Err(ForcingError::Audit("neither side of the split pair respects the cut".into()))
}

/// Nonempty ascending blocks of length ≤ `max_len` that can follow `base`.
fn ascending_blocks(l: &LinearOrder, base: &[usize], max_len: usize, asc: bool) -> Vec<Vec<usize>> {
    let next = |last: Option<usize>| -> Vec<usize> {
        let mut vs: Vec<usize> = (0..l.n())
            .filter(|&x| match last {
                None => true,
                Some(y) => {
                    if asc {
                        l.precedes(y, x)
                    } else {
                        l.precedes(x, y)
                    }
                }
            })
            .collect();
        vs.sort();
        vs
    };
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut grown = Vec::new();
        for b in &frontier {
            let last = b.last().or(base.last()).copied();
            for x in next(last) {
                let mut c = b.clone();
                c.push(x);
                grown.push(c);
            }
        }
        out.extend(grown.iter().cloned());
        frontier = grown;
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// All split pairs below `p` with blocks of length ≤ `max_len`, least blocks first.
pub fn split_pairs_below(l: &LinearOrder, p: &AdsCondition, max_len: usize) -> Vec<(AdsCondition, AdsCondition)> {
    let mut out = Vec::new();
    let sig = ascending_blocks(l, &p.sigma, max_len, true);
    let tau = ascending_blocks(l, &p.tau, max_len, false);
    for s in &sig {
        let q0 = AdsCondition::new([p.sigma.clone(), s.clone()].concat(), p.tau.clone());
        if !validate_ads(l, &q0, None).valid() {
            continue;
        }
        for t in &tau {
            let q1 = AdsCondition::new(p.sigma.clone(), [p.tau.clone(), t.clone()].concat());
            if validate_ads(l, &q1, None).valid() && ordered(l, s, t) {
                out.push((q0.clone(), q1));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdsWitness {
    pub x: usize,
    /// `A = (x, a_high]`.
    pub a_high: usize,
    /// Per `y`: `B = (y, b_high]` and the split pair found.
    pub per_y: Vec<(usize, usize, AdsCondition, AdsCondition)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdsEssentialReport {
    pub essential: bool,
    pub witnesses: Vec<AdsWitness>,
    pub failing_x: Option<usize>,
}

/// Bounded reading of "K is essential below p" for a full ADS requirement:
/// for `x ≤ x_max` there is `A ⊆ (x, x+set_bound]` such that for `y ≤ x_max`
/// there are `B ⊆ (y, y+set_bound]` and a split pair with blocks of length
/// ≤ `level_bound` both in `K^{A,B}`. Intervals are shrunk to the least that works.
pub fn ads_bounded_essential(
    k: &RequirementTable,
    l: &LinearOrder,
    p: &AdsCondition,
    bounds: &EssentialBounds,
) -> Result<AdsEssentialReport, ForcingError> {
    if k.flavor != Flavor::AdsFull {
        return Err(ForcingError::FlavorMismatch(k.flavor.as_str()));
    }
    let pairs = split_pairs_below(l, p, bounds.level_bound);
    let both = |a: &ValueSet, b: &ValueSet| -> Result<Option<(AdsCondition, AdsCondition)>, ForcingError> {
        for (q0, q1) in &pairs {
            if requirement_member(k, &q0.object(k.flavor), a, b)? && requirement_member(k, &q1.object(k.flavor), a, b)? {
                return Ok(Some((q0.clone(), q1.clone())));
            }
        }
        Ok(None)
    };
    let mut witnesses = Vec::new();
    for x in 0..=bounds.x_max {
        let mut found = None;
        'a: for ja in 1..=bounds.set_bound {
            let a = ValueSet::Between(x, x + ja + 1);
            let mut per_y = Vec::new();
            for y in 0..=bounds.x_max {
                let mut hit = None;
                for jb in 1..=bounds.set_bound {
                    if let Some((q0, q1)) = both(&a, &ValueSet::Between(y, y + jb + 1))? {
                        hit = Some((y, y + jb, q0, q1));
                        break;
                    }
                }
                match hit {
                    Some(h) => per_y.push(h),
                    None => continue 'a,
                }
            }
            found = Some(AdsWitness { x, a_high: x + ja, per_y });
            break;
        }
        match found {
            Some(w) => witnesses.push(w),
            None => {
                return Ok(AdsEssentialReport {
                    essential: false,
                    witnesses,
                    failing_x: Some(x),
                })
            }
        }
    }
    Ok(AdsEssentialReport {
        essential: true,
        witnesses,
        failing_x: None,
    })
}

/// Bounded reading of "the half requirement R is essential in Λ": for every
/// `n < level_bound` and `x ≤ x_max` there is `A ⊆ (x, x+set_bound]` such that
/// for every `y ≤ x_max` some `B ⊆ (y, y+set_bound]` and `m ∈ (n, |Λ|]` give
/// `Λ↾m ∈ R^{A,B}`. Returns the first failing `(n, x)`.
pub fn ads_essential_in_sequence(
    k: &RequirementTable,
    lambda: &[usize],
    bounds: &EssentialBounds,
) -> Result<Result<(), (usize, usize)>, ForcingError> {
    if !matches!(k.flavor, Flavor::AdsASide | Flavor::AdsDSide) {
        return Err(ForcingError::FlavorMismatch(k.flavor.as_str()));
    }
    let full_a = |x: usize| ValueSet::Between(x, x + bounds.set_bound + 1);
    for n in 0..bounds.level_bound.min(lambda.len()) {
        for x in 0..=bounds.x_max {
            // Positivity: the widest A and B are the best choices.
            let mut ok = true;
            for y in 0..=bounds.x_max {
                let b = full_a(y);
                let mut hit = false;
                for m in n + 1..=lambda.len() {
                    if requirement_member(k, &Object::Seq(lambda[..m].to_vec()), &full_a(x), &b)? {
                        hit = true;
                        break;
                    }
                }
                if !hit {
                    ok = false;
                    break;
                }
            }
            if !ok {
                return Ok(Err((n, x)));
            }
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{random_instance, Instance, Kind};

    fn set(xs: &[usize]) -> VertexSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn empty_condition_is_valid_in_every_cut() {
        let l = LinearOrder::identity(5);
        let p = AdsCondition::default();
        for k in 0..=5 {
            assert!(validate_ads(&l, &p, Some(&(0..k).collect())).in_cut());
        }
    }

    #[test]
    fn validation_examples() {
        let l = LinearOrder::identity(5);
        assert!(validate_ads(&l, &AdsCondition::new(vec![0, 1], vec![3, 2]), None).valid());
        assert!(!validate_ads(&l, &AdsCondition::new(vec![1, 0], vec![]), None).valid());
        assert!(!validate_ads(&l, &AdsCondition::new(vec![3], vec![2]), None).valid());
    }

    #[test]
    fn split_selection_examples() {
        let l = LinearOrder::identity(8);
        let p = AdsCondition::default();
        let cut = set(&[0, 1, 2, 3]);
        let inside = AdsCondition::new(vec![1, 2], vec![]);
        let over = AdsCondition::new(vec![2, 5], vec![]);
        let q1 = AdsCondition::new(vec![], vec![7, 6]);
        assert_eq!(split_pair_select(&l, &p, &inside, &q1, &cut), Ok(0));
        assert_eq!(split_pair_select(&l, &p, &over, &q1, &cut), Ok(1));
        let low_tau = AdsCondition::new(vec![], vec![1]);
        assert!(matches!(
            split_pair_select(&l, &p, &inside, &low_tau, &cut),
            Err(ForcingError::SplitShape(_))
        ));
    }

    #[test]
    fn selection_never_violates_the_cut() {
        for seed in 0..12u64 {
            let n = 4 + seed as usize % 7;
            let l = match random_instance(Kind::LinOrder, n, seed).unwrap() {
                Instance::LinOrder(l) => l,
                _ => unreachable!(),
            };
            let max_len = if n <= 6 { 3 } else { 2 };
            let pairs = split_pairs_below(&l, &AdsCondition::default(), max_len);
            for k in 0..=n {
                let cut: VertexSet = l.listing()[..k].iter().copied().collect();
                for (q0, q1) in &pairs {
                    let i = split_pair_select(&l, &AdsCondition::default(), q0, q1, &cut).unwrap();
                    let q = if i == 0 { q0 } else { q1 };
                    assert!(validate_ads(&l, q, Some(&cut)).in_cut());
                }
            }
        }
    }

    #[test]
    fn total_requirement_is_essential() {
        let l = LinearOrder::identity(6);
        let k = RequirementTable::total(Flavor::AdsFull);
        let b = EssentialBounds { x_max: 2, set_bound: 2, level_bound: 1 };
        let r = ads_bounded_essential(&k, &l, &AdsCondition::default(), &b).unwrap();
        assert!(r.essential);
        assert_eq!(r.witnesses[0].a_high, 1);
        assert_eq!(r.witnesses[0].per_y[0].2, AdsCondition::new(vec![0], vec![]));
        let none = ads_bounded_essential(&RequirementTable::empty(Flavor::AdsFull), &l, &AdsCondition::default(), &b)
            .unwrap();
        assert_eq!((none.essential, none.failing_x), (false, Some(0)));
    }

    #[test]
    fn half_requirement_in_sequence() {
        let k = RequirementTable::empty(Flavor::AdsASide).with_entry(Object::Seq(vec![0, 1]), 1, 1);
        let b = EssentialBounds { x_max: 0, set_bound: 1, level_bound: 2 };
        assert_eq!(ads_essential_in_sequence(&k, &[0, 1, 2], &b).unwrap(), Ok(()));
        let b = EssentialBounds { x_max: 1, set_bound: 1, level_bound: 2 };
        assert_eq!(ads_essential_in_sequence(&k, &[0, 1, 2], &b).unwrap(), Err((0, 0)));
    }
}
