//! Acceptance suite: one PASS/FAIL line per criterion, each with its time
//! limit. Checks use small independent oracles written out below rather than
//! the library's own verifiers where that is practical.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rmwb::corpus::{random_ground_condition, settle_corpus, two_shot_table, SettleExpectation};
use rmwb::diagonalization::{
    builtin_adversaries, construct_dkls, construct_klsw, parse_trace, replay, serialize_trace, verify_dkls,
    verify_klsw, DklsStatus, KlswStatus,
};
use rmwb::families::{
    family_split, pointwise_refine, prepend, random_family, verify_refinement, Family, PointwisePartition,
};
use rmwb::forcing::{
    ground_decide, ground_diagonalize, ground_extends, requirement_member, settle_extend, settles_check,
    validate_em_extension, DiagonalOutcome, EssentialBounds, ForcingError, GroundKind, Object, SettleCertificate,
};
use rmwb::instances::{parse_instance, random_instance, serialize_instance, Coloring, Instance, Kind, Poset};
use rmwb::prng::XorShift64Star;
use rmwb::reductions::{
    coloring_to_tournament, homogeneous_to_chain_antichain, linear_to_poset, poset_to_coloring, solution_to_monotone,
    tournament_to_coloring, transitive_to_homogeneous, SolutionKind, SolutionSet,
};
use rmwb::solvers::{max_homogeneous, max_transitive, poset_extremes};

type Outcome = Result<String, String>;

fn coloring(n: usize, seed: u64) -> Coloring {
    match random_instance(Kind::Coloring, n, seed).unwrap() {
        Instance::Coloring(c) => c,
        _ => unreachable!(),
    }
}

fn pair_bits(n: usize, mask: u32) -> Coloring {
    let bits: Vec<bool> = (0..n * (n - 1) / 2).map(|k| mask >> k & 1 == 1).collect();
    Coloring::from_pair_bits(n, &bits)
}

fn homogeneous(c: &Coloring, v: &[usize], col: u8) -> bool {
    v.iter().enumerate().all(|(i, &a)| v[i + 1..].iter().all(|&b| c.color(a, b) == col))
}

fn ceil_sqrt(t: usize) -> usize {
    (0..=t).find(|k| k * k >= t).unwrap()
}

fn subsets_up_to(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> Result<(), String>) -> Result<usize, String> {
    fn go(
        n: usize,
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> Result<(), String>,
        count: &mut usize,
    ) -> Result<(), String> {
        if !cur.is_empty() {
            *count += 1;
            f(cur)?;
        }
        if cur.len() == k {
            return Ok(());
        }
        for v in start..n {
            cur.push(v);
            go(n, k, v + 1, cur, f, count)?;
            cur.pop();
        }
        Ok(())
    }
    let mut count = 0;
    go(n, k, 0, &mut Vec::new(), &mut f, &mut count)?;
    Ok(count)
}

fn is_chain(p: &Poset, v: &[usize]) -> bool {
    v.iter().enumerate().all(|(i, &a)| v[i + 1..].iter().all(|&b| p.leq(a, b) || p.leq(b, a)))
}

fn is_antichain(p: &Poset, v: &[usize]) -> bool {
    v.iter().enumerate().all(|(i, &a)| v[i + 1..].iter().all(|&b| !p.leq(a, b) && !p.leq(b, a)))
}

/// `S′ ≤ S` by definition: every level of `S′` sits inside some level of `S`.
fn leq_oracle(sp: &Family, s: &Family) -> bool {
    sp.levels().iter().all(|lv| {
        s.levels().iter().any(|sl| lv.iter().all(|e1| sl.iter().any(|e| e1.iter().all(|x| e.contains(x)))))
    })
}

fn reduction_soundness() -> Outcome {
    let check = |c: &Coloring| -> Result<(), String> {
        let t = coloring_to_tournament(c);
        let s = max_transitive(&t).map_err(|e| e.to_string())?;
        let h = transitive_to_homogeneous(c, &s).map_err(|e| e.to_string())?;
        let SolutionKind::Homogeneous(col) = h.kind else {
            return Err("pullback is not a homogeneous set".into());
        };
        if !homogeneous(c, &h.vertices, col) {
            return Err(format!("{:?} is not homogeneous in {c:?}", h.vertices));
        }
        if h.len() < ceil_sqrt(s.len()) {
            return Err(format!("|H|={} < ⌈√{}⌉ for {c:?}", h.len(), s.len()));
        }
        Ok(())
    };
    for mask in 0..1u32 << 15 {
        check(&pair_bits(6, mask))?;
    }
    for seed in 0..1000 {
        check(&coloring(10, seed))?;
    }
    Ok("32768 colorings on 6 and 1000 on 10".into())
}

fn cac_ads_translations() -> Outcome {
    let mut checked = 0;
    for seed in 0..500u64 {
        let n = 2 + (seed % 11) as usize;
        let m = match random_instance(Kind::Poset, n, seed).unwrap() {
            Instance::Poset(p) => p,
            _ => unreachable!(),
        };
        let c = poset_to_coloring(&m);
        checked += subsets_up_to(n, 6, |v| {
            for col in 0..2u8 {
                if !homogeneous(&c, v, col) {
                    continue;
                }
                let ok = if col == 0 { is_chain(&m, v) } else { is_antichain(&m, v) };
                let pulled = homogeneous_to_chain_antichain(&m, &SolutionSet::new(SolutionKind::Homogeneous(col), v.to_vec()))
                    .map_err(|e| e.to_string())?;
                if !ok || pulled.vertices != v {
                    return Err(format!("homogeneous {v:?} color {col} of c_M fails for {m:?}"));
                }
            }
            Ok(())
        })?;
        let l = match random_instance(Kind::LinOrder, n, seed).unwrap() {
            Instance::LinOrder(l) => l,
            _ => unreachable!(),
        };
        let p = linear_to_poset(&l);
        checked += subsets_up_to(n, 6, |v| {
            for (kind, holds) in [(SolutionKind::Chain, is_chain(&p, v)), (SolutionKind::Antichain, is_antichain(&p, v))] {
                if !holds {
                    continue;
                }
                let s = solution_to_monotone(&l, &SolutionSet::new(kind, v.to_vec())).map_err(|e| e.to_string())?;
                let r = l.ranks();
                let ok = s.vertices == v
                    && v.windows(2).all(|w| {
                        if kind == SolutionKind::Chain {
                            r[w[0]] < r[w[1]]
                        } else {
                            r[w[0]] > r[w[1]]
                        }
                    });
                if !ok {
                    return Err(format!("{kind} {v:?} does not pull back to a monotone sequence"));
                }
            }
            Ok(())
        })?;
    }
    Ok(format!("500 posets and 500 linear orders, {checked} subsets"))
}

fn complement_law() -> Outcome {
    for seed in 0..1000u64 {
        let n = 2 + (seed % 39) as usize;
        let c = coloring(n, seed);
        let back = tournament_to_coloring(&coloring_to_tournament(&c));
        for i in 0..n {
            for j in i + 1..n {
                if back.color(i, j) != 1 - c.color(i, j) {
                    return Err(format!("seed {seed}: pair ({i},{j}) not complemented"));
                }
            }
        }
    }
    Ok("1000 colorings".into())
}

fn classical_bounds() -> Outcome {
    for mask in 0..1u32 << 15 {
        let t = coloring_to_tournament(&pair_bits(6, mask));
        let s = max_transitive(&t).map_err(|e| e.to_string())?;
        let v = &s.vertices;
        let cyclic = (0..v.len()).any(|i| {
            (0..v.len()).any(|j| (0..v.len()).any(|k| t.beats(v[i], v[j]) && t.beats(v[j], v[k]) && t.beats(v[k], v[i])))
        });
        if v.len() < 3 || cyclic {
            return Err(format!("tournament {mask}: transitive set {v:?}"));
        }
    }
    for mask in 0..1u32 << 15 {
        let c = pair_bits(6, mask);
        let h = max_homogeneous(&c).map_err(|e| e.to_string())?;
        let SolutionKind::Homogeneous(col) = h.kind else { unreachable!() };
        if h.len() < 3 || !homogeneous(&c, &h.vertices, col) {
            return Err(format!("coloring {mask}: homogeneous set {:?}", h.vertices));
        }
    }
    for seed in 0..500u64 {
        let n = 1 + (seed % 20) as usize;
        let p = match random_instance(Kind::Poset, n, seed).unwrap() {
            Instance::Poset(p) => p,
            _ => unreachable!(),
        };
        let (chain, anti) = poset_extremes(&p);
        if !is_chain(&p, &chain.vertices) || !is_antichain(&p, &anti.vertices) || chain.len() * anti.len() < n {
            return Err(format!("poset seed {seed}: chain {} × antichain {} < {n}", chain.len(), anti.len()));
        }
    }
    Ok("2×32768 exhaustive instances, 500 posets".into())
}

fn klsw_construction() -> Outcome {
    let adv = builtin_adversaries("klsw-suite").map_err(|e| e.to_string())?;
    let mut counts = Vec::new();
    for horizon in [500, 1000] {
        let (t, trace) = construct_klsw(&adv.guessers, horizon).map_err(|e| e.to_string())?;
        let mut row = Vec::new();
        for e in 0..adv.guessers.len() {
            let r = verify_klsw(&t, &trace, e, 100).map_err(|e| e.to_string())?;
            if r.status != KlswStatus::Verified {
                return Err(format!("horizon {horizon}, requirement {e}: {:?}", r.status));
            }
            let (u, w) = r.pair.unwrap();
            let start = r.stable_from.unwrap();
            if let Some(x) = (start..horizon).find(|&x| !(t.beats(u, w) && t.beats(w, x) && t.beats(x, u))) {
                return Err(format!("{{{u},{w},{x}}} is not a 3-cycle"));
            }
            row.push(r.extension_count());
        }
        counts.push(row);
    }
    if counts[0] != counts[1] {
        return Err(format!("extension counts differ: {:?} vs {:?}", counts[0], counts[1]));
    }
    Ok(format!("4 requirements stable, extension counts {:?}", counts[1]))
}

fn dkls_construction() -> Outcome {
    let adv = builtin_adversaries("dkls-suite").map_err(|e| e.to_string())?;
    let horizon = 1000;
    let (t, trace) = construct_dkls(&adv.arrays, horizon).map_err(|e| e.to_string())?;
    let mut pairs = 0;
    for e in 0..adv.arrays.len() {
        let r = verify_dkls(&t, &trace, e).map_err(|e| e.to_string())?;
        if r.status != DklsStatus::Verified {
            return Err(format!("requirement {e}: {:?}", r.status));
        }
        let stage = r.witnesses[1].1;
        for &y0 in &r.witnesses[0].2 {
            for &y1 in &r.witnesses[1].2 {
                pairs += 1;
                if !t.beats(y0, y1) {
                    return Err(format!("T({y0},{y1}) fails"));
                }
                for s in stage..horizon {
                    if !(t.beats(s, y0) && t.beats(y1, s)) {
                        return Err(format!("stage {s} against ({y0},{y1})"));
                    }
                }
            }
        }
    }
    let reparsed = parse_trace(&serialize_trace(&trace)).map_err(|e| e.to_string())?;
    if reparsed != trace || replay(&reparsed).map_err(|e| e.to_string())? != t {
        return Err("trace replay differs".into());
    }
    Ok(format!("4 requirements, {pairs} cross pairs, replay exact"))
}

fn family_lemmas() -> Outcome {
    let mut splits = 0;
    for seed in 0..200u64 {
        let n = 24 + (seed % 17) as usize;
        let s = random_family(n, 8, 2, seed);
        let alive = s.survivors(8);
        let level = (seed % 3) as usize;
        let idx = alive[level].iter().position(|&a| a).ok_or(format!("seed {seed}: nothing survives"))?;
        let e = s.level(level)[idx].clone();
        let r = family_split(&s, level, &e, 8).map_err(|err| format!("seed {seed}: {err}"))?;
        if !r.e0.is_disjoint(&r.e1) || r.e0.len() + r.e1.len() != e.len() || !r.e0.union(&r.e1).all(|x| e.contains(x)) {
            return Err(format!("seed {seed}: sides do not partition E"));
        }
        for side in [&r.e0, &r.e1] {
            let p = prepend(side, &r.family).map_err(|err| err.to_string())?;
            if !leq_oracle(&p, &s) {
                return Err(format!("seed {seed}: prepended side {side:?} is not below S"));
            }
        }
        let t = s.ambient();
        for lv in r.family.levels() {
            for x in lv.iter().flatten() {
                if !r.e0.iter().all(|&a| t.beats(a, *x)) || !r.e1.iter().all(|&b| t.beats(*x, b)) {
                    return Err(format!("seed {seed}: direction edge at {x}"));
                }
            }
        }
        splits += 1;

        let mut rng = XorShift64Star::new(seed);
        let g: PointwisePartition = s.union().into_iter().map(|x| (x, rng.below(3) as u64)).collect();
        let (label, out, cert) = pointwise_refine(&s, &g, 8).map_err(|err| format!("seed {seed}: {err}"))?;
        verify_refinement(&s, &g, &out, &cert).map_err(|err| format!("seed {seed}: {err}"))?;
        if out.union().iter().any(|x| g[x] != label) || !leq_oracle(&out, &s) {
            return Err(format!("seed {seed}: refinement is not one-labeled below S"));
        }
    }
    Ok(format!("{splits} splits and 200 refinements"))
}

fn settling() -> Outcome {
    let bounds = EssentialBounds { x_max: 3, set_bound: 3, level_bound: 4 };
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    for case in settle_corpus(50, 2024) {
        let q = &case.condition;
        let k = &case.table;
        let result = settle_extend(q, k, &bounds);
        let tag = match (case.expect, result) {
            (SettleExpectation::DensityViolation, Err(ForcingError::DensityViolation(_))) => "density-violation",
            (SettleExpectation::DensityViolation, other) => {
                return Err(format!("{}: expected a density violation, got {other:?}", case.name))
            }
            (_, Err(e)) => return Err(format!("{}: {e}", case.name)),
            (SettleExpectation::EssentialDense, Ok(out)) => {
                let SettleCertificate::Essential { f_prime, .. } = &out.certificate else {
                    return Err(format!("{}: expected the essential branch, got {:?}", case.name, out.certificate));
                };
                let (ua, ub) = k.universe();
                let accepted =
                    requirement_member(k, &Object::Set(out.condition.f.clone()), &ua, &ub).map_err(|e| e.to_string())?;
                let ext = validate_em_extension(&out.condition, q).map_err(|e| e.to_string())?;
                if f_prime.is_empty() || !f_prime.is_subset(&out.condition.f) || !accepted || !ext.holds {
                    return Err(format!("{}: bad essential result {:?}", case.name, out.certificate));
                }
                "essential"
            }
            (SettleExpectation::NonEssential, Ok(out)) => {
                let x = match out.certificate {
                    SettleCertificate::AlreadySettled { x }
                    | SettleCertificate::PersistingLabel { x, .. }
                    | SettleCertificate::AbandonedLabels { x, .. } => x,
                    other => return Err(format!("{}: expected a non-essential case, got {other:?}", case.name)),
                };
                let d = out.condition.family.depth();
                let settles = settles_check(&out.condition, k, x, d).map_err(|e| e.to_string())?.settles;
                let ext = validate_em_extension(&out.condition, q).map_err(|e| e.to_string())?;
                if !settles || !ext.holds {
                    return Err(format!("{}: result does not settle or extend", case.name));
                }
                "non-essential"
            }
        };
        *tally.entry(tag).or_default() += 1;
    }
    Ok(format!("{tally:?}"))
}

fn ground_density() -> Outcome {
    let mut rng = XorShift64Star::new(99);
    for seed in 0..200u64 {
        let kind = if seed % 2 == 0 { GroundKind::Poset } else { GroundKind::Coloring };
        let cond = random_ground_condition(kind, (seed % 15) as usize, seed);
        let i = rng.below(cond.domain() + 1);
        let d = ground_decide(&cond, i).map_err(|e| e.to_string())?;
        if !(d.astar().contains(&i) || d.bstar().contains(&i)) {
            return Err(format!("seed {seed}: {i} not decided"));
        }
        d.validate().map_err(|e| format!("seed {seed}: {e}"))?;
        ground_extends(&d, &cond).map_err(|e| format!("seed {seed}: {e}"))?;

        let (phi, budget) = two_shot_table(&cond, seed);
        match ground_diagonalize(&cond, &phi, budget).map_err(|e| e.to_string())? {
            DiagonalOutcome::Success { condition, a, b, .. } => {
                let fires = |x: usize| {
                    phi.entries.iter().any(|e| {
                        e.x == x
                            && e.span() <= condition.domain()
                            && e.clauses.iter().all(|c| match &condition {
                                rmwb::forcing::GroundCondition::Poset(p) => p.f.leq(c.i, c.j) == (c.v == 1),
                                rmwb::forcing::GroundCondition::Coloring(g) => g.c.color(c.i, c.j) == c.v,
                            })
                    })
                };
                if !fires(a) || !fires(b) || !condition.astar().contains(&a) || !condition.bstar().contains(&b) {
                    return Err(format!("seed {seed}: a={a}, b={b} not forced"));
                }
                ground_extends(&condition, &cond).map_err(|e| format!("seed {seed}: {e}"))?;
            }
            other => return Err(format!("seed {seed}: {other:?}")),
        }
    }
    Ok("200 conditions, both flavors".into())
}

fn format_determinism() -> Outcome {
    for kind in [Kind::Tournament, Kind::Coloring, Kind::Poset, Kind::LinOrder] {
        for seed in 0..1000u64 {
            let n = 1 + (seed % 24) as usize;
            let x = random_instance(kind, n, seed).map_err(|e| e.to_string())?;
            let text = serialize_instance(&x);
            let back = parse_instance(&text).map_err(|e| format!("{kind} seed {seed}: {e}"))?;
            if back != x || serialize_instance(&back) != text {
                return Err(format!("{kind} seed {seed}: round trip differs"));
            }
            let again = serialize_instance(&random_instance(kind, n, seed).map_err(|e| e.to_string())?);
            if again != text {
                return Err(format!("{kind} seed {seed}: generation is not deterministic"));
            }
        }
    }
    Ok("4×1000 instances".into())
}

type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("reduction soundness", 60, reduction_soundness),
        ("CAC/ADS translations", 30, cac_ads_translations),
        ("complement law", 5, complement_law),
        ("classical bounds", 120, classical_bounds),
        ("KLSW construction", 30, klsw_construction),
        ("DKLS construction", 30, dkls_construction),
        ("family lemmas", 60, family_lemmas),
        ("settling", 30, settling),
        ("ground density", 10, ground_density),
        ("format and determinism", 10, format_determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let limit = Duration::from_secs(*limit);
        let (ok, detail) = match result {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the time limit")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "{} [{:>2}] {name}: {detail} ({:.2}s / {}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
