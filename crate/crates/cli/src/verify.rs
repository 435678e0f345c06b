//! `verify` subcommands. Batch checks run in parallel and always report the
//! counterexample with the least seed, so output does not depend on `--jobs`.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use rmwb::corpus::{random_ground_condition, settle_corpus, SettleExpectation};
use rmwb::diagonalization::{
    builtin_adversaries, check_priority, construct_dkls, parse_adversaries, parse_trace, replay,
    serialize_adversaries, serialize_trace, verify_dkls, verify_klsw, Construction, DklsStatus, Event, KlswStatus,
    Trace,
};
use rmwb::families::{
    family_leq, family_split, parse_family, pointwise_refine, prepend, random_family, serialize_family,
    verify_refinement, PointwisePartition,
};
use rmwb::forcing::{
    parse_ground, requirement_member, serialize_ground, settle_extend, settles_check, validate_em_extension,
    EssentialBounds, ForcingError, GroundKind, Object, SettleCertificate,
};
use rmwb::instances::{parse_instance, random_instance, serialize_instance, Instance, Kind};
use rmwb::prng::XorShift64Star;
use rmwb::reductions::{
    check_solution, coloring_to_tournament, homogeneous_to_chain_antichain, linear_to_poset, poset_to_coloring,
    solution_to_monotone, tournament_to_coloring, transitive_to_homogeneous,
};
use rmwb::solvers::{max_homogeneous, max_transitive, poset_extremes};

use crate::ctx::{malformed, sha256_hex, CliError, CliResult, Ctx};
use crate::VerifyCmd;

type Check = Result<(), String>;

/// Runs `f` on every item and returns the count, or the failure with the
/// least index.
fn batch<T: Sync>(items: &[T], f: impl Fn(&T) -> Check + Sync) -> CliResult<usize> {
    let first = items
        .par_iter()
        .enumerate()
        .filter_map(|(i, item)| f(item).err().map(|m| (i, m)))
        .min_by_key(|(i, _)| *i);
    match first {
        Some((_, m)) => Err(CliError::Violated(m)),
        None => Ok(items.len()),
    }
}

fn seeds(seed: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| seed.wrapping_add(i)).collect()
}

fn read_trace(ctx: &mut Ctx, path: &Path, want: Construction) -> CliResult<Trace> {
    let text = ctx.read_raw(path)?;
    let trace = parse_trace(&text).map_err(|e| malformed(path.display(), e))?;
    ctx.manifest.inputs.insert(path.display().to_string(), sha256_hex(&serialize_trace(&trace)));
    if trace.construction != want {
        return Err(CliError::Malformed(format!(
            "{} is a {} trace, expected {}",
            path.display(),
            trace.construction.as_str(),
            want.as_str()
        )));
    }
    Ok(trace)
}

/// Requirements that appear anywhere in the trace.
fn requirements(trace: &Trace) -> Vec<usize> {
    let top = trace
        .events
        .iter()
        .filter_map(|ev| match *ev {
            Event::Claim { e, .. }
            | Event::Pick { e, .. }
            | Event::Witness { e, .. }
            | Event::Cancel { e, .. }
            | Event::Edge { e, .. }
            | Event::Collision { e, .. } => Some(e),
            Event::Default { .. } => None,
        })
        .max();
    top.map_or_else(Vec::new, |m| (0..=m).collect())
}

pub fn verify(ctx: &mut Ctx, c: VerifyCmd) -> CliResult {
    match c {
        VerifyCmd::Klsw { trace, e, window } => {
            let tr = read_trace(ctx, &trace, Construction::Klsw)?;
            let t = replay(&tr).map_err(|err| CliError::Violated(err.to_string()))?;
            let es = e.map_or_else(|| requirements(&tr), |e| vec![e]);
            let mut out = String::new();
            let mut pending = None;
            for e in es {
                let r = verify_klsw(&t, &tr, e, window).map_err(|err| malformed("verify klsw", err))?;
                let line = format!(
                    "requirement {e}: {:?} pair {:?} from {:?} group {:?} extensions {}\n",
                    r.status,
                    r.pair,
                    r.stable_from,
                    r.group,
                    r.extension_count()
                );
                out.push_str(&line);
                match r.status {
                    KlswStatus::Failed(m) => {
                        ctx.write(None, &out)?;
                        return Err(CliError::Violated(format!("requirement {e}: {m}")));
                    }
                    KlswStatus::NeverActed | KlswStatus::Unstabilized => {
                        pending.get_or_insert(format!("requirement {e}: {:?} at horizon {}", r.status, tr.horizon));
                    }
                    KlswStatus::Verified => {}
                }
            }
            ctx.write(None, &out)?;
            pending.map_or(Ok(()), |m| Err(CliError::Budget(m)))
        }
        VerifyCmd::Dkls { trace, e } => {
            let tr = read_trace(ctx, &trace, Construction::Dkls)?;
            let t = replay(&tr).map_err(|err| CliError::Violated(err.to_string()))?;
            check_priority(&tr).map_err(CliError::Violated)?;
            let es = e.map_or_else(|| requirements(&tr), |e| vec![e]);
            let mut out = String::new();
            let mut pending = None;
            for e in es {
                let r = verify_dkls(&t, &tr, e).map_err(|err| malformed("verify dkls", err))?;
                let ws: Vec<String> = r.witnesses.iter().map(|(x, s, d)| format!("x={x}@{s}{}", crate::ctx::fmt_set(d))).collect();
                out.push_str(&format!("requirement {e}: {:?} witnesses [{}] pairs {}\n", r.status, ws.join(" "), r.pairs));
                match r.status {
                    DklsStatus::Failed(m) => {
                        ctx.write(None, &out)?;
                        return Err(CliError::Violated(format!("requirement {e}: {m}")));
                    }
                    DklsStatus::NoWitness | DklsStatus::SecondPending => {
                        pending.get_or_insert(format!("requirement {e}: {:?} at horizon {}", r.status, tr.horizon));
                    }
                    DklsStatus::Verified => {}
                }
            }
            ctx.write(None, &out)?;
            pending.map_or(Ok(()), |m| Err(CliError::Budget(m)))
        }
        VerifyCmd::Reductions { batch: b, n } => {
            ctx.seed(b.seed);
            if !(1..=rmwb::solvers::MASK_LIMIT).contains(&n) {
                return Err(CliError::Malformed(format!("--n must be in 1..={}", rmwb::solvers::MASK_LIMIT)));
            }
            let k = batch(&seeds(b.seed, b.count), |&s| reductions_item(n, s))?;
            ctx.write(None, &format!("reductions: {k} seeds, n={n}, no counterexample\n"))
        }
        VerifyCmd::FamilySplit { batch: b, depth } => {
            ctx.seed(b.seed);
            let k = batch(&seeds(b.seed, b.count), |&s| family_item(s, depth))?;
            ctx.write(None, &format!("family-split: {k} families at depth {depth}, no counterexample\n"))
        }
        VerifyCmd::Settle { batch: b } => {
            ctx.seed(b.seed);
            let cases = settle_corpus(b.count, b.seed);
            let tally: BTreeMap<&str, usize> = cases.iter().fold(BTreeMap::new(), |mut m, c| {
                *m.entry(expect_tag(c.expect)).or_default() += 1;
                m
            });
            let k = batch(&cases, settle_item)?;
            ctx.write(None, &format!("settle: {k} tables {tally:?}, no counterexample\n"))
        }
        VerifyCmd::Format { batch: b } => {
            ctx.seed(b.seed);
            let k = batch(&seeds(b.seed, b.count), |&s| format_item(s))?;
            ctx.write(None, &format!("format: {k} seeds, every format round-trips\n"))
        }
    }
}

fn expect_tag(e: SettleExpectation) -> &'static str {
    match e {
        SettleExpectation::NonEssential => "non-essential",
        SettleExpectation::EssentialDense => "essential",
        SettleExpectation::DensityViolation => "density-violation",
    }
}

fn ceil_sqrt(t: usize) -> usize {
    (0..=t).find(|r| r * r >= t).unwrap_or(t)
}

fn reductions_item(n: usize, seed: u64) -> Check {
    let ctx = |m: String| format!("seed {seed}: {m}");
    let Ok(Instance::Coloring(c)) = random_instance(Kind::Coloring, n, seed) else { unreachable!() };
    let t = coloring_to_tournament(&c);
    let back = tournament_to_coloring(&t);
    for i in 0..n {
        for j in i + 1..n {
            if back.color(i, j) != 1 - c.color(i, j) {
                return Err(ctx(format!("complement law fails at ({i},{j})")));
            }
        }
    }
    let s = max_transitive(&t).map_err(|e| ctx(e.to_string()))?;
    let h = transitive_to_homogeneous(&c, &s).map_err(|e| ctx(e.to_string()))?;
    check_solution(&c.clone().into(), &h).map_err(|e| ctx(e.to_string()))?;
    if h.len() < ceil_sqrt(s.len()) {
        return Err(ctx(format!("homogeneous set {:?} below sqrt of {}", h.vertices, s.len())));
    }

    let Ok(Instance::Poset(m)) = random_instance(Kind::Poset, n, seed) else { unreachable!() };
    let hom = max_homogeneous(&poset_to_coloring(&m)).map_err(|e| ctx(e.to_string()))?;
    let ca = homogeneous_to_chain_antichain(&m, &hom).map_err(|e| ctx(e.to_string()))?;
    check_solution(&m.into(), &ca).map_err(|e| ctx(e.to_string()))?;

    let Ok(Instance::LinOrder(l)) = random_instance(Kind::LinOrder, n, seed) else { unreachable!() };
    let (chain, anti) = poset_extremes(&linear_to_poset(&l));
    for sol in [chain, anti] {
        let mono = solution_to_monotone(&l, &sol).map_err(|e| ctx(e.to_string()))?;
        check_solution(&l.clone().into(), &mono).map_err(|e| ctx(e.to_string()))?;
    }
    Ok(())
}

fn family_item(seed: u64, depth: usize) -> Check {
    let ctx = |m: String| format!("seed {seed}: {m}");
    let n = 24 + (seed % 17) as usize;
    let s = random_family(n, depth, 2, seed);
    let alive = s.survivors(depth);
    let level = (seed % 3) as usize % depth.max(1);
    let idx = alive[level].iter().position(|&a| a).ok_or_else(|| ctx("nothing survives".into()))?;
    let e = s.level(level)[idx].clone();
    let r = family_split(&s, level, &e, depth).map_err(|err| ctx(err.to_string()))?;
    if !r.e0.is_disjoint(&r.e1) || r.e0.union(&r.e1).cloned().collect::<std::collections::BTreeSet<_>>() != e {
        return Err(ctx(format!("sides {:?} {:?} do not partition {e:?}", r.e0, r.e1)));
    }
    for side in [&r.e0, &r.e1] {
        let p = prepend(side, &r.family).map_err(|err| ctx(err.to_string()))?;
        if !family_leq(&p, &s, p.depth()).holds {
            return Err(ctx(format!("{side:?} + S' is not below S")));
        }
    }
    let t = s.ambient();
    for x in r.family.levels().iter().flatten().flatten() {
        if !r.e0.iter().all(|&a| t.beats(a, *x)) || !r.e1.iter().all(|&b| t.beats(*x, b)) {
            return Err(ctx(format!("direction edge fails at {x}")));
        }
    }
    let mut rng = XorShift64Star::new(seed);
    let g: PointwisePartition = s.union().into_iter().map(|x| (x, rng.below(3) as u64)).collect();
    let (_, out, cert) = pointwise_refine(&s, &g, depth).map_err(|err| ctx(err.to_string()))?;
    verify_refinement(&s, &g, &out, &cert).map_err(|err| ctx(err.to_string()))
}

fn settle_item(case: &rmwb::corpus::SettleCase) -> Check {
    let bounds = EssentialBounds { x_max: 3, set_bound: 3, level_bound: 4 };
    let (q, k) = (&case.condition, &case.table);
    let fail = |m: String| format!("{}: {m}", case.name);
    match (case.expect, settle_extend(q, k, &bounds)) {
        (SettleExpectation::DensityViolation, Err(ForcingError::DensityViolation(_))) => Ok(()),
        (SettleExpectation::DensityViolation, other) => Err(fail(format!("expected a density violation, got {other:?}"))),
        (_, Err(e)) => Err(fail(e.to_string())),
        (SettleExpectation::EssentialDense, Ok(out)) => {
            let SettleCertificate::Essential { f_prime, .. } = &out.certificate else {
                return Err(fail(format!("expected the essential branch, got {:?}", out.certificate)));
            };
            let (ua, ub) = k.universe();
            let accepted = requirement_member(k, &Object::Set(out.condition.f.clone()), &ua, &ub)
                .map_err(|e| fail(e.to_string()))?;
            let ext = validate_em_extension(&out.condition, q).map_err(|e| fail(e.to_string()))?;
            if f_prime.is_empty() || !accepted || !ext.holds {
                return Err(fail(format!("bad essential result {:?}", out.certificate)));
            }
            Ok(())
        }
        (SettleExpectation::NonEssential, Ok(out)) => {
            let x = match out.certificate {
                SettleCertificate::AlreadySettled { x }
                | SettleCertificate::PersistingLabel { x, .. }
                | SettleCertificate::AbandonedLabels { x, .. } => x,
                other => return Err(fail(format!("expected a non-essential case, got {other:?}"))),
            };
            let d = out.condition.family.depth();
            let settles = settles_check(&out.condition, k, x, d).map_err(|e| fail(e.to_string()))?;
            let ext = validate_em_extension(&out.condition, q).map_err(|e| fail(e.to_string()))?;
            if !settles.settles || !ext.holds {
                return Err(fail("result does not settle or does not extend".into()));
            }
            Ok(())
        }
    }
}

fn format_item(seed: u64) -> Check {
    let n = 1 + (seed % 24) as usize;
    for kind in [Kind::Tournament, Kind::Coloring, Kind::Poset, Kind::LinOrder] {
        let x = random_instance(kind, n, seed).map_err(|e| e.to_string())?;
        let text = serialize_instance(&x);
        let back = parse_instance(&text).map_err(|e| format!("{kind} seed {seed}: {e}"))?;
        if back != x || serialize_instance(&random_instance(kind, n, seed).map_err(|e| e.to_string())?) != text {
            return Err(format!("{kind} seed {seed}: round trip or regeneration differs"));
        }
    }
    let s = random_family(12 + n, 6, 2, seed);
    let file = parse_family(&serialize_family(&s, "ambient.rmwb")).map_err(|e| format!("family seed {seed}: {e}"))?;
    if file.levels != s.levels() {
        return Err(format!("family seed {seed}: round trip differs"));
    }
    for gk in [GroundKind::Poset, GroundKind::Coloring] {
        let g = random_ground_condition(gk, n, seed);
        if parse_ground(&serialize_ground(&g)).map_err(|e| format!("ground seed {seed}: {e}"))? != g {
            return Err(format!("{} ground seed {seed}: round trip differs", gk.as_str()));
        }
    }
    let adv = builtin_adversaries(&format!("canonical-interval k={} delay={}", 2 + seed % 3, seed % 5))
        .map_err(|e| e.to_string())?;
    if parse_adversaries(&serialize_adversaries(&adv)).map_err(|e| format!("adversaries seed {seed}: {e}"))? != adv {
        return Err(format!("adversaries seed {seed}: round trip differs"));
    }
    let (_, trace) = construct_dkls(&adv.arrays, 30 + n).map_err(|e| e.to_string())?;
    if parse_trace(&serialize_trace(&trace)).map_err(|e| format!("trace seed {seed}: {e}"))? != trace {
        return Err(format!("trace seed {seed}: round trip differs"));
    }
    Ok(())
}
