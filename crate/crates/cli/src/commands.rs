//! Subcommands other than `verify`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rmwb::corpus::random_ground_condition;
use rmwb::diagonalization::{
    builtin_adversaries, construct_dkls, construct_klsw, parse_adversaries, serialize_adversaries, serialize_trace,
    Adversaries, DiagError,
};
use rmwb::families::{
    family_split, pointwise_refine, random_family, serialize_family, validate_family, verify_refinement,
    verify_split, FamilyError, PointwisePartition, RefineStep,
};
use rmwb::forcing::{
    ground_decide, ground_diagonalize, parse_chain, partition_path_tree, serialize_em_condition, serialize_ground,
    settle_extend, verify_path_tree, DiagonalOutcome, EmConditionFile, EssentialBounds, ForcingError, GroundKind,
    PathCase,
};
use rmwb::instances::{random_instance, serialize_instance, stability_report, Instance, Kind};
use rmwb::reductions::{
    coloring_to_tournament, homogeneous_to_chain_antichain, induced_order, linear_to_poset, poset_to_coloring,
    serialize_solution, solution_to_monotone, tournament_to_coloring, transitive_to_homogeneous, ReductionError,
    SolutionKind,
};
use rmwb::solvers::{longest_monotone, max_homogeneous, max_transitive, poset_extremes, SolverError};

use crate::ctx::{fmt_set, malformed, parse_set, CliError, CliResult, Ctx};
use crate::{
    AdversarySource, ConstructArgs, ConstructCmd, FamilyCmd, ForcingCmd, GenArgs, GenKind, Problem, PullbackArgs,
    PullbackRule, ReduceArgs, Rule, SolveArgs,
};

pub fn forcing_error(e: ForcingError) -> CliError {
    match e {
        ForcingError::DensityViolation(_) | ForcingError::Shallow(_) => CliError::Budget(e.to_string()),
        ForcingError::Audit(_) | ForcingError::NonMonotone(_) => CliError::Violated(e.to_string()),
        ForcingError::Family(f) => family_error(f),
        other => CliError::Malformed(other.to_string()),
    }
}

pub fn family_error(e: FamilyError) -> CliError {
    match e {
        FamilyError::Shallow { .. } => CliError::Budget(e.to_string()),
        FamilyError::Audit(_) => CliError::Violated(e.to_string()),
        other => CliError::Malformed(other.to_string()),
    }
}

fn diag_error(e: DiagError) -> CliError {
    match e {
        DiagError::TraceMismatch(_) => CliError::Violated(e.to_string()),
        other => CliError::Malformed(other.to_string()),
    }
}

fn solver_error(e: SolverError) -> CliError {
    CliError::Malformed(e.to_string())
}

fn pullback_error(e: ReductionError) -> CliError {
    match e {
        ReductionError::NotSolution { .. } => CliError::Violated(e.to_string()),
        other => CliError::Malformed(other.to_string()),
    }
}

pub fn gen(ctx: &mut Ctx, a: GenArgs) -> CliResult {
    ctx.seed(a.seed);
    let kind = match a.kind {
        GenKind::Tournament => Kind::Tournament,
        GenKind::Coloring => Kind::Coloring,
        GenKind::Poset => Kind::Poset,
        GenKind::Linorder => Kind::LinOrder,
        GenKind::Family => {
            let ambient = a
                .ambient
                .ok_or_else(|| CliError::Malformed("gen --kind family needs --ambient PATH".into()))?;
            let s = random_family(a.n, a.depth, a.branch, a.seed);
            ctx.write(Some(&ambient), &serialize_instance(&Instance::Tournament((**s.ambient()).clone())))?;
            let reference = match (a.output.as_deref().and_then(Path::parent), ambient.file_name()) {
                (Some(dir), Some(name)) if ambient.parent() == Some(dir) => name.to_string_lossy().into_owned(),
                _ => ambient.display().to_string(),
            };
            return ctx.write(a.output.as_deref(), &serialize_family(&s, &reference));
        }
        GenKind::GroundPoset | GenKind::GroundColoring => {
            let gk = if matches!(a.kind, GenKind::GroundPoset) { GroundKind::Poset } else { GroundKind::Coloring };
            let g = random_ground_condition(gk, a.n, a.seed);
            return ctx.write(a.output.as_deref(), &serialize_ground(&g));
        }
    };
    let x = random_instance(kind, a.n, a.seed).map_err(|e| malformed("gen", e))?;
    ctx.write(a.output.as_deref(), &serialize_instance(&x))
}

pub fn reduce(ctx: &mut Ctx, a: ReduceArgs) -> CliResult {
    let x = ctx.read_instance(&a.input)?;
    let out: Instance = match (a.rule, x) {
        (Rule::Poset2col, Instance::Poset(m)) => poset_to_coloring(&m).into(),
        (Rule::Lin2poset, Instance::LinOrder(l)) => linear_to_poset(&l).into(),
        (Rule::Col2tour, Instance::Coloring(c)) => coloring_to_tournament(&c).into(),
        (Rule::Tour2col, Instance::Tournament(t)) => tournament_to_coloring(&t).into(),
        (rule, x) => {
            return Err(CliError::Malformed(format!("rule {rule:?} does not apply to a {} instance", x.kind())))
        }
    };
    ctx.write(a.output.as_deref(), &serialize_instance(&out))
}

pub fn solve(ctx: &mut Ctx, a: SolveArgs) -> CliResult {
    let x = ctx.read_instance(&a.input)?;
    let wrong = |x: &Instance| CliError::Malformed(format!("{:?} does not apply to a {} instance", a.problem, x.kind()));
    let sol = match (a.problem, &x) {
        (Problem::Homogeneous, Instance::Coloring(c)) => max_homogeneous(c).map_err(solver_error)?,
        (Problem::Transitive, Instance::Tournament(t)) => max_transitive(t).map_err(solver_error)?,
        (Problem::Chain, Instance::Poset(m)) => poset_extremes(m).0,
        (Problem::Antichain, Instance::Poset(m)) => poset_extremes(m).1,
        (Problem::Ascending, Instance::LinOrder(l)) => longest_monotone(l).0,
        (Problem::Descending, Instance::LinOrder(l)) => longest_monotone(l).1,
        (Problem::Stability, Instance::LinOrder(_)) => return Err(wrong(&x)),
        (Problem::Stability, _) => {
            let tau = a.tau.unwrap_or_else(|| rmwb::instances::default_tail_start(x.n()));
            let r = stability_report(&x, tau).map_err(|e| malformed("stability", e))?;
            let text = format!(
                "tail {}\nA* {}\nB* {}\nC* {}\nunresolved {}\n",
                r.tail_start,
                fmt_set(&r.a_star),
                fmt_set(&r.b_star),
                fmt_set(&r.c_star),
                fmt_set(&r.unresolved)
            );
            return ctx.write(a.output.as_deref(), &text);
        }
        _ => return Err(wrong(&x)),
    };
    ctx.write(a.output.as_deref(), &serialize_solution(&sol))
}

pub fn pullback(ctx: &mut Ctx, a: PullbackArgs) -> CliResult {
    let x = ctx.read_instance(&a.input)?;
    let s = ctx.read_solution(&a.solution)?;
    let text = match (a.rule, &x) {
        (PullbackRule::Hom2ca, Instance::Poset(m)) => {
            serialize_solution(&homogeneous_to_chain_antichain(m, &s).map_err(pullback_error)?)
        }
        (PullbackRule::Ca2mono, Instance::LinOrder(l)) => {
            serialize_solution(&solution_to_monotone(l, &s).map_err(pullback_error)?)
        }
        (PullbackRule::Trans2hom, Instance::Coloring(c)) => {
            serialize_solution(&transitive_to_homogeneous(c, &s).map_err(pullback_error)?)
        }
        (PullbackRule::Order, Instance::Tournament(t)) => {
            if s.kind != SolutionKind::Transitive {
                return Err(CliError::Malformed(format!("expected a transitive solution, found {}", s.kind)));
            }
            let (order, verts) = induced_order(t, &s).map_err(pullback_error)?;
            format!("# positions of {}\n{}", fmt_set(&verts), serialize_instance(&order.into()))
        }
        (rule, x) => {
            return Err(CliError::Malformed(format!("rule {rule:?} does not apply to a {} instance", x.kind())))
        }
    };
    ctx.write(a.output.as_deref(), &text)
}

fn read_labels(ctx: &mut Ctx, path: &Path) -> CliResult<PointwisePartition> {
    let text = ctx.read_verbatim(path)?;
    let mut g = BTreeMap::new();
    for (no, line) in rmwb::instances::content_lines(&text) {
        let mut it = line.split_whitespace();
        let (Some(x), Some(l), None) = (it.next(), it.next(), it.next()) else {
            return Err(malformed(format!("{}:{no}", path.display()), "expected 'x label'"));
        };
        let x: usize = x.parse().map_err(|e| malformed(format!("{}:{no}", path.display()), e))?;
        let l: u64 = l.parse().map_err(|e| malformed(format!("{}:{no}", path.display()), e))?;
        g.insert(x, l);
    }
    Ok(g)
}

pub fn family(ctx: &mut Ctx, c: FamilyCmd) -> CliResult {
    match c {
        FamilyCmd::Validate { family, depth } => {
            let (s, _) = ctx.read_family(&family)?;
            let d = depth.unwrap_or(s.depth());
            let r = validate_family(&s, d).map_err(|e| match e {
                FamilyError::Parse { .. } => family_error(e),
                other => CliError::Violated(other.to_string()),
            })?;
            let survivors: usize = s.survivors(d).iter().flatten().filter(|&&b| b).count();
            ctx.write(None, &format!("valid to depth {}, {survivors} surviving sets\n", r.depth))
        }
        FamilyCmd::Split { family, level, set, depth, output } => {
            let (s, ambient) = ctx.read_family(&family)?;
            let e = parse_set(&set)?;
            let r = family_split(&s, level, &e, depth).map_err(family_error)?;
            verify_split(&s, &e, &r).map_err(|err| CliError::Violated(err.to_string()))?;
            let text = format!("# e0 {}\n# e1 {}\n{}", fmt_set(&r.e0), fmt_set(&r.e1), serialize_family(&r.family, &ambient));
            ctx.write(output.as_deref(), &text)
        }
        FamilyCmd::Refine { family, depth, modulo, labels, output } => {
            let (s, ambient) = ctx.read_family(&family)?;
            let g: PointwisePartition = match (modulo, labels) {
                (Some(k), None) => s.union().into_iter().map(|x| (x, x as u64 % k.max(1))).collect(),
                (None, Some(p)) => read_labels(ctx, &p)?,
                _ => return Err(CliError::Malformed("family refine needs --modulo K or --labels PATH".into())),
            };
            if let Some(x) = s.union().into_iter().find(|x| !g.contains_key(x)) {
                return Err(CliError::Malformed(format!("vertex {x} has no label")));
            }
            let (label, out, cert) = pointwise_refine(&s, &g, depth).map_err(family_error)?;
            verify_refinement(&s, &g, &out, &cert).map_err(family_error)?;
            let mut text = format!("# label {label}\n");
            for step in &cert.steps {
                match step {
                    RefineStep::Persist { label, level, piece } => {
                        let _ = writeln!(text, "# persist label {label} from level {level}: {}", fmt_set(piece));
                    }
                    RefineStep::Skip { label, levels } => {
                        let _ = writeln!(text, "# skip label {label} at levels {levels:?}");
                    }
                }
            }
            text.push_str(&serialize_family(&out, &ambient));
            ctx.write(output.as_deref(), &text)
        }
    }
}

pub fn forcing(ctx: &mut Ctx, c: ForcingCmd) -> CliResult {
    match c {
        ForcingCmd::Settle { condition, requirement, x_max, set_bound, level_bound, output } => {
            let (q, ambient) = ctx.read_em_condition(&condition)?;
            let k = ctx.read_requirement(&requirement)?;
            let bounds = EssentialBounds { x_max, set_bound, level_bound };
            let out = settle_extend(&q, &k, &bounds).map_err(forcing_error)?;
            let file = EmConditionFile {
                ambient,
                f: out.condition.f.clone(),
                interval: out.condition.interval,
                levels: out.condition.family.levels().to_vec(),
            };
            let text = format!("# {:?}\n{}", out.certificate, serialize_em_condition(&file));
            ctx.write(output.as_deref(), &text)
        }
        ForcingCmd::Decide { ground, i, output } => {
            let g = ctx.read_ground(&ground)?;
            let d = ground_decide(&g, i).map_err(forcing_error)?;
            ctx.write(output.as_deref(), &serialize_ground(&d))
        }
        ForcingCmd::Diag { ground, table, budget, output } => {
            let g = ctx.read_ground(&ground)?;
            let phi = ctx.read_functional(&table)?;
            match ground_diagonalize(&g, &phi, budget).map_err(forcing_error)? {
                DiagonalOutcome::Success { condition, a, b, rounds } => {
                    let text = format!(
                        "# a {a} (entry {}) b {b} (entry {})\n{}",
                        rounds[0].entry,
                        rounds[1].entry,
                        serialize_ground(&condition)
                    );
                    ctx.write(output.as_deref(), &text)
                }
                DiagonalOutcome::Budget { round, budget, .. } => {
                    Err(CliError::Budget(format!("round {round}: no entry fires within budget {budget}")))
                }
            }
        }
        ForcingCmd::Tree { chain, output } => {
            let text = ctx.read_verbatim(&chain)?;
            let (sets, r) = parse_chain(&text).map_err(forcing_error)?;
            let tree = partition_path_tree(&sets, &r).map_err(forcing_error)?;
            verify_path_tree(&sets, &r, &tree).map_err(|e| CliError::Violated(e.to_string()))?;
            let mut out = String::new();
            for (k, level) in tree.levels.iter().enumerate() {
                let nodes: Vec<String> = level
                    .iter()
                    .map(|n| match n.parent {
                        Some(p) => format!("{}^{p}", fmt_set(&n.label)),
                        None => fmt_set(&n.label),
                    })
                    .collect();
                let _ = writeln!(out, "level {k}: {}", nodes.join(" "));
            }
            match &tree.case {
                PathCase::Persisting { level, node, label } => {
                    let _ = writeln!(out, "persisting {} from node {node} at level {level}", fmt_set(label));
                }
                PathCase::Growing { path } => {
                    let _ = writeln!(out, "growing path {path:?}");
                }
            }
            let _ = writeln!(out, "extracted {}", fmt_set(&tree.extracted));
            ctx.write(output.as_deref(), &out)
        }
    }
}

fn adversaries(ctx: &mut Ctx, src: &AdversarySource) -> CliResult<Adversaries> {
    match (&src.adversaries, &src.builtin) {
        (Some(p), _) => {
            let text = ctx.read_raw(p)?;
            let adv = parse_adversaries(&text).map_err(diag_error)?;
            ctx.manifest
                .inputs
                .insert(p.display().to_string(), crate::ctx::sha256_hex(&serialize_adversaries(&adv)));
            Ok(adv)
        }
        (None, Some(spec)) => builtin_adversaries(spec).map_err(diag_error),
        (None, None) => Err(CliError::Malformed("need --adversaries or --builtin".into())),
    }
}

pub fn construct(ctx: &mut Ctx, c: ConstructCmd) -> CliResult {
    let (klsw, a): (bool, ConstructArgs) = match c {
        ConstructCmd::Klsw(a) => (true, a),
        ConstructCmd::Dkls(a) => (false, a),
    };
    let adv = adversaries(ctx, &a.source)?;
    let (t, trace) = if klsw {
        construct_klsw(&adv.guessers, a.horizon)
    } else {
        construct_dkls(&adv.arrays, a.horizon)
    }
    .map_err(diag_error)?;
    if let Some(p) = &a.trace {
        ctx.write(Some(p), &serialize_trace(&trace))?;
    }
    if a.output.is_some() || a.trace.is_none() {
        ctx.write(a.output.as_deref(), &serialize_instance(&Instance::Tournament(t)))?;
    }
    Ok(())
}
