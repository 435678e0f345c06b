//! `rmwb`: generation, reduction, solving, construction, forcing and
//! verification as shell-composable subcommands.

mod commands;
mod ctx;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ctx::{Ctx, EXIT_MALFORMED, EXIT_OK};

#[derive(Parser, Debug)]
#[command(name = "rmwb", version, about = "Finite workbench for Ramsey-type principles")]
struct Cli {
    /// Write the run manifest to this file instead of stderr.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Worker threads for independent verification items.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded instance, family or ground condition.
    Gen(GenArgs),
    /// Transform an instance.
    Reduce(ReduceArgs),
    /// Solve an instance exactly.
    Solve(SolveArgs),
    /// Pull a solution back through a reduction.
    Pullback(PullbackArgs),
    /// Validate, split and refine partition-tree families
    #[command(subcommand)]
    Family(FamilyCmd),
    /// Settle requirements, decide ground conditions, diagonalize
    #[command(subcommand)]
    Forcing(ForcingCmd),
    /// Run a priority construction against adversaries
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Check traces and run seeded batch verifications
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    Tournament,
    Coloring,
    Poset,
    Linorder,
    Family,
    GroundPoset,
    GroundColoring,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Family depth.
    #[arg(long, default_value_t = 8)]
    depth: usize,
    /// Maximum children per family set.
    #[arg(long, default_value_t = 2)]
    branch: usize,
    /// Where to write a family's ambient tournament; the family file refers to it.
    #[arg(long)]
    ambient: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Rule {
    /// Poset to comparability coloring.
    Poset2col,
    /// Linear order to poset.
    Lin2poset,
    /// Coloring to tournament.
    Col2tour,
    /// Tournament to coloring.
    Tour2col,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long, value_enum)]
    rule: Rule,
    #[arg(short, long, default_value = "-")]
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Problem {
    Homogeneous,
    Transitive,
    Chain,
    Antichain,
    Ascending,
    Descending,
    /// Finite-horizon stability classes.
    Stability,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum)]
    problem: Problem,
    #[arg(short, long, default_value = "-")]
    input: PathBuf,
    /// Tail start for the stability report; defaults to the instance's own.
    #[arg(long)]
    tau: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PullbackRule {
    /// Homogeneous set of the comparability coloring to chain/antichain.
    Hom2ca,
    /// Chain/antichain of the induced poset to ascending/descending.
    Ca2mono,
    /// Transitive set of the coloring's tournament to a homogeneous set.
    Trans2hom,
    /// Transitive set to the linear order it induces.
    Order,
}

#[derive(Args, Debug)]
struct PullbackArgs {
    #[arg(long, value_enum)]
    rule: PullbackRule,
    /// The original instance.
    #[arg(short, long)]
    input: PathBuf,
    /// Solution of the transformed instance.
    #[arg(short, long)]
    solution: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum FamilyCmd {
    /// Check the growth condition to a depth.
    Validate {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Split a surviving set into beats/beaten sides with a common family.
    Split {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        level: usize,
        /// The set to split, e.g. "0,2,5".
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Refine along a pointwise partition.
    Refine {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Label each vertex x by x mod K.
        #[arg(long, conflicts_with = "labels")]
        modulo: Option<u64>,
        /// File of "x label" lines.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum ForcingCmd {
    /// Extend an EM condition to one settling a requirement table.
    Settle {
        #[arg(long)]
        condition: PathBuf,
        #[arg(long)]
        requirement: PathBuf,
        #[arg(long, default_value_t = 3)]
        x_max: usize,
        #[arg(long, default_value_t = 3)]
        set_bound: usize,
        #[arg(long, default_value_t = 4)]
        level_bound: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide a point of a ground condition.
    Decide {
        #[arg(long)]
        ground: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Make a functional meet both A* and B*.
    Diag {
        #[arg(long)]
        ground: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = 16)]
        budget: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the tree of admissible partition sides over a chain.
    Tree {
        #[arg(long)]
        chain: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct AdversarySource {
    /// Adversary file.
    #[arg(long)]
    adversaries: Option<PathBuf>,
    /// Builtin adversary spec, e.g. "klsw-suite".
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[command(flatten)]
    source: AdversarySource,
    #[arg(long)]
    horizon: usize,
    #[arg(long)]
    trace: Option<PathBuf>,
    /// The constructed tournament.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum ConstructCmd {
    Klsw(ConstructArgs),
    Dkls(ConstructArgs),
}

#[derive(Args, Debug)]
struct BatchArgs {
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Check a KLSW trace for requirement `e` (all when omitted).
    Klsw {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        e: Option<usize>,
        /// Stages a pick must persist before it counts as stable.
        #[arg(long, default_value_t = 100)]
        window: usize,
    },
    /// Check a DKLS trace for requirement `e` (all when omitted).
    Dkls {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        e: Option<usize>,
    },
    /// Reduction pipelines on seeded instances.
    Reductions {
        #[command(flatten)]
        batch: BatchArgs,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Split and refinement postconditions on seeded families.
    FamilySplit {
        #[command(flatten)]
        batch: BatchArgs,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Settling outcomes on the engineered table corpus.
    Settle {
        #[command(flatten)]
        batch: BatchArgs,
    },
    /// Round trips and determinism of every file format.
    Format {
        #[command(flatten)]
        batch: BatchArgs,
    },
}

fn run(cli: Cli, ctx: &mut Ctx) -> ctx::CliResult {
    match cli.command {
        Command::Gen(a) => commands::gen(ctx, a),
        Command::Reduce(a) => commands::reduce(ctx, a),
        Command::Solve(a) => commands::solve(ctx, a),
        Command::Pullback(a) => commands::pullback(ctx, a),
        Command::Family(c) => commands::family(ctx, c),
        Command::Forcing(c) => commands::forcing(ctx, c),
        Command::Construct(c) => commands::construct(ctx, c),
        Command::Verify(c) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.jobs.max(1))
                .build()
                .map_err(|e| ctx::malformed("--jobs", e))?;
            pool.install(|| verify::verify(ctx, c))
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let mut ctx = Ctx::new(argv.clone());
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let _ = e.print();
            if code != EXIT_OK {
                ctx.manifest.code = code;
                ctx.emit_manifest(None);
            }
            return ExitCode::from(code as u8);
        }
    };
    let manifest = cli.manifest.clone();
    let code = match run(cli, &mut ctx) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", e.message());
            e.code()
        }
    };
    ctx.manifest.code = code;
    ctx.emit_manifest(manifest.as_deref());
    ExitCode::from(code as u8)
}
