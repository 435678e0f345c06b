//! Input/output plumbing, error classes, and the run manifest.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};

use rmwb::families::{parse_family, serialize_family, Family};
use rmwb::forcing::{
    parse_em_condition, parse_functional, parse_ground, parse_requirement, serialize_em_condition,
    serialize_functional, serialize_ground, serialize_requirement, EmCondition, FunctionalTable,
    GroundCondition, RequirementTable,
};
use rmwb::instances::{parse_instance, serialize_instance, Instance, Tournament};
use rmwb::reductions::{parse_solution, serialize_solution, SolutionSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// A checked property failed; the message is the first counterexample.
    Violated(String),
    Malformed(String),
    Budget(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Violated(_) => EXIT_VIOLATED,
            CliError::Malformed(_) => EXIT_MALFORMED,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Violated(m) | CliError::Malformed(m) | CliError::Budget(m) => m,
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

pub fn malformed(context: impl Display, e: impl Display) -> CliError {
    CliError::Malformed(format!("{context}: {e}"))
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    /// sha256 of each input's canonical serialization, keyed by path.
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub code: i32,
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Ctx {
    pub manifest: RunManifest,
}

impl Ctx {
    pub fn new(argv: Vec<String>) -> Self {
        Ctx {
            manifest: RunManifest {
                command: argv,
                inputs: BTreeMap::new(),
                outputs: BTreeMap::new(),
                seed: None,
                version: env!("CARGO_PKG_VERSION"),
                code: EXIT_OK,
            },
        }
    }

    pub fn seed(&mut self, seed: u64) {
        self.manifest.seed = Some(seed);
    }

    /// Reads a path, with `-` meaning stdin.
    pub fn read_raw(&self, path: &Path) -> CliResult<String> {
        if path == Path::new("-") {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| malformed("stdin", e))?;
            Ok(s)
        } else {
            fs::read_to_string(path).map_err(|e| malformed(path.display(), e))
        }
    }

    fn record(&mut self, path: &Path, canonical: &str) {
        self.manifest.inputs.insert(path.display().to_string(), sha256_hex(canonical));
    }

    pub fn read_instance(&mut self, path: &Path) -> CliResult<Instance> {
        let text = self.read_raw(path)?;
        let x = parse_instance(&text).map_err(|e| malformed(path.display(), e))?;
        self.record(path, &serialize_instance(&x));
        Ok(x)
    }

    pub fn read_tournament(&mut self, path: &Path) -> CliResult<Tournament> {
        match self.read_instance(path)? {
            Instance::Tournament(t) => Ok(t),
            other => Err(malformed(path.display(), format!("expected a tournament, found a {}", other.kind()))),
        }
    }

    pub fn read_solution(&mut self, path: &Path) -> CliResult<SolutionSet> {
        let text = self.read_raw(path)?;
        let s = parse_solution(&text).map_err(|e| malformed(path.display(), e))?;
        self.record(path, &serialize_solution(&s));
        Ok(s)
    }

    /// Loads a family file; the ambient reference is resolved against the
    /// family file's directory. Returns the family and the reference.
    pub fn read_family(&mut self, path: &Path) -> CliResult<(Family, String)> {
        let text = self.read_raw(path)?;
        let file = parse_family(&text).map_err(|e| malformed(path.display(), e))?;
        let t = self.read_tournament(&resolve(path, &file.ambient))?;
        let s = Family::new(Arc::new(t), file.levels);
        self.record(path, &serialize_family(&s, &file.ambient));
        Ok((s, file.ambient))
    }

    pub fn read_em_condition(&mut self, path: &Path) -> CliResult<(EmCondition, String)> {
        let text = self.read_raw(path)?;
        let file = parse_em_condition(&text).map_err(|e| malformed(path.display(), e))?;
        self.record(path, &serialize_em_condition(&file));
        let t = self.read_tournament(&resolve(path, &file.ambient))?;
        let family = Family::new(Arc::new(t), file.levels);
        Ok((EmCondition::new(file.f, file.interval, family), file.ambient))
    }

    pub fn read_requirement(&mut self, path: &Path) -> CliResult<RequirementTable> {
        let text = self.read_raw(path)?;
        let k = parse_requirement(&text).map_err(|e| malformed(path.display(), e))?;
        self.record(path, &serialize_requirement(&k));
        Ok(k)
    }

    pub fn read_ground(&mut self, path: &Path) -> CliResult<GroundCondition> {
        let text = self.read_raw(path)?;
        let g = parse_ground(&text).map_err(|e| malformed(path.display(), e))?;
        self.record(path, &serialize_ground(&g));
        Ok(g)
    }

    pub fn read_functional(&mut self, path: &Path) -> CliResult<FunctionalTable> {
        let text = self.read_raw(path)?;
        let phi = parse_functional(&text).map_err(|e| malformed(path.display(), e))?;
        self.record(path, &serialize_functional(&phi));
        Ok(phi)
    }

    /// Reads a file whose format has no separate canonical form.
    pub fn read_verbatim(&mut self, path: &Path) -> CliResult<String> {
        let text = self.read_raw(path)?;
        self.record(path, &text);
        Ok(text)
    }

    /// Writes to `path`, or stdout when absent or `-`.
    pub fn write(&mut self, path: Option<&Path>, text: &str) -> CliResult {
        match path {
            Some(p) if p != Path::new("-") => {
                fs::write(p, text).map_err(|e| malformed(p.display(), e))?;
                self.manifest.outputs.insert(p.display().to_string(), sha256_hex(text));
            }
            _ => {
                let mut out = io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(|e| malformed("stdout", e))?;
                self.manifest.outputs.insert("-".into(), sha256_hex(text));
            }
        }
        Ok(())
    }

    pub fn emit_manifest(&self, to: Option<&Path>) {
        let line = serde_json::to_string(&self.manifest).expect("manifest serializes");
        match to {
            Some(p) => {
                if let Err(e) = fs::write(p, format!("{line}\n")) {
                    eprintln!("cannot write manifest {}: {e}", p.display());
                }
            }
            None => eprintln!("{line}"),
        }
    }
}

/// Resolves a reference stored inside `from` relative to its directory.
pub fn resolve(from: &Path, reference: &str) -> PathBuf {
    let r = Path::new(reference);
    if r.is_absolute() {
        return r.to_path_buf();
    }
    match from.parent() {
        Some(dir) if from != Path::new("-") => dir.join(r),
        _ => r.to_path_buf(),
    }
}

pub fn fmt_set<'a>(s: impl IntoIterator<Item = &'a usize>) -> String {
    let items: Vec<String> = s.into_iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// Parses `"0,1,2"` (braces optional) into a vertex set.
pub fn parse_set(text: &str) -> CliResult<rmwb::instances::VertexSet> {
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    inner
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|e| malformed(format!("vertex '{t}'"), e)))
        .collect()
}
