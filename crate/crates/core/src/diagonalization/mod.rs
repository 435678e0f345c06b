//! Finite-horizon runs of two priority constructions of tournaments, with
//! replayable traces and per-requirement verification.

mod adversary;
mod dkls;
mod klsw;
mod trace;

use thiserror::Error;

pub use adversary::{
    builtin_adversaries, parse_adversaries, serialize_adversaries, Adversaries, LimitGuesser, StrongArrayApprox,
};
pub use dkls::{construct_dkls, verify_dkls, DklsReport, DklsStatus};
pub use klsw::{construct_klsw, verify_klsw, KlswReport, KlswStatus};
pub use trace::{check_priority, parse_trace, replay, serialize_trace, Construction, Event, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("horizon must be at least 1")]
    Horizon,
    #[error("guesser {id} is declared on [0,{rect})² but the horizon is {horizon}")]
    Rectangle { id: usize, rect: usize, horizon: usize },
    #[error("malformed array {id}: {msg}")]
    Array { id: usize, msg: String },
    #[error("unknown adversary family {0:?}")]
    UnknownFamily(String),
    #[error("trace does not match: {0}")]
    TraceMismatch(String),
}

/// Edge bookkeeping shared by both constructions: `dir[s][x]` for `x < s`
/// is `Some(true)` once `T(x,s)` is declared.
pub(crate) struct Board {
    dir: Vec<Vec<Option<bool>>>,
    pub events: Vec<Event>,
}

impl Board {
    pub fn new(horizon: usize) -> Self {
        Board { dir: (0..horizon).map(|s| vec![None; s]).collect(), events: Vec::new() }
    }

    pub fn beats(&self, u: usize, v: usize) -> bool {
        if u < v {
            self.dir[v][u] == Some(true)
        } else {
            self.dir[u][v] == Some(false)
        }
    }

    /// Declares `T(from,to)` at stage `s` on behalf of requirement `e`;
    /// the first writer of a pair wins.
    pub fn write(&mut self, s: usize, from: usize, to: usize, e: usize) {
        let (lo, hi) = (from.min(to), from.max(to));
        let slot = &mut self.dir[hi][lo];
        if slot.is_some() {
            self.events.push(Event::Collision { s, from, to, e });
        } else {
            *slot = Some(from == lo);
            self.events.push(Event::Edge { s, from, to, e });
        }
    }

    pub fn defaults(&mut self, s: usize) {
        for x in 0..s {
            if self.dir[s][x].is_none() {
                self.dir[s][x] = Some(true);
                self.events.push(Event::Default { s, x });
            }
        }
    }
}
