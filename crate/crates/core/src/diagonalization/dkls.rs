use crate::instances::{Tournament, VertexSet};

use super::trace::{replay, Construction, Event, Trace};
use super::{Board, DiagError, StrongArrayApprox};

#[derive(Debug, Clone)]
struct Witness {
    x: usize,
    set: VertexSet,
}

/// Conditions (1)–(3) for `x` as a witness of requirement `e` at stage `s`:
/// `D(x)` has converged, lies below `s`, and every higher-priority witness
/// `y` has `y < x` and a set disjoint from `D(x)`.
fn candidate(arrays: &[StrongArrayApprox], state: &[Vec<Witness>], e: usize, x: usize, s: usize) -> Option<VertexSet> {
    let d = arrays[e].at(x, s)?;
    if d.is_empty() || d.iter().any(|&y| y >= s) {
        return None;
    }
    let clash = state[..e].iter().flatten().any(|w| w.x >= x || !w.set.is_disjoint(&d));
    (!clash).then_some(d)
}

/// Requirement `e` first finds `x₀`, then `x₁ > x₀` with `D(x₁)` disjoint
/// from `D(x₀)` and `T(y₀,y₁)` for all `y₀ ∈ D(x₀)`, `y₁ ∈ D(x₁)`; every later `s` beats `D(x₀)` and loses to
/// `D(x₁)`. Acquiring a witness cancels all lower-priority requirements.
pub fn construct_dkls(arrays: &[StrongArrayApprox], horizon: usize) -> Result<(Tournament, Trace), DiagError> {
    if horizon == 0 {
        return Err(DiagError::Horizon);
    }
    for (id, a) in arrays.iter().enumerate() {
        if let StrongArrayApprox::Table(m) = a {
            if let Some((x, _)) = m.iter().find(|(_, (_, d))| d.is_empty()) {
                return Err(DiagError::Array { id, msg: format!("D({x}) is empty") });
            }
        }
    }
    let mut board = Board::new(horizon);
    let mut state: Vec<Vec<Witness>> = vec![Vec::new(); arrays.len()];
    for s in 1..horizon {
        for e in 0..arrays.len().min(s) {
            let acquired = match state[e].len() {
                0 => {
                    let found = (0..s).find_map(|x| candidate(arrays, &state, e, x, s).map(|d| (x, d)));
                    match found {
                        Some((x, set)) => {
                            for &y in &set {
                                board.write(s, y, s, e);
                            }
                            board.events.push(Event::Witness { s, e, which: 0, x, set: set.clone() });
                            state[e].push(Witness { x, set });
                            true
                        }
                        None => false,
                    }
                }
                1 => {
                    let w0 = state[e][0].clone();
                    let found = (w0.x + 1..s).find_map(|x| {
                        let d = candidate(arrays, &state, e, x, s).filter(|d| d.is_disjoint(&w0.set))?;
                        w0.set.iter().all(|&y0| d.iter().all(|&y1| board.beats(y0, y1))).then_some((x, d))
                    });
                    match found {
                        Some((x, set)) => {
                            board.events.push(Event::Witness { s, e, which: 1, x, set: set.clone() });
                            for &y in &w0.set {
                                board.write(s, s, y, e);
                            }
                            for &y in &set {
                                board.write(s, y, s, e);
                            }
                            state[e].push(Witness { x, set });
                            true
                        }
                        None => {
                            for &y in &w0.set {
                                board.write(s, y, s, e);
                            }
                            false
                        }
                    }
                }
                _ => {
                    let (d0, d1) = (state[e][0].set.clone(), state[e][1].set.clone());
                    for &y in &d0 {
                        board.write(s, s, y, e);
                    }
                    for &y in &d1 {
                        board.write(s, y, s, e);
                    }
                    false
                }
            };
            if acquired {
                for (i, st) in state.iter_mut().enumerate().skip(e + 1) {
                    if !st.is_empty() {
                        st.clear();
                        board.events.push(Event::Cancel { s, e: i });
                    }
                }
            }
        }
        board.defaults(s);
    }
    let trace = Trace { construction: Construction::Dkls, horizon, events: board.events };
    let t = replay(&trace)?;
    Ok((t, trace))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DklsStatus {
    NoWitness,
    SecondPending,
    Verified,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DklsReport {
    pub e: usize,
    pub status: DklsStatus,
    /// Final `(x, stage, D(x))` for the first and second witness.
    pub witnesses: Vec<(usize, usize, VertexSet)>,
    /// Number of pairs `(y₀, y₁)` checked.
    pub pairs: usize,
}

pub fn verify_dkls(t: &Tournament, trace: &Trace, e: usize) -> Result<DklsReport, DiagError> {
    if trace.construction != Construction::Dkls {
        return Err(DiagError::TraceMismatch("not a dkls trace".into()));
    }
    if replay(trace)? != *t {
        return Err(DiagError::TraceMismatch("tournament differs from the replayed trace".into()));
    }
    let mut ws: Vec<(usize, usize, VertexSet)> = Vec::new();
    let mut collision = None;
    for ev in &trace.events {
        match ev {
            Event::Witness { s, e: e2, x, set, .. } if *e2 == e => ws.push((*x, *s, set.clone())),
            Event::Cancel { e: e2, .. } if *e2 == e => ws.clear(),
            Event::Collision { s, from, to, e: e2 } if *e2 == e => collision = Some((*s, *from, *to)),
            _ => {}
        }
    }
    let mut report = DklsReport { e, status: DklsStatus::NoWitness, witnesses: ws.clone(), pairs: 0 };
    match ws.len() {
        0 => return Ok(report),
        1 => {
            report.status = DklsStatus::SecondPending;
            return Ok(report);
        }
        _ => {}
    }
    let fail = |mut r: DklsReport, m: String| {
        r.status = DklsStatus::Failed(m);
        Ok(r)
    };
    let stage = ws[1].1;
    if let Some((s, from, to)) = collision.filter(|c| c.0 >= ws[0].1) {
        return fail(report, format!("write T({from},{to}) refused at stage {s}"));
    }
    for &y0 in &ws[0].2 {
        for &y1 in &ws[1].2 {
            report.pairs += 1;
            if !t.beats(y0, y1) {
                return fail(report, format!("T({y0},{y1}) fails"));
            }
            if let Some(s) = (stage..t.n()).find(|&s| !(t.beats(s, y0) && t.beats(y1, s))) {
                return fail(report, format!("stage {s} does not close a cycle with ({y0},{y1})"));
            }
            let ext: Vec<usize> = (stage..t.n()).filter(|&a| t.is_transitive(&[y0, y1, a])).collect();
            if let Some(a) = ext.first() {
                return fail(report, format!("{a} extends {{{y0},{y1}}} past stage {stage}"));
            }
        }
    }
    report.status = DklsStatus::Verified;
    Ok(report)
}
