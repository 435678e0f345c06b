use std::collections::BTreeSet;

use crate::instances::Tournament;

use super::trace::{replay, Construction, Event, Trace};
use super::{Board, DiagError, LimitGuesser};

/// Requirement `e` reads the `2e+2` least points its guesser claims below
/// `s`, takes the two least not used by a higher-priority requirement this
/// stage, and closes a 3-cycle through `s`. Undeclared edges default to
/// `T(x,s)`.
pub fn construct_klsw(guessers: &[LimitGuesser], horizon: usize) -> Result<(Tournament, Trace), DiagError> {
    if horizon == 0 {
        return Err(DiagError::Horizon);
    }
    for (id, g) in guessers.iter().enumerate() {
        if let Some(rect) = g.rect().filter(|&r| r < horizon) {
            return Err(DiagError::Rectangle { id, rect, horizon });
        }
    }
    let mut board = Board::new(horizon);
    for s in 1..horizon {
        let mut used = BTreeSet::new();
        for (e, g) in guessers.iter().enumerate().take(s) {
            let size = 2 * e + 2;
            let group: Vec<usize> = (0..s).filter(|&x| g.claims(x, s)).take(size).collect();
            if group.len() < size {
                continue;
            }
            board.events.push(Event::Claim { s, e, group: group.clone() });
            let free: Vec<usize> = group.iter().copied().filter(|x| !used.contains(x)).take(2).collect();
            let [xi, xj] = free[..] else { continue };
            let (u, w) = if board.beats(xi, xj) { (xi, xj) } else { (xj, xi) };
            board.events.push(Event::Pick { s, e, u, w });
            used.extend([u, w]);
            board.write(s, s, u, e);
            board.write(s, w, s, e);
        }
        board.defaults(s);
    }
    let trace = Trace { construction: Construction::Klsw, horizon, events: board.events };
    let t = replay(&trace)?;
    Ok((t, trace))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KlswStatus {
    NeverActed,
    /// The pair has not been constant for `window` stages before the horizon.
    Unstabilized,
    Verified,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KlswReport {
    pub e: usize,
    pub status: KlswStatus,
    /// First stage from which the chosen pair never changes.
    pub stable_from: Option<usize>,
    pub pair: Option<(usize, usize)>,
    pub group: Vec<usize>,
    /// Points `a` outside the group with `group ∪ {a}` transitive.
    pub extenders: Vec<usize>,
}

impl KlswReport {
    pub fn extension_count(&self) -> usize {
        self.extenders.len()
    }
}

pub fn verify_klsw(t: &Tournament, trace: &Trace, e: usize, window: usize) -> Result<KlswReport, DiagError> {
    if trace.construction != Construction::Klsw {
        return Err(DiagError::TraceMismatch("not a klsw trace".into()));
    }
    if replay(trace)? != *t {
        return Err(DiagError::TraceMismatch("tournament differs from the replayed trace".into()));
    }
    let h = trace.horizon;
    let mut picks: Vec<Option<(usize, usize)>> = vec![None; h];
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); h];
    let mut collision = None;
    for ev in &trace.events {
        match ev {
            Event::Pick { s, e: e2, u, w } if *e2 == e => picks[*s] = Some((*u, *w)),
            Event::Claim { s, e: e2, group } if *e2 == e => groups[*s] = group.clone(),
            Event::Collision { s, from, to, e: e2 } if *e2 == e => collision = Some((*s, *from, *to)),
            _ => {}
        }
    }
    let mut report = KlswReport {
        e,
        status: KlswStatus::NeverActed,
        stable_from: None,
        pair: None,
        group: Vec::new(),
        extenders: Vec::new(),
    };
    if picks.iter().all(Option::is_none) {
        return Ok(report);
    }
    let Some(last) = picks[h - 1] else {
        report.status = KlswStatus::Unstabilized;
        return Ok(report);
    };
    let mut start = h - 1;
    while start > 0 && picks[start - 1] == Some(last) && groups[start - 1] == groups[h - 1] {
        start -= 1;
    }
    report.stable_from = Some(start);
    report.pair = Some(last);
    report.group = groups[h - 1].clone();
    if h - start < window {
        report.status = KlswStatus::Unstabilized;
        return Ok(report);
    }
    if let Some((s, from, to)) = collision {
        report.status = KlswStatus::Failed(format!("write T({from},{to}) refused at stage {s}"));
        return Ok(report);
    }
    let (u, w) = last;
    if let Some(x) = (start..h).find(|&x| !(t.beats(u, w) && t.beats(w, x) && t.beats(x, u))) {
        report.status = KlswStatus::Failed(format!("{{{u},{w},{x}}} is not a 3-cycle"));
        return Ok(report);
    }
    let mut with = report.group.clone();
    report.extenders = (0..h)
        .filter(|a| !report.group.contains(a))
        .filter(|&a| {
            with.push(a);
            let ok = t.is_transitive(&with);
            with.pop();
            ok
        })
        .collect();
    report.status = match report.extenders.iter().find(|&&a| a >= start) {
        Some(a) => KlswStatus::Failed(format!("{a} extends the group past stage {start}")),
        None => KlswStatus::Verified,
    };
    Ok(report)
}
