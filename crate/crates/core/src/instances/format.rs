use super::{Coloring, Instance, InstanceError, Kind, LinearOrder, Poset, Tournament};

/// Non-comment lines with their 1-based line numbers. A single trailing
/// newline is allowed.
pub fn content_lines(text: &str) -> Vec<(usize, &str)> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    body.split('\n')
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#'))
        .map(|(i, l)| (i + 1, l))
        .collect()
}

fn perr(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let lines = content_lines(text);
    let mut it = lines.iter().copied();
    let last_line = lines.last().map(|l| l.0).unwrap_or(1);

    let (ln, magic) = it.next().ok_or_else(|| perr(1, "empty input"))?;
    if magic != "rmwb v1" {
        return Err(perr(ln, format!("expected header \"rmwb v1\", found {magic:?}")));
    }
    let (ln, kind_line) = it.next().ok_or_else(|| perr(last_line, "missing kind line"))?;
    let kind = kind_line
        .strip_prefix("kind ")
        .and_then(Kind::parse)
        .ok_or_else(|| perr(ln, format!("bad kind line {kind_line:?}")))?;
    let (ln, n_line) = it.next().ok_or_else(|| perr(last_line, "missing n line"))?;
    let n: usize = n_line
        .strip_prefix("n ")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| perr(ln, format!("bad n line {n_line:?}")))?;
    if n == 0 {
        return Err(perr(ln, "n must be at least 1"));
    }
    let body: Vec<(usize, &str)> = it.collect();

    let expected = match kind {
        Kind::Tournament | Kind::Coloring => n - 1,
        Kind::Poset => n,
        Kind::LinOrder => 1,
    };
    if body.len() != expected {
        let at = body.get(expected).map(|b| b.0).unwrap_or(last_line);
        return Err(perr(
            at,
            format!("expected {expected} body lines for {kind} with n={n}, found {}", body.len()),
        ));
    }

    match kind {
        Kind::Tournament | Kind::Coloring => {
            let mut bits = Vec::with_capacity(super::pair_count(n));
            for (i, &(ln, row)) in body.iter().enumerate() {
                let want = n - 1 - i;
                if row.len() != want {
                    return Err(perr(ln, format!("row {i} must have {want} characters, found {}", row.len())));
                }
                for ch in row.chars() {
                    match ch {
                        '0' => bits.push(false),
                        '1' => bits.push(true),
                        _ => return Err(perr(ln, format!("unexpected character {ch:?}"))),
                    }
                }
            }
            if kind == Kind::Coloring {
                Ok(Instance::Coloring(Coloring::from_pair_bits(n, &bits)))
            } else {
                let mut k = 0;
                Ok(Instance::Tournament(Tournament::from_fn(n, |_, _| {
                    k += 1;
                    bits[k - 1]
                })))
            }
        }
        Kind::Poset => {
            let mut rel = vec![vec![false; n]; n];
            for (i, &(ln, row)) in body.iter().enumerate() {
                if row.len() != n {
                    return Err(perr(ln, format!("row {i} must have {n} characters, found {}", row.len())));
                }
                for (j, ch) in row.chars().enumerate() {
                    rel[i][j] = match ch {
                        '0' => false,
                        '1' => true,
                        _ => return Err(perr(ln, format!("unexpected character {ch:?}"))),
                    };
                }
            }
            let raw = Poset::raw(n, &rel);
            if let Err((row, msg)) = raw.check_axioms() {
                return Err(perr(body[row].0, format!("poset axiom violated: {msg}")));
            }
            Ok(Instance::Poset(Poset::from_fn(n, |i, j| rel[i][j]).expect("checked")))
        }
        Kind::LinOrder => {
            let (ln, row) = body[0];
            let mut listing = Vec::with_capacity(n);
            for tok in row.split(' ') {
                let v: usize = tok
                    .parse()
                    .map_err(|_| perr(ln, format!("bad vertex id {tok:?}")))?;
                listing.push(v);
            }
            if listing.len() != n {
                return Err(perr(ln, format!("expected {n} vertex ids, found {}", listing.len())));
            }
            LinearOrder::from_listing(listing)
                .map(Instance::LinOrder)
                .map_err(|_| perr(ln, "listing is not a permutation"))
        }
    }
}

impl Poset {
    /// Unchecked relation, used only to locate axiom violations.
    fn raw(n: usize, rel: &[Vec<bool>]) -> Poset {
        let mut leq = fixedbitset::FixedBitSet::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                leq.set(i * n + j, rel[i][j]);
            }
        }
        Poset {
            n,
            leq,
            order_respecting: false,
        }
    }
}

pub fn serialize_instance(x: &Instance) -> String {
    let n = x.n();
    let mut out = format!("rmwb v1\nkind {}\nn {}\n", x.kind(), n);
    match x {
        Instance::Tournament(t) => {
            for i in 0..n.saturating_sub(1) {
                for j in i + 1..n {
                    out.push(if t.beats(i, j) { '1' } else { '0' });
                }
                out.push('\n');
            }
        }
        Instance::Coloring(c) => {
            for i in 0..n.saturating_sub(1) {
                for j in i + 1..n {
                    out.push(if c.color(i, j) == 1 { '1' } else { '0' });
                }
                out.push('\n');
            }
        }
        Instance::Poset(p) => {
            for i in 0..n {
                for j in 0..n {
                    out.push(if p.leq(i, j) { '1' } else { '0' });
                }
                out.push('\n');
            }
        }
        Instance::LinOrder(l) => {
            let ids: Vec<String> = l.listing().iter().map(|v| v.to_string()).collect();
            out.push_str(&ids.join(" "));
            out.push('\n');
        }
    }
    out
}
