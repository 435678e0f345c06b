use crate::instances::{content_lines, VertexSet};

use super::requirement::parse_braced;
use super::ForcingError;

/// Which partitions `(P,Q)` of `S_k` are admissible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionPredicate {
    /// Admissible unordered partitions listed per level (`S_1` first).
    Table(Vec<Vec<(VertexSet, VertexSet)>>),
    /// Admissible when neither side contains a listed set.
    AvoidSets(Vec<VertexSet>),
}

impl PartitionPredicate {
    pub fn accepts(&self, level: usize, p: &VertexSet, q: &VertexSet) -> bool {
        match self {
            PartitionPredicate::Table(levels) => levels
                .get(level)
                .is_some_and(|l| l.iter().any(|(a, b)| (a == p && b == q) || (a == q && b == p))),
            PartitionPredicate::AvoidSets(bad) => bad.iter().all(|b| !b.is_subset(p) && !b.is_subset(q)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathNode {
    pub label: VertexSet,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathCase {
    /// `label` repeats from `node` at `level` to the top.
    Persisting { level: usize, node: usize, label: VertexSet },
    /// No label persists; `path` lists node indices from level 0 to the top.
    Growing { path: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathTree {
    pub levels: Vec<Vec<PathNode>>,
    pub extracted: VertexSet,
    pub case: PathCase,
}

fn window(d: usize) -> usize {
    (d / 2 + 1).max(2)
}

/// Builds the tree whose level-`k` nodes are the sides of admissible
/// partitions of `S_{k+1}`, each below the node of its restriction, and
/// extracts a set by the persisting-label / growing-path case split.
pub fn partition_path_tree(chain: &[VertexSet], r: &PartitionPredicate) -> Result<PathTree, ForcingError> {
    if chain.is_empty() {
        return Err(ForcingError::Precondition("empty chain".into()));
    }
    for w in chain.windows(2) {
        if !(w[0].is_subset(&w[1]) && w[0].len() < w[1].len()) {
            return Err(ForcingError::Precondition("chain must be strictly increasing".into()));
        }
    }
    let mut levels: Vec<Vec<PathNode>> = Vec::new();
    for (k, s) in chain.iter().enumerate() {
        if s.len() > 20 {
            return Err(ForcingError::TooLarge(s.len()));
        }
        let elems: Vec<usize> = s.iter().copied().collect();
        let full = (1u64 << elems.len()) - 1;
        let side = |m: u64| -> VertexSet { (0..elems.len()).filter(|i| m >> i & 1 == 1).map(|i| elems[i]).collect() };
        let mut nodes: Vec<PathNode> = Vec::new();
        for m in 0..=full {
            let (p, q) = (side(m), side(full ^ m));
            if p > q || !r.accepts(k, &p, &q) {
                continue;
            }
            for lab in [p, q] {
                if nodes.iter().any(|n| n.label == lab) {
                    continue;
                }
                let parent = if k == 0 {
                    None
                } else {
                    let restricted: VertexSet = lab.intersection(&chain[k - 1]).copied().collect();
                    let pi = levels[k - 1].iter().position(|n| n.label == restricted).ok_or_else(|| {
                        ForcingError::Precondition(format!(
                            "admissible partition at level {} restricts to an inadmissible one",
                            k + 1
                        ))
                    })?;
                    Some(pi)
                };
                nodes.push(PathNode { label: lab, parent });
            }
        }
        if nodes.is_empty() {
            return Err(ForcingError::Precondition(format!("no admissible partition at level {}", k + 1)));
        }
        levels.push(nodes);
    }
    let top = levels.len();
    let w = window(top);
    let mut case = None;
    if top >= w {
        'outer: for n in 0..=top - w {
            let mut order: Vec<usize> = (0..levels[n].len()).collect();
            order.sort_by(|&i, &j| levels[n][i].label.cmp(&levels[n][j].label));
            for delta in order {
                let label = &levels[n][delta].label;
                let mut frontier = vec![delta];
                for m in n + 1..top {
                    frontier = (0..levels[m].len())
                        .filter(|&i| levels[m][i].parent.is_some_and(|p| frontier.contains(&p)) && &levels[m][i].label == label)
                        .collect();
                    if frontier.is_empty() {
                        break;
                    }
                }
                if !frontier.is_empty() {
                    case = Some(PathCase::Persisting { level: n, node: delta, label: label.clone() });
                    break 'outer;
                }
            }
        }
    }
    let (extracted, case) = match case {
        Some(PathCase::Persisting { level, node, label }) => {
            let x: VertexSet = chain[top - 1].difference(&label).copied().collect();
            (x, PathCase::Persisting { level, node, label })
        }
        _ => {
            let last = &levels[top - 1];
            let best = (0..last.len())
                .max_by(|&i, &j| last[i].label.len().cmp(&last[j].label.len()).then(last[j].label.cmp(&last[i].label)))
                .expect("nonempty level");
            let mut path = vec![best];
            let mut cur = best;
            for m in (1..top).rev() {
                cur = levels[m][cur].parent.expect("non-root nodes have parents");
                path.push(cur);
            }
            path.reverse();
            (last[best].label.clone(), PathCase::Growing { path })
        }
    };
    let out = PathTree { levels, extracted, case };
    verify_path_tree(chain, r, &out)?;
    Ok(out)
}

/// Re-checks the extraction: every level it relies on must admit the split
/// between the extracted part and the rest.
pub fn verify_path_tree(chain: &[VertexSet], r: &PartitionPredicate, t: &PathTree) -> Result<(), ForcingError> {
    let fail = |m: String| Err(ForcingError::Audit(m));
    match &t.case {
        PathCase::Persisting { level, label, .. } => {
            for (k, s) in chain.iter().enumerate().skip(*level) {
                let rest: VertexSet = s.difference(label).copied().collect();
                if !r.accepts(k, label, &rest) {
                    return fail(format!("level {} does not admit the persisting split", k + 1));
                }
            }
        }
        PathCase::Growing { path } => {
            for (k, &i) in path.iter().enumerate() {
                let lab = &t.levels[k][i].label;
                let rest: VertexSet = chain[k].difference(lab).copied().collect();
                if !r.accepts(k, lab, &rest) {
                    return fail(format!("level {} does not admit the path label", k + 1));
                }
                if k > 0 && !t.levels[k - 1][path[k - 1]].label.is_subset(lab) {
                    return fail("path labels do not grow".into());
                }
            }
        }
    }
    if let PartitionPredicate::AvoidSets(bad) = r {
        if let Some(b) = bad.iter().find(|b| b.is_subset(&t.extracted)) {
            return fail(format!("extracted set contains the unsafe set {b:?}"));
        }
    }
    Ok(())
}

fn err(line: usize, msg: impl Into<String>) -> ForcingError {
    ForcingError::Parse { line, msg: msg.into() }
}

/// `rmwb-chain v1`, `seq s1 s2 …` (`S_k` is the first `k` elements), then
/// either `bad {a,b}` lines or `accept k: {P}|{Q}` lines.
pub fn parse_chain(text: &str) -> Result<(Vec<VertexSet>, PartitionPredicate), ForcingError> {
    let lines = content_lines(text);
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, "rmwb-chain v1")) => {}
        Some((l, _)) => return Err(err(l, "expected header 'rmwb-chain v1'")),
        None => return Err(err(1, "empty input")),
    }
    let seq: Vec<usize> = match it.next() {
        Some((l, s)) => s
            .strip_prefix("seq")
            .ok_or_else(|| err(l, "expected 'seq s1 s2 …'"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(l, format!("bad vertex '{t}'"))))
            .collect::<Result<_, _>>()?,
        None => return Err(err(2, "missing seq line")),
    };
    let chain: Vec<VertexSet> = (1..=seq.len()).map(|k| seq[..k].iter().copied().collect()).collect();
    let mut bad = Vec::new();
    let mut table: Vec<Vec<(VertexSet, VertexSet)>> = vec![Vec::new(); chain.len()];
    let mut saw_table = false;
    for (l, s) in it {
        if let Some(rest) = s.strip_prefix("bad ") {
            bad.push(parse_braced(l, rest)?.0.into_iter().collect());
        } else if let Some(rest) = s.strip_prefix("accept ") {
            let (k, body) = rest.split_once(':').ok_or_else(|| err(l, "expected 'accept k: {P}|{Q}'"))?;
            let k: usize = k.trim().parse().map_err(|_| err(l, "bad level"))?;
            if k == 0 || k > chain.len() {
                return Err(err(l, format!("level {k} outside 1..={}", chain.len())));
            }
            let (p, tail) = parse_braced(l, body)?;
            let tail = tail.trim_start().strip_prefix('|').ok_or_else(|| err(l, "expected '|'"))?;
            let (q, _) = parse_braced(l, tail)?;
            table[k - 1].push((p.into_iter().collect(), q.into_iter().collect()));
            saw_table = true;
        } else {
            return Err(err(l, format!("unrecognized line '{s}'")));
        }
    }
    if saw_table && !bad.is_empty() {
        return Err(err(1, "mix of 'bad' and 'accept' lines"));
    }
    Ok((chain, if saw_table { PartitionPredicate::Table(table) } else { PartitionPredicate::AvoidSets(bad) }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> VertexSet {
        xs.iter().copied().collect()
    }

    fn chain(m: usize) -> Vec<VertexSet> {
        (1..=m).map(|k| (0..k).collect()).collect()
    }

    #[test]
    fn accept_all_persists_the_empty_label() {
        let t = partition_path_tree(&chain(4), &PartitionPredicate::AvoidSets(vec![])).unwrap();
        assert_eq!(t.case, PathCase::Persisting { level: 0, node: 0, label: set(&[]) });
        assert_eq!(t.extracted, set(&[0, 1, 2, 3]));
    }

    #[test]
    fn alternating_splits_grow_both_labels() {
        let c = chain(4);
        let levels = (0..4)
            .map(|k| {
                let odd: VertexSet = (0..=k).filter(|i| i % 2 == 0).collect();
                let even: VertexSet = (0..=k).filter(|i| i % 2 == 1).collect();
                vec![(odd, even)]
            })
            .collect();
        let t = partition_path_tree(&c, &PartitionPredicate::Table(levels)).unwrap();
        match &t.case {
            PathCase::Growing { path } => assert_eq!(path.len(), 4),
            other => panic!("{other:?}"),
        }
        assert_eq!(t.extracted, set(&[0, 2]));
    }

    #[test]
    fn missing_level_is_a_precondition_error() {
        let c = chain(3);
        let levels = vec![vec![(set(&[0]), set(&[]))], vec![], vec![]];
        assert!(matches!(
            partition_path_tree(&c, &PartitionPredicate::Table(levels)),
            Err(ForcingError::Precondition(_))
        ));
    }

    #[test]
    fn avoided_pairs_are_never_extracted() {
        let bad = vec![set(&[0, 1]), set(&[1, 2]), set(&[2, 3])];
        let t = partition_path_tree(&chain(5), &PartitionPredicate::AvoidSets(bad.clone())).unwrap();
        assert!(bad.iter().all(|b| !b.is_subset(&t.extracted)));
        assert!(t.extracted.len() >= 2);
    }

    #[test]
    fn chain_file() {
        let (c, r) = parse_chain("rmwb-chain v1\nseq 3 1 4\nbad {3,1}\n").unwrap();
        assert_eq!(c[2], set(&[1, 3, 4]));
        assert_eq!(r, PartitionPredicate::AvoidSets(vec![set(&[1, 3])]));
        let (_, r) = parse_chain("rmwb-chain v1\nseq 0 1\naccept 2: {0}|{1}\n").unwrap();
        assert!(r.accepts(1, &set(&[1]), &set(&[0])));
        assert!(parse_chain("rmwb-chain v1\nseq 0\naccept 3: {0}|{}\n").is_err());
    }
}
