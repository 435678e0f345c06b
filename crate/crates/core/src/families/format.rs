use super::{Family, FamilyError};
use crate::instances::{content_lines, VertexSet};

/// Parsed family file: the ambient reference is resolved by the caller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyFile {
    pub ambient: String,
    pub levels: Vec<Vec<VertexSet>>,
}

fn err(line: usize, msg: impl Into<String>) -> FamilyError {
    FamilyError::Parse { line, msg: msg.into() }
}

fn parse_sets(line: usize, text: &str) -> Result<Vec<VertexSet>, FamilyError> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('{').ok_or_else(|| err(line, "expected '{'"))?;
        let close = body.find('}').ok_or_else(|| err(line, "unclosed '{'"))?;
        let inner = body[..close].trim();
        let mut set = VertexSet::new();
        if !inner.is_empty() {
            for tok in inner.split(',') {
                let v: usize = tok.trim().parse().map_err(|_| err(line, format!("bad vertex '{}'", tok.trim())))?;
                set.insert(v);
            }
        }
        out.push(set);
        rest = body[close + 1..].trim_start();
    }
    Ok(out)
}

pub fn parse_family(text: &str) -> Result<FamilyFile, FamilyError> {
    let lines = content_lines(text);
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, "rmwb-fam v1")) => {}
        Some((l, _)) => return Err(err(l, "expected header 'rmwb-fam v1'")),
        None => return Err(err(1, "empty input")),
    }
    let ambient = match it.next() {
        Some((l, s)) => s
            .strip_prefix("ambient ")
            .map(|r| r.trim().to_string())
            .filter(|r| !r.is_empty())
            .ok_or_else(|| err(l, "expected 'ambient <path>'"))?,
        None => return Err(err(2, "missing ambient line")),
    };
    let mut levels = Vec::new();
    for (l, s) in it {
        let (head, body) = s.split_once(':').ok_or_else(|| err(l, "expected 'level k:'"))?;
        let k: usize = head
            .strip_prefix("level ")
            .and_then(|k| k.trim().parse().ok())
            .ok_or_else(|| err(l, "expected 'level k:'"))?;
        if k != levels.len() {
            return Err(err(l, format!("expected level {}, found {k}", levels.len())));
        }
        levels.push(parse_sets(l, body)?);
    }
    Ok(FamilyFile { ambient, levels })
}

pub fn serialize_family(s: &Family, ambient: &str) -> String {
    let mut out = format!("rmwb-fam v1\nambient {ambient}\n");
    for (k, level) in s.levels().iter().enumerate() {
        out.push_str(&format!("level {k}:"));
        for e in level {
            let items: Vec<String> = e.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!(" {{{}}}", items.join(",")));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::random_family;

    #[test]
    fn round_trip() {
        let s = random_family(30, 6, 3, 9);
        let text = serialize_family(&s, "amb.txt");
        let f = parse_family(&text).unwrap();
        assert_eq!(f.ambient, "amb.txt");
        assert_eq!(f.levels, s.levels());
    }

    #[test]
    fn example_and_errors() {
        let f = parse_family("rmwb-fam v1\nambient t.txt\n# c\nlevel 0: {0,1} {2}\nlevel 1: {} {0,1,3}\n").unwrap();
        assert_eq!(f.levels[0], vec![VertexSet::from([0, 1]), VertexSet::from([2])]);
        assert_eq!(f.levels[1][0], VertexSet::new());
        assert_eq!(
            parse_family("rmwb-fam v1\nambient t\nlevel 1: {0}\n"),
            Err(err(3, "expected level 0, found 1"))
        );
        assert!(matches!(
            parse_family("rmwb-fam v1\nambient t\nlevel 0: {0,x}\n"),
            Err(FamilyError::Parse { line: 3, .. })
        ));
    }
}
