use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use rmwb::instances::{parse_instance, Instance};
use rmwb::reductions::{check_solution, parse_solution, SolutionKind};

fn rmwb(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmwb")).current_dir(dir).args(args).output().expect("binary runs")
}

fn rmwb_stdin(dir: &Path, args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rmwb"))
        .current_dir(dir)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gen_then_solve_transitive() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&rmwb(d.path(), &["gen", "--kind", "tournament", "--n", "6", "--seed", "7", "-o", "t.rmwb"])), 0);
    let o = rmwb(d.path(), &["solve", "--problem", "transitive", "-i", "t.rmwb"]);
    assert_eq!(code(&o), 0);
    let sol = parse_solution(&stdout(&o)).unwrap();
    let t = parse_instance(&fs::read_to_string(d.path().join("t.rmwb")).unwrap()).unwrap();
    assert_eq!(sol.kind, SolutionKind::Transitive);
    check_solution(&t, &sol).unwrap();
    assert!(sol.len() >= 3);
}

#[test]
fn col2tour_then_tour2col_complements() {
    let d = tempfile::tempdir().unwrap();
    rmwb(d.path(), &["gen", "--kind", "coloring", "--n", "9", "--seed", "5", "-o", "c.rmwb"]);
    let tour = rmwb(d.path(), &["reduce", "--rule", "col2tour", "-i", "c.rmwb"]);
    assert_eq!(code(&tour), 0);
    let back = rmwb_stdin(d.path(), &["reduce", "--rule", "tour2col"], &tour.stdout);
    assert_eq!(code(&back), 0);
    let Instance::Coloring(c) = parse_instance(&fs::read_to_string(d.path().join("c.rmwb")).unwrap()).unwrap() else {
        panic!()
    };
    let Instance::Coloring(b) = parse_instance(&stdout(&back)).unwrap() else { panic!() };
    for i in 0..9 {
        for j in i + 1..9 {
            assert_eq!(b.color(i, j), 1 - c.color(i, j));
        }
    }
}

#[test]
fn transitive_pulls_back_to_homogeneous() {
    let d = tempfile::tempdir().unwrap();
    rmwb(d.path(), &["gen", "--kind", "coloring", "--n", "10", "--seed", "11", "-o", "c.rmwb"]);
    rmwb(d.path(), &["reduce", "--rule", "col2tour", "-i", "c.rmwb", "-o", "t.rmwb"]);
    rmwb(d.path(), &["solve", "--problem", "transitive", "-i", "t.rmwb", "-o", "s.sol"]);
    let o = rmwb(d.path(), &["pullback", "--rule", "trans2hom", "-i", "c.rmwb", "-s", "s.sol"]);
    assert_eq!(code(&o), 0);
    let h = parse_solution(&stdout(&o)).unwrap();
    let c = parse_instance(&fs::read_to_string(d.path().join("c.rmwb")).unwrap()).unwrap();
    check_solution(&c, &h).unwrap();

    // A transitive claim that is not transitive is a violated property.
    fs::write(d.path().join("bad.sol"), "rmwb-sol v1\nkind transitive\n0 1 2 3 4 5 6 7 8 9\n").unwrap();
    let t = parse_instance(&fs::read_to_string(d.path().join("t.rmwb")).unwrap()).unwrap();
    let bad = parse_solution("rmwb-sol v1\nkind transitive\n0 1 2 3 4 5 6 7 8 9\n").unwrap();
    if check_solution(&t, &bad).is_err() {
        let o = rmwb(d.path(), &["pullback", "--rule", "trans2hom", "-i", "c.rmwb", "-s", "bad.sol"]);
        assert_eq!(code(&o), 1);
    }
}

#[test]
fn poset_and_order_pullbacks() {
    let d = tempfile::tempdir().unwrap();
    rmwb(d.path(), &["gen", "--kind", "linorder", "--n", "9", "--seed", "2", "-o", "l.rmwb"]);
    rmwb(d.path(), &["reduce", "--rule", "lin2poset", "-i", "l.rmwb", "-o", "p.rmwb"]);
    rmwb(d.path(), &["solve", "--problem", "antichain", "-i", "p.rmwb", "-o", "a.sol"]);
    let o = rmwb(d.path(), &["pullback", "--rule", "ca2mono", "-i", "l.rmwb", "-s", "a.sol"]);
    assert_eq!(code(&o), 0);
    assert_eq!(parse_solution(&stdout(&o)).unwrap().kind, SolutionKind::Descending);

    rmwb(d.path(), &["reduce", "--rule", "poset2col", "-i", "p.rmwb", "-o", "pc.rmwb"]);
    rmwb(d.path(), &["solve", "--problem", "homogeneous", "-i", "pc.rmwb", "-o", "h.sol"]);
    let o = rmwb(d.path(), &["pullback", "--rule", "hom2ca", "-i", "p.rmwb", "-s", "h.sol"]);
    assert_eq!(code(&o), 0);
    let s = parse_solution(&stdout(&o)).unwrap();
    assert!(matches!(s.kind, SolutionKind::Chain | SolutionKind::Antichain));
}

#[test]
fn klsw_construct_then_verify() {
    let d = tempfile::tempdir().unwrap();
    let o = rmwb(d.path(), &["construct", "klsw", "--builtin", "klsw-suite", "--horizon", "500", "--trace", "tr.log"]);
    assert_eq!(code(&o), 0);
    let o = rmwb(d.path(), &["verify", "klsw", "--trace", "tr.log", "--e", "0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("Verified"));

    // Too short a horizon for the last guesser to settle: budget exhausted.
    rmwb(d.path(), &["construct", "klsw", "--builtin", "klsw-suite", "--horizon", "150", "--trace", "short.log"]);
    let o = rmwb(d.path(), &["verify", "klsw", "--trace", "short.log"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn dkls_verify_detects_tampering() {
    let d = tempfile::tempdir().unwrap();
    let o = rmwb(d.path(), &["construct", "dkls", "--builtin", "dkls-suite", "--horizon", "300", "--trace", "tr.log", "-o", "t.rmwb"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&rmwb(d.path(), &["verify", "dkls", "--trace", "tr.log"])), 0);

    let text = fs::read_to_string(d.path().join("tr.log")).unwrap();
    let pos = text.find("\nDEFAULT").unwrap();
    let end = text[pos + 1..].find('\n').unwrap() + pos + 1;
    fs::write(d.path().join("cut.log"), format!("{}{}", &text[..pos], &text[end..])).unwrap();
    let o = rmwb(d.path(), &["verify", "dkls", "--trace", "cut.log"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("never declared"));
}

#[test]
fn malformed_inputs_exit_2() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&rmwb(d.path(), &["frobnicate"])), 2);
    fs::write(d.path().join("x.rmwb"), "rmwb v1\nkind tournament\nn 3\n11\n").unwrap();
    assert_eq!(code(&rmwb(d.path(), &["solve", "--problem", "transitive", "-i", "x.rmwb"])), 2);
    assert_eq!(code(&rmwb(d.path(), &["solve", "--problem", "transitive", "-i", "missing.rmwb"])), 2);
    rmwb(d.path(), &["gen", "--kind", "poset", "--n", "4", "-o", "p.rmwb"]);
    assert_eq!(code(&rmwb(d.path(), &["solve", "--problem", "transitive", "-i", "p.rmwb"])), 2);
}

#[test]
fn manifest_records_digests_and_code() {
    let d = tempfile::tempdir().unwrap();
    rmwb(d.path(), &["gen", "--kind", "tournament", "--n", "5", "--seed", "3", "-o", "t.rmwb"]);
    let o = rmwb(d.path(), &["--manifest", "m.json", "solve", "--problem", "transitive", "-i", "t.rmwb", "-o", "s.sol"]);
    assert_eq!(code(&o), 0);
    assert!(o.stderr.is_empty());
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("m.json")).unwrap()).unwrap();
    assert_eq!(m["code"], 0);
    assert_eq!(m["inputs"]["t.rmwb"].as_str().unwrap().len(), 64);
    assert!(m["outputs"]["s.sol"].is_string());

    let o = rmwb(d.path(), &["gen", "--kind", "tournament", "--n", "5", "--seed", "3", "-o", "u.rmwb"]);
    let line = String::from_utf8(o.stderr).unwrap();
    let m: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(m["seed"], 3);
    assert_eq!(fs::read(d.path().join("t.rmwb")).unwrap(), fs::read(d.path().join("u.rmwb")).unwrap());
}

#[test]
fn batch_output_is_independent_of_jobs() {
    let d = tempfile::tempdir().unwrap();
    for sub in [["reductions", "60"], ["family-split", "12"], ["settle", "10"], ["format", "60"]] {
        let one = rmwb(d.path(), &["verify", sub[0], "--count", sub[1], "--jobs", "1"]);
        let four = rmwb(d.path(), &["verify", sub[0], "--count", sub[1], "--jobs", "4"]);
        assert_eq!(code(&one), 0, "{sub:?}: {}", String::from_utf8_lossy(&one.stderr));
        assert_eq!(one.stdout, four.stdout);
    }
}

#[test]
fn family_pipeline() {
    let d = tempfile::tempdir().unwrap();
    let o = rmwb(d.path(), &["gen", "--kind", "family", "--n", "30", "--seed", "4", "--ambient", "amb.rmwb", "-o", "f.fam"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&rmwb(d.path(), &["family", "validate", "--family", "f.fam"])), 0);
    let text = fs::read_to_string(d.path().join("f.fam")).unwrap();
    let level0 = text.lines().find_map(|l| l.strip_prefix("level 0: ")).unwrap();
    let first = &level0[..=level0.find('}').unwrap()];
    let o = rmwb(d.path(), &["family", "split", "--family", "f.fam", "--level", "0", "--set", first, "-o", "s.fam"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&rmwb(d.path(), &["family", "validate", "--family", "s.fam"])), 0);
    let o = rmwb(d.path(), &["family", "refine", "--family", "f.fam", "--modulo", "2", "-o", "r.fam"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(d.path().join("r.fam")).unwrap().starts_with("# label"));

    fs::write(d.path().join("broken.fam"), "rmwb-fam v1\nambient amb.rmwb\nlevel 0: {5}\nlevel 1: {1}\n").unwrap();
    assert_eq!(code(&rmwb(d.path(), &["family", "validate", "--family", "broken.fam"])), 1);
}

#[test]
fn ground_decide_and_diagonalize() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("empty.gc"), "rmwb-gc v1\nkind poset\nastar\nbstar\n").unwrap();
    fs::write(d.path().join("phi.fun"), "rmwb-fun v1\nkind poset\nfire 5 1\nfire 9 1\n").unwrap();
    let o = rmwb(d.path(), &["forcing", "diag", "--ground", "empty.gc", "--table", "phi.fun", "--budget", "10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("# a 5 (entry 0) b 9 (entry 1)"));

    fs::write(d.path().join("none.fun"), "rmwb-fun v1\nkind poset\n").unwrap();
    let o = rmwb(d.path(), &["forcing", "diag", "--ground", "empty.gc", "--table", "none.fun", "--budget", "0"]);
    assert_eq!(code(&o), 3);

    let o = rmwb(d.path(), &["forcing", "decide", "--ground", "empty.gc", "--i", "0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("bstar 0"));
}

#[test]
fn settle_essential_and_density_violation() {
    let d = tempfile::tempdir().unwrap();
    rmwb(d.path(), &["gen", "--kind", "tournament", "--n", "16", "--seed", "9", "-o", "amb.rmwb"]);
    let levels: String = (0..8)
        .map(|k| {
            let set: Vec<String> = (0..=k).map(|v| v.to_string()).collect();
            format!("level {k}: {{{}}}\n", set.join(","))
        })
        .collect();
    fs::write(d.path().join("q.emc"), format!("rmwb-emc v1\nambient amb.rmwb\nF {{}}\nI (-inf, +inf)\n{levels}")).unwrap();
    fs::write(d.path().join("k.req"), "rmwb-req v1\nflavor em\nbuiltin total\na * 0\n").unwrap();
    let o = rmwb(d.path(), &["forcing", "settle", "--condition", "q.emc", "--requirement", "k.req", "-o", "out.emc"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(d.path().join("out.emc")).unwrap().starts_with("# Essential"));

    fs::write(d.path().join("v.req"), "rmwb-req v1\nflavor em\nbuiltin total\nbstar\na * 0\n").unwrap();
    let o = rmwb(d.path(), &["forcing", "settle", "--condition", "q.emc", "--requirement", "v.req"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn partition_tree_report() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("c.chain"), "rmwb-chain v1\nseq 3 1 4 0 2\nbad {3,1}\n").unwrap();
    let o = rmwb(d.path(), &["forcing", "tree", "--chain", "c.chain"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("level 0:"));
    assert!(out.lines().any(|l| l.starts_with("extracted ")));
}
