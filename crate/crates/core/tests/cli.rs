use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const GOLDEN_M2: &str = include_str!("data/worked_example.m2");

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_writeright"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn writeright")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, contents).unwrap();
    p
}

const SENTENCES: [(&str, u32); 8] = [
    ("It is good there.", 0),
    ("We like the school.", 0),
    ("They have a big house.", 0),
    ("I gess almost people cannot speaking English.", 3),
    ("She go to school evry day.", 2),
    ("He have many freind.", 2),
    ("My familly is very happpy.", 2),
    ("The weather is nice today.", 0),
];

/// Eight prompts, six essays each, scored 10 minus the planted error count.
fn essay_tsv() -> String {
    let mut s = String::from("essay_id\tessay_set\tessay\tdomain1_score\n");
    for p in 1..=8usize {
        for i in 0..6usize {
            let picked: Vec<_> = (0..3).map(|k| SENTENCES[(p * 3 + i * 5 + k * 7) % 8]).collect();
            let text = picked.iter().map(|(t, _)| *t).collect::<Vec<_>>().join(" ");
            let errors: u32 = picked.iter().map(|(_, e)| e).sum();
            let _ = writeln!(s, "{p}{i:02}\t{p}\t{text}\t{}", 10 - errors.min(10));
        }
    }
    s
}

#[test]
fn extract_edits_matches_golden_m2() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir, "src.txt", "I gess almost people cannot speaking English.\n");
    write(&dir, "tgt.txt", "I guess most people cannot speak English.\n");
    ok(dir.path(), &["extract-edits", "--src", "src.txt", "--tgt", "tgt.txt", "--out", "out.m2"]);
    assert_eq!(fs::read_to_string(dir.path().join("out.m2")).unwrap(), GOLDEN_M2);
    let stdout = ok(dir.path(), &["extract-edits", "--src", "src.txt", "--tgt", "tgt.txt"]);
    assert_eq!(stdout, GOLDEN_M2);
}

#[test]
fn evaluate_gec_reports_f05() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir, "gold.m2", GOLDEN_M2);
    let same = ok(dir.path(), &["evaluate-gec", "--hyp", "gold.m2", "--gold", "gold.m2", "--report", "r.json"]);
    assert!(same.contains("F0.5: 1.0000"), "{same}");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["tp"], 3);

    // two of three gold edits proposed plus one wrong edit: P = R = 2/3
    write(
        &dir,
        "hyp.m2",
        "S I gess almost people cannot speaking English .\n\
         A 1 2|||R:SPELL|||guess|||REQUIRED|||-NONE-|||0\n\
         A 2 3|||R:OTHER|||most|||REQUIRED|||-NONE-|||0\n\
         A 6 7|||R:OTHER|||english|||REQUIRED|||-NONE-|||0\n\n",
    );
    let partial = ok(dir.path(), &["evaluate-gec", "--hyp", "hyp.m2", "--gold", "gold.m2"]);
    assert!(partial.contains("TP: 2\nFP: 1\nFN: 1"), "{partial}");
    assert!(partial.contains("F0.5: 0.6667"), "{partial}");
}

#[test]
fn correct_then_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir, "in.txt", "I gess almost people cannot speaking English.\nIt is good there.\n");
    let out = ok(dir.path(), &["correct", "--input", "in.txt", "--m2", "hyp.m2", "--report", "r.json"]);
    assert_eq!(out, "I guess most people cannot speak English .\nIt is good there .\n");
    let hyp = fs::read_to_string(dir.path().join("hyp.m2")).unwrap();
    assert!(hyp.starts_with(GOLDEN_M2), "{hyp}");
    assert!(hyp.ends_with("A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n\n"));
    write(&dir, "gold.m2", &format!("{GOLDEN_M2}S It is good there .\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n\n"));
    let eval = ok(dir.path(), &["evaluate-gec", "--hyp", "hyp.m2", "--gold", "gold.m2"]);
    assert!(eval.contains("F0.5: 1.0000"), "{eval}");
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["no-such-command"][..], &["extract-edits", "--src", "a.txt"], &["eval-qwk", "--gold", "g", "--pred", "p", "--min", "1"]] {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn data_errors_exit_1_with_location() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir, "bad.m2", "S a b\nA x 2|||R:OTHER|||c|||REQUIRED|||-NONE-|||0\n\n");
    let out = run(dir.path(), &["evaluate-gec", "--hyp", "bad.m2", "--gold", "bad.m2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.m2:2:"), "{err}");

    write(&dir, "g.txt", "1\n2\nthree\n");
    let out = run(dir.path(), &["eval-qwk", "--gold", "g.txt", "--pred", "g.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g.txt:3:"));

    let out = run(dir.path(), &["correct", "--input", "missing.txt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eval_qwk_prints_kappa() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir, "g.txt", "0\n1\n");
    write(&dir, "p.txt", "1\n0\n");
    assert_eq!(ok(dir.path(), &["eval-qwk", "--gold", "g.txt", "--pred", "p.txt"]), "QWK: -1.0000\n");
    assert_eq!(ok(dir.path(), &["eval-qwk", "--gold", "g.txt", "--pred", "g.txt"]), "QWK: 1.0000\n");
}

#[test]
fn scoring_workflow_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir, "essays.tsv", &essay_tsv());
    write(&dir, "corpus.txt", "It is good there.\nWe like the school.\nThey have a big house.\n");
    let mut ranges = String::new();
    for p in 1..=8 {
        let _ = writeln!(ranges, "{p}\toverall\t0\t10");
    }
    write(&dir, "ranges.tsv", &ranges);

    ok(dir.path(), &["train-lm", "--input", "corpus.txt", "--order", "2", "--out", "lm.json"]);
    let featurize = ["featurize", "--data", "essays.tsv", "--lm", "lm.json", "--out"];
    ok(dir.path(), &[&featurize[..], &["f1.jsonl"]].concat());
    ok(dir.path(), &[&featurize[..], &["f2.jsonl"]].concat());
    let f1 = fs::read_to_string(dir.path().join("f1.jsonl")).unwrap();
    assert_eq!(f1, fs::read_to_string(dir.path().join("f2.jsonl")).unwrap());
    assert_eq!(f1.lines().count(), 48);
    let first: serde_json::Value = serde_json::from_str(f1.lines().next().unwrap()).unwrap();
    assert!(first["features"]["values"]["fluency"].as_f64().unwrap() > 0.0);
    assert!(first["features"]["values"].get("d_level").is_none());

    for out in ["m1.json", "m2.json"] {
        ok(dir.path(), &["train-awe", "--features", "f1.jsonl", "--ranges", "ranges.tsv", "--lambda", "0.1", "--out", out]);
    }
    let model = fs::read_to_string(dir.path().join("m1.json")).unwrap();
    assert_eq!(model, fs::read_to_string(dir.path().join("m2.json")).unwrap());

    let table = ok(dir.path(), &["score", "--model", "m1.json", "--features", "f1.jsonl", "--out", "scores.jsonl"]);
    assert_eq!(table.lines().count(), 49);
    let scores = fs::read_to_string(dir.path().join("scores.jsonl")).unwrap();
    for line in scores.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let s = &v["scores"];
        let all: Vec<f64> = std::iter::once(&s["overall"])
            .chain(s["rubrics"].as_object().unwrap().values())
            .map(|x| x.as_f64().unwrap())
            .collect();
        assert_eq!(all.len(), 9);
        assert!(all.iter().all(|x| (0.0..=100.0).contains(x)), "{line}");
    }

    let report = ok(
        dir.path(),
        &["cross-prompt", "--data", "essays.tsv", "--ranges", "ranges.tsv", "--lambdas", "0.1,1", "--report", "cp.json"],
    );
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines.len(), 2, "{report}");
    assert!(lines[0].starts_with("Prompt") && lines[0].ends_with("Avg"));
    assert_eq!(lines[1].split_whitespace().count(), 10);
    let cp: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("cp.json")).unwrap()).unwrap();
    assert_eq!(cp["folds"].as_array().unwrap().len(), 8);
}

#[test]
fn denoise_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir, "in.txt", "Dear @CAPS1, I met @PERSON1 in @LOCATION1.\nNo placeholders here.\n");
    let a = ok(dir.path(), &["--seed", "3", "denoise", "--input", "in.txt", "--report", "r.json"]);
    let b = ok(dir.path(), &["--seed", "3", "denoise", "--input", "in.txt"]);
    assert_eq!(a, b);
    assert!(!a.contains("@PERSON1") && !a.contains("@LOCATION1"), "{a}");
    assert!(a.lines().nth(1).unwrap().starts_with("No placeholders here"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report[0]["is_noisy"], true);
    assert_eq!(report[1]["is_noisy"], false);
}
