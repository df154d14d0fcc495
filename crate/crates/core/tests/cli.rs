mod common;

use std::path::Path;
use std::process::Command;

use wordvec::model_io::{self, load_sidecar, sidecar_path};

fn wordvec(args: &[&str]) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_wordvec"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "wordvec {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn train_eval_convert_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.txt");
    std::fs::write(&corpus, common::markov_text(20_000, 60, 0.7, 41)).unwrap();
    let questions = dir.path().join("q.txt");
    std::fs::write(
        &questions,
        ": family\nw1 w2 w3 w4\nw5 w6 w7 w8\n: gram1-x\nw1 w2 w9 zzz\n",
    )
    .unwrap();
    let model = dir.path().join("m.bin");
    let curve = dir.path().join("curve.csv");

    wordvec(&[
        "train",
        "--input",
        p(&corpus),
        "--output",
        p(&model),
        "--lfw",
        "eq4",
        "--window",
        "4",
        "--epochs",
        "2",
        "--window-strategy",
        "edws",
        "--edws-phases",
        "2",
        "--dim",
        "8",
        "--min-count",
        "1",
        "--curve-out",
        p(&curve),
    ]);
    let sidecar = load_sidecar(sidecar_path(&model)).unwrap();
    assert_eq!(sidecar.dim, 8);
    assert_eq!(
        sidecar.epochs.iter().map(|e| e.window).collect::<Vec<_>>(),
        [2, 4]
    );
    let params = sidecar.lfw.as_ref().unwrap();
    assert_eq!(params.params.len(), 4);
    let loaded = model_io::load(&model).unwrap();
    assert_eq!(loaded.len(), sidecar.vocab_size);

    let csv = std::fs::read_to_string(&curve).unwrap();
    assert_eq!(csv.lines().next(), Some("distance,weight,side"));
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
    let again = wordvec(&["curve", "--sidecar", p(&sidecar_path(&model))]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), csv);

    let report = wordvec(&[
        "eval",
        "--model",
        p(&model),
        "--questions",
        p(&questions),
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&report.stdout).unwrap();
    assert_eq!(json["total"]["total"], 3);
    assert_eq!(json["total"]["skipped"], 1);

    let text = dir.path().join("m.txt");
    wordvec(&[
        "convert",
        "--in",
        p(&model),
        "--out",
        p(&text),
        "--format",
        "text",
    ]);
    let table_bin = wordvec(&["eval", "--model", p(&model), "--questions", p(&questions)]);
    let table_txt = wordvec(&["eval", "--model", p(&text), "--questions", p(&questions)]);
    assert_eq!(table_bin.stdout, table_txt.stdout);
    assert!(String::from_utf8(table_bin.stdout)
        .unwrap()
        .contains("Total"));
}

#[test]
fn bad_arguments_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.txt");
    std::fs::write(&corpus, "a b c a b c a b c").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_wordvec"))
        .args([
            "train",
            "--input",
            p(&corpus),
            "--output",
            p(&dir.path().join("m")),
            "--window-strategy",
            "edws",
            "--window",
            "5",
            "--epochs",
            "4",
            "--min-count",
            "1",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let out = Command::new(env!("CARGO_BIN_EXE_wordvec"))
        .args([
            "eval",
            "--model",
            "/nonexistent/model",
            "--questions",
            "/nonexistent/q",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn vocab_command_lists_counts() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.txt");
    std::fs::write(&corpus, "x y x z x y").unwrap();
    let out = wordvec(&["vocab", "--input", p(&corpus), "--min-count", "2"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "x 3\ny 2\n");
}
