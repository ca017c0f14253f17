use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use keep_regrow::Tree;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_keep-regrow"));
    cmd.env_remove("KEEP_REGROW_OUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn field(out: &str, key: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in output:\n{out}"))
        .to_string()
}

fn write_tree(dir: &Path, name: &str, t: &Tree) -> String {
    let p = dir.join(name);
    fs::write(&p, t.to_json()).unwrap();
    p.to_str().unwrap().to_string()
}

fn stump(f: usize, thr: f64) -> Tree {
    Tree::split(f, thr, Tree::leaf(0), Tree::leaf(1))
}

fn four_rows(dir: &Path) -> String {
    let p = dir.join("four.csv");
    fs::write(&p, "x,y\n1,0\n2,0\n3,1\n4,1\n").unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn missing_data_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = run(&[
        "grow",
        "--data",
        "/nonexistent/rows.csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(
        stderr(&o).contains("/nonexistent/rows.csv"),
        "{}",
        stderr(&o)
    );
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["grow"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn negative_penalties_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let data = four_rows(dir.path());
    let prev = write_tree(dir.path(), "prev.json", &Tree::leaf(0));
    let out = dir.path().join("o.json");
    let out = out.to_str().unwrap();
    for (a, b) in [("-1", "1"), ("1", "-0.5")] {
        let o = run(&[
            "update",
            "--prev-tree",
            &prev,
            "--data",
            &data,
            "--header",
            "--alpha",
            a,
            "--beta",
            b,
            "--out",
            out,
        ]);
        assert_eq!(
            o.status.code(),
            Some(3),
            "alpha {a} beta {b}: {}",
            stderr(&o)
        );
        assert!(stderr(&o).contains(">= 0"));
    }
    let o = run(&[
        "grow", "--data", &data, "--header", "--alpha", "-2", "--out", out,
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn grow_on_a_single_class_gives_a_leaf() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("pure.csv");
    fs::write(&data, "1,2,a\n3,4,a\n5,6,a\n").unwrap();
    let out = dir.path().join("t.json");
    let dot = dir.path().join("t.dot");
    let o = run(&[
        "grow",
        "--data",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--dot-out",
        dot.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        Tree::from_json(&fs::read_to_string(&out).unwrap()).unwrap(),
        Tree::leaf(0)
    );
    assert!(fs::read_to_string(&dot).unwrap().starts_with("digraph"));
}

#[test]
fn grow_then_update_with_overwhelming_beta_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let data = four_rows(dir.path());
    let prev = write_tree(dir.path(), "prev.json", &stump(0, 3.5));
    let out = dir.path().join("new.json");
    let o = run(&[
        "update",
        "--prev-tree",
        &prev,
        "--data",
        &data,
        "--header",
        "--alpha",
        "1",
        "--beta",
        "1e9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert_eq!(field(&s, "delta"), "0");
    assert_eq!(field(&s, "similarity"), "1");
    assert_eq!(
        Tree::from_json(&fs::read_to_string(&out).unwrap()).unwrap(),
        stump(0, 3.5)
    );
    let table = fs::read_to_string(dir.path().join("new.json.diff.tsv")).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(table.lines().skip(1).all(|l| l.contains("\tkept\t")));
}

#[test]
fn update_with_cheap_changes_regrows_and_highlights() {
    let dir = tempfile::tempdir().unwrap();
    let data = four_rows(dir.path());
    let prev = write_tree(dir.path(), "prev.json", &Tree::leaf(0));
    let out = dir.path().join("new.json");
    let dot = dir.path().join("new.dot");
    let diff = dir.path().join("changes.tsv");
    let o = run(&[
        "update",
        "--prev-tree",
        &prev,
        "--data",
        &data,
        "--header",
        "--alpha",
        "0.1",
        "--beta",
        "0.1",
        "--out",
        out.to_str().unwrap(),
        "--dot-out",
        dot.to_str().unwrap(),
        "--diff-out",
        diff.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "delta"), "3");
    assert_eq!(
        Tree::from_json(&fs::read_to_string(&out).unwrap()).unwrap(),
        stump(0, 2.5)
    );
    assert!(fs::read_to_string(&dot).unwrap().contains("#f4a6a6"));
    assert!(diff.exists());
}

#[test]
fn diff_reports_similarity() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_tree(dir.path(), "a.json", &stump(0, 2.5));
    let same = write_tree(dir.path(), "same.json", &stump(0, 2.5));
    let other = write_tree(dir.path(), "other.json", &stump(1, 2.5));

    let o = run(&["diff", "--a", &a, "--b", &same]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "similarity"), "1");
    assert_eq!(field(&stdout(&o), "delta"), "0");

    let dot = dir.path().join("d.dot");
    let o = run(&[
        "diff",
        "--a",
        &a,
        "--b",
        &other,
        "--dot-out",
        dot.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "similarity"), "0");
    assert_eq!(field(&stdout(&o), "delta"), "3");
    assert!(dot.exists());
}

#[test]
fn malformed_tree_names_the_bad_node() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"kind":"split","feature":0,"threshold":1.0,"left":{"kind":"leaf","class":0},"right":{"kind":"leaf"}}"#)
        .unwrap();
    let good = write_tree(dir.path(), "good.json", &Tree::leaf(0));
    let o = run(&["diff", "--a", &good, "--b", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("root.R"), "{}", stderr(&o));
}

#[test]
fn export_writes_dot_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let t = write_tree(dir.path(), "t.json", &stump(2, 0.5));
    let o = run(&["export", "--tree", &t]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("x[2] <= 0.5"));
}

#[test]
fn unknown_algorithm_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(
        &cfg,
        "name = \"x\"\n[dataset]\nsource = \"iris\"\n[[algorithms]]\nname = \"magic\"\nalpha = 1.0\n",
    )
    .unwrap();
    let o = run(&["eval", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    for name in ["keep_regrow", "retrain", "keep_original"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn eval_uses_out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.toml");
    fs::write(
        &cfg,
        "name = \"tiny\"\nn_runs = 2\nn_batches = 3\nbatch_size = 20\ntest_size = 60\nseed = 5\n\
         [dataset]\nsource = \"iris\"\n\
         [[algorithms]]\nname = \"keep_regrow\"\nalpha = 1.0\nbeta = 1.0\n\
         [[algorithms]]\nname = \"retrain\"\nalpha = 1.0\n",
    )
    .unwrap();
    let out = dir.path().join("env-out");
    let o = bin()
        .args(["eval", "--config", cfg.to_str().unwrap()])
        .env("KEEP_REGROW_OUT_DIR", &out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let results = fs::read_to_string(out.join("results.csv")).unwrap();
    // header + 2 algorithms * 2 runs * 3 batches
    assert_eq!(results.lines().count(), 13);
    assert!(out.join("summary.csv").exists());
    assert!(out.join("manifest.json").exists());
}

#[test]
fn demo_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["demo", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(field(&stdout(&o), "delta").parse::<usize>().unwrap() > 0);
    for f in ["iris_t0.json", "iris_t1.json", "iris_t0.dot", "iris_t1.dot"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}
