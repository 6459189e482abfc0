use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_spamadjust");

const SMALL: &[&str] = &["--n_spam", "60", "--n_ham", "60", "--folds", "3", "--k_spam", "2", "--k_ham", "2"];

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn with_small(mut args: Vec<&str>) -> Vec<&str> {
    args.extend_from_slice(SMALL);
    args
}

#[test]
fn run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&with_small(vec!["run", "--output_dir", out]));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in spamadjust::pipeline::ARTIFACTS {
        assert!(dir.path().join(name).is_file(), "missing {name}");
    }
    assert!(stdout(&o).contains("f_score"));
}

#[test]
fn run_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&with_small(vec!["run", "--output_dir", d.path().to_str().unwrap()]));
        assert!(o.status.success());
    }
    let read = |d: &Path, f: &str| fs::read_to_string(d.join(f)).unwrap();
    for f in ["report.txt", "roc_points.csv", "clusters.csv", "term_scores.csv"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f} differs");
    }
}

#[test]
fn missing_corpus_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.tsv");
    let o = run(&[
        "run",
        "--corpus_kind",
        "tsv",
        "--corpus_path",
        missing.to_str().unwrap(),
        "--output_dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_value_is_a_config_error() {
    let o = run(&["run", "--folds", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("folds"));
}

#[test]
fn unknown_config_key_names_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "# comment\nalpha = 0.5\ncolour = red\n").unwrap();
    let o = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("colour") && err.contains("line 3"), "{err}");
}

#[test]
fn flag_overrides_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("a.conf");
    fs::write(&cfg, "alpha = 0.5\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&with_small(vec![
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--alpha",
        "2.0",
        "--output_dir",
        out.to_str().unwrap(),
    ]));
    assert!(o.status.success());
    let resolved = fs::read_to_string(out.join("resolved_config.txt")).unwrap();
    assert!(resolved.lines().any(|l| l == "alpha = 2"), "{resolved}");
}

#[test]
fn compare_with_zero_strengths_has_zero_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&with_small(vec![
        "compare",
        "--alpha",
        "0",
        "--beta",
        "0",
        "--noise_ratio",
        "0.6",
        "--output_dir",
        dir.path().to_str().unwrap(),
    ]));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(dir.path().join("comparison.txt")).unwrap();
    let rows: Vec<&str> = table.lines().skip(2).collect();
    assert!(!rows.is_empty());
    for row in rows {
        let delta: f64 = row.split_whitespace().last().unwrap().parse().unwrap();
        assert_eq!(delta, 0.0, "{row}");
    }
    for arm in ["baseline", "adjusted"] {
        for name in spamadjust::pipeline::ARTIFACTS {
            if name != "resolved_config.txt" {
                assert!(dir.path().join(arm).join(name).is_file(), "{arm}/{name}");
            }
        }
    }
}

#[test]
fn gen_writes_tsv_that_run_can_load() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("corpus.tsv");
    let o = run(&["gen", "--n_spam", "30", "--n_ham", "40", "--out", tsv.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&tsv).unwrap();
    assert_eq!(text.lines().count(), 70);
    assert_eq!(text.lines().filter(|l| l.starts_with("spam\t")).count(), 30);

    let out = dir.path().join("out");
    let o = run(&[
        "run",
        "--corpus_kind",
        "tsv",
        "--corpus_path",
        tsv.to_str().unwrap(),
        "--folds",
        "3",
        "--output_dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn stem_reads_stdin() {
    let mut child = Command::new(BIN)
        .arg("stem")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"caresses ponies\nrelational\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert_eq!(stdout(&o), "caress\nponi\nrelat\n");
}

#[test]
fn keys_lists_every_key() {
    let o = run(&["keys"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for (key, _) in spamadjust::pipeline::KEYS {
        assert!(text.contains(&format!("\n{key} = ")), "{key}");
    }
}
