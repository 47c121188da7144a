use std::path::PathBuf;
use std::process::{Command, Output};

use mixcat_core::models::train;
use mixcat_core::synthetic::{generate, split, SyntheticSpec};
use mixcat_core::TrainSettings;
use tempfile::TempDir;

const SPORTS: &str = "c1\tracket racket stroke shot ball\n\
                      c1\tracket racket shot goal ball\n\
                      c2\tgoal goal kick ball\n\
                      c2\tgoal kick ball\n";

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Self {
            dir: tempfile::tempdir().unwrap(),
        };
        ws.write("train.txt", SPORTS);
        ws.write("doc.txt", "kick goal goal ball\n");
        ws
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) {
        std::fs::write(self.path(name), text).unwrap();
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.path(name)).unwrap()
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_mixcat"))
            .args(args)
            .current_dir(self.dir.path())
            .env_remove("MIXCAT_CONFIG")
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }

    fn fails(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(!out.status.success(), "{args:?} should fail");
        String::from_utf8(out.stderr).unwrap()
    }
}

fn rows(tsv: &str) -> Vec<Vec<String>> {
    tsv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

const TRAIN_FMM: [&str; 11] = [
    "train",
    "--method",
    "fmm",
    "--gamma",
    "0.4",
    "--category",
    "c1",
    "--train",
    "train.txt",
    "--output",
    "model.json",
];

#[test]
fn fmm_sends_sports_document_to_second_category() {
    let ws = Workspace::new();
    ws.ok(&TRAIN_FMM);
    let out = ws.ok(&[
        "classify",
        "--model",
        "model.json",
        "--input",
        "doc.txt",
        "--epsilon",
        "0",
    ]);
    let rows = rows(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "1");
    assert_eq!(rows[0][1], "negative");
    assert!(rows[0][2].parse::<f64>().unwrap() < 0.0);
}

#[test]
fn hard_clusters_reject_low_gamma_before_reading() {
    let ws = Workspace::new();
    let err = ws.fails(&[
        "train",
        "--method",
        "hcm",
        "--gamma",
        "0.4",
        "--category",
        "c1",
        "--train",
        "missing.txt",
        "--output",
        "model.json",
    ]);
    assert!(err.contains("config") && err.contains("gamma"), "{err}");
    assert!(!ws.path("model.json").exists());
}

#[test]
fn flags_that_do_not_apply_are_rejected() {
    let ws = Workspace::new();
    let err = ws.fails(&[
        "train",
        "--method",
        "wbm",
        "--gamma",
        "0.5",
        "--category",
        "c1",
        "--train",
        "train.txt",
    ]);
    assert!(err.contains("--gamma"), "{err}");
    let err = ws.fails(&[
        "train",
        "--method",
        "hcm",
        "--l",
        "3",
        "--category",
        "c1",
        "--train",
        "train.txt",
    ]);
    assert!(err.contains("--l and --m"), "{err}");
    let err = ws.fails(&[
        "train",
        "--method",
        "fmm",
        "--gamma",
        "0.4",
        "--eta",
        "1.5",
        "--category",
        "c1",
        "--train",
        "train.txt",
    ]);
    assert!(err.contains("eta"), "{err}");
}

#[test]
fn errors_name_the_stage() {
    let ws = Workspace::new();
    let err = ws.fails(&["counts", "--train", "missing.txt"]);
    assert!(err.starts_with("mixcat: read train corpus"), "{err}");
    ws.write("bad.txt", "c1\tok\nno tab\n");
    let err = ws.fails(&["counts", "--train", "bad.txt"]);
    assert!(err.contains("line 2"), "{err}");
    let err = ws.fails(&[
        "train",
        "--method",
        "wbm",
        "--category",
        "c9",
        "--train",
        "train.txt",
    ]);
    assert!(err.starts_with("mixcat: train c9"), "{err}");
    ws.write("model.json", "{\"schema_version\": 99}");
    let err = ws.fails(&["classify", "--model", "model.json", "--input", "doc.txt"]);
    assert!(err.starts_with("mixcat: load model"), "{err}");
}

#[test]
fn reruns_are_byte_identical() {
    let ws = Workspace::new();
    let commands: [&[&str]; 5] = [
        &["counts", "--train", "train.txt"],
        &["clusters", "--train", "train.txt", "--gamma", "0.4"],
        &[
            "train",
            "--method",
            "fmm",
            "--gamma",
            "0.4",
            "--category",
            "c2",
            "--train",
            "train.txt",
            "--trace",
            "trace.csv",
        ],
        &[
            "eval",
            "--method",
            "hcm",
            "--l",
            "5",
            "--m",
            "5",
            "--train",
            "train.txt",
            "--test",
            "train.txt",
        ],
        &TRAIN_FMM,
    ];
    for args in commands {
        let first = ws.ok(args);
        let side = ["trace.csv", "model.json"].map(|f| ws.path(f).exists().then(|| ws.read(f)));
        assert_eq!(first, ws.ok(args), "{args:?}");
        let again = ["trace.csv", "model.json"].map(|f| ws.path(f).exists().then(|| ws.read(f)));
        assert_eq!(side, again, "{args:?}");
    }
    let classify = ["classify", "--model", "model.json", "--input", "train.txt"];
    assert_eq!(ws.ok(&classify), ws.ok(&classify));
}

#[test]
fn every_output_starts_with_config_header() {
    let ws = Workspace::new();
    let header = |text: &str| -> serde_json::Value {
        let line = text.lines().next().unwrap();
        let json = line.strip_prefix("# mixcat ").expect("header line");
        serde_json::from_str(json).unwrap()
    };
    let counts = ws.ok(&["counts", "--train", "train.txt"]);
    assert_eq!(header(&counts)["command"], "counts");
    let clusters = ws.ok(&["clusters", "--train", "train.txt", "--l", "5", "--m", "5"]);
    assert_eq!(header(&clusters)["l"], 5);

    ws.ok(&[
        "train",
        "--method",
        "fmm",
        "--gamma",
        "0.4",
        "--category",
        "c1",
        "--train",
        "train.txt",
        "--output",
        "model.json",
        "--trace",
        "trace.csv",
        "--iters",
        "3",
    ]);
    let trace = ws.read("trace.csv");
    assert_eq!(header(&trace)["iters"], 3);
    assert_eq!(trace.lines().nth(1), Some("side,iteration,log_likelihood"));
    let model: serde_json::Value = serde_json::from_str(&ws.read("model.json")).unwrap();
    assert_eq!(model["config"]["gamma"], 0.4);
    assert_eq!(model["config"]["command"], "train");

    let tsv = ws.ok(&["classify", "--model", "model.json", "--input", "doc.txt"]);
    assert_eq!(header(&tsv)["epsilon"], 0.0);
    let curve = ws.ok(&[
        "eval",
        "--method",
        "wbm",
        "--train",
        "train.txt",
        "--test",
        "train.txt",
    ]);
    let h = header(&curve);
    assert_eq!(h["grid"], "0:0.5:0.005");
    assert!(h.get("eta").is_none());
}

#[test]
fn saved_model_classifies_like_the_in_memory_one() {
    let ws = Workspace::new();
    let spec = SyntheticSpec {
        documents: 60,
        ..SyntheticSpec::default()
    };
    let (train_part, test_part) = split(&generate(&spec), 3);
    ws.write("syn-train.txt", &train_part.to_text());
    ws.write("syn-test.txt", &test_part.to_text());
    let category = train_part.categories[0].clone();

    let cases: [(&[&str], TrainSettings); 4] = [
        (
            &["--method", "wbm"],
            TrainSettings::new(mixcat_core::Method::Wbm),
        ),
        (
            &["--method", "cos"],
            TrainSettings::new(mixcat_core::Method::Cos),
        ),
        (
            &["--method", "hcm", "--gamma", "0.6"],
            TrainSettings::hcm_gamma(0.6),
        ),
        (
            &["--method", "fmm", "--gamma", "0.3"],
            TrainSettings::fmm(0.3),
        ),
    ];
    for (flags, settings) in cases {
        let mut args = vec![
            "train",
            "--category",
            &category,
            "--train",
            "syn-train.txt",
            "--output",
            "m.json",
        ];
        args.extend_from_slice(flags);
        ws.ok(&args);
        let out = ws.ok(&[
            "classify",
            "--model",
            "m.json",
            "--input",
            "syn-test.txt",
            "--epsilon",
            "0.01",
        ]);
        let model = train(&train_part, &category, &settings).unwrap().model;
        for (row, doc) in rows(&out).iter().zip(&test_part.documents) {
            let decision = model.classify(&doc.tokens, 0.01);
            assert_eq!(row[1], decision.outcome.to_string(), "{flags:?}");
            match decision.score {
                Some(s) => assert_eq!(row[2].parse::<f64>().unwrap(), s, "{flags:?}"),
                None => assert_eq!(row[2], "NA"),
            }
        }
    }
}

#[test]
fn no_evidence_prints_na() {
    let ws = Workspace::new();
    ws.ok(&TRAIN_FMM);
    ws.write("oov.txt", "zebra\n\tball\n");
    let out = ws.ok(&["classify", "--model", "model.json", "--input", "oov.txt"]);
    let rows = rows(&out);
    assert_eq!(rows[0][1..], ["unclassified", "NA"]);
    assert_eq!(rows[1][0], "2");
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let ws = Workspace::new();
    ws.write(
        "run.toml",
        "method = \"fmm\"\ngamma = 0.4\ncategory = \"c1\"\ntrain = \"train.txt\"\niters = 2\n",
    );
    let header = |args: &[&str]| {
        ws.ok(args);
        let model: serde_json::Value = serde_json::from_str(&ws.read("model.json")).unwrap();
        model["config"].clone()
    };
    let cfg = header(&["--config", "run.toml", "train", "--output", "model.json"]);
    assert_eq!(
        (cfg["iters"].clone(), cfg["gamma"].clone()),
        (2.into(), 0.4.into())
    );
    let cfg = header(&[
        "--config",
        "run.toml",
        "train",
        "--iters",
        "5",
        "--output",
        "model.json",
    ]);
    assert_eq!(cfg["iters"], 5);

    let out = Command::new(env!("CARGO_BIN_EXE_mixcat"))
        .args(["train", "--gamma", "0.45", "--output", "model.json"])
        .current_dir(ws.dir.path())
        .env("MIXCAT_CONFIG", ws.path("run.toml"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let model: serde_json::Value = serde_json::from_str(&ws.read("model.json")).unwrap();
    assert_eq!(model["config"]["gamma"], 0.45);
    assert_eq!(model["config"]["iters"], 2);

    ws.write("typo.toml", "gama = 0.4\n");
    let err = ws.fails(&["--config", "typo.toml", "counts", "--train", "train.txt"]);
    assert!(err.starts_with("mixcat: config"), "{err}");
}

#[test]
fn eval_reports_curve_and_break_even() {
    let ws = Workspace::new();
    let (train_part, test_part) = split(&generate(&SyntheticSpec::default()), 4);
    ws.write("syn-train.txt", &train_part.to_text());
    ws.write("syn-test.txt", &test_part.to_text());
    let out = ws.ok(&[
        "eval",
        "--method",
        "fmm",
        "--gamma",
        "0.5",
        "--train",
        "syn-train.txt",
        "--test",
        "syn-test.txt",
    ]);
    let lines: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], "epsilon,precision,recall");
    assert_eq!(lines.len(), 1 + 101 + 1);
    let be: f64 = lines
        .last()
        .unwrap()
        .strip_prefix("break_even=")
        .unwrap()
        .parse()
        .unwrap();
    assert!(be >= 0.95, "{be}");

    let custom = ws.ok(&[
        "eval",
        "--method",
        "wbm",
        "--train",
        "syn-train.txt",
        "--test",
        "syn-test.txt",
        "--grid",
        "0,0.01,0.02",
    ]);
    assert_eq!(
        custom.lines().filter(|l| !l.starts_with('#')).count(),
        1 + 3 + 1
    );
    let err = ws.fails(&[
        "eval",
        "--method",
        "wbm",
        "--train",
        "syn-train.txt",
        "--test",
        "syn-test.txt",
        "--grid",
        "0.1,0.2",
    ]);
    assert!(err.contains("grid"), "{err}");
}

#[test]
fn clusters_for_one_category_against_the_rest() {
    let ws = Workspace::new();
    ws.write("three.txt", &format!("{SPORTS}c3\tswim pool\n"));
    let err = ws.fails(&["clusters", "--train", "three.txt", "--l", "2", "--m", "2"]);
    assert!(err.contains("cluster"), "{err}");
    let out = ws.ok(&[
        "clusters",
        "--train",
        "three.txt",
        "--l",
        "2",
        "--m",
        "2",
        "--category",
        "c3",
    ]);
    assert!(
        out.lines().nth(1).unwrap().starts_with("k1: pool, swim"),
        "{out}"
    );
}
