//! Drives the compiled `entail` binary the way a user would: building real
//! command lines, checking exit codes and error text, and comparing the bytes
//! it writes to stdout and to files.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn fixture_arg(dataset: &str, file: &str) -> String {
    format!("{dataset}={}", fixture(file).display())
}

/// Runs the binary with the given arguments. `ENTAIL_EMBEDDINGS` is cleared so
/// the tests see exactly the resources they pass on the command line.
fn entail<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_entail"))
        .args(args)
        .env_remove("ENTAIL_EMBEDDINGS")
        .output()
        .expect("the entail binary should launch")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be UTF-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status
        .code()
        .expect("process should exit, not be killed")
}

fn assert_success(out: &Output) {
    assert_eq!(exit_code(out), 0, "stderr: {}", stderr_of(out));
}

#[test]
fn score_prints_a_tsv_table_on_stdout() {
    let out = entail([
        "score",
        "--in",
        &fixture_arg("corpus", "corpus.jsonl"),
        "--metrics",
        "TokP,external:trainBERT",
    ]);
    assert_success(&out);
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id\tgold\tTokP\texternal:trainBERT");
    assert_eq!(lines.len(), 21, "header plus one row per pair");
    assert_eq!(lines[1], "e1\tentailed\t1.000000\t0.930000");
    assert!(
        lines.iter().skip(1).all(|l| l.split('\t').count() == 4),
        "every row should have id, gold and two score cells"
    );
}

#[test]
fn score_accepts_bare_paths_using_the_file_stem_as_dataset_name() {
    let out = entail([
        "validate-amr",
        "--in",
        fixture("corpus.jsonl").to_str().unwrap(),
    ]);
    assert_success(&out);
    let text = stdout_of(&out);
    assert!(
        text.lines().skip(1).all(|l| l.starts_with("corpus\t")),
        "dataset column should carry the file stem: {text}"
    );
}

#[test]
fn score_rejects_an_unknown_metric_with_a_usage_error() {
    let out = entail([
        "score",
        "--in",
        &fixture_arg("corpus", "corpus.jsonl"),
        "--metrics",
        "TokP,NoSuchMetric",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr_of(&out).contains("NoSuchMetric"),
        "error should name the bad metric: {}",
        stderr_of(&out)
    );
}

#[test]
fn score_requires_embeddings_for_vector_metrics() {
    let out = entail([
        "score",
        "--in",
        &fixture_arg("corpus", "corpus.jsonl"),
        "--metrics",
        "WWLKP",
    ]);
    assert_eq!(exit_code(&out), 2);
    let err = stderr_of(&out);
    assert!(err.contains("WWLKP"), "should name the metric: {err}");
    assert!(err.contains("--embeddings"), "should name the flag: {err}");
}

#[test]
fn score_fails_cleanly_on_an_empty_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let out = entail([
        "score",
        "--in",
        &format!("empty={}", empty.display()),
        "--metrics",
        "TokP",
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(
        stderr_of(&out).contains("no pairs loaded"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn score_requires_format_flag_for_unknown_extensions() {
    let dir = tempfile::tempdir().unwrap();
    let odd = dir.path().join("pairs.dat");
    fs::copy(fixture("corpus.jsonl"), &odd).unwrap();
    let arg = format!("corpus={}", odd.display());

    let missing = entail(["score", "--in", &arg, "--metrics", "TokP"]);
    assert_eq!(exit_code(&missing), 2);
    assert!(
        stderr_of(&missing).contains("--format"),
        "stderr: {}",
        stderr_of(&missing)
    );

    let forced = entail([
        "score",
        "--in",
        &arg,
        "--format",
        "jsonl",
        "--metrics",
        "TokP",
    ]);
    assert_success(&forced);
    assert_eq!(stdout_of(&forced).lines().count(), 21);
}

#[test]
fn score_output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, path: &std::path::Path| {
        let out = entail([
            "score",
            "--in",
            &fixture_arg("corpus", "corpus.jsonl"),
            "--metrics",
            "TokP,GTokP,SmatchP,NMoverP,WWLKP,BertScoP",
            "--embeddings",
            fixture("embeddings.txt").to_str().unwrap(),
            "--sidecar",
            fixture("sidecar.jsonl").to_str().unwrap(),
            "--seed",
            "7",
            "--threads",
            threads,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_success(&out);
    };
    let serial = dir.path().join("serial.tsv");
    let parallel = dir.path().join("parallel.tsv");
    run("1", &serial);
    run("6", &parallel);
    let serial_bytes = fs::read(&serial).unwrap();
    assert_eq!(serial_bytes, fs::read(&parallel).unwrap());
    assert!(serial_bytes.len() > 200, "table should not be trivial");
}

#[test]
fn score_writes_one_table_per_dataset_into_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let tables = dir.path().join("tables");
    let out = entail([
        "score",
        "--in",
        &fixture_arg("corpus", "corpus.jsonl"),
        "--in",
        &fixture_arg("small", "corpus_small.tsv"),
        "--metrics",
        "TokP",
        "--out",
        tables.to_str().unwrap(),
    ]);
    assert_success(&out);
    let corpus = fs::read_to_string(tables.join("corpus.tsv")).unwrap();
    let small = fs::read_to_string(tables.join("small.tsv")).unwrap();
    assert_eq!(corpus.lines().count(), 21);
    assert_eq!(small.lines().count(), 7);
}

#[test]
fn eval_round_trips_through_a_precomputed_score_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("scores.tsv");
    let fresh = dir.path().join("fresh.json");
    let reused = dir.path().join("reused.json");

    let score = entail([
        "score",
        "--in",
        &fixture_arg("corpus", "corpus.jsonl"),
        "--metrics",
        "TokP,SmatchP,external:trainBERT",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert_success(&score);

    let direct = entail([
        "eval",
        "--in",
        &fixture_arg("corpus", "corpus.jsonl"),
        "--metrics",
        "TokP,SmatchP,external:trainBERT",
        "--top-p",
        "10,25",
        "--report",
        fresh.to_str().unwrap(),
    ]);
    assert_success(&direct);

    let precomputed = entail([
        "eval",
        "--scores",
        &format!("corpus={}", table.display()),
        "--top-p",
        "10,25",
        "--report",
        reused.to_str().unwrap(),
    ]);
    assert_success(&precomputed);

    let fresh_json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&fresh).unwrap()).unwrap();
    let reused_json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&reused).unwrap()).unwrap();
    assert_eq!(fresh_json["auc"], reused_json["auc"]);
    assert_eq!(fresh_json["top_fraction"], reused_json["top_fraction"]);
}

#[test]
fn eval_rejects_single_class_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one_sided.jsonl");
    fs::write(
        &path,
        concat!(
            "{\"id\": \"a\", \"premise\": \"A dog ran.\", ",
            "\"hypothesis\": \"A dog moved.\", \"label\": \"entailment\"}\n",
            "{\"id\": \"b\", \"premise\": \"A cat slept.\", ",
            "\"hypothesis\": \"A cat rested.\", \"label\": \"entailment\"}\n",
        ),
    )
    .unwrap();
    let out = entail([
        "eval",
        "--in",
        &format!("one={}", path.display()),
        "--metrics",
        "TokP",
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(
        stderr_of(&out).contains("every pair has the label"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn eval_cross_checks_its_flags() {
    let input = fixture_arg("corpus", "corpus.jsonl");
    let cases: [&[&str]; 4] = [
        // --sweep-alpha without --hybrid.
        &["eval", "--in", &input, "--sweep-alpha", "0:1:0.5"],
        // --normalize without --hybrid.
        &["eval", "--in", &input, "--normalize"],
        // --sweep-out without --sweep-alpha.
        &[
            "eval",
            "--in",
            &input,
            "--hybrid",
            "graph=SmatchP,text=trainBERT,alpha=0.5",
            "--sweep-out",
            "unused.csv",
        ],
        // No inputs at all.
        &["eval", "--metrics", "TokP"],
    ];
    for args in cases {
        let out = entail(args.iter().copied());
        assert_eq!(exit_code(&out), 2, "args {args:?}: {}", stderr_of(&out));
    }
}

#[test]
fn eval_rejects_duplicate_dataset_names() {
    let input = fixture_arg("corpus", "corpus.jsonl");
    let out = entail(["eval", "--in", &input, "--in", &input, "--metrics", "TokP"]);
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr_of(&out).contains("corpus"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn eval_report_covers_subset_and_sweep_sections() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let sweep = dir.path().join("sweep.csv");
    let out = entail([
        "eval",
        "--in",
        &fixture_arg("corpus", "corpus.jsonl"),
        "--metrics",
        "SmatchP,external:trainBERT",
        "--subset",
        fixture("hard_ids.txt").to_str().unwrap(),
        "--hybrid",
        "graph=SmatchP,text=trainBERT,alpha=0.5",
        "--sweep-alpha",
        "0:1:0.25",
        "--sweep-out",
        sweep.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_success(&out);

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["datasets"][0]["name"], "corpus");
    assert_eq!(json["datasets"][0]["pairs"], 20);
    assert_eq!(json["subset"]["requested_ids"], 7);
    assert_eq!(json["subset"]["matched_by_dataset"]["corpus"], 6);
    assert_eq!(json["subset"]["unmatched_ids"], 1);

    let points = json["sweep"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 5);
    // The sweep endpoints are the pure text and pure graph rankings, so they
    // must reproduce those columns' AUC entries from the same report.
    let auc_of = |metric: &str| -> f64 {
        json["auc"]
            .as_array()
            .unwrap()
            .iter()
            .find(|row| row["metric"] == metric)
            .unwrap_or_else(|| panic!("no AUC row for {metric}"))["avg_all"]
            .as_f64()
            .unwrap()
    };
    assert_eq!(points[0]["alpha"], 0.0);
    assert_eq!(
        points[0]["avg_all"].as_f64().unwrap(),
        auc_of("external:trainBERT")
    );
    assert_eq!(points[4]["alpha"], 1.0);
    assert_eq!(points[4]["avg_all"].as_f64().unwrap(), auc_of("SmatchP"));

    let csv = fs::read_to_string(&sweep).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alpha,corpus,AVG_all,AVG_nli"));
    assert_eq!(lines.count(), 5, "one data line per grid point");
}

#[test]
fn eval_artifacts_are_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str, threads: &str| -> (Vec<u8>, Vec<u8>, Vec<u8>) {
        let report = dir.path().join(format!("report_{tag}.json"));
        let sweep = dir.path().join(format!("sweep_{tag}.csv"));
        let scores = dir.path().join(format!("scores_{tag}.tsv"));
        let out = entail([
            "eval",
            "--in",
            &fixture_arg("corpus", "corpus.jsonl"),
            "--metrics",
            "TokP,WWLKP,external:trainBERT",
            "--embeddings",
            fixture("embeddings.txt").to_str().unwrap(),
            "--seed",
            "11",
            "--threads",
            threads,
            "--hybrid",
            "graph=WWLKP,text=trainBERT,alpha=0.5",
            "--sweep-alpha",
            "0:1:0.5",
            "--report",
            report.to_str().unwrap(),
            "--sweep-out",
            sweep.to_str().unwrap(),
            "--scores-out",
            scores.to_str().unwrap(),
        ]);
        assert_success(&out);
        (
            fs::read(&report).unwrap(),
            fs::read(&sweep).unwrap(),
            fs::read(&scores).unwrap(),
        )
    };
    let first = run("first", "1");
    let second = run("second", "4");
    assert_eq!(first.0, second.0, "report bytes differ");
    assert_eq!(first.1, second.1, "sweep CSV bytes differ");
    assert_eq!(first.2, second.2, "score table bytes differ");
}

#[test]
fn validate_amr_prints_triple_counts_per_pair() {
    let out = entail([
        "validate-amr",
        "--in",
        &fixture_arg("corpus", "corpus.jsonl"),
    ]);
    assert_success(&out);
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "dataset\tid\tpremise_triples\thypothesis_triples");
    assert_eq!(lines[1], "corpus\te1\t4\t3");
    assert_eq!(lines[2], "corpus\te2\t5\t4");
    assert_eq!(lines.len(), 21);
}

#[test]
fn validate_amr_flags_malformed_graphs_and_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.jsonl");
    fs::write(
        &path,
        concat!(
            "{\"id\": \"ok\", \"premise\": \"p\", \"hypothesis\": \"h\", ",
            "\"label\": \"entailment\", ",
            "\"premise_amr\": \"(a / alpha)\", \"hypothesis_amr\": \"(b / beta)\"}\n",
            "{\"id\": \"bad\", \"premise\": \"p\", \"hypothesis\": \"h\", ",
            "\"label\": \"neutral\", ",
            "\"premise_amr\": \"(x / \", \"hypothesis_amr\": \"(b / beta)\"}\n",
        ),
    )
    .unwrap();
    let out = entail([
        "validate-amr",
        "--in",
        &format!("broken={}", path.display()),
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(
        stderr_of(&out).contains("failed validation"),
        "stderr: {}",
        stderr_of(&out)
    );
    let text = stdout_of(&out);
    assert!(
        text.lines().any(|l| l.starts_with("broken\tok\t1\t1")),
        "good pair should still report counts: {text}"
    );
    assert!(
        text.lines().any(|l| l.starts_with("broken\tbad\terror\t")),
        "bad pair should report its parse error: {text}"
    );
}
