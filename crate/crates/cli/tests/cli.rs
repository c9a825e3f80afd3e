use std::path::Path;
use std::process::{Command, Output};

use cliffsynth::oracle::{build_distance_table, OracleOptions};
use cliffsynth::search::{parse_decomposition, verify_decomposition};
use cliffsynth::{MoveSet, PhaseMode, Tableau, WeightScheme};

fn cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cliffsynth"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .env_remove("CLIFFSYNTH_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn help_and_bad_flags() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&cli(dir.path(), &["--help"])), 0);
    assert_eq!(code(&cli(dir.path(), &["bench", "--no-such-flag"])), 2);
    assert_eq!(code(&cli(dir.path(), &["no-such-command"])), 2);
}

#[test]
fn exit_codes_for_invalid_requests() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = cli(d, &["gods-number", "--n", "5"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert_eq!(code(&cli(d, &["gods-number", "--n", "3", "--phase-mode", "phaseless"])), 3);
    assert_eq!(code(&cli(d, &["gods-number", "--n", "0"])), 2);
    assert_eq!(code(&cli(d, &["gods-number", "--weights", "bogus"])), 2);
    assert_eq!(code(&cli(d, &["gen-data", "--n", "2", "--count", "0"])), 2);
    assert_eq!(code(&cli(d, &["synth", "--n", "2"])), 2);
    assert_eq!(code(&cli(d, &["train", "--n", "2", "--dataset", "/nonexistent/walks.txt"])), 1);
}

#[test]
fn bench_without_model_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["bench", "--n", "2", "--instances", "5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("model_n2.json"), "{}", stderr(&out));
}

#[test]
fn gods_number_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["gods-number", "--n", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("gods_n2_with_phases.csv")).unwrap();
    assert_eq!(csv.lines().last().unwrap(), "8,116");
    let csv = std::fs::read_to_string(dir.path().join("gods_n2_phaseless.csv")).unwrap();
    assert_eq!(csv.lines().last().unwrap(), "7,46");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("gods_n2.json")).unwrap()).unwrap();
    assert_eq!(summary["results"][0]["gods_number"], 8.0);
    assert_eq!(summary["results"][0]["node_count"], 11520);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 5, "gods_number": {"n": 1, "phase_mode": "phaseless"}}"#).unwrap();
    let cfg_arg = cfg.to_str().unwrap();

    assert_eq!(code(&cli(dir.path(), &["--config", cfg_arg, "gods-number"])), 0);
    let echo: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("effective_config.json")).unwrap()).unwrap();
    assert_eq!(echo["seed"], 5);
    assert_eq!(echo["options"]["n"], 1);

    assert_eq!(code(&cli(dir.path(), &["--config", cfg_arg, "--seed", "9", "gods-number", "--n", "2"])), 0);
    let echo: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("effective_config.json")).unwrap()).unwrap();
    assert_eq!(echo["seed"], 9);
    assert_eq!(echo["options"]["n"], 2);
    assert_eq!(echo["options"]["phase_mode"], "phaseless");

    std::fs::write(&cfg, r#"{"gods_number": {"qubits": 2}}"#).unwrap();
    assert_eq!(code(&cli(dir.path(), &["--config", cfg_arg, "gods-number"])), 2);
}

#[test]
fn synth_exact_from_file_and_failure_code() {
    let dir = tempfile::tempdir().unwrap();
    let ms = MoveSet::all_to_all(2, WeightScheme::Unit).unwrap();
    let table = build_distance_table(&ms, PhaseMode::WithPhases, OracleOptions::default()).unwrap();
    let (far, dist) = table.entries().unwrap().into_iter().find(|(_, d)| *d == 8.0).expect("an element at distance 8");
    let input = dir.path().join("far.txt");
    std::fs::write(&input, far.to_text()).unwrap();
    let input_arg = input.to_str().unwrap();

    let out = cli(dir.path(), &["synth", "--exact", "--tableau", input_arg, "--algorithm", "greedy"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("decomposition.txt")).unwrap();
    let gates = parse_decomposition(&text).unwrap();
    assert_eq!(gates.len() as f64, dist);
    assert!(verify_decomposition(&far, &ms.moves_for(&gates).unwrap()));
    let copied = std::fs::read_to_string(dir.path().join("input_tableau.txt")).unwrap();
    assert_eq!(Tableau::from_text(&copied).unwrap(), far);

    let out =
        cli(dir.path(), &["synth", "--exact", "--tableau", input_arg, "--algorithm", "greedy", "--max-steps", "3"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("decomposition.txt")).unwrap();
    assert!(text.contains("# failed=step_limit"), "{text}");
}

#[test]
fn gen_data_train_synth_bench_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |args: &[&str]| {
        let out = cli(d, args);
        assert_eq!(code(&out), 0, "{args:?}: {}", stderr(&out));
        out
    };
    run(&["gen-data", "--n", "2", "--count", "300", "--phase-mode", "phaseless"]);
    let walks = d.join("walks_n2.txt");
    assert!(walks.exists());
    run(&[
        "train",
        "--n",
        "2",
        "--phase-mode",
        "phaseless",
        "--batches",
        "40",
        "--batch-size",
        "200",
        "--dataset",
        walks.to_str().unwrap(),
        "--checkpoint-interval",
        "10",
    ]);
    let loss = std::fs::read_to_string(d.join("loss_n2.csv")).unwrap();
    assert_eq!(loss.lines().next(), Some("step,loss"));
    assert_eq!(loss.lines().count(), 41);
    let model = d.join("model_n2.json");
    run(&["synth", "--model", model.to_str().unwrap(), "--random-walk", "6"]);
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("decomposition.json")).unwrap()).unwrap();
    assert_eq!(record["success"], true);

    run(&["bench", "--n", "2", "--instances", "20", "--phase-mode", "phaseless", "--methods", "greedy,beam"]);
    let csv = std::fs::read_to_string(d.join("comparison.csv")).unwrap();
    let methods: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(methods, ["baseline", "greedy", "beam-w3"]);
    assert!(std::fs::read_to_string(d.join("curves.csv")).unwrap().starts_with("n,method,cost,fraction_solved"));
    let listing = std::fs::read_to_string(d.join("instances_n2.txt")).unwrap();
    assert_eq!(listing.lines().filter(|l| l.starts_with("n=")).count(), 20);
}

#[test]
fn gen_data_header_and_repeatability() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen-data", "--n", "3", "--scaling", "loglinear", "--count", "1000", "--seed", "7"];
    let out = cli(dir.path(), &args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let path = dir.path().join("walks_n3.txt");
    let first = std::fs::read(&path).unwrap();
    let (header, samples) = cliffsynth::walker::read_dataset(first.as_slice()).unwrap();
    assert_eq!(samples.len(), 1000);
    assert_eq!(header.lmax, 48);
    assert_eq!(code(&cli(dir.path(), &args)), 0);
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn train_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let start = std::time::Instant::now();
    let out = cli(dir.path(), &["train", "--n", "3", "--batches", "10"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(start.elapsed().as_secs_f64() < 10.0);
    let loss = std::fs::read_to_string(dir.path().join("loss_n3.csv")).unwrap();
    assert_eq!(loss.lines().count(), 11);
    let model = cliffsynth::guidance::load_model_for(&dir.path().join("model_n3.json"), 3).unwrap();
    assert_eq!(model.layer_dims(), vec![32, 16, 4, 1]);
    assert_eq!(code(&cli(dir.path(), &["train", "--n", "0"])), 2);
}

#[test]
fn synth_identity_and_random_exact() {
    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("id.txt");
    std::fs::write(&id, Tableau::identity(2, PhaseMode::WithPhases).unwrap().to_text()).unwrap();
    let out = cli(dir.path(), &["synth", "--exact", "--tableau", id.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("decomposition.txt")).unwrap();
    assert!(parse_decomposition(&text).unwrap().is_empty());

    for seed in ["1", "2", "3"] {
        let out = cli(dir.path(), &["--seed", seed, "synth", "--exact", "--n", "2"]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let text = std::fs::read_to_string(dir.path().join("decomposition.txt")).unwrap();
        let gates = parse_decomposition(&text).unwrap();
        assert!(gates.len() <= 8);
        let input =
            Tableau::from_text(&std::fs::read_to_string(dir.path().join("input_tableau.txt")).unwrap()).unwrap();
        let ms = MoveSet::all_to_all(2, WeightScheme::Unit).unwrap();
        assert!(verify_decomposition(&input, &ms.moves_for(&gates).unwrap()));
    }
}
