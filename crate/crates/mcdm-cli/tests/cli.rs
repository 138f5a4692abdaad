//! Binary-level behavior: flags, exit codes, environment handling and the
//! shapes of the files each subcommand writes.

mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{assert_single_error_line, bin, fixture};

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn rank_example(out: &Path, extra: &[&str]) -> Output {
    Command::new(bin())
        .args(["rank", "--config"])
        .arg(fixture("worked_example_config.json"))
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn help_lists_the_subcommands_and_exits_zero() {
    let output = run(&["--help"]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    for subcommand in ["rank", "weights", "evaluate", "fuzzify"] {
        assert!(stdout.contains(subcommand), "help lacks {subcommand}");
    }
}

#[test]
fn version_exits_zero() {
    let output = run(&["--version"]);
    assert_eq!(output.status.code(), Some(0));
    assert!(String::from_utf8(output.stdout).unwrap().starts_with("mcdm"));
}

#[test]
fn unknown_flags_fail_with_one_usage_line() {
    let output = run(&["rank", "--bogus"]);
    assert_eq!(output.status.code(), Some(1));
    assert_single_error_line(&output, "usage");
}

#[test]
fn rank_without_scores_is_a_validation_error() {
    let out = tempfile::tempdir().unwrap();
    let output = Command::new(bin())
        .args(["rank", "--paper-weights", "--out"])
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert_single_error_line(&output, "validation");
    assert!(String::from_utf8_lossy(&output.stderr).contains("scores"));
}

#[test]
fn fuzzy_mode_rejects_vector_normalization() {
    let out = tempfile::tempdir().unwrap();
    let output = rank_example(out.path(), &["--mode", "fuzzy", "--normalization", "vector"]);
    assert_eq!(output.status.code(), Some(1));
    assert_single_error_line(&output, "validation");
}

#[test]
fn degenerate_tables_exit_with_the_computation_code() {
    let out = tempfile::tempdir().unwrap();
    let output = Command::new(bin())
        .arg("rank")
        .arg("--scores")
        .arg(fixture("degenerate_scores.csv"))
        .arg("--weights")
        .arg(fixture("weights_two.json"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert_single_error_line(&output, "computation");
    assert!(String::from_utf8_lossy(&output.stderr).contains("degenerate"));
}

#[test]
fn spread_zero_fuzzy_ranking_csv_equals_crisp_linear_max() {
    let crisp_dir = tempfile::tempdir().unwrap();
    let fuzzy_dir = tempfile::tempdir().unwrap();
    assert!(rank_example(crisp_dir.path(), &["--normalization", "linear-max"])
        .status
        .success());
    assert!(rank_example(
        fuzzy_dir.path(),
        &["--mode", "fuzzy", "--spread", "0"]
    )
    .status
    .success());
    let crisp = fs::read(crisp_dir.path().join("ranking.csv")).unwrap();
    let fuzzy = fs::read(fuzzy_dir.path().join("ranking.csv")).unwrap();
    assert_eq!(crisp, fuzzy, "spread-0 fuzzy run drifted from the crisp run");
}

#[test]
fn out_dir_env_applies_and_the_flag_wins() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();

    let from_env = Command::new(bin())
        .args(["rank", "--config"])
        .arg(fixture("worked_example_config.json"))
        .env("MCDM_RANK_OUT", env_dir.path())
        .output()
        .unwrap();
    assert!(from_env.status.success());
    assert!(env_dir.path().join("ranking.json").is_file());

    let from_flag = Command::new(bin())
        .args(["rank", "--config"])
        .arg(fixture("worked_example_config.json"))
        .arg("--out")
        .arg(flag_dir.path())
        .env("MCDM_RANK_OUT", env_dir.path().join("ignored"))
        .output()
        .unwrap();
    assert!(from_flag.status.success());
    assert!(flag_dir.path().join("ranking.json").is_file());
    assert!(!env_dir.path().join("ignored").exists());
}

#[test]
fn inconsistent_judgments_warn_on_stderr_but_succeed() {
    let out = tempfile::tempdir().unwrap();
    let output = Command::new(bin())
        .arg("weights")
        .arg("--pairwise")
        .arg(fixture("pairwise_inconsistent.json"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(
        stderr.starts_with("mcdm: warning:") && stderr.contains("consistency ratio"),
        "missing warning, stderr: {stderr:?}"
    );
    assert!(out.path().join("weights.json").is_file());
}

#[test]
fn consistent_judgments_recover_the_generating_weights_quietly() {
    let out = tempfile::tempdir().unwrap();
    let output = Command::new(bin())
        .arg("weights")
        .arg("--pairwise")
        .arg(fixture("pairwise_consistent.json"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(output.stderr.is_empty(), "unexpected stderr");

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.path().join("weights.json")).unwrap())
            .unwrap();
    let weights: Vec<f64> = json["weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (got, want) in weights.iter().zip([0.60, 0.20, 0.15, 0.05]) {
        assert!((got - want).abs() <= 1e-8, "weight {got} vs {want}");
    }
    assert!(json["consistency_ratio"].as_f64().unwrap().abs() <= 1e-8);
}

#[test]
fn label_sources_produce_a_classification_report() {
    let out = tempfile::tempdir().unwrap();
    let output = Command::new(bin())
        .arg("evaluate")
        .arg("--input")
        .arg(format!("expert={}", fixture("labels_expert.csv").display()))
        .arg("--input")
        .arg(format!("model={}", fixture("labels_model.csv").display()))
        .args(["--reference", "expert", "--out"])
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );

    let json = fs::read_to_string(out.path().join("evaluation.json")).unwrap();
    // 4 of the 6 labels agree.
    assert!(json.contains("\"accuracy\": 0.6666666667"), "{json}");
    let csv = fs::read_to_string(out.path().join("evaluation.csv")).unwrap();
    assert!(csv.starts_with("section,subject,metric,value"));
    assert!(String::from_utf8(output.stdout)
        .unwrap()
        .contains("accuracy"));
}

#[test]
fn topsis_json_rankings_feed_evaluate_with_closeness_agreement() {
    let rank_dir = tempfile::tempdir().unwrap();
    assert!(rank_example(rank_dir.path(), &[]).status.success());
    let ranking = rank_dir.path().join("ranking.json");

    let out = tempfile::tempdir().unwrap();
    let output = Command::new(bin())
        .arg("evaluate")
        .arg("--input")
        .arg(format!("engine={}", ranking.display()))
        .arg("--input")
        .arg(format!("replica={}", ranking.display()))
        .args(["--reference", "engine", "--out"])
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let json = fs::read_to_string(out.path().join("evaluation.json")).unwrap();
    assert!(json.contains("\"cosine\": 1.000000000"), "{json}");
    assert!(json.contains("\"map\": 1.000000000"), "{json}");
}

#[test]
fn evaluate_rejects_a_mixture_of_rankings_and_labels() {
    let out = tempfile::tempdir().unwrap();
    let output = Command::new(bin())
        .arg("evaluate")
        .arg("--input")
        .arg(format!("labels={}", fixture("labels_expert.csv").display()))
        .arg("--input")
        .arg(format!("ranks={}", fixture("ranks_experts.csv").display()))
        .args(["--reference", "labels", "--out"])
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert_single_error_line(&output, "validation");
}

#[test]
fn fuzzify_widens_a_weight_file_by_the_spread() {
    let out = tempfile::tempdir().unwrap();
    let output = Command::new(bin())
        .arg("fuzzify")
        .arg("--weights")
        .arg(fixture("preset_weights.json"))
        .args(["--spread", "0.1", "--out"])
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.path().join("weights.json")).unwrap())
            .unwrap();
    let first = &json["fuzzy_weights"][0];
    assert!((first["l"].as_f64().unwrap() - 0.54).abs() <= 1e-12);
    assert!((first["m"].as_f64().unwrap() - 0.60).abs() <= 1e-12);
    assert!((first["u"].as_f64().unwrap() - 0.66).abs() <= 1e-12);
}

#[test]
fn fuzzify_maps_scores_through_the_linguistic_binding() {
    let out = tempfile::tempdir().unwrap();
    let output = Command::new(bin())
        .arg("fuzzify")
        .arg("--scores")
        .arg(fixture("worked_example_scores.csv"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(out.path().join("fuzzy_table.json").is_file());
}

#[test]
fn fuzzify_requires_exactly_one_input() {
    let output = Command::new(bin())
        .arg("fuzzify")
        .arg("--weights")
        .arg(fixture("preset_weights.json"))
        .arg("--scores")
        .arg(fixture("worked_example_scores.csv"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert_single_error_line(&output, "validation");

    let neither = run(&["fuzzify"]);
    assert_eq!(neither.status.code(), Some(1));
    assert_single_error_line(&neither, "validation");
}

#[test]
fn two_weight_sources_fail_fast() {
    let output = Command::new(bin())
        .arg("rank")
        .arg("--scores")
        .arg(fixture("worked_example_scores.csv"))
        .arg("--weights")
        .arg(fixture("preset_weights.json"))
        .arg("--paper-weights")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert_single_error_line(&output, "validation");
    assert!(String::from_utf8_lossy(&output.stderr).contains("exactly one weight source"));
}

#[test]
fn a_criteria_subset_restricts_the_table() {
    let out = tempfile::tempdir().unwrap();
    let output = Command::new(bin())
        .arg("rank")
        .arg("--scores")
        .arg(fixture("worked_example_scores.csv"))
        .args(["--criteria", "Skills,Experience", "--weights"])
        .arg(fixture("weights_two.json"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let csv = fs::read_to_string(out.path().join("ranking.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4, "header plus one row per candidate");
}

#[test]
fn scored_candidates_must_appear_in_the_candidate_file() {
    let dir = tempfile::tempdir().unwrap();
    let candidates = dir.path().join("candidates.csv");
    fs::write(
        &candidates,
        "id,experience,education,skills,about\nc1,3 years,BSc,Rust,notes\nc2,2 years,BSc,Go,notes\n",
    )
    .unwrap();
    let output = Command::new(bin())
        .args(["rank", "--config"])
        .arg(fixture("worked_example_config.json"))
        .arg("--candidates")
        .arg(&candidates)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert_single_error_line(&output, "validation");
    assert!(String::from_utf8_lossy(&output.stderr).contains("c3"));
}

#[test]
fn the_full_candidate_file_passes_the_coverage_check() {
    let out = tempfile::tempdir().unwrap();
    let output = Command::new(bin())
        .args(["rank", "--config"])
        .arg(fixture("worked_example_config.json"))
        .arg("--candidates")
        .arg(fixture("worked_example_candidates.csv"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}
