//! The four subcommands: rank, weights, evaluate and fuzzify.
//!
//! Each command reads its inputs through a [`RunWriter`] so every file the
//! run touched lands in the manifest with a content hash, computes through
//! the mcdm crate, writes its reports and prints a terminal summary.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mcdm::metrics::{classification_metrics, compare_rankings, EvaluationReport, RankingSource};
use mcdm::profile::{
    build_score_table, fuzzify_score_table, parse_candidates_csv, parse_scores_csv, Label,
    ScoreRecord,
};
use mcdm::topsis::{run_topsis, Mode, TopsisResult};
use mcdm::weighting::{aggregate_judgments, derive_weights, fuzzify_weights, PairwiseMatrix};
use mcdm::WeightVector;

use crate::config::{RunConfig, ScoreFuzzification, WeightSource, PRESET_WEIGHTS};
use crate::output::{fmt_sig, ranking_csv, ranking_table, weights_table, RunWriter};

const CONSISTENCY_WARNING_THRESHOLD: f64 = 0.10;

/// Ranks candidates from the configured score file and writes
/// `ranking.json`, `ranking.csv` and `manifest.json`.
pub fn cmd_rank(config: &RunConfig) -> Result<TopsisResult<f64>> {
    let scores_path = config
        .scores
        .as_ref()
        .context("rank needs a scores file: pass --scores or set scores in the config")?;
    let mut writer = RunWriter::new(&config.out_dir)?;
    record_config(&mut writer, config)?;

    let records = read_scores(&mut writer, scores_path)?;
    check_candidate_coverage(&mut writer, config, &records)?;
    let criteria = criteria_order(config, &records);
    let weights = load_weights(&mut writer, config)?;

    let table = build_score_table(&records, &criteria, &config.label_mapping, config.score_source)
        .with_context(|| format!("building the decision table from {}", scores_path.display()))?;
    let (table, weights) = match config.mode {
        Mode::Crisp => (table, weights),
        Mode::Fuzzy => {
            let fuzzy_table = match config.score_fuzzification {
                ScoreFuzzification::Degenerate => table.to_fuzzy()?,
                ScoreFuzzification::Binding => {
                    fuzzify_score_table(&table, &config.vocabulary, &config.binding)?
                }
            };
            let fuzzy_weights = if weights.fuzzy_weights().is_some() {
                weights
            } else {
                fuzzify_weights(&weights, config.spread.unwrap_or(0.0))?
            };
            (fuzzy_table, fuzzy_weights)
        }
    };

    let result = run_topsis(&table, &weights, config.normalization)?;
    writer.write_json("ranking.json", &result)?;
    writer.write_text("ranking.csv", &ranking_csv(&result)?)?;
    writer.finish("rank", config)?;
    print!("{}", ranking_table(&result));
    Ok(result)
}

/// Aggregates pairwise matrices, derives weights and writes `weights.json`
/// and `manifest.json`. A spread setting also fuzzifies the weights.
pub fn cmd_weights(config: &RunConfig) -> Result<WeightVector<f64>> {
    let Some(WeightSource::Pairwise(paths)) = &config.weight_source else {
        bail!("the weights command derives weights from judgments: pass at least one --pairwise file");
    };
    let mut writer = RunWriter::new(&config.out_dir)?;
    record_config(&mut writer, config)?;

    let matrices = paths
        .iter()
        .map(|path| {
            let text = writer.record_input(path)?;
            PairwiseMatrix::from_json(&text)
                .with_context(|| format!("parsing pairwise matrix {}", path.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    let combined = aggregate_judgments(&matrices)?;
    let mut weights = derive_weights(&combined)?;
    warn_on_inconsistency(&weights);
    if let Some(spread) = config.spread {
        weights = fuzzify_weights(&weights, spread)?;
    }

    writer.write_json("weights.json", &weights)?;
    writer.finish("weights", config)?;
    print!("{}", weights_table(&weights));
    if let Some(tfns) = weights.fuzzy_weights() {
        for (name, tfn) in weights.criteria().iter().zip(tfns) {
            println!("fuzzy {name}: {}", fmt_tfn(tfn));
        }
    }
    Ok(weights)
}

enum EvalInput {
    Ranking(RankingSource<f64>),
    Labels(Vec<(String, Label)>),
}

/// Compares named ranking or label sources against a reference and writes
/// `evaluation.json`, `evaluation.csv` and `manifest.json`.
pub fn cmd_evaluate(
    config: &RunConfig,
    inputs: &[(String, PathBuf)],
    reference: &str,
) -> Result<EvaluationReport<f64>> {
    if inputs.len() < 2 {
        bail!("evaluate needs at least two --input NAME=PATH sources, got {}", inputs.len());
    }
    if !inputs.iter().any(|(name, _)| name == reference) {
        bail!(
            "reference {reference:?} is not among the inputs [{}]",
            inputs.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>().join(", ")
        );
    }
    let mut writer = RunWriter::new(&config.out_dir)?;
    record_config(&mut writer, config)?;

    let mut rankings = BTreeMap::new();
    let mut labels = BTreeMap::new();
    for (name, path) in inputs {
        let text = writer.record_input(path)?;
        match load_eval_input(path, &text)? {
            EvalInput::Ranking(source) => {
                rankings.insert(name.clone(), source);
            }
            EvalInput::Labels(pairs) => {
                labels.insert(name.clone(), pairs);
            }
        }
    }

    let report = match (rankings.is_empty(), labels.is_empty()) {
        (false, true) => compare_rankings(&rankings, reference, config.relevant_k)?,
        (true, false) => classification_report(&labels, reference)?,
        _ => bail!("evaluate inputs must be all rankings or all label files, not a mixture"),
    };

    writer.write_json("evaluation.json", &report)?;
    writer.write_text("evaluation.csv", &report.to_csv_with(fmt_sig)?)?;
    let sources: BTreeMap<&String, String> = inputs
        .iter()
        .map(|(name, path)| (name, path.display().to_string()))
        .collect();
    writer.finish(
        "evaluate",
        &serde_json::json!({ "run": config, "sources": sources, "reference": reference }),
    )?;
    print_evaluation(&report);
    Ok(report)
}

/// Turns crisp inputs into triangular fuzzy numbers: a weight file through
/// the spread rule, or a score file through the linguistic binding. Writes
/// the fuzzified artifact and `manifest.json`.
pub fn cmd_fuzzify(config: &RunConfig) -> Result<()> {
    let weight_file = match &config.weight_source {
        Some(WeightSource::File(path)) => Some(path.clone()),
        Some(_) => bail!("fuzzify takes a direct weight file: pass --weights, not --pairwise or --paper-weights"),
        None => None,
    };
    match (&config.scores, weight_file) {
        (Some(_), Some(_)) => {
            bail!("fuzzify takes exactly one input: --scores or --weights, not both")
        }
        (None, None) => bail!("fuzzify needs an input: pass --scores or --weights"),
        (None, Some(path)) => {
            let mut writer = RunWriter::new(&config.out_dir)?;
            record_config(&mut writer, config)?;
            let text = writer.record_input(&path)?;
            let weights = WeightVector::from_json(&text)
                .with_context(|| format!("parsing weights {}", path.display()))?;
            let fuzzified = fuzzify_weights(&weights, config.spread.unwrap_or(0.0))?;
            writer.write_json("weights.json", &fuzzified)?;
            writer.finish("fuzzify", config)?;
            print!("{}", weights_table(&fuzzified));
            for (name, tfn) in fuzzified
                .criteria()
                .iter()
                .zip(fuzzified.fuzzy_weights().expect("fuzzify always fills fuzzy weights"))
            {
                println!("fuzzy {name}: {}", fmt_tfn(tfn));
            }
            Ok(())
        }
        (Some(scores_path), None) => {
            let scores_path = scores_path.clone();
            let mut writer = RunWriter::new(&config.out_dir)?;
            record_config(&mut writer, config)?;
            let records = read_scores(&mut writer, &scores_path)?;
            let criteria = criteria_order(config, &records);
            let table = build_score_table(
                &records,
                &criteria,
                &config.label_mapping,
                config.score_source,
            )
            .with_context(|| {
                format!("building the decision table from {}", scores_path.display())
            })?;
            let fuzzy = fuzzify_score_table(&table, &config.vocabulary, &config.binding)?;
            writer.write_json("fuzzy_table.json", &fuzzy)?;
            writer.finish("fuzzify", config)?;
            println!(
                "fuzzified {} candidates over {} criteria",
                fuzzy.candidates().len(),
                fuzzy.criteria().len()
            );
            Ok(())
        }
    }
}

fn record_config(writer: &mut RunWriter, config: &RunConfig) -> Result<()> {
    if let Some(path) = &config.config_path {
        writer.record_input(path)?;
    }
    Ok(())
}

fn read_scores(writer: &mut RunWriter, path: &Path) -> Result<Vec<ScoreRecord<f64>>> {
    let text = writer.record_input(path)?;
    parse_scores_csv(&text).with_context(|| format!("parsing scores {}", path.display()))
}

/// When a candidate file is configured, every scored candidate must appear
/// in it; unscored candidates are fine.
fn check_candidate_coverage(
    writer: &mut RunWriter,
    config: &RunConfig,
    records: &[ScoreRecord<f64>],
) -> Result<()> {
    let Some(path) = &config.candidates else {
        return Ok(());
    };
    let text = writer.record_input(path)?;
    let known: BTreeSet<String> = parse_candidates_csv(&text)
        .with_context(|| format!("parsing candidates {}", path.display()))?
        .into_iter()
        .map(|c| c.id)
        .collect();
    let missing: BTreeSet<&String> = records
        .iter()
        .map(|r| &r.candidate_id)
        .filter(|id| !known.contains(*id))
        .collect();
    if !missing.is_empty() {
        bail!(
            "scores mention candidates missing from {}: [{}]",
            path.display(),
            missing
                .iter()
                .map(|id| format!("{id:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    Ok(())
}

/// The configured criterion order, or first-appearance order in the score
/// records when none is configured.
fn criteria_order(config: &RunConfig, records: &[ScoreRecord<f64>]) -> Vec<String> {
    match &config.criteria {
        Some(list) if !list.is_empty() => list.clone(),
        _ => {
            let mut seen: Vec<String> = Vec::new();
            for record in records {
                let wanted = record.criterion.trim().to_lowercase();
                if !seen.iter().any(|c| c.trim().to_lowercase() == wanted) {
                    seen.push(record.criterion.clone());
                }
            }
            seen
        }
    }
}

fn load_weights(writer: &mut RunWriter, config: &RunConfig) -> Result<WeightVector<f64>> {
    let source = config.weight_source.as_ref().context(
        "rank needs a weight source: pass --weights, --pairwise or --paper-weights",
    )?;
    let weights = match source {
        WeightSource::Preset => {
            let (criteria, weights): (Vec<_>, Vec<_>) = PRESET_WEIGHTS
                .iter()
                .map(|&(name, w)| (name.to_string(), w))
                .unzip();
            WeightVector::new(criteria, weights).expect("the preset is valid")
        }
        WeightSource::File(path) => {
            let text = writer.record_input(path)?;
            WeightVector::from_json(&text)
                .with_context(|| format!("parsing weights {}", path.display()))?
        }
        WeightSource::Pairwise(paths) => {
            let matrices = paths
                .iter()
                .map(|path| {
                    let text = writer.record_input(path)?;
                    PairwiseMatrix::from_json(&text)
                        .with_context(|| format!("parsing pairwise matrix {}", path.display()))
                })
                .collect::<Result<Vec<_>>>()?;
            derive_weights(&aggregate_judgments(&matrices)?)?
        }
    };
    warn_on_inconsistency(&weights);
    Ok(weights)
}

fn fmt_tfn(tfn: &mcdm::Tfn64) -> String {
    format!(
        "({}, {}, {})",
        fmt_sig(tfn.l()),
        fmt_sig(tfn.m()),
        fmt_sig(tfn.u())
    )
}

fn warn_on_inconsistency(weights: &WeightVector<f64>) {
    let cr = weights.consistency_ratio();
    if cr > CONSISTENCY_WARNING_THRESHOLD {
        eprintln!(
            "mcdm: warning: consistency ratio {} exceeds 0.10; the pairwise judgments are inconsistent",
            fmt_sig(cr)
        );
    }
}

fn load_eval_input(path: &Path, text: &str) -> Result<EvalInput> {
    let extension = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_lowercase);
    match extension.as_deref() {
        Some("json") => {
            let result: TopsisResult<f64> = serde_json::from_str(text)
                .with_context(|| format!("parsing ranking {}", path.display()))?;
            Ok(EvalInput::Ranking(RankingSource::Topsis(result)))
        }
        Some("csv") => load_eval_csv(path, text),
        _ => bail!(
            "input {} must be a .json ranking or a .csv rank/label file",
            path.display()
        ),
    }
}

fn load_eval_csv(path: &Path, text: &str) -> Result<EvalInput> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .with_context(|| format!("reading header of {}", path.display()))?
        .iter()
        .map(|h| h.trim().to_lowercase())
        .collect();
    let by_line = |err: &csv::Error| -> String {
        err.position()
            .map(|p| format!("{} line {}", path.display(), p.line()))
            .unwrap_or_else(|| path.display().to_string())
    };
    if headers == ["candidate_id", "rank"] {
        let mut list = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| anyhow::anyhow!("{}: {e}", by_line(&e)))?;
            let id = record.get(0).unwrap_or_default().to_string();
            let rank_text = record.get(1).unwrap_or_default();
            let rank: usize = rank_text.parse().with_context(|| {
                format!(
                    "{}: rank for {id:?} must be a positive integer, got {rank_text:?}",
                    path.display()
                )
            })?;
            list.push((id, rank));
        }
        Ok(EvalInput::Ranking(RankingSource::Ranks(list)))
    } else if headers == ["id", "label"] {
        let mut list = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| anyhow::anyhow!("{}: {e}", by_line(&e)))?;
            let id = record.get(0).unwrap_or_default().to_string();
            let label: Label = record
                .get(1)
                .unwrap_or_default()
                .parse()
                .with_context(|| format!("{}: candidate {id:?}", path.display()))?;
            list.push((id, label));
        }
        Ok(EvalInput::Labels(list))
    } else {
        bail!(
            "{} must have header candidate_id,rank or id,label, got {}",
            path.display(),
            headers.join(",")
        )
    }
}

/// Classification comparison of exactly two label sources, the reference
/// as truth.
fn classification_report(
    labels: &BTreeMap<String, Vec<(String, Label)>>,
    reference: &str,
) -> Result<EvaluationReport<f64>> {
    if labels.len() != 2 {
        bail!(
            "label evaluation compares exactly two sources (truth and predicted), got {}",
            labels.len()
        );
    }
    let mut maps = BTreeMap::new();
    for (name, pairs) in labels {
        let mut map = BTreeMap::new();
        for (id, label) in pairs {
            if map.insert(id.clone(), *label).is_some() {
                bail!("label source {name:?} repeats id {id:?}");
            }
        }
        if map.is_empty() {
            bail!("label source {name:?} is empty");
        }
        maps.insert(name.clone(), map);
    }
    let predicted_name = labels
        .keys()
        .find(|name| *name != reference)
        .expect("two distinct source names");
    let truth_map = &maps[reference];
    let predicted_map = &maps[predicted_name];
    let truth_ids: BTreeSet<&String> = truth_map.keys().collect();
    let predicted_ids: BTreeSet<&String> = predicted_map.keys().collect();
    if truth_ids != predicted_ids {
        let quoted = |ids: BTreeSet<&&String>| {
            ids.iter()
                .map(|id| format!("{id:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        bail!(
            "candidate sets differ: only in {reference:?}: [{}]; only in {predicted_name:?}: [{}]",
            quoted(truth_ids.difference(&predicted_ids).collect()),
            quoted(predicted_ids.difference(&truth_ids).collect())
        );
    }
    let truth: Vec<String> = truth_map.values().map(|l| l.to_string()).collect();
    let predicted: Vec<String> = predicted_map.values().map(|l| l.to_string()).collect();
    let classes = Label::ALL.iter().map(|l| l.to_string()).collect();
    let report = classification_metrics(&truth, &predicted, Some(classes))?;
    Ok(EvaluationReport::from_classification(
        report,
        reference,
        predicted_name,
    ))
}

fn print_evaluation(report: &EvaluationReport<f64>) {
    if let Some(classification) = &report.classification {
        print!("{}", classification.confusion.text_grid());
        println!("accuracy:     {}", fmt_sig(classification.accuracy));
        println!("macro F1:     {}", fmt_sig(classification.macro_f1));
        println!("hamming loss: {}", fmt_sig(classification.hamming_loss));
    }
    if let Some(comparison) = &report.ranking {
        let name_width = comparison
            .per_source
            .iter()
            .map(|s| s.source.len())
            .max()
            .unwrap_or(0)
            .max("source".len());
        println!(
            "{:<name_width$}  {:>12}  {:>12}  {:>12}",
            "source", "map", "mrr", "ndcg"
        );
        for source in &comparison.per_source {
            println!(
                "{:<name_width$}  {:>12}  {:>12}  {:>12}",
                source.source,
                fmt_sig(source.map),
                fmt_sig(source.mrr),
                fmt_sig(source.ndcg)
            );
        }
    }
}
