//! Run configuration: a JSON config file merged with command-line flags,
//! flags winning, with `MCDM_RANK_OUT` as the fallback output directory.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mcdm::profile::Source;
use mcdm::topsis::{Mode, Normalization};
use mcdm::{LabelMapping64, ScoreBinding64, Vocabulary64};
use serde::{Deserialize, Serialize};

pub const OUT_DIR_ENV: &str = "MCDM_RANK_OUT";
pub const DEFAULT_OUT_DIR: &str = "mcdm-out";

/// The built-in weight preset: Skills 0.60, Experience 0.20,
/// Education 0.15, About 0.05.
pub const PRESET_WEIGHTS: [(&str, f64); 4] = [
    ("Skills", 0.60),
    ("Experience", 0.20),
    ("Education", 0.15),
    ("About", 0.05),
];

/// Where criterion weights come from; a run names exactly one source.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    File(PathBuf),
    Pairwise(Vec<PathBuf>),
    Preset,
}

/// How fuzzy-mode runs turn averaged crisp scores into TFNs: keep them as
/// degenerate TFNs (exactly reproducing the crisp run at spread 0) or map
/// them through the linguistic binding and vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreFuzzification {
    Degenerate,
    Binding,
}

/// Everything a command needs, after merging flags over the config file.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scores: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_source: Option<WeightSource>,
    pub mode: Mode,
    pub normalization: Normalization,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score_source: Option<Source>,
    pub score_fuzzification: ScoreFuzzification,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relevant_k: Option<usize>,
    pub label_mapping: LabelMapping64,
    pub binding: ScoreBinding64,
    pub vocabulary: Vocabulary64,
    pub out_dir: PathBuf,
    /// Reserved for future stochastic extensions; deterministic paths
    /// ignore it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Flag values that override the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scores: Option<PathBuf>,
    pub candidates: Option<PathBuf>,
    pub criteria: Option<Vec<String>>,
    pub weights: Option<PathBuf>,
    pub pairwise: Vec<PathBuf>,
    pub paper_weights: bool,
    pub mode: Option<String>,
    pub normalization: Option<String>,
    pub spread: Option<f64>,
    pub score_source: Option<String>,
    pub relevant_k: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scores: Option<String>,
    candidates: Option<String>,
    criteria: Option<Vec<String>>,
    weights: Option<String>,
    pairwise: Option<Vec<String>>,
    paper_weights: Option<bool>,
    mode: Option<String>,
    normalization: Option<String>,
    spread: Option<f64>,
    score_source: Option<String>,
    score_fuzzification: Option<String>,
    relevant_k: Option<usize>,
    label_mapping: Option<serde_json::Value>,
    binding: Option<serde_json::Value>,
    vocabulary: Option<serde_json::Value>,
    out: Option<String>,
    seed: Option<u64>,
}

impl RunConfig {
    /// Loads the optional config file and applies flag overrides on top.
    pub fn resolve(config_path: Option<&Path>, flags: &Overrides) -> Result<Self> {
        let raw = match config_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str::<RawConfig>(&text)
                    .with_context(|| format!("config {}", path.display()))?
            }
            None => RawConfig::default(),
        };
        // Paths inside the config resolve against its own directory, so a
        // config can ship next to its data files.
        let base = config_path.and_then(Path::parent);
        let rebase = |p: &str| -> PathBuf {
            let path = PathBuf::from(p);
            match base {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path,
            }
        };

        let weight_source = resolve_weight_source(flags, &raw, &rebase)?;
        let mode = match flag_or(&flags.mode, &raw.mode) {
            None => Mode::Crisp,
            Some(text) => parse_mode(&text)?,
        };
        let normalization = match flag_or(&flags.normalization, &raw.normalization) {
            // Vector is the crisp default; fuzzy tables only support
            // linear-max, so fuzzy runs default to that.
            None => match mode {
                Mode::Crisp => Normalization::Vector,
                Mode::Fuzzy => Normalization::LinearMax,
            },
            Some(text) => parse_normalization(&text)?,
        };
        let score_source = match flag_or(&flags.score_source, &raw.score_source) {
            None => None,
            Some(text) => Some(text.parse::<Source>()?),
        };
        let score_fuzzification = match &raw.score_fuzzification {
            None => ScoreFuzzification::Degenerate,
            Some(text) => parse_score_fuzzification(text)?,
        };
        let label_mapping = match &raw.label_mapping {
            None => LabelMapping64::default(),
            Some(value) => LabelMapping64::from_json(&value.to_string())
                .context("config field label_mapping")?,
        };
        let binding = match &raw.binding {
            None => ScoreBinding64::default(),
            Some(value) => {
                ScoreBinding64::from_json(&value.to_string()).context("config field binding")?
            }
        };
        let vocabulary = match &raw.vocabulary {
            None => Vocabulary64::five_level(),
            Some(value) => {
                Vocabulary64::from_json(&value.to_string()).context("config field vocabulary")?
            }
        };
        let out_dir = flags
            .out
            .clone()
            .or_else(|| raw.out.as_deref().map(&rebase))
            .or_else(|| std::env::var(OUT_DIR_ENV).ok().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

        Ok(Self {
            config_path: config_path.map(Path::to_path_buf),
            scores: flags
                .scores
                .clone()
                .or_else(|| raw.scores.as_deref().map(&rebase)),
            candidates: flags
                .candidates
                .clone()
                .or_else(|| raw.candidates.as_deref().map(&rebase)),
            criteria: flags.criteria.clone().or_else(|| raw.criteria.clone()),
            weight_source,
            mode,
            normalization,
            spread: flags.spread.or(raw.spread),
            score_source,
            score_fuzzification,
            relevant_k: flags.relevant_k.or(raw.relevant_k),
            label_mapping,
            binding,
            vocabulary,
            out_dir,
            seed: raw.seed,
        })
    }
}

fn flag_or(flag: &Option<String>, raw: &Option<String>) -> Option<String> {
    flag.clone().or_else(|| raw.clone())
}

fn resolve_weight_source(
    flags: &Overrides,
    raw: &RawConfig,
    rebase: &impl Fn(&str) -> PathBuf,
) -> Result<Option<WeightSource>> {
    let mut from_flags = Vec::new();
    if let Some(path) = &flags.weights {
        from_flags.push(WeightSource::File(path.clone()));
    }
    if !flags.pairwise.is_empty() {
        from_flags.push(WeightSource::Pairwise(flags.pairwise.clone()));
    }
    if flags.paper_weights {
        from_flags.push(WeightSource::Preset);
    }
    if from_flags.len() > 1 {
        bail!("pass exactly one weight source: --weights, --pairwise or --paper-weights");
    }
    if let Some(source) = from_flags.pop() {
        return Ok(Some(source));
    }

    let mut from_config = Vec::new();
    if let Some(path) = &raw.weights {
        from_config.push(WeightSource::File(rebase(path)));
    }
    if let Some(paths) = &raw.pairwise {
        if paths.is_empty() {
            bail!("config field pairwise must list at least one file");
        }
        from_config.push(WeightSource::Pairwise(paths.iter().map(|p| rebase(p)).collect()));
    }
    if raw.paper_weights == Some(true) {
        from_config.push(WeightSource::Preset);
    }
    if from_config.len() > 1 {
        bail!("config names more than one weight source: pick one of weights, pairwise or paper_weights");
    }
    Ok(from_config.pop())
}

fn parse_mode(text: &str) -> Result<Mode> {
    match text.trim().to_lowercase().as_str() {
        "crisp" => Ok(Mode::Crisp),
        "fuzzy" => Ok(Mode::Fuzzy),
        other => bail!("mode must be crisp or fuzzy, got {other:?}"),
    }
}

fn parse_normalization(text: &str) -> Result<Normalization> {
    match text.trim().to_lowercase().as_str() {
        "vector" => Ok(Normalization::Vector),
        "linear-max" | "linear_max" => Ok(Normalization::LinearMax),
        other => bail!("normalization must be vector or linear-max, got {other:?}"),
    }
}

fn parse_score_fuzzification(text: &str) -> Result<ScoreFuzzification> {
    match text.trim().to_lowercase().as_str() {
        "degenerate" => Ok(ScoreFuzzification::Degenerate),
        "binding" => Ok(ScoreFuzzification::Binding),
        other => bail!("score_fuzzification must be degenerate or binding, got {other:?}"),
    }
}
