//! Classification, score-agreement and ranking metrics for comparing
//! score sources and rankings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{cast, Real};
use crate::topsis::TopsisResult;

/// Square confusion matrix; rows are true classes, columns predicted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    classes: Vec<String>,
    counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    /// Counts label pairs into a matrix. When `classes` is omitted the
    /// class list is the sorted union of both sequences; when given, every
    /// label must belong to it.
    pub fn from_labels(
        truth: &[String],
        predicted: &[String],
        classes: Option<Vec<String>>,
    ) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::InvalidMetricInput(format!(
                "{} true labels vs {} predicted",
                truth.len(),
                predicted.len()
            )));
        }
        if truth.is_empty() {
            return Err(Error::EmptyInput("label sequences"));
        }
        let classes = match classes {
            Some(list) => {
                if list.is_empty() {
                    return Err(Error::EmptyInput("class list"));
                }
                let mut seen = BTreeSet::new();
                for class in &list {
                    if !seen.insert(class.as_str()) {
                        return Err(Error::InvalidMetricInput(format!(
                            "duplicate class {class:?}"
                        )));
                    }
                }
                list
            }
            None => {
                let mut union: Vec<String> =
                    truth.iter().chain(predicted).cloned().collect();
                union.sort();
                union.dedup();
                union
            }
        };
        let index = |label: &String| {
            classes.iter().position(|c| c == label).ok_or_else(|| {
                Error::InvalidMetricInput(format!(
                    "label {label:?} is not in the class set [{}]",
                    classes.join(", ")
                ))
            })
        };
        let mut counts = vec![vec![0usize; classes.len()]; classes.len()];
        for (t, p) in truth.iter().zip(predicted) {
            counts[index(t)?][index(p)?] += 1;
        }
        Ok(Self { classes, counts })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().map(|row| row.iter().sum::<usize>()).sum()
    }

    /// Renders an aligned grid for terminal display, true classes down the
    /// rows and predictions across the columns.
    pub fn text_grid(&self) -> String {
        let corner = "true \\ pred";
        let label_width = self
            .classes
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max(corner.len());
        let cell_width = self
            .classes
            .iter()
            .map(String::len)
            .chain(
                self.counts
                    .iter()
                    .flatten()
                    .map(|c| c.to_string().len()),
            )
            .max()
            .unwrap_or(1);
        let mut out = String::new();
        let _ = write!(out, "{corner:<label_width$}");
        for class in &self.classes {
            let _ = write!(out, "  {class:>cell_width$}");
        }
        out.push('\n');
        for (class, row) in self.classes.iter().zip(&self.counts) {
            let _ = write!(out, "{class:<label_width$}");
            for count in row {
                let _ = write!(out, "  {count:>cell_width$}");
            }
            out.push('\n');
        }
        out
    }
}

/// One-vs-rest metrics for a single class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics<T> {
    pub class: String,
    pub precision: T,
    pub recall: T,
    pub f1: T,
    pub support: usize,
    /// True when any of the three rates had a zero denominator and was
    /// reported as 0 instead of NaN.
    pub zero_division: bool,
}

/// Full classification comparison of two label sequences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport<T> {
    pub confusion: ConfusionMatrix,
    pub per_class: Vec<ClassMetrics<T>>,
    pub accuracy: T,
    pub macro_f1: T,
    pub hamming_loss: T,
}

/// Computes per-class precision, recall and F1 plus accuracy and the
/// single-label Hamming loss, which is exactly 1 - accuracy here.
pub fn classification_metrics<T: Real>(
    truth: &[String],
    predicted: &[String],
    classes: Option<Vec<String>>,
) -> Result<ClassificationReport<T>> {
    let confusion = ConfusionMatrix::from_labels(truth, predicted, classes)?;
    let n = confusion.classes.len();
    let mut per_class = Vec::with_capacity(n);
    let mut f1_sum = T::zero();
    for i in 0..n {
        let tp = confusion.counts[i][i];
        let row_sum: usize = confusion.counts[i].iter().sum();
        let col_sum: usize = confusion.counts.iter().map(|row| row[i]).sum();
        let fp = col_sum - tp;
        let fn_ = row_sum - tp;
        let mut zero_division = false;
        let mut rate = |num: usize, den: usize| {
            if den == 0 {
                zero_division = true;
                T::zero()
            } else {
                cast::<T>(num as f64) / cast(den as f64)
            }
        };
        let precision = rate(tp, tp + fp);
        let recall = rate(tp, tp + fn_);
        let f1 = if precision + recall == T::zero() {
            zero_division = true;
            T::zero()
        } else {
            cast::<T>(2.0) * precision * recall / (precision + recall)
        };
        f1_sum = f1_sum + f1;
        per_class.push(ClassMetrics {
            class: confusion.classes[i].clone(),
            precision,
            recall,
            f1,
            support: row_sum,
            zero_division,
        });
    }
    let total = confusion.total();
    let trace: usize = (0..n).map(|i| confusion.counts[i][i]).sum();
    let accuracy = cast::<T>(trace as f64) / cast(total as f64);
    // Computed as the complement so the single-label identity
    // hamming_loss = 1 - accuracy holds bit-for-bit.
    let hamming_loss = T::one() - accuracy;
    let macro_f1 = f1_sum / cast(n as f64);
    Ok(ClassificationReport {
        confusion,
        per_class,
        accuracy,
        macro_f1,
        hamming_loss,
    })
}

/// Element-wise agreement between two score vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Agreement<T> {
    pub mae: T,
    pub rmse: T,
    pub cosine: T,
}

/// Computes MAE, RMSE and cosine similarity. Equal vectors short-circuit
/// to the exact identity values (0, 0, 1).
pub fn score_agreement<T: Real>(a: &[T], b: &[T]) -> Result<Agreement<T>> {
    if a.len() != b.len() {
        return Err(Error::InvalidMetricInput(format!(
            "score vectors have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::EmptyInput("score vectors"));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::InvalidMetricInput(
            "score vectors must be finite".into(),
        ));
    }
    let norm_a = a.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
    let norm_b = b.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
    if norm_a == T::zero() || norm_b == T::zero() {
        return Err(Error::InvalidMetricInput(
            "cosine similarity needs two non-zero vectors".into(),
        ));
    }
    if a == b {
        return Ok(Agreement {
            mae: T::zero(),
            rmse: T::zero(),
            cosine: T::one(),
        });
    }
    let n = cast::<T>(a.len() as f64);
    let (abs_sum, sq_sum, dot) = a.iter().zip(b).fold(
        (T::zero(), T::zero(), T::zero()),
        |(abs, sq, dot), (&x, &y)| {
            let d = x - y;
            (abs + d.abs(), sq + d * d, dot + x * y)
        },
    );
    Ok(Agreement {
        mae: abs_sum / n,
        rmse: (sq_sum / n).sqrt(),
        cosine: dot / (norm_a * norm_b),
    })
}

/// Rank-quality metrics of one predicted ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankingMetrics<T> {
    pub map: T,
    pub mrr: T,
    pub ndcg: T,
}

/// Scores a predicted ranking against graded relevance.
///
/// Binary relevance (grade > 0) drives MAP (mean precision at the relevant
/// ranks, averaged over min(relevant count, cutoff)) and MRR (reciprocal
/// rank of the first relevant id, 0 when none falls inside the cutoff).
/// NDCG uses the grades directly as gains with a 1/log2(rank+1) discount,
/// normalized by the grade-sorted ideal ordering. `k` truncates scoring to
/// the top k positions.
pub fn ranking_metrics<T: Real>(
    ranking: &[String],
    relevance: &BTreeMap<String, T>,
    k: Option<usize>,
) -> Result<RankingMetrics<T>> {
    if ranking.is_empty() {
        return Err(Error::EmptyInput("ranking"));
    }
    if ranking.len() != relevance.len() {
        return Err(Error::InvalidMetricInput(format!(
            "ranking holds {} ids but relevance grades {}",
            ranking.len(),
            relevance.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for id in ranking {
        if !seen.insert(id.as_str()) {
            return Err(Error::InvalidMetricInput(format!(
                "ranking repeats id {id:?}"
            )));
        }
        if !relevance.contains_key(id) {
            return Err(Error::InvalidMetricInput(format!(
                "ranking id {id:?} has no relevance grade"
            )));
        }
    }
    for (id, &grade) in relevance {
        if !grade.is_finite() || grade < T::zero() {
            return Err(Error::InvalidMetricInput(format!(
                "relevance grade for {id:?} must be finite and non-negative, got {grade}"
            )));
        }
    }
    let cutoff = match k {
        Some(0) => {
            return Err(Error::InvalidMetricInput("cutoff must be positive".into()))
        }
        Some(k) => k.min(ranking.len()),
        None => ranking.len(),
    };
    let total_relevant = relevance.values().filter(|&&g| g > T::zero()).count();
    if total_relevant == 0 {
        return Err(Error::InvalidMetricInput(
            "no relevant ids: every grade is zero".into(),
        ));
    }

    let mut hits = 0usize;
    let mut precision_sum = T::zero();
    let mut mrr = T::zero();
    let mut dcg = T::zero();
    for (pos, id) in ranking.iter().take(cutoff).enumerate() {
        let rank = pos + 1;
        let grade = relevance[id];
        if grade > T::zero() {
            hits += 1;
            precision_sum = precision_sum + cast::<T>(hits as f64) / cast(rank as f64);
            if hits == 1 {
                mrr = T::one() / cast(rank as f64);
            }
        }
        dcg = dcg + grade / cast::<T>((rank as f64) + 1.0).log2();
    }
    let map = precision_sum / cast(total_relevant.min(cutoff) as f64);

    let mut ideal: Vec<T> = relevance.values().copied().collect();
    ideal.sort_by(|a, b| b.partial_cmp(a).expect("grades are finite"));
    let idcg = ideal
        .iter()
        .take(cutoff)
        .enumerate()
        .fold(T::zero(), |acc, (pos, &g)| {
            acc + g / cast::<T>((pos as f64) + 2.0).log2()
        });
    Ok(RankingMetrics {
        map,
        mrr,
        ndcg: dcg / idcg,
    })
}

/// One named ranking: either a full TOPSIS result (closeness available)
/// or a bare id-to-rank list. Rank lists may carry non-contiguous ranks;
/// ordering sorts by rank with ties broken by id.
#[derive(Debug, Clone, PartialEq)]
pub enum RankingSource<T> {
    Topsis(TopsisResult<T>),
    Ranks(Vec<(String, usize)>),
}

impl<T: Real> RankingSource<T> {
    fn validate(&self, name: &str) -> Result<()> {
        let ids: Vec<&String> = match self {
            RankingSource::Topsis(result) => result.results.iter().map(|o| &o.id).collect(),
            RankingSource::Ranks(list) => list.iter().map(|(id, _)| id).collect(),
        };
        if ids.is_empty() {
            return Err(Error::EmptyInput("ranking"));
        }
        let mut seen = BTreeSet::new();
        for id in ids {
            if id.trim().is_empty() {
                return Err(Error::InvalidMetricInput(format!(
                    "ranking {name:?} has a blank candidate id"
                )));
            }
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidMetricInput(format!(
                    "ranking {name:?} repeats candidate {id:?}"
                )));
            }
        }
        if let RankingSource::Ranks(list) = self {
            if let Some((id, _)) = list.iter().find(|(_, rank)| *rank == 0) {
                return Err(Error::InvalidMetricInput(format!(
                    "ranking {name:?} gives candidate {id:?} rank 0; ranks start at 1"
                )));
            }
        }
        Ok(())
    }

    fn candidate_set(&self) -> BTreeSet<String> {
        match self {
            RankingSource::Topsis(result) => {
                result.results.iter().map(|o| o.id.clone()).collect()
            }
            RankingSource::Ranks(list) => list.iter().map(|(id, _)| id.clone()).collect(),
        }
    }

    fn ordered_ids(&self) -> Vec<String> {
        match self {
            RankingSource::Topsis(result) => result.ranked_ids(),
            RankingSource::Ranks(list) => {
                let mut sorted = list.clone();
                sorted.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
                sorted.into_iter().map(|(id, _)| id).collect()
            }
        }
    }

    fn rank_of(&self) -> BTreeMap<String, usize> {
        match self {
            RankingSource::Topsis(result) => result
                .results
                .iter()
                .map(|o| (o.id.clone(), o.rank))
                .collect(),
            RankingSource::Ranks(list) => list.iter().cloned().collect(),
        }
    }

    fn closeness(&self) -> Option<BTreeMap<String, T>> {
        match self {
            RankingSource::Topsis(result) => Some(
                result
                    .results
                    .iter()
                    .map(|o| (o.id.clone(), o.closeness))
                    .collect(),
            ),
            RankingSource::Ranks(_) => None,
        }
    }
}

/// Ranking metrics for one source measured against the reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceMetrics<T> {
    pub source: String,
    pub map: T,
    pub mrr: T,
    pub ndcg: T,
    /// Closeness-vector agreement; present only when both this source and
    /// the reference carry closeness values.
    pub agreement: Option<Agreement<T>>,
}

/// One candidate's rank under every compared source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankRow {
    pub id: String,
    pub ranks: BTreeMap<String, usize>,
}

/// Side-by-side comparison of rankings against a designated reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingComparison<T> {
    pub reference: String,
    /// Ids treated as relevant: the reference's top segment.
    pub relevant: Vec<String>,
    pub per_source: Vec<SourceMetrics<T>>,
    /// Rows in reference rank order.
    pub rank_table: Vec<RankRow>,
}

/// Which sources a report compares and the metric conventions it used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub compared: Vec<String>,
    pub reference: Option<String>,
    pub relevance_rule: Option<String>,
    pub ndcg_gain: Option<String>,
    pub ndcg_discount: Option<String>,
}

/// A classification or ranking evaluation, serializable to JSON and to a
/// fixed-column CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport<T> {
    pub metadata: ReportMetadata,
    pub classification: Option<ClassificationReport<T>>,
    pub ranking: Option<RankingComparison<T>>,
}

impl<T: Real> EvaluationReport<T> {
    /// Wraps a classification comparison, recording which source was
    /// treated as truth.
    pub fn from_classification(
        report: ClassificationReport<T>,
        truth_name: &str,
        predicted_name: &str,
    ) -> Self {
        Self {
            metadata: ReportMetadata {
                compared: vec![truth_name.to_string(), predicted_name.to_string()],
                reference: Some(truth_name.to_string()),
                relevance_rule: None,
                ndcg_gain: None,
                ndcg_discount: None,
            },
            classification: Some(report),
            ranking: None,
        }
    }

    /// Flattens the report into `section,subject,metric,value` rows.
    pub fn to_csv(&self) -> Result<String> {
        self.to_csv_with(|v| format!("{v}"))
    }

    /// Like [`to_csv`](Self::to_csv), with a caller-chosen number format.
    pub fn to_csv_with(&self, fmt: impl Fn(T) -> String) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(["section", "subject", "metric", "value"])?;
        let mut row = |section: &str, subject: &str, metric: &str, value: String| {
            writer.write_record([section, subject, metric, &value])
        };
        if let Some(report) = &self.classification {
            for class in &report.per_class {
                row("class", &class.class, "precision", fmt(class.precision))?;
                row("class", &class.class, "recall", fmt(class.recall))?;
                row("class", &class.class, "f1", fmt(class.f1))?;
                row("class", &class.class, "support", format!("{}", class.support))?;
                row(
                    "class",
                    &class.class,
                    "zero_division",
                    format!("{}", class.zero_division),
                )?;
            }
            row("overall", "", "accuracy", fmt(report.accuracy))?;
            row("overall", "", "macro_f1", fmt(report.macro_f1))?;
            row("overall", "", "hamming_loss", fmt(report.hamming_loss))?;
        }
        if let Some(comparison) = &self.ranking {
            for source in &comparison.per_source {
                row("ranking", &source.source, "map", fmt(source.map))?;
                row("ranking", &source.source, "mrr", fmt(source.mrr))?;
                row("ranking", &source.source, "ndcg", fmt(source.ndcg))?;
                if let Some(agreement) = &source.agreement {
                    row("agreement", &source.source, "mae", fmt(agreement.mae))?;
                    row("agreement", &source.source, "rmse", fmt(agreement.rmse))?;
                    row("agreement", &source.source, "cosine", fmt(agreement.cosine))?;
                }
            }
        }
        let bytes = writer.into_inner().expect("vec writer cannot fail");
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Compares named rankings against one of them taken as ground truth.
///
/// Relevance is binary: the reference's top `relevant_k` ids (default
/// ceil(n/2)) grade 1, the rest 0. Every source, the reference included,
/// gets MAP/MRR/NDCG against that relevance, plus closeness agreement when
/// both sides carry closeness vectors. All sources must rank exactly the
/// same candidate set.
pub fn compare_rankings<T: Real>(
    rankings: &BTreeMap<String, RankingSource<T>>,
    reference: &str,
    relevant_k: Option<usize>,
) -> Result<EvaluationReport<T>> {
    if rankings.is_empty() {
        return Err(Error::EmptyInput("rankings"));
    }
    let reference_source = rankings.get(reference).ok_or_else(|| {
        Error::InvalidMetricInput(format!(
            "reference {reference:?} is not among the sources [{}]",
            rankings.keys().cloned().collect::<Vec<_>>().join(", ")
        ))
    })?;
    for (name, source) in rankings {
        source.validate(name)?;
    }

    let reference_set = reference_source.candidate_set();
    for (name, source) in rankings {
        let set = source.candidate_set();
        if set != reference_set {
            let quoted = |ids: Vec<&String>| {
                ids.iter()
                    .map(|id| format!("{id:?}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            return Err(Error::InvalidMetricInput(format!(
                "candidate sets differ: only in {reference:?}: [{}]; only in {name:?}: [{}]",
                quoted(reference_set.difference(&set).collect()),
                quoted(set.difference(&reference_set).collect())
            )));
        }
    }

    let n = reference_set.len();
    let k = relevant_k.unwrap_or(n.div_ceil(2));
    if k == 0 || k > n {
        return Err(Error::InvalidMetricInput(format!(
            "relevant count must lie in [1, {n}], got {k}"
        )));
    }
    let reference_order = reference_source.ordered_ids();
    let relevant: Vec<String> = reference_order[..k].to_vec();
    let relevance: BTreeMap<String, T> = reference_set
        .iter()
        .map(|id| {
            let grade = if relevant.contains(id) { T::one() } else { T::zero() };
            (id.clone(), grade)
        })
        .collect();

    let reference_closeness = reference_source.closeness();
    let mut per_source = Vec::with_capacity(rankings.len());
    for (name, source) in rankings {
        let metrics = ranking_metrics(&source.ordered_ids(), &relevance, None)?;
        let agreement = match (&reference_closeness, source.closeness()) {
            (Some(ref_map), Some(src_map)) => {
                let ref_vec: Vec<T> = ref_map.values().copied().collect();
                let src_vec: Vec<T> = src_map.values().copied().collect();
                Some(score_agreement(&ref_vec, &src_vec)?)
            }
            _ => None,
        };
        per_source.push(SourceMetrics {
            source: name.clone(),
            map: metrics.map,
            mrr: metrics.mrr,
            ndcg: metrics.ndcg,
            agreement,
        });
    }

    let rank_maps: BTreeMap<&String, BTreeMap<String, usize>> = rankings
        .iter()
        .map(|(name, source)| (name, source.rank_of()))
        .collect();
    let rank_table = reference_order
        .iter()
        .map(|id| RankRow {
            id: id.clone(),
            ranks: rank_maps
                .iter()
                .map(|(name, ranks)| ((*name).clone(), ranks[id]))
                .collect(),
        })
        .collect();

    Ok(EvaluationReport {
        metadata: ReportMetadata {
            compared: rankings.keys().cloned().collect(),
            reference: Some(reference.to_string()),
            relevance_rule: Some(format!("reference top-{k} of {n}")),
            ndcg_gain: Some("grade".to_string()),
            ndcg_discount: Some("1/log2(rank+1)".to_string()),
        },
        classification: None,
        ranking: Some(RankingComparison {
            reference: reference.to_string(),
            relevant,
            per_source,
            rank_table,
        }),
    })
}
