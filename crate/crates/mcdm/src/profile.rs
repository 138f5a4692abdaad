//! Candidate profiles, rater score records, label/score mapping and the
//! assembly of decision tables from raw records.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::Vocabulary;
use crate::num::{cast, Real};
use crate::topsis::ScoreTable;

const SCORE_MIN: f64 = 1.0;
const SCORE_MAX: f64 = 5.0;

/// Three-class quality label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Poor,
    Fair,
    Excellent,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Poor, Label::Fair, Label::Excellent];

    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Poor => "Poor",
            Label::Fair => "Fair",
            Label::Excellent => "Excellent",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "poor" => Ok(Label::Poor),
            "fair" => Ok(Label::Fair),
            "excellent" => Ok(Label::Excellent),
            _ => Err(Error::UnknownLabel(s.trim().to_string())),
        }
    }
}

/// Who produced a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Expert,
    Model,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Expert => "expert",
            Source::Model => "model",
        })
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "expert" => Ok(Source::Expert),
            "model" => Ok(Source::Model),
            other => Err(Error::InvalidScore(format!(
                "source must be expert or model, got {other:?}"
            ))),
        }
    }
}

/// A numeric Likert score or a predicted label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScoreValue<T> {
    Numeric(T),
    Label(Label),
}

/// One rater's judgment of one candidate on one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord<T> {
    pub candidate_id: String,
    pub criterion: String,
    pub value: ScoreValue<T>,
    pub source: Source,
    pub rater: Option<String>,
}

/// A candidate's free-text attributes, keyed by column name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub id: String,
    pub attributes: Vec<(String, String)>,
}

/// Maps labels to representative scores and scores back to labels.
///
/// The thresholds split [1, 5] into three ranges: scores below
/// `poor_below` are Poor, scores from `excellent_from` up are Excellent,
/// and everything between is Fair. Each representative must fall inside
/// its own range, which makes the label round trip exact by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LabelMapping<T> {
    poor_below: T,
    excellent_from: T,
    poor: T,
    fair: T,
    excellent: T,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMapping<T> {
    poor_below: Option<T>,
    excellent_from: Option<T>,
    poor: Option<T>,
    fair: Option<T>,
    excellent: Option<T>,
}

impl<T: Real> Default for LabelMapping<T> {
    fn default() -> Self {
        Self {
            poor_below: cast(2.5),
            excellent_from: cast(3.5),
            poor: cast(1.5),
            fair: cast(3.0),
            excellent: cast(4.5),
        }
    }
}

impl<T: Real> LabelMapping<T> {
    /// Builds a mapping with custom thresholds and representatives.
    pub fn new(poor_below: T, excellent_from: T, poor: T, fair: T, excellent: T) -> Result<Self> {
        let lo: T = cast(SCORE_MIN);
        let hi: T = cast(SCORE_MAX);
        for (name, v) in [
            ("poor_below", poor_below),
            ("excellent_from", excellent_from),
            ("poor", poor),
            ("fair", fair),
            ("excellent", excellent),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidScore(format!("{name} is not finite")));
            }
        }
        if !(lo < poor_below && poor_below < excellent_from && excellent_from <= hi) {
            return Err(Error::InvalidScore(format!(
                "thresholds must satisfy 1 < poor_below < excellent_from <= 5, got {poor_below} and {excellent_from}"
            )));
        }
        if !(lo <= poor && poor < poor_below) {
            return Err(Error::InvalidScore(format!(
                "representative for Poor must lie in [1, {poor_below}), got {poor}"
            )));
        }
        if !(poor_below <= fair && fair < excellent_from) {
            return Err(Error::InvalidScore(format!(
                "representative for Fair must lie in [{poor_below}, {excellent_from}), got {fair}"
            )));
        }
        if !(excellent_from <= excellent && excellent <= hi) {
            return Err(Error::InvalidScore(format!(
                "representative for Excellent must lie in [{excellent_from}, 5], got {excellent}"
            )));
        }
        Ok(Self {
            poor_below,
            excellent_from,
            poor,
            fair,
            excellent,
        })
    }

    /// Parses a mapping from JSON; absent fields keep their defaults.
    pub fn from_json(json: &str) -> Result<Self> {
        let raw: RawMapping<T> = serde_json::from_str(json)?;
        let d = Self::default();
        Self::new(
            raw.poor_below.unwrap_or(d.poor_below),
            raw.excellent_from.unwrap_or(d.excellent_from),
            raw.poor.unwrap_or(d.poor),
            raw.fair.unwrap_or(d.fair),
            raw.excellent.unwrap_or(d.excellent),
        )
    }

    /// The representative score for a label.
    pub fn label_to_score(&self, label: Label) -> T {
        match label {
            Label::Poor => self.poor,
            Label::Fair => self.fair,
            Label::Excellent => self.excellent,
        }
    }

    /// The label whose range contains `score`; the score must lie in [1, 5].
    pub fn score_to_label(&self, score: T) -> Result<Label> {
        check_score_range(score)?;
        Ok(if score < self.poor_below {
            Label::Poor
        } else if score < self.excellent_from {
            Label::Fair
        } else {
            Label::Excellent
        })
    }
}

fn check_score_range<T: Real>(score: T) -> Result<()> {
    if !score.is_finite() || score < cast(SCORE_MIN) || score > cast(SCORE_MAX) {
        return Err(Error::InvalidScore(format!(
            "score must lie in [1, 5], got {score}"
        )));
    }
    Ok(())
}

/// Classifies a score with the default 2.5/3.5 thresholds.
pub fn score_to_label<T: Real>(score: T) -> Result<Label> {
    LabelMapping::default().score_to_label(score)
}

/// Representative score for a label under a mapping.
pub fn label_to_score<T: Real>(label: Label, mapping: &LabelMapping<T>) -> T {
    mapping.label_to_score(label)
}

/// One half-open score bin attached to a linguistic term; the final bin of
/// a binding is closed so the full [1, 5] range is covered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBin<T> {
    pub lower: T,
    pub upper: T,
    pub term: String,
}

/// Partition of [1, 5] into score bins, each naming a vocabulary term.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreBinding<T> {
    bins: Vec<ScoreBin<T>>,
}

impl<T: Real> Serialize for ScoreBinding<T> {
    fn serialize<S>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error>
    where
        S: serde::Serializer,
    {
        self.bins.serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for ScoreBinding<T> {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let bins = Vec::<ScoreBin<T>>::deserialize(deserializer)?;
        Self::new(bins).map_err(serde::de::Error::custom)
    }
}

impl<T: Real> Default for ScoreBinding<T> {
    fn default() -> Self {
        let edges = [1.0, 1.8, 2.6, 3.4, 4.2, 5.0];
        let terms = ["Very Low", "Low", "Medium", "High", "Very High"];
        let bins = terms
            .iter()
            .enumerate()
            .map(|(i, term)| ScoreBin {
                lower: cast(edges[i]),
                upper: cast(edges[i + 1]),
                term: term.to_string(),
            })
            .collect();
        Self { bins }
    }
}

impl<T: Real> ScoreBinding<T> {
    /// Validates that the bins tile [1, 5] exactly: ascending, adjacent
    /// edges equal, first lower 1 and last upper 5.
    pub fn new(bins: Vec<ScoreBin<T>>) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::InvalidBinding("no bins".into()));
        }
        for (i, bin) in bins.iter().enumerate() {
            if bin.term.trim().is_empty() {
                return Err(Error::InvalidBinding(format!("bin {i} has a blank term")));
            }
            if !bin.lower.is_finite() || !bin.upper.is_finite() || bin.lower >= bin.upper {
                return Err(Error::InvalidBinding(format!(
                    "bin {i} bounds must be finite with lower < upper, got [{}, {})",
                    bin.lower, bin.upper
                )));
            }
        }
        if bins[0].lower != cast(SCORE_MIN) {
            return Err(Error::InvalidBinding(format!(
                "first bin must start at 1, got {}",
                bins[0].lower
            )));
        }
        if bins[bins.len() - 1].upper != cast(SCORE_MAX) {
            return Err(Error::InvalidBinding(format!(
                "last bin must end at 5, got {}",
                bins[bins.len() - 1].upper
            )));
        }
        for i in 1..bins.len() {
            if bins[i].lower != bins[i - 1].upper {
                return Err(Error::InvalidBinding(format!(
                    "gap or overlap between bins {} and {i}: {} vs {}",
                    i - 1,
                    bins[i - 1].upper,
                    bins[i].lower
                )));
            }
        }
        Ok(Self { bins })
    }

    pub fn bins(&self) -> &[ScoreBin<T>] {
        &self.bins
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    /// The term whose bin contains `score`; the last bin includes its
    /// upper edge.
    pub fn term_for(&self, score: T) -> Result<&str> {
        check_score_range(score)?;
        for (i, bin) in self.bins.iter().enumerate() {
            let last = i == self.bins.len() - 1;
            if score >= bin.lower && (score < bin.upper || (last && score <= bin.upper)) {
                return Ok(&bin.term);
            }
        }
        unreachable!("bins tile [1, 5] and the score is in range")
    }
}

/// Averages score records into a crisp decision table.
///
/// Records are filtered by `source` when one is given; labels convert to
/// scores through `mapping` before averaging; raters scoring the same cell
/// are averaged arithmetically. Records naming criteria outside `criteria`
/// are ignored. Candidates are every id seen after filtering, in lexical
/// order, and each must cover every criterion.
pub fn build_score_table<T: Real>(
    records: &[ScoreRecord<T>],
    criteria: &[String],
    mapping: &LabelMapping<T>,
    source: Option<Source>,
) -> Result<ScoreTable<T>> {
    if criteria.is_empty() {
        return Err(Error::EmptyInput("criteria"));
    }
    let filtered: Vec<&ScoreRecord<T>> = records
        .iter()
        .filter(|r| source.is_none_or(|s| r.source == s))
        .collect();
    if filtered.is_empty() {
        return Err(Error::EmptyInput("score records"));
    }

    let mut candidates: Vec<String> = filtered
        .iter()
        .map(|r| r.candidate_id.clone())
        .collect();
    candidates.sort();
    candidates.dedup();

    let position = |name: &str| {
        let wanted = name.trim().to_lowercase();
        criteria
            .iter()
            .position(|c| c.trim().to_lowercase() == wanted)
    };

    let mut cells: Vec<Vec<Vec<T>>> =
        vec![vec![Vec::new(); criteria.len()]; candidates.len()];
    for record in &filtered {
        let Some(j) = position(&record.criterion) else {
            continue;
        };
        let i = candidates
            .binary_search(&record.candidate_id)
            .expect("candidate ids were collected from these records");
        let value = match record.value {
            ScoreValue::Numeric(x) => {
                check_score_range(x)?;
                x
            }
            ScoreValue::Label(label) => mapping.label_to_score(label),
        };
        cells[i][j].push(value);
    }

    let mut gaps = Vec::new();
    for (i, candidate) in candidates.iter().enumerate() {
        for (j, criterion) in criteria.iter().enumerate() {
            if cells[i][j].is_empty() {
                gaps.push(format!("({candidate}, {criterion})"));
            }
        }
    }
    if !gaps.is_empty() {
        return Err(Error::MissingScores(gaps.join(", ")));
    }

    let rows = cells
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|mut values| {
                    // Sort before summing so record order cannot perturb
                    // the mean in the last bit.
                    values.sort_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
                    let n = cast::<T>(values.len() as f64);
                    values.iter().fold(T::zero(), |acc, &v| acc + v) / n
                })
                .collect()
        })
        .collect();
    ScoreTable::crisp(candidates, criteria.to_vec(), rows)
}

/// Replaces each crisp score with the TFN of its bound linguistic term.
pub fn fuzzify_score_table<T: Real>(
    table: &ScoreTable<T>,
    vocab: &Vocabulary<T>,
    binding: &ScoreBinding<T>,
) -> Result<ScoreTable<T>> {
    let Some(rows) = table.crisp_rows() else {
        return Err(Error::Unsupported(
            "fuzzification applies to crisp tables only".into(),
        ));
    };
    let fuzzy_rows = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|&score| vocab.lookup(binding.term_for(score)?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ScoreTable::fuzzy(
        table.candidates().to_vec(),
        table.criteria().to_vec(),
        fuzzy_rows,
    )?
    .with_kinds(table.kinds().to_vec())
}

const SCORES_HEADER: [&str; 5] = ["candidate_id", "criterion", "score", "source", "rater"];
const CANDIDATES_HEADER: [&str; 5] = ["id", "experience", "education", "skills", "about"];

fn check_header(got: &csv::StringRecord, want: &[&str], what: &str) -> Result<()> {
    let got_names: Vec<String> = got.iter().map(|h| h.trim().to_lowercase()).collect();
    if got_names != want {
        return Err(Error::InvalidTable(format!(
            "{what} CSV must have header {}, got {}",
            want.join(","),
            got_names.join(",")
        )));
    }
    Ok(())
}

/// Parses the `candidate_id,criterion,score,source,rater` CSV format.
/// The score field holds either a number in [1, 5] or a label.
pub fn parse_scores_csv<T: Real>(text: &str) -> Result<Vec<ScoreRecord<T>>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    check_header(reader.headers()?, &SCORES_HEADER, "scores")?;
    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let line = idx + 2;
        let candidate_id = row[0].trim().to_string();
        if candidate_id.is_empty() {
            return Err(Error::InvalidTable(format!(
                "scores CSV line {line}: candidate_id is blank"
            )));
        }
        let criterion = row[1].trim().to_string();
        if criterion.is_empty() {
            return Err(Error::InvalidTable(format!(
                "scores CSV line {line}: criterion is blank"
            )));
        }
        let raw_score = row[2].trim();
        let value = match raw_score.parse::<f64>() {
            Ok(x) => {
                let x: T = cast(x);
                check_score_range(x).map_err(|_| {
                    Error::InvalidScore(format!(
                        "scores CSV line {line}: score must lie in [1, 5], got {raw_score}"
                    ))
                })?;
                ScoreValue::Numeric(x)
            }
            Err(_) => ScoreValue::Label(raw_score.parse::<Label>().map_err(|_| {
                Error::InvalidScore(format!(
                    "scores CSV line {line}: score must be a number in [1, 5] or one of Poor, Fair, Excellent, got {raw_score:?}"
                ))
            })?),
        };
        let source = row[3].parse::<Source>().map_err(|e| {
            Error::InvalidScore(format!("scores CSV line {line}: {e}"))
        })?;
        let rater = match row[4].trim() {
            "" => None,
            r => Some(r.to_string()),
        };
        records.push(ScoreRecord {
            candidate_id,
            criterion,
            value,
            source,
            rater,
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyInput("score records"));
    }
    Ok(records)
}

/// Writes records back to the scores CSV format; parsing the output
/// reproduces the records exactly.
pub fn scores_to_csv<T: Real>(records: &[ScoreRecord<T>]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(SCORES_HEADER)?;
    for record in records {
        let score = match &record.value {
            ScoreValue::Numeric(x) => format!("{x}"),
            ScoreValue::Label(label) => label.as_str().to_string(),
        };
        writer.write_record([
            record.candidate_id.as_str(),
            record.criterion.as_str(),
            &score,
            &record.source.to_string(),
            record.rater.as_deref().unwrap_or(""),
        ])?;
    }
    let bytes = writer.into_inner().expect("vec writer cannot fail");
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parses the `id,experience,education,skills,about` CSV format. Attribute
/// texts may be empty; ids must be unique and non-empty.
pub fn parse_candidates_csv(text: &str) -> Result<Vec<CandidateRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    check_header(reader.headers()?, &CANDIDATES_HEADER, "candidates")?;
    let mut out: Vec<CandidateRecord> = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let line = idx + 2;
        let id = row[0].trim().to_string();
        if id.is_empty() {
            return Err(Error::InvalidTable(format!(
                "candidates CSV line {line}: id is blank"
            )));
        }
        if out.iter().any(|c| c.id == id) {
            return Err(Error::InvalidTable(format!(
                "candidates CSV line {line}: duplicate id {id:?}"
            )));
        }
        let attributes = CANDIDATES_HEADER[1..]
            .iter()
            .zip(row.iter().skip(1))
            .map(|(name, text)| (name.to_string(), text.to_string()))
            .collect();
        out.push(CandidateRecord { id, attributes });
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("candidate records"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numeric(candidate: &str, criterion: &str, score: f64) -> ScoreRecord<f64> {
        ScoreRecord {
            candidate_id: candidate.to_string(),
            criterion: criterion.to_string(),
            value: ScoreValue::Numeric(score),
            source: Source::Expert,
            rater: None,
        }
    }

    fn labeled(candidate: &str, criterion: &str, label: Label) -> ScoreRecord<f64> {
        ScoreRecord {
            candidate_id: candidate.to_string(),
            criterion: criterion.to_string(),
            value: ScoreValue::Label(label),
            source: Source::Model,
            rater: None,
        }
    }

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn integer_scores_follow_the_published_rule() {
        assert_eq!(score_to_label(1.0).unwrap(), Label::Poor);
        assert_eq!(score_to_label(2.0).unwrap(), Label::Poor);
        assert_eq!(score_to_label(3.0).unwrap(), Label::Fair);
        assert_eq!(score_to_label(4.0).unwrap(), Label::Excellent);
        assert_eq!(score_to_label(5.0).unwrap(), Label::Excellent);
    }

    #[test]
    fn fractional_scores_use_the_boundary_thresholds() {
        assert_eq!(score_to_label(2.4999).unwrap(), Label::Poor);
        assert_eq!(score_to_label(2.5).unwrap(), Label::Fair);
        assert_eq!(score_to_label(3.4999).unwrap(), Label::Fair);
        assert_eq!(score_to_label(3.5).unwrap(), Label::Excellent);
    }

    #[test]
    fn out_of_range_scores_are_rejected() {
        assert!(score_to_label(0.99).is_err());
        assert!(score_to_label(5.01).is_err());
        assert!(score_to_label(f64::NAN).is_err());
    }

    #[test]
    fn default_representatives_are_range_midpoints() {
        let mapping = LabelMapping::<f64>::default();
        assert_eq!(mapping.label_to_score(Label::Poor), 1.5);
        assert_eq!(mapping.label_to_score(Label::Fair), 3.0);
        assert_eq!(mapping.label_to_score(Label::Excellent), 4.5);
    }

    #[test]
    fn round_trip_holds_for_every_label_under_defaults() {
        let mapping = LabelMapping::<f64>::default();
        for label in Label::ALL {
            let score = mapping.label_to_score(label);
            assert_eq!(mapping.score_to_label(score).unwrap(), label);
        }
    }

    #[test]
    fn round_trip_holds_under_custom_thresholds() {
        let mapping = LabelMapping::new(2.0, 4.0, 1.2, 3.9, 5.0).unwrap();
        for label in Label::ALL {
            let score = mapping.label_to_score(label);
            assert_eq!(mapping.score_to_label(score).unwrap(), label);
        }
    }

    #[test]
    fn representatives_outside_their_range_are_rejected() {
        assert!(LabelMapping::new(2.5, 3.5, 2.5, 3.0, 4.5).is_err());
        assert!(LabelMapping::new(2.5, 3.5, 1.5, 3.5, 4.5).is_err());
        assert!(LabelMapping::new(2.5, 3.5, 1.5, 3.0, 3.4).is_err());
        assert!(LabelMapping::new(3.5, 2.5, 1.5, 3.0, 4.5).is_err());
        assert!(LabelMapping::new(2.5, 3.5, f64::NAN, 3.0, 4.5).is_err());
    }

    #[test]
    fn labels_parse_case_insensitively() {
        assert_eq!("  EXCELLENT ".parse::<Label>().unwrap(), Label::Excellent);
        assert_eq!("poor".parse::<Label>().unwrap(), Label::Poor);
        let err = "Great".parse::<Label>().unwrap_err();
        assert!(err.to_string().contains("Great"), "{err}");
    }

    #[test]
    fn single_records_pass_through() {
        let records = vec![
            numeric("a", "x", 4.0),
            numeric("a", "y", 2.0),
            numeric("b", "x", 1.0),
            numeric("b", "y", 5.0),
        ];
        let table =
            build_score_table(&records, &names(&["x", "y"]), &LabelMapping::default(), None)
                .unwrap();
        assert_eq!(table.crisp_rows().unwrap(), &[vec![4.0, 2.0], vec![1.0, 5.0]]);
    }

    #[test]
    fn raters_on_one_cell_average() {
        let records = vec![numeric("a", "x", 4.0), numeric("a", "x", 3.0), numeric("b", "x", 2.0)];
        let table =
            build_score_table(&records, &names(&["x"]), &LabelMapping::default(), None).unwrap();
        assert_eq!(table.crisp_rows().unwrap()[0][0], 3.5);
    }

    #[test]
    fn model_labels_convert_before_averaging() {
        let records = vec![
            labeled("m", "Experience", Label::Excellent),
            labeled("m", "Skills", Label::Fair),
            labeled("m", "Education", Label::Poor),
            labeled("m", "About", Label::Fair),
        ];
        let criteria = names(&["Experience", "Skills", "Education", "About"]);
        let table =
            build_score_table(&records, &criteria, &LabelMapping::default(), None).unwrap();
        assert_eq!(table.crisp_rows().unwrap()[0], vec![4.5, 3.0, 1.5, 3.0]);
    }

    #[test]
    fn mixed_numeric_and_label_cells_average_after_conversion() {
        // Fair converts to 3.0, so the cell holds (4.0 + 3.0) / 2.
        let records = vec![numeric("a", "x", 4.0), labeled("a", "x", Label::Fair)];
        let table =
            build_score_table(&records, &names(&["x"]), &LabelMapping::default(), None).unwrap();
        assert_eq!(table.crisp_rows().unwrap()[0][0], 3.5);
    }

    #[test]
    fn missing_cells_are_listed() {
        let records = vec![numeric("a", "x", 4.0), numeric("b", "y", 2.0)];
        let err = build_score_table(&records, &names(&["x", "y"]), &LabelMapping::default(), None)
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(a, y)"), "{msg}");
        assert!(msg.contains("(b, x)"), "{msg}");
    }

    #[test]
    fn source_filter_selects_records() {
        let records = vec![
            numeric("a", "x", 5.0),
            numeric("b", "x", 4.0),
            labeled("c", "x", Label::Poor),
        ];
        let table = build_score_table(
            &records,
            &names(&["x"]),
            &LabelMapping::default(),
            Some(Source::Expert),
        )
        .unwrap();
        assert_eq!(table.candidates(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn record_order_does_not_change_the_table() {
        let mut records = vec![
            numeric("a", "x", 4.9),
            numeric("a", "x", 1.3),
            numeric("a", "x", 3.7),
            numeric("b", "x", 2.2),
        ];
        let criteria = names(&["x"]);
        let forward =
            build_score_table(&records, &criteria, &LabelMapping::default(), None).unwrap();
        records.reverse();
        let backward =
            build_score_table(&records, &criteria, &LabelMapping::default(), None).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn unlisted_criteria_are_ignored() {
        let records = vec![numeric("a", "x", 4.0), numeric("a", "Overall", 5.0), numeric("b", "x", 2.0)];
        let table =
            build_score_table(&records, &names(&["x"]), &LabelMapping::default(), None).unwrap();
        assert_eq!(table.criteria(), &["x".to_string()]);
        assert_eq!(table.crisp_rows().unwrap()[0], vec![4.0]);
    }

    #[test]
    fn default_binding_reproduces_the_vocabulary_examples() {
        let binding = ScoreBinding::<f64>::default();
        let vocab = Vocabulary::<f64>::five_level();
        let tfn = vocab.lookup(binding.term_for(3.0).unwrap()).unwrap();
        assert_eq!((tfn.l(), tfn.m(), tfn.u()), (0.3, 0.5, 0.7));
        let tfn = vocab.lookup(binding.term_for(5.0).unwrap()).unwrap();
        assert_eq!((tfn.l(), tfn.m(), tfn.u()), (0.7, 0.9, 1.0));
        let tfn = vocab.lookup(binding.term_for(1.0).unwrap()).unwrap();
        assert_eq!((tfn.l(), tfn.m(), tfn.u()), (0.0, 0.1, 0.3));
    }

    #[test]
    fn binding_gaps_and_overlaps_are_rejected() {
        let gap = vec![
            ScoreBin { lower: 1.0, upper: 2.0, term: "Low".into() },
            ScoreBin { lower: 2.5, upper: 5.0, term: "High".into() },
        ];
        assert!(ScoreBinding::new(gap).is_err());
        let overlap = vec![
            ScoreBin { lower: 1.0, upper: 3.0, term: "Low".into() },
            ScoreBin { lower: 2.5, upper: 5.0, term: "High".into() },
        ];
        assert!(ScoreBinding::new(overlap).is_err());
        let short = vec![ScoreBin { lower: 1.0, upper: 4.0, term: "Low".into() }];
        assert!(ScoreBinding::new(short).is_err());
    }

    #[test]
    fn fuzzify_maps_every_cell_through_its_bin() {
        let records = vec![
            numeric("a", "x", 3.0),
            numeric("a", "y", 5.0),
            numeric("b", "x", 1.0),
            numeric("b", "y", 4.3),
        ];
        let table =
            build_score_table(&records, &names(&["x", "y"]), &LabelMapping::default(), None)
                .unwrap();
        let fuzzy = fuzzify_score_table(
            &table,
            &Vocabulary::five_level(),
            &ScoreBinding::default(),
        )
        .unwrap();
        let rows = fuzzy.fuzzy_rows().unwrap();
        assert_eq!((rows[0][0].l(), rows[0][0].m(), rows[0][0].u()), (0.3, 0.5, 0.7));
        assert_eq!((rows[0][1].l(), rows[0][1].m(), rows[0][1].u()), (0.7, 0.9, 1.0));
        assert_eq!((rows[1][0].l(), rows[1][0].m(), rows[1][0].u()), (0.0, 0.1, 0.3));
        assert_eq!((rows[1][1].l(), rows[1][1].m(), rows[1][1].u()), (0.7, 0.9, 1.0));
    }

    #[test]
    fn one_bin_tables_fuzzify_to_identical_cells() {
        let records = vec![
            numeric("a", "x", 3.0),
            numeric("a", "y", 2.9),
            numeric("b", "x", 3.3),
            numeric("b", "y", 2.7),
        ];
        let table =
            build_score_table(&records, &names(&["x", "y"]), &LabelMapping::default(), None)
                .unwrap();
        let fuzzy = fuzzify_score_table(
            &table,
            &Vocabulary::five_level(),
            &ScoreBinding::default(),
        )
        .unwrap();
        let rows = fuzzy.fuzzy_rows().unwrap();
        let first = rows[0][0];
        assert!(rows.iter().all(|row| row.iter().all(|&c| c == first)));
    }

    const SAMPLE_SCORES: &str = "\
candidate_id,criterion,score,source,rater
a,Skills,4.5,expert,e1
a,Experience,excellent,model,
b,Skills,3,expert,e2
b,Experience,Poor,model,
";

    #[test]
    fn scores_csv_parses_numbers_and_labels() {
        let records = parse_scores_csv::<f64>(SAMPLE_SCORES).unwrap();
        assert_eq!(records.len(), 4);
        assert_eq!(records[0].value, ScoreValue::Numeric(4.5));
        assert_eq!(records[0].rater.as_deref(), Some("e1"));
        assert_eq!(records[1].value, ScoreValue::Label(Label::Excellent));
        assert_eq!(records[1].source, Source::Model);
        assert_eq!(records[1].rater, None);
    }

    #[test]
    fn scores_csv_round_trips() {
        let records = parse_scores_csv::<f64>(SAMPLE_SCORES).unwrap();
        let emitted = scores_to_csv(&records).unwrap();
        let reparsed = parse_scores_csv::<f64>(&emitted).unwrap();
        assert_eq!(records, reparsed);
    }

    #[test]
    fn scores_csv_rejects_bad_rows() {
        let bad_header = "id,criterion,score,source,rater\na,x,3,expert,\n";
        assert!(parse_scores_csv::<f64>(bad_header).is_err());

        let bad_score = "candidate_id,criterion,score,source,rater\na,x,six,expert,\n";
        let err = parse_scores_csv::<f64>(bad_score).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");

        let out_of_range = "candidate_id,criterion,score,source,rater\na,x,7,expert,\n";
        assert!(parse_scores_csv::<f64>(out_of_range).is_err());

        let bad_source = "candidate_id,criterion,score,source,rater\na,x,3,referee,\n";
        assert!(parse_scores_csv::<f64>(bad_source).is_err());

        let ragged = "candidate_id,criterion,score,source,rater\na,x,3\n";
        assert!(matches!(parse_scores_csv::<f64>(ragged), Err(Error::Csv(_))));
    }

    #[test]
    fn candidates_csv_parses_and_validates() {
        let text = "\
id,experience,education,skills,about
c1,5 years,BSc,\"Rust, Python\",team lead
c2,,MSc,,
";
        let records = parse_candidates_csv(text).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].id, "c1");
        assert_eq!(records[0].attributes[2], ("skills".to_string(), "Rust, Python".to_string()));
        assert_eq!(records[1].attributes[0].1, "");

        let dup = "id,experience,education,skills,about\nc1,,,,\nc1,,,,\n";
        assert!(parse_candidates_csv(dup).is_err());
        let blank = "id,experience,education,skills,about\n ,,,,\n";
        assert!(parse_candidates_csv(blank).is_err());
    }
}
