//! Multi-criteria decision making for candidate ranking.
//!
//! The crate covers the full pipeline from raw rater records to evaluated
//! rankings:
//!
//! - [`fuzzy`]: triangular fuzzy numbers and linguistic vocabularies.
//! - [`weighting`]: pairwise comparison matrices, eigenvector weight
//!   derivation with consistency checking, and weight fuzzification.
//! - [`profile`]: candidate and score ingestion, label/score mapping, and
//!   assembly of decision tables.
//! - [`topsis`]: crisp and fuzzy TOPSIS ranking.
//! - [`metrics`]: classification, score-agreement and ranking metrics.
//!
//! Everything numeric is generic over the scalar type through [`Real`],
//! which `f32` and `f64` implement; the `*64` aliases at the crate root
//! pick the double-precision instantiations most callers want.
//!
//! ```
//! use mcdm::{run_topsis, Normalization, ScoreTable64, WeightVector64};
//!
//! let table = ScoreTable64::crisp(
//!     vec!["ada".into(), "grace".into()],
//!     vec!["skills".into(), "experience".into()],
//!     vec![vec![4.5, 3.8], vec![4.0, 4.5]],
//! )?;
//! let weights = WeightVector64::new(
//!     vec!["skills".into(), "experience".into()],
//!     vec![0.7, 0.3],
//! )?;
//! let ranking = run_topsis(&table, &weights, Normalization::Vector)?;
//! assert_eq!(ranking.results[0].id, "ada");
//! # Ok::<(), mcdm::Error>(())
//! ```

pub mod error;
pub mod fuzzy;
pub mod metrics;
mod num;
pub mod profile;
pub mod topsis;
pub mod weighting;

pub use error::{Error, Result};
pub use fuzzy::{Tfn, Vocabulary};
pub use metrics::{
    classification_metrics, compare_rankings, ranking_metrics, score_agreement,
    EvaluationReport, RankingSource,
};
pub use num::Real;
pub use profile::{
    build_score_table, fuzzify_score_table, label_to_score, parse_candidates_csv,
    parse_scores_csv, score_to_label, Label, LabelMapping, ScoreBinding, ScoreRecord, ScoreValue,
    Source,
};
pub use topsis::{
    apply_weights, ideal_solutions, normalize, run_topsis, CriterionKind, Mode, Normalization,
    ScoreTable, TopsisResult,
};
pub use weighting::{
    aggregate_judgments, derive_weights, fuzzify_weights, PairwiseMatrix, WeightVector,
};

/// Double-precision triangular fuzzy number.
pub type Tfn64 = fuzzy::Tfn<f64>;
/// Double-precision linguistic vocabulary.
pub type Vocabulary64 = fuzzy::Vocabulary<f64>;
/// Double-precision pairwise comparison matrix.
pub type PairwiseMatrix64 = weighting::PairwiseMatrix<f64>;
/// Double-precision weight vector.
pub type WeightVector64 = weighting::WeightVector<f64>;
/// Double-precision decision table.
pub type ScoreTable64 = topsis::ScoreTable<f64>;
/// Double-precision TOPSIS outcome.
pub type TopsisResult64 = topsis::TopsisResult<f64>;
/// Double-precision label/score mapping.
pub type LabelMapping64 = profile::LabelMapping<f64>;
/// Double-precision score-to-term binding.
pub type ScoreBinding64 = profile::ScoreBinding<f64>;
/// Double-precision evaluation report.
pub type EvaluationReport64 = metrics::EvaluationReport<f64>;
