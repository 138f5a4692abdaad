//! Crate-wide error type.

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A triangular fuzzy number violated `l <= m <= u`, finiteness or
    /// non-negativity; the message names the offending component.
    #[error("invalid fuzzy number: {0}")]
    InvalidTfn(String),

    /// A linguistic vocabulary violated its structural rules.
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),

    /// A linguistic term is not in the vocabulary.
    #[error("unknown term {term:?}; valid terms are: {expected}")]
    UnknownTerm { term: String, expected: String },

    /// An operation that needs at least one element received none.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A pairwise comparison matrix violated its structural rules.
    #[error("invalid pairwise matrix: {0}")]
    InvalidMatrix(String),

    /// Criterion lists that must agree do not.
    #[error("criteria mismatch: {0}")]
    CriteriaMismatch(String),

    /// A weight vector violated positivity or the sum-to-one rule.
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    /// Power iteration did not reach the residual target.
    #[error("eigenvector iteration did not converge after {iterations} iterations (relative residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// A score table violated its structural rules.
    #[error("invalid score table: {0}")]
    InvalidTable(String),

    /// A request combined options that do not work together.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Every candidate has an identical weighted profile, so closeness is
    /// the undefined ratio 0/0 for all of them.
    #[error("degenerate decision problem: all candidates are identical in every weighted criterion")]
    DegenerateDecision,

    /// A score fell outside `[1, 5]` or could not be parsed.
    #[error("invalid score: {0}")]
    InvalidScore(String),

    /// A proficiency label outside the three-class set.
    #[error("unknown label {0:?}; expected one of Poor, Fair, Excellent")]
    UnknownLabel(String),

    /// One or more (candidate, criterion) cells have no score records.
    #[error("missing scores for: {0}")]
    MissingScores(String),

    /// A score-to-term binding has gaps, overlaps or bad bounds.
    #[error("invalid binding: {0}")]
    InvalidBinding(String),

    /// Metric inputs were structurally unusable (length mismatch, zero
    /// vector, no relevant item, candidate-set mismatch).
    #[error("invalid metric input: {0}")]
    InvalidMetricInput(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors arising from the numerics of a well-formed problem,
    /// as opposed to input validation. Callers that distinguish exit codes
    /// map these to the computation class.
    pub fn is_computation(&self) -> bool {
        matches!(
            self,
            Error::DegenerateDecision | Error::NonConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
