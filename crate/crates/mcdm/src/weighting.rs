//! Criterion weights from expert pairwise comparisons: group aggregation by
//! geometric mean, principal-eigenvector derivation via power iteration,
//! Saaty consistency ratio, and weight fuzzification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::Tfn;
use crate::num::{as_f64, cast, Real};

const RECIPROCITY_TOL: f64 = 1e-9;
const WEIGHT_SUM_TOL: f64 = 1e-9;
const POWER_ITERATION_CAP: usize = 10_000;
const POWER_ITERATION_TARGET: f64 = 1e-12;

/// Saaty random indices for matrix sizes 2 through 10.
fn random_index(n: usize) -> Option<f64> {
    match n {
        2 => Some(0.0),
        3 => Some(0.58),
        4 => Some(0.90),
        5 => Some(1.12),
        6 => Some(1.24),
        7 => Some(1.32),
        8 => Some(1.41),
        9 => Some(1.45),
        10 => Some(1.49),
        _ => None,
    }
}

/// A reciprocal pairwise comparison matrix over named criteria.
///
/// Entries are positive importance ratios; the diagonal is exactly 1 and
/// `entries[i][j] * entries[j][i] = 1` within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseMatrix<T> {
    criteria: Vec<String>,
    entries: Vec<Vec<T>>,
}

#[derive(Serialize, Deserialize)]
struct RawPairwise<T> {
    criteria: Vec<String>,
    entries: Vec<Vec<T>>,
}

impl<T: Real> PairwiseMatrix<T> {
    pub fn new(criteria: Vec<String>, entries: Vec<Vec<T>>) -> Result<Self> {
        let n = criteria.len();
        if n < 2 {
            return Err(Error::InvalidMatrix(format!(
                "need at least 2 criteria, got {n}"
            )));
        }
        for (i, name) in criteria.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(Error::InvalidMatrix(format!(
                    "criterion at position {i} is blank"
                )));
            }
            for earlier in &criteria[..i] {
                if earlier.trim().to_lowercase() == name.trim().to_lowercase() {
                    return Err(Error::InvalidMatrix(format!(
                        "duplicate criterion {name:?}"
                    )));
                }
            }
        }
        if entries.len() != n {
            return Err(Error::InvalidMatrix(format!(
                "{n} criteria but {} rows",
                entries.len()
            )));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &e) in row.iter().enumerate() {
                if !e.is_finite() || e <= T::zero() {
                    return Err(Error::InvalidMatrix(format!(
                        "entry [{i}][{j}] must be a positive finite ratio, got {e}"
                    )));
                }
            }
            if entries[i][i] != T::one() {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry [{i}][{i}] must be exactly 1, got {}",
                    entries[i][i]
                )));
            }
        }
        let tol = cast::<T>(RECIPROCITY_TOL);
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in (i + 1)..n {
                let product = entries[i][j] * entries[j][i];
                if (product - T::one()).abs() > tol {
                    return Err(Error::InvalidMatrix(format!(
                        "entries [{i}][{j}] and [{j}][{i}] are not reciprocal: product {product}"
                    )));
                }
            }
        }
        Ok(Self { criteria, entries })
    }

    /// The consistent matrix `a_ij = w_i / w_j` generated by positive
    /// weights, useful for tests and for round-tripping derived weights.
    pub fn from_weights(criteria: Vec<String>, weights: &[T]) -> Result<Self> {
        if criteria.len() != weights.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} criteria but {} weights",
                criteria.len(),
                weights.len()
            )));
        }
        for &w in weights {
            if !w.is_finite() || w <= T::zero() {
                return Err(Error::InvalidMatrix(format!(
                    "weights must be positive and finite, got {w}"
                )));
            }
        }
        let n = weights.len();
        let mut entries = vec![vec![T::one(); n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    entries[i][j] = weights[i] / weights[j];
                }
            }
        }
        Self::new(criteria, entries)
    }

    pub fn criteria(&self) -> &[String] {
        &self.criteria
    }

    pub fn len(&self) -> usize {
        self.criteria.len()
    }

    pub fn is_empty(&self) -> bool {
        self.criteria.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        self.entries[i][j]
    }

    /// Parses `{"criteria": [names], "entries": [[row], ...]}`.
    pub fn from_json(json: &str) -> Result<Self> {
        let raw: RawPairwise<T> = serde_json::from_str(json)?;
        Self::new(raw.criteria, raw.entries)
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = RawPairwise {
            criteria: self.criteria.clone(),
            entries: self.entries.clone(),
        };
        Ok(serde_json::to_string_pretty(&raw)?)
    }
}

/// Crisp criterion weights, optionally fuzzified, with the consistency
/// ratio of the matrix they came from (0 for directly supplied weights).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector<T> {
    criteria: Vec<String>,
    weights: Vec<T>,
    consistency_ratio: T,
    fuzzy_weights: Option<Vec<Tfn<T>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights<T> {
    criteria: Vec<String>,
    weights: Vec<T>,
    consistency_ratio: Option<T>,
    fuzzy_weights: Option<Vec<RawWeightTfn<T>>>,
}

#[derive(Deserialize)]
struct RawWeightTfn<T> {
    l: T,
    m: T,
    u: T,
}

impl<T: Real> WeightVector<T> {
    /// Builds a crisp weight vector; weights must be positive and sum to 1
    /// within 1e-9.
    pub fn new(criteria: Vec<String>, weights: Vec<T>) -> Result<Self> {
        if criteria.is_empty() {
            return Err(Error::InvalidWeights("no criteria".into()));
        }
        if criteria.len() != weights.len() {
            return Err(Error::InvalidWeights(format!(
                "{} criteria but {} weights",
                criteria.len(),
                weights.len()
            )));
        }
        for (i, (name, &w)) in criteria.iter().zip(&weights).enumerate() {
            if name.trim().is_empty() {
                return Err(Error::InvalidWeights(format!(
                    "criterion at position {i} is blank"
                )));
            }
            for earlier in &criteria[..i] {
                if earlier.trim().to_lowercase() == name.trim().to_lowercase() {
                    return Err(Error::InvalidWeights(format!(
                        "duplicate criterion {name:?}"
                    )));
                }
            }
            if !w.is_finite() || w <= T::zero() {
                return Err(Error::InvalidWeights(format!(
                    "weight for {name:?} must be positive and finite, got {w}"
                )));
            }
        }
        let sum = weights.iter().fold(T::zero(), |acc, &w| acc + w);
        if (sum - T::one()).abs() > cast(WEIGHT_SUM_TOL) {
            return Err(Error::InvalidWeights(format!(
                "weights must sum to 1 within {WEIGHT_SUM_TOL:e}, got {sum}"
            )));
        }
        Ok(Self {
            criteria,
            weights,
            consistency_ratio: T::zero(),
            fuzzy_weights: None,
        })
    }

    pub fn criteria(&self) -> &[String] {
        &self.criteria
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn consistency_ratio(&self) -> T {
        self.consistency_ratio
    }

    pub fn fuzzy_weights(&self) -> Option<&[Tfn<T>]> {
        self.fuzzy_weights.as_deref()
    }

    pub fn len(&self) -> usize {
        self.criteria.len()
    }

    pub fn is_empty(&self) -> bool {
        self.criteria.is_empty()
    }

    /// Index of a criterion, matched case-insensitively after trimming.
    pub fn position(&self, criterion: &str) -> Option<usize> {
        let wanted = criterion.trim().to_lowercase();
        self.criteria
            .iter()
            .position(|c| c.trim().to_lowercase() == wanted)
    }

    /// Returns a copy whose criteria follow `order` (matched
    /// case-insensitively and taking the spelling from `order`). The two
    /// criterion sets must coincide.
    pub fn reordered(&self, order: &[String]) -> Result<Self> {
        if order.len() != self.criteria.len() {
            return Err(Error::CriteriaMismatch(format!(
                "expected {} criteria, got {}",
                self.criteria.len(),
                order.len()
            )));
        }
        let positions = order
            .iter()
            .map(|name| {
                self.position(name).ok_or_else(|| {
                    Error::CriteriaMismatch(format!("no weight for criterion {name:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            criteria: order.to_vec(),
            weights: positions.iter().map(|&p| self.weights[p]).collect(),
            consistency_ratio: self.consistency_ratio,
            fuzzy_weights: self
                .fuzzy_weights
                .as_ref()
                .map(|fw| positions.iter().map(|&p| fw[p]).collect()),
        })
    }

    /// Parses `{"criteria": [names], "weights": [numbers]}`; the optional
    /// `consistency_ratio` and `fuzzy_weights` fields emitted by this crate
    /// are accepted back.
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn from_raw(raw: RawWeights<T>) -> Result<Self> {
        let mut out = Self::new(raw.criteria, raw.weights)?;
        if let Some(cr) = raw.consistency_ratio {
            if !cr.is_finite() || cr < T::zero() {
                return Err(Error::InvalidWeights(format!(
                    "consistency_ratio must be non-negative and finite, got {cr}"
                )));
            }
            out.consistency_ratio = cr;
        }
        if let Some(raw_fuzzy) = raw.fuzzy_weights {
            if raw_fuzzy.len() != out.weights.len() {
                return Err(Error::InvalidWeights(format!(
                    "{} weights but {} fuzzy weights",
                    out.weights.len(),
                    raw_fuzzy.len()
                )));
            }
            let mut fuzzy = Vec::with_capacity(raw_fuzzy.len());
            for (raw_tfn, (&w, name)) in raw_fuzzy
                .into_iter()
                .zip(out.weights.iter().zip(&out.criteria))
            {
                let tfn = Tfn::new(raw_tfn.l, raw_tfn.m, raw_tfn.u)?;
                if tfn.m() != w {
                    return Err(Error::InvalidWeights(format!(
                        "fuzzy weight for {name:?} has modal value {} but the crisp weight is {w}",
                        tfn.m()
                    )));
                }
                fuzzy.push(tfn);
            }
            out.fuzzy_weights = Some(fuzzy);
        }
        Ok(out)
    }
}

impl<'de, T: Real> Deserialize<'de> for WeightVector<T> {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let raw = RawWeights::<T>::deserialize(deserializer)?;
        WeightVector::from_raw(raw).map_err(serde::de::Error::custom)
    }
}

/// Element-wise geometric mean of judgment matrices sharing a criterion
/// list. Reciprocity is preserved exactly: upper-triangle means are
/// computed and the lower triangle is filled with their reciprocals.
pub fn aggregate_judgments<T: Real>(matrices: &[PairwiseMatrix<T>]) -> Result<PairwiseMatrix<T>> {
    let first = matrices
        .first()
        .ok_or(Error::EmptyInput("no judgment matrices to aggregate"))?;
    for (k, other) in matrices.iter().enumerate().skip(1) {
        if other.criteria.len() != first.criteria.len() {
            return Err(Error::CriteriaMismatch(format!(
                "matrix 0 has {} criteria but matrix {k} has {}",
                first.criteria.len(),
                other.criteria.len()
            )));
        }
        for (i, (a, b)) in first.criteria.iter().zip(&other.criteria).enumerate() {
            if a.trim().to_lowercase() != b.trim().to_lowercase() {
                return Err(Error::CriteriaMismatch(format!(
                    "matrix {k} lists {b:?} at position {i} where matrix 0 lists {a:?}"
                )));
            }
        }
    }
    if matrices.len() == 1 {
        return Ok(first.clone());
    }
    let n = first.criteria.len();
    let count = cast::<T>(matrices.len() as f64);
    let mut entries = vec![vec![T::one(); n]; n];
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in (i + 1)..n {
            let log_sum = matrices
                .iter()
                .fold(T::zero(), |acc, m| acc + m.entries[i][j].ln());
            let mean = (log_sum / count).exp();
            entries[i][j] = mean;
            entries[j][i] = T::one() / mean;
        }
    }
    PairwiseMatrix::new(first.criteria.clone(), entries)
}

/// Derives the principal right eigenvector of a reciprocal matrix by power
/// iteration (uniform start, relative residual below 1e-12 or 10,000
/// iterations), normalized to sum 1, plus Saaty's consistency ratio
/// `CR = ((lambda_max - n) / (n - 1)) / RI(n)`.
pub fn derive_weights<T: Real>(matrix: &PairwiseMatrix<T>) -> Result<WeightVector<T>> {
    let n = matrix.len();
    let ri = random_index(n).ok_or_else(|| {
        Error::InvalidMatrix(format!(
            "no random consistency index for {n} criteria; supported sizes are 2 through 10"
        ))
    })?;
    // The tolerance floor keeps the same target for f64 while remaining
    // reachable for narrower scalars.
    let tol = cast::<T>(POWER_ITERATION_TARGET).max(T::epsilon() * cast(64.0));
    let mut v = vec![T::one() / cast::<T>(n as f64); n];
    let mut lambda = cast::<T>(n as f64);
    let mut converged = false;
    let mut residual = T::infinity();
    for _ in 0..POWER_ITERATION_CAP {
        // v is L1-normalized, so sum(A v) is the Rayleigh estimate of
        // lambda_max for a positive matrix.
        let mut next = vec![T::zero(); n];
        for (slot, row) in next.iter_mut().zip(&matrix.entries) {
            *slot = row
                .iter()
                .zip(&v)
                .fold(T::zero(), |acc, (&a, &x)| acc + a * x);
        }
        lambda = next.iter().fold(T::zero(), |acc, &x| acc + x);
        residual = next
            .iter()
            .zip(&v)
            .map(|(&ax, &x)| (ax - lambda * x).abs())
            .fold(T::zero(), T::max)
            / lambda;
        for (slot, &x) in v.iter_mut().zip(&next) {
            *slot = x / lambda;
        }
        if residual < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: POWER_ITERATION_CAP,
            residual: as_f64(residual),
        });
    }
    let sum = v.iter().fold(T::zero(), |acc, &x| acc + x);
    for slot in v.iter_mut() {
        *slot = *slot / sum;
    }
    let mut out = WeightVector::new(matrix.criteria.clone(), v)?;
    let n_t = cast::<T>(n as f64);
    let consistency_index = (lambda - n_t) / (n_t - T::one());
    out.consistency_ratio = if ri == 0.0 {
        T::zero()
    } else {
        // lambda_max >= n holds mathematically; clamp the rounding noise.
        (consistency_index / cast(ri)).max(T::zero())
    };
    Ok(out)
}

/// Attaches fuzzy weights `(max(0, w(1-spread)), w, min(1, w(1+spread)))`
/// to a crisp weight vector; the crisp weights are unchanged.
pub fn fuzzify_weights<T: Real>(weights: &WeightVector<T>, spread: T) -> Result<WeightVector<T>> {
    if !spread.is_finite() || spread < T::zero() || spread >= T::one() {
        return Err(Error::InvalidWeights(format!(
            "spread must lie in [0, 1), got {spread}"
        )));
    }
    let fuzzy = weights
        .weights
        .iter()
        .map(|&w| {
            let l = (w * (T::one() - spread)).max(T::zero());
            let u = (w * (T::one() + spread)).min(T::one());
            Tfn::new(l, w, u)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = weights.clone();
    out.fuzzy_weights = Some(fuzzy);
    Ok(out)
}
