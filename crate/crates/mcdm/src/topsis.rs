//! Crisp and fuzzy TOPSIS: normalization, weighting, ideal solutions,
//! separation distances, closeness coefficients and ranks.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::Tfn;
use crate::num::Real;
use crate::weighting::WeightVector;

/// Whether a table holds crisp numbers or triangular fuzzy numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Crisp,
    Fuzzy,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Crisp => "crisp",
            Mode::Fuzzy => "fuzzy",
        })
    }
}

/// Column normalization scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Divide each cell by the Euclidean norm of its column (crisp only).
    Vector,
    /// Divide each cell by the column maximum (the maximum upper bound for
    /// fuzzy columns).
    LinearMax,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Vector => "vector",
            Normalization::LinearMax => "linear_max",
        })
    }
}

/// Direction of preference for one criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    /// Larger values are better.
    Benefit,
    /// Smaller values are better.
    Cost,
}

/// The distance a run used for the separation measures, declared in result
/// metadata so downstream readers know which formula produced them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    /// Absolute difference per criterion (crisp runs).
    Euclidean,
    /// Vertex distance on TFNs (fuzzy runs).
    Vertex,
}

/// One cell of a score table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellValue<T> {
    Crisp(T),
    Fuzzy(Tfn<T>),
}

#[derive(Debug, Clone, PartialEq)]
enum Cells<T> {
    Crisp(Vec<Vec<T>>),
    Fuzzy(Vec<Vec<Tfn<T>>>),
}

/// A candidates-by-criteria decision matrix, homogeneous in cell kind.
///
/// Construction admits a single candidate so that column operations stay
/// testable, but [`run_topsis`] requires at least two candidates: with one
/// candidate the ideal best and worst coincide and closeness is 0/0.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable<T> {
    candidates: Vec<String>,
    criteria: Vec<String>,
    kinds: Vec<CriterionKind>,
    cells: Cells<T>,
}

impl<T: Real> ScoreTable<T> {
    /// Builds a crisp table; every criterion defaults to benefit.
    pub fn crisp(
        candidates: Vec<String>,
        criteria: Vec<String>,
        rows: Vec<Vec<T>>,
    ) -> Result<Self> {
        let table = Self::validated(candidates, criteria, Cells::Crisp(rows))?;
        if let Cells::Crisp(rows) = &table.cells {
            for (i, row) in rows.iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    if !x.is_finite() {
                        return Err(Error::InvalidTable(format!(
                            "cell [{i}][{j}] is not finite"
                        )));
                    }
                }
            }
        }
        Ok(table)
    }

    /// Builds a fuzzy table; every criterion defaults to benefit.
    pub fn fuzzy(
        candidates: Vec<String>,
        criteria: Vec<String>,
        rows: Vec<Vec<Tfn<T>>>,
    ) -> Result<Self> {
        Self::validated(candidates, criteria, Cells::Fuzzy(rows))
    }

    fn validated(
        candidates: Vec<String>,
        criteria: Vec<String>,
        cells: Cells<T>,
    ) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidTable("no candidates".into()));
        }
        if criteria.is_empty() {
            return Err(Error::InvalidTable("no criteria".into()));
        }
        for (i, id) in candidates.iter().enumerate() {
            if id.trim().is_empty() {
                return Err(Error::InvalidTable(format!(
                    "candidate id at position {i} is blank"
                )));
            }
            if candidates[..i].contains(id) {
                return Err(Error::InvalidTable(format!("duplicate candidate id {id:?}")));
            }
        }
        for (j, name) in criteria.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(Error::InvalidTable(format!(
                    "criterion at position {j} is blank"
                )));
            }
            for earlier in &criteria[..j] {
                if earlier.trim().to_lowercase() == name.trim().to_lowercase() {
                    return Err(Error::InvalidTable(format!(
                        "duplicate criterion {name:?}"
                    )));
                }
            }
        }
        let row_count = match &cells {
            Cells::Crisp(rows) => rows.len(),
            Cells::Fuzzy(rows) => rows.len(),
        };
        if row_count != candidates.len() {
            return Err(Error::InvalidTable(format!(
                "{} candidates but {row_count} rows",
                candidates.len()
            )));
        }
        let width_of = |i: usize| match &cells {
            Cells::Crisp(rows) => rows[i].len(),
            Cells::Fuzzy(rows) => rows[i].len(),
        };
        for i in 0..row_count {
            if width_of(i) != criteria.len() {
                return Err(Error::InvalidTable(format!(
                    "row {i} has {} cells, expected {}",
                    width_of(i),
                    criteria.len()
                )));
            }
        }
        let kinds = vec![CriterionKind::Benefit; criteria.len()];
        Ok(Self {
            candidates,
            criteria,
            kinds,
            cells,
        })
    }

    /// Replaces the per-criterion benefit/cost flags.
    pub fn with_kinds(mut self, kinds: Vec<CriterionKind>) -> Result<Self> {
        if kinds.len() != self.criteria.len() {
            return Err(Error::InvalidTable(format!(
                "{} criteria but {} kinds",
                self.criteria.len(),
                kinds.len()
            )));
        }
        self.kinds = kinds;
        Ok(self)
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn criteria(&self) -> &[String] {
        &self.criteria
    }

    pub fn kinds(&self) -> &[CriterionKind] {
        &self.kinds
    }

    pub fn mode(&self) -> Mode {
        match self.cells {
            Cells::Crisp(_) => Mode::Crisp,
            Cells::Fuzzy(_) => Mode::Fuzzy,
        }
    }

    pub fn cell(&self, candidate: usize, criterion: usize) -> CellValue<T> {
        match &self.cells {
            Cells::Crisp(rows) => CellValue::Crisp(rows[candidate][criterion]),
            Cells::Fuzzy(rows) => CellValue::Fuzzy(rows[candidate][criterion]),
        }
    }

    /// The crisp rows, if this is a crisp table.
    pub fn crisp_rows(&self) -> Option<&[Vec<T>]> {
        match &self.cells {
            Cells::Crisp(rows) => Some(rows),
            Cells::Fuzzy(_) => None,
        }
    }

    /// The fuzzy rows, if this is a fuzzy table.
    pub fn fuzzy_rows(&self) -> Option<&[Vec<Tfn<T>>]> {
        match &self.cells {
            Cells::Fuzzy(rows) => Some(rows),
            Cells::Crisp(_) => None,
        }
    }

    /// Converts a crisp table into the fuzzy table of degenerate TFNs
    /// `(x, x, x)`, preserving criterion kinds.
    pub fn to_fuzzy(&self) -> Result<Self> {
        let rows = match &self.cells {
            Cells::Crisp(rows) => rows,
            Cells::Fuzzy(_) => {
                return Err(Error::Unsupported("table is already fuzzy".into()))
            }
        };
        let fuzzy_rows = rows
            .iter()
            .map(|row| row.iter().map(|&x| Tfn::crisp(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            candidates: self.candidates.clone(),
            criteria: self.criteria.clone(),
            kinds: self.kinds.clone(),
            cells: Cells::Fuzzy(fuzzy_rows),
        })
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum RawCell<'a, T> {
    Crisp(T),
    Fuzzy(&'a Tfn<T>),
}

impl<T: Real + Serialize> Serialize for ScoreTable<T> {
    fn serialize<S>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error>
    where
        S: serde::Serializer,
    {
        #[derive(Serialize)]
        struct Raw<'a, T: Serialize> {
            candidates: &'a [String],
            criteria: &'a [String],
            criterion_kinds: &'a [CriterionKind],
            mode: Mode,
            cells: Vec<Vec<RawCell<'a, T>>>,
        }
        let cells = (0..self.candidates.len())
            .map(|i| {
                (0..self.criteria.len())
                    .map(|j| match &self.cells {
                        Cells::Crisp(rows) => RawCell::Crisp(rows[i][j]),
                        Cells::Fuzzy(rows) => RawCell::Fuzzy(&rows[i][j]),
                    })
                    .collect()
            })
            .collect();
        Raw {
            candidates: &self.candidates,
            criteria: &self.criteria,
            criterion_kinds: &self.kinds,
            mode: self.mode(),
            cells,
        }
        .serialize(serializer)
    }
}

/// Per-candidate outcome of a TOPSIS run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateOutcome<T> {
    pub id: String,
    pub d_plus: T,
    pub d_minus: T,
    pub closeness: T,
    pub rank: usize,
}

/// How a run was configured, carried alongside its outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TopsisMetadata<T> {
    pub mode: Mode,
    pub normalization: Normalization,
    pub distance: DistanceKind,
    pub weights: WeightVector<T>,
    /// Groups of candidate ids whose closeness tied exactly; order within
    /// a group is the lexical order used to break the tie.
    pub tie_breaks: Vec<Vec<String>>,
}

/// Outcomes in rank order plus run metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TopsisResult<T> {
    pub results: Vec<CandidateOutcome<T>>,
    pub metadata: TopsisMetadata<T>,
}

impl<T: Real> TopsisResult<T> {
    pub fn outcome_for(&self, id: &str) -> Option<&CandidateOutcome<T>> {
        self.results.iter().find(|o| o.id == id)
    }

    /// Candidate ids in rank order.
    pub fn ranked_ids(&self) -> Vec<String> {
        self.results.iter().map(|o| o.id.clone()).collect()
    }
}

/// Normalizes a table column-by-column.
///
/// The vector scheme divides each crisp column by its Euclidean norm; it is
/// undefined for fuzzy tables. The linear-max scheme divides by the column
/// maximum (fuzzy columns by the maximum upper bound), so outputs lie in
/// [0, 1] for non-negative inputs.
pub fn normalize<T: Real>(table: &ScoreTable<T>, scheme: Normalization) -> Result<ScoreTable<T>> {
    let cells = match (&table.cells, scheme) {
        (Cells::Crisp(rows), Normalization::Vector) => {
            let mut out = rows.clone();
            for j in 0..table.criteria.len() {
                let norm = rows
                    .iter()
                    .fold(T::zero(), |acc, row| acc + row[j] * row[j])
                    .sqrt();
                if norm == T::zero() {
                    return Err(Error::InvalidTable(format!(
                        "column {:?} is all zeros under vector normalization",
                        table.criteria[j]
                    )));
                }
                for row in out.iter_mut() {
                    row[j] = row[j] / norm;
                }
            }
            Cells::Crisp(out)
        }
        (Cells::Crisp(rows), Normalization::LinearMax) => {
            let mut out = rows.clone();
            for j in 0..table.criteria.len() {
                let max = rows
                    .iter()
                    .map(|row| row[j])
                    .fold(T::neg_infinity(), T::max);
                if max == T::zero() && rows.iter().all(|row| row[j] == T::zero()) {
                    return Err(Error::InvalidTable(format!(
                        "column {:?} is all zeros under linear_max normalization",
                        table.criteria[j]
                    )));
                }
                if max <= T::zero() {
                    return Err(Error::InvalidTable(format!(
                        "column {:?} has a non-positive maximum {max} under linear_max normalization",
                        table.criteria[j]
                    )));
                }
                for row in out.iter_mut() {
                    row[j] = row[j] / max;
                }
            }
            Cells::Crisp(out)
        }
        (Cells::Fuzzy(rows), Normalization::LinearMax) => {
            let mut out = rows.clone();
            for j in 0..table.criteria.len() {
                let max_u = rows
                    .iter()
                    .map(|row| row[j].u())
                    .fold(T::neg_infinity(), T::max);
                if max_u <= T::zero() {
                    return Err(Error::InvalidTable(format!(
                        "column {:?} is all zeros under linear_max normalization",
                        table.criteria[j]
                    )));
                }
                for row in out.iter_mut() {
                    row[j] = row[j].div_crisp(max_u)?;
                }
            }
            Cells::Fuzzy(out)
        }
        (Cells::Fuzzy(_), Normalization::Vector) => {
            return Err(Error::Unsupported(
                "vector normalization is not defined for fuzzy tables; use linear_max".into(),
            ))
        }
    };
    Ok(ScoreTable {
        candidates: table.candidates.clone(),
        criteria: table.criteria.clone(),
        kinds: table.kinds.clone(),
        cells,
    })
}

/// Multiplies each column by its criterion weight, reconciling weight order
/// with table order by criterion name. Fuzzy tables require fuzzified
/// weights and use the component-wise product.
pub fn apply_weights<T: Real>(
    table: &ScoreTable<T>,
    weights: &WeightVector<T>,
) -> Result<ScoreTable<T>> {
    let positions = table
        .criteria
        .iter()
        .map(|name| {
            weights.position(name).ok_or_else(|| {
                Error::CriteriaMismatch(format!("no weight for criterion {name:?}"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if weights.len() != table.criteria.len() {
        let unused = weights
            .criteria()
            .iter()
            .enumerate()
            .find(|(p, _)| !positions.contains(p))
            .map(|(_, name)| name.clone())
            .unwrap_or_default();
        return Err(Error::CriteriaMismatch(format!(
            "weight criterion {unused:?} is not in the table"
        )));
    }
    let cells = match &table.cells {
        Cells::Crisp(rows) => {
            let w = weights.weights();
            Cells::Crisp(
                rows.iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .map(|(j, &x)| x * w[positions[j]])
                            .collect()
                    })
                    .collect(),
            )
        }
        Cells::Fuzzy(rows) => {
            let fw = weights.fuzzy_weights().ok_or_else(|| {
                Error::Unsupported(
                    "a fuzzy table needs fuzzified weights; call fuzzify_weights first".into(),
                )
            })?;
            let mut out = Vec::with_capacity(rows.len());
            for row in rows {
                let mut new_row = Vec::with_capacity(row.len());
                for (j, cell) in row.iter().enumerate() {
                    new_row.push(cell.scale_components(&fw[positions[j]])?);
                }
                out.push(new_row);
            }
            Cells::Fuzzy(out)
        }
    };
    Ok(ScoreTable {
        candidates: table.candidates.clone(),
        criteria: table.criteria.clone(),
        kinds: table.kinds.clone(),
        cells,
    })
}

/// Total order on TFNs: centroid first, then upper bound, then modal value.
fn fuzzy_order<T: Real>(a: &Tfn<T>, b: &Tfn<T>) -> Ordering {
    (a.centroid(), a.u(), a.m())
        .partial_cmp(&(b.centroid(), b.u(), b.m()))
        .expect("TFN components are finite")
}

/// Per-criterion ideal-best and ideal-worst cells of a weighted table.
///
/// Benefit criteria take the column maximum as best and minimum as worst;
/// cost criteria reverse this. Fuzzy cells are compared by centroid with
/// ties broken by larger upper bound, then larger modal value.
pub fn ideal_solutions<T: Real>(
    weighted: &ScoreTable<T>,
) -> (Vec<CellValue<T>>, Vec<CellValue<T>>) {
    let mut best = Vec::with_capacity(weighted.criteria.len());
    let mut worst = Vec::with_capacity(weighted.criteria.len());
    for (j, kind) in weighted.kinds.iter().enumerate() {
        match &weighted.cells {
            Cells::Crisp(rows) => {
                let max = rows.iter().map(|r| r[j]).fold(T::neg_infinity(), T::max);
                let min = rows.iter().map(|r| r[j]).fold(T::infinity(), T::min);
                let (hi, lo) = (CellValue::Crisp(max), CellValue::Crisp(min));
                match kind {
                    CriterionKind::Benefit => {
                        best.push(hi);
                        worst.push(lo);
                    }
                    CriterionKind::Cost => {
                        best.push(lo);
                        worst.push(hi);
                    }
                }
            }
            Cells::Fuzzy(rows) => {
                let max = rows
                    .iter()
                    .map(|r| r[j])
                    .max_by(|a, b| fuzzy_order(a, b))
                    .expect("table has at least one candidate");
                let min = rows
                    .iter()
                    .map(|r| r[j])
                    .min_by(|a, b| fuzzy_order(a, b))
                    .expect("table has at least one candidate");
                let (hi, lo) = (CellValue::Fuzzy(max), CellValue::Fuzzy(min));
                match kind {
                    CriterionKind::Benefit => {
                        best.push(hi);
                        worst.push(lo);
                    }
                    CriterionKind::Cost => {
                        best.push(lo);
                        worst.push(hi);
                    }
                }
            }
        }
    }
    (best, worst)
}

/// Runs the full pipeline: normalize, weight, locate ideals, measure the
/// separations `S+` and `S-`, and rank by descending closeness
/// `S- / (S+ + S-)`. Closeness ties are broken by candidate-id lexical
/// order and recorded in the result metadata.
pub fn run_topsis<T: Real>(
    table: &ScoreTable<T>,
    weights: &WeightVector<T>,
    scheme: Normalization,
) -> Result<TopsisResult<T>> {
    let n = table.candidates.len();
    if n < 2 {
        return Err(Error::InvalidTable(format!(
            "ranking needs at least 2 candidates, got {n}"
        )));
    }
    let normalized = normalize(table, scheme)?;
    let weighted = apply_weights(&normalized, weights)?;
    let (best, worst) = ideal_solutions(&weighted);

    let mut d_plus = vec![T::zero(); n];
    let mut d_minus = vec![T::zero(); n];
    match &weighted.cells {
        Cells::Crisp(rows) => {
            for (i, row) in rows.iter().enumerate() {
                let mut sum_plus = T::zero();
                let mut sum_minus = T::zero();
                for (j, &x) in row.iter().enumerate() {
                    let (CellValue::Crisp(hi), CellValue::Crisp(lo)) = (&best[j], &worst[j])
                    else {
                        unreachable!("crisp table yields crisp ideals");
                    };
                    let dp = x - *hi;
                    let dm = x - *lo;
                    sum_plus = sum_plus + dp * dp;
                    sum_minus = sum_minus + dm * dm;
                }
                d_plus[i] = sum_plus.sqrt();
                d_minus[i] = sum_minus.sqrt();
            }
        }
        Cells::Fuzzy(rows) => {
            for (i, row) in rows.iter().enumerate() {
                let mut sum_plus = T::zero();
                let mut sum_minus = T::zero();
                for (j, cell) in row.iter().enumerate() {
                    let (CellValue::Fuzzy(hi), CellValue::Fuzzy(lo)) = (&best[j], &worst[j])
                    else {
                        unreachable!("fuzzy table yields fuzzy ideals");
                    };
                    let dp = cell.distance(hi);
                    let dm = cell.distance(lo);
                    sum_plus = sum_plus + dp * dp;
                    sum_minus = sum_minus + dm * dm;
                }
                d_plus[i] = sum_plus.sqrt();
                d_minus[i] = sum_minus.sqrt();
            }
        }
    }

    if (0..n).any(|i| d_plus[i] + d_minus[i] == T::zero()) {
        // S+ + S- = 0 forces the ideal best and worst to coincide in every
        // column, which means every candidate is identical.
        return Err(Error::DegenerateDecision);
    }
    let closeness: Vec<T> = (0..n).map(|i| d_minus[i] / (d_plus[i] + d_minus[i])).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        closeness[b]
            .partial_cmp(&closeness[a])
            .expect("closeness is finite")
            .then_with(|| table.candidates[a].cmp(&table.candidates[b]))
    });

    let mut tie_breaks = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && closeness[order[end]] == closeness[order[start]] {
            end += 1;
        }
        if end - start > 1 {
            tie_breaks.push(
                order[start..end]
                    .iter()
                    .map(|&i| table.candidates[i].clone())
                    .collect(),
            );
        }
        start = end;
    }

    let results = order
        .iter()
        .enumerate()
        .map(|(pos, &i)| CandidateOutcome {
            id: table.candidates[i].clone(),
            d_plus: d_plus[i],
            d_minus: d_minus[i],
            closeness: closeness[i],
            rank: pos + 1,
        })
        .collect();

    // Report the weights in table-criterion order so metadata reflects the
    // run exactly, whatever order the caller supplied them in.
    let aligned = weights.reordered(&table.criteria)?;

    Ok(TopsisResult {
        results,
        metadata: TopsisMetadata {
            mode: table.mode(),
            normalization: scheme,
            distance: match table.mode() {
                Mode::Crisp => DistanceKind::Euclidean,
                Mode::Fuzzy => DistanceKind::Vertex,
            },
            weights: aligned,
            tie_breaks,
        },
    })
}
