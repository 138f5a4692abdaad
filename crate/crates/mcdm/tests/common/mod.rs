//! Brute-force reference implementation used to cross-check the engine.
//!
//! Written as plain f64 loops straight from the textbook formulas, with no
//! calls into the library's computation path, so agreement between the two
//! is meaningful evidence rather than a tautology.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleScheme {
    Vector,
    LinearMax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    pub id: String,
    pub d_plus: f64,
    pub d_minus: f64,
    pub closeness: f64,
    pub rank: usize,
}

/// Crisp TOPSIS over `rows` (candidates by criteria) in input order.
/// `benefit[j]` is false for cost criteria. Returns one outcome per
/// candidate, in input order, with ranks assigned by descending closeness
/// and ties broken by id. Returns `None` when some candidate coincides
/// with both ideals (a degenerate problem).
pub fn oracle_topsis(
    ids: &[String],
    rows: &[Vec<f64>],
    weights: &[f64],
    benefit: &[bool],
    scheme: OracleScheme,
) -> Option<Vec<OracleOutcome>> {
    let n = rows.len();
    let m = weights.len();

    let mut v = vec![vec![0.0f64; m]; n];
    for j in 0..m {
        let denom = match scheme {
            OracleScheme::Vector => {
                let mut sum = 0.0;
                for row in rows {
                    sum += row[j] * row[j];
                }
                sum.sqrt()
            }
            OracleScheme::LinearMax => {
                let mut max = f64::NEG_INFINITY;
                for row in rows {
                    max = max.max(row[j]);
                }
                max
            }
        };
        for i in 0..n {
            v[i][j] = rows[i][j] / denom * weights[j];
        }
    }

    let mut best = vec![0.0f64; m];
    let mut worst = vec![0.0f64; m];
    for j in 0..m {
        let mut max = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        for row in &v {
            max = max.max(row[j]);
            min = min.min(row[j]);
        }
        if benefit[j] {
            best[j] = max;
            worst[j] = min;
        } else {
            best[j] = min;
            worst[j] = max;
        }
    }

    let mut d_plus = vec![0.0f64; n];
    let mut d_minus = vec![0.0f64; n];
    for i in 0..n {
        let mut sp = 0.0;
        let mut sm = 0.0;
        for j in 0..m {
            sp += (v[i][j] - best[j]) * (v[i][j] - best[j]);
            sm += (v[i][j] - worst[j]) * (v[i][j] - worst[j]);
        }
        d_plus[i] = sp.sqrt();
        d_minus[i] = sm.sqrt();
    }

    if (0..n).any(|i| d_plus[i] + d_minus[i] == 0.0) {
        return None;
    }
    let closeness: Vec<f64> = (0..n).map(|i| d_minus[i] / (d_plus[i] + d_minus[i])).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        closeness[b]
            .partial_cmp(&closeness[a])
            .unwrap()
            .then_with(|| ids[a].cmp(&ids[b]))
    });
    let mut rank = vec![0usize; n];
    for (pos, &i) in order.iter().enumerate() {
        rank[i] = pos + 1;
    }

    Some(
        (0..n)
            .map(|i| OracleOutcome {
                id: ids[i].clone(),
                d_plus: d_plus[i],
                d_minus: d_minus[i],
                closeness: closeness[i],
                rank: rank[i],
            })
            .collect(),
    )
}
