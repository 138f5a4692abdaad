//! Triangular fuzzy numbers, linguistic vocabularies, centroid
//! defuzzification and the vertex distance.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{cast, Real};

/// A triangular fuzzy number `(l, m, u)`: lower bound, modal value, upper
/// bound, unitless on `[0, inf)`.
///
/// A TFN with `l = m = u` is degenerate and behaves as the crisp number `m`
/// under every operation in this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tfn<T> {
    l: T,
    m: T,
    u: T,
}

impl<T: Real> Tfn<T> {
    /// Builds a TFN, rejecting non-finite or negative components and any
    /// ordering violation. The error names the offending component.
    pub fn new(l: T, m: T, u: T) -> Result<Self> {
        for (name, v) in [("l", l), ("m", m), ("u", u)] {
            if !v.is_finite() {
                return Err(Error::InvalidTfn(format!("{name} is not finite")));
            }
            if v < T::zero() {
                return Err(Error::InvalidTfn(format!("{name} is negative ({v})")));
            }
        }
        if l > m {
            return Err(Error::InvalidTfn(format!("l > m ({l} > {m})")));
        }
        if m > u {
            return Err(Error::InvalidTfn(format!("m > u ({m} > {u})")));
        }
        Ok(Self { l, m, u })
    }

    /// The degenerate TFN `(c, c, c)` representing the crisp number `c`.
    pub fn crisp(c: T) -> Result<Self> {
        Self::new(c, c, c)
    }

    pub fn l(&self) -> T {
        self.l
    }

    pub fn m(&self) -> T {
        self.m
    }

    pub fn u(&self) -> T {
        self.u
    }

    /// True when `l = m = u`.
    pub fn is_degenerate(&self) -> bool {
        self.l == self.u
    }

    /// Centroid defuzzification `C(a) = (l + m + u) / 3`.
    ///
    /// Degenerate TFNs return `m` directly so the crisp value survives
    /// without rounding through the sum.
    pub fn centroid(&self) -> T {
        if self.is_degenerate() {
            return self.m;
        }
        (self.l + self.m + self.u) / cast(3.0)
    }

    /// Vertex distance
    /// `d(a, b) = sqrt(((a.l-b.l)^2 + (a.m-b.m)^2 + (a.u-b.u)^2) / 3)`.
    ///
    /// This is a metric on TFNs and reduces to `|a - b|` on degenerate
    /// inputs; the degenerate case is computed as exactly that.
    pub fn distance(&self, other: &Self) -> T {
        if self.is_degenerate() && other.is_degenerate() {
            return (self.m - other.m).abs();
        }
        let dl = self.l - other.l;
        let dm = self.m - other.m;
        let du = self.u - other.u;
        ((dl * dl + dm * dm + du * du) / cast(3.0)).sqrt()
    }

    /// Component-wise arithmetic mean of a non-empty slice.
    pub fn aggregate(tfns: &[Tfn<T>]) -> Result<Self> {
        if tfns.is_empty() {
            return Err(Error::EmptyInput("no fuzzy numbers to aggregate"));
        }
        let k = cast::<T>(tfns.len() as f64);
        let mut l = T::zero();
        let mut m = T::zero();
        let mut u = T::zero();
        for t in tfns {
            l = l + t.l;
            m = m + t.m;
            u = u + t.u;
        }
        Self::new(l / k, m / k, u / k)
    }

    /// Component-wise product, defined because both operands are
    /// non-negative. Used to apply fuzzy weights.
    pub fn scale_components(&self, w: &Self) -> Result<Self> {
        Self::new(self.l * w.l, self.m * w.m, self.u * w.u)
    }

    /// Divides every component by a positive crisp divisor.
    pub fn div_crisp(&self, divisor: T) -> Result<Self> {
        if divisor <= T::zero() {
            return Err(Error::InvalidTfn(format!(
                "divisor must be positive, got {divisor}"
            )));
        }
        Self::new(self.l / divisor, self.m / divisor, self.u / divisor)
    }
}

impl<T: Real> fmt::Display for Tfn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.l, self.m, self.u)
    }
}

impl<'de, T: Real> Deserialize<'de> for Tfn<T> {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw<T> {
            l: T,
            m: T,
            u: T,
        }
        let raw = Raw::<T>::deserialize(deserializer)?;
        Tfn::new(raw.l, raw.m, raw.u).map_err(serde::de::Error::custom)
    }
}

/// Ordered list of (term, TFN) pairs used to turn linguistic judgments into
/// fuzzy numbers. Terms are unique case-insensitively and modal values are
/// strictly increasing, so the vocabulary is totally ordered by intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary<T> {
    entries: Vec<(String, Tfn<T>)>,
}

#[derive(Serialize, Deserialize)]
struct VocabularyEntry<T> {
    term: String,
    l: T,
    m: T,
    u: T,
}

impl<T: Real> Vocabulary<T> {
    pub fn new(entries: Vec<(String, Tfn<T>)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidVocabulary("no terms".into()));
        }
        for (i, (term, _)) in entries.iter().enumerate() {
            if term.trim().is_empty() {
                return Err(Error::InvalidVocabulary(format!(
                    "term at position {i} is blank"
                )));
            }
            for (earlier, _) in &entries[..i] {
                if earlier.trim().to_lowercase() == term.trim().to_lowercase() {
                    return Err(Error::InvalidVocabulary(format!(
                        "duplicate term {term:?}"
                    )));
                }
            }
        }
        for pair in entries.windows(2) {
            let (ref a_term, a) = pair[0];
            let (ref b_term, b) = pair[1];
            if b.m() <= a.m() {
                return Err(Error::InvalidVocabulary(format!(
                    "modal values must be strictly increasing: {a_term:?} ({}) is followed by {b_term:?} ({})",
                    a.m(),
                    b.m()
                )));
            }
        }
        Ok(Self { entries })
    }

    /// The compiled-in five-level vocabulary.
    pub fn five_level() -> Self {
        let levels: [(&str, f64, f64, f64); 5] = [
            ("Very Low", 0.0, 0.1, 0.3),
            ("Low", 0.1, 0.3, 0.5),
            ("Medium", 0.3, 0.5, 0.7),
            ("High", 0.5, 0.7, 0.9),
            ("Very High", 0.7, 0.9, 1.0),
        ];
        let entries = levels
            .iter()
            .map(|&(term, l, m, u)| {
                let tfn = Tfn::new(cast(l), cast(m), cast(u)).expect("valid builtin TFN");
                (term.to_string(), tfn)
            })
            .collect();
        Self::new(entries).expect("valid builtin vocabulary")
    }

    /// Looks a term up case-insensitively after trimming whitespace.
    pub fn lookup(&self, term: &str) -> Result<Tfn<T>> {
        let wanted = term.trim().to_lowercase();
        self.entries
            .iter()
            .find(|(t, _)| t.trim().to_lowercase() == wanted)
            .map(|(_, tfn)| *tfn)
            .ok_or_else(|| Error::UnknownTerm {
                term: term.to_string(),
                expected: self.terms().collect::<Vec<_>>().join(", "),
            })
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(t, _)| t.as_str())
    }

    pub fn entries(&self) -> &[(String, Tfn<T>)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses a vocabulary from a JSON array of
    /// `{"term": string, "l": number, "m": number, "u": number}` objects.
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    /// Serializes the vocabulary to the same JSON array format accepted by
    /// [`Vocabulary::from_json`].
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl<T: Real> Default for Vocabulary<T> {
    fn default() -> Self {
        Self::five_level()
    }
}

impl<T: Real> Serialize for Vocabulary<T> {
    fn serialize<S>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error>
    where
        S: serde::Serializer,
    {
        let raw: Vec<VocabularyEntry<T>> = self
            .entries
            .iter()
            .map(|(term, tfn)| VocabularyEntry {
                term: term.clone(),
                l: tfn.l(),
                m: tfn.m(),
                u: tfn.u(),
            })
            .collect();
        raw.serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for Vocabulary<T> {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let raw = Vec::<VocabularyEntry<T>>::deserialize(deserializer)?;
        let entries = raw
            .into_iter()
            .map(|e| {
                let tfn = Tfn::new(e.l, e.m, e.u).map_err(serde::de::Error::custom)?;
                Ok((e.term, tfn))
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        Vocabulary::new(entries).map_err(serde::de::Error::custom)
    }
}
