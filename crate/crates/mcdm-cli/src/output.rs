//! Deterministic serialization: fixed-precision floats, ordered JSON,
//! CSV renderers and the run manifest.
//!
//! Every float is written with exactly 10 significant digits so golden
//! files stay byte-stable across platforms and runtimes; JSON objects keep
//! their field declaration order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use mcdm::topsis::TopsisResult;
use mcdm::weighting::WeightVector;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Formats a finite float with 10 significant digits in plain decimal
/// notation, e.g. `0.7510571170`, `12.50000000`, `0.003333333333`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    debug_assert!(x.is_finite(), "only finite values are serialized");
    let scientific = format!("{x:.9e}");
    let (mantissa, exponent) = scientific
        .split_once('e')
        .expect("e-notation always carries an exponent");
    let exp: i32 = exponent.parse().expect("exponent is a small integer");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::with_capacity(digits.len() + 4);
    if mantissa.starts_with('-') {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    } else {
        let point = exp as usize + 1;
        if point >= digits.len() {
            out.push_str(&digits);
            for _ in 0..point - digits.len() {
                out.push('0');
            }
            out.push_str(".0");
        } else {
            out.push_str(&digits[..point]);
            out.push('.');
            out.push_str(&digits[point..]);
        }
    }
    out
}

/// Serializes any value to JSON with ordered keys, two-space indentation
/// and [`fmt_sig`] floats, ending in a newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let value = serde_json::to_value(value).context("serializing to JSON")?;
    let mut out = String::new();
    render(&value, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn render(value: &Value, indent: usize, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&fmt_sig(n.as_f64().expect("checked f64")));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                push_indent(indent + 1, out);
                render(item, indent + 1, out);
            }
            out.push('\n');
            push_indent(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                push_indent(indent + 1, out);
                out.push_str(&serde_json::to_string(key).expect("keys always serialize"));
                out.push_str(": ");
                render(item, indent + 1, out);
            }
            out.push('\n');
            push_indent(indent, out);
            out.push('}');
        }
    }
}

fn push_indent(indent: usize, out: &mut String) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// Renders `rank,candidate_id,closeness,d_plus,d_minus` rows.
pub fn ranking_csv(result: &TopsisResult<f64>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["rank", "candidate_id", "closeness", "d_plus", "d_minus"])?;
    for outcome in &result.results {
        writer.write_record([
            outcome.rank.to_string(),
            outcome.id.clone(),
            fmt_sig(outcome.closeness),
            fmt_sig(outcome.d_plus),
            fmt_sig(outcome.d_minus),
        ])?;
    }
    let bytes = writer.into_inner().expect("vec writer cannot fail");
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Renders the rank table for standard output.
pub fn ranking_table(result: &TopsisResult<f64>) -> String {
    let id_width = result
        .results
        .iter()
        .map(|o| o.id.len())
        .max()
        .unwrap_or(0)
        .max("candidate_id".len());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4}  {:<id_width$}  {:>13}  {:>13}  {:>13}",
        "rank", "candidate_id", "closeness", "d_plus", "d_minus"
    );
    for o in &result.results {
        let _ = writeln!(
            out,
            "{:>4}  {:<id_width$}  {:>13}  {:>13}  {:>13}",
            o.rank,
            o.id,
            fmt_sig(o.closeness),
            fmt_sig(o.d_plus),
            fmt_sig(o.d_minus)
        );
    }
    out
}

/// Renders a weight vector for standard output.
pub fn weights_table(weights: &WeightVector<f64>) -> String {
    let name_width = weights
        .criteria()
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max("criterion".len());
    let mut out = String::new();
    let _ = writeln!(out, "{:<name_width$}  {:>12}", "criterion", "weight");
    for (name, &w) in weights.criteria().iter().zip(weights.weights()) {
        let _ = writeln!(out, "{name:<name_width$}  {:>12}", fmt_sig(w));
    }
    let _ = writeln!(
        out,
        "consistency ratio: {}",
        fmt_sig(weights.consistency_ratio())
    );
    out
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    tool: &'static str,
    version: &'static str,
    created_unix: u64,
    config: &'a Value,
    inputs: &'a [InputDigest],
    outputs: &'a [String],
}

/// Collects output files and input hashes for one run, then seals them
/// into `manifest.json` so every artifact the run touched is accounted for.
pub struct RunWriter {
    dir: PathBuf,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
}

impl RunWriter {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Reads and hashes an input file into the manifest record, handing
    /// the content back for parsing.
    pub fn record_input(&mut self, path: &Path) -> Result<String> {
        let bytes =
            fs::read(path).with_context(|| format!("reading input {}", path.display()))?;
        let digest = format!("{:x}", Sha256::digest(&bytes));
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: digest,
        });
        String::from_utf8(bytes)
            .with_context(|| format!("input {} is not valid UTF-8", path.display()))
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let text = to_json(value)?;
        self.write_text(name, &text)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    /// Writes `manifest.json` listing every emitted file. The timestamp
    /// honours `SOURCE_DATE_EPOCH` so runs can be made fully reproducible.
    pub fn finish<C: Serialize>(mut self, command: &str, config: &C) -> Result<PathBuf> {
        let config = serde_json::to_value(config).context("serializing config snapshot")?;
        let manifest = Manifest {
            command,
            tool: "mcdm",
            version: env!("CARGO_PKG_VERSION"),
            created_unix: created_unix(),
            config: &config,
            inputs: &self.inputs,
            outputs: &self.outputs,
        };
        let text = to_json(&manifest)?;
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push("manifest.json".to_string());
        Ok(path)
    }
}

fn created_unix() -> u64 {
    if let Ok(epoch) = std::env::var("SOURCE_DATE_EPOCH") {
        if let Ok(fixed) = epoch.trim().parse() {
            return fixed;
        }
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
