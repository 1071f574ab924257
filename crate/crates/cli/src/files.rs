//! JSON file formats for POVMs, walk programs and coin states.
//!
//! Matrices are row-major lists of rows, each entry a `[re, im]` pair.
//! Numbers are written as shortest round-trip decimals, so a file written by
//! the tool reads back to exactly the same values and rewrites byte-identically.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use qwalk::linalg::{CKet, CMatrix};
use qwalk::{CoinLayer, Povm, WalkProgram};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub type Entry = [f64; 2];
pub type MatrixRows = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmFile {
    pub dim: usize,
    pub elements: Vec<MatrixRows>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoinEntry {
    pub position: i64,
    pub matrix: MatrixRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerFile {
    pub translate: bool,
    pub coins: Vec<CoinEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeEntry {
    pub position: i64,
    pub outcome: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub dim: usize,
    pub layers: Vec<LayerFile>,
    pub outcome_positions: Vec<OutcomeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_layer: Option<LayerFile>,
}

/// A pure coin state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub amplitudes: Vec<Entry>,
}

fn entry(z: Complex64) -> Entry {
    [z.re, z.im]
}

fn matrix_rows(m: &CMatrix) -> MatrixRows {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| entry(m[(r, c)])).collect())
        .collect()
}

fn matrix(rows: &MatrixRows, dim: usize, what: &str) -> Result<CMatrix, String> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(format!("{what} is not {dim}×{dim}"));
    }
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        let [re, im] = rows[r][c];
        Complex64::new(re, im)
    }))
}

impl PovmFile {
    pub fn from_povm(p: &Povm) -> Self {
        PovmFile { dim: p.dim(), elements: p.elements().iter().map(matrix_rows).collect() }
    }

    /// Shape checks only; the physical constraints are left to `validate`.
    pub fn to_povm(&self) -> Result<Povm, String> {
        if self.dim == 0 {
            return Err("dim must be at least 1".into());
        }
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, m)| matrix(m, self.dim, &format!("element {i}")))
            .collect::<Result<Vec<_>, _>>()?;
        Povm::new(elements).map_err(|e| e.to_string())
    }
}

impl LayerFile {
    fn from_layer(layer: &CoinLayer) -> Self {
        LayerFile {
            translate: layer.translate(),
            coins: layer
                .coins()
                .iter()
                .map(|(&position, m)| CoinEntry { position, matrix: matrix_rows(m) })
                .collect(),
        }
    }

    fn to_layer(&self, dim: usize, index: &str) -> Result<CoinLayer, String> {
        let mut layer = if self.translate { CoinLayer::new() } else { CoinLayer::stationary() };
        for c in &self.coins {
            if layer.coin(c.position).is_some() {
                return Err(format!("{index}: two coins at position {}", c.position));
            }
            layer.insert(c.position, matrix(&c.matrix, dim, &format!("{index} coin at {}", c.position))?);
        }
        Ok(layer)
    }
}

impl ScheduleFile {
    pub fn from_program(p: &WalkProgram) -> Self {
        ScheduleFile {
            dim: p.dim(),
            layers: p.layers().iter().map(LayerFile::from_layer).collect(),
            outcome_positions: p
                .outcome_positions()
                .iter()
                .map(|(&position, &outcome)| OutcomeEntry { position, outcome })
                .collect(),
            post_layer: p.post_layer().map(LayerFile::from_layer),
        }
    }

    /// Builds the program and checks that every coin is unitary.
    pub fn to_program(&self) -> Result<WalkProgram, String> {
        let mut p = WalkProgram::new(self.dim);
        for (i, l) in self.layers.iter().enumerate() {
            p.push_layer(l.to_layer(self.dim, &format!("layer {i}"))?);
        }
        for o in &self.outcome_positions {
            if p.outcome_positions().contains_key(&o.position) {
                return Err(format!("position {} labelled twice", o.position));
            }
            p.set_outcome(o.position, o.outcome);
        }
        if let Some(l) = &self.post_layer {
            if l.translate {
                return Err("post layer must have translate = false".into());
            }
            p.set_post_layer(l.to_layer(self.dim, "post layer")?);
        }
        p.validate().map_err(|e| e.to_string())?;
        Ok(p)
    }
}

impl StateFile {
    pub fn from_ket(v: &CKet) -> Self {
        StateFile { dim: v.len(), amplitudes: v.iter().copied().map(entry).collect() }
    }

    pub fn to_ket(&self) -> Result<CKet, String> {
        if self.amplitudes.len() != self.dim {
            return Err(format!("{} amplitudes for dim {}", self.amplitudes.len(), self.dim));
        }
        Ok(CKet::from_iterator(self.dim, self.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im))))
    }
}

/// JSON with a trailing newline. Arrays nested at most two deep (a complex
/// entry, a matrix row, a list of amplitudes) stay on one line; everything
/// else is indented.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("plain data always serializes");
    let mut s = String::new();
    pretty(&v, 0, &mut s);
    s.push('\n');
    s
}

fn array_depth(v: &Value) -> usize {
    match v {
        Value::Array(a) => 1 + a.iter().map(array_depth).max().unwrap_or(0),
        Value::Object(_) => usize::MAX / 2,
        _ => 0,
    }
}

fn pretty(v: &Value, indent: usize, s: &mut String) {
    let pad = |n: usize| " ".repeat(n);
    match v {
        Value::Array(a) if !a.is_empty() && array_depth(v) > 2 => {
            s.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                s.push_str(&pad(indent + 2));
                pretty(x, indent + 2, s);
                s.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            s.push_str(&pad(indent));
            s.push(']');
        }
        Value::Object(m) if !m.is_empty() => {
            s.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                s.push_str(&pad(indent + 2));
                s.push_str(&Value::String(k.clone()).to_string());
                s.push_str(": ");
                pretty(x, indent + 2, s);
                s.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            s.push_str(&pad(indent));
            s.push('}');
        }
        other => s.push_str(&compact(other)),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::Array(a) => format!("[{}]", a.iter().map(compact).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

/// Shortest round-trip decimal, the same spelling the files use.
pub fn number(x: f64) -> String {
    if x.is_finite() {
        Value::from(x).to_string()
    } else {
        x.to_string()
    }
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

/// Read and parse a file; any failure is reported as a malformed input.
pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let malformed = |msg: String| CliError::Malformed { path: path.display().to_string(), msg };
    let text = fs::read_to_string(path).map_err(|e| malformed(e.to_string()))?;
    from_json(&text).map_err(malformed)
}

pub fn write<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    fs::write(path, to_json(value)).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}
