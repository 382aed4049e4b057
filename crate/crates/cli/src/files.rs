//! JSON documents read and written by the command-line tool.
//!
//! Complex numbers are `[re, im]` pairs. Pure amplitudes follow the flat
//! order with the first party slowest; density matrices are row-major in the
//! same basis.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use lucanon::{CMatrix, DensityMatrix, LocalUnitarySet, StateTensor};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type Pair = [f64; 2];

pub fn to_pairs<'a>(values: impl IntoIterator<Item = &'a Complex64>) -> Vec<Pair> {
    values.into_iter().map(|z| [z.re, z.im]).collect()
}

pub fn from_pairs(pairs: &[Pair]) -> Vec<Complex64> {
    pairs
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect()
}

/// Row-major `[re, im]` entries of a square matrix.
pub fn matrix_to_pairs(m: &CMatrix) -> Vec<Pair> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push([m[(r, c)].re, m[(r, c)].im]);
        }
    }
    out
}

pub fn matrix_from_pairs(pairs: &[Pair], side: usize) -> Result<CMatrix> {
    if pairs.len() != side * side {
        bail!(
            "matrix has {} entries, expected {} for a {side}x{side} matrix",
            pairs.len(),
            side * side
        );
    }
    Ok(CMatrix::from_row_slice(side, side, &from_pairs(pairs)))
}

/// Every document kind the tool reads or writes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    Pure {
        dims: Vec<usize>,
        amplitudes: Vec<Pair>,
    },
    Mixed {
        dims: Vec<usize>,
        matrix: Vec<Pair>,
    },
    /// Canonical form of a pure state; reads back as the core tensor.
    Canonical {
        dims: Vec<usize>,
        core: Vec<Pair>,
        sigma: Vec<Vec<f64>>,
        mode_unitaries: Vec<Vec<Pair>>,
    },
    /// Canonical form of a mixed state; reads back as `upsilon`.
    CanonicalMixed {
        dims: Vec<usize>,
        upsilon: Vec<Pair>,
        purification: Box<Document>,
    },
}

/// A loaded and validated state.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(StateTensor),
    Mixed(DensityMatrix),
}

impl State {
    pub fn dims(&self) -> &[usize] {
        match self {
            State::Pure(t) => t.dims(),
            State::Mixed(r) => r.dims(),
        }
    }

    pub fn to_document(&self) -> Document {
        match self {
            State::Pure(t) => Document::Pure {
                dims: t.dims().to_vec(),
                amplitudes: to_pairs(t.amplitudes()),
            },
            State::Mixed(r) => Document::Mixed {
                dims: r.dims().to_vec(),
                matrix: matrix_to_pairs(r.matrix()),
            },
        }
    }
}

impl Document {
    pub fn into_state(self) -> Result<State> {
        Ok(match self {
            Document::Pure { dims, amplitudes } => {
                State::Pure(StateTensor::new(dims, from_pairs(&amplitudes))?)
            }
            Document::Canonical { dims, core, .. } => {
                State::Pure(StateTensor::new(dims, from_pairs(&core))?)
            }
            Document::Mixed { dims, matrix } => mixed_state(dims, &matrix)?,
            Document::CanonicalMixed { dims, upsilon, .. } => mixed_state(dims, &upsilon)?,
        })
    }
}

fn mixed_state(dims: Vec<usize>, matrix: &[Pair]) -> Result<State> {
    if dims.is_empty() {
        return Err(lucanon::Error::EmptyDims.into());
    }
    let side = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .context("dimension product overflows")?;
    let m = matrix_from_pairs(matrix, side)?;
    Ok(State::Mixed(DensityMatrix::new(dims, m)?))
}

pub fn read_document(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_state(path: &Path) -> Result<State> {
    read_document(path)?
        .into_state()
        .with_context(|| format!("validating {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Sidecar written by `rotate`: the seed and the applied unitaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitariesFile {
    pub seed: u64,
    /// One row-major matrix per party.
    pub unitaries: Vec<Vec<Pair>>,
}

impl UnitariesFile {
    pub fn new(seed: u64, u: &LocalUnitarySet) -> Self {
        Self {
            seed,
            unitaries: u.matrices().iter().map(matrix_to_pairs).collect(),
        }
    }

    pub fn to_unitaries(&self, dims: &[usize]) -> Result<LocalUnitarySet> {
        if dims.len() != self.unitaries.len() {
            bail!(
                "{} unitaries for {} parties",
                self.unitaries.len(),
                dims.len()
            );
        }
        let ms = self
            .unitaries
            .iter()
            .zip(dims)
            .map(|(pairs, &d)| matrix_from_pairs(pairs, d))
            .collect::<Result<Vec<_>>>()?;
        Ok(LocalUnitarySet::new(ms)?)
    }
}
