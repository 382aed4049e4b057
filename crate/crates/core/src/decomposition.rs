//! Higher-order SVD: per-mode singular values, the core tensor, and the
//! degeneracy (multiplicity) structure of the singular value matrix.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::orthogonalize_rows;
use crate::tensor::{apply_local_unitaries, unfold, CMatrix, LocalUnitarySet, StateTensor};

/// Default relative tolerance for merging singular values into one block.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

/// Per-mode singular values `σ_1^(n) ≥ ... ≥ σ_{I_n}^(n) ≥ 0`.
///
/// Entries are Frobenius norms of core slices, not their squares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularValueMatrix {
    columns: Vec<Vec<f64>>,
}

impl SingularValueMatrix {
    pub fn new(columns: Vec<Vec<f64>>) -> Self {
        Self { columns }
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, mode: usize) -> &[f64] {
        &self.columns[mode]
    }

    pub fn order(&self) -> usize {
        self.columns.len()
    }

    /// Squared entries, i.e. the spectra of the single-party reduced states.
    pub fn squared(&self) -> Vec<Vec<f64>> {
        self.columns
            .iter()
            .map(|c| c.iter().map(|s| s * s).collect())
            .collect()
    }

    /// Largest entrywise difference, or `None` when the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.columns.len() != other.columns.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.columns.iter().zip(&other.columns) {
            if a.len() != b.len() {
                return None;
            }
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs());
            }
        }
        Some(worst)
    }
}

/// Core tensor `Ω = (⊗ U^(n)) Ψ` together with the unitaries and singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    pub core: StateTensor,
    pub mode_unitaries: LocalUnitarySet,
    pub sigma: SingularValueMatrix,
}

/// `U^(n)` and `σ^(n)` with `U^(n) · Ψ_(n) · V^(n) = diag(σ)`.
///
/// Each row of `U^(n)` has its largest-magnitude entry real and positive.
pub fn mode_singular_values(t: &StateTensor, mode: usize) -> Result<(CMatrix, Vec<f64>)> {
    let unfolded = unfold(t, mode)?;
    let r = orthogonalize_rows(&unfolded.matrix, mode)?;
    Ok((r.unitary, r.norms))
}

pub fn hosvd(t: &StateTensor) -> Result<CanonicalForm> {
    let mut unitaries = Vec::with_capacity(t.order());
    let mut columns = Vec::with_capacity(t.order());
    for mode in 0..t.order() {
        let (u, sigma) = mode_singular_values(t, mode)?;
        unitaries.push(u);
        columns.push(sigma);
    }
    let mode_unitaries = LocalUnitarySet::new(unitaries)?;
    let core = apply_local_unitaries(t, &mode_unitaries)?;
    Ok(CanonicalForm {
        core,
        mode_unitaries,
        sigma: SingularValueMatrix::new(columns),
    })
}

pub fn singular_value_matrix(cf: &CanonicalForm) -> SingularValueMatrix {
    cf.sigma.clone()
}

/// A run of (numerically) equal singular values within one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub start: usize,
    pub size: usize,
    pub value: f64,
}

impl Block {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.size
    }
}

/// Per-mode partition of singular values into multiplicity blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyStructure {
    modes: Vec<Vec<Block>>,
}

impl DegeneracyStructure {
    pub fn new(modes: Vec<Vec<Block>>) -> Self {
        Self { modes }
    }

    /// One block per mode spanning the whole local space.
    pub fn full(dims: &[usize]) -> Self {
        Self {
            modes: dims
                .iter()
                .map(|&d| {
                    vec![Block {
                        start: 0,
                        size: d,
                        value: 0.0,
                    }]
                })
                .collect(),
        }
    }

    pub fn modes(&self) -> &[Vec<Block>] {
        &self.modes
    }

    pub fn blocks(&self, mode: usize) -> &[Block] {
        &self.modes[mode]
    }

    pub fn order(&self) -> usize {
        self.modes.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.modes
            .iter()
            .map(|blocks| blocks.iter().map(|b| b.size).sum())
            .collect()
    }

    pub fn block_sizes(&self, mode: usize) -> Vec<usize> {
        self.modes[mode].iter().map(|b| b.size).collect()
    }

    /// True when the block sizes agree mode by mode.
    pub fn same_pattern(&self, other: &Self) -> bool {
        self.modes.len() == other.modes.len()
            && (0..self.modes.len()).all(|m| self.block_sizes(m) == other.block_sizes(m))
    }

    /// Every block has size one.
    pub fn is_nondegenerate(&self) -> bool {
        self.modes.iter().flatten().all(|b| b.size == 1)
    }

    /// Every mode is a single block.
    pub fn is_fully_degenerate(&self) -> bool {
        self.modes.iter().all(|blocks| blocks.len() == 1)
    }
}

/// Merges consecutive values with `|σ_i - σ_{i+1}| ≤ cluster_tol · σ_1`.
pub fn degeneracy_structure(sigma: &SingularValueMatrix, cluster_tol: f64) -> DegeneracyStructure {
    let modes = sigma
        .columns()
        .iter()
        .map(|col| {
            let scale = col.first().copied().unwrap_or(0.0);
            let mut blocks: Vec<Block> = Vec::new();
            for (i, &v) in col.iter().enumerate() {
                match blocks.last_mut() {
                    Some(b) if (col[i - 1] - v).abs() <= cluster_tol * scale => {
                        b.size += 1;
                    }
                    _ => blocks.push(Block {
                        start: i,
                        size: 1,
                        value: v,
                    }),
                }
            }
            blocks
        })
        .collect();
    DegeneracyStructure { modes }
}
