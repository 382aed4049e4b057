//! Numerical search for a block-diagonal symmetry element mapping one core
//! onto another, by alternating per-mode block polar updates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decomposition::{CanonicalForm, DegeneracyStructure};
use crate::error::{Error, Result};
use crate::linalg::maximizing_unitary;
use crate::tensor::{
    apply_local_unitaries, ensure_same_dims, mode_product, random_unitary_with, unfold, CMatrix,
    LocalUnitarySet, StateTensor,
};

use super::verdict::Witness;

/// Relative residual below which a search candidate counts as a witness.
pub const SEARCH_TARGET: f64 = 1e-8;
/// Unitarity slack accepted by [`verify_witness`].
pub const WITNESS_UNITARITY_TOL: f64 = 1e-8;

const POLISH_FACTOR: f64 = 1e-2;
const STALL_IMPROVEMENT: f64 = 1e-13;
const STALL_SWEEPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub restarts: usize,
    /// Sweeps over all modes per restart.
    pub iterations: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 64,
            iterations: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Maps `cf_a.core` onto `cf_b.core` when found.
    pub witness: Option<Witness>,
    pub best_residual: f64,
    pub restarts_used: usize,
    pub iterations_used: usize,
}

/// Searches for `S = ⊗ S^(n)`, each `S^(n)` block-diagonal per `ds`, with
/// `‖S·Ω_A − Ω_B‖ < SEARCH_TARGET·‖Ω_A‖`.
///
/// Restart 0 starts at the identity; restart `k > 0` starts at a random block
/// unitary drawn from stream `k` of a generator seeded with `seed`. Restarts
/// run in order and the first success is returned, so the result depends only
/// on `seed` and `budget`.
pub fn witness_search(
    cf_a: &CanonicalForm,
    cf_b: &CanonicalForm,
    ds: &DegeneracyStructure,
    seed: u64,
    budget: SearchBudget,
) -> Result<SearchResult> {
    search_tensors(&cf_a.core, &cf_b.core, ds, seed, budget)
}

/// [`witness_search`] on arbitrary tensors of equal dims.
pub fn search_tensors(
    a: &StateTensor,
    b: &StateTensor,
    ds: &DegeneracyStructure,
    seed: u64,
    budget: SearchBudget,
) -> Result<SearchResult> {
    ensure_same_dims(a.dims(), b.dims())?;
    if ds.dims() != a.dims() {
        return Err(Error::StructureMismatch(format!(
            "blocks cover {:?}, cores have dims {:?}",
            ds.dims(),
            a.dims()
        )));
    }
    let scale = a.norm().max(b.norm());
    let target = SEARCH_TARGET * scale;
    let mut result = SearchResult {
        witness: None,
        best_residual: f64::INFINITY,
        restarts_used: 0,
        iterations_used: 0,
    };
    if scale == 0.0 {
        result.best_residual = 0.0;
        result.witness = Some(Witness {
            unitaries: LocalUnitarySet::identity(a.dims()),
            residual: 0.0,
        });
        return Ok(result);
    }

    for restart in 0..budget.restarts {
        let mut current = if restart == 0 {
            a.dims().iter().map(|&d| CMatrix::identity(d, d)).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(restart as u64);
            block_unitaries(ds, &mut rng)?
        };
        result.restarts_used += 1;

        let mut residual = distance_after(a, b, &current)?;
        let mut best_seen = residual;
        let mut stalled = 0;
        for _ in 0..budget.iterations {
            if residual < POLISH_FACTOR * target {
                break;
            }
            result.iterations_used += 1;
            for mode in 0..a.order() {
                current[mode] = best_block_update(a, b, &current, ds, mode)?;
            }
            residual = distance_after(a, b, &current)?;
            if best_seen - residual < STALL_IMPROVEMENT * scale {
                stalled += 1;
                if stalled >= STALL_SWEEPS {
                    break;
                }
            } else {
                stalled = 0;
            }
            best_seen = best_seen.min(residual);
        }
        result.best_residual = result.best_residual.min(residual / scale);
        if residual < target {
            result.witness = Some(Witness {
                unitaries: LocalUnitarySet::with_tolerance(current, WITNESS_UNITARITY_TOL)?,
                residual: residual / a.norm(),
            });
            return Ok(result);
        }
    }
    Ok(result)
}

/// Random element of the block symmetry group of `ds`.
pub fn random_block_symmetry(ds: &DegeneracyStructure, seed: u64) -> Result<LocalUnitarySet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    LocalUnitarySet::new(block_unitaries(ds, &mut rng)?)
}

fn block_unitaries(ds: &DegeneracyStructure, rng: &mut ChaCha8Rng) -> Result<Vec<CMatrix>> {
    ds.modes()
        .iter()
        .map(|blocks| {
            let dim = blocks.iter().map(|b| b.size).sum();
            let mut m = CMatrix::zeros(dim, dim);
            for block in blocks {
                let u = random_unitary_with(block.size, rng)?;
                m.view_mut((block.start, block.start), (block.size, block.size))
                    .copy_from(&u);
            }
            Ok(m)
        })
        .collect()
}

fn distance_after(a: &StateTensor, b: &StateTensor, unitaries: &[CMatrix]) -> Result<f64> {
    let mut t = a.clone();
    for (mode, m) in unitaries.iter().enumerate() {
        t = mode_product(&t, mode, m)?;
    }
    t.distance(b)
}

/// Block-diagonal unitary for `mode` minimizing the distance with all other
/// modes held fixed.
fn best_block_update(
    a: &StateTensor,
    b: &StateTensor,
    current: &[CMatrix],
    ds: &DegeneracyStructure,
    mode: usize,
) -> Result<CMatrix> {
    let mut rotated = a.clone();
    for (m, u) in current.iter().enumerate() {
        if m != mode {
            rotated = mode_product(&rotated, m, u)?;
        }
    }
    let x = unfold(&rotated, mode)?.matrix;
    let y = unfold(b, mode)?.matrix;
    let k = &x * y.adjoint();
    let dim = k.nrows();
    let mut update = CMatrix::zeros(dim, dim);
    for block in ds.blocks(mode) {
        let sub = k
            .view((block.start, block.start), (block.size, block.size))
            .into_owned();
        update
            .view_mut((block.start, block.start), (block.size, block.size))
            .copy_from(&maximizing_unitary(&sub));
    }
    Ok(update)
}

/// True iff `‖(⊗W) t_a − t_b‖ ≤ tol·‖t_a‖` and every factor is unitary
/// within [`WITNESS_UNITARITY_TOL`].
pub fn verify_witness(t_a: &StateTensor, t_b: &StateTensor, w: &Witness, tol: f64) -> Result<bool> {
    ensure_same_dims(t_a.dims(), t_b.dims())?;
    ensure_same_dims(t_a.dims(), &w.unitaries.dims())?;
    if w.unitaries.max_unitarity_deviation() > WITNESS_UNITARITY_TOL {
        return Ok(false);
    }
    let mapped = apply_local_unitaries(t_a, &w.unitaries)?;
    Ok(mapped.distance(t_b)? <= tol * t_a.norm())
}
