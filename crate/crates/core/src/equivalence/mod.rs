//! Local-unitary equivalence of pure states.
//!
//! [`compare_pure`] runs the invariant checks cheapest-first and only searches
//! for a witness once every certificate has come back inconclusive. Every
//! `Equivalent` verdict carries a witness verified on the original inputs;
//! every `Inequivalent` verdict carries a named invariant mismatch.

pub mod certificates;
pub mod phase;
pub mod search;
pub mod segments;
pub mod verdict;

use serde::{Deserialize, Serialize};

use crate::decomposition::{degeneracy_structure, hosvd, CanonicalForm, DEFAULT_CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::linearization::solve_fully_degenerate;
use crate::tensor::{apply_local_unitaries, ensure_same_dims, LocalUnitarySet, StateTensor};

use certificates::{gram_certificate, marginal_spectra_certificate};
use phase::{phase_unitaries, solve_core_phases, PhaseSolve};
use search::{verify_witness, witness_search, SearchBudget};
use segments::segments_of;
use verdict::{Certificate, Diagnostics, Stage, Verdict, Witness};

/// Relative residual a returned witness must meet on the original inputs.
pub const WITNESS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Certificates, the phase solver when applicable, then search.
    #[default]
    Auto,
    /// Phase solver only; degenerate inputs are an error.
    Phase,
    /// Invariant checks only; never returns `Equivalent` except via the
    /// phase solver.
    Certificates,
    /// Σ and degeneracy checks, then straight to the search.
    Search,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    /// Relative tolerance for invariant comparisons.
    pub tol: f64,
    /// Relative tolerance for clustering singular values.
    pub deg_tol: f64,
    pub seed: u64,
    pub restarts: usize,
    pub iterations: usize,
    pub strategy: Strategy,
    /// Largest party subset whose reduced spectrum is compared.
    pub marginal_max_subset: usize,
    /// Vectorization mode used to lay out segments; the last mode if `None`.
    pub segment_vec_mode: Option<usize>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        let budget = SearchBudget::default();
        Self {
            tol: 1e-9,
            deg_tol: DEFAULT_CLUSTER_TOL,
            seed: 0,
            restarts: budget.restarts,
            iterations: budget.iterations,
            strategy: Strategy::Auto,
            marginal_max_subset: 2,
            segment_vec_mode: None,
        }
    }
}

impl CompareOptions {
    pub fn budget(&self) -> SearchBudget {
        SearchBudget {
            restarts: self.restarts,
            iterations: self.iterations,
        }
    }
}

/// First singular value differing by more than `tol·max(‖A‖, ‖B‖)`, with
/// the largest difference overall.
pub(crate) fn sigma_certificate(
    cf_a: &CanonicalForm,
    cf_b: &CanonicalForm,
    tol: f64,
) -> Result<Option<(Certificate, f64)>> {
    ensure_same_dims(cf_a.core.dims(), cf_b.core.dims())?;
    let scale = cf_a.core.norm().max(cf_b.core.norm());
    let worst = cf_a
        .sigma
        .max_abs_diff(&cf_b.sigma)
        .unwrap_or(f64::INFINITY);
    for (mode, (ca, cb)) in cf_a
        .sigma
        .columns()
        .iter()
        .zip(cf_b.sigma.columns())
        .enumerate()
    {
        for (index, (&a, &b)) in ca.iter().zip(cb).enumerate() {
            if (a - b).abs() > tol * scale {
                return Ok(Some((
                    Certificate::SigmaMismatch { mode, index, a, b },
                    worst,
                )));
            }
        }
    }
    Ok(None)
}

/// `‖(⊗U) a − b‖ / ‖a‖`, or the absolute distance when `a` vanishes.
pub(crate) fn witness_residual(
    a: &StateTensor,
    b: &StateTensor,
    u: &LocalUnitarySet,
) -> Result<f64> {
    let d = apply_local_unitaries(a, u)?.distance(b)?;
    let n = a.norm();
    Ok(if n > 0.0 { d / n } else { d })
}

/// Turns a core-level map `S: Ω_A → Ω_B` into `U_B† S U_A: Ψ_A → Ψ_B` and
/// verifies it.
fn lift_witness(
    t_a: &StateTensor,
    t_b: &StateTensor,
    cf_a: &CanonicalForm,
    cf_b: &CanonicalForm,
    core_map: &LocalUnitarySet,
) -> Result<Option<Witness>> {
    let lifted = cf_b
        .mode_unitaries
        .adjoint()
        .compose(&core_map.compose(&cf_a.mode_unitaries)?)?;
    let witness = Witness {
        residual: witness_residual(t_a, t_b, &lifted)?,
        unitaries: lifted,
    };
    Ok(verify_witness(t_a, t_b, &witness, WITNESS_TOL)?.then_some(witness))
}

/// Decides whether `t_b = (⊗U) t_a` for some local unitaries.
pub fn compare_pure(
    t_a: &StateTensor,
    t_b: &StateTensor,
    opts: &CompareOptions,
) -> Result<Verdict> {
    ensure_same_dims(t_a.dims(), t_b.dims())?;
    let mut diag = Diagnostics::default();

    let cf_a = hosvd(t_a)?;
    let cf_b = hosvd(t_b)?;
    if let Some((cert, diff)) = sigma_certificate(&cf_a, &cf_b, opts.tol)? {
        diag.stage = Some(Stage::Sigma);
        diag.sigma_difference = Some(diff);
        return Ok(Verdict::inequivalent(cert, diag));
    }
    diag.sigma_difference = cf_a.sigma.max_abs_diff(&cf_b.sigma);

    let ds = degeneracy_structure(&cf_a.sigma, opts.deg_tol);
    let ds_b = degeneracy_structure(&cf_b.sigma, opts.deg_tol);
    if let Some(mode) = (0..ds.order()).find(|&m| ds.block_sizes(m) != ds_b.block_sizes(m)) {
        diag.stage = Some(Stage::Degeneracy);
        let cert = Certificate::DegeneracyMismatch {
            mode,
            a: ds.block_sizes(mode),
            b: ds_b.block_sizes(mode),
        };
        return Ok(Verdict::inequivalent(cert, diag));
    }

    if ds.is_nondegenerate() && opts.strategy != Strategy::Search {
        diag.stage = Some(Stage::Phase);
        match solve_core_phases(&cf_a.core, &cf_b.core, opts.tol)? {
            PhaseSolve::Refuted(cert) => {
                if let Certificate::PhaseInconsistent { residual } = cert {
                    diag.phase_residual = Some(residual);
                }
                return Ok(Verdict::inequivalent(cert, diag));
            }
            PhaseSolve::Solved(phases) => {
                let core_map = phase_unitaries(&phases)?;
                diag.phase_residual = Some(witness_residual(&cf_a.core, &cf_b.core, &core_map)?);
                if let Some(w) = lift_witness(t_a, t_b, &cf_a, &cf_b, &core_map)? {
                    return Ok(Verdict::equivalent(w, diag));
                }
            }
        }
    } else if opts.strategy == Strategy::Phase {
        return Err(Error::DegenerateInput);
    }
    if opts.strategy == Strategy::Phase {
        diag.stage = Some(Stage::Exhausted);
        return Ok(Verdict::undecided(diag));
    }

    if opts.strategy != Strategy::Search {
        let vec_mode = opts.segment_vec_mode.unwrap_or(t_a.order() - 1);
        let segs_a = segments_of(&cf_a.core, &ds, vec_mode)?;
        let segs_b = segments_of(&cf_b.core, &ds, vec_mode)?;
        if let Some(cert) = gram_certificate(&segs_a, &segs_b, &ds, opts.tol)? {
            diag.stage = Some(Stage::Gram);
            return Ok(Verdict::inequivalent(cert, diag));
        }
        if let Some(cert) =
            marginal_spectra_certificate(t_a, t_b, opts.tol, opts.marginal_max_subset)?
        {
            diag.stage = Some(Stage::Marginals);
            return Ok(Verdict::inequivalent(cert, diag));
        }
        if opts.strategy == Strategy::Certificates {
            diag.stage = Some(Stage::Exhausted);
            return Ok(Verdict::undecided(diag));
        }
    }

    if ds.is_fully_degenerate() && opts.strategy == Strategy::Auto {
        let mut verdict = solve_fully_degenerate(t_a, t_b, opts)?;
        verdict.diagnostics.sigma_difference = diag.sigma_difference;
        return Ok(verdict);
    }

    diag.stage = Some(Stage::Search);
    let found = witness_search(&cf_a, &cf_b, &ds, opts.seed, opts.budget())?;
    diag.restarts_used = found.restarts_used;
    diag.iterations_used = found.iterations_used;
    diag.best_search_residual = Some(found.best_residual).filter(|r| r.is_finite());
    if let Some(core_witness) = found.witness {
        if let Some(w) = lift_witness(t_a, t_b, &cf_a, &cf_b, &core_witness.unitaries)? {
            return Ok(Verdict::equivalent(w, diag));
        }
    }
    diag.stage = Some(Stage::Exhausted);
    Ok(Verdict::undecided(diag))
}
