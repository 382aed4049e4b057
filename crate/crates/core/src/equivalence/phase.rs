//! Exact decision for cores with all singular values distinct.
//!
//! The symmetry group is then a product of diagonal phase matrices, and
//! `Ω' = S Ω` reduces to `θ^(1)_{i1} + ... + θ^(N)_{iN} ≡ arg(ω'/ω) (mod 2π)`
//! over the nonzero entries. The 0/1 coefficient matrix is row-reduced with
//! unimodular integer operations; rows that vanish are integer left-kernel
//! vectors `y`, and the system is solvable iff `y·b ≡ 0 (mod 2π)` for each.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::decomposition::{degeneracy_structure, CanonicalForm, DEFAULT_CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::tensor::{for_each_index, CMatrix, LocalUnitarySet, StateTensor};

use super::verdict::{Certificate, Diagnostics, Stage, Verdict, Witness};
use super::{sigma_certificate, witness_residual};

/// Base angular tolerance for a consistency check, in radians.
pub const ANGLE_TOL: f64 = 1e-8;

/// Outcome of the phase system for two cores.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseSolve {
    /// Per-mode phases `θ^(n)_i` with `θ^(n)_0 = 0` for `n ≥ 1`.
    Solved(Vec<Vec<f64>>),
    Refuted(Certificate),
}

/// Decides LU equivalence of two fully non-degenerate canonical forms.
///
/// The witness maps `cf_a.core` onto `cf_b.core`.
pub fn phase_equivalence(cf_a: &CanonicalForm, cf_b: &CanonicalForm, tol: f64) -> Result<Verdict> {
    let ds_a = degeneracy_structure(&cf_a.sigma, DEFAULT_CLUSTER_TOL);
    let ds_b = degeneracy_structure(&cf_b.sigma, DEFAULT_CLUSTER_TOL);
    if !ds_a.is_nondegenerate() || !ds_b.is_nondegenerate() {
        return Err(Error::DegenerateInput);
    }
    let mut diagnostics = Diagnostics::default();
    if let Some((cert, diff)) = sigma_certificate(cf_a, cf_b, tol)? {
        diagnostics.stage = Some(Stage::Sigma);
        diagnostics.sigma_difference = Some(diff);
        return Ok(Verdict::inequivalent(cert, diagnostics));
    }
    diagnostics.stage = Some(Stage::Phase);
    match solve_core_phases(&cf_a.core, &cf_b.core, tol)? {
        PhaseSolve::Refuted(cert) => {
            if let Certificate::PhaseInconsistent { residual } = cert {
                diagnostics.phase_residual = Some(residual);
            }
            Ok(Verdict::inequivalent(cert, diagnostics))
        }
        PhaseSolve::Solved(phases) => {
            let unitaries = phase_unitaries(&phases)?;
            let residual = witness_residual(&cf_a.core, &cf_b.core, &unitaries)?;
            Ok(Verdict::equivalent(
                Witness {
                    unitaries,
                    residual,
                },
                diagnostics,
            ))
        }
    }
}

/// Diagonal unitaries `diag(e^{iθ^(n)})`.
pub fn phase_unitaries(phases: &[Vec<f64>]) -> Result<LocalUnitarySet> {
    LocalUnitarySet::new(
        phases
            .iter()
            .map(|p| {
                let diag: Vec<Complex64> =
                    p.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
                CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
            })
            .collect(),
    )
}

struct Equation {
    coef: Vec<i64>,
    rhs: f64,
    tol: f64,
}

fn wrap(angle: f64) -> f64 {
    angle - 2.0 * PI * (angle / (2.0 * PI)).round()
}

/// Sets up and solves the phase system for two cores of identical dims.
pub fn solve_core_phases(a: &StateTensor, b: &StateTensor, tol: f64) -> Result<PhaseSolve> {
    crate::tensor::ensure_same_dims(a.dims(), b.dims())?;
    let dims = a.dims().to_vec();
    let threshold = tol * a.norm().max(b.norm());

    let mut mismatch = None;
    for_each_index(&dims, |flat, index| {
        if mismatch.is_some() {
            return;
        }
        let (x, y) = (a.amplitudes()[flat].norm(), b.amplitudes()[flat].norm());
        if (x - y).abs() > threshold {
            mismatch = Some(Certificate::MagnitudeMismatch {
                index: index.to_vec(),
                a: x,
                b: y,
            });
        }
    });
    if let Some(cert) = mismatch {
        return Ok(PhaseSolve::Refuted(cert));
    }

    // unknowns: every θ^(0)_i, and θ^(n)_i for i ≥ 1 when n ≥ 1
    let mut var_of: Vec<Vec<Option<usize>>> = Vec::with_capacity(dims.len());
    let mut count = 0;
    for (mode, &d) in dims.iter().enumerate() {
        let vars = (0..d)
            .map(|i| {
                if mode > 0 && i == 0 {
                    None
                } else {
                    count += 1;
                    Some(count - 1)
                }
            })
            .collect();
        var_of.push(vars);
    }

    let mut equations = Vec::new();
    for_each_index(&dims, |flat, index| {
        let (x, y) = (a.amplitudes()[flat], b.amplitudes()[flat]);
        let smaller = x.norm().min(y.norm());
        if smaller <= threshold {
            return;
        }
        let mut coef = vec![0i64; count];
        for (mode, &i) in index.iter().enumerate() {
            if let Some(v) = var_of[mode][i] {
                coef[v] += 1;
            }
        }
        equations.push(Equation {
            coef,
            rhs: (y * x.conj()).arg(),
            tol: ANGLE_TOL + threshold / smaller,
        });
    });

    let (pivots, rank) = integer_echelon(&mut equations, count)?;

    let mut worst: f64 = 0.0;
    let mut inconsistent = false;
    for eq in &equations[rank..] {
        let r = wrap(eq.rhs).abs();
        worst = worst.max(r);
        if r > eq.tol {
            inconsistent = true;
        }
    }
    if inconsistent {
        return Ok(PhaseSolve::Refuted(Certificate::PhaseInconsistent {
            residual: worst,
        }));
    }

    let mut theta = vec![0.0; count];
    for &(row, col) in pivots.iter().rev() {
        let eq = &equations[row];
        let known: f64 = (col + 1..count).map(|c| eq.coef[c] as f64 * theta[c]).sum();
        theta[col] = (eq.rhs - known) / eq.coef[col] as f64;
    }
    let phases = var_of
        .iter()
        .map(|vars| {
            vars.iter()
                .map(|v| v.map_or(0.0, |k| wrap(theta[k])))
                .collect()
        })
        .collect();
    Ok(PhaseSolve::Solved(phases))
}

/// Row echelon form by unimodular integer row operations. Returns the
/// `(row, column)` pivots and the rank; rows from `rank` on are zero.
fn integer_echelon(eqs: &mut [Equation], cols: usize) -> Result<(Vec<(usize, usize)>, usize)> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        loop {
            let candidate = (next..eqs.len())
                .filter(|&r| eqs[r].coef[col] != 0)
                .min_by_key(|&r| eqs[r].coef[col].unsigned_abs());
            let Some(k) = candidate else { break };
            eqs.swap(k, next);
            let mut cleared = true;
            for r in next + 1..eqs.len() {
                let c = eqs[r].coef[col];
                if c == 0 {
                    continue;
                }
                let q = c / eqs[next].coef[col];
                if q != 0 {
                    subtract_multiple(eqs, r, next, q)?;
                }
                if eqs[r].coef[col] != 0 {
                    cleared = false;
                }
            }
            if cleared {
                pivots.push((next, col));
                next += 1;
                break;
            }
        }
    }
    Ok((pivots, next))
}

fn subtract_multiple(eqs: &mut [Equation], target: usize, source: usize, q: i64) -> Result<()> {
    let overflow = || Error::Overflow("phase system elimination".into());
    for c in 0..eqs[target].coef.len() {
        let delta = eqs[source].coef[c].checked_mul(q).ok_or_else(overflow)?;
        eqs[target].coef[c] = eqs[target].coef[c]
            .checked_sub(delta)
            .ok_or_else(overflow)?;
    }
    eqs[target].rhs = wrap(eqs[target].rhs - q as f64 * eqs[source].rhs);
    eqs[target].tol += q.unsigned_abs() as f64 * eqs[source].tol;
    Ok(())
}
