//! Linearized view of the fully degenerate case.
//!
//! Writing each local unitary as `U = X† Φ X` with `Φ` diagonal, the map
//! `Ω' = (⊗U) Ω` becomes `(⊗Φ)(⊗X) Ω = (⊗X) Ω'`. Treating each monomial
//! `ν_{j,i} = ∏_n x^(n)_{j_n i_n}` as an unknown turns this into one linear
//! row per multi-index `j`, subject to quadratic relations among the `ν`.
//! Multi-indices are flat with the first party most significant.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;

use crate::decomposition::{degeneracy_structure, hosvd, DegeneracyStructure};
use crate::equivalence::certificates::marginal_spectra_certificate;
use crate::equivalence::search::{search_tensors, verify_witness};
use crate::equivalence::verdict::{Diagnostics, Stage, Verdict};
use crate::equivalence::{CompareOptions, WITNESS_TOL};
use crate::error::{Error, Result};
use crate::tensor::{ensure_same_dims, CMatrix, LocalUnitarySet, StateTensor};

/// Largest `(∏I_n)²` the enumeration routines accept.
pub const MAX_VARIABLES: usize = 4096;

fn binomial(n: u128, k: u128) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for step in 1..=k {
        // acc · (n - k + step) is divisible by step at every stage
        acc = acc
            .checked_mul(n - k + step)
            .ok_or_else(|| Error::Overflow(format!("C({n}, {k})")))?
            / step;
    }
    Ok(acc)
}

/// Number of degree-`m` products of the `ν` variables, and the number of
/// those that are distinct as polynomials in the matrix entries.
pub fn count_products(dims: &[usize], m: usize) -> Result<(u128, u128)> {
    if dims.is_empty() {
        return Err(Error::EmptyDims);
    }
    if m == 0 {
        return Err(Error::BadDim(0));
    }
    let overflow = || Error::Overflow(format!("product counts for dims {dims:?}, m = {m}"));
    let m = m as u128;
    let mut volume: u128 = 1;
    let mut independent: u128 = 1;
    for &d in dims {
        if d == 0 {
            return Err(Error::BadDim(0));
        }
        let sq = (d as u128).checked_mul(d as u128).ok_or_else(overflow)?;
        volume = volume.checked_mul(d as u128).ok_or_else(overflow)?;
        let choices = binomial(sq.checked_add(m - 1).ok_or_else(overflow)?, m)?;
        independent = independent.checked_mul(choices).ok_or_else(overflow)?;
    }
    let vars = volume.checked_mul(volume).ok_or_else(overflow)?;
    let total = binomial(vars.checked_add(m - 1).ok_or_else(overflow)?, m)?;
    Ok((total, independent))
}

/// `ν_{row,col}`, both flat multi-indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NuIndex {
    pub row: usize,
    pub col: usize,
}

/// `ν_{lhs.0} ν_{lhs.1} = ν_{rhs.0} ν_{rhs.1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadraticRelation {
    pub lhs: (NuIndex, NuIndex),
    pub rhs: (NuIndex, NuIndex),
}

impl QuadraticRelation {
    /// Both sides evaluated on `ν` built from `factors`.
    pub fn evaluate(&self, factors: &[CMatrix]) -> (Complex64, Complex64) {
        let nu = |k: NuIndex| nu_value(factors, k);
        (
            nu(self.lhs.0) * nu(self.lhs.1),
            nu(self.rhs.0) * nu(self.rhs.1),
        )
    }
}

fn digits(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = flat % d;
        flat /= d;
    }
    out
}

fn flatten(index: &[usize], dims: &[usize]) -> usize {
    index.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

/// `∏_n X^(n)[row_n, col_n]`.
pub fn nu_value(factors: &[CMatrix], k: NuIndex) -> Complex64 {
    let dims: Vec<usize> = factors.iter().map(|m| m.nrows()).collect();
    let (r, c) = (digits(k.row, &dims), digits(k.col, &dims));
    factors
        .iter()
        .enumerate()
        .map(|(n, m)| m[(r[n], c[n])])
        .product()
}

fn checked_variables(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::EmptyDims);
    }
    let volume = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&v| v > 0)
        .ok_or_else(|| Error::ScaleExceeded(format!("dims {dims:?}")))?;
    match volume.checked_mul(volume) {
        Some(v) if v <= MAX_VARIABLES => Ok(volume),
        _ => Err(Error::ScaleExceeded(format!(
            "{volume}^2 variables exceed {MAX_VARIABLES}"
        ))),
    }
}

fn ordered(a: NuIndex, b: NuIndex) -> (NuIndex, NuIndex) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Relations obtained by exchanging one party's `(row, col)` digit pair
/// between two `ν` monomials, deduplicated, in enumeration order. At most
/// `limit` relations are returned when given.
pub fn quadratic_relations(dims: &[usize], limit: Option<usize>) -> Result<Vec<QuadraticRelation>> {
    let volume = checked_variables(dims)?;
    let vars: Vec<NuIndex> = (0..volume)
        .flat_map(|row| (0..volume).map(move |col| NuIndex { row, col }))
        .collect();
    let split: Vec<(Vec<usize>, Vec<usize>)> = vars
        .iter()
        .map(|k| (digits(k.row, dims), digits(k.col, dims)))
        .collect();

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for a in 0..vars.len() {
        for b in a..vars.len() {
            for mode in 0..dims.len() {
                let (ra, ca) = &split[a];
                let (rb, cb) = &split[b];
                if ra[mode] == rb[mode] && ca[mode] == cb[mode] {
                    continue;
                }
                let (mut ra2, mut ca2, mut rb2, mut cb2) =
                    (ra.clone(), ca.clone(), rb.clone(), cb.clone());
                std::mem::swap(&mut ra2[mode], &mut rb2[mode]);
                std::mem::swap(&mut ca2[mode], &mut cb2[mode]);
                let lhs = ordered(vars[a], vars[b]);
                let rhs = ordered(
                    NuIndex {
                        row: flatten(&ra2, dims),
                        col: flatten(&ca2, dims),
                    },
                    NuIndex {
                        row: flatten(&rb2, dims),
                        col: flatten(&cb2, dims),
                    },
                );
                if lhs == rhs {
                    continue;
                }
                let key = if lhs <= rhs { (lhs, rhs) } else { (rhs, lhs) };
                if seen.insert(key) {
                    out.push(QuadraticRelation { lhs, rhs });
                    if limit.is_some_and(|l| out.len() >= l) {
                        return Ok(out);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Number of classes the full relation set leaves among the degree-2
/// products `ν_a ν_b`; each relation identifies two products.
pub fn independent_products(dims: &[usize]) -> Result<usize> {
    let relations = quadratic_relations(dims, None)?;
    let volume = checked_variables(dims)?;
    let vars = volume * volume;
    let mut id: HashMap<(NuIndex, NuIndex), usize> = HashMap::new();
    for a in 0..vars {
        for b in a..vars {
            let ka = NuIndex {
                row: a / volume,
                col: a % volume,
            };
            let kb = NuIndex {
                row: b / volume,
                col: b % volume,
            };
            let next = id.len();
            id.insert((ka, kb), next);
        }
    }
    let mut parent: Vec<usize> = (0..id.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut classes = id.len();
    for rel in &relations {
        let (x, y) = (id[&rel.lhs], id[&rel.rhs]);
        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
        if rx != ry {
            parent[rx] = ry;
            classes -= 1;
        }
    }
    Ok(classes)
}

/// Rows `Σ_i c_{j,i} ν_{j,i} = 0` with `c_{j,i} = e^{i(φ_{j_1}+…+φ_{j_N})} ω_i − ω'_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedSystem {
    pub dims: Vec<usize>,
    pub phases: Vec<Vec<f64>>,
    /// `coefficients[(j, i)] = c_{j,i}`; row `j` touches only the unknowns `ν_{j,·}`.
    pub coefficients: CMatrix,
}

impl LinearizedSystem {
    pub fn rows(&self) -> usize {
        self.coefficients.nrows()
    }

    pub fn unknowns(&self) -> usize {
        self.coefficients.len()
    }

    /// `ν_{j,i}` for given factors, laid out like `coefficients`.
    pub fn nu_from_factors(factors: &[CMatrix]) -> CMatrix {
        let mut acc = CMatrix::identity(1, 1);
        for m in factors {
            acc = acc.kronecker(m);
        }
        acc
    }

    /// Largest row residual `|Σ_i c_{j,i} ν_{j,i}|`.
    pub fn residual(&self, nu: &CMatrix) -> Result<f64> {
        if nu.shape() != self.coefficients.shape() {
            return Err(Error::ShapeMismatch(format!(
                "ν is {:?}, system is {:?}",
                nu.shape(),
                self.coefficients.shape()
            )));
        }
        Ok(self
            .coefficients
            .component_mul(nu)
            .row_iter()
            .map(|r| r.sum().norm())
            .fold(0.0, f64::max))
    }
}

pub fn build_linear_system(
    core_a: &StateTensor,
    core_b: &StateTensor,
    phases: &[Vec<f64>],
) -> Result<LinearizedSystem> {
    ensure_same_dims(core_a.dims(), core_b.dims())?;
    let dims = core_a.dims().to_vec();
    let phase_dims: Vec<usize> = phases.iter().map(Vec::len).collect();
    ensure_same_dims(&dims, &phase_dims)?;
    let volume = core_a.len();
    let coefficients = CMatrix::from_fn(volume, volume, |j, i| {
        let angle: f64 = digits(j, &dims)
            .iter()
            .enumerate()
            .map(|(n, &jn)| phases[n][jn])
            .sum();
        Complex64::from_polar(1.0, angle) * core_a.amplitudes()[i] - core_b.amplitudes()[i]
    });
    Ok(LinearizedSystem {
        dims,
        phases: phases.to_vec(),
        coefficients,
    })
}

/// Splits each unitary as `U = X† diag(e^{iφ}) X`.
pub fn conjugation_split(u: &LocalUnitarySet) -> (Vec<CMatrix>, Vec<Vec<f64>>) {
    u.matrices()
        .iter()
        .map(|m| {
            let schur = m.clone().schur();
            let (q, t) = schur.unpack();
            let phases = (0..t.nrows()).map(|k| t[(k, k)].arg()).collect();
            (q.adjoint(), phases)
        })
        .unzip()
}

/// Decision routine for states whose single-party marginals are all
/// maximally mixed.
///
/// Only the marginal-spectra certificate can refute; the search can confirm.
/// A found witness is also fed back through the linearized system at its own
/// conjugation phases, and the residual is reported as a diagnostic.
pub fn solve_fully_degenerate(
    t_a: &StateTensor,
    t_b: &StateTensor,
    opts: &CompareOptions,
) -> Result<Verdict> {
    ensure_same_dims(t_a.dims(), t_b.dims())?;
    for t in [t_a, t_b] {
        let ds = degeneracy_structure(&hosvd(t)?.sigma, opts.deg_tol);
        if !ds.is_fully_degenerate() {
            return Err(Error::NotFullyDegenerate);
        }
    }
    let mut diag = Diagnostics {
        stage: Some(Stage::FullyDegenerate),
        ..Diagnostics::default()
    };
    let max_subset = opts.marginal_max_subset.max(t_a.order() / 2);
    if let Some(cert) = marginal_spectra_certificate(t_a, t_b, opts.tol, max_subset)? {
        diag.stage = Some(Stage::Marginals);
        return Ok(Verdict::inequivalent(cert, diag));
    }

    let full = DegeneracyStructure::full(t_a.dims());
    let found = search_tensors(t_a, t_b, &full, opts.seed, opts.budget())?;
    diag.restarts_used = found.restarts_used;
    diag.iterations_used = found.iterations_used;
    diag.best_search_residual = Some(found.best_residual).filter(|r| r.is_finite());
    if let Some(w) = found.witness {
        if verify_witness(t_a, t_b, &w, WITNESS_TOL)? {
            let (factors, phases) = conjugation_split(&w.unitaries);
            let system = build_linear_system(t_a, t_b, &phases)?;
            diag.linear_screening_residual =
                Some(system.residual(&LinearizedSystem::nu_from_factors(&factors))?);
            return Ok(Verdict::equivalent(w, diag));
        }
    }
    diag.stage = Some(Stage::Exhausted);
    Ok(Verdict::undecided(diag))
}
