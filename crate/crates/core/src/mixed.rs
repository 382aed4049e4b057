//! Mixed states via purification with an extra leading party.
//!
//! `ρ = Σ_k λ_k |v_k⟩⟨v_k|` is mapped to `Ψ_0 = Σ_k √λ_k |k⟩|v_k⟩`, with party 0
//! of dimension equal to the numerical rank. Two density matrices are LU
//! equivalent exactly when their purifications are, with party 0 free.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decomposition::{hosvd, CanonicalForm};
use crate::equivalence::verdict::{Certificate, Diagnostics, Outcome, Stage, Verdict, Witness};
use crate::equivalence::{compare_pure, CompareOptions, WITNESS_TOL};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues};
use crate::tensor::{ensure_same_dims, random_unitary_with, CMatrix, LocalUnitarySet, StateTensor};

/// Eigenvalues at or below this are dropped when purifying.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Tolerance for the Hermiticity, trace and positivity checks.
pub const VALIDATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates shape, Hermiticity, unit trace and positivity.
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let rho = Self::unchecked(dims, matrix)?;
        let m = &rho.matrix;
        let asym = (m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if asym > VALIDATION_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let trace = m.trace().re;
        if (trace - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::NotTraceOne(trace));
        }
        let lowest = hermitian_eigenvalues(m).last().copied().unwrap_or(0.0);
        if lowest < -VALIDATION_TOL {
            return Err(Error::NotPsd(lowest));
        }
        Ok(rho)
    }

    /// Shape checks only.
    fn unchecked(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptyDims);
        }
        if let Some(party) = dims.iter().position(|&d| d == 0) {
            return Err(Error::ZeroDim { party });
        }
        let volume: usize = dims.iter().product();
        if matrix.nrows() != volume || matrix.ncols() != volume {
            return Err(Error::ShapeMismatch(format!(
                "density matrix is {}x{}, dims {:?} need {volume}x{volume}",
                matrix.nrows(),
                matrix.ncols(),
                dims
            )));
        }
        Ok(Self { dims, matrix })
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn from_pure(t: &StateTensor) -> Result<Self> {
        let norm_sqr = t.norm_sqr();
        if norm_sqr == 0.0 {
            return Err(Error::RankZero);
        }
        let v = CMatrix::from_column_slice(t.len(), 1, t.amplitudes());
        Self::unchecked(
            t.dims().to_vec(),
            &v * v.adjoint() / Complex64::new(norm_sqr, 0.0),
        )
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `(⊗U) ρ (⊗U)†`.
    pub fn conjugate_local(&self, u: &LocalUnitarySet) -> Result<Self> {
        ensure_same_dims(&self.dims, &u.dims())?;
        let k = u.kron();
        Ok(Self {
            dims: self.dims.clone(),
            matrix: &k * &self.matrix * k.adjoint(),
        })
    }

    /// Frobenius distance.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        ensure_same_dims(&self.dims, &other.dims)?;
        Ok((&self.matrix - &other.matrix).norm())
    }
}

pub fn new_density_matrix(dims: Vec<usize>, matrix: CMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(dims, matrix)
}

/// Seeded density matrix `G G† / Tr(G G†)` with `G` a complex Gaussian
/// matrix of `rank` columns.
pub fn random_density_matrix(dims: &[usize], rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 {
        return Err(Error::RankZero);
    }
    let volume: usize = dims.iter().product();
    if volume == 0 {
        return Err(Error::BadDim(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = volume.max(rank);
    let u = random_unitary_with(size, &mut rng)?;
    let v = random_unitary_with(size, &mut rng)?;
    let g = (u + v * Complex64::new(0.5, 0.5))
        .view((0, 0), (volume, rank))
        .into_owned();
    let m = &g * g.adjoint();
    let trace = m.trace();
    DensityMatrix::new(dims.to_vec(), m / trace)
}

/// `Ψ_0` with dims `(r, I_1, ..., I_N)` and the kept eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Purification {
    pub psi0: StateTensor,
    pub weights: Vec<f64>,
}

pub fn purify(rho: &DensityMatrix) -> Result<Purification> {
    purify_with(rho, DEFAULT_RANK_TOL)
}

/// Keeps eigenvalues above `rank_tol`, largest first; eigenvectors carry the
/// same phase convention as the mode unitaries.
pub fn purify_with(rho: &DensityMatrix, rank_tol: f64) -> Result<Purification> {
    let (values, vectors) = hermitian_eigen(&rho.matrix);
    let rank = values.iter().take_while(|&&v| v > rank_tol).count();
    if rank == 0 {
        return Err(Error::RankZero);
    }
    let volume = rho.matrix.nrows();
    let mut amplitudes = Vec::with_capacity(rank * volume);
    for (k, value) in values.iter().take(rank).enumerate() {
        let scale = value.sqrt();
        amplitudes.extend(vectors.column(k).iter().map(|z| z * scale));
    }
    let mut dims = vec![rank];
    dims.extend_from_slice(&rho.dims);
    Ok(Purification {
        psi0: StateTensor::new(dims, amplitudes)?,
        weights: values[..rank].to_vec(),
    })
}

/// `Tr_0 |Ψ⟩⟨Ψ|`; the trace equals `‖Ψ‖²` and is not renormalized.
pub fn partial_trace_0(psi0: &StateTensor) -> Result<DensityMatrix> {
    if psi0.order() < 2 {
        return Err(Error::SingleParty);
    }
    let rank = psi0.dims()[0];
    let volume = psi0.len() / rank;
    let m = CMatrix::from_row_slice(rank, volume, psi0.amplitudes());
    DensityMatrix::unchecked(psi0.dims()[1..].to_vec(), m.transpose() * m.conjugate())
}

/// Reduced canonical state `Υ = Tr_0 |Ω_0⟩⟨Ω_0|` (unit trace) and the
/// canonical form of the purification.
pub fn canonical_mixed(rho: &DensityMatrix) -> Result<(DensityMatrix, CanonicalForm)> {
    let p = purify(rho)?;
    let cf = hosvd(&p.psi0)?;
    let reduced = partial_trace_0(&cf.core)?;
    let trace = reduced.matrix.trace();
    let upsilon = DensityMatrix::unchecked(reduced.dims, reduced.matrix / trace)?;
    Ok((upsilon, cf))
}

/// LU equivalence of density matrices through their purifications.
///
/// The returned witness acts on parties `1..=N` only and maps `rho_a` to
/// `rho_b` by conjugation; its residual is the relative Frobenius distance.
pub fn compare_mixed(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    opts: &CompareOptions,
) -> Result<Verdict> {
    ensure_same_dims(&rho_a.dims, &rho_b.dims)?;
    let pa = purify(rho_a)?;
    let pb = purify(rho_b)?;
    if pa.weights.len() != pb.weights.len() {
        let cert = Certificate::Spectrum {
            rank_a: pa.weights.len(),
            rank_b: pb.weights.len(),
        };
        let diag = Diagnostics {
            stage: Some(Stage::Sigma),
            ..Diagnostics::default()
        };
        return Ok(Verdict::inequivalent(cert, diag));
    }
    let mut verdict = compare_pure(&pa.psi0, &pb.psi0, opts)?;
    if verdict.outcome != Outcome::Equivalent {
        return Ok(verdict);
    }
    let Some(full) = verdict.witness.take() else {
        return Ok(Verdict::undecided(verdict.diagnostics));
    };
    let local = LocalUnitarySet::new(full.unitaries.into_matrices().split_off(1))?;
    let residual = rho_a.conjugate_local(&local)?.distance(rho_b)? / rho_a.matrix.norm();
    if residual > WITNESS_TOL {
        verdict.outcome = Outcome::Undecided;
        return Ok(verdict);
    }
    verdict.witness = Some(Witness {
        unitaries: local,
        residual,
    });
    Ok(verdict)
}
