//! Dense complex state tensors, matrix unfoldings and local unitary action.
//!
//! Amplitudes are stored flat in row-major order over `(i1, ..., iN)`: the
//! first party's index varies slowest and the last party's fastest. All mode
//! arguments in this crate are 0-based; error messages report them 1-based.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance on `max |U†U - E|` when validating local unitaries.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Amplitudes of an `N`-partite pure state with party dimensions `(I1, ..., IN)`.
///
/// Normalization is not enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTensor {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl StateTensor {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expected = checked_volume(&dims)?;
        if amplitudes.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: amplitudes.len(),
            });
        }
        Ok(Self { dims, amplitudes })
    }

    /// Builds a tensor from real amplitudes.
    pub fn from_real(dims: Vec<usize>, amplitudes: &[f64]) -> Result<Self> {
        Self::new(
            dims,
            amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Tensor with amplitude `value` at each listed multi-index and zero elsewhere.
    pub fn from_entries(dims: Vec<usize>, entries: &[(&[usize], Complex64)]) -> Result<Self> {
        let len = checked_volume(&dims)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); len];
        let strides = strides(&dims);
        for (index, value) in entries {
            if index.len() != dims.len() || index.iter().zip(&dims).any(|(i, d)| i >= d) {
                return Err(Error::ShapeMismatch(format!(
                    "index {index:?} outside dims {dims:?}"
                )));
            }
            let flat: usize = index.iter().zip(&strides).map(|(i, s)| i * s).sum();
            amplitudes[flat] += *value;
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Amplitude at a 0-based multi-index.
    pub fn get(&self, index: &[usize]) -> Complex64 {
        let flat: usize = index
            .iter()
            .zip(strides(&self.dims))
            .map(|(i, s)| i * s)
            .sum();
        self.amplitudes[flat]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            dims: self.dims.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// Frobenius distance to a tensor of identical dims.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        ensure_same_dims(&self.dims, &other.dims)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// The order-(N-1) subtensor obtained by fixing index `mode` to `index`.
    pub fn slice(&self, mode: usize, index: usize) -> Result<StateTensor> {
        self.check_mode(mode)?;
        if index >= self.dims[mode] {
            return Err(Error::ShapeMismatch(format!(
                "slice index {} exceeds dimension {} of mode {}",
                index + 1,
                self.dims[mode],
                mode + 1
            )));
        }
        let outer: usize = self.dims[..mode].iter().product();
        let inner: usize = self.dims[mode + 1..].iter().product();
        let dim = self.dims[mode];
        let mut amplitudes = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let base = (o * dim + index) * inner;
            amplitudes.extend_from_slice(&self.amplitudes[base..base + inner]);
        }
        let mut dims: Vec<usize> = self.dims.clone();
        dims.remove(mode);
        if dims.is_empty() {
            dims.push(1);
        }
        Ok(StateTensor { dims, amplitudes })
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.order() {
            return Err(Error::ModeOutOfRange {
                mode: mode + 1,
                order: self.order(),
            });
        }
        Ok(())
    }
}

/// Matrix unfolding `Ψ_(n)` of a tensor along one mode.
///
/// Columns enumerate `(i_{n+1}, ..., i_N, i_1, ..., i_{n-1})` with the last
/// listed index varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldedMatrix {
    pub mode: usize,
    pub source_dims: Vec<usize>,
    pub matrix: CMatrix,
}

/// Ordered set of per-party unitaries, the n-th of size `I_n × I_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitarySet {
    matrices: Vec<CMatrix>,
}

impl LocalUnitarySet {
    /// Validates squareness and unitarity within [`UNITARITY_TOL`].
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        Self::with_tolerance(matrices, UNITARITY_TOL)
    }

    pub fn with_tolerance(matrices: Vec<CMatrix>, tol: f64) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::EmptyDims);
        }
        for (party, m) in matrices.iter().enumerate() {
            if !m.is_square() || m.nrows() == 0 {
                return Err(Error::ShapeMismatch(format!(
                    "matrix for party {} is {}x{}",
                    party + 1,
                    m.nrows(),
                    m.ncols()
                )));
            }
            let deviation = unitarity_deviation(m);
            if deviation >= tol {
                return Err(Error::NotUnitary {
                    party: party + 1,
                    deviation,
                });
            }
        }
        Ok(Self { matrices })
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self {
            matrices: dims.iter().map(|&d| CMatrix::identity(d, d)).collect(),
        }
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn into_matrices(self) -> Vec<CMatrix> {
        self.matrices
    }

    pub fn dims(&self) -> Vec<usize> {
        self.matrices.iter().map(|m| m.nrows()).collect()
    }

    /// Per-mode product `self[n] · other[n]`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        ensure_same_dims(&self.dims(), &other.dims())?;
        Ok(Self {
            matrices: self
                .matrices
                .iter()
                .zip(&other.matrices)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrices: self.matrices.iter().map(|m| m.adjoint()).collect(),
        }
    }

    /// Largest unitarity deviation over all parties.
    pub fn max_unitarity_deviation(&self) -> f64 {
        self.matrices
            .iter()
            .map(unitarity_deviation)
            .fold(0.0, f64::max)
    }

    /// Dense Kronecker product `U^(1) ⊗ ... ⊗ U^(N)` in the flat amplitude basis.
    pub fn kron(&self) -> CMatrix {
        let mut acc = CMatrix::identity(1, 1);
        for m in &self.matrices {
            acc = acc.kronecker(m);
        }
        acc
    }
}

/// `max |U†U - E|` entrywise.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn new_state_tensor(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<StateTensor> {
    StateTensor::new(dims, amplitudes)
}

/// Row-major strides for `dims`.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Mode order `(n+1, ..., N-1, 0, ..., n-1)` used for unfolding columns.
pub(crate) fn column_modes(mode: usize, order: usize) -> Vec<usize> {
    (mode + 1..order).chain(0..mode).collect()
}

fn checked_volume(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::EmptyDims);
    }
    let mut volume: usize = 1;
    for (party, &d) in dims.iter().enumerate() {
        if d == 0 {
            return Err(Error::ZeroDim { party: party + 1 });
        }
        volume = volume
            .checked_mul(d)
            .ok_or_else(|| Error::Overflow(format!("volume of {dims:?}")))?;
    }
    Ok(volume)
}

pub(crate) fn ensure_same_dims(a: &[usize], b: &[usize]) -> Result<()> {
    if a != b {
        return Err(Error::DimsMismatch {
            a: a.to_vec(),
            b: b.to_vec(),
        });
    }
    Ok(())
}

/// Visits every multi-index in flat (row-major) order.
pub(crate) fn for_each_index(dims: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total: usize = dims.iter().product();
    let mut index = vec![0usize; dims.len()];
    for flat in 0..total {
        f(flat, &index);
        for k in (0..dims.len()).rev() {
            index[k] += 1;
            if index[k] < dims[k] {
                break;
            }
            index[k] = 0;
        }
    }
}

/// Column of the mode-`mode` unfolding that holds multi-index `index`.
fn unfold_column(dims: &[usize], cols: &[usize], index: &[usize]) -> usize {
    cols.iter().fold(0, |acc, &m| acc * dims[m] + index[m])
}

pub fn unfold(t: &StateTensor, mode: usize) -> Result<UnfoldedMatrix> {
    t.check_mode(mode)?;
    let dims = t.dims();
    let rows = dims[mode];
    let ncols = t.len() / rows;
    let cols = column_modes(mode, t.order());
    let mut matrix = CMatrix::zeros(rows, ncols);
    for_each_index(dims, |flat, index| {
        let c = unfold_column(dims, &cols, index);
        matrix[(index[mode], c)] = t.amplitudes[flat];
    });
    Ok(UnfoldedMatrix {
        mode,
        source_dims: dims.to_vec(),
        matrix,
    })
}

/// Exact inverse of [`unfold`].
pub fn refold(m: &UnfoldedMatrix) -> Result<StateTensor> {
    let volume = checked_volume(&m.source_dims)?;
    let (rows, ncols) = m.matrix.shape();
    if m.mode >= m.source_dims.len() || rows * ncols != volume || rows != m.source_dims[m.mode] {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} matrix cannot refold into {:?} along mode {}",
            rows,
            ncols,
            m.source_dims,
            m.mode + 1
        )));
    }
    let dims = &m.source_dims;
    let cols = column_modes(m.mode, dims.len());
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); volume];
    for_each_index(dims, |flat, index| {
        let c = unfold_column(dims, &cols, index);
        amplitudes[flat] = m.matrix[(index[m.mode], c)];
    });
    StateTensor::new(dims.clone(), amplitudes)
}

/// Column-major stacking `[a11, ..., a_{I1,1}, a12, ...]`.
pub fn vectorize(m: &CMatrix) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(m.len());
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            out.push(m[(r, c)]);
        }
    }
    out
}

/// `⟨A, B⟩ = Σ b · conj(a)`, conjugate-linear in the first argument.
pub fn inner_product(a: &StateTensor, b: &StateTensor) -> Result<Complex64> {
    ensure_same_dims(a.dims(), b.dims())?;
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| y * x.conj())
        .sum())
}

/// Mode-`mode` product: `(M ×_n Ψ)_{.. i'_n ..} = Σ_{i_n} m_{i'_n i_n} ψ_{.. i_n ..}`.
///
/// `m` need not be unitary or square; its column count must equal `I_n`.
pub fn mode_product(t: &StateTensor, mode: usize, m: &CMatrix) -> Result<StateTensor> {
    t.check_mode(mode)?;
    let dim = t.dims[mode];
    if m.ncols() != dim {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} matrix cannot act on mode {} of dimension {}",
            m.nrows(),
            m.ncols(),
            mode + 1,
            dim
        )));
    }
    let out_dim = m.nrows();
    let outer: usize = t.dims[..mode].iter().product();
    let inner: usize = t.dims[mode + 1..].iter().product();
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; outer * out_dim * inner];
    for o in 0..outer {
        let src = &t.amplitudes[o * dim * inner..(o + 1) * dim * inner];
        let dst = &mut out[o * out_dim * inner..(o + 1) * out_dim * inner];
        for r in 0..out_dim {
            let row = &mut dst[r * inner..(r + 1) * inner];
            for k in 0..dim {
                let coeff = m[(r, k)];
                if coeff == zero {
                    continue;
                }
                let col = &src[k * inner..(k + 1) * inner];
                for (d, s) in row.iter_mut().zip(col) {
                    *d += coeff * s;
                }
            }
        }
    }
    let mut dims = t.dims.clone();
    dims[mode] = out_dim;
    Ok(StateTensor {
        dims,
        amplitudes: out,
    })
}

/// `(⊗_n U^(n)) Ψ`.
pub fn apply_local_unitaries(t: &StateTensor, u: &LocalUnitarySet) -> Result<StateTensor> {
    ensure_same_dims(t.dims(), &u.dims())?;
    let mut out = t.clone();
    for (mode, m) in u.matrices().iter().enumerate() {
        if is_identity(m) {
            continue;
        }
        out = mode_product(&out, mode, m)?;
    }
    Ok(out)
}

fn is_identity(m: &CMatrix) -> bool {
    (0..m.nrows()).all(|r| {
        (0..m.ncols()).all(|c| {
            let target = if r == c { 1.0 } else { 0.0 };
            m[(r, c)] == Complex64::new(target, 0.0)
        })
    })
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Seeded state with i.i.d. complex Gaussian amplitudes, normalized to unit norm.
pub fn random_state(dims: &[usize], seed: u64) -> Result<StateTensor> {
    let len = checked_volume(dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amplitudes: Vec<Complex64> = (0..len).map(|_| complex_normal(&mut rng)).collect();
    let t = StateTensor::new(dims.to_vec(), amplitudes)?;
    let norm = t.norm();
    Ok(t.scaled(Complex64::new(1.0 / norm, 0.0)))
}

/// Seeded Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary(dim: usize, seed: u64) -> Result<CMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_with(dim, &mut rng)
}

pub(crate) fn random_unitary_with(dim: usize, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    if dim == 0 {
        return Err(Error::BadDim(dim));
    }
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..dim {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    Ok(q)
}

/// One seeded Haar unitary per party.
pub fn random_local_unitaries(dims: &[usize], seed: u64) -> Result<LocalUnitarySet> {
    checked_volume(dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matrices = dims
        .iter()
        .map(|&d| random_unitary_with(d, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    LocalUnitarySet::new(matrices)
}
