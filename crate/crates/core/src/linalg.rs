//! Small dense linear-algebra kernels: one-sided Jacobi row orthogonalization,
//! Hermitian eigendecomposition with a fixed phase convention, and polar factors.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::CMatrix;

/// Relative off-diagonal threshold below which a row pair counts as orthogonal.
const JACOBI_TOL: f64 = 1e-14;
/// Absolute threshold, relative to `‖A‖²`, for rows that are rounding noise.
const JACOBI_FLOOR: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 80;
/// Relative gap required before the sort reorders two singular values.
const SORT_GAP: f64 = 1e-12;

/// Result of orthogonalizing the rows of `A` from the left.
#[derive(Debug, Clone)]
pub struct RowOrthogonalization {
    /// Unitary `U` with `U·A` having mutually orthogonal rows.
    pub unitary: CMatrix,
    /// Row norms of `U·A`, non-increasing.
    pub norms: Vec<f64>,
    /// `U·A`.
    pub rotated: CMatrix,
}

/// One-sided (Hestenes) Jacobi on the rows of `a`.
///
/// Rows that are already orthogonal are left untouched, so a matrix whose rows
/// are orthogonal and sorted by norm comes back with `U = E`.
pub fn orthogonalize_rows(a: &CMatrix, mode: usize) -> Result<RowOrthogonalization> {
    let rows = a.nrows();
    let mut work = a.clone();
    let mut u = CMatrix::identity(rows, rows);
    let floor = JACOBI_FLOOR * a.norm_squared();

    let mut converged = rows < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated_any = false;
        for p in 0..rows {
            for q in p + 1..rows {
                let alpha = row_norm_sqr(&work, p);
                let beta = row_norm_sqr(&work, q);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = row_dot(&work, p, q);
                let g = gamma.norm();
                if g <= JACOBI_TOL * (alpha * beta).sqrt() || g <= floor {
                    continue;
                }
                rotated_any = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin = cos * t;
                rotate_rows(&mut work, p, q, cos, sin, phase);
                rotate_rows(&mut u, p, q, cos, sin, phase);
            }
        }
        converged = !rotated_any;
    }
    if !converged {
        return Err(Error::SvdFailure { mode: mode + 1 });
    }

    let norms: Vec<f64> = (0..rows).map(|r| row_norm_sqr(&work, r).sqrt()).collect();
    let order = sorted_order(&norms);
    let mut unitary = CMatrix::zeros(rows, rows);
    let mut rotated = CMatrix::zeros(rows, a.ncols());
    for (dst, &src) in order.iter().enumerate() {
        unitary.set_row(dst, &u.row(src));
        rotated.set_row(dst, &work.row(src));
    }
    for r in 0..rows {
        let phase = leading_phase(unitary.row(r).iter().copied());
        let fix = phase.conj();
        for c in 0..rows {
            unitary[(r, c)] *= fix;
        }
        for c in 0..rotated.ncols() {
            rotated[(r, c)] *= fix;
        }
    }
    let norms = order.iter().map(|&i| norms[i]).collect();
    Ok(RowOrthogonalization {
        unitary,
        norms,
        rotated,
    })
}

fn row_norm_sqr(m: &CMatrix, r: usize) -> f64 {
    m.row(r).iter().map(|z| z.norm_sqr()).sum()
}

/// `Σ conj(m_p) m_q`.
fn row_dot(m: &CMatrix, p: usize, q: usize) -> Complex64 {
    (0..m.ncols()).map(|c| m[(p, c)].conj() * m[(q, c)]).sum()
}

fn rotate_rows(m: &mut CMatrix, p: usize, q: usize, cos: f64, sin: f64, phase: Complex64) {
    for c in 0..m.ncols() {
        let a = m[(p, c)];
        let b = m[(q, c)];
        m[(p, c)] = a * cos - b * phase.conj() * sin;
        m[(q, c)] = a * phase * sin + b * cos;
    }
}

/// Stable non-increasing order that ignores relative differences below [`SORT_GAP`].
fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 {
            let (prev, cur) = (values[order[j - 1]], values[order[j]]);
            if cur > prev + SORT_GAP * prev.max(cur) {
                order.swap(j - 1, j);
                j -= 1;
            } else {
                break;
            }
        }
    }
    order
}

/// Unit phase of the largest-magnitude entry (first index on ties).
pub fn leading_phase(entries: impl Iterator<Item = Complex64>) -> Complex64 {
    let entries: Vec<Complex64> = entries.collect();
    let max = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let lead = entries
        .iter()
        .find(|z| z.norm() >= max * (1.0 - SORT_GAP))
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    lead / lead.norm()
}

/// Eigenvalues in non-increasing order with eigenvectors as matching columns;
/// each eigenvector's largest entry is made real positive.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let fix = leading_phase(col.iter().copied()).conj();
        for r in 0..n {
            vectors[(r, dst)] = col[r] * fix;
        }
    }
    (values, vectors)
}

/// Eigenvalues only, non-increasing.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Unitary `S` maximizing `Re Tr(S·K)`; for invertible `K` this is the
/// unitary polar factor of `K†`.
pub fn maximizing_unitary(k: &CMatrix) -> CMatrix {
    if k.nrows() == 1 {
        let z = k[(0, 0)];
        let s = if z.norm() > 0.0 {
            z.conj() / z.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        return CMatrix::from_element(1, 1, s);
    }
    let svd = k.clone().svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u * v_t).adjoint(),
        _ => CMatrix::identity(k.nrows(), k.ncols()),
    }
}

/// Nearest unitary to `m` in Frobenius norm.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    maximizing_unitary(&m.adjoint())
}
