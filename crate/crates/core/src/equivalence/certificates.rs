//! Inequivalence certificates built from LU invariants.

use crate::decomposition::DegeneracyStructure;
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::tensor::{ensure_same_dims, for_each_index, CMatrix, StateTensor};

use super::segments::Segment;
use super::verdict::Certificate;

/// Compares segment norms and the moduli of inner products between
/// comparable segment pairs.
///
/// Two segments are comparable when, in every mode, they either sit in the
/// same block or both sit in blocks of size one. The non-phase factors of a
/// block symmetry then act identically on both, so `|⟨ω_r, ω_s⟩|` is invariant.
pub fn gram_certificate(
    segs_a: &[Segment],
    segs_b: &[Segment],
    ds: &DegeneracyStructure,
    tol: f64,
) -> Result<Option<Certificate>> {
    if segs_a.len() != segs_b.len() {
        return Err(Error::StructureMismatch(format!(
            "{} vs {} segments",
            segs_a.len(),
            segs_b.len()
        )));
    }
    for (a, b) in segs_a.iter().zip(segs_b) {
        if a.blocks != b.blocks || a.values.len() != b.values.len() {
            return Err(Error::StructureMismatch(format!(
                "segment blocks {:?} vs {:?}",
                a.blocks, b.blocks
            )));
        }
        if a.blocks.len() != ds.order() {
            return Err(Error::StructureMismatch(format!(
                "segment has {} block indices for {} modes",
                a.blocks.len(),
                ds.order()
            )));
        }
    }
    let total = |segs: &[Segment]| segs.iter().map(|s| s.norm().powi(2)).sum::<f64>().sqrt();
    let scale = total(segs_a).max(total(segs_b));

    for (r, (a, b)) in segs_a.iter().zip(segs_b).enumerate() {
        let (na, nb) = (a.norm(), b.norm());
        if (na - nb).abs() > tol * scale {
            return Ok(Some(Certificate::SegmentNorm {
                segment: r,
                a: na,
                b: nb,
            }));
        }
    }

    for r in 0..segs_a.len() {
        for s in r + 1..segs_a.len() {
            if !comparable(&segs_a[r], &segs_a[s], ds) {
                continue;
            }
            let ga = segs_a[r].inner(&segs_a[s]).norm();
            let gb = segs_b[r].inner(&segs_b[s]).norm();
            if (ga - gb).abs() > tol * scale * scale {
                return Ok(Some(Certificate::GramModulus {
                    first: r,
                    second: s,
                    a: ga,
                    b: gb,
                }));
            }
        }
    }
    Ok(None)
}

fn comparable(a: &Segment, b: &Segment, ds: &DegeneracyStructure) -> bool {
    (0..ds.order()).all(|m| {
        let blocks = ds.blocks(m);
        a.blocks[m] == b.blocks[m]
            || (blocks[a.blocks[m]].size == 1 && blocks[b.blocks[m]].size == 1)
    })
}

/// Spectrum (non-increasing) of the reduced state on `parties`.
pub fn reduced_spectrum(t: &StateTensor, parties: &[usize]) -> Result<Vec<f64>> {
    let dims = t.dims();
    for &p in parties {
        t.check_mode(p)?;
    }
    let kept: usize = parties.iter().map(|&p| dims[p]).product();
    let rest = t.len() / kept;
    let others: Vec<usize> = (0..dims.len()).filter(|m| !parties.contains(m)).collect();
    let mut m = CMatrix::zeros(kept, rest);
    for_each_index(dims, |flat, index| {
        let row = parties.iter().fold(0, |acc, &p| acc * dims[p] + index[p]);
        let col = others.iter().fold(0, |acc, &p| acc * dims[p] + index[p]);
        m[(row, col)] = t.amplitudes()[flat];
    });
    let rho = &m * m.adjoint();
    Ok(hermitian_eigenvalues(&rho))
}

/// Compares reduced-state spectra over all party subsets of size
/// `1..=max_subset` (capped at `N - 1`).
pub fn marginal_spectra_certificate(
    a: &StateTensor,
    b: &StateTensor,
    tol: f64,
    max_subset: usize,
) -> Result<Option<Certificate>> {
    ensure_same_dims(a.dims(), b.dims())?;
    let n = a.order();
    let scale = a.norm_sqr().max(b.norm_sqr());
    for size in 1..=max_subset.min(n.saturating_sub(1)) {
        for parties in subsets(n, size) {
            let sa = reduced_spectrum(a, &parties)?;
            let sb = reduced_spectrum(b, &parties)?;
            let deviation = sa
                .iter()
                .zip(&sb)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            if deviation > tol * scale {
                return Ok(Some(Certificate::MarginalSpectra {
                    parties,
                    a: sa,
                    b: sb,
                }));
            }
        }
    }
    Ok(None)
}

/// All `size`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for k in start..n {
            cur.push(k);
            rec(k + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}
