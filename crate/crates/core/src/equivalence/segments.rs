//! Segments of the vectorized core: the pieces acted on independently by the
//! diagonal blocks of the symmetry group.

use num_complex::Complex64;

use crate::decomposition::{CanonicalForm, DegeneracyStructure};
use crate::error::{Error, Result};
use crate::tensor::{column_modes, StateTensor};

/// One block combination `(b_1, ..., b_N)` and the core entries it covers.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    /// Block index per mode, in mode order `0..N`.
    pub blocks: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl Segment {
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Σ ω'_k conj(ω_k)` with `self` conjugated.
    pub fn inner(&self, other: &Segment) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| b * a.conj())
            .sum()
    }
}

/// Segments of `vec(Ω_(N))`, i.e. with the last mode as the vectorization mode.
pub fn segment_decompose(cf: &CanonicalForm, ds: &DegeneracyStructure) -> Result<Vec<Segment>> {
    let last = cf.core.order() - 1;
    segments_of(&cf.core, ds, last)
}

/// Segments of `vec(Ω_(n))` for vectorization mode `vec_mode`.
///
/// The vector index order of `vec(Ω_(n))` is the mode cycle
/// `(n+1, ..., N, 1, ..., n)` with the last entry fastest. Segments are listed
/// lexicographically over their block indices in that cycle order, and within
/// a segment the local slots follow the same order.
pub fn segments_of(
    core: &StateTensor,
    ds: &DegeneracyStructure,
    vec_mode: usize,
) -> Result<Vec<Segment>> {
    core.check_mode(vec_mode)?;
    if ds.dims() != core.dims() {
        return Err(Error::StructureMismatch(format!(
            "blocks cover {:?}, core has dims {:?}",
            ds.dims(),
            core.dims()
        )));
    }
    let order = core.order();
    let mut cycle = column_modes(vec_mode, order);
    cycle.push(vec_mode);

    let block_counts: Vec<usize> = cycle.iter().map(|&m| ds.blocks(m).len()).collect();
    let mut segments = Vec::new();
    for_each_counter(&block_counts, |choice| {
        let mut blocks = vec![0; order];
        for (pos, &m) in cycle.iter().enumerate() {
            blocks[m] = choice[pos];
        }
        let sizes: Vec<usize> = cycle
            .iter()
            .map(|&m| ds.blocks(m)[blocks[m]].size)
            .collect();
        let mut values = Vec::with_capacity(sizes.iter().product());
        let mut index = vec![0; order];
        for_each_counter(&sizes, |slot| {
            for (pos, &m) in cycle.iter().enumerate() {
                index[m] = ds.blocks(m)[blocks[m]].start + slot[pos];
            }
            values.push(core.get(&index));
        });
        segments.push(Segment { blocks, values });
    });
    Ok(segments)
}

/// Odometer over `0..limits[k]` with the last position fastest.
fn for_each_counter(limits: &[usize], mut f: impl FnMut(&[usize])) {
    if limits.contains(&0) {
        return;
    }
    let mut counter = vec![0; limits.len()];
    loop {
        f(&counter);
        let mut k = limits.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            counter[k] += 1;
            if counter[k] < limits[k] {
                break;
            }
            counter[k] = 0;
        }
    }
}
