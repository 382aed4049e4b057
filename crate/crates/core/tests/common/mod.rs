#![allow(dead_code)]

use lucanon::{CMatrix, DensityMatrix, StateTensor};
use num_complex::Complex64;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Three-qubit state whose mode-1 unfolding is the printed 2x4 matrix.
pub fn three_qubit_example() -> StateTensor {
    StateTensor::from_real(
        vec![2, 2, 2],
        &[
            0.0260603, 1.05491, -3.69051, 0.437711, 1.25266, 1.07259, 3.2378, 1.5625,
        ],
    )
    .unwrap()
}

pub const THREE_QUBIT_SIGMA: [[f64; 3]; 2] =
    [[5.03906, 5.31586, 5.17055], [2.27534, 1.5202, 1.95825]];

pub const THREE_QUBIT_CORE_ABS: [[f64; 4]; 2] = [
    [5.01792, 0.2815, 0.354882, 0.0862116],
    [0.19519, 1.72088, 1.17941, 0.886924],
];

/// The printed four-qubit pair; `flipped` negates the last amplitude.
pub fn four_qubit_example(flipped: bool) -> StateTensor {
    let s = 10f64.sqrt();
    let last = if flipped { -2.0 } else { 2.0 };
    StateTensor::from_entries(
        vec![2, 2, 2, 2],
        &[
            (&[0, 0, 0, 0], c(1.0 / s)),
            (&[1, 0, 0, 1], c(1.0 / s)),
            (&[0, 1, 1, 0], c(2.0 / s)),
            (&[1, 1, 1, 1], c(last / s)),
        ],
    )
    .unwrap()
}

pub fn ghz(n: usize) -> StateTensor {
    let h = c(std::f64::consts::FRAC_1_SQRT_2);
    let zeros = vec![0; n];
    let ones = vec![1; n];
    StateTensor::from_entries(vec![2; n], &[(&zeros, h), (&ones, h)]).unwrap()
}

/// `(|0…0⟩ + e^{iφ}|1…1⟩)/√2`.
pub fn twisted_ghz(n: usize, phi: f64) -> StateTensor {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let zeros = vec![0; n];
    let ones = vec![1; n];
    StateTensor::from_entries(
        vec![2; n],
        &[(&zeros, c(h)), (&ones, Complex64::from_polar(h, phi))],
    )
    .unwrap()
}

/// `(|0000⟩ + |0011⟩ + |1100⟩ − |1111⟩)/2`.
pub fn cluster4() -> StateTensor {
    StateTensor::from_entries(
        vec![2, 2, 2, 2],
        &[
            (&[0, 0, 0, 0], c(0.5)),
            (&[0, 0, 1, 1], c(0.5)),
            (&[1, 1, 0, 0], c(0.5)),
            (&[1, 1, 1, 1], c(-0.5)),
        ],
    )
    .unwrap()
}

/// `p|Φ⟩⟨Φ| + (1 − p) E/4` on two qubits.
pub fn isotropic(p: f64) -> DensityMatrix {
    let mut m = CMatrix::identity(4, 4) * c((1.0 - p) / 4.0);
    for &r in &[0, 3] {
        for &col in &[0, 3] {
            m[(r, col)] += c(p / 2.0);
        }
    }
    DensityMatrix::new(vec![2, 2], m).unwrap()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
