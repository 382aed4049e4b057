mod common;

use common::*;
use lucanon::{
    compare_pure, degeneracy_structure, gram_certificate, hosvd, segments_of, Block, Certificate,
    CompareOptions, DegeneracyStructure, Outcome, DEFAULT_CLUSTER_TOL,
};
use num_complex::Complex64;

#[test]
fn three_qubit_sigma_and_core_magnitudes() {
    let cf = hosvd(&three_qubit_example()).unwrap();
    for (row, expected) in THREE_QUBIT_SIGMA.iter().enumerate() {
        for (mode, &value) in expected.iter().enumerate() {
            let got = cf.sigma.column(mode)[row];
            assert!(
                (got - value).abs() < 1e-4,
                "σ[{row}][{mode}] = {got}, expected {value}"
            );
        }
    }
    for (i1, row) in THREE_QUBIT_CORE_ABS.iter().enumerate() {
        for (col, &value) in row.iter().enumerate() {
            let got = cf.core.amplitudes()[i1 * 4 + col].norm();
            assert!(
                (got - value).abs() < 1e-3,
                "|Ω|[{i1}][{col}] = {got}, expected {value}"
            );
        }
    }
}

#[test]
fn four_qubit_sigma_squared_table() {
    let expected = [[0.5, 0.8, 0.8, 0.5], [0.5, 0.2, 0.2, 0.5]];
    for flipped in [false, true] {
        let sq = hosvd(&four_qubit_example(flipped)).unwrap().sigma.squared();
        for (row, values) in expected.iter().enumerate() {
            for (mode, &v) in values.iter().enumerate() {
                assert!((sq[mode][row] - v).abs() < 1e-12);
            }
        }
    }
}

fn printed_structure() -> DegeneracyStructure {
    let unit = |start| Block {
        start,
        size: 1,
        value: 0.0,
    };
    let pair = vec![Block {
        start: 0,
        size: 2,
        value: 0.0,
    }];
    DegeneracyStructure::new(vec![
        pair.clone(),
        vec![unit(0), unit(1)],
        vec![unit(0), unit(1)],
        pair,
    ])
}

fn scaled(values: &[f64]) -> Vec<Complex64> {
    values
        .iter()
        .map(|v| Complex64::new(v / 10f64.sqrt(), 0.0))
        .collect()
}

fn printed_segments(flipped: bool) -> Vec<Vec<Complex64>> {
    let last = if flipped { -2.0 } else { 2.0 };
    vec![
        scaled(&[1.0, 0.0, 0.0, 1.0]),
        scaled(&[0.0; 4]),
        scaled(&[0.0; 4]),
        scaled(&[2.0, 0.0, 0.0, last]),
    ]
}

fn assert_segments(got: &[lucanon::Segment], expected: &[Vec<Complex64>]) {
    assert_eq!(got.len(), expected.len());
    for (g, e) in got.iter().zip(expected) {
        assert_eq!(g.values.len(), e.len());
        for (x, y) in g.values.iter().zip(e) {
            assert!((x - y).norm() < 1e-12, "{:?} vs {:?}", g.values, e);
        }
    }
}

#[test]
fn four_qubit_segments_with_first_mode_vectorization() {
    for flipped in [false, true] {
        let printed = four_qubit_example(flipped);
        let segs = segments_of(&printed, &printed_structure(), 0).unwrap();
        assert_segments(&segs, &printed_segments(flipped));

        // the sorted core reverses the block order in modes 2 and 3
        let cf = hosvd(&printed).unwrap();
        let ds = degeneracy_structure(&cf.sigma, DEFAULT_CLUSTER_TOL);
        let sizes: Vec<Vec<usize>> = (0..4).map(|m| ds.block_sizes(m)).collect();
        assert_eq!(sizes, vec![vec![2], vec![1, 1], vec![1, 1], vec![2]]);
        let canonical = segments_of(&cf.core, &ds, 0).unwrap();
        let mut reversed = printed_segments(flipped);
        reversed.reverse();
        assert_segments(&canonical, &reversed);
    }
}

#[test]
fn four_qubit_gram_moduli_differ() {
    let a = hosvd(&four_qubit_example(false)).unwrap();
    let b = hosvd(&four_qubit_example(true)).unwrap();
    let ds = degeneracy_structure(&a.sigma, DEFAULT_CLUSTER_TOL);
    for vec_mode in [0, 3] {
        let sa = segments_of(&a.core, &ds, vec_mode).unwrap();
        let sb = segments_of(&b.core, &ds, vec_mode).unwrap();
        match gram_certificate(&sa, &sb, &ds, 1e-9).unwrap() {
            Some(Certificate::GramModulus { a, b, .. }) => {
                assert!((a - 0.4).abs() < 1e-12 && b.abs() < 1e-12, "{a} vs {b}");
            }
            other => panic!("expected GramModulus, got {other:?}"),
        }
    }
}

#[test]
fn four_qubit_pair_is_inequivalent() {
    let a = four_qubit_example(false);
    let b = four_qubit_example(true);
    for vec_mode in [None, Some(0)] {
        let opts = CompareOptions {
            segment_vec_mode: vec_mode,
            ..CompareOptions::default()
        };
        for (x, y) in [(&a, &b), (&b, &a)] {
            let v = compare_pure(x, y, &opts).unwrap();
            assert_eq!(v.outcome, Outcome::Inequivalent);
            assert_eq!(v.certificate_name(), Some("GramModulus"));
        }
    }
}

#[test]
fn four_qubit_search_alone_finds_nothing() {
    let opts = CompareOptions {
        strategy: lucanon::Strategy::Search,
        restarts: 8,
        iterations: 200,
        ..CompareOptions::default()
    };
    let v = compare_pure(&four_qubit_example(false), &four_qubit_example(true), &opts).unwrap();
    assert_eq!(v.outcome, Outcome::Undecided);
    assert!(v.diagnostics.best_search_residual.unwrap() > 1e-3);
}
