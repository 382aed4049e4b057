//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints a PASS or FAIL line; exits non-zero if any fail.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use lucanon::{
    apply_local_unitaries, compare_mixed, compare_pure, count_products, degeneracy_structure,
    hosvd, independent_products, inner_product, partial_trace_0, purify, quadratic_relations,
    random_block_symmetry, random_density_matrix, random_local_unitaries, random_state,
    segments_of, Block, CMatrix, CompareOptions, DegeneracyStructure, DensityMatrix,
    LinearizedSystem, Outcome, Stage, StateTensor, Strategy, Verdict, DEFAULT_CLUSTER_TOL,
};
use lucanon_cli::files::{read_document, Document};
use lucanon_cli::report::VerdictReport;
use num_complex::Complex64;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn lucanon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lucanon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ghz(n: usize) -> StateTensor {
    let h = c(std::f64::consts::FRAC_1_SQRT_2);
    StateTensor::from_entries(vec![2; n], &[(&vec![0; n], h), (&vec![1; n], h)]).unwrap()
}

fn twisted_ghz(n: usize, phi: f64) -> StateTensor {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateTensor::from_entries(
        vec![2; n],
        &[
            (&vec![0; n], c(h)),
            (&vec![1; n], Complex64::from_polar(h, phi)),
        ],
    )
    .unwrap()
}

fn cluster4() -> StateTensor {
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

fn isotropic(p: f64) -> DensityMatrix {
    let mut m = CMatrix::identity(4, 4) * c((1.0 - p) / 4.0);
    for r in [0, 3] {
        for col in [0, 3] {
            m[(r, col)] += c(p / 2.0);
        }
    }
    DensityMatrix::new(vec![2, 2], m).unwrap()
}

/// Dims cycling through {2,3}^3 and {2}^4.
fn suite_dims(seed: u64) -> Vec<usize> {
    match seed % 9 {
        8 => vec![2, 2, 2, 2],
        k => (0..3)
            .map(|bit| if k >> bit & 1 == 1 { 3 } else { 2 })
            .collect(),
    }
}

fn witness_residual(a: &StateTensor, b: &StateTensor, v: &Verdict) -> f64 {
    let w = v
        .witness
        .as_ref()
        .expect("equivalent verdict carries a witness");
    apply_local_unitaries(a, &w.unitaries)
        .unwrap()
        .distance(b)
        .unwrap()
        / a.norm()
}

fn example_one() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("canon.json");
    let out = lucanon(&[
        "canon",
        data("three_qubit.json").to_str().unwrap(),
        "-o",
        out_path.to_str().unwrap(),
    ]);
    let elapsed = start.elapsed();
    ensure(out.status.code() == Some(0), || {
        format!("exit {:?}", out.status.code())
    })?;

    let expected_sigma = [[5.03906, 5.31586, 5.17055], [2.27534, 1.5202, 1.95825]];
    let stdout = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = stdout
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect();
    let mut sigma_err: f64 = 0.0;
    for (row, values) in expected_sigma.iter().enumerate() {
        for (mode, v) in values.iter().enumerate() {
            sigma_err = sigma_err.max((rows[row][mode] - v).abs());
        }
    }
    ensure(sigma_err < 1e-4, || format!("Σ off by {sigma_err}"))?;

    let expected_core = [
        [5.01792, 0.2815, 0.354882, 0.0862116],
        [0.19519, 1.72088, 1.17941, 0.886924],
    ];
    let Document::Canonical { core, .. } = read_document(&out_path).unwrap() else {
        return Err("canonical document expected".into());
    };
    let mut core_err: f64 = 0.0;
    for (i1, values) in expected_core.iter().enumerate() {
        for (col, v) in values.iter().enumerate() {
            let [re, im] = core[i1 * 4 + col];
            core_err = core_err.max((re.hypot(im) - v).abs());
        }
    }
    ensure(core_err < 1e-3, || format!("|core| off by {core_err}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "Σ err {sigma_err:.1e}, |core| err {core_err:.1e}, {elapsed:.2?}"
    ))
}

fn printed_segments(flipped: bool) -> Vec<Vec<Complex64>> {
    let s = 10f64.sqrt();
    let last = if flipped { -2.0 } else { 2.0 };
    let seg = |v: [f64; 4]| v.iter().map(|x| c(x / s)).collect::<Vec<_>>();
    vec![
        seg([1.0, 0.0, 0.0, 1.0]),
        seg([0.0; 4]),
        seg([0.0; 4]),
        seg([2.0, 0.0, 0.0, last]),
    ]
}

fn segment_error(got: &[Vec<Complex64>], expected: &[Vec<Complex64>]) -> f64 {
    if got.len() != expected.len() {
        return f64::INFINITY;
    }
    got.iter()
        .zip(expected)
        .flat_map(|(g, e)| {
            if g.len() != e.len() {
                vec![f64::INFINITY]
            } else {
                g.iter().zip(e).map(|(x, y)| (x - y).norm()).collect()
            }
        })
        .fold(0.0, f64::max)
}

fn example_two() -> Check {
    let start = Instant::now();
    let (a, b) = (data("four_qubit_a.json"), data("four_qubit_b.json"));
    let out = lucanon(&[
        "compare",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--segment-vec-mode",
        "1",
    ]);
    let elapsed = start.elapsed();
    ensure(out.status.code() == Some(1), || {
        format!("exit {:?}", out.status.code())
    })?;
    let report: VerdictReport = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(
        report.certificate_name.as_deref() == Some("GramModulus"),
        || format!("certificate {:?}", report.certificate_name),
    )?;

    // the printed tensors are not sorted, so their canonical cores list the
    // same segments in reverse block order
    let as_values = |segs: &[lucanon_cli::report::SegmentReport]| -> Vec<Vec<Complex64>> {
        segs.iter()
            .map(|s| {
                s.values
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect()
            })
            .collect()
    };
    let mut seg_err: f64 = 0.0;
    for (segs, flipped) in [(&report.segments_a, false), (&report.segments_b, true)] {
        let mut expected = printed_segments(flipped);
        expected.reverse();
        seg_err = seg_err.max(segment_error(&as_values(segs), &expected));
    }

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
    let printed = DegeneracyStructure::new(vec![
        pair.clone(),
        vec![unit(0), unit(1)],
        vec![unit(0), unit(1)],
        pair,
    ]);
    for flipped in [false, true] {
        let t = four_qubit(flipped);
        let segs: Vec<Vec<Complex64>> = segments_of(&t, &printed, 0)
            .unwrap()
            .into_iter()
            .map(|s| s.values)
            .collect();
        seg_err = seg_err.max(segment_error(&segs, &printed_segments(flipped)));
    }
    ensure(seg_err < 1e-12, || format!("segments off by {seg_err}"))?;

    let expected_sq = [[0.5, 0.8, 0.8, 0.5], [0.5, 0.2, 0.2, 0.5]];
    let mut sq_err: f64 = 0.0;
    for sigma in [&report.sigma_a, &report.sigma_b] {
        for (row, values) in expected_sq.iter().enumerate() {
            for (mode, v) in values.iter().enumerate() {
                sq_err = sq_err.max((sigma[mode][row].powi(2) - v).abs());
            }
        }
    }
    ensure(sq_err < 1e-12, || format!("σ² off by {sq_err}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "GramModulus, segment err {seg_err:.1e}, σ² err {sq_err:.1e}, {elapsed:.2?}"
    ))
}

fn four_qubit(flipped: bool) -> StateTensor {
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

fn counting() -> Check {
    let got = count_products(&[2, 2, 2], 2).map_err(|e| e.to_string())?;
    ensure(got == (2080, 1000), || format!("got {got:?}"))?;
    let out = lucanon(&["count", "--dims", "2,2,2", "--m", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    ensure(text == "total 2080\nindependent 1000\n", || {
        format!("binary printed {text:?}")
    })?;
    Ok("(2080, 1000)".into())
}

fn hosvd_properties() -> Check {
    let start = Instant::now();
    let (mut orth, mut energy, mut invariance): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for seed in 0..100 {
        let dims = suite_dims(seed);
        let t = random_state(&dims, seed).unwrap();
        let scale = t.norm_sqr();
        let cf = hosvd(&t).unwrap();
        for (mode, &dim) in dims.iter().enumerate() {
            let sigma = cf.sigma.column(mode);
            let sum: f64 = sigma.iter().map(|s| s * s).sum();
            energy = energy.max((sum - scale).abs() / scale);
            let slices: Vec<_> = (0..dim).map(|j| cf.core.slice(mode, j).unwrap()).collect();
            for (j, x) in slices.iter().enumerate() {
                for (k, y) in slices.iter().enumerate() {
                    let target = if j == k { sigma[j] * sigma[j] } else { 0.0 };
                    let g = inner_product(x, y).unwrap();
                    orth = orth.max((g - c(target)).norm() / scale);
                }
            }
        }
        for r in 0..10 {
            let u = random_local_unitaries(&dims, 1000 * seed + r).unwrap();
            let rotated = hosvd(&apply_local_unitaries(&t, &u).unwrap()).unwrap();
            invariance = invariance.max(cf.sigma.max_abs_diff(&rotated.sigma).unwrap());
        }
    }
    let elapsed = start.elapsed();
    ensure(orth < 1e-10, || format!("slice orthogonality {orth:e}"))?;
    ensure(energy < 1e-10, || format!("energy {energy:e}"))?;
    ensure(invariance < 1e-10, || {
        format!("Σ invariance {invariance:e}")
    })?;
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "orth {orth:.1e}, energy {energy:.1e}, invariance {invariance:.1e}, {elapsed:.2?}"
    ))
}

/// `(|0⟩|φ0⟩ + |1⟩|φ1⟩)/√2` with orthonormal random φ0, φ1: the first
/// party is maximally mixed, the rest generic.
fn first_party_degenerate(seed: u64) -> StateTensor {
    let rest = [2, 2];
    let p = random_state(&rest, seed).unwrap();
    let q = random_state(&rest, seed + 1).unwrap();
    let p_norm = p.norm();
    let p: Vec<Complex64> = p.amplitudes().iter().map(|z| z / p_norm).collect();
    let overlap: Complex64 = p
        .iter()
        .zip(q.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum();
    let q: Vec<Complex64> = q
        .amplitudes()
        .iter()
        .zip(&p)
        .map(|(y, x)| y - overlap * x)
        .collect();
    let q_norm = q.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = p
        .iter()
        .map(|z| z * h)
        .chain(q.iter().map(|z| z * (h / q_norm)))
        .collect();
    StateTensor::new(vec![2, 2, 2], amps).unwrap()
}

/// `a(|000⟩ + |111⟩) + b|222⟩` on three qutrits: one 2-block and one
/// singleton per mode.
fn weighted_ghz(seed: u64) -> StateTensor {
    let b = 0.2 + 0.5 * ((seed as f64 * 0.618_034) % 1.0);
    let a = ((1.0 - b * b) / 2.0).sqrt();
    StateTensor::from_entries(
        vec![3, 3, 3],
        &[(&[0, 0, 0], c(a)), (&[1, 1, 1], c(a)), (&[2, 2, 2], c(b))],
    )
    .unwrap()
}

fn degenerate_base(seed: u64) -> StateTensor {
    let base = match seed % 4 {
        0 => ghz(3),
        1 => weighted_ghz(seed),
        2 => first_party_degenerate(seed),
        _ => ghz(4),
    };
    let u = random_local_unitaries(base.dims(), seed + 7000).unwrap();
    apply_local_unitaries(&base, &u).unwrap()
}

fn equivalence_suite() -> Check {
    let start = Instant::now();
    let opts = CompareOptions::default();

    let mut phase_ok = 0;
    let mut worst_phase: f64 = 0.0;
    for seed in 0..100 {
        let dims = suite_dims(seed);
        let t = random_state(&dims, 200 + seed).unwrap();
        let image =
            apply_local_unitaries(&t, &random_local_unitaries(&dims, 300 + seed).unwrap()).unwrap();
        let v = compare_pure(&t, &image, &opts).unwrap();
        if v.outcome == Outcome::Equivalent && v.diagnostics.stage == Some(Stage::Phase) {
            let r = witness_residual(&t, &image, &v);
            worst_phase = worst_phase.max(r);
            if r < 1e-8 {
                phase_ok += 1;
            }
        }
    }

    let (mut search_ok, mut search_wrong) = (0, 0);
    for seed in 0..100 {
        let cf = hosvd(&degenerate_base(seed)).unwrap();
        let ds = degeneracy_structure(&cf.sigma, DEFAULT_CLUSTER_TOL);
        let s = random_block_symmetry(&ds, 400 + seed).unwrap();
        let image = apply_local_unitaries(&cf.core, &s).unwrap();
        let v = compare_pure(&cf.core, &image, &opts).unwrap();
        match v.outcome {
            Outcome::Equivalent
                if matches!(
                    v.diagnostics.stage,
                    Some(Stage::Search | Stage::FullyDegenerate)
                ) && witness_residual(&cf.core, &image, &v) < 1e-8 =>
            {
                search_ok += 1
            }
            Outcome::Inequivalent => search_wrong += 1,
            _ => {}
        }
    }

    let mut false_positive = 0;
    for seed in 0..100 {
        let dims = suite_dims(seed);
        let a = random_state(&dims, 500 + 2 * seed).unwrap();
        let b = random_state(&dims, 501 + 2 * seed).unwrap();
        if compare_pure(&a, &b, &opts).unwrap().outcome == Outcome::Equivalent {
            false_positive += 1;
        }
    }
    let elapsed = start.elapsed();
    let summary = format!(
        "phase {phase_ok}/100 (worst {worst_phase:.1e}), search {search_ok}/100 with {search_wrong} inequivalent, \
         independent {false_positive} equivalent, {elapsed:.2?}"
    );
    ensure(phase_ok == 100, || summary.clone())?;
    ensure(search_ok >= 95 && search_wrong == 0, || summary.clone())?;
    ensure(false_positive == 0, || summary.clone())?;
    within(elapsed, Duration::from_secs(300))?;
    Ok(summary)
}

fn mixed_suite() -> Check {
    let mixed_dims = |seed: u64| -> (Vec<usize>, usize) {
        let dims = [vec![2, 2], vec![2, 3], vec![2, 2, 2]][seed as usize % 3].clone();
        let full: usize = dims.iter().product();
        (dims, 1 + seed as usize % full)
    };
    let mut round_trip: f64 = 0.0;
    for seed in 0..50 {
        let (dims, rank) = mixed_dims(seed);
        let rho = random_density_matrix(&dims, rank, seed).unwrap();
        let back = partial_trace_0(&purify(&rho).unwrap().psi0).unwrap();
        let err = (rho.matrix() - back.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        round_trip = round_trip.max(err);
    }
    ensure(round_trip < 1e-10, || format!("round trip {round_trip:e}"))?;

    let opts = CompareOptions::default();
    let mut forward = 0;
    for seed in 0..50 {
        let (dims, rank) = mixed_dims(seed);
        let rho = random_density_matrix(&dims, rank, 100 + seed).unwrap();
        let u = random_local_unitaries(&dims, 200 + seed).unwrap();
        let v = compare_mixed(&rho, &rho.conjugate_local(&u).unwrap(), &opts).unwrap();
        if v.outcome == Outcome::Equivalent {
            forward += 1;
        }
    }
    ensure(forward == 50, || {
        format!("{forward}/50 rotated pairs equivalent")
    })?;

    let v = compare_mixed(&isotropic(0.3), &isotropic(0.5), &opts).unwrap();
    ensure(v.certificate_name() == Some("SigmaMismatch"), || {
        format!("isotropic pair gave {:?}", v.certificate_name())
    })?;
    Ok(format!(
        "round trip {round_trip:.1e}, {forward}/50 rotated, isotropic SigmaMismatch"
    ))
}

fn fully_degenerate_suite() -> Check {
    let opts = CompareOptions::default();
    for (k, phi) in [0.4, 1.3, -2.2, 2.9, 0.05].into_iter().enumerate() {
        let opts = CompareOptions {
            seed: k as u64,
            ..opts.clone()
        };
        let v = compare_pure(&ghz(3), &twisted_ghz(3, phi), &opts).unwrap();
        ensure(v.outcome == Outcome::Equivalent, || {
            format!("twisted GHZ φ = {phi}: {:?}", v.outcome)
        })?;
    }
    let v = compare_pure(&ghz(4), &cluster4(), &opts).unwrap();
    ensure(v.certificate_name() == Some("MarginalSpectra"), || {
        format!("GHZ4 vs cluster gave {:?}", v.certificate_name())
    })?;

    let relations = quadratic_relations(&[2, 2, 2], None).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let factors = random_local_unitaries(&[2, 2, 2], seed)
            .unwrap()
            .into_matrices();
        for rel in &relations {
            let (l, r) = rel.evaluate(&factors);
            worst = worst.max((l - r).norm() / l.norm().max(r.norm()).max(f64::MIN_POSITIVE));
        }
    }
    ensure(worst <= 1e-12, || format!("relation violation {worst:e}"))?;

    // products that stay equal under the relations collapse to one value at
    // a generic point; the remaining distinct values are the independent ones
    let independent = independent_products(&[2, 2, 2]).map_err(|e| e.to_string())?;
    let factors = random_local_unitaries(&[2, 2, 2], 77)
        .unwrap()
        .into_matrices();
    let nu: Vec<Complex64> = LinearizedSystem::nu_from_factors(&factors)
        .iter()
        .copied()
        .collect();
    let mut products = Vec::with_capacity(2080);
    for a in 0..nu.len() {
        for b in a..nu.len() {
            products.push(nu[a] * nu[b]);
        }
    }
    products.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    products.dedup_by(|x, y| (*x - *y).norm() <= 1e-12);
    ensure(independent <= 1000 && products.len() <= 1000, || {
        format!(
            "{independent} independent, {} distinct values",
            products.len()
        )
    })?;
    Ok(format!(
        "twisted GHZ equivalent, GHZ4/cluster MarginalSpectra, {} relations (worst {worst:.1e}), {independent} independent",
        relations.len()
    ))
}

fn honest_undecided() -> Check {
    // no stage may claim Inequivalent without a certificate, and an exhausted
    // search must surface as Undecided
    let search_only = CompareOptions {
        strategy: Strategy::Search,
        restarts: 4,
        iterations: 200,
        ..CompareOptions::default()
    };
    let v = compare_pure(&four_qubit(false), &four_qubit(true), &search_only).unwrap();
    ensure(v.outcome == Outcome::Undecided, || {
        format!("search-only four-qubit pair: {:?}", v.outcome)
    })?;

    let certificates_only = CompareOptions {
        strategy: Strategy::Certificates,
        ..CompareOptions::default()
    };
    let base = ghz(3);
    let image =
        apply_local_unitaries(&base, &random_local_unitaries(&[2, 2, 2], 5).unwrap()).unwrap();
    let v = compare_pure(&base, &image, &certificates_only).unwrap();
    ensure(v.outcome == Outcome::Undecided, || {
        format!("certificates-only GHZ pair: {:?}", v.outcome)
    })?;

    let starved = CompareOptions {
        restarts: 1,
        iterations: 1,
        ..CompareOptions::default()
    };
    let (a, b) = (first_party_degenerate(3), first_party_degenerate(11));
    let v = compare_pure(&a, &b, &starved).unwrap();
    ensure(
        v.outcome != Outcome::Inequivalent || v.certificate.is_some(),
        || "inequivalent without certificate".into(),
    )?;
    for seed in 0..20 {
        let a = degenerate_base(seed);
        let b = degenerate_base(seed + 4);
        let v = compare_pure(&a, &b, &starved).unwrap();
        ensure(
            v.outcome != Outcome::Inequivalent || v.certificate.is_some(),
            || format!("seed {seed}: inequivalent without certificate"),
        )?;
        if v.outcome == Outcome::Equivalent {
            ensure(witness_residual(&a, &b, &v) < 1e-8, || {
                format!("seed {seed}: unverified witness")
            })?;
        }
    }
    Ok("no complete procedure claimed; exhausted searches report Undecided, every verdict is backed".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 three-qubit canonical form", example_one),
        ("2 four-qubit Gram certificate", example_two),
        ("3 counting formulas", counting),
        ("4 HOSVD property suite", hosvd_properties),
        (
            "5 equivalence soundness and completeness",
            equivalence_suite,
        ),
        ("6 mixed-state suite", mixed_suite),
        ("7 fully degenerate suite", fully_degenerate_suite),
        ("8 honest undecided outcome", honest_undecided),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
