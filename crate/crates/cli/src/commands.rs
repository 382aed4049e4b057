use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Result};
use lucanon::{
    apply_local_unitaries, canonical_mixed, compare_mixed, compare_pure, count_products,
    degeneracy_structure, hosvd, partial_trace_0, purify_with, random_density_matrix,
    random_local_unitaries, random_state, segments_of, CanonicalForm, CompareOptions,
    DensityMatrix, StateTensor,
};

use crate::files::{
    matrix_to_pairs, read_state, to_pairs, write_json, Document, State, UnitariesFile,
};
use crate::report::{witness_report, SegmentReport, VerdictReport};

/// `x` with six significant digits.
pub fn significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (5 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

/// One line per singular-value index, one column per party.
pub fn sigma_table(columns: &[Vec<f64>]) -> String {
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::from("# singular values: rows are indices, columns are parties\n");
    for i in 0..rows {
        let cells: Vec<String> = columns
            .iter()
            .map(|c| {
                c.get(i)
                    .map_or_else(|| "-".to_string(), |&v| significant(v))
            })
            .collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

fn canonical_document(cf: &CanonicalForm) -> Document {
    Document::Canonical {
        dims: cf.core.dims().to_vec(),
        core: to_pairs(cf.core.amplitudes()),
        sigma: cf.sigma.columns().to_vec(),
        mode_unitaries: cf
            .mode_unitaries
            .matrices()
            .iter()
            .map(matrix_to_pairs)
            .collect(),
    }
}

pub fn canon(input: &Path, output: &Path, out: &mut impl Write) -> Result<i32> {
    let (doc, sigma) = match read_state(input)? {
        State::Pure(t) => {
            let cf = hosvd(&t)?;
            (canonical_document(&cf), cf.sigma)
        }
        State::Mixed(rho) => {
            let (upsilon, cf) = canonical_mixed(&rho)?;
            let doc = Document::CanonicalMixed {
                dims: rho.dims().to_vec(),
                upsilon: matrix_to_pairs(upsilon.matrix()),
                purification: Box::new(canonical_document(&cf)),
            };
            (doc, cf.sigma)
        }
    };
    write_json(output, &doc)?;
    write!(out, "{}", sigma_table(sigma.columns()))?;
    Ok(0)
}

/// Singular values and segments of both inputs.
type SideBySide = (
    Vec<Vec<f64>>,
    Vec<Vec<f64>>,
    Vec<SegmentReport>,
    Vec<SegmentReport>,
);

fn segment_reports(
    a: &StateTensor,
    b: &StateTensor,
    opts: &CompareOptions,
    vec_mode: usize,
) -> Result<SideBySide> {
    let (cf_a, cf_b) = (hosvd(a)?, hosvd(b)?);
    let ds_a = degeneracy_structure(&cf_a.sigma, opts.deg_tol);
    let ds_b = degeneracy_structure(&cf_b.sigma, opts.deg_tol);
    let (mut seg_a, mut seg_b) = (Vec::new(), Vec::new());
    if ds_a.same_pattern(&ds_b) {
        seg_a = segments_of(&cf_a.core, &ds_a, vec_mode)?
            .iter()
            .map(Into::into)
            .collect();
        seg_b = segments_of(&cf_b.core, &ds_a, vec_mode)?
            .iter()
            .map(Into::into)
            .collect();
    }
    Ok((
        cf_a.sigma.columns().to_vec(),
        cf_b.sigma.columns().to_vec(),
        seg_a,
        seg_b,
    ))
}

/// Compares two state files. `segment_vec_mode` is 1-based over the
/// compared tensor's modes (for mixed inputs the purifying party is mode 1).
pub fn compare(
    path_a: &Path,
    path_b: &Path,
    mut opts: CompareOptions,
    segment_vec_mode: Option<usize>,
) -> Result<VerdictReport> {
    let start = Instant::now();
    let (a, b) = (read_state(path_a)?, read_state(path_b)?);
    if a.dims() != b.dims() {
        return Err(lucanon::Error::DimsMismatch {
            a: a.dims().to_vec(),
            b: b.dims().to_vec(),
        }
        .into());
    }
    let order = match &a {
        State::Pure(t) => t.order(),
        State::Mixed(r) => r.dims().len() + 1,
    };
    let vec_mode = segment_vec_mode.unwrap_or(order);
    if vec_mode == 0 || vec_mode > order {
        bail!("--segment-vec-mode must be between 1 and {order}, got {vec_mode}");
    }
    opts.segment_vec_mode = Some(vec_mode - 1);

    let (verdict, tensors) = match (&a, &b) {
        (State::Pure(x), State::Pure(y)) => {
            (compare_pure(x, y, &opts)?, Some((x.clone(), y.clone())))
        }
        (State::Mixed(x), State::Mixed(y)) => {
            let verdict = compare_mixed(x, y, &opts)?;
            let (px, py) = (lucanon::purify(x)?, lucanon::purify(y)?);
            let same_rank = px.psi0.dims() == py.psi0.dims();
            (verdict, same_rank.then_some((px.psi0, py.psi0)))
        }
        _ => bail!("cannot compare a pure state with a mixed state"),
    };
    let (sigma_a, sigma_b, segments_a, segments_b) = match &tensors {
        Some((x, y)) => segment_reports(x, y, &opts, vec_mode - 1)?,
        None => Default::default(),
    };
    Ok(VerdictReport {
        outcome: verdict.outcome,
        certificate_name: verdict.certificate_name().map(str::to_string),
        certificate: verdict.certificate.clone(),
        witness: witness_report(&verdict),
        sigma_a,
        sigma_b,
        segment_vec_mode: vec_mode,
        segments_a,
        segments_b,
        diagnostics: verdict.diagnostics.clone(),
        options: opts,
        duration_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn purify(input: &Path, output: &Path, rank_tol: f64, out: &mut impl Write) -> Result<i32> {
    let State::Mixed(rho) = read_state(input)? else {
        bail!("purify expects a mixed state file");
    };
    let p = purify_with(&rho, rank_tol)?;
    write_json(output, &State::Pure(p.psi0).to_document())?;
    writeln!(out, "# eigenvalues kept: {}", p.weights.len())?;
    for w in &p.weights {
        writeln!(out, "{w:e}")?;
    }
    Ok(0)
}

pub fn trace0(input: &Path, output: &Path) -> Result<i32> {
    let State::Pure(psi) = read_state(input)? else {
        bail!("trace0 expects a pure state file");
    };
    let reduced = partial_trace_0(&psi)?;
    let rho = DensityMatrix::new(reduced.dims().to_vec(), reduced.matrix().clone())?;
    write_json(output, &State::Mixed(rho).to_document())?;
    Ok(0)
}

pub fn random(dims: &[usize], seed: u64, rank: Option<usize>) -> Result<Document> {
    let state = match rank {
        None => State::Pure(random_state(dims, seed)?),
        Some(r) => State::Mixed(random_density_matrix(dims, r, seed)?),
    };
    Ok(state.to_document())
}

pub fn rotate(input: &Path, seed: u64, output: &Path, sidecar: &Path) -> Result<i32> {
    let state = read_state(input)?;
    let u = random_local_unitaries(state.dims(), seed)?;
    let rotated = match state {
        State::Pure(t) => State::Pure(apply_local_unitaries(&t, &u)?),
        State::Mixed(r) => State::Mixed(r.conjugate_local(&u)?),
    };
    write_json(output, &rotated.to_document())?;
    write_json(sidecar, &UnitariesFile::new(seed, &u))?;
    Ok(0)
}

pub fn count(dims: &[usize], m: usize, out: &mut impl Write) -> Result<i32> {
    let (total, independent) = count_products(dims, m)?;
    writeln!(out, "total {total}")?;
    writeln!(out, "independent {independent}")?;
    Ok(0)
}
