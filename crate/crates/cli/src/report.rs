use lucanon::{Certificate, CompareOptions, Diagnostics, Outcome, Segment, Verdict};
use serde::{Deserialize, Serialize};

use crate::files::{matrix_to_pairs, to_pairs, Pair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub residual: f64,
    /// Per party, the matrix as rows of `[re, im]` pairs.
    pub unitaries: Vec<Vec<Vec<Pair>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub blocks: Vec<usize>,
    pub values: Vec<Pair>,
}

impl From<&Segment> for SegmentReport {
    fn from(s: &Segment) -> Self {
        Self {
            blocks: s.blocks.clone(),
            values: to_pairs(&s.values),
        }
    }
}

/// Machine-readable result of `compare`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub outcome: Outcome,
    pub certificate_name: Option<String>,
    pub certificate: Option<Certificate>,
    pub witness: Option<WitnessReport>,
    /// Singular values per party of each input (of the purification for
    /// mixed inputs, party 0 first).
    pub sigma_a: Vec<Vec<f64>>,
    pub sigma_b: Vec<Vec<f64>>,
    /// 1-based party whose unfolding lays out the segments.
    pub segment_vec_mode: usize,
    /// Empty when the block structures of the inputs differ.
    pub segments_a: Vec<SegmentReport>,
    pub segments_b: Vec<SegmentReport>,
    pub diagnostics: Diagnostics,
    pub options: CompareOptions,
    pub duration_seconds: f64,
}

impl VerdictReport {
    pub fn exit_code(&self) -> i32 {
        match self.outcome {
            Outcome::Equivalent => 0,
            Outcome::Inequivalent => 1,
            Outcome::Undecided => 3,
        }
    }
}

pub fn witness_report(v: &Verdict) -> Option<WitnessReport> {
    v.witness.as_ref().map(|w| WitnessReport {
        residual: w.residual,
        unitaries: w
            .unitaries
            .matrices()
            .iter()
            .map(|m| {
                matrix_to_pairs(m)
                    .chunks(m.ncols())
                    .map(<[Pair]>::to_vec)
                    .collect()
            })
            .collect(),
    })
}
