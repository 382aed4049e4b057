use serde::{Deserialize, Serialize};

use crate::tensor::LocalUnitarySet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Equivalent,
    Inequivalent,
    Undecided,
}

/// Named LU-invariant mismatch backing an `Inequivalent` verdict.
///
/// Mode, party and segment indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Certificate {
    SigmaMismatch {
        mode: usize,
        index: usize,
        a: f64,
        b: f64,
    },
    DegeneracyMismatch {
        mode: usize,
        a: Vec<usize>,
        b: Vec<usize>,
    },
    MarginalSpectra {
        parties: Vec<usize>,
        a: Vec<f64>,
        b: Vec<f64>,
    },
    SegmentNorm {
        segment: usize,
        a: f64,
        b: f64,
    },
    GramModulus {
        first: usize,
        second: usize,
        a: f64,
        b: f64,
    },
    PhaseInconsistent {
        residual: f64,
    },
    MagnitudeMismatch {
        index: Vec<usize>,
        a: f64,
        b: f64,
    },
    /// Density matrices of different numerical rank.
    Spectrum {
        rank_a: usize,
        rank_b: usize,
    },
}

impl Certificate {
    pub fn name(&self) -> &'static str {
        match self {
            Certificate::SigmaMismatch { .. } => "SigmaMismatch",
            Certificate::DegeneracyMismatch { .. } => "DegeneracyMismatch",
            Certificate::MarginalSpectra { .. } => "MarginalSpectra",
            Certificate::SegmentNorm { .. } => "SegmentNorm",
            Certificate::GramModulus { .. } => "GramModulus",
            Certificate::PhaseInconsistent { .. } => "PhaseInconsistent",
            Certificate::MagnitudeMismatch { .. } => "MagnitudeMismatch",
            Certificate::Spectrum { .. } => "Spectrum",
        }
    }
}

/// Local unitaries mapping one state onto another, with the relative residual
/// `‖(⊗U) a - b‖ / ‖a‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub unitaries: LocalUnitarySet,
    pub residual: f64,
}

/// Which pipeline stage produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    Sigma,
    Degeneracy,
    Phase,
    Gram,
    Marginals,
    Search,
    FullyDegenerate,
    Exhausted,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub stage: Option<Stage>,
    pub sigma_difference: Option<f64>,
    pub phase_residual: Option<f64>,
    pub restarts_used: usize,
    pub iterations_used: usize,
    pub best_search_residual: Option<f64>,
    /// Linearized-system residual at the witness's own conjugation phases.
    pub linear_screening_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    pub certificate: Option<Certificate>,
    pub diagnostics: Diagnostics,
}

impl Verdict {
    pub fn equivalent(witness: Witness, diagnostics: Diagnostics) -> Self {
        Self {
            outcome: Outcome::Equivalent,
            witness: Some(witness),
            certificate: None,
            diagnostics,
        }
    }

    pub fn inequivalent(certificate: Certificate, diagnostics: Diagnostics) -> Self {
        Self {
            outcome: Outcome::Inequivalent,
            witness: None,
            certificate: Some(certificate),
            diagnostics,
        }
    }

    pub fn undecided(diagnostics: Diagnostics) -> Self {
        Self {
            outcome: Outcome::Undecided,
            witness: None,
            certificate: None,
            diagnostics,
        }
    }

    pub fn certificate_name(&self) -> Option<&'static str> {
        self.certificate.as_ref().map(Certificate::name)
    }
}
