//! The complement verifier: run the nondestructive amplified total procedure,
//! push its quantum output through the reduction channel, run the amplified
//! source procedure and flip its answer.
//!
//! On the witness space of the total procedure the accept element is
//! `M1 = K Φ†(I - Ẽ1) K`, with `K` the Kraus operator of the nondestructive
//! accept branch and `Ẽ1` the accept element of the amplified source.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::channel::Reduction;
use crate::emap::{apply_emap, synthesize, SynthesizedEMap, TargetPointSet};
use crate::error::{Error, Result};
use crate::iterative::{make_nondestructive, NondestructiveWrapper};
use crate::linalg::{hermitian_eigendecomposition, ComplexMatrix, PureState};
use crate::procedure::Procedure;
use crate::spectral::spectrum;
use crate::tolerances::{Limits, SYNTHESIS};

/// Smallest `η` used, to keep synthesis within the step cap.
pub const ETA_FLOOR: f64 = 1.0 / 256.0;
const SLACK: f64 = 1e-9;

/// `2^(-m-2)`, floored at `2^-8`.
pub fn qco_eta(m: usize) -> f64 {
    0.5f64.powi(m as i32 + 2).max(ETA_FLOOR)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QcoThresholds {
    /// Completeness and soundness of the source procedure.
    pub a: f64,
    pub b: f64,
    /// Totality threshold of the total procedure.
    pub a_prime: f64,
}

#[derive(Debug, Clone)]
pub struct Qco {
    pub procedure: Procedure,
    pub m1: ComplexMatrix,
    pub eta: f64,
    pub nondestructive: NondestructiveWrapper,
    pub amplified: Procedure,
    pub amplified_map: SynthesizedEMap,
    pub reduction: Reduction,
}

fn two_point_targets(lo: f64, hi: f64, eta: f64) -> Result<TargetPointSet> {
    TargetPointSet::with_min_gaps(vec![0.0, lo, hi, 1.0], vec![0.0, eta, 1.0 - eta, 1.0])
}

/// `q` is the source procedure, `qt` the total one; `red` carries witnesses of `qt` to `q`.
pub fn qco(q: &Procedure, qt: &Procedure, red: &Reduction, th: QcoThresholds, limits: &Limits) -> Result<Qco> {
    if red.phi.in_qubits != qt.witness_qubits() || 1usize << red.phi.out_qubits != q.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel maps {} -> {} qubits, procedures have {} and {}",
            red.phi.in_qubits,
            red.phi.out_qubits,
            qt.witness_qubits(),
            q.witness_qubits()
        )));
    }
    if !(red.epsilon > 0.0) {
        return Err(Error::InvalidReduction("the complement verifier needs a robust reduction (epsilon > 0)".into()));
    }
    let m = qt.witness_qubits();
    let eta = qco_eta(m);
    let nondestructive = make_nondestructive(qt, &two_point_targets(th.a_prime - red.epsilon, th.a_prime, eta)?, SYNTHESIS, limits)?;
    let amplified_map = synthesize(&two_point_targets(th.b, th.a, eta)?, SYNTHESIS, limits.n_cap)?;
    let amplified = apply_emap(q, &amplified_map, limits)?;

    let reject = amplified.povm()[0].clone();
    let k = &nondestructive.kraus;
    let m1 = (&(k * &red.phi.adjoint_apply(&reject)?) * k).hermitian_part();
    let procedure = Procedure::from_accept_element(m, m1.clone())?;
    Ok(Qco {
        procedure,
        m1,
        eta,
        nondestructive,
        amplified,
        amplified_map,
        reduction: red.clone(),
    })
}

impl Qco {
    /// One sampled pass through the seven steps; returns the accept bit.
    pub fn run_sampled(&self, psi: &PureState, rng: &mut impl Rng, limits: &Limits) -> Result<bool> {
        let first = self.nondestructive.run(psi, rng, limits)?;
        let Some(post) = first.post_state.filter(|_| first.accept) else {
            return Ok(false);
        };
        let mapped = self.reduction.phi.apply(&post.to_density())?;
        let p_accept = self.amplified.acceptance_probabilities(&mapped)?[1];
        Ok(rng.gen::<f64>() >= p_accept)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct M1Diagnostics {
    pub eta: f64,
    pub max_diagonal: f64,
    pub max_entry: f64,
    pub trace_square: f64,
    /// `η² 2^(2m)`
    pub trace_square_bound: f64,
    /// `sup_ρ Tr(M1 ρ)`
    pub top_eigenvalue: f64,
    pub pass: bool,
}

/// Entries of `M1` in the eigenbasis of the total procedure, plus `Tr M1²` and the top eigenvalue.
pub fn m1_diagnostics(m1: &ComplexMatrix, qt: &Procedure, eta: f64) -> Result<M1Diagnostics> {
    let basis: Vec<Vec<_>> = spectrum(qt)?.eigenbasis().into_iter().map(|(_, s)| s.into_amplitudes()).collect();
    let mut max_diagonal: f64 = 0.0;
    let mut max_entry: f64 = 0.0;
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let x = m1.sandwich(u, v).norm();
            max_entry = max_entry.max(x);
            if i == j {
                max_diagonal = max_diagonal.max(x);
            }
        }
    }
    let trace_square = m1.trace_product_real(m1);
    let m = qt.witness_qubits() as i32;
    let trace_square_bound = eta * eta * 2f64.powi(2 * m);
    let top_eigenvalue = hermitian_eigendecomposition(m1)?.values[0];
    let pass = max_entry <= eta + SLACK && trace_square <= trace_square_bound + SLACK && top_eigenvalue <= 0.25;
    Ok(M1Diagnostics {
        eta,
        max_diagonal,
        max_entry,
        trace_square,
        trace_square_bound,
        top_eigenvalue,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcoCertificate {
    pub in_language: bool,
    pub eta: f64,
    /// Best acceptance over eigenstates of the total procedure with `p >= a'`; reported off the language.
    pub completeness: Option<f64>,
    pub completeness_bound: f64,
    /// Present on the language.
    pub soundness: Option<M1Diagnostics>,
    pub pass: bool,
}

pub fn qco_certificate(c: &Qco, qt: &Procedure, a_prime: f64, in_language: bool) -> Result<QcoCertificate> {
    let completeness_bound = (1.0 - c.eta).powi(2);
    if in_language {
        let d = m1_diagnostics(&c.m1, qt, c.eta)?;
        return Ok(QcoCertificate {
            in_language,
            eta: c.eta,
            completeness: None,
            completeness_bound,
            pass: d.pass,
            soundness: Some(d),
        });
    }
    let best = spectrum(qt)?
        .eigenbasis()
        .iter()
        .filter(|(p, _)| *p >= a_prime - SLACK)
        .map(|(_, s)| c.m1.sandwich(s.amplitudes(), s.amplitudes()).re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(QcoCertificate {
        in_language,
        eta: c.eta,
        completeness: Some(best),
        completeness_bound,
        soundness: None,
        pass: best >= completeness_bound - SLACK,
    })
}
