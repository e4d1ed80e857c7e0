//! Accepting and rejecting witness sets for a pair of procedures, labelled by
//! a prefix qubit (`0` for the first procedure, `1` for the second).

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{PureState, ZERO};
use crate::procedure::Procedure;
use crate::spectral::spectrum;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledState {
    pub prefix: u8,
    pub p: f64,
    pub state: PureState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairBounds {
    pub a: f64,
    pub b: f64,
    pub a_prime: f64,
    pub b_prime: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSets {
    pub plus: Vec<LabeledState>,
    pub minus: Vec<LabeledState>,
}

/// `|prefix> ⊗ ψ ⊗ |0..0>` on `1 + width` qubits.
fn prefixed(prefix: u8, psi: &PureState, width: usize) -> PureState {
    let pad = 1usize << (width - psi.num_qubits());
    let half = psi.dim() * pad;
    let mut v = vec![ZERO; 2 * half];
    for (i, a) in psi.amplitudes().iter().enumerate() {
        v[prefix as usize * half + i * pad] = *a;
    }
    PureState::new(v).expect("unit vector")
}

/// `H⁺ = {|0>ψ_i : p_i > a} ∪ {|1>ψ'_i : p'_i > a'}`, `H⁻` likewise with `< b`, `< b'`.
pub fn canonical_witness_sets(q: &Procedure, q_prime: &Procedure, bounds: PairBounds) -> Result<WitnessSets> {
    let width = q.witness_qubits().max(q_prime.witness_qubits());
    let mut sets = WitnessSets { plus: vec![], minus: vec![] };
    for (prefix, proc_, hi, lo) in [(0u8, q, bounds.a, bounds.b), (1u8, q_prime, bounds.a_prime, bounds.b_prime)] {
        for (p, psi) in spectrum(proc_)?.eigenbasis() {
            let entry = LabeledState { prefix, p, state: prefixed(prefix, &psi, width) };
            if p > hi {
                sets.plus.push(entry);
            } else if p < lo {
                sets.minus.push(entry);
            }
        }
    }
    Ok(sets)
}
