//! Conversions between pairs of two-outcome procedures, three-outcome
//! procedures, total procedures and their two-outcome images.

use crate::emap::{apply_emap, synthesize, SynthesizedEMap, TargetPointSet};
use crate::error::{Error, Result};
use crate::iterative::{iterate_procedure, lzl_alphabet, IterativePlan};
use crate::linalg::ComplexMatrix;
use crate::procedure::{three_outcome_alphabet, Procedure};
use crate::tolerances::{Limits, SYNTHESIS};

/// `|b><b| ⊗ E ⊗ I_pad` on `1 + width` qubits.
fn routed(bit: usize, e: &ComplexMatrix, width: usize, used: usize) -> ComplexMatrix {
    let mut sel = ComplexMatrix::zeros(2, 2);
    sel[(bit, bit)] = 1.0.into();
    sel.kron(e).kron(&ComplexMatrix::identity(1usize << (width - used)))
}

/// Qubit 0 routes: 1 runs `q` (accept gives `L`), 0 runs `q_bar` (accept gives `Lbar`);
/// every other path outputs `0`.
pub fn q3_from_pair(q: &Procedure, q_bar: &Procedure, limits: &Limits) -> Result<Procedure> {
    q.require_two_outcome()?;
    q_bar.require_two_outcome()?;
    let width = q.witness_qubits().max(q_bar.witness_qubits());
    if width + 1 > limits.qubit_cap {
        return Err(Error::DimensionCap { requested: width + 1, cap: limits.qubit_cap });
    }
    let e_l = routed(1, q.accept_element()?, width, q.witness_qubits());
    let e_lbar = routed(0, q_bar.accept_element()?, width, q_bar.witness_qubits());
    let dim = 1usize << (width + 1);
    let e_0 = &(&ComplexMatrix::identity(dim) - &e_l) - &e_lbar;
    Procedure::from_povm(width + 1, vec![e_0, e_l, e_lbar], three_outcome_alphabet())
}

fn three_outcome_elements(q3: &Procedure) -> Result<[&ComplexMatrix; 3]> {
    if q3.outcomes() != 3 {
        return Err(Error::WrongAlphabet(format!("expected 3 outcomes, got {}", q3.outcomes())));
    }
    let idx = |l: &str| q3.outcome_index(l).map_err(|_| Error::WrongAlphabet(format!("alphabet {:?} lacks '{l}'", q3.alphabet())));
    let p = q3.povm();
    Ok([&p[idx("0")?], &p[idx("L")?], &p[idx("Lbar")?]])
}

/// `Q` accepts exactly on `L`, `Q'` exactly on `Lbar`.
pub fn pair_from_q3(q3: &Procedure) -> Result<(Procedure, Procedure)> {
    let [_, e_l, e_lbar] = three_outcome_elements(q3)?;
    let m = q3.witness_qubits();
    Ok((Procedure::from_accept_element(m, e_l.clone())?, Procedure::from_accept_element(m, e_lbar.clone())?))
}

/// Accept with probability `1/2 + (Pr[L] - Pr[Lbar]) / 2`.
pub fn q2_from_q3(q3: &Procedure) -> Result<Procedure> {
    let [_, e_l, e_lbar] = three_outcome_elements(q3)?;
    let dim = q3.dim();
    let e1 = &ComplexMatrix::identity(dim).scale_real(0.5) + &(e_l - e_lbar).scale_real(0.5);
    Procedure::from_accept_element(q3.witness_qubits(), e1)
}

/// `N = 2` plan with `g(2) = L`, `g(1) = 0`, `g(0) = Lbar`.
pub fn q3_plan() -> IterativePlan {
    // rows follow the plan alphabet order [L, 0, Lbar]
    IterativePlan {
        n: 2,
        alphabet: lzl_alphabet(),
        g: vec![vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]],
    }
}

/// Eigenvalue `p` maps to `(Pr[L], Pr[0], Pr[Lbar]) = (p², 2p(1-p), (1-p)²)`.
pub fn q3_from_q2(q2: &Procedure, limits: &Limits) -> Result<Procedure> {
    iterate_procedure(q2, &q3_plan(), limits)
}

/// `N = 2`, `g = (1, 0, 1)`: `β(p) = p² + (1-p)²`.
pub fn qt_plan() -> IterativePlan {
    IterativePlan::binary(&[1.0, 0.0, 1.0]).expect("static plan")
}

pub fn qt_from_q2(q2: &Procedure, limits: &Limits) -> Result<Procedure> {
    iterate_procedure(q2, &qt_plan(), limits)
}

pub fn beta(p: f64) -> f64 {
    p * p + (1.0 - p) * (1.0 - p)
}

/// Accept outright on a fair coin, otherwise run `q`: `p ↦ (1+p)/2`.
pub fn q2_from_total(q: &Procedure) -> Result<Procedure> {
    let e = q.accept_element()?;
    let e1 = (&ComplexMatrix::identity(q.dim()) + e).scale_real(0.5);
    Procedure::from_accept_element(q.witness_qubits(), e1)
}

/// Targets sending `2/3 ↦ 1/7` and `3/4 ↦ 6/7`.
pub fn qp_targets() -> TargetPointSet {
    TargetPointSet::new(vec![0.0, 2.0 / 3.0, 0.75, 1.0], vec![0.0, 1.0 / 7.0, 6.0 / 7.0, 1.0], 1.0 / 12.0, 1.0 / 7.0).expect("static targets")
}

pub fn qp_from_q2(q2: &Procedure, limits: &Limits) -> Result<(Procedure, SynthesizedEMap)> {
    let em = synthesize(&qp_targets(), SYNTHESIS, limits.n_cap)?;
    Ok((apply_emap(q2, &em, limits)?, em))
}
