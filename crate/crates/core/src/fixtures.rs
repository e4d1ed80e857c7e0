//! Deterministic instance generators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::circuit::GateSpec;
use crate::constructions::channel::{CircuitChannel, Reduction};
use crate::constructions::qco::QcoThresholds;
use crate::error::{Error, Result};
use crate::linalg::random::haar_unitary;
use crate::linalg::{ComplexMatrix, PureState, ZERO};
use crate::procedure::{build_procedure, eigenbasis_description, CircuitDescription, Procedure};
use crate::tolerances::Limits;

/// `δ = 2^(-n-2)`; spectrum `{1/3, 2/3 - δ², 2/3 + δ}` padded with `0`.
pub fn example1_spectrum(n: u32) -> [f64; 4] {
    let d = 0.5f64.powi(n as i32 + 2);
    [1.0 / 3.0, 2.0 / 3.0 - d * d, 2.0 / 3.0 + d, 0.0]
}

pub fn example1_description(n: u32) -> CircuitDescription {
    let spec = example1_spectrum(n);
    eigenbasis_description(&ComplexMatrix::identity(4), &spec).expect("static shape")
}

pub fn example1(n: u32) -> Procedure {
    build_procedure(&example1_description(n), &unbounded()).expect("valid circuit")
}

fn unbounded() -> Limits {
    Limits { qubit_cap: usize::MAX, ..Limits::default() }
}

/// Layers of random single-qubit rotations and a CX ladder on `m + k` qubits.
pub fn random_description(seed: u64, m: usize, k: usize, limits: &Limits) -> Result<CircuitDescription> {
    let n = m + k;
    if m == 0 || n > limits.qubit_cap {
        return Err(Error::SizeCap(format!("random fixture needs 1 <= m and m + k <= {}, got m = {m}, k = {k}", limits.qubit_cap)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates = Vec::new();
    for _ in 0..3 {
        for q in 0..n {
            for g in ["rz", "ry", "rz"] {
                gates.push(GateSpec::rotation(g, q, rng.gen_range(0.0..std::f64::consts::TAU)));
            }
        }
        for q in 0..n.saturating_sub(1) {
            gates.push(GateSpec::named("cx", &[q, q + 1]));
        }
    }
    Ok(CircuitDescription { witness_qubits: m, ancilla_qubits: k, outcomes: 2, gates })
}

pub fn random_procedure(seed: u64, m: usize, k: usize, limits: &Limits) -> Result<Procedure> {
    build_procedure(&random_description(seed, m, k, limits)?, limits)
}

/// Planted instance for the complement verifier: a source procedure on each
/// side of the language, a total procedure and a robust reduction between them.
#[derive(Debug, Clone)]
pub struct RobustPair {
    pub seed: u64,
    pub thresholds: QcoThresholds,
    pub epsilon: f64,
    pub qt: CircuitDescription,
    pub qt_spectrum: Vec<f64>,
    /// Source procedure for the instance in the language.
    pub q_in: CircuitDescription,
    pub q_in_spectrum: Vec<f64>,
    /// Source procedure for the instance outside the language.
    pub q_out: CircuitDescription,
    pub q_out_spectrum: Vec<f64>,
    pub reduction: Reduction,
    /// Eigenstates of the total procedure with acceptance `>= a'`.
    pub witnesses: Vec<PureState>,
}

pub const ROBUST_PAIR_QUBITS: usize = 2;
pub const IN_LANGUAGE: &str = "x_in";
pub const OUT_OF_LANGUAGE: &str = "x_out";

impl RobustPair {
    pub fn procedures(&self, limits: &Limits) -> Result<(Procedure, Procedure, Procedure)> {
        Ok((build_procedure(&self.qt, limits)?, build_procedure(&self.q_in, limits)?, build_procedure(&self.q_out, limits)?))
    }

    /// `min_w` weight on the `χ0` image among states passing the relaxed threshold,
    /// and the resulting worst-case source acceptance.
    pub fn robustness_margin(&self) -> f64 {
        robust_worst_case(&self.qt_spectrum, &self.q_in_spectrum, self.thresholds.a_prime - self.epsilon) - self.thresholds.a
    }
}

fn robust_worst_case(pt: &[f64], q: &[f64], thr: f64) -> f64 {
    let w = ((thr - pt[2]) / (pt[0] - pt[2])).clamp(0.0, 1.0);
    w * q[0] + (1.0 - w) * q[1]
}

/// `|φ_i, c> ↦ |χ_{2c + i/2}, i mod 2>` on witness qubits `0..2` and ancilla `2`.
fn pairing_unitary(phi: &ComplexMatrix, chi: &ComplexMatrix) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(8, 8);
    for c in 0..2 {
        for i in 0..4 {
            let (j, bit) = (2 * c + i / 2, i % 2);
            // column |φ_i>|c>, row |χ_j>|bit>
            for r in 0..4 {
                for s in 0..4 {
                    let amp = chi[(r, j)] * phi[(s, i)].conj();
                    u[(2 * r + bit, 2 * s + c)] += amp;
                }
            }
        }
    }
    u
}

fn with_ancillas(mut d: CircuitDescription, k: usize) -> CircuitDescription {
    d.ancilla_qubits = d.ancilla_qubits.max(k);
    d
}

pub fn robust_pair(seed: u64, m: usize, k: usize) -> Result<RobustPair> {
    robust_pair_inner(seed, m, k, false)
}

/// Robust pair whose channel sends the best witness of the total procedure
/// to a rejected state of the source.
pub fn planted_fault(seed: u64) -> Result<RobustPair> {
    robust_pair_inner(seed, ROBUST_PAIR_QUBITS, 1, true)
}

fn robust_pair_inner(seed: u64, m: usize, k: usize, fault: bool) -> Result<RobustPair> {
    if m != ROBUST_PAIR_QUBITS || k == 0 || m + k > Limits::default().qubit_cap {
        return Err(Error::SizeCap(format!("robust-pair fixtures use m = {ROBUST_PAIR_QUBITS} and k >= 1, got m = {m}, k = {k}")));
    }
    let thresholds = QcoThresholds { a: 2.0 / 3.0, b: 1.0 / 3.0, a_prime: 2.0 / 3.0 };
    let epsilon = 0.1;
    let thr = thresholds.a_prime - epsilon;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (pt, q_in) = loop {
        let pt = vec![rng.gen_range(0.85..0.98), rng.gen_range(0.6..0.75), rng.gen_range(0.15..0.35), rng.gen_range(0.0..0.12)];
        let q_in = vec![rng.gen_range(0.9..1.0), rng.gen_range(0.45..0.6), rng.gen_range(0.0..0.4), rng.gen_range(0.0..0.4)];
        if robust_worst_case(&pt, &q_in, thr) >= thresholds.a + 0.01 {
            break (pt, q_in);
        }
    };
    let q_out: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..0.3)).collect();
    let phi = haar_unitary(4, &mut rng);
    let chi = haar_unitary(4, &mut rng);
    let chi_out = haar_unitary(4, &mut rng);

    let image = if fault {
        // χ2 first: the top witnesses land on an eigenvalue below a
        ComplexMatrix::from_columns(4, &[chi.column(2), chi.column(1), chi.column(0), chi.column(3)])
    } else {
        chi.clone()
    };
    let u = pairing_unitary(&phi, &image);
    let reduction = Reduction {
        f: BTreeMap::from([(IN_LANGUAGE.to_string(), "y_in".to_string()), (OUT_OF_LANGUAGE.to_string(), "y_out".to_string())]),
        phi: CircuitChannel { in_qubits: 2, fresh_ancillas: 1, out_qubits: 2, gates: vec![GateSpec::unitary(&u, &[0, 1, 2])] },
        epsilon,
    };
    let witnesses = pt
        .iter()
        .enumerate()
        .filter(|(_, p)| **p >= thresholds.a_prime)
        .map(|(i, _)| PureState::normalized(phi.column(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RobustPair {
        seed,
        thresholds,
        epsilon,
        qt: with_ancillas(eigenbasis_description(&phi, &pt)?, k),
        q_in: with_ancillas(eigenbasis_description(&chi, &q_in)?, k),
        q_out: with_ancillas(eigenbasis_description(&chi_out, &q_out)?, k),
        qt_spectrum: pt,
        q_in_spectrum: q_in,
        q_out_spectrum: q_out,
        reduction,
        witnesses,
    })
}

/// On-disk form of a fixture: file name and JSON value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleFile {
    pub name: String,
    pub json: serde_json::Value,
}

fn file(name: &str, v: impl Serialize) -> Result<BundleFile> {
    Ok(BundleFile { name: name.into(), json: serde_json::to_value(v).map_err(|e| Error::InvalidInput(e.to_string()))? })
}

fn state_json(s: &PureState) -> serde_json::Value {
    let (re, im): (Vec<f64>, Vec<f64>) = s.amplitudes().iter().map(|z| (z.re, z.im)).unzip();
    serde_json::json!({ "re": re, "im": im })
}

pub fn robust_pair_bundle(rp: &RobustPair) -> Result<Vec<BundleFile>> {
    Ok(vec![
        file("qt.json", &rp.qt)?,
        file("q_in.json", &rp.q_in)?,
        file("q_out.json", &rp.q_out)?,
        file("reduction.json", &rp.reduction)?,
        file("thresholds.json", serde_json::json!({
            "a": rp.thresholds.a, "b": rp.thresholds.b, "a_prime": rp.thresholds.a_prime, "epsilon": rp.epsilon,
        }))?,
        file("spectra.json", serde_json::json!({
            "qt": rp.qt_spectrum, "q_in": rp.q_in_spectrum, "q_out": rp.q_out_spectrum,
        }))?,
        file("witnesses.json", rp.witnesses.iter().map(state_json).collect::<Vec<_>>())?,
    ])
}

pub fn example1_bundle(n: u32) -> Result<Vec<BundleFile>> {
    Ok(vec![
        file("circuit.json", example1_description(n))?,
        file("spectrum.json", serde_json::json!({ "p": example1_spectrum(n) }))?,
        file("thresholds.json", serde_json::json!({ "a": 2.0 / 3.0, "b": 1.0 / 3.0 }))?,
    ])
}

pub fn random_bundle(seed: u64, m: usize, k: usize, limits: &Limits) -> Result<Vec<BundleFile>> {
    Ok(vec![file("circuit.json", random_description(seed, m, k, limits)?)?])
}

/// Superposition `Σ α_i ψ_i` over explicit columns.
pub fn combine(columns: &[Vec<Complex64>], alphas: &[Complex64]) -> Result<PureState> {
    let dim = columns.first().map_or(0, Vec::len);
    let mut v = vec![ZERO; dim];
    for (c, a) in columns.iter().zip(alphas) {
        for (x, y) in v.iter_mut().zip(c) {
            *x += a * y;
        }
    }
    PureState::normalized(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::spectrum;

    #[test]
    fn example1_spectrum_values() {
        let s = spectrum(&example1(4)).unwrap();
        let ps = s.probabilities();
        for want in [1.0 / 3.0, 2.0 / 3.0 - 2f64.powi(-12), 2.0 / 3.0 + 2f64.powi(-6)] {
            assert!(ps.iter().any(|p| (p - want).abs() < 1e-12), "{want} missing from {ps:?}");
        }
    }

    #[test]
    fn random_fixture_reproducible() {
        let l = Limits::default();
        let a = serde_json::to_string(&random_description(7, 2, 2, &l).unwrap()).unwrap();
        let b = serde_json::to_string(&random_description(7, 2, 2, &l).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, serde_json::to_string(&random_description(8, 2, 2, &l).unwrap()).unwrap());
    }

    #[test]
    fn robust_pair_spectra_match() {
        let rp = robust_pair(3, 2, 1).unwrap();
        let (qt, q_in, _) = rp.procedures(&Limits::default()).unwrap();
        let mut want = rp.qt_spectrum.clone();
        want.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in spectrum(&qt).unwrap().probabilities().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(rp.robustness_margin() > 0.0);
        assert!(!rp.witnesses.is_empty());
        for w in &rp.witnesses {
            assert!(qt.accept_probability(w).unwrap() >= rp.thresholds.a_prime);
        }
        // the top witness maps into the high eigenvalue of the source
        let mapped = rp.reduction.phi.apply(&rp.witnesses[0].to_density()).unwrap();
        assert!(q_in.acceptance_probabilities(&mapped).unwrap()[1] >= 0.9 - 1e-12);
    }

    #[test]
    fn only_two_witness_qubits() {
        assert!(matches!(robust_pair(1, 3, 1), Err(Error::SizeCap(_))));
    }
}
