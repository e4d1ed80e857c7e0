//! Verification procedures for one fixed instance.
//!
//! A procedure is stored by its outcome POVM on the witness space. Procedures
//! built from circuits also keep the circuit, which the statevector sampler
//! needs; POVM-only procedures get a one-ancilla dilation on demand.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateSpec};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigendecomposition, ComplexMatrix, DensityMatrix, PureState, ONE, ZERO,
};
use crate::tolerances::{Limits, POVM_COMPLETENESS, POVM_POSITIVE, PROBABILITY_SLACK};

/// Circuit JSON: `V_x` on `m` witness and `k` ancilla qubits with `d` outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitDescription {
    pub witness_qubits: usize,
    pub ancilla_qubits: usize,
    pub outcomes: usize,
    pub gates: Vec<GateSpec>,
}

/// Number of qubits read to produce one of `d` outcomes.
pub fn measured_qubits(d: usize) -> usize {
    (usize::BITS - (d - 1).leading_zeros()) as usize
}

impl CircuitDescription {
    pub fn validate(&self, limits: &Limits) -> Result<()> {
        let total = self.witness_qubits + self.ancilla_qubits;
        if self.witness_qubits == 0 {
            return Err(Error::InvalidInput("witness_qubits must be at least 1".into()));
        }
        if self.outcomes < 2 {
            return Err(Error::InvalidInput("outcomes must be at least 2".into()));
        }
        if measured_qubits(self.outcomes) > total {
            return Err(Error::InvalidInput(format!(
                "{} outcomes need {} measured qubits but the register has {total}",
                self.outcomes,
                measured_qubits(self.outcomes)
            )));
        }
        if total > limits.qubit_cap {
            return Err(Error::TooManyQubits {
                requested: total,
                cap: limits.qubit_cap,
            });
        }
        Ok(())
    }
}

/// The unitary circuit behind a procedure plus its measurement rule.
#[derive(Debug, Clone)]
pub struct Realization {
    pub witness_qubits: usize,
    pub ancilla_qubits: usize,
    pub outcomes: usize,
    pub circuit: Circuit,
}

impl Realization {
    pub fn total_qubits(&self) -> usize {
        self.witness_qubits + self.ancilla_qubits
    }

    /// Outcome for a computational basis index of the full register, with
    /// codes `>= d` clamped to `d - 1`.
    pub fn outcome_of(&self, index: usize) -> usize {
        let b = measured_qubits(self.outcomes);
        let code = index >> (self.total_qubits() - b);
        code.min(self.outcomes - 1)
    }

    /// Basis index of `|i>|0^k>`.
    pub fn embed_index(&self, witness_index: usize) -> usize {
        witness_index << self.ancilla_qubits
    }

    /// `V (|i> ⊗ |0^k>)` for every witness basis state `i`.
    fn output_columns(&self) -> Vec<Vec<Complex64>> {
        let d = 1usize << self.total_qubits();
        (0..1usize << self.witness_qubits)
            .map(|i| {
                let mut v = vec![ZERO; d];
                v[self.embed_index(i)] = ONE;
                self.circuit.apply_in_place(&mut v);
                v
            })
            .collect()
    }

    /// `E_w = (I ⊗ <0^k|) V† (P_w ⊗ I) V (I ⊗ |0^k>)`.
    pub fn povm(&self) -> Vec<ComplexMatrix> {
        let cols = self.output_columns();
        let dim = cols.len();
        let mut povm = vec![ComplexMatrix::zeros(dim, dim); self.outcomes];
        let outcome: Vec<usize> = (0..cols[0].len()).map(|x| self.outcome_of(x)).collect();
        for i in 0..dim {
            for j in i..dim {
                let mut acc = vec![ZERO; self.outcomes];
                for (x, w) in outcome.iter().enumerate() {
                    acc[*w] += cols[i][x].conj() * cols[j][x];
                }
                for (w, a) in acc.into_iter().enumerate() {
                    povm[w][(i, j)] = a;
                    povm[w][(j, i)] = a.conj();
                }
            }
        }
        povm
    }
}

/// A `d`-outcome verification procedure on `m` witness qubits.
#[derive(Debug, Clone)]
pub struct Procedure {
    witness_qubits: usize,
    povm: Vec<ComplexMatrix>,
    alphabet: Vec<String>,
    realization: Option<Arc<Realization>>,
}

/// Labels `"0", "1", ...`.
pub fn numeric_alphabet(d: usize) -> Vec<String> {
    (0..d).map(|w| w.to_string()).collect()
}

/// Outcome labels of a three-outcome procedure, by outcome index.
pub fn three_outcome_alphabet() -> Vec<String> {
    vec!["0".into(), "L".into(), "Lbar".into()]
}

pub fn build_procedure(desc: &CircuitDescription, limits: &Limits) -> Result<Procedure> {
    desc.validate(limits)?;
    let circuit = Circuit::from_specs(desc.witness_qubits + desc.ancilla_qubits, &desc.gates)?;
    Ok(Procedure::from_realization(Realization {
        witness_qubits: desc.witness_qubits,
        ancilla_qubits: desc.ancilla_qubits,
        outcomes: desc.outcomes,
        circuit,
    }))
}

impl Procedure {
    pub fn from_realization(r: Realization) -> Self {
        let povm = r.povm();
        Self {
            witness_qubits: r.witness_qubits,
            alphabet: numeric_alphabet(r.outcomes),
            povm,
            realization: Some(Arc::new(r)),
        }
    }

    /// Procedure given directly by its POVM, validated for positivity and completeness.
    pub fn from_povm(witness_qubits: usize, povm: Vec<ComplexMatrix>, alphabet: Vec<String>) -> Result<Self> {
        let dim = 1usize << witness_qubits;
        if povm.len() < 2 || alphabet.len() != povm.len() {
            return Err(Error::InvalidInput(format!(
                "need at least two POVM elements and one label each, got {} and {}",
                povm.len(),
                alphabet.len()
            )));
        }
        let mut total = ComplexMatrix::zeros(dim, dim);
        let mut cleaned = Vec::with_capacity(povm.len());
        for e in povm {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "POVM element is {}x{}, witness space has dimension {dim}",
                    e.rows(),
                    e.cols()
                )));
            }
            let defect = e.hermitian_defect();
            if defect > POVM_POSITIVE {
                return Err(Error::NotHermitian(defect));
            }
            let e = e.hermitian_part();
            let min = hermitian_eigendecomposition(&e)?.values.last().copied().unwrap_or(0.0);
            if min < -POVM_POSITIVE {
                return Err(Error::InvalidInput(format!("POVM element has eigenvalue {min:e}")));
            }
            total = &total + &e;
            cleaned.push(e);
        }
        let gap = total.max_abs_diff(&ComplexMatrix::identity(dim));
        if gap > POVM_COMPLETENESS {
            return Err(Error::InvalidInput(format!("POVM elements sum to identity only within {gap:e}")));
        }
        Ok(Self {
            witness_qubits,
            povm: cleaned,
            alphabet,
            realization: None,
        })
    }

    /// Two-outcome procedure with accept element `e1`.
    pub fn from_accept_element(witness_qubits: usize, e1: ComplexMatrix) -> Result<Self> {
        let dim = 1usize << witness_qubits;
        let e0 = &ComplexMatrix::identity(dim) - &e1;
        Self::from_povm(witness_qubits, vec![e0, e1], numeric_alphabet(2))
    }

    /// Diagonal procedure whose computational basis states accept with `probs`,
    /// realized by witness-controlled `ry` rotations of one ancilla that is
    /// then swapped into qubit 0.
    pub fn from_spectrum(probs: &[f64]) -> Result<Self> {
        if probs.len() < 2 || !probs.len().is_power_of_two() {
            return Err(Error::BadLength(format!(
                "spectrum length {} is not a power of two >= 2",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidInput(format!("probability {p} outside [0,1]")));
        }
        let m = probs.len().trailing_zeros() as usize;
        let desc = CircuitDescription {
            witness_qubits: m,
            ancilla_qubits: 1,
            outcomes: 2,
            gates: spectrum_gates(m, probs),
        };
        build_procedure(&desc, &Limits { qubit_cap: usize::MAX, ..Limits::default() })
    }

    /// Procedure with accept element `U diag(probs) U†`, realized as the
    /// diagonal circuit preceded by `U†` on the witness.
    pub fn from_eigenbasis(u: &ComplexMatrix, probs: &[f64]) -> Result<Self> {
        let desc = eigenbasis_description(u, probs)?;
        build_procedure(&desc, &Limits { qubit_cap: usize::MAX, ..Limits::default() })
    }

    pub fn witness_qubits(&self) -> usize {
        self.witness_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.witness_qubits
    }

    pub fn outcomes(&self) -> usize {
        self.povm.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn with_alphabet(mut self, alphabet: Vec<String>) -> Result<Self> {
        if alphabet.len() != self.povm.len() {
            return Err(Error::WrongAlphabet(format!(
                "{} labels for {} outcomes",
                alphabet.len(),
                self.povm.len()
            )));
        }
        self.alphabet = alphabet;
        Ok(self)
    }

    /// Index of the outcome labelled `label`.
    pub fn outcome_index(&self, label: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::WrongAlphabet(format!("no outcome labelled '{label}' in {:?}", self.alphabet)))
    }

    pub fn povm(&self) -> &[ComplexMatrix] {
        &self.povm
    }

    pub fn realization(&self) -> Option<&Realization> {
        self.realization.as_deref()
    }

    pub fn require_two_outcome(&self) -> Result<()> {
        if self.outcomes() != 2 {
            return Err(Error::NotTwoOutcome(self.outcomes()));
        }
        Ok(())
    }

    /// `E_1` of a two-outcome procedure.
    pub fn accept_element(&self) -> Result<&ComplexMatrix> {
        self.require_two_outcome()?;
        Ok(&self.povm[1])
    }

    /// `Tr(E_w rho)` per outcome, clipped to `[0,1]`.
    pub fn acceptance_probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state has dimension {}, witness space {}",
                rho.dim(),
                self.dim()
            )));
        }
        Ok(self.povm.iter().map(|e| clip(e.trace_product_real(rho.matrix()))).collect())
    }

    pub fn probabilities_pure(&self, psi: &PureState) -> Result<Vec<f64>> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state has dimension {}, witness space {}",
                psi.dim(),
                self.dim()
            )));
        }
        let a = psi.amplitudes();
        Ok(self.povm.iter().map(|e| clip(e.sandwich(a, a).re)).collect())
    }

    /// `Pr[accept]` of a two-outcome procedure on a pure state.
    pub fn accept_probability(&self, psi: &PureState) -> Result<f64> {
        self.require_two_outcome()?;
        Ok(self.probabilities_pure(psi)?[1])
    }

    /// Circuit realizing the procedure: the stored circuit, or the canonical
    /// one-ancilla dilation of a two-outcome POVM.
    pub fn dilation(&self) -> Result<Realization> {
        if let Some(r) = &self.realization {
            return Ok((**r).clone());
        }
        self.require_two_outcome()?;
        canonical_dilation(self.witness_qubits, &self.povm[1])
    }
}

fn clip(p: f64) -> f64 {
    debug_assert!(
        p >= -PROBABILITY_SLACK * 10.0 && p <= 1.0 + PROBABILITY_SLACK * 10.0,
        "probability {p} out of range"
    );
    p.clamp(0.0, 1.0)
}

/// Angle with `sin^2(theta/2) = p`.
pub fn acceptance_angle(p: f64) -> f64 {
    2.0 * p.clamp(0.0, 1.0).sqrt().asin()
}

fn spectrum_gates(m: usize, probs: &[f64]) -> Vec<GateSpec> {
    let controls: Vec<usize> = (0..m).collect();
    let mut gates = Vec::new();
    for (i, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let zeros: Vec<usize> = (0..m).filter(|q| (i >> (m - 1 - q)) & 1 == 0).collect();
        for &q in &zeros {
            gates.push(GateSpec::named("x", &[q]));
        }
        gates.push(GateSpec::rotation("ry", m, acceptance_angle(p)).controlled_by(&controls));
        for &q in &zeros {
            gates.push(GateSpec::named("x", &[q]));
        }
    }
    gates.push(GateSpec::named("swap", &[0, m]));
    gates
}

/// Circuit description for [`Procedure::from_eigenbasis`].
pub fn eigenbasis_description(u: &ComplexMatrix, probs: &[f64]) -> Result<CircuitDescription> {
    if !probs.len().is_power_of_two() || probs.len() < 2 {
        return Err(Error::BadLength(format!("spectrum length {} is not a power of two >= 2", probs.len())));
    }
    if u.rows() != probs.len() || !u.is_square() {
        return Err(Error::DimensionMismatch(format!("basis is {}x{}, spectrum has {}", u.rows(), u.cols(), probs.len())));
    }
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidInput(format!("probability {p} outside [0,1]")));
    }
    let m = probs.len().trailing_zeros() as usize;
    let wires: Vec<usize> = (0..m).collect();
    let mut gates = vec![GateSpec::unitary(&u.adjoint(), &wires)];
    gates.extend(spectrum_gates(m, probs));
    Ok(CircuitDescription {
        witness_qubits: m,
        ancilla_qubits: 1,
        outcomes: 2,
        gates,
    })
}

/// `V = SWAP(0,m) (U ⊗ I) C (U† ⊗ I)` where `E = U diag(p) U†` and `C`
/// rotates the ancilla by `ry(theta_i)` on the `i`-th eigenvector. Then
/// `<ψ,0| V† (|1><1| ⊗ I) V |ψ,0> = <ψ|E|ψ>`.
pub fn canonical_dilation(witness_qubits: usize, e1: &ComplexMatrix) -> Result<Realization> {
    let m = witness_qubits;
    let eig = hermitian_eigendecomposition(e1)?;
    let u = eig.vectors.clone();
    let wires: Vec<usize> = (0..m).collect();
    let dim = 1usize << m;
    let mut block = ComplexMatrix::zeros(2 * dim, 2 * dim);
    for (i, &p) in eig.values.iter().enumerate() {
        let r = crate::circuit::ry_matrix(acceptance_angle(p));
        for a in 0..2 {
            for b in 0..2 {
                block[(2 * i + a, 2 * i + b)] = r[(a, b)];
            }
        }
    }
    let mut all = wires.clone();
    all.push(m);
    let gates = vec![
        Gate::raw(u.adjoint(), wires.clone(), vec![])?,
        Gate::raw(block, all, vec![])?,
        Gate::raw(u, wires, vec![])?,
        Gate::from_spec(&GateSpec::named("swap", &[0, m]))?,
    ];
    Ok(Realization {
        witness_qubits: m,
        ancilla_qubits: 1,
        outcomes: 2,
        circuit: Circuit::new(m + 1, gates)?,
    })
}

/// Named thresholds of a verification task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub a: f64,
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_prime: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Plain,
    Total,
    TwoSided,
    ThreeOutcome,
}

/// A procedure with its promise thresholds.
#[derive(Debug, Clone)]
pub struct VerificationTask {
    pub procedure: Procedure,
    pub thresholds: Thresholds,
    pub kind: TaskKind,
}

impl VerificationTask {
    pub fn new(procedure: Procedure, thresholds: Thresholds, kind: TaskKind, gap: f64) -> Result<Self> {
        let in_unit = |x: f64| x > 0.0 && x < 1.0;
        let all = [Some(thresholds.a), Some(thresholds.b), thresholds.a_prime, thresholds.b_prime];
        if all.iter().flatten().any(|x| !in_unit(*x)) {
            return Err(Error::InvalidInput("thresholds must lie in (0,1)".into()));
        }
        if thresholds.a - thresholds.b < gap || gap <= 0.0 {
            return Err(Error::GapTooSmall(format!(
                "a - b = {} below declared gap {gap}",
                thresholds.a - thresholds.b
            )));
        }
        if let (Some(a2), Some(b2)) = (thresholds.a_prime, thresholds.b_prime) {
            if a2 - b2 < gap {
                return Err(Error::GapTooSmall(format!("a' - b' = {} below declared gap {gap}", a2 - b2)));
            }
        }
        if kind == TaskKind::ThreeOutcome && procedure.outcomes() != 3 {
            return Err(Error::WrongAlphabet("three-outcome task needs 3 outcomes".into()));
        }
        Ok(Self {
            procedure,
            thresholds,
            kind,
        })
    }
}

/// POVM-level JSON for derived procedures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmJson {
    pub witness_qubits: usize,
    pub alphabet: Vec<String>,
    pub povm: Vec<MatrixJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| (0..m.rows()).map(|r| (0..m.cols()).map(|c| f(&m[(r, c)])).collect()).collect();
        Self {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.re.len();
        let cols = self.re.first().map_or(0, |r| r.len());
        if self.im.len() != n || self.re.iter().chain(&self.im).any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("re/im shapes differ".into()));
        }
        let data = (0..n * cols)
            .map(|i| Complex64::new(self.re[i / cols][i % cols], self.im[i / cols][i % cols]))
            .collect();
        ComplexMatrix::from_row_major(n, cols, data)
    }
}

/// Any procedure file: a circuit description or an explicit POVM.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProcedureJson {
    Circuit(CircuitDescription),
    Povm(PovmJson),
}

impl ProcedureJson {
    pub fn build(&self, limits: &Limits) -> Result<Procedure> {
        match self {
            ProcedureJson::Circuit(d) => build_procedure(d, limits),
            ProcedureJson::Povm(p) => {
                if p.witness_qubits > limits.qubit_cap {
                    return Err(Error::TooManyQubits {
                        requested: p.witness_qubits,
                        cap: limits.qubit_cap,
                    });
                }
                let povm = p.povm.iter().map(|m| m.to_matrix()).collect::<Result<Vec<_>>>()?;
                Procedure::from_povm(p.witness_qubits, povm, p.alphabet.clone())
            }
        }
    }

    pub fn from_procedure(q: &Procedure) -> Self {
        ProcedureJson::Povm(PovmJson {
            witness_qubits: q.witness_qubits(),
            alphabet: q.alphabet().to_vec(),
            povm: q.povm().iter().map(MatrixJson::from_matrix).collect(),
        })
    }
}
