//! Channels in Stinespring form and reductions between procedures.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateSpec};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, ZERO};
use crate::procedure::Procedure;
use crate::tolerances::Limits;

/// `ρ ↦ Tr_rest[ U (ρ ⊗ |0..0><0..0|) U† ]`, keeping the first `out_qubits`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitChannel {
    pub in_qubits: usize,
    pub fresh_ancillas: usize,
    pub out_qubits: usize,
    pub gates: Vec<GateSpec>,
}

impl CircuitChannel {
    pub fn identity(qubits: usize) -> Self {
        Self {
            in_qubits: qubits,
            fresh_ancillas: 0,
            out_qubits: qubits,
            gates: vec![],
        }
    }

    pub fn total_qubits(&self) -> usize {
        self.in_qubits + self.fresh_ancillas
    }

    pub fn validate(&self, limits: &Limits) -> Result<()> {
        let total = self.total_qubits();
        if total > limits.qubit_cap {
            return Err(Error::TooManyQubits { requested: total, cap: limits.qubit_cap });
        }
        if self.in_qubits == 0 || self.out_qubits == 0 || self.out_qubits > total {
            return Err(Error::InvalidReduction(format!(
                "need 1 <= out_qubits <= in_qubits + fresh_ancillas, got {} of {total}",
                self.out_qubits
            )));
        }
        Circuit::from_specs(total, &self.gates).map(|_| ())
    }

    fn circuit(&self) -> Result<Circuit> {
        Circuit::from_specs(self.total_qubits(), &self.gates)
    }

    /// Columns `U|j, 0>` of the Stinespring isometry.
    fn isometry(&self) -> Result<Vec<Vec<Complex64>>> {
        let c = self.circuit()?;
        let full = 1usize << self.total_qubits();
        Ok((0..1usize << self.in_qubits)
            .map(|j| {
                let mut v = vec![ZERO; full];
                v[j << self.fresh_ancillas] = Complex64::new(1.0, 0.0);
                c.apply_in_place(&mut v);
                v
            })
            .collect())
    }

    fn rest(&self) -> usize {
        1usize << (self.total_qubits() - self.out_qubits)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let din = 1usize << self.in_qubits;
        if rho.dim() != din {
            return Err(Error::DimensionMismatch(format!("channel input dimension {din}, state {}", rho.dim())));
        }
        let w = self.isometry()?;
        let (dout, rest) = (1usize << self.out_qubits, self.rest());
        let m = rho.matrix();
        // Y = W ρ, column-wise over the input basis.
        let full = w[0].len();
        let mut y = vec![vec![ZERO; full]; din];
        for (b, yb) in y.iter_mut().enumerate() {
            for (a, wa) in w.iter().enumerate() {
                let r = m[(a, b)];
                if r != ZERO {
                    for (t, x) in yb.iter_mut().zip(wa) {
                        *t += r * x;
                    }
                }
            }
        }
        let mut out = ComplexMatrix::zeros(dout, dout);
        for i in 0..dout {
            for j in 0..dout {
                let mut acc = ZERO;
                for r in 0..rest {
                    let (ii, jj) = (i * rest + r, j * rest + r);
                    for (b, yb) in y.iter().enumerate() {
                        acc += yb[ii] * w[b][jj].conj();
                    }
                }
                out[(i, j)] = acc;
            }
        }
        DensityMatrix::new(out.hermitian_part())
    }

    /// Heisenberg picture `Φ†(X)`, so that `Tr[X Φ(ρ)] = Tr[Φ†(X) ρ]`.
    pub fn adjoint_apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let dout = 1usize << self.out_qubits;
        if x.rows() != dout || !x.is_square() {
            return Err(Error::DimensionMismatch(format!("observable must be {dout}x{dout}")));
        }
        let w = self.isometry()?;
        let rest = self.rest();
        let xw: Vec<Vec<Complex64>> = w
            .iter()
            .map(|wb| {
                let mut v = vec![ZERO; wb.len()];
                for i in 0..dout {
                    for j in 0..dout {
                        let xij = x[(i, j)];
                        if xij != ZERO {
                            for r in 0..rest {
                                v[i * rest + r] += xij * wb[j * rest + r];
                            }
                        }
                    }
                }
                v
            })
            .collect();
        let din = w.len();
        Ok(ComplexMatrix::from_fn(din, din, |a, b| crate::linalg::inner(&w[a], &xw[b])))
    }
}

/// Instance map plus witness channel, robust with parameter `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reduction {
    pub f: BTreeMap<String, String>,
    pub phi: CircuitChannel,
    pub epsilon: f64,
}

impl Reduction {
    /// Parses reduction JSON, rejecting probabilistic channel descriptions explicitly.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let probabilistic = ["kraus", "mixture", "probabilities"];
        let phi = v.get("phi");
        if probabilistic.iter().any(|k| v.get(k).is_some() || phi.and_then(|p| p.get(k)).is_some()) {
            return Err(Error::InvalidReduction("probabilistic channels are not supported; give phi as a single circuit".into()));
        }
        let red: Reduction = serde_json::from_value(v).map_err(|e| Error::InvalidReduction(e.to_string()))?;
        if !(red.epsilon >= 0.0 && red.epsilon.is_finite()) {
            return Err(Error::InvalidReduction(format!("epsilon {} must be finite and >= 0", red.epsilon)));
        }
        Ok(red)
    }

    pub fn map_instance(&self, x: &str) -> Result<&str> {
        self.f
            .get(x)
            .map(String::as_str)
            .ok_or_else(|| Error::InvalidReduction(format!("instance '{x}' not in the instance map")))
    }
}

/// `Q^R(ρ) = Q(Φ(ρ))`: every POVM element is pulled back through `Φ†`.
pub fn compose_reduction(q: &Procedure, phi: &CircuitChannel) -> Result<Procedure> {
    if 1usize << phi.out_qubits != q.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel outputs {} qubits, procedure takes {}",
            phi.out_qubits,
            q.witness_qubits()
        )));
    }
    let povm = q.povm().iter().map(|e| phi.adjoint_apply(e)).collect::<Result<Vec<_>>>()?;
    Procedure::from_povm(phi.in_qubits, povm, q.alphabet().to_vec())
}
