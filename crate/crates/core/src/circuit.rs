//! Gate lists, their JSON form, and statevector application.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, PureState, ONE, ZERO};
use crate::tolerances::GATE_UNITARY;

/// Raw-unitary gates read from JSON may act on at most this many qubits.
pub const MAX_RAW_GATE_QUBITS: usize = 3;

/// One gate as it appears in circuit JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub g: String,
    pub q: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl GateSpec {
    pub fn named(g: &str, q: &[usize]) -> Self {
        Self {
            g: g.into(),
            q: q.to_vec(),
            c: vec![],
            theta: None,
            re: None,
            im: None,
        }
    }

    pub fn rotation(g: &str, q: usize, theta: f64) -> Self {
        Self {
            theta: Some(theta),
            ..Self::named(g, &[q])
        }
    }

    pub fn unitary(m: &ComplexMatrix, q: &[usize]) -> Self {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.rows()).map(|r| (0..m.cols()).map(|c| f(&m[(r, c)])).collect()).collect()
        };
        Self {
            re: Some(rows(|z| z.re)),
            im: Some(rows(|z| z.im)),
            ..Self::named("u", q)
        }
    }

    pub fn controlled_by(mut self, controls: &[usize]) -> Self {
        self.c.extend_from_slice(controls);
        self
    }
}

/// A compiled gate: a `2^r x 2^r` matrix on `targets`, applied when every
/// control qubit is 1. `targets[0]` is the most significant local bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    matrix: ComplexMatrix,
    targets: Vec<usize>,
    controls: Vec<usize>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mat2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, 2, vec![a, b, cc, d]).expect("2x2")
}

pub fn pauli_x() -> ComplexMatrix {
    mat2(ZERO, ONE, ONE, ZERO)
}

pub fn ry_matrix(theta: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    mat2(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

fn swap_matrix() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = ONE;
    m
}

impl Gate {
    /// Gate with an explicit matrix and no size limit. The matrix must be unitary.
    pub fn raw(matrix: ComplexMatrix, targets: Vec<usize>, controls: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != 1usize << targets.len() {
            return Err(Error::MalformedGate(format!(
                "matrix is {}x{} but gate has {} targets",
                matrix.rows(),
                matrix.cols(),
                targets.len()
            )));
        }
        let defect = matrix.unitary_defect();
        if defect > GATE_UNITARY {
            return Err(Error::NonUnitaryGate(defect));
        }
        Ok(Self {
            matrix,
            targets,
            controls,
        })
    }

    pub fn from_spec(spec: &GateSpec) -> Result<Self> {
        let arity = |n: usize| -> Result<()> {
            if spec.q.len() != n {
                return Err(Error::MalformedGate(format!(
                    "gate '{}' takes {n} qubit(s), got {}",
                    spec.g,
                    spec.q.len()
                )));
            }
            Ok(())
        };
        let theta = || {
            spec.theta
                .filter(|t| t.is_finite())
                .ok_or_else(|| Error::MalformedGate(format!("gate '{}' needs a finite theta", spec.g)))
        };
        let h = FRAC_1_SQRT_2;
        let mut controls = spec.c.clone();
        let (matrix, targets) = match spec.g.as_str() {
            "h" | "x" | "y" | "z" | "s" | "t" | "rx" | "ry" | "rz" => {
                arity(1)?;
                let m = match spec.g.as_str() {
                    "h" => mat2(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)),
                    "x" => pauli_x(),
                    "y" => mat2(ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO),
                    "z" => mat2(ONE, ZERO, ZERO, c(-1.0, 0.0)),
                    "s" => mat2(ONE, ZERO, ZERO, c(0.0, 1.0)),
                    "t" => mat2(ONE, ZERO, ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)),
                    "rx" => {
                        let (s, co) = (theta()? / 2.0).sin_cos();
                        mat2(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0))
                    }
                    "ry" => ry_matrix(theta()?),
                    _ => {
                        let t = theta()? / 2.0;
                        mat2(Complex64::from_polar(1.0, -t), ZERO, ZERO, Complex64::from_polar(1.0, t))
                    }
                };
                (m, spec.q.clone())
            }
            "cx" | "cz" => {
                arity(2)?;
                controls.push(spec.q[0]);
                let m = if spec.g == "cx" {
                    pauli_x()
                } else {
                    mat2(ONE, ZERO, ZERO, c(-1.0, 0.0))
                };
                (m, vec![spec.q[1]])
            }
            "ccx" => {
                arity(3)?;
                controls.extend_from_slice(&spec.q[..2]);
                (pauli_x(), vec![spec.q[2]])
            }
            "swap" => {
                arity(2)?;
                (swap_matrix(), spec.q.clone())
            }
            "u" | "unitary" => {
                if spec.q.is_empty() || spec.q.len() > MAX_RAW_GATE_QUBITS {
                    return Err(Error::MalformedGate(format!(
                        "raw unitary must act on 1..={MAX_RAW_GATE_QUBITS} qubits, got {}",
                        spec.q.len()
                    )));
                }
                let (re, im) = match (&spec.re, &spec.im) {
                    (Some(re), Some(im)) => (re, im),
                    _ => return Err(Error::MalformedGate("raw unitary needs 're' and 'im'".into())),
                };
                let d = 1usize << spec.q.len();
                if re.len() != d || im.len() != d || re.iter().chain(im).any(|r| r.len() != d) {
                    return Err(Error::MalformedGate(format!("raw unitary must be {d}x{d}")));
                }
                let data = (0..d * d).map(|i| c(re[i / d][i % d], im[i / d][i % d])).collect();
                let m = ComplexMatrix::from_row_major(d, d, data)
                    .map_err(|e| Error::MalformedGate(e.to_string()))?;
                (m, spec.q.clone())
            }
            other => return Err(Error::MalformedGate(format!("unknown gate '{other}'"))),
        };
        Self::raw(matrix, targets, controls)
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    fn check_register(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for &q in self.targets.iter().chain(&self.controls) {
            if q >= n || seen[q] {
                return Err(Error::BadIndex(format!(
                    "gate qubit {q} out of range or repeated in a {n}-qubit register"
                )));
            }
            seen[q] = true;
        }
        Ok(())
    }

    /// In-place application to a `2^n` statevector. Qubit indices must already be validated.
    pub fn apply(&self, amps: &mut [Complex64], n: usize) {
        let bit = |q: usize| 1usize << (n - 1 - q);
        let r = self.targets.len();
        let tmask: usize = self.targets.iter().map(|&q| bit(q)).sum();
        let cmask: usize = self.controls.iter().map(|&q| bit(q)).sum();
        let offsets: Vec<usize> = (0..1usize << r)
            .map(|l| {
                (0..r)
                    .filter(|j| (l >> (r - 1 - j)) & 1 == 1)
                    .map(|j| bit(self.targets[j]))
                    .sum()
            })
            .collect();
        let mut local = vec![ZERO; offsets.len()];
        for base in 0..amps.len() {
            if base & tmask != 0 || base & cmask != cmask {
                continue;
            }
            for (slot, off) in local.iter_mut().zip(&offsets) {
                *slot = amps[base + off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (col, v) in local.iter().enumerate() {
                    acc += self.matrix[(row, col)] * v;
                }
                amps[base + off] = acc;
            }
        }
    }
}

/// Compiled gate sequence on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.check_register(num_qubits)?;
        }
        Ok(Self { num_qubits, gates })
    }

    pub fn from_specs(num_qubits: usize, specs: &[GateSpec]) -> Result<Self> {
        let gates = specs.iter().map(Gate::from_spec).collect::<Result<Vec<_>>>()?;
        Self::new(num_qubits, gates)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn apply_in_place(&self, amps: &mut [Complex64]) {
        assert_eq!(amps.len(), 1usize << self.num_qubits, "register size");
        for g in &self.gates {
            g.apply(amps, self.num_qubits);
        }
    }

    /// Applies the inverse circuit.
    pub fn apply_adjoint_in_place(&self, amps: &mut [Complex64]) {
        assert_eq!(amps.len(), 1usize << self.num_qubits, "register size");
        for g in self.gates.iter().rev() {
            let inv = Gate {
                matrix: g.matrix.adjoint(),
                targets: g.targets.clone(),
                controls: g.controls.clone(),
            };
            inv.apply(amps, self.num_qubits);
        }
    }

    /// Dense `2^n x 2^n` unitary. Only used by oracles and small registers.
    pub fn unitary(&self) -> ComplexMatrix {
        let d = 1usize << self.num_qubits;
        let cols: Vec<Vec<Complex64>> = (0..d)
            .map(|i| {
                let mut v = vec![ZERO; d];
                v[i] = ONE;
                self.apply_in_place(&mut v);
                v
            })
            .collect();
        ComplexMatrix::from_columns(d, &cols)
    }
}

/// Applies `gates` to `state`, validating qubit indices against the register.
pub fn apply_gate_sequence(state: &PureState, gates: &[Gate]) -> Result<PureState> {
    let n = state.num_qubits();
    let circuit = Circuit::new(n, gates.to_vec())?;
    let mut amps = state.amplitudes().to_vec();
    circuit.apply_in_place(&mut amps);
    Ok(PureState::normalized(amps).expect("unitary evolution keeps the norm"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gate(g: &str, q: &[usize]) -> Gate {
        Gate::from_spec(&GateSpec::named(g, q)).unwrap()
    }

    #[test]
    fn hadamard_on_zero() {
        let s = apply_gate_sequence(&PureState::basis(2, 0).unwrap(), &[gate("h", &[0])]).unwrap();
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cx_control_is_first_listed_qubit() {
        // |10> -> |11>
        let s = apply_gate_sequence(&PureState::basis(4, 2).unwrap(), &[gate("cx", &[0, 1])]).unwrap();
        assert!((s.amplitudes()[3] - ONE).norm() < 1e-15);
    }

    #[test]
    fn extra_controls_gate_the_operation() {
        let g = Gate::from_spec(&GateSpec::named("x", &[2]).controlled_by(&[0])).unwrap();
        let off = apply_gate_sequence(&PureState::basis(8, 0b010).unwrap(), &[g.clone()]).unwrap();
        assert!((off.amplitudes()[0b010] - ONE).norm() < 1e-15);
        let on = apply_gate_sequence(&PureState::basis(8, 0b100).unwrap(), &[g]).unwrap();
        assert!((on.amplitudes()[0b101] - ONE).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_gates() {
        assert!(matches!(Gate::from_spec(&GateSpec::named("foo", &[0])), Err(Error::MalformedGate(_))));
        assert!(matches!(Gate::from_spec(&GateSpec::named("rx", &[0])), Err(Error::MalformedGate(_))));
        let bad = ComplexMatrix::from_diagonal(&[1.0, 2.0]);
        assert!(matches!(Gate::from_spec(&GateSpec::unitary(&bad, &[0])), Err(Error::NonUnitaryGate(_))));
        assert!(matches!(
            apply_gate_sequence(&PureState::basis(2, 0).unwrap(), &[gate("x", &[1])]),
            Err(Error::BadIndex(_))
        ));
    }

    #[test]
    fn adjoint_inverts() {
        let specs = vec![
            GateSpec::named("h", &[0]),
            GateSpec::rotation("ry", 1, 0.3),
            GateSpec::named("cx", &[0, 1]),
            GateSpec::named("t", &[1]),
        ];
        let circ = Circuit::from_specs(2, &specs).unwrap();
        let mut v = vec![c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.5, 0.0)];
        let orig = v.clone();
        circ.apply_in_place(&mut v);
        circ.apply_adjoint_in_place(&mut v);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
