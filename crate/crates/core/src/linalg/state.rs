use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::hermitian_eigendecomposition;
use super::matrix::{inner, norm_sqr, ComplexMatrix, ZERO};
use crate::error::{Error, Result};
use crate::tolerances::{DENSITY_HERMITIAN, DENSITY_NEGATIVE_EIGEN, STATE_NORM};

pub fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::BadLength(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Normalized state vector on `log2(dim)` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        qubits_for_dim(amplitudes.len())?;
        let n = norm_sqr(&amplitudes);
        if !n.is_finite() || (n - 1.0).abs() > STATE_NORM {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        qubits_for_dim(amplitudes.len())?;
        let n = norm_sqr(&amplitudes).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        for z in amplitudes.iter_mut() {
            *z /= n;
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::BadIndex(format!("basis index {index} >= {dim}")));
        }
        let mut v = vec![ZERO; dim];
        v[index] = Complex64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `|<self|other>|^2`
    pub fn fidelity(&self, other: &PureState) -> f64 {
        inner(&self.amplitudes, &other.amplitudes).norm_sqr()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                out.push(a * b);
            }
        }
        PureState { amplitudes: out }
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("density matrix must be square".into()));
        }
        qubits_for_dim(matrix.rows())?;
        let defect = matrix.hermitian_defect();
        if defect > DENSITY_HERMITIAN {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > STATE_NORM {
            return Err(Error::NotNormalized(tr));
        }
        let eig = hermitian_eigendecomposition(&matrix)?;
        if let Some(&min) = eig.values.last() {
            if min < DENSITY_NEGATIVE_EIGEN {
                return Err(Error::InvalidInput(format!(
                    "density matrix has negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let d = 1usize << num_qubits;
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    /// `sum_j w_j |phi_j><phi_j|` with weights summing to one.
    pub fn mixture(weights: &[f64], states: &[PureState]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch("mixture weights vs states".into()));
        }
        let dim = states[0].dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch("mixture components differ in dimension".into()));
            }
            if *w < 0.0 {
                return Err(Error::InvalidInput("negative mixture weight".into()));
            }
            m = &m + &s.to_density().matrix.scale_real(*w);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product_real(&self.matrix)
    }

    /// `<psi| rho |psi>`
    pub fn fidelity_with_pure(&self, psi: &PureState) -> f64 {
        self.matrix.sandwich(psi.amplitudes(), psi.amplitudes()).re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// Reduced state on `keep`, in the order given; other qubits are traced out.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.num_qubits();
        let mut seen = vec![false; n];
        for &q in keep {
            if q >= n || seen[q] {
                return Err(Error::BadIndex(format!(
                    "qubit {q} invalid or repeated for a {n}-qubit register"
                )));
            }
            seen[q] = true;
        }
        let traced: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();
        let kd = 1usize << keep.len();
        let td = 1usize << traced.len();
        let compose = |ki: usize, ti: usize| -> usize {
            let mut idx = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                let bit = (ki >> (keep.len() - 1 - pos)) & 1;
                idx |= bit << (n - 1 - q);
            }
            for (pos, &q) in traced.iter().enumerate() {
                let bit = (ti >> (traced.len() - 1 - pos)) & 1;
                idx |= bit << (n - 1 - q);
            }
            idx
        };
        let mut out = ComplexMatrix::zeros(kd, kd);
        for r in 0..kd {
            for c in 0..kd {
                let mut acc = ZERO;
                for t in 0..td {
                    acc += self.matrix[(compose(r, t), compose(c, t))];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(DensityMatrix { matrix: out })
    }
}

/// JSON form of a witness state: a vector for pure states, a matrix for mixed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Pure { re: Vec<f64>, im: Vec<f64> },
    Density { re: Vec<Vec<f64>>, im: Vec<Vec<f64>> },
}

impl StateJson {
    pub fn into_density(self) -> Result<DensityMatrix> {
        match self {
            StateJson::Pure { re, im } => {
                if re.len() != im.len() {
                    return Err(Error::DimensionMismatch("re/im lengths differ".into()));
                }
                let amps = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
                Ok(PureState::new(amps)?.to_density())
            }
            StateJson::Density { re, im } => {
                let n = re.len();
                if im.len() != n || re.iter().chain(&im).any(|row| row.len() != n) {
                    return Err(Error::DimensionMismatch("density re/im must be square and equal".into()));
                }
                let data = (0..n * n)
                    .map(|i| Complex64::new(re[i / n][i % n], im[i / n][i % n]))
                    .collect();
                DensityMatrix::new(ComplexMatrix::from_row_major(n, n, data)?)
            }
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        StateJson::Pure {
            re: psi.amplitudes().iter().map(|z| z.re).collect(),
            im: psi.amplitudes().iter().map(|z| z.im).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(vec![c(s), ZERO, ZERO, c(s)]).unwrap();
        let r = bell.to_density().partial_trace(&[0]).unwrap();
        assert!(r.matrix().max_abs_diff(&DensityMatrix::maximally_mixed(1).matrix) < 1e-15);
    }

    #[test]
    fn product_state_factorizes() {
        let a = PureState::new(vec![c(0.6), c(0.8)]).unwrap().to_density();
        let b = DensityMatrix::maximally_mixed(1);
        let ab = a.tensor(&b);
        assert!(ab.partial_trace(&[0]).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-12);
        assert!(ab.partial_trace(&[1]).unwrap().matrix().max_abs_diff(b.matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_indices() {
        let r = DensityMatrix::maximally_mixed(2);
        assert!(matches!(r.partial_trace(&[2]), Err(Error::BadIndex(_))));
        assert!(matches!(r.partial_trace(&[0, 0]), Err(Error::BadIndex(_))));
    }

    #[test]
    fn state_validation() {
        assert!(PureState::new(vec![c(1.0), c(1.0)]).is_err());
        assert!(PureState::new(vec![c(1.0), ZERO, ZERO]).is_err());
        assert!(PureState::normalized(vec![c(1.0), c(1.0)]).is_ok());
    }
}
