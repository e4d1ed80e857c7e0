//! Numeric tolerances and resource caps.
//!
//! Every threshold the crate compares against lives here. The caps can be
//! overridden from the environment (`QVP_QUBIT_CAP`, `QVP_N_CAP`) through
//! [`Limits::from_env`].

/// Squared-norm slack for a [`PureState`](crate::linalg::PureState).
pub const STATE_NORM: f64 = 1e-12;
/// Hermiticity and trace slack for a density matrix.
pub const DENSITY_HERMITIAN: f64 = 1e-12;
/// Most negative eigenvalue tolerated in a density matrix.
pub const DENSITY_NEGATIVE_EIGEN: f64 = -1e-10;
/// Hermiticity required of eigensolver input.
pub const EIGEN_HERMITIAN: f64 = 1e-10;
/// Unitarity required of raw gate matrices.
pub const GATE_UNITARY: f64 = 1e-10;
/// POVM positivity slack.
pub const POVM_POSITIVE: f64 = 1e-10;
/// Allowed deviation of `sum_w E_w` from the identity.
pub const POVM_COMPLETENESS: f64 = 1e-9;
/// Range slack before probabilities are clipped to `[0,1]`.
pub const PROBABILITY_SLACK: f64 = 1e-10;
/// Default spread allowed inside one spectral group.
pub const GROUPING: f64 = 1e-9;
/// Residual below which a state is considered inside a subspace.
pub const SUBSPACE_RESIDUAL: f64 = 1e-9;
/// Projector idempotence slack.
pub const PROJECTOR: f64 = 1e-10;
/// Default interpolation tolerance for synthesized e-maps.
pub const SYNTHESIS: f64 = 1e-9;
/// Commutator norm below which two POVM elements share an eigenbasis.
pub const JOINT_DIAGONAL: f64 = 1e-8;

/// Resource caps shared by the builders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    /// Maximum number of witness plus ancilla qubits in one register.
    pub qubit_cap: usize,
    /// Maximum step count of an iterative plan.
    pub n_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            qubit_cap: 14,
            n_cap: 4096,
        }
    }
}

impl Limits {
    /// Defaults, overridden by `QVP_QUBIT_CAP` / `QVP_N_CAP` when set.
    pub fn from_env() -> Self {
        let mut limits = Self::default();
        if let Some(v) = read_env("QVP_QUBIT_CAP") {
            limits.qubit_cap = v;
        }
        if let Some(v) = read_env("QVP_N_CAP") {
            limits.n_cap = v;
        }
        limits
    }
}

fn read_env(key: &str) -> Option<usize> {
    std::env::var(key).ok()?.trim().parse().ok()
}
