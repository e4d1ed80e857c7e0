//! Dense complex linear algebra on small qubit registers.
//!
//! Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
//! basis index.

pub mod eigen;
pub mod matrix;
pub mod random;
pub mod state;

pub use eigen::{hermitian_eigendecomposition, Eigendecomposition};
pub use matrix::{inner, norm_sqr, ComplexMatrix, ONE, ZERO};
pub use state::{qubits_for_dim, DensityMatrix, PureState, StateJson};
