//! Derived procedures: three- and two-outcome conversions, total procedures,
//! the `(2/9, 1/7)` procedure, reductions and the complement verifier.

pub mod bqp;
pub mod canonical;
pub mod channel;
pub mod conversions;
pub mod qco;
pub mod robustness;

pub use bqp::{bqp_overlap_bound, check_bqp_witness, BqpCertificate, BqpInstance, OverlapCertificate};
pub use canonical::{canonical_witness_sets, LabeledState, PairBounds, WitnessSets};
pub use channel::{compose_reduction, CircuitChannel, Reduction};
pub use conversions::{beta, pair_from_q3, q2_from_q3, q2_from_total, q3_from_pair, q3_from_q2, qp_from_q2, qp_targets, qt_from_q2};
pub use qco::{m1_diagnostics, qco, qco_certificate, qco_eta, M1Diagnostics, Qco, QcoCertificate, QcoThresholds};
pub use robustness::{probe_robustness, RobustnessReport};
