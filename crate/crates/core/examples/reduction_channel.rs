//! A reduction channel in Stinespring form, the pulled-back procedure and a
//! randomized robustness probe on a fixture with a planted fault.

use qvp::constructions::{compose_reduction, probe_robustness};
use qvp::fixtures::{planted_fault, robust_pair};
use qvp::linalg::DensityMatrix;
use qvp::tolerances::Limits;

fn main() -> qvp::Result<()> {
    let limits = Limits::default();
    for (label, rp) in [("robust pair", robust_pair(5, 2, 1)?), ("planted fault", planted_fault(5)?)] {
        let (qt, q_in, _) = rp.procedures(&limits)?;
        let pulled = compose_reduction(&q_in, &rp.reduction.phi)?;
        let rho = DensityMatrix::maximally_mixed(qt.witness_qubits());
        let out = rp.reduction.phi.apply(&rho)?;
        println!("{label}: Φ(I/4) purity {:.4}, Q∘Φ on I/4 {:.4}", out.purity(), pulled.acceptance_probabilities(&rho)?[1]);
        let r = probe_robustness(&q_in, &qt, &rp.reduction, rp.thresholds.a, rp.thresholds.a_prime, 400, 1)?;
        println!("  min acceptance {:.4} vs a = {:.4}: counterexample {}", r.empirical_min, r.target, r.counterexample_found);
    }
    Ok(())
}
