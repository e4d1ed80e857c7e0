//! The complement verifier on a planted robust pair: high acceptance off the
//! language, at most 1/4 on it.

use qvp::constructions::{qco, qco_certificate};
use qvp::fixtures::robust_pair;
use qvp::tolerances::Limits;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qvp::Result<()> {
    let limits = Limits::default();
    let rp = robust_pair(7, 2, 1)?;
    let (qt, q_in, q_out) = rp.procedures(&limits)?;
    let off = qco(&q_out, &qt, &rp.reduction, rp.thresholds, &limits)?;
    let c = qco_certificate(&off, &qt, rp.thresholds.a_prime, false)?;
    println!("x not in L: best witness accepted {:.6} (>= (1-η)² = {:.6})", c.completeness.unwrap(), c.completeness_bound);
    let on = qco(&q_in, &qt, &rp.reduction, rp.thresholds, &limits)?;
    let d = qco_certificate(&on, &qt, rp.thresholds.a_prime, true)?.soundness.unwrap();
    println!("x in L: max entry {:.2e} (η = {}), Tr M1² {:.2e}, top eigenvalue {:.2e}", d.max_entry, d.eta, d.trace_square, d.top_eigenvalue);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let psi = &rp.witnesses[0];
    let shots = 500;
    let hits = (0..shots).filter(|_| off.run_sampled(psi, &mut rng, &limits).unwrap_or(false)).count();
    println!("sampled seven-step run off the language: {hits}/{shots} accepts");
    Ok(())
}
