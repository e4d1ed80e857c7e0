//! Synthesize a map sending `2/3 ↦ 1/7` and `3/4 ↦ 6/7`, then apply it to a
//! procedure and certify that eigenspaces are preserved.

use qvp::emap::{apply_emap, synthesize, verify_emap};
use qvp::constructions::qp_targets;
use qvp::linalg::random::random_state;
use qvp::procedure::Procedure;
use qvp::tolerances::{Limits, SYNTHESIS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qvp::Result<()> {
    let limits = Limits::default();
    let targets = qp_targets();
    let em = synthesize(&targets, SYNTHESIS, limits.n_cap)?;
    println!("N = {}, Λ = {:.4} (< δ/3 = {:.4}), max residual {:.1e}", em.n, em.big_lambda, targets.delta / 3.0, em.max_residual());
    for (s, t) in targets.s.iter().zip(&targets.t) {
        println!("  f({s:.4}) = {:.12}  target {t:.12}", em.f(*s));
    }
    let q = Procedure::from_spectrum(&[0.75, 2.0 / 3.0, 0.2, 1.0])?;
    let q2 = apply_emap(&q, &em, &limits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let samples: Vec<_> = (0..5).map(|_| random_state(2, &mut rng)).collect();
    let cert = verify_emap(&q, &q2, &samples)?;
    println!("commutator {:.1e}, projector mismatch {:.1e}, passes {}", cert.commutator, cert.projector_mismatch, cert.passes());
    Ok(())
}
