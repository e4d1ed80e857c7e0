//! A nondestructive wrapper returns eigenstate inputs unchanged on accept and
//! moves superpositions toward higher acceptance.

use num_complex::Complex64;
use qvp::emap::TargetPointSet;
use qvp::iterative::make_nondestructive;
use qvp::linalg::PureState;
use qvp::procedure::Procedure;
use qvp::tolerances::{Limits, SYNTHESIS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qvp::Result<()> {
    let limits = Limits::default();
    let q = Procedure::from_spectrum(&[0.9, 0.3])?;
    let targets = TargetPointSet::with_min_gaps(vec![0.0, 0.3, 0.9, 1.0], vec![0.0, 0.1, 0.8, 1.0])?;
    let nd = make_nondestructive(&q, &targets, SYNTHESIS, &limits)?;
    let eigen = PureState::basis(2, 0)?;
    let (p, post) = nd.run_exact(&eigen)?;
    println!("eigenstate p = 0.9: accept {p:.6}, post fidelity {:.12}", post.unwrap().fidelity(&eigen));

    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let plus = PureState::new(vec![h, h])?;
    let (p, post) = nd.run_exact(&plus)?;
    let post = post.unwrap();
    println!("|+>: accept {p:.6}; Q acceptance {:.4} -> {:.4}", q.accept_probability(&plus)?, q.accept_probability(&post)?);

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let accepts = (0..2000).filter(|_| nd.run(&plus, &mut rng, &limits).map(|r| r.accept).unwrap_or(false)).count();
    println!("sampled accept rate {:.4} over 2000 runs", accepts as f64 / 2000.0);
    Ok(())
}
