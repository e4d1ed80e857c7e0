//! Threshold amplification of a (2/3, 1/3) procedure to error 2^-10.

use qvp::iterative::amplify_threshold;
use qvp::procedure::Procedure;
use qvp::spectral::spectrum;
use qvp::tolerances::Limits;

fn main() -> qvp::Result<()> {
    let q = Procedure::from_spectrum(&[0.7, 0.3, 0.9, 0.05])?;
    let amp = amplify_threshold(&q, 2.0 / 3.0, 1.0 / 3.0, 10, &Limits::default())?;
    let c = &amp.certificate;
    println!("N = {}, accept when at least {} neighbours agree", c.n, c.s0);
    println!("completeness {:.6e} off 1, soundness {:.6e}", 1.0 - c.completeness, c.soundness);
    println!("amplified spectrum {:?}", spectrum(&amp.procedure)?.probabilities());
    Ok(())
}
