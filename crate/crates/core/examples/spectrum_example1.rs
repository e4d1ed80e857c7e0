//! Spectrum of the Example 1 family and the no-interference identity on a
//! random superposition of its eigenstates.

use num_complex::Complex64;
use qvp::fixtures::example1;
use qvp::spectral::{spectrum, verify_no_interference};

fn main() -> qvp::Result<()> {
    for n in [2, 4, 8] {
        let q = example1(n);
        let s = spectrum(&q)?;
        println!("n = {n}: eigenvalues {:?}", s.probabilities());
        let k = s.dim() as f64;
        let alphas: Vec<Complex64> = (0..s.dim()).map(|i| Complex64::from_polar(1.0 / k.sqrt(), i as f64)).collect();
        let c = verify_no_interference(&q, &s, &alphas)?;
        println!("  direct {:.15}  convex {:.15}  deviation {:.1e}", c.direct, c.convex, c.deviation);
    }
    Ok(())
}
