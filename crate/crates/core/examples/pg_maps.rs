//! The induced map `P_g`: identity weights, the squaring map behind the total
//! procedure, and a steep threshold.

use qvp::iterative::{pg, pg_derivative, IterativePlan};

fn main() -> qvp::Result<()> {
    let identity = IterativePlan::binary(&(0..=10).map(|k| k as f64 / 10.0).collect::<Vec<_>>())?;
    let beta = IterativePlan::binary(&[1.0, 0.0, 1.0])?;
    let threshold = IterativePlan::threshold(64, 40)?;
    println!("{:>6} {:>10} {:>10} {:>12} {:>12}", "p", "identity", "beta", "threshold", "d/dp");
    for i in 0..=12 {
        let p = i as f64 / 12.0;
        println!(
            "{p:>6.3} {:>10.6} {:>10.6} {:>12.6} {:>12.4e}",
            pg(&identity, p)?,
            pg(&beta, p)?,
            pg(&threshold, p)?,
            pg_derivative(&threshold, p)?
        );
    }
    println!("beta(5/6) = {} (13/18 = {})", pg(&beta, 5.0 / 6.0)?, 13.0 / 18.0);
    Ok(())
}
