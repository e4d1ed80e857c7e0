//! A Boolean circuit with a 6-bit tape whose acceptance probabilities match a
//! diagonal quantum procedure, and the iterative maps on both.

use qvp::classical::{acceptance_sets, classical_iterative, diagonal_counterpart, witness_bits};
use qvp::constructions::conversions::qt_plan;
use qvp::constructions::qt_from_q2;
use qvp::linalg::PureState;
use qvp::procedure::Procedure;
use qvp::tolerances::Limits;

fn main() -> qvp::Result<()> {
    let limits = Limits::default();
    let nums = [48u64, 16, 60, 2];
    let c = diagonal_counterpart(&nums, 6)?;
    let sets = acceptance_sets(&c, &[], 2.0 / 3.0, 1.0 / 3.0)?;
    println!("p_y {:?}; accepting {:?}, rejecting {:?}", sets.p, sets.high, sets.low);
    let q = Procedure::from_spectrum(&nums.iter().map(|&n| n as f64 / 64.0).collect::<Vec<_>>())?;
    let qt = qt_from_q2(&q, &limits)?;
    for j in 0..nums.len() {
        let classical = classical_iterative(&c, &[], &witness_bits(j, 2), &qt_plan(), &limits)?[1];
        let quantum = qt.accept_probability(&PureState::basis(4, j)?)?;
        println!("y = {j}: classical {classical:.15}  quantum {quantum:.15}");
    }
    Ok(())
}
