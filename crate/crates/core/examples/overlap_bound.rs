//! The adversarial mixture that meets the total-procedure threshold with the
//! least weight on high-acceptance eigenstates, and the resulting `Qᴾ` gap.

use qvp::constructions::bqp::{OVERLAP_BOUND, QT_THRESHOLD};
use qvp::constructions::{beta, bqp_overlap_bound, qp_from_q2};
use qvp::linalg::{DensityMatrix, PureState};
use qvp::procedure::Procedure;
use qvp::tolerances::Limits;

fn main() -> qvp::Result<()> {
    let limits = Limits::default();
    let q2 = Procedure::from_spectrum(&[1.0, 0.74, 1.0 / 3.0, 0.9])?;
    let w = (QT_THRESHOLD - beta(0.74)) / (beta(1.0) - beta(0.74));
    let rho = DensityMatrix::mixture(&[w, 1.0 - w], &[PureState::basis(4, 0)?, PureState::basis(4, 1)?])?;
    let c = bqp_overlap_bound(&q2, &rho, &limits)?;
    println!("Qt acceptance {:.6} (threshold {:.6})", c.qt_acceptance, QT_THRESHOLD);
    println!("overlap {:.9} vs bound 7/27 = {:.9}", c.overlap, OVERLAP_BOUND);
    let (qp, em) = qp_from_q2(&q2, &limits)?;
    println!("f(3/4) = {:.10}, f(2/3) = {:.10}", em.f(0.75), em.f(2.0 / 3.0));
    println!("Qp acceptance on the mixture {:.6} (>= 2/9 = {:.6})", qp.acceptance_probabilities(&rho)?[1], 2.0 / 9.0);
    Ok(())
}
