//! Two- and three-outcome conversions and the total procedure, evaluated on
//! the eigenstates of a diagonal procedure.

use qvp::constructions::{pair_from_q3, q2_from_q3, q2_from_total, q3_from_pair, q3_from_q2, qt_from_q2};
use qvp::linalg::PureState;
use qvp::procedure::Procedure;
use qvp::tolerances::Limits;

fn main() -> qvp::Result<()> {
    let limits = Limits::default();
    let probs = [0.75, 5.0 / 6.0, 0.5, 0.1];
    let q = Procedure::from_spectrum(&probs)?;
    let q3 = q3_from_q2(&q, &limits)?;
    let qt = qt_from_q2(&q, &limits)?;
    let back = q2_from_q3(&q3)?;
    let total = q2_from_total(&q)?;
    println!("alphabet {:?}", q3.alphabet());
    for (i, p) in probs.iter().enumerate() {
        let e = PureState::basis(4, i)?;
        println!(
            "p = {p:.4}: Q3 {:?}  Qt {:.6}  Q2(Q3) {:.6}  (1+p)/2 {:.6}",
            q3.probabilities_pure(&e)?.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>(),
            qt.accept_probability(&e)?,
            back.accept_probability(&e)?,
            total.accept_probability(&e)?
        );
    }
    let (l, lbar) = pair_from_q3(&q3)?;
    let routed = q3_from_pair(&l, &lbar, &limits)?;
    println!("routed pair acts on {} witness qubits", routed.witness_qubits());
    Ok(())
}
