//! Witness-family checks and the overlap bound behind the `(2/9, 1/7)` procedure.

use serde::{Deserialize, Serialize};

use super::conversions::qt_from_q2;
use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;
use crate::procedure::Procedure;
use crate::spectral::{overlap, spectrum, subspace_select, IntervalUnion};
use crate::tolerances::{Limits, PROBABILITY_SLACK};

pub const OVERLAP_BOUND: f64 = 7.0 / 27.0;
pub const QT_THRESHOLD: f64 = 13.0 / 18.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapCertificate {
    /// `Tr(E_1(Qᵀ) ρ)`
    pub qt_acceptance: f64,
    /// `Tr(Π ρ)` with `Π` onto the eigenspaces of `Q²` with `p ∈ [3/4, 1]`.
    pub overlap: f64,
    pub bound: f64,
    /// Whether `ρ` meets `qt_acceptance >= 13/18`, i.e. whether the bound applies.
    pub constraint_met: bool,
    pub holds: bool,
}

/// Requires the x-in-L spectrum shape: all eigenvalues `>= 1/3`, one `>= 5/6`.
pub fn bqp_overlap_bound(q2: &Procedure, rho: &DensityMatrix, limits: &Limits) -> Result<OverlapCertificate> {
    let s = spectrum(q2)?;
    let ps = s.probabilities();
    let (lo, hi) = (ps.iter().cloned().fold(1.0, f64::min), ps.iter().cloned().fold(0.0, f64::max));
    if lo < 1.0 / 3.0 - PROBABILITY_SLACK || hi < 5.0 / 6.0 - PROBABILITY_SLACK {
        return Err(Error::PreconditionViolated(format!(
            "spectrum [{lo}, {hi}] violates the promise (min >= 1/3, max >= 5/6)"
        )));
    }
    let qt = qt_from_q2(q2, limits)?;
    let qt_acceptance = qt.acceptance_probabilities(rho)?[1];
    let w = subspace_select(&s, &IntervalUnion::single(0.75, 1.0));
    let ov = overlap(rho, &w)?;
    let constraint_met = qt_acceptance >= QT_THRESHOLD - PROBABILITY_SLACK;
    Ok(OverlapCertificate {
        qt_acceptance,
        overlap: ov,
        bound: OVERLAP_BOUND,
        constraint_met,
        holds: !constraint_met || ov >= OVERLAP_BOUND - 1e-9,
    })
}

/// One instance of a witness family: procedure, promise side and proposed witness.
#[derive(Debug, Clone)]
pub struct BqpInstance {
    pub procedure: Procedure,
    pub in_language: bool,
    pub witness: DensityMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BqpRow {
    pub index: usize,
    pub in_language: bool,
    /// Witness acceptance when in the language, top eigenvalue otherwise.
    pub value: f64,
    pub bound: f64,
    /// Positive when the row passes.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BqpCertificate {
    pub rows: Vec<BqpRow>,
    pub pass: bool,
}

pub fn check_bqp_witness(family: &[BqpInstance], a: f64, b: f64) -> Result<BqpCertificate> {
    let mut rows = Vec::with_capacity(family.len());
    for (index, inst) in family.iter().enumerate() {
        let (value, bound, margin) = if inst.in_language {
            let v = inst.procedure.acceptance_probabilities(&inst.witness)?[1];
            (v, a, v - a)
        } else {
            let top = spectrum(&inst.procedure)?.probabilities().first().copied().unwrap_or(0.0);
            (top, b, b - top)
        };
        rows.push(BqpRow {
            index,
            in_language: inst.in_language,
            value,
            bound,
            margin,
            pass: margin >= -PROBABILITY_SLACK,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(BqpCertificate { rows, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::conversions::beta;
    use crate::linalg::PureState;

    fn q2() -> Procedure {
        Procedure::from_spectrum(&[5.0 / 6.0, 1.0 / 3.0, 0.74, 1.0]).unwrap()
    }

    #[test]
    fn eigenstate_saturates() {
        let rho = PureState::basis(4, 0).unwrap().to_density();
        let c = bqp_overlap_bound(&q2(), &rho, &Limits::default()).unwrap();
        assert!(c.constraint_met && c.holds && (c.overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adversarial_mixture_just_meets_bound() {
        // Weight w on p = 1 and 1-w on p = 0.74 with β-average exactly 13/18.
        let (b1, b2) = (beta(1.0), beta(0.74));
        let w = (QT_THRESHOLD - b2) / (b1 - b2);
        let rho = DensityMatrix::mixture(&[w, 1.0 - w], &[PureState::basis(4, 3).unwrap(), PureState::basis(4, 2).unwrap()]).unwrap();
        let c = bqp_overlap_bound(&q2(), &rho, &Limits::default()).unwrap();
        assert!(c.constraint_met && c.holds);
        assert!(c.overlap >= OVERLAP_BOUND - 1e-9);
    }

    #[test]
    fn promise_violation() {
        let q = Procedure::from_spectrum(&[0.2, 0.9]).unwrap();
        let rho = DensityMatrix::maximally_mixed(1);
        assert!(matches!(bqp_overlap_bound(&q, &rho, &Limits::default()), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn witness_family() {
        let id = Procedure::from_spectrum(&[0.0, 1.0]).unwrap();
        let good = BqpInstance { procedure: id.clone(), in_language: true, witness: PureState::basis(2, 1).unwrap().to_density() };
        assert!(check_bqp_witness(&[good], 1.0, 0.0).unwrap().pass);
        let bad = BqpInstance { procedure: id, in_language: true, witness: PureState::basis(2, 0).unwrap().to_density() };
        let c = check_bqp_witness(&[bad], 2.0 / 3.0, 1.0 / 3.0).unwrap();
        assert!(!c.pass && c.rows[0].margin < 0.0);
    }
}
