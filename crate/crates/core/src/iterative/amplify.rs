//! Threshold amplification: accept iff at least `s0` of `N` neighbour pairs agree.

use serde::{Deserialize, Serialize};

use super::engine::iterate_procedure;
use super::plan::{pg, IterativePlan};
use crate::error::{Error, Result};
use crate::procedure::Procedure;
use crate::tolerances::Limits;

#[derive(Debug, Clone)]
pub struct Amplified {
    pub procedure: Procedure,
    pub plan: IterativePlan,
    pub certificate: AmplificationCertificate,
}

/// Achieved bounds at the chosen plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplificationCertificate {
    #[serde(rename = "N")]
    pub n: usize,
    pub s0: usize,
    pub a: f64,
    pub b: f64,
    pub r: u32,
    /// `P_g(a)`, at least `1 - 2^-r`.
    pub completeness: f64,
    /// `P_g(b)`, at most `2^-r`.
    pub soundness: f64,
}

/// Hoeffding step count `⌈2 r ln 2 / (a-b)^2⌉`, at least 1.
pub fn chernoff_steps(a: f64, b: f64, r: u32) -> usize {
    ((2.0 * r as f64 * std::f64::consts::LN_2) / (a - b).powi(2)).ceil().max(1.0) as usize
}

pub fn threshold_plan(n: usize, a: f64, b: f64) -> Result<(IterativePlan, usize)> {
    let s0 = (n as f64 * (a + b) / 2.0).ceil() as usize;
    Ok((IterativePlan::threshold(n, s0)?, s0))
}

/// Plan mapping eigenvalues `>= a` to `>= 1 - 2^-r` and `<= b` to `<= 2^-r`.
/// The Hoeffding count is a starting point; `N` doubles until `pg` certifies both bounds.
pub fn amplify_plan(a: f64, b: f64, r: u32, limits: &Limits) -> Result<(IterativePlan, AmplificationCertificate)> {
    if !(0.0 <= b && b < a && a <= 1.0) {
        return Err(Error::GapTooSmall(format!("need 0 <= b < a <= 1, got a = {a}, b = {b}")));
    }
    let target = 0.5f64.powi(r as i32);
    let mut n = chernoff_steps(a, b, r);
    while n <= limits.n_cap {
        let (plan, s0) = threshold_plan(n, a, b)?;
        let (hi, lo) = (pg(&plan, a)?, pg(&plan, b)?);
        if hi >= 1.0 - target && lo <= target {
            let cert = AmplificationCertificate { n, s0, a, b, r, completeness: hi, soundness: lo };
            return Ok((plan, cert));
        }
        n *= 2;
    }
    Err(Error::GapTooSmall(format!(
        "gap {} needs N > cap {} for r = {r}",
        a - b,
        limits.n_cap
    )))
}

pub fn amplify_threshold(q: &Procedure, a: f64, b: f64, r: u32, limits: &Limits) -> Result<Amplified> {
    let (plan, certificate) = amplify_plan(a, b, r, limits)?;
    let procedure = iterate_procedure(q, &plan, limits)?;
    Ok(Amplified { procedure, plan, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::spectrum;

    #[test]
    fn two_thirds_one_third_r4() {
        let (plan, cert) = amplify_plan(2.0 / 3.0, 1.0 / 3.0, 4, &Limits::default()).unwrap();
        assert!(pg(&plan, 2.0 / 3.0).unwrap() >= 15.0 / 16.0);
        assert!(pg(&plan, 1.0 / 3.0).unwrap() <= 1.0 / 16.0);
        assert_eq!(cert.s0, (cert.n as f64 / 2.0).ceil() as usize);
    }

    #[test]
    fn certain_acceptance_stays_certain() {
        let q = Procedure::from_spectrum(&[1.0, 0.1]).unwrap();
        let amp = amplify_threshold(&q, 0.6, 0.3, 5, &Limits::default()).unwrap();
        let s = spectrum(&amp.procedure).unwrap();
        assert!((s.groups[0].p - 1.0).abs() < 1e-12);
        assert!(s.groups[1].p <= 1.0 / 32.0);
    }

    #[test]
    fn tiny_gap_hits_cap() {
        let r = amplify_plan(0.501, 0.5, 10, &Limits { qubit_cap: 14, n_cap: 4096 });
        assert!(matches!(r, Err(Error::GapTooSmall(_))));
    }
}
