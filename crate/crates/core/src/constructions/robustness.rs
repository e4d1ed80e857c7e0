//! Randomized search for counterexamples to robustness of a reduction.
//!
//! Minimizes `Pr[Q(Φ(ψ)) = 1]` over pure `ψ` with `Pr[Q'(ψ) = 1] >= a' - ε`.
//! The feasible set is not convex, so a pass only means no counterexample
//! was found within the budget.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::channel::{compose_reduction, Reduction};
use crate::error::Result;
use crate::linalg::random::random_state;
use crate::linalg::{ComplexMatrix, PureState};
use crate::procedure::Procedure;
use crate::spectral::spectrum;
use crate::tolerances::PROBABILITY_SLACK;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    /// `a' - ε`
    pub threshold: f64,
    /// Required acceptance `a` of the mapped state.
    pub target: f64,
    pub empirical_min: f64,
    /// Amplitudes `(re, im)` of the minimizing state.
    pub witness: Vec<(f64, f64)>,
    pub evaluations: usize,
    pub counterexample_found: bool,
    pub seed: u64,
}

impl RobustnessReport {
    /// No counterexample within budget; this is not a proof of robustness.
    pub fn pass(&self) -> bool {
        !self.counterexample_found
    }
}

struct Problem {
    constraint: ComplexMatrix,
    objective: ComplexMatrix,
    threshold: f64,
}

impl Problem {
    fn value(m: &ComplexMatrix, v: &[Complex64]) -> f64 {
        m.sandwich(v, v).re
    }

    fn feasible(&self, v: &[Complex64]) -> bool {
        Self::value(&self.constraint, v) >= self.threshold - PROBABILITY_SLACK
    }

    /// Moves `v` toward `top` along the great circle until it just becomes feasible.
    fn lift(&self, v: &[Complex64], top: &[Complex64]) -> Option<Vec<Complex64>> {
        let mix = |t: f64| -> Option<Vec<Complex64>> {
            let w: Vec<Complex64> = v.iter().zip(top).map(|(a, b)| a * t.cos() + b * t.sin()).collect();
            PureState::normalized(w).ok().map(PureState::into_amplitudes)
        };
        if self.feasible(v) {
            return Some(v.to_vec());
        }
        let end = mix(std::f64::consts::FRAC_PI_2)?;
        if !self.feasible(&end) {
            return None;
        }
        let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            match mix(mid) {
                Some(w) if self.feasible(&w) => hi = mid,
                _ => lo = mid,
            }
        }
        mix(hi)
    }
}

/// `q_prime` is the procedure whose witnesses `Φ` carries into witnesses of `q`.
pub fn probe_robustness(q: &Procedure, q_prime: &Procedure, red: &Reduction, a: f64, a_prime: f64, budget: usize, seed: u64) -> Result<RobustnessReport> {
    let qr = compose_reduction(q, &red.phi)?;
    let problem = Problem {
        constraint: q_prime.accept_element()?.clone(),
        objective: qr.accept_element()?.clone(),
        threshold: a_prime - red.epsilon,
    };
    let s = spectrum(q_prime)?;
    let basis = s.eigenbasis();
    let top = basis[0].1.amplitudes().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluations = 0usize;
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    let consider = |v: Vec<Complex64>, evaluations: &mut usize, best: &mut Option<(f64, Vec<Complex64>)>| {
        *evaluations += 1;
        let f = Problem::value(&problem.objective, &v);
        if best.as_ref().is_none_or(|(b, _)| f < *b) {
            *best = Some((f, v));
        }
    };

    // Eigenstates first: a planted fault on one of them is found deterministically.
    for (p, psi) in &basis {
        if *p >= problem.threshold - PROBABILITY_SLACK {
            consider(psi.amplitudes().to_vec(), &mut evaluations, &mut best);
        }
    }
    // Random boundary points, then local refinement from the best.
    let random_budget = budget / 2;
    while evaluations < random_budget {
        let v = random_state(q_prime.witness_qubits(), &mut rng).into_amplitudes();
        match problem.lift(&v, &top) {
            Some(w) => consider(w, &mut evaluations, &mut best),
            None => evaluations += 1,
        }
    }
    let mut step = 0.3;
    while evaluations < budget {
        let Some((_, center)) = best.clone() else { break };
        let w: Vec<Complex64> = center
            .iter()
            .map(|c| {
                let (x, y): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
                c + Complex64::new(x, y) * step
            })
            .collect();
        let before = best.as_ref().map(|b| b.0);
        if let Some(w) = PureState::normalized(w).ok().and_then(|s| problem.lift(s.amplitudes(), &top)) {
            consider(w, &mut evaluations, &mut best);
        } else {
            evaluations += 1;
        }
        if best.as_ref().map(|b| b.0) == before {
            step = (step * 0.97).max(1e-4);
        }
    }

    let (empirical_min, witness) = best.unwrap_or((f64::INFINITY, vec![]));
    Ok(RobustnessReport {
        threshold: problem.threshold,
        target: a,
        empirical_min,
        witness: witness.iter().map(|z| (z.re, z.im)).collect(),
        evaluations,
        counterexample_found: empirical_min < a - PROBABILITY_SLACK,
        seed,
    })
}
