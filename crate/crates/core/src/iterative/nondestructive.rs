//! Nondestructive verification: accept with the synthesized probability and,
//! on acceptance, hand back the eigenstate that was fed in.
//!
//! An inner e-map with targets `sqrt(t_i)` gives `Q1`. Running `Q1` twice
//! (`N = 2`) and accepting only on `z_1 = z_2 = 1` leaves the register in
//! `Π0 Π1 Π0 |ψ,0>`, i.e. the witness is mapped by `K = E_1(Q1)`. Hence the
//! accept probability is `<ψ|K²|ψ>` with eigenvalues `t_i`, and eigenstates
//! survive unchanged.

use rand::Rng;

use super::engine::{iterate_procedure, Sampler};
use super::plan::IterativePlan;
use crate::emap::{synthesize, SynthesizedEMap, TargetPointSet};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, PureState};
use crate::procedure::Procedure;
use crate::tolerances::Limits;

/// Accept iff both neighbour pairs agree.
pub fn double_agreement_plan() -> IterativePlan {
    IterativePlan::binary(&[0.0, 0.0, 1.0]).expect("static plan")
}

#[derive(Debug, Clone)]
pub struct NondestructiveWrapper {
    /// Inner procedure whose eigenvalues are `sqrt` of the targets.
    pub inner: Procedure,
    pub emap: SynthesizedEMap,
    /// Witness-space Kraus operator of the accept branch.
    pub kraus: ComplexMatrix,
    plan: IterativePlan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NondestructiveRun {
    pub accept: bool,
    /// Witness state after the run; on rejection it is the witness part of
    /// whatever branch was reached, renormalized when nonzero.
    pub post_state: Option<PureState>,
}

/// Builds the nondestructive wrapper for `targets` on `q`.
pub fn make_nondestructive(q: &Procedure, targets: &TargetPointSet, tol: f64, limits: &Limits) -> Result<NondestructiveWrapper> {
    q.require_two_outcome()?;
    targets.validate()?;
    let roots: Vec<f64> = targets.t.iter().map(|t| t.sqrt()).collect();
    let root_targets = TargetPointSet::new(targets.s.clone(), roots.clone(), targets.eps, min_gap(&roots))?;
    let emap = synthesize(&root_targets, tol, limits.n_cap)?;
    let inner = iterate_procedure(q, &emap.plan()?, limits)?;
    let kraus = inner.accept_element()?.clone();
    Ok(NondestructiveWrapper {
        inner,
        emap,
        kraus,
        plan: double_agreement_plan(),
    })
}

fn min_gap(v: &[f64]) -> f64 {
    v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

impl NondestructiveWrapper {
    pub fn witness_qubits(&self) -> usize {
        self.inner.witness_qubits()
    }

    /// Induced map `f(p) = f_1(p)^2`.
    pub fn f(&self, p: f64) -> f64 {
        self.emap.f(p).powi(2)
    }

    /// The accept/reject procedure seen by the classical output only.
    pub fn induced_procedure(&self) -> Result<Procedure> {
        Procedure::from_accept_element(self.witness_qubits(), &self.kraus * &self.kraus)
    }

    pub fn accept_probability(&self, psi: &PureState) -> f64 {
        let v = self.kraus.matvec(psi.amplitudes());
        v.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Exact accept probability and post-accept state `Kψ/|Kψ|`.
    pub fn run_exact(&self, psi: &PureState) -> Result<(f64, Option<PureState>)> {
        if psi.dim() != self.kraus.rows() {
            return Err(Error::DimensionMismatch(format!("input dimension {} vs {}", psi.dim(), self.kraus.rows())));
        }
        let v = self.kraus.matvec(psi.amplitudes());
        let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let post = if p > 0.0 { Some(PureState::normalized(v)?) } else { None };
        Ok((p, post))
    }

    /// One sampled run on the dilation of the inner procedure.
    pub fn run(&self, psi: &PureState, rng: &mut impl Rng, limits: &Limits) -> Result<NondestructiveRun> {
        let sampler = Sampler::new(&self.inner, &self.plan, limits)?;
        let rho = psi.to_density();
        let out = sampler.run(&rho, 1, rng.gen(), 1)?;
        let trace = &out.traces[0];
        let accept = trace.letter == 1;
        let post_state = if trace.ends_in_valid_input() {
            PureState::normalized(sampler.ops().extract(&trace.final_state)).ok()
        } else {
            None
        };
        Ok(NondestructiveRun { accept, post_state })
    }

    /// Accept probability on a mixed input.
    pub fn accept_probability_mixed(&self, rho: &DensityMatrix) -> f64 {
        (&self.kraus * &self.kraus).trace_product_real(rho.matrix())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::haar_unitary;
    use crate::linalg::inner;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (Procedure, NondestructiveWrapper, ComplexMatrix) {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = haar_unitary(4, &mut rng);
        let spec = [0.0, 0.4, 0.8, 1.0];
        let e = &(&u * &ComplexMatrix::from_diagonal(&spec)) * &u.adjoint();
        let q = Procedure::from_accept_element(2, e).unwrap();
        let ts = TargetPointSet::new(vec![0.0, 0.4, 0.8, 1.0], vec![0.0, 0.2, 0.9, 1.0], 0.2, 0.1).unwrap();
        let w = make_nondestructive(&q, &ts, 1e-9, &Limits::default()).unwrap();
        (q, w, u)
    }

    #[test]
    fn eigenstates_survive_acceptance() {
        let (_, w, u) = setup();
        for (i, t) in [0.2, 0.9].iter().enumerate() {
            let psi = PureState::normalized(u.column(i + 1)).unwrap();
            let (p, post) = w.run_exact(&psi).unwrap();
            assert!((p - t).abs() < 1e-9);
            assert!(post.unwrap().fidelity(&psi) > 1.0 - 1e-9);
        }
    }

    #[test]
    fn superposition_reweighted_by_sqrt_p() {
        let (_, w, u) = setup();
        let alpha = [0.5, 0.5, 0.5, 0.5];
        let v: Vec<Complex64> = (0..4).map(|r| (0..4).map(|i| u[(r, i)] * alpha[i]).sum()).collect();
        let psi = PureState::normalized(v).unwrap();
        let (_, post) = w.run_exact(&psi).unwrap();
        let t = [0.0f64, 0.2, 0.9, 1.0];
        let expect: Vec<Complex64> = (0..4).map(|r| (0..4).map(|i| u[(r, i)] * alpha[i] * t[i].sqrt()).sum()).collect();
        let expect = PureState::normalized(expect).unwrap();
        assert!(inner(post.unwrap().amplitudes(), expect.amplitudes()).norm() > 1.0 - 1e-9);
    }

    #[test]
    fn sampled_accepts_return_the_eigenstate() {
        let (_, w, u) = setup();
        let psi = PureState::normalized(u.column(2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut accepted = 0;
        for _ in 0..200 {
            let run = w.run(&psi, &mut rng, &Limits::default()).unwrap();
            if run.accept {
                accepted += 1;
                assert!(run.post_state.unwrap().fidelity(&psi) > 1.0 - 1e-9);
            }
        }
        assert!(accepted > 150);
    }
}
