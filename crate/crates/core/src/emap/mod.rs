//! Eigenspace-preserving maps: synthesis of interpolating weight tables,
//! their application to procedures, and certification of candidate pairs.

pub mod synthesis;

use serde::{Deserialize, Serialize};

pub use synthesis::{monotone_certificate, synthesize, SynthesizedEMap, TargetPointSet, MONOTONE_GRID};

use crate::error::{Error, Result};
use crate::iterative::{iterate_procedure, IterativePlan};
use crate::linalg::{ComplexMatrix, PureState};
use crate::procedure::Procedure;
use crate::spectral::spectrum;
use crate::tolerances::{Limits, GROUPING, JOINT_DIAGONAL};

impl SynthesizedEMap {
    pub fn plan(&self) -> Result<IterativePlan> {
        IterativePlan::binary(&self.g)
    }
}

/// The iterative procedure with the table of `em`; eigenvalue `p` becomes `P_g(p)`.
pub fn apply_emap(q: &Procedure, em: &SynthesizedEMap, limits: &Limits) -> Result<Procedure> {
    if !(em.monotone_certificate > 0.0) {
        return Err(Error::NotMonotone(format!("certificate {}", em.monotone_certificate)));
    }
    iterate_procedure(q, &em.plan()?, limits)
}

/// Observed eigenvalue pair `p -> f(p)` with the eigenspace dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPair {
    pub p: f64,
    pub f: f64,
    pub mult: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmapCertificate {
    /// `max |[E_1, E_1']|` entrywise.
    pub commutator: f64,
    /// Largest entrywise mismatch between `H_Q(p)` (merged over equal `f`) and `H_Q'(f(p))`.
    pub projector_mismatch: f64,
    /// Pairs sorted by `p` ascending.
    pub pairs: Vec<SpectrumPair>,
    pub monotone: bool,
    /// Largest `|<psi|E_1'|psi> - sum_p f(p) <psi|H_Q(p)|psi>|` over the sample points.
    pub sample_deviation: f64,
}

impl EmapCertificate {
    pub fn passes(&self) -> bool {
        self.commutator <= JOINT_DIAGONAL && self.projector_mismatch <= JOINT_DIAGONAL && self.monotone && self.sample_deviation <= JOINT_DIAGONAL
    }
}

/// Checks that `q2` is an eigenspace-preserving image of `q`.
pub fn verify_emap(q: &Procedure, q2: &Procedure, sample_points: &[PureState]) -> Result<EmapCertificate> {
    if q.dim() != q2.dim() {
        return Err(Error::DimensionMismatch(format!("witness dimensions {} and {}", q.dim(), q2.dim())));
    }
    let (e, e2) = (q.accept_element()?, q2.accept_element()?);
    let commutator = (e * e2).max_abs_diff(&(e2 * e));
    if commutator > JOINT_DIAGONAL {
        return Err(Error::NotJointlyDiagonalizable(commutator));
    }
    let dim = q.dim();
    let s = spectrum(q)?;
    let s2 = spectrum(q2)?;

    let mut pairs: Vec<(SpectrumPair, ComplexMatrix)> = s
        .groups
        .iter()
        .map(|g| {
            let proj = g.projector(dim);
            let f = (e2 * &proj).trace().re / g.mult as f64;
            (SpectrumPair { p: g.p, f, mult: g.mult }, proj)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.p.total_cmp(&b.0.p));
    let monotone = pairs.windows(2).all(|w| w[1].0.f >= w[0].0.f - GROUPING);

    // Merge groups of q whose images coincide, then match against q2's eigenspaces.
    let mut projector_mismatch: f64 = 0.0;
    for g2 in &s2.groups {
        let mut merged = ComplexMatrix::zeros(dim, dim);
        for (pair, proj) in &pairs {
            if (pair.f - g2.p).abs() <= s2.tol.max(GROUPING) * 10.0 {
                merged = &merged + proj;
            }
        }
        projector_mismatch = projector_mismatch.max(merged.max_abs_diff(&g2.projector(dim)));
    }

    let mut sample_deviation: f64 = 0.0;
    for psi in sample_points {
        if psi.dim() != dim {
            return Err(Error::DimensionMismatch(format!("sample point dimension {} vs {dim}", psi.dim())));
        }
        let a = psi.amplitudes();
        let direct = e2.sandwich(a, a).re;
        let predicted: f64 = pairs.iter().map(|(pair, proj)| pair.f * proj.sandwich(a, a).re).sum();
        sample_deviation = sample_deviation.max((direct - predicted).abs());
    }

    Ok(EmapCertificate {
        commutator,
        projector_mismatch,
        pairs: pairs.into_iter().map(|(p, _)| p).collect(),
        monotone,
        sample_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{haar_unitary, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn conjugated(spec: &[f64], seed: u64) -> Procedure {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = haar_unitary(spec.len(), &mut rng);
        let d = ComplexMatrix::from_diagonal(spec);
        let m = spec.len().trailing_zeros() as usize;
        Procedure::from_accept_element(m, &(&u * &d) * &u.adjoint()).unwrap()
    }

    fn samples(qubits: usize, seed: u64) -> Vec<PureState> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..5).map(|_| random_state(qubits, &mut rng)).collect()
    }

    #[test]
    fn apply_emap_preserves_eigenspaces() {
        let q = conjugated(&[0.1, 2.0 / 3.0, 0.75, 0.95], 3);
        let ts = TargetPointSet::with_min_gaps(vec![0.0, 2.0 / 3.0, 0.75, 1.0], vec![0.0, 1.0 / 7.0, 6.0 / 7.0, 1.0]).unwrap();
        let em = synthesize(&ts, 1e-9, 4096).unwrap();
        let q2 = apply_emap(&q, &em, &Limits::default()).unwrap();
        let cert = verify_emap(&q, &q2, &samples(2, 9)).unwrap();
        assert!(cert.passes(), "{cert:?}");
        let at = |p: f64| cert.pairs.iter().find(|x| (x.p - p).abs() < 1e-9).unwrap().f;
        assert!((at(2.0 / 3.0) - 1.0 / 7.0).abs() < 1e-9);
        assert!((at(0.75) - 6.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn unrelated_procedures_rejected() {
        let q = conjugated(&[0.1, 0.4, 0.6, 0.9], 1);
        let q2 = conjugated(&[0.2, 0.3, 0.5, 0.8], 2);
        assert!(matches!(verify_emap(&q, &q2, &[]), Err(Error::NotJointlyDiagonalizable(_))));
    }

    #[test]
    fn transitivity() {
        let q = conjugated(&[0.0, 0.3, 0.55, 1.0], 5);
        let ts1 = TargetPointSet::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.7, 1.0], 0.5, 0.3).unwrap();
        let ts2 = TargetPointSet::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.25, 1.0], 0.5, 0.25).unwrap();
        let limits = Limits::default();
        let q1 = apply_emap(&q, &synthesize(&ts1, 1e-9, 4096).unwrap(), &limits).unwrap();
        let q2 = apply_emap(&q1, &synthesize(&ts2, 1e-9, 4096).unwrap(), &limits).unwrap();
        let pts = samples(2, 4);
        assert!(verify_emap(&q, &q1, &pts).unwrap().passes());
        assert!(verify_emap(&q1, &q2, &pts).unwrap().passes());
        assert!(verify_emap(&q, &q2, &pts).unwrap().passes());
    }

    #[test]
    fn unmonotone_map_rejected() {
        let ts = TargetPointSet::new(vec![0.0, 1.0], vec![0.0, 1.0], 1.0, 1.0).unwrap();
        let mut em = synthesize(&ts, 1e-9, 4096).unwrap();
        em.monotone_certificate = -1.0;
        let q = Procedure::from_spectrum(&[0.2, 0.4]).unwrap();
        assert!(matches!(apply_emap(&q, &em, &Limits::default()), Err(Error::NotMonotone(_))));
    }
}
