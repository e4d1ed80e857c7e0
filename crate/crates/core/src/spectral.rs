//! Spectra, eigenspaces and threshold subspaces of two-outcome procedures.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigendecomposition, inner, ComplexMatrix, DensityMatrix, PureState, ZERO};
use crate::procedure::Procedure;
use crate::tolerances::{GROUPING, PROBABILITY_SLACK, SUBSPACE_RESIDUAL};

/// Eigenvalue `p` of `E_1` with an orthonormal basis of its eigenspace.
#[derive(Debug, Clone)]
pub struct SpectralGroup {
    pub p: f64,
    pub mult: usize,
    pub basis: Vec<Vec<Complex64>>,
}

impl SpectralGroup {
    pub fn projector(&self, dim: usize) -> ComplexMatrix {
        projector_onto(&self.basis, dim)
    }
}

/// Groups sorted by `p` descending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub groups: Vec<SpectralGroup>,
    pub tol: f64,
    dim: usize,
}

pub fn projector_onto(basis: &[Vec<Complex64>], dim: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(dim, dim);
    for v in basis {
        p = &p + &ComplexMatrix::outer(v, v);
    }
    p
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Flattened `(p_i, psi_i)` in group order.
    pub fn eigenbasis(&self) -> Vec<(f64, PureState)> {
        self.groups
            .iter()
            .flat_map(|g| {
                g.basis
                    .iter()
                    .map(move |v| (g.p, PureState::normalized(v.clone()).expect("unit eigenvector")))
            })
            .collect()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.p).collect()
    }

    /// `sum_p p Π_p`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for g in &self.groups {
            out = &out + &g.projector(self.dim).scale_real(g.p);
        }
        out
    }

    /// Group whose probability is within `tol` of `p`.
    pub fn group_near(&self, p: f64) -> Option<&SpectralGroup> {
        self.groups.iter().find(|g| (g.p - p).abs() <= self.tol.max(1e-12))
    }

    pub fn report(&self) -> SpectrumReport {
        SpectrumReport {
            groups: self.groups.iter().map(|g| GroupReport { p: g.p, mult: g.mult }).collect(),
            tol: self.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub p: f64,
    pub mult: usize,
}

/// Spectrum report JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub groups: Vec<GroupReport>,
    pub tol: f64,
}

pub fn spectrum(q: &Procedure) -> Result<SpectralDecomposition> {
    spectrum_with_tol(q, GROUPING)
}

pub fn spectrum_with_tol(q: &Procedure, tol: f64) -> Result<SpectralDecomposition> {
    decompose_hermitian(q.accept_element()?, tol)
}

/// Groups the eigenpairs of a Hermitian matrix; neighbours closer than `tol` share a group.
pub fn decompose_hermitian(h: &ComplexMatrix, tol: f64) -> Result<SpectralDecomposition> {
    let eig = hermitian_eigendecomposition(h)?;
    let dim = h.rows();
    let mut groups: Vec<SpectralGroup> = Vec::new();
    let mut members: Vec<f64> = Vec::new();
    for (i, &lambda) in eig.values.iter().enumerate() {
        let v = eig.vector(i);
        match groups.last_mut() {
            Some(g) if members.last().is_some_and(|&prev| prev - lambda <= tol) => {
                g.basis.push(v);
                g.mult += 1;
                members.push(lambda);
            }
            _ => {
                if let Some(g) = groups.last_mut() {
                    g.p = mean(&members).clamp(0.0, 1.0);
                }
                members.clear();
                members.push(lambda);
                groups.push(SpectralGroup {
                    p: lambda,
                    mult: 1,
                    basis: vec![v],
                });
            }
        }
    }
    if let Some(g) = groups.last_mut() {
        g.p = mean(&members).clamp(0.0, 1.0);
    }
    Ok(SpectralDecomposition { groups, tol, dim })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }
}

/// Finite union of closed intervals. Membership allows `slack` at the ends
/// so that exactly representable boundary values survive rounding.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalUnion {
    pub parts: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(lo: f64, hi: f64) -> Self {
        Self {
            parts: vec![Interval::new(lo, hi)],
        }
    }

    pub fn union(mut self, lo: f64, hi: f64) -> Self {
        self.parts.push(Interval::new(lo, hi));
        self
    }

    pub fn contains(&self, p: f64, slack: f64) -> bool {
        self.parts.iter().any(|i| p >= i.lo - slack && p <= i.hi + slack)
    }
}

/// Subspace of the witness space given by an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub ambient: usize,
    pub basis: Vec<Vec<Complex64>>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn projector(&self) -> ComplexMatrix {
        projector_onto(&self.basis, self.ambient)
    }

    /// `||(I - Π)ψ||`
    pub fn residual(&self, psi: &[Complex64]) -> f64 {
        let mut r = psi.to_vec();
        for v in &self.basis {
            let c = inner(v, psi);
            for (x, y) in r.iter_mut().zip(v) {
                *x -= c * y;
            }
        }
        r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Span of every group whose `p` lies in `intervals`.
pub fn subspace_select(s: &SpectralDecomposition, intervals: &IntervalUnion) -> Subspace {
    let basis = s
        .groups
        .iter()
        .filter(|g| intervals.contains(g.p, s.tol))
        .flat_map(|g| g.basis.iter().cloned())
        .collect();
    Subspace { ambient: s.dim, basis }
}

/// `Tr(Π_W ρ)`
pub fn overlap(rho: &DensityMatrix, w: &Subspace) -> Result<f64> {
    if rho.dim() != w.ambient {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs subspace ambient {}",
            rho.dim(),
            w.ambient
        )));
    }
    let v: f64 = w.basis.iter().map(|b| rho.matrix().sandwich(b, b).re).sum();
    Ok(v.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MembershipMode {
    /// `Tr(E_1 ρ) >= a`
    RGeq,
    /// `Tr(E_1 ρ) <= b`
    RLeq,
    /// state lies in `H^{>=a}`
    HGeq,
    /// state lies in `H^{<=b}`
    HLeq,
}

/// Outcome of a membership test. A positive margin means the test holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub holds: bool,
    pub margin: f64,
}

pub fn membership(q: &Procedure, threshold: f64, rho: &DensityMatrix, mode: MembershipMode) -> Result<Membership> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidInput(format!("threshold {threshold} outside [0,1]")));
    }
    let margin = match mode {
        MembershipMode::RGeq => q.acceptance_probabilities(rho)?[1] - threshold,
        MembershipMode::RLeq => threshold - q.acceptance_probabilities(rho)?[1],
        MembershipMode::HGeq | MembershipMode::HLeq => {
            let s = spectrum(q)?;
            let iv = if mode == MembershipMode::HGeq {
                IntervalUnion::single(threshold, 1.0)
            } else {
                IntervalUnion::single(0.0, threshold)
            };
            let w = subspace_select(&s, &iv);
            // For a pure state this is exactly ||(I - Π)ψ||.
            let outside = (1.0 - overlap(rho, &w)?).max(0.0).sqrt();
            SUBSPACE_RESIDUAL - outside
        }
    };
    // Probability comparisons tolerate rounding at the threshold.
    let slack = match mode {
        MembershipMode::RGeq | MembershipMode::RLeq => PROBABILITY_SLACK,
        _ => 0.0,
    };
    Ok(Membership {
        holds: margin >= -slack,
        margin,
    })
}

/// Both sides of `Pr[accept on sum α_i ψ_i] = sum |α_i|^2 p_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoInterference {
    pub direct: f64,
    pub convex: f64,
    pub deviation: f64,
}

/// `alphas` are coefficients over [`SpectralDecomposition::eigenbasis`].
pub fn verify_no_interference(q: &Procedure, s: &SpectralDecomposition, alphas: &[Complex64]) -> Result<NoInterference> {
    let basis = s.eigenbasis();
    if alphas.len() != basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} eigenvectors",
            alphas.len(),
            basis.len()
        )));
    }
    let norm: f64 = alphas.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let mut psi = vec![ZERO; s.dim()];
    for (a, (_, v)) in alphas.iter().zip(&basis) {
        for (x, y) in psi.iter_mut().zip(v.amplitudes()) {
            *x += a * y;
        }
    }
    let direct = q.accept_probability(&PureState::normalized(psi)?)?;
    let convex: f64 = alphas.iter().zip(&basis).map(|(a, (p, _))| a.norm_sqr() * p).sum();
    Ok(NoInterference {
        direct,
        convex,
        deviation: (direct - convex).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1(delta: f64) -> Procedure {
        Procedure::from_spectrum(&[1.0 / 3.0, 2.0 / 3.0 - delta * delta, 2.0 / 3.0 + delta, 0.0]).unwrap()
    }

    #[test]
    fn example1_groups() {
        let d = 2f64.powi(-6);
        let s = spectrum(&example1(d)).unwrap();
        let ps = s.probabilities();
        let want = [2.0 / 3.0 + d, 2.0 / 3.0 - d * d, 1.0 / 3.0, 0.0];
        assert_eq!(ps.len(), 4);
        for (a, b) in ps.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let w = subspace_select(&s, &IntervalUnion::single(2.0 / 3.0, 1.0));
        assert_eq!(w.dim(), 1);
        assert!((w.basis[0][2].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_spectrum_groups() {
        let s = spectrum(&Procedure::from_spectrum(&[0.5, 0.5]).unwrap()).unwrap();
        assert_eq!(s.groups.len(), 1);
        assert_eq!(s.groups[0].mult, 2);
    }

    #[test]
    fn complementary_unions_split_space() {
        let s = spectrum(&example1(2f64.powi(-6))).unwrap();
        let a = subspace_select(&s, &IntervalUnion::single(0.0, 0.5));
        let b = subspace_select(&s, &IntervalUnion::single(0.5 + 1e-6, 1.0));
        assert_eq!(a.dim() + b.dim(), 4);
        let full = subspace_select(&s, &IntervalUnion::single(0.0, 1.0));
        assert_eq!(full.dim(), 4);
        assert_eq!(subspace_select(&s, &IntervalUnion::empty()).dim(), 0);
    }

    #[test]
    fn example1_witness_is_r_but_not_h_member() {
        let d = 2f64.powi(-6);
        let q = example1(d);
        let mut amps = vec![ZERO; 4];
        amps[2] = Complex64::new((d / (1.0 + d)).sqrt(), 0.0);
        amps[1] = Complex64::new((1.0 / (1.0 + d)).sqrt(), 0.0);
        let psi = PureState::new(amps).unwrap();
        let rho = psi.to_density();
        assert!((q.accept_probability(&psi).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        let s = spectrum(&q).unwrap();
        let w = subspace_select(&s, &IntervalUnion::single(2.0 / 3.0, 1.0));
        assert!((overlap(&rho, &w).unwrap() - d / (1.0 + d)).abs() < 1e-12);
        assert!(membership(&q, 2.0 / 3.0, &rho, MembershipMode::RGeq).unwrap().holds);
        assert!(!membership(&q, 2.0 / 3.0, &rho, MembershipMode::HGeq).unwrap().holds);
    }
}
