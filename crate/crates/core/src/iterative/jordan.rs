//! The two projectors of an iterative procedure and their Jordan blocks.
//!
//! `Π0` projects the full register onto `|0^k>` ancillas and `Π1` onto states
//! the circuit accepts with certainty. Their joint invariant subspaces are
//! one- or two-dimensional; inside a 2-d block the alternating measurements
//! form a small Markov chain.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigendecomposition, inner, ComplexMatrix, PureState, ZERO};
use crate::procedure::{Procedure, Realization};
use crate::spectral::spectrum;
use crate::tolerances::PROJECTOR;

/// Vector-level access to `Π0` and `Π1` of a realization, never forming
/// the `2^(m+k)` unitary.
#[derive(Debug, Clone)]
pub struct RegisterOps {
    pub realization: Realization,
}

impl RegisterOps {
    pub fn new(realization: Realization) -> Result<Self> {
        if realization.outcomes != 2 {
            return Err(Error::NotTwoOutcome(realization.outcomes));
        }
        Ok(Self { realization })
    }

    pub fn full_dim(&self) -> usize {
        1usize << self.realization.total_qubits()
    }

    fn ancilla_mask(&self) -> usize {
        (1usize << self.realization.ancilla_qubits) - 1
    }

    fn accept_bit(&self) -> usize {
        1usize << (self.realization.total_qubits() - 1)
    }

    /// `|ψ> ⊗ |0^k>`
    pub fn embed(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut v = vec![ZERO; self.full_dim()];
        for (i, a) in psi.iter().enumerate() {
            v[self.realization.embed_index(i)] = *a;
        }
        v
    }

    /// Witness amplitudes of a vector in `range(Π0)`.
    pub fn extract(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..1usize << self.realization.witness_qubits)
            .map(|i| v[self.realization.embed_index(i)])
            .collect()
    }

    /// Splits `v` into its `Π0 = 1` and `Π0 = 0` parts.
    pub fn split_pi0(&self, v: &[Complex64]) -> [Vec<Complex64>; 2] {
        let mask = self.ancilla_mask();
        let mut one = v.to_vec();
        let mut zero = v.to_vec();
        for (x, (o, z)) in one.iter_mut().zip(zero.iter_mut()).enumerate() {
            if x & mask == 0 {
                *z = ZERO;
            } else {
                *o = ZERO;
            }
        }
        [zero, one]
    }

    /// Splits `v` into its `Π1 = 0` and `Π1 = 1` parts.
    pub fn split_pi1(&self, v: &[Complex64]) -> [Vec<Complex64>; 2] {
        let mut w = v.to_vec();
        self.realization.circuit.apply_in_place(&mut w);
        let bit = self.accept_bit();
        let mut one = w.clone();
        let mut zero = w;
        for (x, (o, z)) in one.iter_mut().zip(zero.iter_mut()).enumerate() {
            if x & bit != 0 {
                *z = ZERO;
            } else {
                *o = ZERO;
            }
        }
        self.realization.circuit.apply_adjoint_in_place(&mut one);
        self.realization.circuit.apply_adjoint_in_place(&mut zero);
        [zero, one]
    }

    pub fn apply_pi1(&self, v: &[Complex64]) -> Vec<Complex64> {
        let [_, one] = self.split_pi1(v);
        one
    }
}

/// Dense `Π0` and `Π1` on the full register, for small registers and oracles.
#[derive(Debug, Clone)]
pub struct Projectors {
    pub pi0: ComplexMatrix,
    pub pi1: ComplexMatrix,
}

pub fn projectors(q: &Procedure) -> Result<Projectors> {
    q.require_two_outcome()?;
    let ops = RegisterOps::new(q.dilation()?)?;
    let d = ops.full_dim();
    let mut pi0 = ComplexMatrix::zeros(d, d);
    let mut cols1 = Vec::with_capacity(d);
    for x in 0..d {
        if x & ops.ancilla_mask() == 0 {
            pi0[(x, x)] = Complex64::new(1.0, 0.0);
        }
        let mut e = vec![ZERO; d];
        e[x] = Complex64::new(1.0, 0.0);
        cols1.push(ops.apply_pi1(&e));
    }
    Ok(Projectors {
        pi0,
        pi1: ComplexMatrix::from_columns(d, &cols1),
    })
}

/// Block where `Π0` and `Π1` are both scalars; `tag` is the `Π1` value.
#[derive(Debug, Clone)]
pub struct OneDBlock {
    pub tag: u8,
    pub vector: Vec<Complex64>,
}

/// Block spanned by `a ∈ range(Π0)` and `b ∈ range(Π1)` with `<a|b> = cos θ`.
#[derive(Debug, Clone)]
pub struct TwoDBlock {
    pub theta: f64,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl TwoDBlock {
    /// `cos^2 θ`, the acceptance probability of `a`.
    pub fn p(&self) -> f64 {
        self.theta.cos().powi(2)
    }
}

/// Jordan blocks meeting `range(Π0)`; these are the only ones an iterative
/// procedure started on a valid input ever visits.
#[derive(Debug, Clone, Default)]
pub struct JordanBlocks {
    pub one_d: Vec<OneDBlock>,
    pub two_d: Vec<TwoDBlock>,
}

impl JordanBlocks {
    /// Acceptance probabilities of the `Π0` vectors, descending.
    pub fn acceptance_probabilities(&self) -> Vec<f64> {
        let mut ps: Vec<f64> = self
            .one_d
            .iter()
            .map(|b| b.tag as f64)
            .chain(self.two_d.iter().map(|b| b.p()))
            .collect();
        ps.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ps
    }
}

/// Numerical cut between 1-d and 2-d blocks.
const BLOCK_EDGE: f64 = 1e-9;

fn block_from(a: Vec<Complex64>, mu: f64, pi1_a: impl FnOnce(&[Complex64]) -> Vec<Complex64>) -> Result<(Option<OneDBlock>, Option<TwoDBlock>)> {
    if mu >= 1.0 - BLOCK_EDGE {
        return Ok((Some(OneDBlock { tag: 1, vector: a }), None));
    }
    if mu <= BLOCK_EDGE {
        return Ok((Some(OneDBlock { tag: 0, vector: a }), None));
    }
    let b = PureState::normalized(pi1_a(&a))?.into_amplitudes();
    let theta = inner(&a, &b).norm().clamp(0.0, 1.0).acos();
    Ok((None, Some(TwoDBlock { theta, a, b })))
}

fn check_projector(p: &ComplexMatrix) -> Result<()> {
    let res = (p * p).max_abs_diff(p).max(p.hermitian_defect());
    if res > PROJECTOR {
        return Err(Error::NotProjector(res));
    }
    Ok(())
}

/// Jordan decomposition from explicit projectors.
pub fn jordan_blocks(pi0: &ComplexMatrix, pi1: &ComplexMatrix) -> Result<JordanBlocks> {
    if pi0.rows() != pi1.rows() || !pi0.is_square() || !pi1.is_square() {
        return Err(Error::DimensionMismatch("projectors must be square and equal-sized".into()));
    }
    check_projector(pi0)?;
    check_projector(pi1)?;
    let d = pi0.rows();
    let e0 = hermitian_eigendecomposition(pi0)?;
    let range: Vec<Vec<Complex64>> = (0..d).filter(|&i| e0.values[i] > 0.5).map(|i| e0.vector(i)).collect();
    let a_iso = ComplexMatrix::from_columns(d, &range);
    let m = pi1.conjugate_by(&a_iso);
    let em = hermitian_eigendecomposition(&m)?;
    let mut out = JordanBlocks::default();
    for (i, &mu) in em.values.iter().enumerate() {
        let a = a_iso.matvec(&em.vector(i));
        let (one, two) = block_from(a, mu, |v| pi1.matvec(v))?;
        out.one_d.extend(one);
        out.two_d.extend(two);
    }
    Ok(out)
}

/// Jordan decomposition using the procedure's eigenbasis: restricted to
/// `range(Π0)`, `Π1` is exactly the accept element `E_1`.
pub fn jordan_blocks_of(q: &Procedure) -> Result<(RegisterOps, JordanBlocks)> {
    let ops = RegisterOps::new(q.dilation()?)?;
    let s = spectrum(q)?;
    let mut out = JordanBlocks::default();
    for g in &s.groups {
        for v in &g.basis {
            let (one, two) = block_from(ops.embed(v), g.p, |a| ops.apply_pi1(a))?;
            out.one_d.extend(one);
            out.two_d.extend(two);
        }
    }
    Ok((ops, out))
}

fn normalized_or_zero(v: Vec<Complex64>) -> Vec<Complex64> {
    PureState::normalized(v.clone()).map(|s| s.into_amplitudes()).unwrap_or(v)
}

/// Exact joint law of `(z_1..z_N)` on a 2-d block, from the four-state chain
/// `{a, a⊥, b, b⊥}` with transition probabilities taken from the block vectors.
/// Index bit `N - i` holds `z_i`.
pub fn chain_z_law(block: &TwoDBlock, n: usize) -> Vec<f64> {
    let (a, b) = (&block.a, &block.b);
    let ab = inner(a, b);
    let a_perp = normalized_or_zero(b.iter().zip(a).map(|(y, x)| y - ab * x).collect());
    let b_perp = normalized_or_zero(a.iter().zip(b).map(|(x, y)| x - ab.conj() * y).collect());
    let vecs = [a, &a_perp, b, &b_perp];
    // states 0,1 live in range/kernel of Π0; 2,3 in range/kernel of Π1
    let t = |from: usize, to: usize| inner(vecs[to], vecs[from]).norm_sqr();
    let outcome = |s: usize| (s % 2 == 0) as u8;
    let mut law = vec![(0usize, 0usize, 1.0f64)];
    for step in 1..=n {
        let targets = if step % 2 == 1 { [2, 3] } else { [0, 1] };
        let mut next = Vec::with_capacity(law.len() * 2);
        for &(state, bits, pr) in &law {
            for &to in &targets {
                let w = t(state, to);
                if w == 0.0 {
                    continue;
                }
                let z = (outcome(state) == outcome(to)) as usize;
                next.push((to, (bits << 1) | z, pr * w));
            }
        }
        law = next;
    }
    let mut out = vec![0.0; 1 << n];
    for (_, bits, pr) in law {
        out[bits] += pr;
    }
    out
}

/// Law of `z` on a 1-d block: all ones for tag 1, all zeros for tag 0.
pub fn one_d_z_law(block: &OneDBlock, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; 1 << n];
    out[if block.tag == 1 { (1 << n) - 1 } else { 0 }] = 1.0;
    out
}

/// Independent oracle: branch on every outcome of the alternating
/// measurements with the full statevector and collect the `z` law.
pub fn branching_z_law(ops: &RegisterOps, psi: &[Complex64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; 1 << n];
    fn walk(ops: &RegisterOps, v: Vec<Complex64>, last: u8, step: usize, n: usize, bits: usize, out: &mut [f64]) {
        let weight: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if weight < 1e-300 {
            return;
        }
        if step > n {
            out[bits] += weight;
            return;
        }
        let parts = if step % 2 == 1 { ops.split_pi1(&v) } else { ops.split_pi0(&v) };
        for (o, part) in parts.into_iter().enumerate() {
            let z = (o as u8 == last) as usize;
            walk(ops, part, o as u8, step + 1, n, (bits << 1) | z, out);
        }
    }
    walk(ops, ops.embed(psi), 1, 1, n, 0, &mut out);
    out
}

/// `prod_i p^z_i (1-p)^(1-z_i)` indexed like [`chain_z_law`].
pub fn bernoulli_product(p: f64, n: usize) -> Vec<f64> {
    (0..1usize << n)
        .map(|bits| {
            let ones = bits.count_ones() as i32;
            p.powi(ones) * (1.0 - p).powi(n as i32 - ones)
        })
        .collect()
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}
