//! Running an iterative plan: exactly through the spectrum, or by sampling
//! the alternating measurements on the full statevector.

use std::collections::HashMap;
use std::rc::Rc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::jordan::RegisterOps;
use super::plan::IterativePlan;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigendecomposition, norm_sqr, ComplexMatrix, DensityMatrix};
use crate::procedure::{numeric_alphabet, three_outcome_alphabet, Procedure};
use crate::spectral::spectrum;
use crate::tolerances::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Engine {
    Exact,
    Sample { shots: usize, seed: u64 },
}

/// One sampled run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// The `N+1` registered outcomes, starting with the forced `Π0` result.
    pub outcomes: Vec<u8>,
    pub z: Vec<u8>,
    pub s: usize,
    pub letter: usize,
    /// Full-register state after the last measurement.
    pub final_state: Vec<Complex64>,
}

impl Trace {
    /// True when the last measurement was `Π0` with outcome 1, i.e. the
    /// ancillas are back in `|0^k>`.
    pub fn ends_in_valid_input(&self) -> bool {
        self.outcomes.len() % 2 == 1 && *self.outcomes.last().unwrap() == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterativeRun {
    pub alphabet: Vec<String>,
    pub distribution: Vec<f64>,
    pub shots: Option<usize>,
    pub seed: Option<u64>,
    pub counts: Option<Vec<u64>>,
    pub traces: Vec<Trace>,
}

pub fn run_iterative(q: &Procedure, plan: &IterativePlan, input: &DensityMatrix, engine: Engine, limits: &Limits) -> Result<IterativeRun> {
    match engine {
        Engine::Exact => run_exact(q, plan, input, limits),
        Engine::Sample { shots, seed } => Sampler::new(q, plan, limits)?.run(input, shots, seed, 0),
    }
}

pub fn run_exact(q: &Procedure, plan: &IterativePlan, input: &DensityMatrix, limits: &Limits) -> Result<IterativeRun> {
    plan.validate(limits)?;
    q.require_two_outcome()?;
    if input.dim() != q.dim() {
        return Err(Error::DimensionMismatch(format!("input dimension {} vs witness {}", input.dim(), q.dim())));
    }
    let s = spectrum(q)?;
    let mut dist = vec![0.0; plan.alphabet.len()];
    for g in &s.groups {
        let w: f64 = g.basis.iter().map(|v| input.matrix().sandwich(v, v).re).sum();
        for (d, x) in dist.iter_mut().zip(plan.output_distribution(g.p)) {
            *d += w * x;
        }
    }
    Ok(IterativeRun {
        alphabet: plan.alphabet.clone(),
        distribution: dist,
        shots: None,
        seed: None,
        counts: None,
        traces: vec![],
    })
}

/// Canonical outcome order of the procedure induced by a plan.
fn canonical_alphabet(plan: &IterativePlan) -> Vec<String> {
    if plan.alphabet.len() == 3 {
        three_outcome_alphabet()
    } else {
        numeric_alphabet(2)
    }
}

/// The iterative procedure as a POVM: each eigenspace of `Q` with
/// probability `p` receives weight `sum_s Binom(s;N,p) g(s)[w]` in `E_w`.
pub fn iterate_procedure(q: &Procedure, plan: &IterativePlan, limits: &Limits) -> Result<Procedure> {
    plan.validate(limits)?;
    let s = spectrum(q)?;
    let labels = canonical_alphabet(plan);
    let dim = q.dim();
    let mut povm = vec![ComplexMatrix::zeros(dim, dim); labels.len()];
    for g in &s.groups {
        let dist = plan.output_distribution(g.p);
        let proj = g.projector(dim);
        for (w, label) in labels.iter().enumerate() {
            let weight = dist[plan.letter_index(label)?];
            povm[w] = &povm[w] + &proj.scale_real(weight);
        }
    }
    Procedure::from_povm(q.witness_qubits(), povm, labels)
}

struct Branch {
    prob_one: f64,
    post: [Rc<Vec<Complex64>>; 2],
}

/// Outcome histories are cached while they fit in a `u64` and the cache
/// holds fewer than this many amplitudes.
const CACHE_AMPLITUDES: usize = 1 << 22;

/// Statevector sampler. The post-measurement state depends only on the
/// outcome history, so branches are memoized along the history tree.
pub struct Sampler<'a> {
    plan: &'a IterativePlan,
    ops: RegisterOps,
}

impl<'a> Sampler<'a> {
    pub fn new(q: &Procedure, plan: &'a IterativePlan, limits: &Limits) -> Result<Self> {
        plan.validate(limits)?;
        q.require_two_outcome()?;
        Ok(Self {
            plan,
            ops: RegisterOps::new(q.dilation()?)?,
        })
    }

    pub fn ops(&self) -> &RegisterOps {
        &self.ops
    }

    /// `keep_traces` bounds how many per-shot traces are returned.
    pub fn run(&self, input: &DensityMatrix, shots: usize, seed: u64, keep_traces: usize) -> Result<IterativeRun> {
        if shots == 0 {
            return Err(Error::ShotsZero);
        }
        let wdim = 1usize << self.ops.realization.witness_qubits;
        if input.dim() != wdim {
            return Err(Error::DimensionMismatch(format!("input dimension {} vs witness {wdim}", input.dim())));
        }
        let eig = hermitian_eigendecomposition(input.matrix())?;
        let components: Vec<(f64, Rc<Vec<Complex64>>)> = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 1e-14)
            .map(|(i, &w)| (w, Rc::new(self.ops.embed(&eig.vector(i)))))
            .collect();
        let total_w: f64 = components.iter().map(|c| c.0).sum();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.plan.n;
        let cacheable = n < 64;
        let mut cache: HashMap<(usize, usize, u64), Rc<Branch>> = HashMap::new();
        let mut cached_amps = 0usize;
        let mut counts = vec![0u64; self.plan.alphabet.len()];
        let mut traces = Vec::new();

        for shot in 0..shots {
            let mut u = rng.gen::<f64>() * total_w;
            let mut comp = components.len() - 1;
            for (i, c) in components.iter().enumerate() {
                if u < c.0 {
                    comp = i;
                    break;
                }
                u -= c.0;
            }
            let mut state = components[comp].1.clone();
            let mut hist: u64 = 1;
            let mut outcomes = vec![1u8];
            let mut z = Vec::with_capacity(n);
            for step in 1..=n {
                let key = (comp, step, hist);
                let branch = match cache.get(&key) {
                    Some(b) => b.clone(),
                    None => {
                        let b = Rc::new(self.measure(&state, step));
                        if cacheable && cached_amps < CACHE_AMPLITUDES {
                            cached_amps += 2 * state.len();
                            cache.insert(key, b.clone());
                        }
                        b
                    }
                };
                let o = (rng.gen::<f64>() < branch.prob_one) as u8;
                z.push((o == *outcomes.last().unwrap()) as u8);
                outcomes.push(o);
                state = branch.post[o as usize].clone();
                if cacheable {
                    hist = (hist << 1) | o as u64;
                }
            }
            let s = z.iter().map(|&b| b as usize).sum::<usize>();
            let letter = draw(&self.plan.g[s], &mut rng);
            counts[letter] += 1;
            if shot < keep_traces {
                traces.push(Trace {
                    outcomes,
                    z,
                    s,
                    letter,
                    final_state: (*state).clone(),
                });
            }
        }
        Ok(IterativeRun {
            alphabet: self.plan.alphabet.clone(),
            distribution: counts.iter().map(|&c| c as f64 / shots as f64).collect(),
            shots: Some(shots),
            seed: Some(seed),
            counts: Some(counts),
            traces,
        })
    }

    /// Step `t` measures `Π1` when `t` is odd and `Π0` when even.
    fn measure(&self, state: &[Complex64], step: usize) -> Branch {
        let [zero, one] = if step % 2 == 1 {
            self.ops.split_pi1(state)
        } else {
            self.ops.split_pi0(state)
        };
        let p1 = norm_sqr(&one);
        let p0 = norm_sqr(&zero);
        let total = p0 + p1;
        let unit = |mut v: Vec<Complex64>, p: f64| {
            if p > 0.0 {
                let s = p.sqrt();
                for x in v.iter_mut() {
                    *x /= s;
                }
            }
            Rc::new(v)
        };
        Branch {
            prob_one: p1 / total,
            post: [unit(zero, p0), unit(one, p1)],
        }
    }
}

fn draw(weights: &[f64], rng: &mut impl Rng) -> usize {
    let mut u = rng.gen::<f64>();
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}
