//! Named checks run by `qvp verify`, each producing one or more reports.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classical::{classical_iterative, diagonal_counterpart, witness_bits};
use crate::constructions::{
    bqp_overlap_bound, compose_reduction, pair_from_q3, q2_from_q3, q2_from_total, q3_from_pair, q3_from_q2, qco, qco_certificate, qp_from_q2,
    qt_from_q2, probe_robustness, QcoThresholds, Reduction,
};
use crate::constructions::bqp::{OVERLAP_BOUND, QT_THRESHOLD};
use crate::constructions::conversions::{q3_plan, qt_plan};
use crate::emap::{synthesize, TargetPointSet};
use crate::error::{Error, Result};
use crate::iterative::jordan::{bernoulli_product, branching_z_law, total_variation};
use crate::iterative::{jordan_blocks_of, make_nondestructive, pg, pg_derivative, IterativePlan, Sampler};
use crate::linalg::random::random_state;
use crate::linalg::{DensityMatrix, PureState};
use crate::procedure::{build_procedure, CircuitDescription, Procedure, ProcedureJson};
use crate::report::{Relation, VerificationReport};
use crate::spectral::{spectrum, subspace_select, IntervalUnion};
use crate::tolerances::{Limits, SYNTHESIS};

/// Theorem identifiers accepted by `qvp verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckId {
    NoInterference,
    BlockStructure,
    IterativeIid,
    PgIdentity,
    PgBeta,
    PgMonotone,
    EmapSynthesis,
    Nondestructive,
    Conversions,
    SubspaceEquality,
    TfqmaEq,
    OverlapBound,
    Qco,
    Robustness,
    ClassicalAgreement,
}

impl CheckId {
    pub const ALL: [CheckId; 15] = [
        CheckId::NoInterference,
        CheckId::BlockStructure,
        CheckId::IterativeIid,
        CheckId::PgIdentity,
        CheckId::PgBeta,
        CheckId::PgMonotone,
        CheckId::EmapSynthesis,
        CheckId::Nondestructive,
        CheckId::Conversions,
        CheckId::SubspaceEquality,
        CheckId::TfqmaEq,
        CheckId::OverlapBound,
        CheckId::Qco,
        CheckId::Robustness,
        CheckId::ClassicalAgreement,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::NoInterference => "no-interference",
            CheckId::BlockStructure => "block-structure",
            CheckId::IterativeIid => "iterative-iid",
            CheckId::PgIdentity => "pg-identity",
            CheckId::PgBeta => "pg-beta",
            CheckId::PgMonotone => "pg-monotone",
            CheckId::EmapSynthesis => "emap-synthesis",
            CheckId::Nondestructive => "nondestructive",
            CheckId::Conversions => "conversions",
            CheckId::SubspaceEquality => "subspace-equality",
            CheckId::TfqmaEq => "tfqma-eq",
            CheckId::OverlapBound => "overlap-bound",
            CheckId::Qco => "qco",
            CheckId::Robustness => "robustness",
            CheckId::ClassicalAgreement => "classical-agreement",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown theorem id '{s}'")))
    }
}

/// Robust-pair fixture as read back from disk.
#[derive(Debug, Clone)]
pub struct RobustPairInstance {
    pub qt: Procedure,
    pub q_in: Procedure,
    pub q_out: Procedure,
    pub reduction: Reduction,
    pub thresholds: QcoThresholds,
    pub witnesses: Vec<PureState>,
}

#[derive(Debug, Clone)]
pub enum Instance {
    /// Checks that generate their own inputs from the seed.
    None,
    Procedure(Procedure),
    Plan(IterativePlan),
    Targets(TargetPointSet),
    RobustPair(Box<RobustPairInstance>),
}

impl Instance {
    fn kind(&self) -> &'static str {
        match self {
            Instance::None => "none",
            Instance::Procedure(_) => "procedure",
            Instance::Plan(_) => "plan",
            Instance::Targets(_) => "targets",
            Instance::RobustPair(_) => "robust-pair",
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_robust_pair(dir: &Path, limits: &Limits) -> Result<RobustPairInstance> {
    let desc = |name: &str| -> Result<Procedure> { build_procedure(&parse::<CircuitDescription>(&dir.join(name))?, limits) };
    #[derive(serde::Deserialize)]
    struct Th {
        a: f64,
        b: f64,
        a_prime: f64,
    }
    let th: Th = parse(&dir.join("thresholds.json"))?;
    let witnesses: Vec<crate::linalg::StateJson> = parse(&dir.join("witnesses.json"))?;
    let witnesses = witnesses
        .into_iter()
        .map(|s| match s {
            crate::linalg::StateJson::Pure { re, im } => PureState::new(re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect()),
            _ => Err(Error::InvalidInput("witnesses must be pure states".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RobustPairInstance {
        qt: desc("qt.json")?,
        q_in: desc("q_in.json")?,
        q_out: desc("q_out.json")?,
        reduction: Reduction::from_json(&read(&dir.join("reduction.json"))?)?,
        thresholds: QcoThresholds { a: th.a, b: th.b, a_prime: th.a_prime },
        witnesses,
    })
}

/// A fixture directory (robust pair or single circuit) or a procedure, plan or targets file.
pub fn load_instance(path: &Path, limits: &Limits) -> Result<(String, Instance)> {
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    if path.is_dir() {
        if path.join("qt.json").exists() {
            return Ok((name, Instance::RobustPair(Box::new(load_robust_pair(path, limits)?))));
        }
        let circuit = path.join("circuit.json");
        if circuit.exists() {
            return Ok((name, Instance::Procedure(parse::<ProcedureJson>(&circuit)?.build(limits)?)));
        }
        return Err(Error::InvalidInput(format!("{} holds no recognised fixture", path.display())));
    }
    let v: serde_json::Value = serde_json::from_str(&read(path)?).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    if v.get("N").is_some() && v.get("g").is_some() {
        let plan: IterativePlan = serde_json::from_value(v).map_err(|e| Error::InvalidInput(e.to_string()))?;
        plan.validate(limits)?;
        return Ok((name, Instance::Plan(plan)));
    }
    if v.get("s").is_some() && v.get("t").is_some() {
        let t: TargetPointSet = serde_json::from_value(v).map_err(|e| Error::InvalidInput(e.to_string()))?;
        t.validate()?;
        return Ok((name, Instance::Targets(t)));
    }
    let pj: ProcedureJson = serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    Ok((name, Instance::Procedure(pj.build(limits)?)))
}

fn wrong_instance(id: CheckId, got: &Instance) -> Error {
    Error::InvalidInput(format!("check '{id}' cannot run on a {} instance", got.kind()))
}

fn procedure_of(id: CheckId, inst: &Instance) -> Result<&Procedure> {
    match inst {
        Instance::Procedure(q) => Ok(q),
        other => Err(wrong_instance(id, other)),
    }
}

/// Runs one check; `runtime_ms` is filled only when `timings` is set so that
/// report files stay byte-identical across runs.
pub fn run_check(id: CheckId, name: &str, inst: &Instance, seed: u64, timings: bool, limits: &Limits) -> Result<Vec<VerificationReport>> {
    let start = Instant::now();
    let mut reports = match id {
        CheckId::NoInterference => no_interference(procedure_of(id, inst)?, name, seed)?,
        CheckId::BlockStructure => block_structure(procedure_of(id, inst)?, name)?,
        CheckId::IterativeIid => iterative_iid(procedure_of(id, inst)?, name, seed, 100_000, limits)?,
        CheckId::PgIdentity => pg_identity(name)?,
        CheckId::PgBeta => pg_beta(name)?,
        CheckId::PgMonotone => match inst {
            Instance::Plan(p) => pg_monotone(std::slice::from_ref(p), name)?,
            Instance::None => pg_monotone(&random_increasing_plans(seed, 100, 64), name)?.into_iter().map(|r| r.with_seed(seed)).collect(),
            other => return Err(wrong_instance(id, other)),
        },
        CheckId::EmapSynthesis => match inst {
            Instance::Targets(t) => emap_synthesis(t, name, limits)?,
            Instance::None => emap_synthesis(&crate::constructions::qp_targets(), name, limits)?,
            other => return Err(wrong_instance(id, other)),
        },
        CheckId::Nondestructive => nondestructive(procedure_of(id, inst)?, name, seed, limits)?,
        CheckId::Conversions => match inst {
            Instance::Procedure(q) => conversions(q, name, limits)?,
            Instance::None => conversions(&Procedure::from_spectrum(&[0.75, 5.0 / 6.0, 0.5, 0.2])?, name, limits)?,
            other => return Err(wrong_instance(id, other)),
        },
        CheckId::SubspaceEquality => subspace_equality(procedure_of(id, inst)?, name, limits)?,
        CheckId::TfqmaEq => tfqma_eq(procedure_of(id, inst)?, name, 2.0 / 3.0)?,
        CheckId::OverlapBound => overlap_bound(procedure_of(id, inst)?, name, seed, limits)?,
        CheckId::Qco => match inst {
            Instance::RobustPair(rp) => qco_check(rp, name, limits)?,
            other => return Err(wrong_instance(id, other)),
        },
        CheckId::Robustness => match inst {
            Instance::RobustPair(rp) => robustness(rp, name, seed)?,
            other => return Err(wrong_instance(id, other)),
        },
        CheckId::ClassicalAgreement => classical_agreement(name, seed, limits)?,
    };
    let elapsed = if timings { start.elapsed().as_millis() as u64 } else { 0 };
    for r in &mut reports {
        r.runtime_ms = elapsed;
    }
    Ok(reports)
}

fn rep(check: &str, name: &str, lhs: f64, rel: Relation, rhs: f64, tol: f64) -> VerificationReport {
    VerificationReport::new(check, name, lhs, rel, rhs, tol)
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn random_coefficients(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let qubits = n.trailing_zeros() as usize;
    random_state(qubits, rng).into_amplitudes()
}

/// `|Pr[accept] - Σ|α_i|² p_i|` on random superpositions of the eigenbasis.
pub fn no_interference(q: &Procedure, name: &str, seed: u64) -> Result<Vec<VerificationReport>> {
    let s = spectrum(q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let alphas = random_coefficients(s.dim(), &mut rng);
        worst = worst.max(crate::spectral::verify_no_interference(q, &s, &alphas)?.deviation);
    }
    Ok(vec![rep("no-interference", name, worst, Relation::Le, 0.0, 1e-10).with_seed(seed)])
}

/// Largest off-diagonal entry of `E1` in its eigenbasis.
pub fn block_structure(q: &Procedure, name: &str) -> Result<Vec<VerificationReport>> {
    let e1 = q.accept_element()?;
    let basis = spectrum(q)?.eigenbasis();
    let mut off: f64 = 0.0;
    for (i, (_, u)) in basis.iter().enumerate() {
        for (j, (_, v)) in basis.iter().enumerate() {
            if i != j {
                off = off.max(e1.sandwich(u.amplitudes(), v.amplitudes()).norm());
            }
        }
    }
    Ok(vec![rep("block-structure", name, off, Relation::Le, 0.0, 1e-10)])
}

/// Joint law of `(z_1..z_N)` on each eigenstate against `Bernoulli(p)^N`,
/// plus a sampled `P_g` run against the exact value.
pub fn iterative_iid(q: &Procedure, name: &str, seed: u64, shots: usize, limits: &Limits) -> Result<Vec<VerificationReport>> {
    let (ops, _) = jordan_blocks_of(q)?;
    let basis = spectrum(q)?.eigenbasis();
    let mut tv: f64 = 0.0;
    for n in 1..=6 {
        for (p, psi) in &basis {
            let law = branching_z_law(&ops, psi.amplitudes(), n);
            tv = tv.max(total_variation(&law, &bernoulli_product(*p, n)));
        }
    }
    let plan = IterativePlan::threshold(4, 2)?;
    let sampler = Sampler::new(q, &plan, limits)?;
    let mut dev_sigma: f64 = 0.0;
    for (k, (p, psi)) in basis.iter().enumerate() {
        let run = sampler.run(&psi.to_density(), shots, seed.wrapping_add(k as u64), 0)?;
        let exact = pg(&plan, *p)?;
        let freq = run.distribution[plan.letter_index("1")?];
        let sigma = (exact * (1.0 - exact) / shots as f64).sqrt().max(1.0 / shots as f64);
        dev_sigma = dev_sigma.max((freq - exact).abs() / sigma);
    }
    Ok(vec![
        rep("iterative-iid/exact", name, tv, Relation::Le, 0.0, 1e-10),
        rep("iterative-iid/sampled", name, dev_sigma, Relation::Le, 4.0, 0.0).with_seed(seed),
    ])
}

/// `g(k) = k/N` reproduces `p` on a 1001-point grid.
pub fn pg_identity(name: &str) -> Result<Vec<VerificationReport>> {
    let mut worst: f64 = 0.0;
    for n in [1usize, 2, 3, 10, 64, 512, 4096] {
        let plan = IterativePlan::binary(&(0..=n).map(|k| k as f64 / n as f64).collect::<Vec<_>>())?;
        for i in 0..=1000 {
            let p = i as f64 / 1000.0;
            worst = worst.max((pg(&plan, p)? - p).abs());
        }
    }
    Ok(vec![rep("pg-identity", name, worst, Relation::Le, 0.0, 1e-12)])
}

/// `N = 2`, `g = (1, 0, 1)` at `p = 5/6`.
pub fn pg_beta(name: &str) -> Result<Vec<VerificationReport>> {
    let v = pg(&qt_plan(), 5.0 / 6.0)?;
    Ok(vec![rep("pg-beta", name, v, Relation::Eq, 13.0 / 18.0, 4.0 * f64::EPSILON)])
}

/// Increasing, non-constant acceptance weights with `N <= max_n`.
pub fn random_increasing_plans(seed: u64, count: usize, max_n: usize) -> Vec<IterativePlan> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_n);
            let mut g: Vec<f64> = (0..=n).map(|_| rng.gen::<f64>()).collect();
            g.sort_by(f64::total_cmp);
            if g[0] == g[n] {
                g[n] = 1.0;
                g[0] = 0.0;
            }
            IterativePlan::binary(&g).expect("weights in [0,1]")
        })
        .collect()
}

/// `P_g(p1) - P_g(p0)`, taken on the complement when both values sit near 1.
fn pg_increment(plan: &IterativePlan, p0: f64, p1: f64) -> Result<f64> {
    let (a, b) = (pg(plan, p0)?, pg(plan, p1)?);
    if a > 0.5 {
        let rejecting = IterativePlan::binary(&plan.accept_weights()?.iter().map(|g| 1.0 - g).collect::<Vec<_>>())?;
        return Ok(pg(&rejecting, p0)? - pg(&rejecting, p1)?);
    }
    Ok(b - a)
}

/// Smallest increment over the 1001-point grid and smallest derivative on
/// its interior; at `p = 0, 1` the derivative is `N (g(1) - g(0))`,
/// `N (g(N) - g(N-1))`, which may vanish for increasing `g`.
pub fn pg_monotone(plans: &[IterativePlan], name: &str) -> Result<Vec<VerificationReport>> {
    let mut min_inc = f64::INFINITY;
    let mut min_der = f64::INFINITY;
    for plan in plans {
        for i in 0..=1000 {
            let p = i as f64 / 1000.0;
            if i > 0 && i < 1000 {
                min_der = min_der.min(pg_derivative(plan, p)?);
            }
            if i < 1000 {
                min_inc = min_inc.min(pg_increment(plan, p, (i + 1) as f64 / 1000.0)?);
            }
        }
    }
    Ok(vec![
        rep("pg-monotone/derivative", name, min_der, Relation::Gt, 0.0, 0.0),
        rep("pg-monotone/increment", name, min_inc, Relation::Gt, 0.0, 0.0),
    ])
}

/// `Σ_k C(N,k) p^k (1-p)^(N-k) g(k)` with the binomial weights built by a
/// log-space product recurrence, independent of the library pmf.
pub fn direct_bernstein(g: &[f64], p: f64) -> f64 {
    let n = g.len() - 1;
    if p <= 0.0 {
        return g[0];
    }
    if p >= 1.0 {
        return g[n];
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut log_c = 0.0f64;
    let mut sum = 0.0;
    for (k, gk) in g.iter().enumerate() {
        if k > 0 {
            log_c += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        sum += gk * (log_c + k as f64 * lp + (n - k) as f64 * lq).exp();
    }
    sum
}

pub fn emap_synthesis(t: &TargetPointSet, name: &str, limits: &Limits) -> Result<Vec<VerificationReport>> {
    let em = synthesize(t, SYNTHESIS, limits.n_cap)?;
    let direct = t.s.iter().zip(&t.t).map(|(s, target)| (direct_bernstein(&em.g, *s) - target).abs());
    Ok(vec![
        rep("emap-synthesis/N", name, em.n as f64, Relation::Le, limits.n_cap as f64, 0.0),
        rep("emap-synthesis/residual", name, em.max_residual(), Relation::Le, 0.0, SYNTHESIS),
        rep("emap-synthesis/lambda", name, em.big_lambda, Relation::Lt, t.delta / 3.0, 0.0),
        rep("emap-synthesis/direct", name, max_of(direct), Relation::Le, 0.0, SYNTHESIS),
    ])
}

/// Targets for the nondestructive wrapper used by the CLI check.
pub fn default_nondestructive_targets() -> TargetPointSet {
    TargetPointSet::with_min_gaps(vec![0.0, 0.5, 1.0], vec![0.0, 0.3, 1.0]).expect("static targets")
}

/// Post-accept fidelity on eigenstates and the re-acceptance boost on random inputs.
pub fn nondestructive(q: &Procedure, name: &str, seed: u64, limits: &Limits) -> Result<Vec<VerificationReport>> {
    let nd = make_nondestructive(q, &default_nondestructive_targets(), SYNTHESIS, limits)?;
    let mut worst_fidelity: f64 = 1.0;
    for (_, psi) in spectrum(q)?.eigenbasis() {
        if let (_, Some(post)) = nd.run_exact(&psi)? {
            worst_fidelity = worst_fidelity.min(post.fidelity(&psi));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_boost = f64::INFINITY;
    for _ in 0..50 {
        let psi = random_state(q.witness_qubits(), &mut rng);
        if let (_, Some(post)) = nd.run_exact(&psi)? {
            worst_boost = worst_boost.min(q.accept_probability(&post)? - q.accept_probability(&psi)?);
        }
    }
    Ok(vec![
        rep("nondestructive/fidelity", name, worst_fidelity, Relation::Ge, 1.0, 1e-9),
        rep("nondestructive/boost", name, worst_boost, Relation::Ge, 0.0, 1e-10).with_seed(seed),
    ])
}

/// Eigenvalue maps of the conversions, read off each eigenstate.
pub fn conversions(q: &Procedure, name: &str, limits: &Limits) -> Result<Vec<VerificationReport>> {
    let q3 = q3_from_q2(q, limits)?;
    let qt = qt_from_q2(q, limits)?;
    let q2t = q2_from_total(q)?;
    let back = q2_from_q3(&q3)?;
    let (l, z, lbar) = (q3.outcome_index("L")?, q3.outcome_index("0")?, q3.outcome_index("Lbar")?);
    let (mut e3, mut et, mut etot, mut e2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (p, psi) in spectrum(q)?.eigenbasis() {
        let d = q3.probabilities_pure(&psi)?;
        e3 = e3.max((d[l] - p * p).abs()).max((d[z] - 2.0 * p * (1.0 - p)).abs()).max((d[lbar] - (1.0 - p).powi(2)).abs());
        et = et.max((qt.accept_probability(&psi)? - (p * p + (1.0 - p).powi(2))).abs());
        etot = etot.max((q2t.accept_probability(&psi)? - (1.0 + p) / 2.0).abs());
        e2 = e2.max((back.accept_probability(&psi)? - (0.5 + (d[l] - d[lbar]) / 2.0)).abs());
    }
    // Spot values on a fixed diagonal fixture.
    let spot = Procedure::from_spectrum(&[0.75, 5.0 / 6.0])?;
    let spot3 = q3_from_q2(&spot, limits)?;
    let spot_back = q2_from_q3(&spot3)?.accept_probability(&PureState::basis(2, 0)?)?;
    let spot_beta = qt_from_q2(&spot, limits)?.accept_probability(&PureState::basis(2, 1)?)?;
    Ok(vec![
        rep("conversions/q3-from-q2", name, e3, Relation::Le, 0.0, 1e-12),
        rep("conversions/qt", name, et, Relation::Le, 0.0, 1e-12),
        rep("conversions/q2-from-total", name, etot, Relation::Le, 0.0, 1e-12),
        rep("conversions/q2-from-q3", name, e2, Relation::Le, 0.0, 1e-12),
        rep("conversions/spot-3/4", name, spot_back, Relation::Eq, 0.75, 1e-12),
        rep("conversions/spot-5/6", name, spot_beta, Relation::Eq, 13.0 / 18.0, 1e-12),
    ])
}

/// `H_{Qᵀ}^{>=13/18} = H_{Q²}^{[0,1/6] ∪ [5/6,1]}`.
pub fn subspace_equality(q2: &Procedure, name: &str, limits: &Limits) -> Result<Vec<VerificationReport>> {
    let qt = qt_from_q2(q2, limits)?;
    let lhs = subspace_select(&spectrum(&qt)?, &IntervalUnion::single(QT_THRESHOLD, 1.0)).projector();
    let rhs = subspace_select(&spectrum(q2)?, &IntervalUnion::single(0.0, 1.0 / 6.0).union(5.0 / 6.0, 1.0)).projector();
    Ok(vec![rep("subspace-equality", name, lhs.max_abs_diff(&rhs), Relation::Le, 0.0, 1e-8)])
}

/// `H_{Q²}^{>=(1+a)/2} = H_Q^{>=a}` for `Q² = q2_from_total(Q)`, and `H_{Q²}^{<1/2}` empty.
pub fn tfqma_eq(q: &Procedure, name: &str, a: f64) -> Result<Vec<VerificationReport>> {
    let q2 = q2_from_total(q)?;
    let s2 = spectrum(&q2)?;
    let lhs = subspace_select(&s2, &IntervalUnion::single((1.0 + a) / 2.0, 1.0)).projector();
    let rhs = subspace_select(&spectrum(q)?, &IntervalUnion::single(a, 1.0)).projector();
    let below_half = s2.probabilities().iter().filter(|&&p| p < 0.5 - 1e-12).count();
    Ok(vec![
        rep("tfqma-eq/subspace", name, lhs.max_abs_diff(&rhs), Relation::Le, 0.0, 1e-8),
        rep("tfqma-eq/below-half", name, below_half as f64, Relation::Eq, 0.0, 0.0),
    ])
}

/// States meeting `Tr(E_1(Qᵀ) ρ) = 13/18` built from eigenstate pairs, plus random
/// superpositions lifted onto the constraint.
pub fn adversarial_states(q2: &Procedure, seed: u64, random: usize) -> Result<Vec<DensityMatrix>> {
    let basis = spectrum(q2)?.eigenbasis();
    let beta = crate::constructions::beta;
    let mut out = Vec::new();
    for (p_in, u) in basis.iter().filter(|(p, _)| *p >= 0.75) {
        for (p_out, v) in basis.iter().filter(|(p, _)| *p < 0.75) {
            let (bi, bo) = (beta(*p_in), beta(*p_out));
            if bi > QT_THRESHOLD && bo < QT_THRESHOLD {
                let w = (QT_THRESHOLD - bo) / (bi - bo);
                out.push(DensityMatrix::mixture(&[w, 1.0 - w], &[u.clone(), v.clone()])?);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = basis.iter().max_by(|a, b| beta(a.0).total_cmp(&beta(b.0))).map(|(_, s)| s.clone());
    for _ in 0..random {
        let psi = random_state(q2.witness_qubits(), &mut rng);
        let rho = psi.to_density();
        let b: f64 = basis.iter().map(|(p, s)| beta(*p) * crate::linalg::inner(s.amplitudes(), psi.amplitudes()).norm_sqr()).sum();
        match &top {
            Some(t) if b < QT_THRESHOLD && beta(spectrum_value(&basis, t)) > QT_THRESHOLD => {
                let bt = beta(spectrum_value(&basis, t));
                let w = (QT_THRESHOLD - b) / (bt - b);
                let mixed = &rho.matrix().scale_real(1.0 - w) + &t.to_density().matrix().scale_real(w);
                out.push(DensityMatrix::new(mixed)?);
            }
            _ if b >= QT_THRESHOLD => out.push(rho),
            _ => {}
        }
    }
    Ok(out)
}

fn spectrum_value(basis: &[(f64, PureState)], s: &PureState) -> f64 {
    basis.iter().find(|(_, v)| v == s).map_or(0.0, |(p, _)| *p)
}

/// The 7/27 overlap bound on adversarial states, and the `(2/9, 1/7)` separation of `Qᴾ`.
pub fn overlap_bound(q2: &Procedure, name: &str, seed: u64, limits: &Limits) -> Result<Vec<VerificationReport>> {
    let (qp, em) = qp_from_q2(q2, limits)?;
    let ps = spectrum(q2)?.probabilities();
    let top = ps.iter().cloned().fold(0.0, f64::max);
    let mut out = vec![
        rep("overlap-bound/qp-3/4", name, em.f(0.75), Relation::Eq, 6.0 / 7.0, 1e-9),
        rep("overlap-bound/qp-2/3", name, em.f(2.0 / 3.0), Relation::Eq, 1.0 / 7.0, 1e-9),
    ];
    if top <= 2.0 / 3.0 + 1e-12 {
        let qp_top = spectrum(&qp)?.probabilities().iter().cloned().fold(0.0, f64::max);
        out.push(rep("overlap-bound/soundness", name, qp_top, Relation::Le, 1.0 / 7.0, 1e-9));
        return Ok(out);
    }
    let mut min_overlap = f64::INFINITY;
    let mut min_qp = f64::INFINITY;
    for rho in adversarial_states(q2, seed, 50)? {
        let c = bqp_overlap_bound(q2, &rho, limits)?;
        if c.constraint_met {
            min_overlap = min_overlap.min(c.overlap);
            min_qp = min_qp.min(qp.acceptance_probabilities(&rho)?[1]);
        }
    }
    out.push(rep("overlap-bound/overlap", name, min_overlap, Relation::Ge, OVERLAP_BOUND, 1e-9).with_seed(seed));
    out.push(rep("overlap-bound/completeness", name, min_qp, Relation::Ge, 2.0 / 9.0, 1e-9).with_seed(seed));
    Ok(out)
}

pub fn qco_check(rp: &RobustPairInstance, name: &str, limits: &Limits) -> Result<Vec<VerificationReport>> {
    let out = qco(&rp.q_out, &rp.qt, &rp.reduction, rp.thresholds, limits)?;
    let c_out = qco_certificate(&out, &rp.qt, rp.thresholds.a_prime, false)?;
    let inn = qco(&rp.q_in, &rp.qt, &rp.reduction, rp.thresholds, limits)?;
    let c_in = qco_certificate(&inn, &rp.qt, rp.thresholds.a_prime, true)?;
    let d = c_in.soundness.expect("in-language certificate carries diagnostics");
    Ok(vec![
        rep("qco/completeness", name, c_out.completeness.unwrap_or(0.0), Relation::Ge, c_out.completeness_bound, 1e-9),
        rep("qco/eigenstate-acceptance", name, d.max_diagonal, Relation::Le, d.eta, 1e-9),
        rep("qco/entrywise", name, d.max_entry, Relation::Le, d.eta, 1e-9),
        rep("qco/trace-square", name, d.trace_square, Relation::Le, d.trace_square_bound, 1e-9),
        rep("qco/soundness", name, d.top_eigenvalue, Relation::Le, 0.25, 0.0),
    ])
}

pub fn robustness(rp: &RobustPairInstance, name: &str, seed: u64) -> Result<Vec<VerificationReport>> {
    let r = probe_robustness(&rp.q_in, &rp.qt, &rp.reduction, rp.thresholds.a, rp.thresholds.a_prime, 400, seed)?;
    Ok(vec![rep("robustness", name, r.empirical_min, Relation::Ge, r.target, crate::tolerances::PROBABILITY_SLACK).with_seed(seed)])
}

/// Dyadic spectra with `l = 6` tape bits.
fn dyadic_spectrum(rng: &mut ChaCha8Rng, m: usize) -> Vec<u64> {
    (0..1usize << m).map(|_| rng.gen_range(0..=64)).collect()
}

/// Diagonal procedures against their Boolean-circuit counterparts on every
/// conversion map.
pub fn classical_agreement(name: &str, seed: u64, limits: &Limits) -> Result<Vec<VerificationReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut bump = |x: f64| worst = worst.max(x.abs());
    for m in [1usize, 2] {
        for _ in 0..5 {
            let nums = dyadic_spectrum(&mut rng, m);
            let probs: Vec<f64> = nums.iter().map(|&c| c as f64 / 64.0).collect();
            let q = Procedure::from_spectrum(&probs)?;
            let c = diagonal_counterpart(&nums, 6)?;
            let mut spec = spectrum(&q)?.eigenbasis().iter().map(|(p, _)| *p).collect::<Vec<_>>();
            let mut classical: Vec<f64> = (0..probs.len())
                .map(|j| crate::classical::p_y(&c, &[], &witness_bits(j, m), crate::classical::TapeMode::Exact).map(|e| e.value))
                .collect::<Result<_>>()?;
            spec.sort_by(f64::total_cmp);
            classical.sort_by(f64::total_cmp);
            spec.iter().zip(&classical).for_each(|(a, b)| bump(a - b));

            let q3 = q3_from_q2(&q, limits)?;
            let qt = qt_from_q2(&q, limits)?;
            let q2t = q2_from_total(&q)?;
            let back = q2_from_q3(&q3)?;
            let (qa, qb) = pair_from_q3(&q3)?;
            for j in 0..probs.len() {
                let y = witness_bits(j, m);
                let basis = PureState::basis(probs.len(), j)?;
                let d3 = q3.probabilities_pure(&basis)?;
                let c3 = classical_iterative(&c, &[], &y, &q3_plan(), limits)?;
                let plan = q3_plan();
                for letter in ["L", "0", "Lbar"] {
                    bump(d3[q3.outcome_index(letter)?] - c3[plan.letter_index(letter)?]);
                }
                let (cl, clbar) = (c3[plan.letter_index("L")?], c3[plan.letter_index("Lbar")?]);
                bump(back.accept_probability(&basis)? - (0.5 + (cl - clbar) / 2.0));
                bump(qa.accept_probability(&basis)? - cl);
                bump(qb.accept_probability(&basis)? - clbar);
                let ct = classical_iterative(&c, &[], &y, &qt_plan(), limits)?;
                bump(qt.accept_probability(&basis)? - ct[1]);
                bump(q2t.accept_probability(&basis)? - (1.0 + probs[j]) / 2.0);
            }
            // Router: prefix 1 runs the first procedure, prefix 0 the second.
            let other = Procedure::from_spectrum(&probs.iter().rev().copied().collect::<Vec<_>>())?;
            let routed = q3_from_pair(&q, &other, limits)?;
            let dim = probs.len();
            for j in 0..dim {
                let y = witness_bits(j, m);
                let p_first = crate::classical::p_y(&c, &[], &y, crate::classical::TapeMode::Exact)?.value;
                let p_second = probs[dim - 1 - j];
                let on_one = routed.probabilities_pure(&PureState::basis(2 * dim, dim + j)?)?;
                let on_zero = routed.probabilities_pure(&PureState::basis(2 * dim, j)?)?;
                bump(on_one[routed.outcome_index("L")?] - p_first);
                bump(on_zero[routed.outcome_index("Lbar")?] - p_second);
            }
        }
    }
    Ok(vec![rep("classical-agreement", name, worst, Relation::Le, 0.0, 1e-12).with_seed(seed)])
}

/// `qr` as a report-free helper for the CLI.
pub fn reduced_procedure(q: &Procedure, red: &Reduction) -> Result<Procedure> {
    compose_reduction(q, &red.phi)
}
