//! Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned below.
//! Runs without the libtest harness so the lines always reach the output.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qvp::constructions::bqp::{OVERLAP_BOUND, QT_THRESHOLD};
use qvp::constructions::{bqp_overlap_bound, q2_from_q3, q2_from_total, q3_from_q2, qco, qco_certificate, qp_from_q2, qt_from_q2};
use qvp::emap::{synthesize, TargetPointSet};
use qvp::fixtures::{random_procedure, robust_pair};
use qvp::iterative::jordan::{bernoulli_product, branching_z_law, total_variation};
use qvp::iterative::{jordan_blocks_of, make_nondestructive, pg, pg_derivative, IterativePlan, Sampler};
use qvp::linalg::random::{haar_unitary, random_state};
use qvp::linalg::PureState;
use qvp::procedure::Procedure;
use qvp::spectral::{spectrum, subspace_select, verify_no_interference, IntervalUnion};
use qvp::tolerances::{Limits, SYNTHESIS};
use qvp::verify::{adversarial_states, classical_agreement, default_nondestructive_targets, direct_bernstein, random_increasing_plans};

const TOL_NO_INTERFERENCE: f64 = 1e-10;
const TOL_IID_TV: f64 = 1e-10;
const SAMPLER_SHOTS: usize = 100_000;
const SAMPLER_SIGMAS: f64 = 4.0;
const TOL_PG_IDENTITY: f64 = 1e-12;
/// `P_g(5/6) = 13/18` up to a few ulps of the binomial weights.
const TOL_PG_BETA: f64 = 4.0 * f64::EPSILON;
const TOL_SYNTH_RESIDUAL: f64 = 1e-9;
const N_MAX: usize = 4096;
const TOL_FIDELITY: f64 = 1e-9;
const TOL_BOOST: f64 = 1e-10;
const TOL_CONVERSION: f64 = 1e-12;
const TOL_PROJECTOR: f64 = 1e-8;
const TOL_OVERLAP: f64 = 1e-9;
const TOL_QP: f64 = 1e-9;
const TOL_QCO: f64 = 1e-9;
const TOL_CLASSICAL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Criterion = fn(&Limits) -> qvp::Result<Outcome>;

fn random_fixture(rng: &mut ChaCha8Rng, max_m: usize, max_k: usize, limits: &Limits) -> qvp::Result<Procedure> {
    let (m, k) = (rng.gen_range(1..=max_m), rng.gen_range(0..=max_k));
    random_procedure(rng.gen(), m, k, limits)
}

fn c1_no_interference(limits: &Limits) -> qvp::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let q = random_fixture(&mut rng, 3, 3, limits)?;
        let s = spectrum(&q)?;
        let alphas = random_state(q.witness_qubits(), &mut rng).into_amplitudes();
        worst = worst.max(verify_no_interference(&q, &s, &alphas)?.deviation);
    }
    Ok(outcome(worst <= TOL_NO_INTERFERENCE, format!("50 procedures, max |Pr - Σ|α|²p| = {worst:.2e} (tol {TOL_NO_INTERFERENCE:.0e})")))
}

fn c2_iid(limits: &Limits) -> qvp::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut tv: f64 = 0.0;
    let mut worst_sigma: f64 = 0.0;
    let plan = IterativePlan::binary(&[0.0, 0.2, 0.5, 0.7, 1.0])?;
    for i in 0..20 {
        let q = random_fixture(&mut rng, 2, 2, limits)?;
        let (ops, _) = jordan_blocks_of(&q)?;
        let basis = spectrum(&q)?.eigenbasis();
        for n in 1..=6 {
            for (p, psi) in &basis {
                tv = tv.max(total_variation(&branching_z_law(&ops, psi.amplitudes(), n), &bernoulli_product(*p, n)));
            }
        }
        // One eigenstate per procedure through the sampling engine.
        let (p, psi) = &basis[i % basis.len()];
        let run = Sampler::new(&q, &plan, limits)?.run(&psi.to_density(), SAMPLER_SHOTS, 100 + i as u64, 0)?;
        let exact = pg(&plan, *p)?;
        let sigma = (exact * (1.0 - exact) / SAMPLER_SHOTS as f64).sqrt().max(1.0 / SAMPLER_SHOTS as f64);
        worst_sigma = worst_sigma.max((run.distribution[1] - exact).abs() / sigma);
    }
    Ok(outcome(
        tv <= TOL_IID_TV && worst_sigma <= SAMPLER_SIGMAS,
        format!("max TV {tv:.2e} (tol {TOL_IID_TV:.0e}); sampler max deviation {worst_sigma:.2}σ at {SAMPLER_SHOTS} shots"),
    ))
}

fn c3_pg_identity_beta(_: &Limits) -> qvp::Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in [1usize, 2, 7, 64, 1000, N_MAX] {
        let plan = IterativePlan::binary(&(0..=n).map(|k| k as f64 / n as f64).collect::<Vec<_>>())?;
        for i in 0..=1000 {
            let p = i as f64 / 1000.0;
            worst = worst.max((pg(&plan, p)? - p).abs());
        }
    }
    let beta = pg(&IterativePlan::binary(&[1.0, 0.0, 1.0])?, 5.0 / 6.0)?;
    let beta_err = (beta - 13.0 / 18.0).abs();
    Ok(outcome(
        worst <= TOL_PG_IDENTITY && beta_err <= TOL_PG_BETA,
        format!("identity max dev {worst:.2e} (tol {TOL_PG_IDENTITY:.0e}); P_g(5/6) - 13/18 = {beta_err:.1e}"),
    ))
}

/// Increment taken on whichever of `P_g`, `1 - P_g` is small, so values near 1 do not cancel.
fn increment(plan: &IterativePlan, p0: f64, p1: f64) -> qvp::Result<f64> {
    let g = plan.accept_weights()?;
    let (a, b) = (direct_bernstein(&g, p0), direct_bernstein(&g, p1));
    if a > 0.5 {
        let h: Vec<f64> = g.iter().map(|x| 1.0 - x).collect();
        return Ok(direct_bernstein(&h, p0) - direct_bernstein(&h, p1));
    }
    Ok(b - a)
}

fn c4_monotone(_: &Limits) -> qvp::Result<Outcome> {
    let plans = random_increasing_plans(4, 100, 64);
    let (mut min_inc, mut min_der) = (f64::INFINITY, f64::INFINITY);
    for plan in &plans {
        for i in 0..=1000 {
            let p = i as f64 / 1000.0;
            min_der = min_der.min(pg_derivative(plan, p)?);
            if i < 1000 {
                min_inc = min_inc.min(increment(plan, p, (i + 1) as f64 / 1000.0)?);
            }
        }
    }
    Ok(outcome(min_inc > 0.0 && min_der > 0.0, format!("100 plans, min increment {min_inc:.2e}, min derivative {min_der:.2e}")))
}

/// `M` interior points with all `s` gaps `>= eps` and all `t` gaps `>= delta`.
fn random_targets(rng: &mut ChaCha8Rng, m: usize, eps: f64, delta: f64) -> qvp::Result<TargetPointSet> {
    let mut points = |gap: f64| -> Vec<f64> {
        let slack = 1.0 - (m + 1) as f64 * gap;
        let mut w: Vec<f64> = (0..=m).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x = gap + slack * *x / total);
        let mut acc = 0.0;
        let mut v = vec![0.0];
        for x in &w[..m] {
            acc += x;
            v.push(acc);
        }
        v.push(1.0);
        v
    };
    let s = points(eps);
    let t = points(delta);
    TargetPointSet::new(s, t, eps, delta)
}

fn c5_synthesis(limits: &Limits) -> qvp::Result<Outcome> {
    let mut sets = vec![TargetPointSet::new(vec![0.0, 2.0 / 3.0, 0.75, 1.0], vec![0.0, 1.0 / 7.0, 6.0 / 7.0, 1.0], 1.0 / 12.0, 1.0 / 7.0)?];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..20 {
        sets.push(random_targets(&mut rng, 1 + i % 4, 0.1, 0.05)?);
    }
    let (mut worst_res, mut worst_direct, mut max_n, mut lambda_ok) = (0.0f64, 0.0f64, 0usize, true);
    let mut failures = Vec::new();
    for (i, t) in sets.iter().enumerate() {
        match synthesize(t, SYNTHESIS, limits.n_cap.min(N_MAX)) {
            Ok(em) => {
                worst_res = worst_res.max(em.max_residual());
                lambda_ok &= em.big_lambda < t.delta / 3.0;
                max_n = max_n.max(em.n);
                for (s, target) in t.s.iter().zip(&t.t) {
                    worst_direct = worst_direct.max((direct_bernstein(&em.g, *s) - target).abs());
                }
            }
            Err(e) => failures.push(format!("set {i}: {e}")),
        }
    }
    Ok(outcome(
        failures.is_empty() && worst_res <= TOL_SYNTH_RESIDUAL && worst_direct <= TOL_SYNTH_RESIDUAL && lambda_ok && max_n <= N_MAX,
        format!("{} sets, max N {max_n}, residual {worst_res:.1e}, direct {worst_direct:.1e}, Λ<δ/3 {lambda_ok}; failures {failures:?}", sets.len()),
    ))
}

fn c6_nondestructive(limits: &Limits) -> qvp::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let q = random_procedure(66, 2, 1, limits)?;
    let nd = make_nondestructive(&q, &default_nondestructive_targets(), SYNTHESIS, limits)?;
    let mut worst_fid: f64 = 1.0;
    for (_, psi) in spectrum(&q)?.eigenbasis() {
        if let (_, Some(post)) = nd.run_exact(&psi)? {
            worst_fid = worst_fid.min(post.fidelity(&psi));
        }
        // Post-accept states of the simulated measurement sequence.
        for _ in 0..20 {
            let run = nd.run(&psi, &mut rng, limits)?;
            if let (true, Some(post)) = (run.accept, run.post_state) {
                worst_fid = worst_fid.min(post.fidelity(&psi));
            }
        }
    }
    let mut worst_boost = f64::INFINITY;
    for _ in 0..50 {
        let psi = random_state(q.witness_qubits(), &mut rng);
        if let (_, Some(post)) = nd.run_exact(&psi)? {
            worst_boost = worst_boost.min(q.accept_probability(&post)? - q.accept_probability(&psi)?);
        }
    }
    Ok(outcome(
        worst_fid >= 1.0 - TOL_FIDELITY && worst_boost >= -TOL_BOOST,
        format!("min post-accept fidelity 1 - {:.1e}; min boost {worst_boost:.3e} over 50 inputs", 1.0 - worst_fid),
    ))
}

fn c7_conversions(limits: &Limits) -> qvp::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut fixtures = vec![Procedure::from_spectrum(&[0.75, 5.0 / 6.0, 0.5, 0.0])?];
    for _ in 0..10 {
        fixtures.push(random_fixture(&mut rng, 2, 2, limits)?);
    }
    let mut worst: f64 = 0.0;
    for q in &fixtures {
        let q3 = q3_from_q2(q, limits)?;
        let qt = qt_from_q2(q, limits)?;
        let q2t = q2_from_total(q)?;
        let back = q2_from_q3(&q3)?;
        let (l, z, lb) = (q3.outcome_index("L")?, q3.outcome_index("0")?, q3.outcome_index("Lbar")?);
        for (p, psi) in spectrum(q)?.eigenbasis() {
            let d = q3.probabilities_pure(&psi)?;
            for (got, want) in [
                (d[l], p * p),
                (d[z], 2.0 * p * (1.0 - p)),
                (d[lb], (1.0 - p) * (1.0 - p)),
                (qt.accept_probability(&psi)?, p * p + (1.0 - p) * (1.0 - p)),
                (q2t.accept_probability(&psi)?, (1.0 + p) / 2.0),
            ] {
                worst = worst.max((got - want).abs());
            }
        }
        // The two-outcome reading of a three-outcome procedure holds on any input.
        for _ in 0..5 {
            let psi = random_state(q.witness_qubits(), &mut rng);
            let d = q3.probabilities_pure(&psi)?;
            worst = worst.max((back.accept_probability(&psi)? - (0.5 + (d[l] - d[lb]) / 2.0)).abs());
        }
    }
    let spot = &fixtures[0];
    let step3 = q2_from_q3(&q3_from_q2(spot, limits)?)?.accept_probability(&PureState::basis(4, 0)?)?;
    let beta = qt_from_q2(spot, limits)?.accept_probability(&PureState::basis(4, 1)?)?;
    let spot_err = (step3 - 0.75).abs().max((beta - 13.0 / 18.0).abs());
    Ok(outcome(
        worst <= TOL_CONVERSION && spot_err <= TOL_CONVERSION,
        format!("{} fixtures, max map error {worst:.1e}; spot 3/4 -> {step3:.15}, 5/6 -> {beta:.15}", fixtures.len()),
    ))
}

fn c8_subspaces(limits: &Limits) -> qvp::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut worst_t, mut worst_total) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let q = random_fixture(&mut rng, 2, 2, limits)?;
        let qt = qt_from_q2(&q, limits)?;
        let lhs = subspace_select(&spectrum(&qt)?, &IntervalUnion::single(QT_THRESHOLD, 1.0)).projector();
        let rhs = subspace_select(&spectrum(&q)?, &IntervalUnion::single(0.0, 1.0 / 6.0).union(5.0 / 6.0, 1.0)).projector();
        worst_t = worst_t.max(lhs.max_abs_diff(&rhs));
        let a = 2.0 / 3.0;
        let q2 = q2_from_total(&q)?;
        let lhs = subspace_select(&spectrum(&q2)?, &IntervalUnion::single((1.0 + a) / 2.0, 1.0)).projector();
        let rhs = subspace_select(&spectrum(&q)?, &IntervalUnion::single(a, 1.0)).projector();
        worst_total = worst_total.max(lhs.max_abs_diff(&rhs));
    }
    Ok(outcome(
        worst_t <= TOL_PROJECTOR && worst_total <= TOL_PROJECTOR,
        format!("20 fixtures, projector mismatch {worst_t:.1e} (total) and {worst_total:.1e} ((1+p)/2) (tol {TOL_PROJECTOR:.0e})"),
    ))
}

/// Random eigenbasis; eigenvalues in `[lo, hi]`, optionally one forced into `[5/6, 1]`.
fn promise_fixture(rng: &mut ChaCha8Rng, lo: f64, hi: f64, top: bool) -> qvp::Result<Procedure> {
    let m = rng.gen_range(1..=2);
    let d = 1usize << m;
    let mut probs: Vec<f64> = (0..d).map(|_| rng.gen_range(lo..=hi)).collect();
    if top {
        probs[rng.gen_range(0..d)] = rng.gen_range(5.0 / 6.0..=1.0);
    }
    Procedure::from_eigenbasis(&haar_unitary(d, rng), &probs)
}

fn c9_overlap(limits: &Limits) -> qvp::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut min_overlap, mut min_qp, mut states) = (f64::INFINITY, f64::INFINITY, 0usize);
    let mut em_err: f64 = 0.0;
    for i in 0..20 {
        let q2 = promise_fixture(&mut rng, 1.0 / 3.0, 1.0, true)?;
        let (qp, em) = qp_from_q2(&q2, limits)?;
        em_err = em_err.max((em.f(0.75) - 6.0 / 7.0).abs()).max((em.f(2.0 / 3.0) - 1.0 / 7.0).abs());
        for rho in adversarial_states(&q2, 900 + i, 30)? {
            let c = bqp_overlap_bound(&q2, &rho, limits)?;
            if c.constraint_met {
                states += 1;
                min_overlap = min_overlap.min(c.overlap);
                min_qp = min_qp.min(qp.acceptance_probabilities(&rho)?[1]);
            }
        }
    }
    let mut max_out: f64 = 0.0;
    for _ in 0..20 {
        let q2 = promise_fixture(&mut rng, 0.0, 2.0 / 3.0, false)?;
        let (qp, _) = qp_from_q2(&q2, limits)?;
        max_out = max_out.max(spectrum(&qp)?.probabilities().iter().cloned().fold(0.0, f64::max));
    }
    Ok(outcome(
        min_overlap >= OVERLAP_BOUND - TOL_OVERLAP && em_err <= TOL_QP && min_qp >= 2.0 / 9.0 - TOL_QP && max_out <= 1.0 / 7.0 + TOL_QP,
        format!(
            "{states} constrained states, min overlap {min_overlap:.6} (7/27 = {OVERLAP_BOUND:.6}); Qp map error {em_err:.1e}; \
             Qp in-L min {min_qp:.4} >= 2/9, out-of-L max {max_out:.6} <= 1/7"
        ),
    ))
}

fn c10_qco(limits: &Limits) -> qvp::Result<Outcome> {
    let (mut min_complete, mut max_diag, mut max_entry, mut max_tr, mut max_top) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut eta = 0.0;
    for seed in 0..10 {
        let rp = robust_pair(seed, 2, 1)?;
        let (qt, q_in, q_out) = rp.procedures(limits)?;
        let off = qco(&q_out, &qt, &rp.reduction, rp.thresholds, limits)?;
        min_complete = min_complete.min(qco_certificate(&off, &qt, rp.thresholds.a_prime, false)?.completeness.unwrap_or(0.0));
        let on = qco(&q_in, &qt, &rp.reduction, rp.thresholds, limits)?;
        let d = qco_certificate(&on, &qt, rp.thresholds.a_prime, true)?.soundness.expect("diagnostics");
        eta = d.eta;
        max_diag = max_diag.max(d.max_diagonal);
        max_entry = max_entry.max(d.max_entry);
        max_tr = max_tr.max(d.trace_square);
        max_top = max_top.max(d.top_eigenvalue);
    }
    let bound = (1.0 - eta) * (1.0 - eta);
    Ok(outcome(
        eta == 1.0 / 16.0
            && min_complete >= bound - TOL_QCO
            && max_diag <= eta + TOL_QCO
            && max_entry <= eta + TOL_QCO
            && max_tr <= 1.0 / 16.0 + TOL_QCO
            && max_top <= 0.25,
        format!(
            "10 fixtures, η = {eta}: completeness {min_complete:.4} >= {bound:.4}; eigenstate {max_diag:.2e}, entry {max_entry:.2e}, \
             Tr M1² {max_tr:.2e}, top {max_top:.2e}"
        ),
    ))
}

fn c11_classical(limits: &Limits) -> qvp::Result<Outcome> {
    let mut worst: f64 = 0.0;
    for seed in 0..4 {
        for r in classical_agreement("acceptance", 1100 + seed, limits)? {
            worst = worst.max(r.lhs);
        }
    }
    Ok(outcome(worst <= TOL_CLASSICAL, format!("40 diagonal procedures, max disagreement {worst:.1e} (tol {TOL_CLASSICAL:.0e})")))
}

fn main() -> ExitCode {
    let limits = Limits::default();
    let criteria: [(&str, Criterion); 11] = [
        ("no-interference", c1_no_interference),
        ("iterative i.i.d. law", c2_iid),
        ("P_g identity and beta", c3_pg_identity_beta),
        ("strict monotonicity", c4_monotone),
        ("e-map synthesis", c5_synthesis),
        ("nondestructiveness", c6_nondestructive),
        ("conversion formulas", c7_conversions),
        ("subspace equalities", c8_subspaces),
        ("overlap bound", c9_overlap),
        ("complement verifier", c10_qco),
        ("classical oracle agreement", c11_classical),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run(&limits) {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("{} criterion {:>2} {name}: {detail} [{} ms]", if pass { "PASS" } else { "FAIL" }, i + 1, start.elapsed().as_millis());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
