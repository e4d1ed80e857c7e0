//! Piecewise-linear weight tables whose binomial smoothing hits prescribed points.
//!
//! For targets `(s_i, t_i)`, `i = 0..=M+1`, the table `g` on `[0, N]` is
//!
//! * on `Δ_i = [N(s_i - ε/3), N(s_i + ε/3)] ∩ [0, N]`: `t_i + λ_i + σ (z/N - s_i)`
//! * between consecutive `Δ_i`: the straight line joining their end values
//!
//! with `σ = δ / (2ε)` and `λ_0 = λ_{M+1} = 0`. `g` is affine in
//! `λ = (λ_1..λ_M)`, so `P_g(s_i) = t_i` is the linear system `J λ = t - P_{g⁰}(s)`,
//! where `J = I - A` and `A` collects the binomial mass that leaks out of
//! each `Δ_i`. `N` is doubled until `max |λ_i| < δ/3`, which keeps `g`
//! increasing.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::binomial::{bernstein, bernstein_derivative, binom_pmf, binom_tail_outside};
use crate::error::{Error, Result};

/// Smallest step count tried.
pub const N_START: usize = 16;
/// Points in the monotonicity grid over `[0, 1]`.
pub const MONOTONE_GRID: usize = 2049;
/// Condition estimates above this are reported as degenerate.
const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetPointSet {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub eps: f64,
    pub delta: f64,
}

impl TargetPointSet {
    pub fn new(s: Vec<f64>, t: Vec<f64>, eps: f64, delta: f64) -> Result<Self> {
        let ts = Self { s, t, eps, delta };
        ts.validate()?;
        Ok(ts)
    }

    /// Uses the smallest gaps of `s` and `t` as `ε` and `δ`.
    pub fn with_min_gaps(s: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        let gap = |v: &[f64]| v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let (eps, delta) = (gap(&s), gap(&t));
        Self::new(s, t, eps, delta)
    }

    /// Number of interior points.
    pub fn interior(&self) -> usize {
        self.s.len().saturating_sub(2)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.s.len() != self.t.len() || self.s.len() < 2 {
            return bad("s and t must have equal length >= 2".into());
        }
        if !(self.eps > 0.0 && self.eps <= 1.0 && self.delta > 0.0 && self.delta <= 1.0) {
            return bad(format!("need 0 < eps, delta <= 1 (got {}, {})", self.eps, self.delta));
        }
        for (name, v, gap) in [("s", &self.s, self.eps), ("t", &self.t, self.delta)] {
            if v[0] != 0.0 || *v.last().unwrap() != 1.0 {
                return bad(format!("{name} must start at 0 and end at 1"));
            }
            if let Some(w) = v.windows(2).find(|w| w[1] - w[0] < gap - 1e-12) {
                return bad(format!("{name} gap {} below required {gap}", w[1] - w[0]));
            }
        }
        Ok(())
    }
}

/// Solved table plus everything needed to audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizedEMap {
    #[serde(rename = "N")]
    pub n: usize,
    pub g: Vec<f64>,
    /// `λ_0..λ_{M+1}`; the endpoints are 0.
    pub lambda: Vec<f64>,
    /// `|P_g(s_i) - t_i|` for every target, endpoints included.
    pub residuals: Vec<f64>,
    /// Binomial mass of `B(N, s_i)` outside `Δ_i`.
    pub mu: Vec<f64>,
    pub sigma: f64,
    /// `max |λ_i|`
    pub big_lambda: f64,
    /// `‖A‖∞` with `A = I - J`.
    pub a_norm: f64,
    pub condition_estimate: f64,
    /// Largest change made by clipping `g` to `[0, 1]`.
    pub clip_magnitude: f64,
    /// Smallest increment of `P_g` on the monotonicity grid.
    pub monotone_certificate: f64,
    pub targets: TargetPointSet,
}

impl SynthesizedEMap {
    /// The induced map `f(p) = P_g(p)`.
    pub fn f(&self, p: f64) -> f64 {
        bernstein(&self.g, p.clamp(0.0, 1.0))
    }

    pub fn f_derivative(&self, p: f64) -> f64 {
        bernstein_derivative(&self.g, p.clamp(0.0, 1.0))
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, &b| a.max(b))
    }

    /// `2M (2 + σN) max μ_i`, the a-priori bound on `Λ`.
    pub fn lambda_bound(&self) -> f64 {
        let m = self.targets.interior() as f64;
        let mu = self.mu.iter().fold(0.0f64, |a, &b| a.max(b));
        2.0 * m * (2.0 + self.sigma * self.n as f64) * mu
    }
}

/// Piecewise-linear table before clipping; affine in `lambda`.
struct Layout<'a> {
    targets: &'a TargetPointSet,
    n: usize,
    sigma: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl<'a> Layout<'a> {
    fn new(targets: &'a TargetPointSet, n: usize) -> Self {
        let nf = n as f64;
        let third = targets.eps / 3.0;
        Self {
            targets,
            n,
            sigma: targets.delta / (2.0 * targets.eps),
            lo: targets.s.iter().map(|s| (nf * (s - third)).max(0.0)).collect(),
            hi: targets.s.iter().map(|s| (nf * (s + third)).min(nf)).collect(),
        }
    }

    fn piece(&self, i: usize, lambda: &[f64], z: f64) -> f64 {
        self.targets.t[i] + lambda[i] + self.sigma * (z / self.n as f64 - self.targets.s[i])
    }

    fn value(&self, lambda: &[f64], z: f64) -> f64 {
        for i in 0..self.lo.len() {
            if z >= self.lo[i] && z <= self.hi[i] {
                return self.piece(i, lambda, z);
            }
            if i + 1 < self.lo.len() && z > self.hi[i] && z < self.lo[i + 1] {
                let (x0, x1) = (self.hi[i], self.lo[i + 1]);
                let (y0, y1) = (self.piece(i, lambda, x0), self.piece(i + 1, lambda, x1));
                return y0 + (y1 - y0) * (z - x0) / (x1 - x0);
            }
        }
        unreachable!("intervals cover [0, N]")
    }

    fn table(&self, lambda: &[f64]) -> Vec<f64> {
        (0..=self.n).map(|k| self.value(lambda, k as f64)).collect()
    }
}

fn expectation(row: &[f64], g: &[f64]) -> f64 {
    row.iter().zip(g).map(|(a, b)| a * b).sum()
}

/// Smallest increment of `P_g` over a uniform grid.
pub fn monotone_certificate(g: &[f64], points: usize) -> f64 {
    let vals: Vec<f64> = (0..points).map(|j| bernstein(g, j as f64 / (points - 1) as f64)).collect();
    vals.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

pub fn synthesize(targets: &TargetPointSet, tol: f64, n_cap: usize) -> Result<SynthesizedEMap> {
    targets.validate()?;
    let m = targets.interior();
    if m == 0 {
        return Ok(identity_map(targets, N_START.min(n_cap.max(1))));
    }
    let mut n = N_START;
    let mut last_failure = String::from("no step count tried");
    while n <= n_cap {
        match attempt(targets, n, tol)? {
            Ok(em) => return Ok(em),
            Err(why) => last_failure = why,
        }
        n *= 2;
    }
    Err(Error::SynthesisFailed(format!("cap N = {n_cap} reached; last attempt: {last_failure}")))
}

/// `g(k) = k/N`, which makes `P_g` the identity.
fn identity_map(targets: &TargetPointSet, n: usize) -> SynthesizedEMap {
    let g: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    SynthesizedEMap {
        n,
        monotone_certificate: monotone_certificate(&g, MONOTONE_GRID),
        g,
        lambda: vec![0.0; targets.s.len()],
        residuals: vec![0.0; targets.s.len()],
        mu: vec![0.0; targets.s.len()],
        sigma: targets.delta / (2.0 * targets.eps),
        big_lambda: 0.0,
        a_norm: 0.0,
        condition_estimate: 1.0,
        clip_magnitude: 0.0,
        targets: targets.clone(),
    }
}

/// One step count. The outer `Result` carries hard errors; the inner one a
/// reason to try a larger `N`.
fn attempt(targets: &TargetPointSet, n: usize, tol: f64) -> Result<std::result::Result<SynthesizedEMap, String>> {
    let m = targets.interior();
    let layout = Layout::new(targets, n);
    let zeros = vec![0.0; m + 2];
    let g0 = layout.table(&zeros);
    let rows: Vec<Vec<f64>> = (1..=m).map(|i| (0..=n).map(|k| binom_pmf(k, n, targets.s[i])).collect()).collect();

    // Column j of J is P_{φ_j}(s_i) where φ_j is the table's response to λ_j.
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for j in 1..=m {
        let mut e = zeros.clone();
        e[j] = 1.0;
        let phi: Vec<f64> = layout.table(&e).iter().zip(&g0).map(|(a, b)| a - b).collect();
        for i in 1..=m {
            jac[(i - 1, j - 1)] = expectation(&rows[i - 1], &phi);
        }
    }
    let rhs = DVector::from_iterator(m, (1..=m).map(|i| targets.t[i] - expectation(&rows[i - 1], &g0)));

    let a_norm = (DMatrix::<f64>::identity(m, m) - &jac).row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    if a_norm >= 1.0 / (2.0 * m as f64) {
        return Ok(Err(format!("N = {n}: ‖A‖∞ = {a_norm:.3e} not below 1/(2M)")));
    }

    let inf_norm = |mat: &DMatrix<f64>| mat.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let lu = jac.clone().lu();
    let inverse = lu.try_inverse().ok_or(Error::DegenerateSystem(f64::INFINITY))?;
    let condition = inf_norm(&jac) * inf_norm(&inverse);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::DegenerateSystem(condition));
    }
    let mut x = lu.solve(&rhs).ok_or(Error::DegenerateSystem(condition))?;
    let r = &rhs - &jac * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }

    let mut lambda = zeros.clone();
    for i in 1..=m {
        lambda[i] = x[i - 1];
    }
    let raw = layout.table(&lambda);
    let clip_magnitude = raw.iter().map(|v| (v - v.clamp(0.0, 1.0)).abs()).fold(0.0, f64::max);
    let g: Vec<f64> = raw.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let big_lambda = lambda.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let residuals: Vec<f64> = targets.s.iter().zip(&targets.t).map(|(s, t)| (bernstein(&g, *s) - t).abs()).collect();
    let mu: Vec<f64> = (0..targets.s.len()).map(|i| binom_tail_outside(layout.lo[i], layout.hi[i], n, targets.s[i])).collect();
    let max_res = residuals.iter().fold(0.0f64, |a, &b| a.max(b));

    if big_lambda >= targets.delta / 3.0 {
        return Ok(Err(format!("N = {n}: Λ = {big_lambda:.3e} not below δ/3")));
    }
    if clip_magnitude > big_lambda {
        return Ok(Err(format!("N = {n}: clipping {clip_magnitude:.3e} exceeds Λ")));
    }
    if max_res > tol {
        return Ok(Err(format!("N = {n}: residual {max_res:.3e} above {tol:e}")));
    }
    let cert = monotone_certificate(&g, MONOTONE_GRID);
    if cert <= 0.0 {
        return Ok(Err(format!("N = {n}: monotone certificate {cert:.3e}")));
    }
    Ok(Ok(SynthesizedEMap {
        n,
        g,
        lambda,
        residuals,
        mu,
        sigma: layout.sigma,
        big_lambda,
        a_norm,
        condition_estimate: condition,
        clip_magnitude,
        monotone_certificate: cert,
        targets: targets.clone(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(g: &[f64], p: f64) -> f64 {
        // independent summation with an explicit binomial coefficient recurrence
        let n = g.len() - 1;
        if p == 0.0 || p == 1.0 {
            return if p == 0.0 { g[0] } else { g[n] };
        }
        let mut lc = 0.0f64; // ln C(n,k)
        let mut acc = 0.0;
        for (k, gk) in g.iter().enumerate() {
            if k > 0 {
                lc += ((n - k + 1) as f64).ln() - (k as f64).ln();
            }
            acc += (lc + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp() * gk;
        }
        acc
    }

    #[test]
    fn endpoints_only_is_identity() {
        let ts = TargetPointSet::new(vec![0.0, 1.0], vec![0.0, 1.0], 1.0, 1.0).unwrap();
        let em = synthesize(&ts, 1e-9, 4096).unwrap();
        assert!(em.lambda.iter().all(|&l| l == 0.0));
        for (k, gk) in em.g.iter().enumerate() {
            assert!((gk - k as f64 / em.n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn single_interior_point() {
        let ts = TargetPointSet::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.75, 1.0], 0.5, 0.25).unwrap();
        let em = synthesize(&ts, 1e-9, 4096).unwrap();
        assert!((direct(&em.g, 0.5) - 0.75).abs() < 1e-9);
        assert!(em.big_lambda < 0.25 / 3.0);
        assert!(em.monotone_certificate > 0.0);
        assert_eq!(em.g[0], 0.0);
        assert_eq!(*em.g.last().unwrap(), 1.0);
    }

    #[test]
    fn overlap_targets() {
        let ts = TargetPointSet::with_min_gaps(vec![0.0, 2.0 / 3.0, 0.75, 1.0], vec![0.0, 1.0 / 7.0, 6.0 / 7.0, 1.0]).unwrap();
        let em = synthesize(&ts, 1e-9, 4096).unwrap();
        assert!((direct(&em.g, 0.75) - 6.0 / 7.0).abs() < 1e-9);
        assert!((direct(&em.g, 2.0 / 3.0) - 1.0 / 7.0).abs() < 1e-9);
        assert!(em.big_lambda <= em.lambda_bound());
    }

    #[test]
    fn six_point_two_sided_targets() {
        let ts = TargetPointSet::with_min_gaps(vec![0.0, 0.2, 0.3, 0.7, 0.8, 1.0], vec![0.0, 0.05, 0.45, 0.55, 0.95, 1.0]).unwrap();
        let em = synthesize(&ts, 1e-9, 4096).unwrap();
        for (s, t) in ts.s.iter().zip(&ts.t) {
            assert!((direct(&em.g, *s) - t).abs() < 1e-9);
        }
        eprintln!("N = {} Λ = {:e} cond = {}", em.n, em.big_lambda, em.condition_estimate);
    }

    #[test]
    fn invalid_targets_rejected() {
        assert!(TargetPointSet::new(vec![0.0, 0.05, 1.0], vec![0.0, 0.5, 1.0], 0.1, 0.1).is_err());
        assert!(TargetPointSet::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.5], 0.1, 0.1).is_err());
        assert!(TargetPointSet::new(vec![0.1, 0.5, 1.0], vec![0.0, 0.5, 1.0], 0.1, 0.1).is_err());
    }

    #[test]
    fn cap_too_small_fails() {
        let ts = TargetPointSet::with_min_gaps(vec![0.0, 2.0 / 3.0, 0.75, 1.0], vec![0.0, 1.0 / 7.0, 6.0 / 7.0, 1.0]).unwrap();
        assert!(matches!(synthesize(&ts, 1e-9, 32), Err(Error::SynthesisFailed(_))));
    }
}
