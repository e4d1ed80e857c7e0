use serde::{Deserialize, Serialize};

use crate::binomial::{bernstein, bernstein_derivative, binom_row};
use crate::error::{Error, Result};
use crate::tolerances::Limits;

/// Step count `N` and, for every count `s = 0..=N` of equal neighbours, a
/// distribution over the output alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterativePlan {
    #[serde(rename = "N")]
    pub n: usize,
    pub alphabet: Vec<String>,
    pub g: Vec<Vec<f64>>,
}

pub fn binary_alphabet() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

/// Plan-file order of the three-outcome alphabet.
pub fn lzl_alphabet() -> Vec<String> {
    vec!["L".into(), "0".into(), "Lbar".into()]
}

impl IterativePlan {
    /// Two-letter plan where `accept[s]` is the probability of outputting 1.
    pub fn binary(accept: &[f64]) -> Result<Self> {
        if accept.len() < 2 {
            return Err(Error::PlanInvalid("need g(0..=N) with N >= 1".into()));
        }
        let plan = Self {
            n: accept.len() - 1,
            alphabet: binary_alphabet(),
            g: accept.iter().map(|&a| vec![1.0 - a, a]).collect(),
        };
        plan.validate_shape()?;
        Ok(plan)
    }

    /// Accept iff at least `s0` neighbours agree.
    pub fn threshold(n: usize, s0: usize) -> Result<Self> {
        let g: Vec<f64> = (0..=n).map(|s| if s >= s0 { 1.0 } else { 0.0 }).collect();
        Self::binary(&g)
    }

    pub fn validate(&self, limits: &Limits) -> Result<()> {
        self.validate_shape()?;
        if self.n > limits.n_cap {
            return Err(Error::PlanInvalid(format!("N = {} exceeds cap {}", self.n, limits.n_cap)));
        }
        Ok(())
    }

    fn validate_shape(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::PlanInvalid("N must be at least 1".into()));
        }
        if self.g.len() != self.n + 1 {
            return Err(Error::PlanInvalid(format!("g has {} rows, expected N+1 = {}", self.g.len(), self.n + 1)));
        }
        if self.alphabet.len() < 2 {
            return Err(Error::PlanInvalid("alphabet needs at least two letters".into()));
        }
        let known = [binary_alphabet(), lzl_alphabet()];
        if !known.iter().any(|a| same_letters(a, &self.alphabet)) {
            return Err(Error::PlanInvalid(format!("unsupported alphabet {:?}", self.alphabet)));
        }
        for (s, row) in self.g.iter().enumerate() {
            if row.len() != self.alphabet.len() {
                return Err(Error::PlanInvalid(format!("g({s}) has {} entries", row.len())));
            }
            if row.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::PlanInvalid(format!("g({s}) has a negative or non-finite entry")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::PlanInvalid(format!("g({s}) sums to {sum}")));
            }
        }
        Ok(())
    }

    pub fn letter_index(&self, letter: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|l| l == letter)
            .ok_or_else(|| Error::WrongAlphabet(format!("plan has no letter '{letter}'")))
    }

    /// Column of `g` for one letter.
    pub fn letter_weights(&self, letter: usize) -> Vec<f64> {
        self.g.iter().map(|row| row[letter]).collect()
    }

    /// Acceptance weights `g(s)[1]` of a binary plan.
    pub fn accept_weights(&self) -> Result<Vec<f64>> {
        Ok(self.letter_weights(self.letter_index("1")?))
    }

    /// Output distribution on an eigenstate of acceptance probability `p`:
    /// `sum_s Binom(s; N, p) g(s)`.
    pub fn output_distribution(&self, p: f64) -> Vec<f64> {
        let row = binom_row(self.n, p.clamp(0.0, 1.0));
        let mut out = vec![0.0; self.alphabet.len()];
        for (w, g) in row.iter().zip(&self.g) {
            for (o, x) in out.iter_mut().zip(g) {
                *o += w * x;
            }
        }
        out
    }
}

fn same_letters(a: &[String], b: &[String]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

/// `P_g(p)`: acceptance probability of a binary plan on an eigenstate with `p`.
pub fn pg(plan: &IterativePlan, p: f64) -> Result<f64> {
    Ok(bernstein(&plan.accept_weights()?, p.clamp(0.0, 1.0)))
}

pub fn pg_derivative(plan: &IterativePlan, p: f64) -> Result<f64> {
    Ok(bernstein_derivative(&plan.accept_weights()?, p.clamp(0.0, 1.0)))
}
