//! Classical probabilistic verification procedures.
//!
//! A procedure is a Boolean circuit over instance bits `x`, witness bits `y`
//! and random-tape bits `z`. Wires are numbered `x`, then `y`, then `z`, then
//! one fresh wire per gate. Tapes are enumerated exactly, 64 at a time with
//! one tape per bit lane.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::binomial::bernstein;
use crate::error::{Error, Result};
use crate::iterative::IterativePlan;
use crate::tolerances::Limits;

/// Longest tape enumerated exactly.
pub const MAX_TAPE_BITS: usize = 24;
/// Longest witness enumerated by [`acceptance_sets`].
pub const MAX_WITNESS_BITS: usize = 16;
const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoolOp {
    And,
    Or,
    Xor,
    Not,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoolGate {
    pub op: BoolOp,
    #[serde(rename = "in")]
    pub inputs: Vec<usize>,
    pub out: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BooleanCircuit {
    pub x_bits: usize,
    pub y_bits: usize,
    pub z_bits: usize,
    pub gates: Vec<BoolGate>,
    pub output: usize,
}

impl BooleanCircuit {
    pub fn input_wires(&self) -> usize {
        self.x_bits + self.y_bits + self.z_bits
    }

    pub fn wire_count(&self) -> usize {
        self.input_wires() + self.gates.len()
    }

    /// Gate `i` must write wire `inputs + i` and read only earlier wires.
    pub fn validate(&self) -> Result<()> {
        let base = self.input_wires();
        for (i, g) in self.gates.iter().enumerate() {
            let out = base + i;
            if g.out != out {
                return Err(Error::InvalidInput(format!("gate {i} writes wire {}, expected {out}", g.out)));
            }
            let arity_ok = match g.op {
                BoolOp::Not => g.inputs.len() == 1,
                _ => g.inputs.len() >= 2,
            };
            if !arity_ok {
                return Err(Error::InvalidInput(format!("gate {i} ({:?}) has {} inputs", g.op, g.inputs.len())));
            }
            if let Some(w) = g.inputs.iter().find(|&&w| w >= out) {
                return Err(Error::InvalidInput(format!("gate {i} reads wire {w} before it is written")));
            }
        }
        if self.output >= self.wire_count() {
            return Err(Error::InvalidInput(format!("output wire {} does not exist", self.output)));
        }
        Ok(())
    }

    fn check_bits(&self, x: &[bool], y: &[bool]) -> Result<()> {
        if x.len() != self.x_bits || y.len() != self.y_bits {
            return Err(Error::BadLength(format!(
                "got |x| = {}, |y| = {}; circuit expects {} and {}",
                x.len(),
                y.len(),
                self.x_bits,
                self.y_bits
            )));
        }
        Ok(())
    }

    /// Evaluates 64 tapes at once; `tape_lane(i)` is the lane word of tape bit `i`.
    fn eval_lanes(&self, x: &[bool], y: &[bool], tape_lane: impl Fn(usize) -> u64, wires: &mut Vec<u64>) -> u64 {
        let fill = |b: bool| if b { u64::MAX } else { 0 };
        wires.clear();
        wires.extend(x.iter().chain(y).map(|&b| fill(b)));
        wires.extend((0..self.z_bits).map(&tape_lane));
        for g in &self.gates {
            let mut it = g.inputs.iter().map(|&w| wires[w]);
            let first = it.next().unwrap_or(0);
            let v = match g.op {
                BoolOp::Not => !first,
                BoolOp::And => it.fold(first, |a, b| a & b),
                BoolOp::Or => it.fold(first, |a, b| a | b),
                BoolOp::Xor => it.fold(first, |a, b| a ^ b),
            };
            wires.push(v);
        }
        wires[self.output]
    }

    /// Output on one tape; bit `i` of `z` is tape bit `i`.
    pub fn evaluate(&self, x: &[bool], y: &[bool], z: u64) -> Result<bool> {
        self.validate()?;
        self.check_bits(x, y)?;
        let mut wires = Vec::with_capacity(self.wire_count());
        Ok(self.eval_lanes(x, y, |i| if (z >> i) & 1 == 1 { u64::MAX } else { 0 }, &mut wires) & 1 == 1)
    }
}

/// Lane word for tape bit `i` across tapes `64 * block .. 64 * block + 63`.
fn lane_word(i: usize, block: u64) -> u64 {
    const PATTERNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    if i < 6 {
        PATTERNS[i]
    } else if (block >> (i - 6)) & 1 == 1 {
        u64::MAX
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TapeMode {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PyEstimate {
    pub value: f64,
    pub exact: bool,
    /// Wilson 95% interval in sampled mode.
    pub ci: Option<(f64, f64)>,
    pub samples: u64,
}

fn wilson(hits: u64, n: u64) -> (f64, f64) {
    let (n, p) = (n as f64, hits as f64 / n as f64);
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// `Pr_z[C(x, y, z) = 1]`.
pub fn p_y(c: &BooleanCircuit, x: &[bool], y: &[bool], mode: TapeMode) -> Result<PyEstimate> {
    c.validate()?;
    c.check_bits(x, y)?;
    let mut wires = Vec::with_capacity(c.wire_count());
    match mode {
        TapeMode::Exact => {
            if c.z_bits > MAX_TAPE_BITS {
                return Err(Error::TapeTooLong(c.z_bits));
            }
            let total = 1u64 << c.z_bits;
            let lanes = total.min(64);
            let mask = if lanes == 64 { u64::MAX } else { (1u64 << lanes) - 1 };
            let hits: u64 = (0..total.div_ceil(64))
                .map(|block| (c.eval_lanes(x, y, |i| lane_word(i, block), &mut wires) & mask).count_ones() as u64)
                .sum();
            Ok(PyEstimate {
                value: hits as f64 / total as f64,
                exact: true,
                ci: None,
                samples: total,
            })
        }
        TapeMode::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(Error::ShotsZero);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hits = 0u64;
            let mut left = samples;
            while left > 0 {
                let lanes = left.min(64);
                let words: Vec<u64> = (0..c.z_bits).map(|_| rng.gen()).collect();
                let out = c.eval_lanes(x, y, |i| words[i], &mut wires);
                let mask = if lanes == 64 { u64::MAX } else { (1u64 << lanes) - 1 };
                hits += (out & mask).count_ones() as u64;
                left -= lanes;
            }
            Ok(PyEstimate {
                value: hits as f64 / samples as f64,
                exact: false,
                ci: Some(wilson(hits, samples as u64)),
                samples: samples as u64,
            })
        }
    }
}

/// `y` as a bit vector, most significant bit first.
pub fn witness_bits(index: usize, m: usize) -> Vec<bool> {
    (0..m).map(|i| (index >> (m - 1 - i)) & 1 == 1).collect()
}

pub fn bitstring(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::InvalidInput(format!("'{s}' is not a bitstring"))),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceSets {
    /// `p_y` for every witness, indexed like [`witness_bits`].
    pub p: Vec<f64>,
    /// Witnesses with `p_y >= a`.
    pub high: Vec<String>,
    /// Witnesses with `p_y <= b`.
    pub low: Vec<String>,
}

pub fn acceptance_sets(c: &BooleanCircuit, x: &[bool], a: f64, b: f64) -> Result<AcceptanceSets> {
    if c.y_bits > MAX_WITNESS_BITS {
        return Err(Error::WitnessTooLong(c.y_bits));
    }
    let mut sets = AcceptanceSets { p: vec![], high: vec![], low: vec![] };
    for idx in 0..1usize << c.y_bits {
        let y = witness_bits(idx, c.y_bits);
        let p = p_y(c, x, &y, TapeMode::Exact)?.value;
        if p >= a {
            sets.high.push(bitstring(&y));
        }
        if p <= b {
            sets.low.push(bitstring(&y));
        }
        sets.p.push(p);
    }
    Ok(sets)
}

/// Output distribution of the classical iterative procedure: draw `N` tapes,
/// count accepts `k`, output a letter from `g(k)`. Each letter gets
/// `sum_k Binom(k; N, p_y) g(k)`, the same sum `pg` evaluates.
pub fn classical_iterative(c: &BooleanCircuit, x: &[bool], y: &[bool], plan: &IterativePlan, limits: &Limits) -> Result<Vec<f64>> {
    plan.validate(limits)?;
    let p = p_y(c, x, y, TapeMode::Exact)?.value;
    Ok(iterative_distribution(plan, p))
}

pub fn iterative_distribution(plan: &IterativePlan, p: f64) -> Vec<f64> {
    (0..plan.alphabet.len()).map(|l| bernstein(&plan.letter_weights(l), p)).collect()
}

/// Sampled counterpart of [`classical_iterative`]: letter counts over `shots` runs.
pub fn classical_iterative_sampled(c: &BooleanCircuit, x: &[bool], y: &[bool], plan: &IterativePlan, shots: usize, seed: u64, limits: &Limits) -> Result<Vec<u64>> {
    plan.validate(limits)?;
    c.validate()?;
    c.check_bits(x, y)?;
    if shots == 0 {
        return Err(Error::ShotsZero);
    }
    if c.z_bits > 64 {
        return Err(Error::TapeTooLong(c.z_bits));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wires = Vec::with_capacity(c.wire_count());
    let mut counts = vec![0u64; plan.alphabet.len()];
    for _ in 0..shots {
        let mut k = 0usize;
        for _ in 0..plan.n {
            let z: u64 = rng.gen();
            k += (c.eval_lanes(x, y, |i| if (z >> i) & 1 == 1 { u64::MAX } else { 0 }, &mut wires) & 1) as usize;
        }
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let letter = plan.g[k].iter().position(|w| {
            acc += w;
            u < acc
        });
        counts[letter.unwrap_or(plan.alphabet.len() - 1)] += 1;
    }
    Ok(counts)
}

/// Circuit with no instance bits whose `p_y` for witness index `j` is
/// `numerators[j] / 2^z_bits`: accept iff the tape, read as an integer, is
/// below the numerator selected by `y`.
pub fn diagonal_counterpart(numerators: &[u64], z_bits: usize) -> Result<BooleanCircuit> {
    let n = numerators.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::BadLength(format!("{n} witnesses is not a power of two >= 2")));
    }
    if z_bits == 0 || z_bits > MAX_TAPE_BITS {
        return Err(Error::TapeTooLong(z_bits));
    }
    if let Some(c) = numerators.iter().find(|&&c| c > 1u64 << z_bits) {
        return Err(Error::InvalidInput(format!("numerator {c} exceeds 2^{z_bits}")));
    }
    let m = n.trailing_zeros() as usize;
    let mut b = Builder::new(m, z_bits);
    let zero = b.push(BoolOp::Xor, vec![b.z(0), b.z(0)]);
    let one = b.push(BoolOp::Not, vec![zero]);
    let y_lit: Vec<[usize; 2]> = (0..m).map(|i| [b.push(BoolOp::Not, vec![b.y(i)]), b.y(i)]).collect();
    let z_lit: Vec<[usize; 2]> = (0..z_bits).map(|i| [b.push(BoolOp::Not, vec![b.z(i)]), b.z(i)]).collect();
    let mut terms = vec![];
    for (j, &c) in numerators.iter().enumerate() {
        let below = b.less_than(c, &z_lit, zero, one);
        let mut ins: Vec<usize> = witness_bits(j, m).iter().enumerate().map(|(i, &bit)| y_lit[i][bit as usize]).collect();
        ins.push(below);
        ins.push(one);
        terms.push(b.push(BoolOp::And, ins));
    }
    terms.push(zero);
    let output = b.push(BoolOp::Or, terms);
    Ok(BooleanCircuit { x_bits: 0, y_bits: m, z_bits, gates: b.gates, output })
}

struct Builder {
    m: usize,
    l: usize,
    gates: Vec<BoolGate>,
}

impl Builder {
    fn new(m: usize, l: usize) -> Self {
        Self { m, l, gates: vec![] }
    }

    fn y(&self, i: usize) -> usize {
        i
    }

    fn z(&self, i: usize) -> usize {
        self.m + i
    }

    fn push(&mut self, op: BoolOp, inputs: Vec<usize>) -> usize {
        let out = self.m + self.l + self.gates.len();
        self.gates.push(BoolGate { op, inputs, out });
        out
    }

    /// `z < c` scanning from the top tape bit: some bit where `c` has 1 and `z` has 0,
    /// with all higher bits equal.
    fn less_than(&mut self, c: u64, z_lit: &[[usize; 2]], zero: usize, one: usize) -> usize {
        if c >= 1u64 << self.l {
            return one;
        }
        let mut terms = vec![zero, zero];
        let mut prefix = vec![one];
        for i in (0..self.l).rev() {
            let bit = (c >> i) & 1 == 1;
            if bit {
                let mut ins = prefix.clone();
                ins.push(z_lit[i][0]);
                ins.push(one);
                terms.push(self.push(BoolOp::And, ins));
            }
            prefix.push(z_lit[i][bit as usize]);
        }
        self.push(BoolOp::Or, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iterative::pg;

    fn circuit(z_bits: usize, gates: Vec<(BoolOp, Vec<usize>)>, output: usize) -> BooleanCircuit {
        let base = z_bits;
        BooleanCircuit {
            x_bits: 0,
            y_bits: 0,
            z_bits,
            gates: gates.into_iter().enumerate().map(|(i, (op, inputs))| BoolGate { op, inputs, out: base + i }).collect(),
            output,
        }
    }

    /// Tape-by-tape evaluation, one bool per wire.
    fn naive_p(c: &BooleanCircuit, x: &[bool], y: &[bool]) -> f64 {
        let mut hits = 0u64;
        for z in 0..1u64 << c.z_bits {
            let mut w: Vec<bool> = x.iter().chain(y).copied().collect();
            w.extend((0..c.z_bits).map(|i| (z >> i) & 1 == 1));
            for g in &c.gates {
                let vals: Vec<bool> = g.inputs.iter().map(|&i| w[i]).collect();
                w.push(match g.op {
                    BoolOp::Not => !vals[0],
                    BoolOp::And => vals.iter().all(|&v| v),
                    BoolOp::Or => vals.iter().any(|&v| v),
                    BoolOp::Xor => vals.iter().fold(false, |a, &v| a ^ v),
                });
            }
            hits += w[c.output] as u64;
        }
        hits as f64 / (1u64 << c.z_bits) as f64
    }

    #[test]
    fn constant_one() {
        let c = circuit(1, vec![(BoolOp::Xor, vec![0, 0]), (BoolOp::Not, vec![1])], 2);
        assert_eq!(p_y(&c, &[], &[], TapeMode::Exact).unwrap().value, 1.0);
    }

    #[test]
    fn single_tape_bit() {
        let c = circuit(1, vec![], 0);
        assert_eq!(p_y(&c, &[], &[], TapeMode::Exact).unwrap().value, 0.5);
    }

    #[test]
    fn majority_of_three() {
        let c = circuit(
            3,
            vec![
                (BoolOp::And, vec![0, 1]),
                (BoolOp::And, vec![0, 2]),
                (BoolOp::And, vec![1, 2]),
                (BoolOp::Or, vec![3, 4, 5]),
            ],
            6,
        );
        let p = p_y(&c, &[], &[], TapeMode::Exact).unwrap().value;
        assert_eq!(p, 0.5);
        assert_eq!(p, naive_p(&c, &[], &[]));
    }

    #[test]
    fn bitsliced_matches_naive_on_wide_tapes() {
        // Parity of tape bits 0, 7 and 9 AND bit 3: 1/4.
        let c = circuit(10, vec![(BoolOp::Xor, vec![0, 7, 9]), (BoolOp::And, vec![10, 3])], 11);
        let p = p_y(&c, &[], &[], TapeMode::Exact).unwrap().value;
        assert_eq!(p, naive_p(&c, &[], &[]));
        assert_eq!(p, 0.25);
    }

    #[test]
    fn sampled_interval_covers_exact() {
        let c = circuit(3, vec![(BoolOp::Or, vec![0, 1, 2])], 3);
        let e = p_y(&c, &[], &[], TapeMode::Sampled { samples: 20_000, seed: 3 }).unwrap();
        let (lo, hi) = e.ci.unwrap();
        assert!(lo <= 0.875 && 0.875 <= hi, "{e:?}");
    }

    #[test]
    fn tape_and_witness_caps() {
        let c = circuit(25, vec![], 0);
        assert_eq!(p_y(&c, &[], &[], TapeMode::Exact), Err(Error::TapeTooLong(25)));
        let w = BooleanCircuit { x_bits: 0, y_bits: 17, z_bits: 1, gates: vec![], output: 0 };
        assert_eq!(acceptance_sets(&w, &[], 0.5, 0.5), Err(Error::WitnessTooLong(17)));
    }

    #[test]
    fn malformed_circuits_rejected() {
        let forward = circuit(1, vec![(BoolOp::And, vec![0, 2])], 1);
        assert!(forward.validate().is_err());
        let unary_and = circuit(1, vec![(BoolOp::And, vec![0])], 1);
        assert!(unary_and.validate().is_err());
        let json = r#"{"x_bits":0,"y_bits":0,"z_bits":1,"gates":[{"op":"nand","in":[0,0],"out":1}],"output":1}"#;
        assert!(serde_json::from_str::<BooleanCircuit>(json).is_err());
    }

    #[test]
    fn planted_witness_is_singleton() {
        // Accept iff y = 101, independent of the tape.
        let c = BooleanCircuit {
            x_bits: 0,
            y_bits: 3,
            z_bits: 1,
            gates: vec![
                BoolGate { op: BoolOp::Not, inputs: vec![1], out: 4 },
                BoolGate { op: BoolOp::And, inputs: vec![0, 4, 2], out: 5 },
            ],
            output: 5,
        };
        let s = acceptance_sets(&c, &[], 2.0 / 3.0, 1.0 / 3.0).unwrap();
        assert_eq!(s.high, vec!["101".to_string()]);
        assert_eq!(s.low.len(), 7);
    }

    #[test]
    fn constant_circuit_sets() {
        let c = circuit(1, vec![(BoolOp::Xor, vec![0, 0])], 1);
        let c = BooleanCircuit { y_bits: 2, gates: vec![BoolGate { op: BoolOp::Xor, inputs: vec![2, 2], out: 3 }], output: 3, ..c };
        let s = acceptance_sets(&c, &[], 0.5, 0.5).unwrap();
        assert!(s.high.is_empty());
        assert_eq!(s.low.len(), 4);
    }

    #[test]
    fn diagonal_counterpart_reproduces_numerators() {
        let nums = [0u64, 1, 5, 8, 13, 16, 3, 7];
        let c = diagonal_counterpart(&nums, 4).unwrap();
        for (j, &num) in nums.iter().enumerate() {
            let y = witness_bits(j, 3);
            let p = p_y(&c, &[], &y, TapeMode::Exact).unwrap().value;
            assert_eq!(p, num as f64 / 16.0);
            assert_eq!(p, naive_p(&c, &[], &y));
        }
    }

    #[test]
    fn iterative_matches_pg_and_beta() {
        let c = diagonal_counterpart(&[64, 40], 6).unwrap();
        let plan = IterativePlan::binary(&[1.0, 0.0, 1.0]).unwrap();
        let d = classical_iterative(&c, &[], &[false], &plan, &Limits::default()).unwrap();
        assert_eq!(d[1], 1.0);
        let d = classical_iterative(&c, &[], &[true], &plan, &Limits::default()).unwrap();
        let p = 40.0 / 64.0;
        assert!((d[1] - pg(&plan, p).unwrap()).abs() <= 1e-12);
        assert!((d[1] - (p * p + (1.0 - p) * (1.0 - p))).abs() <= 1e-12);
        assert!((iterative_distribution(&plan, 5.0 / 6.0)[1] - 13.0 / 18.0).abs() <= 1e-15);
    }

    #[test]
    fn sampled_iterative_tracks_exact() {
        let c = diagonal_counterpart(&[3, 1], 2).unwrap();
        let plan = IterativePlan::threshold(5, 3).unwrap();
        let exact = classical_iterative(&c, &[], &[false], &plan, &Limits::default()).unwrap()[1];
        let shots = 20_000;
        let counts = classical_iterative_sampled(&c, &[], &[false], &plan, shots, 11, &Limits::default()).unwrap();
        let freq = counts[1] as f64 / shots as f64;
        let sigma = (exact * (1.0 - exact) / shots as f64).sqrt();
        assert!((freq - exact).abs() < 4.0 * sigma);
    }
}
