//! Bernoulli test matrices, simulated outcomes and the threshold decoders.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::design::positivity;
use crate::error::{Error, Result};
use crate::rng::{hash, mix64, unit_f64};
use crate::test_functions::TestFunction;

const STEP_STRIDE: u64 = 2048;
const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Binary digits of `q` after the point, up to and including the last one.
fn binary_digits(q: f64) -> Vec<bool> {
    let bits = q.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    // q = mantissa * 2^-scale exactly.
    let (mantissa, scale) = if exp == 0 {
        (frac, 1074i64)
    } else {
        (frac | (1u64 << 52), 1075 - exp)
    };
    let trailing = mantissa.trailing_zeros() as i64;
    let last = scale - trailing;
    (1..=last)
        .map(|k| {
            let shift = scale - k;
            shift < 64 && (mantissa >> shift) & 1 == 1
        })
        .collect()
}

/// 64 independent Bernoulli(q) lanes. Each lane compares a lazily drawn
/// uniform against the binary expansion of `q` and settles at the first
/// differing digit, so the result is exact.
fn bernoulli_word(row_key: u64, word: u64, digits: &[bool]) -> u64 {
    let mut ones = 0u64;
    let mut open = !0u64;
    for (k, &digit) in digits.iter().enumerate() {
        let r =
            mix64(row_key.wrapping_add((word * STEP_STRIDE + k as u64 + 1).wrapping_mul(GOLDEN)));
        if digit {
            ones |= open & !r;
            open &= r;
        } else {
            open &= !r;
        }
        if open == 0 {
            break;
        }
    }
    ones
}

/// Generator of the packed rows of a seeded Bernoulli(q) design.
#[derive(Debug, Clone)]
pub struct RowGenerator {
    seed: u64,
    words: usize,
    tail: u64,
    digits: Vec<bool>,
}

impl RowGenerator {
    pub fn new(n: usize, q: f64, seed: u64) -> Self {
        RowGenerator {
            seed,
            words: n.div_ceil(64),
            tail: tail_mask(n),
            digits: binary_digits(q),
        }
    }

    pub fn words(&self) -> usize {
        self.words
    }

    /// Writes row `j` into `row`, which must hold [`RowGenerator::words`] words.
    pub fn fill(&self, j: usize, row: &mut [u64]) {
        let key = hash(self.seed, &[j as u64]);
        for (w, slot) in row.iter_mut().enumerate() {
            *slot = bernoulli_word(key, w as u64, &self.digits);
        }
        row[self.words - 1] &= self.tail;
    }
}

/// A `T x n` binary design stored as packed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TestMatrix {
    t: usize,
    n: usize,
    q: f64,
    seed: u64,
    words: usize,
    bits: Vec<u64>,
}

impl TestMatrix {
    /// Entry `(j, i)` is a function of `(seed, j, i)` alone, so a matrix is a
    /// prefix of every larger matrix generated with the same seed and `q`.
    pub fn generate(n: usize, t: usize, q: f64, seed: u64) -> Result<Self> {
        if n == 0 || t == 0 {
            return Err(Error::ParameterOutOfRange(format!(
                "matrix needs n >= 1 and T >= 1, got n = {n}, T = {t}"
            )));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "q must lie in (0, 1), got {q}"
            )));
        }
        let rows = RowGenerator::new(n, q, seed);
        let words = rows.words();
        let mut bits = vec![0u64; t * words];
        bits.par_chunks_mut(words)
            .enumerate()
            .for_each(|(j, row)| rows.fill(j, row));
        Ok(TestMatrix {
            t,
            n,
            q,
            seed,
            words,
            bits,
        })
    }

    /// Builds a matrix from explicit rows of `n` entries each.
    pub fn from_rows(n: usize, q: f64, seed: u64, rows: &[Vec<bool>]) -> Result<Self> {
        let words = n.div_ceil(64).max(1);
        let mut bits = vec![0u64; rows.len() * words];
        for (j, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {j} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (i, &b) in row.iter().enumerate() {
                if b {
                    bits[j * words + i / 64] |= 1 << (i % 64);
                }
            }
        }
        Ok(TestMatrix {
            t: rows.len(),
            n,
            q,
            seed,
            words,
            bits,
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row_words(&self, j: usize) -> &[u64] {
        &self.bits[j * self.words..(j + 1) * self.words]
    }

    pub fn get(&self, j: usize, i: usize) -> bool {
        self.row_words(j)[i / 64] >> (i % 64) & 1 == 1
    }

    /// Indices of the items in test `j`.
    pub fn row_members(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        set_bits(self.row_words(j))
    }

    /// Fraction of ones.
    pub fn density(&self) -> f64 {
        let ones: u64 = self.bits.iter().map(|w| w.count_ones() as u64).sum();
        ones as f64 / (self.t * self.n) as f64
    }

    /// Text form: a `T n q seed` header, then one line of `0`/`1` per test.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.t * (self.n + 1) + 64);
        let _ = writeln!(out, "{} {} {:?} {}", self.t, self.n, self.q, self.seed);
        for j in 0..self.t {
            out.extend((0..self.n).map(|i| if self.get(j, i) { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!(
                "matrix header must read `T n q seed`, got `{header}`"
            )));
        }
        let bad = |what: &str| Error::Parse(format!("invalid {what} in matrix header"));
        let t: usize = fields[0].parse().map_err(|_| bad("T"))?;
        let n: usize = fields[1].parse().map_err(|_| bad("n"))?;
        let q: f64 = fields[2].parse().map_err(|_| bad("q"))?;
        let seed: u64 = fields[3].parse().map_err(|_| bad("seed"))?;
        let rows = lines
            .map(|line| {
                line.trim()
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(Error::Parse(format!("unexpected `{other}` in matrix row"))),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.len() != t {
            return Err(Error::DimensionMismatch(format!(
                "header declares T = {t} but {} rows follow",
                rows.len()
            )));
        }
        TestMatrix::from_rows(n, q, seed, &rows)
    }
}

fn tail_mask(n: usize) -> u64 {
    match n % 64 {
        0 => !0,
        r => (1u64 << r) - 1,
    }
}

/// Positions of the set bits of a packed row.
pub fn set_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(w * 64 + b)
        })
    })
}

/// Packs a set of item indices into row words.
pub fn pack_items(n: usize, items: &[usize]) -> Vec<u64> {
    let mut mask = vec![0u64; n.div_ceil(64).max(1)];
    for &i in items {
        mask[i / 64] |= 1 << (i % 64);
    }
    mask
}

/// Number of items of `mask` in the packed row.
pub fn overlap(row: &[u64], mask: &[u64]) -> usize {
    row.iter()
        .zip(mask)
        .map(|(a, b)| (a & b).count_ones() as usize)
        .sum()
}

/// Binary test results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcomes {
    pub bits: Vec<bool>,
    pub seed: u64,
}

impl Outcomes {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// One `0`/`1` per line.
    pub fn to_text(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { "1\n" } else { "0\n" })
            .collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bits = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| match l {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::Parse(format!(
                    "outcome line `{other}` is not 0 or 1"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Outcomes { bits, seed: 0 })
    }
}

/// Outcome of test `j` given its defective count: positive iff a uniform
/// keyed by `(seed, j)` falls below `f(count)`.
#[inline]
pub fn outcome_bit(f: &TestFunction, seed: u64, j: usize, count: usize) -> bool {
    unit_f64(hash(seed, &[j as u64])) < f.at(count)
}

pub(crate) fn check_defectives(n: usize, d: usize, defectives: &[usize]) -> Result<()> {
    if defectives.len() != d {
        return Err(Error::DefectiveCountMismatch {
            expected: d,
            got: defectives.len(),
        });
    }
    let mut seen = vec![false; n];
    for &i in defectives {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::ParameterOutOfRange(format!(
                "defective index {i} is out of range or repeated"
            )));
        }
    }
    Ok(())
}

pub fn simulate_outcomes(
    matrix: &TestMatrix,
    defectives: &[usize],
    f: &TestFunction,
    seed: u64,
) -> Result<Outcomes> {
    check_defectives(matrix.n, f.d(), defectives)?;
    let mask = pack_items(matrix.n, defectives);
    let bits = (0..matrix.t)
        .into_par_iter()
        .map(|j| outcome_bit(f, seed, j, overlap(matrix.row_words(j), &mask)))
        .collect();
    Ok(Outcomes { bits, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Positive fraction among the tests that include the item.
    Rule1,
    /// Positive fraction among the tests that exclude the item.
    Rule2,
}

impl Rule {
    pub fn for_q(q: f64) -> Rule {
        if q <= 0.5 {
            Rule::Rule1
        } else {
            Rule::Rule2
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Rule::Rule1 => "rule1",
            Rule::Rule2 => "rule2",
        })
    }
}

/// Decision rule and its threshold at a given `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub rule: Rule,
    /// `(P(-) + P(+)) / 2` under rule 1, `(Q(-) + Q(+)) / 2` under rule 2.
    pub value: f64,
}

pub fn thresholds(f: &TestFunction, q: f64) -> Result<Thresholds> {
    let p = positivity(f, q)?;
    let rule = Rule::for_q(q);
    let value = match rule {
        Rule::Rule1 => (p.p_minus + p.p_plus) / 2.0,
        Rule::Rule2 => (p.q_minus + p.q_plus) / 2.0,
    };
    Ok(Thresholds { rule, value })
}

/// Per-item test and positive counts for the relevant side of the rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ItemStats {
    pub tests: u32,
    pub positives: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeResult {
    /// Sorted indices of the items declared defective.
    pub estimated_defectives: Vec<usize>,
    pub rule_used: Rule,
    /// Items whose fraction was undefined (no tests on the relevant side).
    pub undefined_items: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_item_stats: Option<Vec<ItemStats>>,
}

/// Running per-item counts over a growing set of tests.
#[derive(Debug, Clone)]
pub struct Tallies {
    tests_in: Vec<u32>,
    positives_in: Vec<u32>,
    tests: u32,
    positives: u32,
}

impl Tallies {
    pub fn new(n: usize) -> Self {
        Tallies {
            tests_in: vec![0; n],
            positives_in: vec![0; n],
            tests: 0,
            positives: 0,
        }
    }

    pub fn add_row(&mut self, row: &[u64], positive: bool) {
        self.tests += 1;
        if positive {
            self.positives += 1;
            for i in set_bits(row) {
                self.tests_in[i] += 1;
                self.positives_in[i] += 1;
            }
        } else {
            for i in set_bits(row) {
                self.tests_in[i] += 1;
            }
        }
    }

    fn stats(&self, rule: Rule, i: usize) -> ItemStats {
        match rule {
            Rule::Rule1 => ItemStats {
                tests: self.tests_in[i],
                positives: self.positives_in[i],
            },
            Rule::Rule2 => ItemStats {
                tests: self.tests - self.tests_in[i],
                positives: self.positives - self.positives_in[i],
            },
        }
    }

    /// Applies the threshold rule to every item.
    pub fn decide(&self, thresholds: Thresholds, keep_stats: bool) -> DecodeResult {
        let rule = thresholds.rule;
        let mut estimated = Vec::new();
        let mut undefined = 0;
        for i in 0..self.tests_in.len() {
            let s = self.stats(rule, i);
            if s.tests == 0 {
                undefined += 1;
                continue;
            }
            let fraction = s.positives as f64 / s.tests as f64;
            let defective = match rule {
                Rule::Rule1 => fraction > thresholds.value,
                Rule::Rule2 => fraction <= thresholds.value,
            };
            if defective {
                estimated.push(i);
            }
        }
        DecodeResult {
            estimated_defectives: estimated,
            rule_used: rule,
            undefined_items: undefined,
            per_item_stats: keep_stats.then(|| {
                (0..self.tests_in.len())
                    .map(|i| self.stats(rule, i))
                    .collect()
            }),
        }
    }
}

/// Decodes with rule 1 when the matrix's `q <= 1/2` and rule 2 otherwise.
pub fn decode(matrix: &TestMatrix, outcomes: &Outcomes, f: &TestFunction) -> Result<DecodeResult> {
    decode_with(matrix, outcomes, thresholds(f, matrix.q)?, false)
}

pub fn decode_with(
    matrix: &TestMatrix,
    outcomes: &Outcomes,
    thresholds: Thresholds,
    keep_stats: bool,
) -> Result<DecodeResult> {
    if outcomes.len() != matrix.t {
        return Err(Error::DimensionMismatch(format!(
            "{} outcomes for a matrix with {} tests",
            outcomes.len(),
            matrix.t
        )));
    }
    let mut tallies = Tallies::new(matrix.n);
    for (j, &y) in outcomes.bits.iter().enumerate() {
        tallies.add_row(matrix.row_words(j), y);
    }
    Ok(tallies.decide(thresholds, keep_stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_functions::{build, Family};

    #[test]
    fn digits_of_dyadic_q() {
        assert_eq!(binary_digits(0.5), vec![true]);
        assert_eq!(binary_digits(0.25), vec![false, true]);
        assert_eq!(binary_digits(0.75), vec![true, true]);
        let d = binary_digits(0.1);
        let back: f64 = d
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(k, _)| 2f64.powi(-(k as i32 + 1)))
            .sum();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn same_seed_same_matrix() {
        let a = TestMatrix::generate(100, 30, 0.3, 9).unwrap();
        let b = TestMatrix::generate(100, 30, 0.3, 9).unwrap();
        let c = TestMatrix::generate(100, 30, 0.3, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn prefix_consistent_in_both_dimensions() {
        let small = TestMatrix::generate(70, 12, 0.37, 5).unwrap();
        let big = TestMatrix::generate(200, 40, 0.37, 5).unwrap();
        for j in 0..12 {
            for i in 0..70 {
                assert_eq!(small.get(j, i), big.get(j, i));
            }
        }
    }

    #[test]
    fn tail_bits_are_clear() {
        let m = TestMatrix::generate(65, 50, 0.9, 1).unwrap();
        for j in 0..50 {
            assert_eq!(m.row_words(j)[1] >> 1, 0);
        }
    }

    #[test]
    fn text_round_trip() {
        let m = TestMatrix::generate(10, 4, 0.3, 77).unwrap();
        let back = TestMatrix::from_text(&m.to_text()).unwrap();
        assert_eq!(m, back);
        assert!(TestMatrix::from_text("2 3 0.5 1\n010\n").is_err());
        assert!(TestMatrix::from_text("1 3 0.5 1\n0x0\n").is_err());
    }

    #[test]
    fn classical_outcomes_are_deterministic_or() {
        let f = build(&Family::Classical, 2).unwrap();
        let m = TestMatrix::generate(30, 40, 0.2, 3).unwrap();
        let y = simulate_outcomes(&m, &[4, 17], &f, 8).unwrap();
        for j in 0..40 {
            assert_eq!(y.bits[j], m.get(j, 4) || m.get(j, 17));
        }
    }

    #[test]
    fn defective_count_checked() {
        let f = build(&Family::Classical, 2).unwrap();
        let m = TestMatrix::generate(30, 4, 0.2, 3).unwrap();
        assert!(matches!(
            simulate_outcomes(&m, &[1], &f, 0),
            Err(Error::DefectiveCountMismatch {
                expected: 2,
                got: 1
            })
        ));
        assert!(simulate_outcomes(&m, &[1, 1], &f, 0).is_err());
        assert!(simulate_outcomes(&m, &[1, 30], &f, 0).is_err());
    }

    #[test]
    fn rule_selection() {
        assert_eq!(Rule::for_q(0.5), Rule::Rule1);
        assert_eq!(Rule::for_q(0.5000001), Rule::Rule2);
    }

    #[test]
    fn fraction_at_threshold_is_non_defective_under_rule1() {
        // Item 0 is in both tests, one positive: fraction 1/2.
        let m = TestMatrix::from_rows(2, 0.5, 0, &[vec![true, false], vec![true, true]]).unwrap();
        let y = Outcomes {
            bits: vec![true, false],
            seed: 0,
        };
        let at = Thresholds {
            rule: Rule::Rule1,
            value: 0.5,
        };
        assert!(decode_with(&m, &y, at, false)
            .unwrap()
            .estimated_defectives
            .is_empty());
        let below = Thresholds { value: 0.49, ..at };
        assert_eq!(
            decode_with(&m, &y, below, false)
                .unwrap()
                .estimated_defectives,
            vec![0]
        );
    }

    #[test]
    fn fraction_at_threshold_is_defective_under_rule2() {
        // Tests excluding item 1: only test 0, which is positive.
        let m = TestMatrix::from_rows(2, 0.7, 0, &[vec![true, false], vec![true, true]]).unwrap();
        let y = Outcomes {
            bits: vec![true, false],
            seed: 0,
        };
        let t = Thresholds {
            rule: Rule::Rule2,
            value: 1.0,
        };
        let r = decode_with(&m, &y, t, true).unwrap();
        // Item 0 is in every test, so its excluded count is zero.
        assert_eq!(r.undefined_items, 1);
        assert_eq!(r.estimated_defectives, vec![1]);
    }

    #[test]
    fn noiseless_recovery_with_many_tests() {
        let d = 4;
        let f = build(&Family::Classical, d).unwrap();
        let m = TestMatrix::generate(200, 600, 1.0 / d as f64, 11).unwrap();
        let defectives = [3, 50, 120, 199];
        let y = simulate_outcomes(&m, &defectives, &f, 12).unwrap();
        let r = decode(&m, &y, &f).unwrap();
        assert_eq!(r.estimated_defectives, defectives.to_vec());
    }

    #[test]
    fn outcome_length_checked() {
        let f = build(&Family::Classical, 1).unwrap();
        let m = TestMatrix::generate(5, 3, 0.5, 0).unwrap();
        let y = Outcomes {
            bits: vec![true],
            seed: 0,
        };
        assert!(decode(&m, &y, &f).is_err());
    }
}
