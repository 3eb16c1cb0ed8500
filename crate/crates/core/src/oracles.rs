//! Independent recomputations used to cross-check the main code paths.
//!
//! Nothing here shares arithmetic with the log-space routines: positivity
//! sums are evaluated exactly over big integers (every `f64` is a dyadic
//! rational), hypergeometric moments are exact rationals, and the
//! micro-instance decoder counts tests by hand from an explicit matrix.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codec::{decode_with, thresholds, Outcomes, Rule, TestMatrix, Thresholds};
use crate::design::{design_point, sensitivity_h, DesignEvaluator};
use crate::error::{Error, Result};
use crate::numerics::{hypergeom_support, LnFactorials};
use crate::test_functions::TestFunction;

/// `x` as `mantissa / 2^scale` with an integer mantissa.
fn dyadic(x: f64) -> (BigInt, u32) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, scale) = if exp == 0 {
        (frac, 1074i64)
    } else {
        (frac | (1u64 << 52), 1075 - exp)
    };
    let sign = if x < 0.0 { -1 } else { 1 };
    if scale >= 0 {
        (BigInt::from(sign) * BigInt::from(mantissa), scale as u32)
    } else {
        (
            BigInt::from(sign) * (BigInt::from(mantissa) << (-scale) as usize),
            0,
        )
    }
}

/// `x * 2^e` without intermediate overflow or underflow.
fn scale_by_power_of_two(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Nearest `f64` to `num / den` (within one unit in the last place).
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let negative = num.is_negative() != den.is_negative();
    let (num, den) = (num.abs(), den.abs());
    // Shift so that the integer quotient carries about 64 significant bits.
    let shift = 64 + den.bits() as i64 - num.bits() as i64;
    let quotient = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let value = scale_by_power_of_two(quotient.to_f64().unwrap_or(f64::INFINITY), -shift);
    if negative {
        -value
    } else {
        value
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    ratio_to_f64(r.numer(), r.denom())
}

fn binomials(m: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(m + 1);
    let mut c = BigUint::one();
    row.push(BigInt::from(c.clone()));
    for j in 0..m {
        c = c * BigUint::from(m - j) / BigUint::from(j + 1);
        row.push(BigInt::from(c.clone()));
    }
    row
}

/// Exact `sum_j C(m, j) a^j (2^s - a)^(m-j) F_j` where `q = a / 2^s` and the
/// `F_j` are the values of `f` on a common dyadic denominator.
fn scaled_binomial_sum(m: usize, a: &BigInt, b: &BigInt, numerators: &[BigInt]) -> BigInt {
    let coeffs = binomials(m);
    let mut a_pow = vec![BigInt::one()];
    let mut b_pow = vec![BigInt::one()];
    for k in 1..=m {
        a_pow.push(&a_pow[k - 1] * a);
        b_pow.push(&b_pow[k - 1] * b);
    }
    (0..=m)
        .filter(|&j| !numerators[j].is_zero())
        .map(|j| &coeffs[j] * &a_pow[j] * &b_pow[m - j] * &numerators[j])
        .sum()
}

fn common_denominator(values: &[f64]) -> (Vec<BigInt>, u32) {
    let parts: Vec<(BigInt, u32)> = values.iter().map(|&v| dyadic(v)).collect();
    let e = parts.iter().map(|p| p.1).max().unwrap_or(0);
    let nums = parts
        .into_iter()
        .map(|(m, s)| m << (e - s) as usize)
        .collect();
    (nums, e)
}

/// Exact `P(+, q)` and `P(-, q)` as `(numerator, log2 of denominator)`.
fn exact_positivity(f: &TestFunction, q: f64) -> ((BigInt, u64), (BigInt, u64)) {
    let d = f.d();
    let (a, s) = dyadic(q);
    let b = (BigInt::one() << s as usize) - &a;
    let (nums, e) = common_denominator(f.values());
    let p_plus = scaled_binomial_sum(d - 1, &a, &b, &nums[1..]);
    let p_minus = scaled_binomial_sum(d, &a, &b, &nums);
    let s = s as u64;
    let e = e as u64;
    (
        (p_plus, s * (d as u64 - 1) + e),
        (p_minus, s * d as u64 + e),
    )
}

/// `Delta(q) = P(+, q) - P(-, q)` by exact direct summation of both sums.
pub fn delta_direct(f: &TestFunction, q: f64) -> f64 {
    let ((p_plus, k_plus), (p_minus, k_minus)) = exact_positivity(f, q);
    // Both sums over the denominator of P(-).
    let numerator = (p_plus << (k_minus - k_plus) as usize) - p_minus;
    ratio_to_f64(&numerator, &(BigInt::one() << k_minus as usize))
}

/// `(P(-, q), P(+, q))` by exact direct summation.
pub fn positivity_direct(f: &TestFunction, q: f64) -> (f64, f64) {
    let ((p_plus, k_plus), (p_minus, k_minus)) = exact_positivity(f, q);
    (
        ratio_to_f64(&p_minus, &(BigInt::one() << k_minus as usize)),
        ratio_to_f64(&p_plus, &(BigInt::one() << k_plus as usize)),
    )
}

fn choose_exact(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for j in 0..k {
        c = c * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    BigInt::from(c)
}

/// Exact hypergeometric pmf over the support `lo..=hi`.
pub fn hypergeom_pmf_exact(size: usize, successes: usize, draws: usize) -> Vec<BigRational> {
    let (lo, hi) = hypergeom_support(size, successes, draws);
    let total = choose_exact(size, draws);
    (lo..=hi)
        .map(|a| {
            BigRational::new(
                choose_exact(successes, a) * choose_exact(size - successes, draws - a),
                total.clone(),
            )
        })
        .collect()
}

/// Exact `(mu, sigma^2)` of `f(A)` for `A ~ Hypergeometric(n, d, chi)`.
pub fn pool_moments_exact(f: &TestFunction, n: usize, chi: usize) -> (f64, f64) {
    let d = f.d();
    let (lo, _) = hypergeom_support(n, d, chi);
    let pmf = hypergeom_pmf_exact(n, d, chi);
    let values: Vec<BigRational> = (lo..lo + pmf.len())
        .map(|a| {
            let (m, s) = dyadic(f.at(a));
            BigRational::new(m, BigInt::one() << s as usize)
        })
        .collect();
    let mu: BigRational = pmf.iter().zip(&values).map(|(p, v)| p * v).sum();
    let var: BigRational = pmf
        .iter()
        .zip(&values)
        .map(|(p, v)| {
            let dev = v - &mu;
            p * &dev * &dev
        })
        .sum();
    (rational_to_f64(&mu), rational_to_f64(&var))
}

/// Failure report of a verification suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub checked: usize,
    pub counterexample: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Random monotone table with strictly positive increments.
pub fn random_monotone(rng: &mut impl Rng, max_d: usize) -> TestFunction {
    let d = rng.random_range(1..=max_d);
    let (lo, hi) = match rng.random_range(0..4) {
        0 => (0.0, 1.0),
        1 => (0.0, rng.random_range(0.5..1.0)),
        2 => (rng.random_range(0.0..0.3), 1.0),
        _ => (rng.random_range(0.0..0.3), rng.random_range(0.6..1.0)),
    };
    let steps: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = steps.iter().sum();
    let mut values = Vec::with_capacity(d + 1);
    let mut acc = 0.0;
    values.push(lo);
    for s in &steps[..d - 1] {
        acc += s;
        values.push(lo + (hi - lo) * acc / total);
    }
    values.push(hi);
    TestFunction::new(values).expect("increasing table with f(0) < f(d)")
}

/// Relative slack on the non-strict links of the positivity chain.
pub const CHAIN_SLACK: f64 = 1e-12;

/// Checks the positivity chain and the sensitivity relations of one point.
pub fn check_chain(f: &TestFunction, q: f64) -> std::result::Result<(), String> {
    let p = design_point(f, q, f.d() + 1, 0.5).map_err(|e| e.to_string())?;
    let le = |a: f64, b: f64| a <= b + CHAIN_SLACK * b.abs().max(a.abs());
    let ctx = || format!("f = {:?}, q = {q}: {p:?}", f.values());
    if !le(p.p_plus, f.fd()) {
        return Err(format!("f(d) < P+ for {}", ctx()));
    }
    if !(p.p_plus > p.p_minus) {
        return Err(format!("P+ <= P- for {}", ctx()));
    }
    if relative_gap(p.p_minus, p.q_minus) > 1e-12 {
        return Err(format!("P- != Q- for {}", ctx()));
    }
    if !(p.q_minus > p.q_plus) {
        return Err(format!("Q- <= Q+ for {}", ctx()));
    }
    if !le(f.f0(), p.q_plus) {
        return Err(format!("Q+ < f(0) for {}", ctx()));
    }
    if relative_gap(p.nabla, q / (1.0 - q) * p.delta) > 1e-12 {
        return Err(format!("nabla != q/(1-q) delta for {}", ctx()));
    }
    if !(p.p_min <= 1.0 && le(p.delta.max(p.nabla), p.p_min)) {
        return Err(format!(
            "P_min outside [max(delta, nabla), 1] for {}",
            ctx()
        ));
    }
    Ok(())
}

/// Positivity chain over `functions` random tables and a 99-point `q` grid.
pub fn chain_suite(functions: usize, seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    for _ in 0..functions {
        let f = random_monotone(&mut rng, 64);
        for k in 1..=99 {
            checked += 1;
            if let Err(msg) = check_chain(&f, k as f64 / 100.0) {
                return SuiteOutcome {
                    checked,
                    counterexample: Some(msg),
                };
            }
        }
    }
    SuiteOutcome {
        checked,
        counterexample: None,
    }
}

/// Log-space hypergeometric pmf, mean and variance against the closed forms
/// on a spot grid, plus exact rational comparisons for small populations.
pub fn hypergeom_suite() -> SuiteOutcome {
    let mut checked = 0;
    let fail = |checked, msg: String| SuiteOutcome {
        checked,
        counterexample: Some(msg),
    };
    for &n in &[10usize, 57, 300, 1000, 2000, 5000] {
        let table = LnFactorials::new(n);
        for &d in &[1usize, 2, 7, 20, 60, 200] {
            if d >= n {
                continue;
            }
            for chi in [1, 2, n / 7, n / 3, n / 2, n - d, n - 1] {
                if chi == 0 || chi >= n {
                    continue;
                }
                checked += 1;
                let (lo, hi) = hypergeom_support(n, d, chi);
                let pmf: Vec<f64> = (lo..=hi)
                    .map(|a| table.hypergeom_ln_pmf(n, d, chi, a).exp())
                    .collect();
                let total: f64 = pmf.iter().sum();
                let mean: f64 = pmf.iter().zip(lo..=hi).map(|(p, a)| p * a as f64).sum();
                let var: f64 = pmf
                    .iter()
                    .zip(lo..=hi)
                    .map(|(p, a)| p * (a as f64 - mean).powi(2))
                    .sum();
                let (nf, df, cf) = (n as f64, d as f64, chi as f64);
                let mean_cf = cf * df / nf;
                let var_cf = cf * (df / nf) * ((nf - df) / nf) * ((nf - cf) / (nf - 1.0));
                if (total - 1.0).abs() > 1e-10 {
                    return fail(
                        checked,
                        format!("pmf sums to {total} at n={n} d={d} chi={chi}"),
                    );
                }
                if relative_gap(mean, mean_cf) > 1e-9 {
                    return fail(
                        checked,
                        format!("mean {mean} vs {mean_cf} at n={n} d={d} chi={chi}"),
                    );
                }
                if relative_gap(var, var_cf) > 1e-9 {
                    return fail(
                        checked,
                        format!("variance {var} vs {var_cf} at n={n} d={d} chi={chi}"),
                    );
                }
                if n <= 60 {
                    let exact = hypergeom_pmf_exact(n, d, chi);
                    for (a, (p, e)) in pmf.iter().zip(&exact).enumerate() {
                        let e = rational_to_f64(e);
                        if relative_gap(*p, e) > 1e-10 {
                            return fail(
                                checked,
                                format!(
                                    "pmf({}) = {p} vs exact {e} at n={n} d={d} chi={chi}",
                                    lo + a
                                ),
                            );
                        }
                    }
                }
            }
        }
    }
    SuiteOutcome {
        checked,
        counterexample: None,
    }
}

/// A decoding problem small enough to enumerate.
#[derive(Debug, Clone)]
pub struct MicroInstance {
    pub rows: Vec<Vec<bool>>,
    pub q: f64,
    pub f: TestFunction,
}

impl MicroInstance {
    pub const MAX_N: usize = 8;
    pub const MAX_D: usize = 2;
    pub const MAX_T: usize = 6;

    pub fn new(rows: Vec<Vec<bool>>, q: f64, f: TestFunction) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if n == 0
            || n > Self::MAX_N
            || f.d() > Self::MAX_D
            || f.d() >= n
            || rows.is_empty()
            || rows.len() > Self::MAX_T
            || rows.iter().any(|r| r.len() != n)
        {
            return Err(Error::ParameterOutOfRange(
                "micro instance needs n <= 8, d <= 2, d < n, 1 <= T <= 6".into(),
            ));
        }
        Ok(MicroInstance { rows, q, f })
    }

    /// Random instance with entries drawn Bernoulli(q).
    pub fn random(rng: &mut impl Rng, f: TestFunction) -> Self {
        let n = rng.random_range(f.d() + 1..=Self::MAX_N);
        let t = rng.random_range(1..=Self::MAX_T);
        let q = [0.25, 0.4, 0.5, 0.6, 0.75][rng.random_range(0..5)];
        let rows = (0..t)
            .map(|_| (0..n).map(|_| rng.random::<f64>() < q).collect())
            .collect();
        MicroInstance { rows, q, f }
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn matrix(&self) -> TestMatrix {
        TestMatrix::from_rows(self.n(), self.q, 0, &self.rows).expect("rectangular rows")
    }

    /// The decision rule written out item by item.
    pub fn decode(&self, outcomes: &[bool], thresholds: Thresholds) -> Vec<usize> {
        let mut out = Vec::new();
        for i in 0..self.n() {
            let mut tests = 0u32;
            let mut positives = 0u32;
            for (row, &y) in self.rows.iter().zip(outcomes) {
                let counted = match thresholds.rule {
                    Rule::Rule1 => row[i],
                    Rule::Rule2 => !row[i],
                };
                if counted {
                    tests += 1;
                    positives += y as u32;
                }
            }
            if tests == 0 {
                continue;
            }
            let fraction = positives as f64 / tests as f64;
            let defective = match thresholds.rule {
                Rule::Rule1 => fraction > thresholds.value,
                Rule::Rule2 => fraction <= thresholds.value,
            };
            if defective {
                out.push(i);
            }
        }
        out
    }
}

fn outcome_vectors(t: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << t).map(move |mask| (0..t).map(|j| mask >> j & 1 == 1).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for mut rest in subsets(n, k - 1) {
            if rest.first().is_none_or(|&r| r > first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
    }
    out
}

/// Exact probability that the decoder misses the true set, averaging over
/// uniformly random defective sets and outcome noise.
pub fn exhaustive_error_probability(inst: &MicroInstance) -> Result<f64> {
    let thr = thresholds(&inst.f, inst.q)?;
    let d = inst.f.d();
    let sets = subsets(inst.n(), d);
    let mut error = 0.0;
    for set in &sets {
        let counts: Vec<usize> = inst
            .rows
            .iter()
            .map(|r| set.iter().filter(|&&i| r[i]).count())
            .collect();
        for y in outcome_vectors(inst.rows.len()) {
            let weight: f64 = counts
                .iter()
                .zip(&y)
                .map(|(&c, &b)| if b { inst.f.at(c) } else { 1.0 - inst.f.at(c) })
                .product();
            if inst.decode(&y, thr) != *set {
                error += weight;
            }
        }
    }
    Ok(error / sets.len() as f64)
}

/// Main decoder versus the hand-written rule on every outcome vector.
pub fn compare_decoders(inst: &MicroInstance) -> Result<std::result::Result<usize, String>> {
    let thr = thresholds(&inst.f, inst.q)?;
    let matrix = inst.matrix();
    let mut checked = 0;
    for y in outcome_vectors(inst.rows.len()) {
        checked += 1;
        let main = decode_with(
            &matrix,
            &Outcomes {
                bits: y.clone(),
                seed: 0,
            },
            thr,
            false,
        )?;
        let oracle = inst.decode(&y, thr);
        if main.estimated_defectives != oracle {
            return Ok(Err(format!(
                "outcomes {y:?} on {:?} (q = {}): decoder {:?}, oracle {oracle:?}",
                inst.rows, inst.q, main.estimated_defectives
            )));
        }
    }
    Ok(Ok(checked))
}

pub fn micro_suite(instances: usize, seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    for _ in 0..instances {
        let d = rng.random_range(1..=MicroInstance::MAX_D);
        let f = random_monotone_with_d(&mut rng, d);
        let inst = MicroInstance::random(&mut rng, f);
        match compare_decoders(&inst) {
            Ok(Ok(c)) => checked += c,
            Ok(Err(msg)) => {
                return SuiteOutcome {
                    checked,
                    counterexample: Some(msg),
                }
            }
            Err(e) => {
                return SuiteOutcome {
                    checked,
                    counterexample: Some(e.to_string()),
                }
            }
        }
    }
    SuiteOutcome {
        checked,
        counterexample: None,
    }
}

fn random_monotone_with_d(rng: &mut impl Rng, d: usize) -> TestFunction {
    loop {
        let f = random_monotone(rng, d);
        if f.d() == d {
            return f;
        }
    }
}

/// Which of the four conditional positivity probabilities to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    ItemInDefective,
    ItemInNondefective,
    ItemOutDefective,
    ItemOutNondefective,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition::ItemInDefective,
        Condition::ItemInNondefective,
        Condition::ItemOutDefective,
        Condition::ItemOutNondefective,
    ];

    /// The matching closed-form probability.
    pub fn formula(self, f: &TestFunction, q: f64) -> Result<f64> {
        let p = DesignEvaluator::new(f).positivity(q)?;
        Ok(match self {
            Condition::ItemInDefective => p.p_plus,
            Condition::ItemInNondefective => p.p_minus,
            Condition::ItemOutDefective => p.q_plus,
            Condition::ItemOutNondefective => p.q_minus,
        })
    }
}

/// Positive rate of simulated pools under `condition`, with its standard
/// error. Every defective's membership is an explicit Bernoulli(q) draw.
pub fn empirical_positivity(
    f: &TestFunction,
    q: f64,
    condition: Condition,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = f.d();
    let (others, planted) = match condition {
        Condition::ItemInDefective => (d - 1, 1),
        Condition::ItemOutDefective => (d - 1, 0),
        Condition::ItemInNondefective | Condition::ItemOutNondefective => (d, 0),
    };
    let mut positives = 0usize;
    for _ in 0..samples {
        let x = planted + (0..others).filter(|_| rng.random::<f64>() < q).count();
        if rng.random::<f64>() < f.at(x) {
            positives += 1;
        }
    }
    let rate = positives as f64 / samples as f64;
    (rate, (rate * (1.0 - rate) / samples as f64).sqrt())
}

/// Every condition for a handful of functions at `samples` draws each,
/// requiring agreement within four standard errors.
pub fn mc_suite(functions: &[TestFunction], qs: &[f64], samples: usize, seed: u64) -> SuiteOutcome {
    let mut checked = 0;
    for (k, f) in functions.iter().enumerate() {
        for (l, &q) in qs.iter().enumerate() {
            for (c, cond) in Condition::ALL.into_iter().enumerate() {
                checked += 1;
                let expect = match cond.formula(f, q) {
                    Ok(v) => v,
                    Err(e) => {
                        return SuiteOutcome {
                            checked,
                            counterexample: Some(e.to_string()),
                        }
                    }
                };
                let s = seed ^ ((k as u64) << 32 | (l as u64) << 8 | c as u64);
                let (rate, se) = empirical_positivity(f, q, cond, samples, s);
                // A zero standard error can only come from an exact 0 or 1.
                let tol = if se > 0.0 { 4.0 * se } else { 1e-12 };
                if (rate - expect).abs() > tol {
                    return SuiteOutcome {
                        checked,
                        counterexample: Some(format!(
                            "{cond:?} for f = {:?}, q = {q}: rate {rate} (se {se}) vs {expect}",
                            f.values()
                        )),
                    };
                }
            }
        }
    }
    SuiteOutcome {
        checked,
        counterexample: None,
    }
}

/// Sensitivity parameter sandwich `1/g^2 <= H <= 16/g^2 (log log d + 2)^2 d`,
/// `g = f(d) - f(0)`, for `d >= 2`.
pub fn sensitivity_sandwich(f: &TestFunction) -> std::result::Result<(), String> {
    let s = sensitivity_h(f).map_err(|e| e.to_string())?;
    let g = f.fd() - f.f0();
    let d = f.d() as f64;
    let lower = 1.0 / (g * g);
    let upper = 16.0 / (g * g) * (d.log2().log2() + 2.0).powi(2) * d;
    if s.h < lower * (1.0 - 1e-12) || s.h > upper * (1.0 + 1e-12) {
        return Err(format!(
            "H = {} outside [{lower}, {upper}] for d = {}",
            s.h,
            f.d()
        ));
    }
    Ok(())
}
