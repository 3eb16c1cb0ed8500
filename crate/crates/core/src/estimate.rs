//! Adaptive estimation of the number of defectives.
//!
//! The decision subroutine tests whether the true count is below a candidate
//! `d_hat` by running fresh Bernoulli pools and comparing the positive
//! fraction against the midpoint of the positivity probabilities at `d_hat`
//! and `d_hat - 1`. The estimator doubles the candidate until the subroutine
//! reports "below", then bisects.

use std::collections::HashMap;

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::design::{argmin_gamma, positivity, DEFAULT_RESOLUTION, PARTICIPATION_CONSTANT};
use crate::error::{Error, Result};
use crate::rng::{chacha, hash};
use crate::test_functions::{Family, TestFunction};

/// Parameters of one decision subroutine call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LomParams {
    pub d_hat: usize,
    pub zeta: f64,
    pub eps_sub: f64,
    pub t_tests: u64,
    pub threshold: f64,
    /// Sensitivity of the family instantiated at `d_hat`.
    pub delta: f64,
    /// Positivity of a `zeta`-pool when exactly `d_hat` items are defective.
    pub p_at: f64,
    /// Positivity of a `zeta`-pool when exactly `d_hat - 1` items are defective.
    pub p_below: f64,
}

pub fn lom_params(
    family: &Family,
    d_hat: usize,
    eps_sub: f64,
    resolution: usize,
) -> Result<LomParams> {
    if d_hat < 2 {
        return Err(Error::ParameterOutOfRange(format!(
            "candidate count must be at least 2, got {d_hat}"
        )));
    }
    if !(eps_sub > 0.0 && eps_sub < 1.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "eps must lie in (0, 1), got {eps_sub}"
        )));
    }
    let f = family.instantiate(d_hat)?;
    let zeta = argmin_gamma(&f, resolution)?;
    lom_params_at(&f, zeta, eps_sub)
}

/// Parameters at a given `zeta` for `f` instantiated at the candidate count.
pub fn lom_params_at(f: &TestFunction, zeta: f64, eps_sub: f64) -> Result<LomParams> {
    let p = positivity(f, zeta)?;
    let odds = (1.0 - zeta) / (zeta * p.delta);
    let t_tests = (PARTICIPATION_CONSTANT * odds * odds * (1.0 / eps_sub).log2()).ceil();
    Ok(LomParams {
        d_hat: f.d(),
        zeta,
        eps_sub,
        t_tests: t_tests as u64,
        threshold: p.p_minus - zeta / (2.0 * (1.0 - zeta)) * p.delta,
        delta: p.delta,
        p_at: p.p_minus,
        p_below: p.q_plus,
    })
}

/// Memoised [`lom_params`] for one family and subroutine error.
#[derive(Debug, Clone)]
pub struct LomPlanner {
    family: Family,
    eps_sub: f64,
    resolution: usize,
    cache: HashMap<usize, LomParams>,
}

impl LomPlanner {
    /// Planner for an estimator over `n` items with overall error `eps`.
    pub fn new(family: Family, n: usize, eps: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::ParameterOutOfRange(format!("need n >= 2, got {n}")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "eps must lie in (0, 1), got {eps}"
            )));
        }
        Ok(LomPlanner {
            family,
            eps_sub: subroutine_eps(n, eps),
            resolution: DEFAULT_RESOLUTION,
            cache: HashMap::new(),
        })
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution;
        self.cache.clear();
        self
    }

    pub fn eps_sub(&self) -> f64 {
        self.eps_sub
    }

    pub fn params(&mut self, d_hat: usize) -> Result<LomParams> {
        if let Some(p) = self.cache.get(&d_hat) {
            return Ok(*p);
        }
        let p = lom_params(&self.family, d_hat, self.eps_sub, self.resolution)?;
        self.cache.insert(d_hat, p);
        Ok(p)
    }
}

/// Per-call error `eps / (2 log n + 2)`.
pub fn subroutine_eps(n: usize, eps: f64) -> f64 {
    eps / (2.0 * (n as f64).log2() + 2.0)
}

/// Source of adaptive test outcomes.
pub trait PoolTester {
    /// Tests a fresh pool that contains each item independently with
    /// probability `zeta`. Pool membership is drawn from `designer`; outcome
    /// noise comes from the tester itself.
    fn test_random_pool(&mut self, zeta: f64, designer: &mut dyn RngCore) -> Result<bool>;

    /// Tests an explicit pool.
    fn test_items(&mut self, items: &[usize]) -> Result<bool>;
}

/// Tester backed by a hidden defective set and the family at the true count.
#[derive(Debug, Clone)]
pub struct SimulationTester {
    n: usize,
    defectives: Vec<usize>,
    f: TestFunction,
    noise: ChaCha8Rng,
    cdf_cache: Option<(u64, Vec<f64>)>,
}

impl SimulationTester {
    /// Plants `true_d` defectives uniformly at random among `n` items.
    pub fn new(n: usize, family: &Family, true_d: usize, seed: u64) -> Result<Self> {
        if true_d == 0 || true_d >= n {
            return Err(Error::ParameterOutOfRange(format!(
                "hidden count must satisfy 1 <= d < n, got d = {true_d}, n = {n}"
            )));
        }
        let f = family.instantiate(true_d)?;
        let mut rng = chacha(hash(seed, &[0]));
        let mut defectives = rand::seq::index::sample(&mut rng, n, true_d).into_vec();
        defectives.sort_unstable();
        Ok(SimulationTester {
            n,
            defectives,
            f,
            noise: chacha(hash(seed, &[1])),
            cdf_cache: None,
        })
    }

    pub fn defectives(&self) -> &[usize] {
        &self.defectives
    }

    /// Cumulative distribution of the defective count in a `zeta`-pool.
    fn count_cdf(&mut self, zeta: f64) -> &[f64] {
        let key = zeta.to_bits();
        if self.cdf_cache.as_ref().is_none_or(|(k, _)| *k != key) {
            let d = self.defectives.len();
            let kernel = crate::numerics::BinomialKernel::new(d);
            let mut ln_w = Vec::new();
            kernel.ln_weights_into(zeta, &mut ln_w);
            let mut acc = 0.0;
            let cdf = ln_w
                .iter()
                .map(|w| {
                    acc += w.exp();
                    acc
                })
                .collect();
            self.cdf_cache = Some((key, cdf));
        }
        &self.cdf_cache.as_ref().expect("cache filled above").1
    }
}

impl PoolTester for SimulationTester {
    fn test_random_pool(&mut self, zeta: f64, designer: &mut dyn RngCore) -> Result<bool> {
        if !(zeta > 0.0 && zeta < 1.0) {
            return Err(Error::TesterFailure(format!(
                "pool probability {zeta} outside (0, 1)"
            )));
        }
        // Only the number of defectives in the pool matters, and it is
        // Binomial(d, zeta) under independent membership.
        let u: f64 = designer.random();
        let cdf = self.count_cdf(zeta);
        let count = cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1);
        Ok(self.noise.random::<f64>() < self.f.at(count))
    }

    fn test_items(&mut self, items: &[usize]) -> Result<bool> {
        if let Some(&bad) = items.iter().find(|&&i| i >= self.n) {
            return Err(Error::TesterFailure(format!(
                "item {bad} outside 0..{}",
                self.n
            )));
        }
        let count = items
            .iter()
            .filter(|i| self.defectives.binary_search(i).is_ok())
            .count();
        Ok(self.noise.random::<f64>() < self.f.at(count))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LomDecision {
    /// `d <= d_hat - 1`.
    Below,
    /// `d >= d_hat`.
    AtOrAbove,
}

/// Record of one executed subroutine call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LomCall {
    pub d_hat: usize,
    pub tests: u64,
    pub positives: u64,
    pub decision: LomDecision,
}

/// Runs `t_tests` fresh pools and reports "below" iff the positive fraction
/// is at most the threshold.
pub fn lom_decide(tester: &mut dyn PoolTester, params: &LomParams, seed: u64) -> Result<LomCall> {
    let mut designer = chacha(seed);
    let mut positives = 0u64;
    for _ in 0..params.t_tests {
        if tester.test_random_pool(params.zeta, &mut designer)? {
            positives += 1;
        }
    }
    let fraction = positives as f64 / params.t_tests as f64;
    let decision = if fraction <= params.threshold {
        LomDecision::Below
    } else {
        LomDecision::AtOrAbove
    };
    Ok(LomCall {
        d_hat: params.d_hat,
        tests: params.t_tests,
        positives,
        decision,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateResult {
    pub d_estimate: usize,
    pub stages: usize,
    pub tests_used: u64,
    pub calls: Vec<LomCall>,
}

/// Estimates the hidden number of defectives among `n` items, which must be
/// at least one.
pub fn estimate_d(
    tester: &mut dyn PoolTester,
    family: &Family,
    n: usize,
    eps: f64,
    seed: u64,
) -> Result<EstimateResult> {
    let mut planner = LomPlanner::new(family.clone(), n, eps)?;
    estimate_d_with(tester, &mut planner, n, seed)
}

/// [`estimate_d`] reusing the subroutine parameters cached in `planner`.
pub fn estimate_d_with(
    tester: &mut dyn PoolTester,
    planner: &mut LomPlanner,
    n: usize,
    seed: u64,
) -> Result<EstimateResult> {
    let mut calls = Vec::new();
    let mut run = |d_hat: usize, calls: &mut Vec<LomCall>| -> Result<LomDecision> {
        let params = planner.params(d_hat)?;
        let call = lom_decide(tester, &params, hash(seed, &[calls.len() as u64]))?;
        calls.push(call);
        Ok(call.decision)
    };

    let mut upper = 2usize;
    while run(upper, &mut calls)? == LomDecision::AtOrAbove {
        upper *= 2;
        if upper > 2 * n {
            return Err(Error::ParameterOutOfRange(format!(
                "doubling passed 2n = {} without a `below` decision",
                2 * n
            )));
        }
    }
    // Invariant: d >= lower and d <= upper - 1.
    let mut lower = (upper / 2).max(1);
    while upper - lower >= 2 {
        let mid = (lower + upper) / 2;
        match run(mid, &mut calls)? {
            LomDecision::Below => upper = mid,
            LomDecision::AtOrAbove => lower = mid,
        }
    }
    Ok(EstimateResult {
        d_estimate: lower,
        stages: calls.len(),
        tests_used: calls.iter().map(|c| c.tests).sum(),
        calls,
    })
}

/// A tester that replays a fixed sequence of outcomes.
#[derive(Debug, Clone)]
pub struct RecordedTester {
    outcomes: std::vec::IntoIter<bool>,
}

impl RecordedTester {
    pub fn new(outcomes: Vec<bool>) -> Self {
        RecordedTester {
            outcomes: outcomes.into_iter(),
        }
    }

    fn next(&mut self) -> Result<bool> {
        self.outcomes
            .next()
            .ok_or_else(|| Error::TesterFailure("recorded outcomes exhausted".into()))
    }
}

impl PoolTester for RecordedTester {
    fn test_random_pool(&mut self, _zeta: f64, _designer: &mut dyn RngCore) -> Result<bool> {
        self.next()
    }

    fn test_items(&mut self, _items: &[usize]) -> Result<bool> {
        self.next()
    }
}
