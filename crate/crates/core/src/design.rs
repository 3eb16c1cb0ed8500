//! Design parameters of the Bernoulli test design.
//!
//! Everything here is a pure function of the test function `f`, the
//! participation probability `q`, the population size `n` and the target
//! error `eps`. Sums over binomial or hypergeometric weights are evaluated in
//! log space and anchored at their largest term, so tiny sensitivities do not
//! underflow until the final exponentiation.
//!
//! Logarithms written `log` in the test-count formulas are base 2.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{hypergeom_support, log2_choose, BinomialKernel, LnFactorials};
use crate::test_functions::TestFunction;

/// Chernoff constant in the participation parameters `m` and `s`.
pub const PARTICIPATION_CONSTANT: f64 = 8.32;
/// Constant of the `T(q) / P_min(q)` surrogate.
pub const SURROGATE_CONSTANT: f64 = 36.06;
/// Scale of the window `(1/(c d^3), 1 - 1/(c d^3))` that contains the optimal `q`.
pub const Q_WINDOW_CONSTANT: f64 = 376_017.0;
/// Default number of grid points for the `q` search.
pub const DEFAULT_RESOLUTION: usize = 100_000;

/// All derived quantities of the design at one participation probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignPoint {
    pub q: f64,
    /// Positive probability of a test containing a given non-defective item.
    pub p_minus: f64,
    /// Positive probability of a test containing a given defective item.
    pub p_plus: f64,
    /// Positive probability of a test excluding a given non-defective item.
    pub q_minus: f64,
    /// Positive probability of a test excluding a given defective item.
    pub q_plus: f64,
    pub delta: f64,
    pub nabla: f64,
    pub p_min: f64,
    pub m: f64,
    pub s: f64,
    pub t_of_q: f64,
    pub gamma_hat: f64,
}

impl DesignPoint {
    /// `T = ceil(T(q))`.
    pub fn tests(&self) -> u64 {
        self.t_of_q.ceil() as u64
    }
}

/// Positivity probabilities of a single test at participation probability `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Positivity {
    pub p_minus: f64,
    pub p_plus: f64,
    /// Computed as `Q(+) + nabla`, independently of the sum giving `P(-)`.
    pub q_minus: f64,
    pub q_plus: f64,
    /// `1 - Q(+)` summed directly over `1 - f`.
    pub one_minus_q_plus: f64,
    pub delta: f64,
    pub nabla: f64,
}

/// Objective minimised by [`optimize_q`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `36.06 (1-q) / (q Delta^2) log(2n/eps)`.
    GammaHat,
    /// `13 (1-q) / (3q) m`.
    TOfQ,
}

fn validate(n: usize, d: usize, eps: f64) -> Result<()> {
    if n <= d {
        return Err(Error::ParameterOutOfRange(format!(
            "need n > d, got n = {n}, d = {d}"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    Ok(())
}

fn validate_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "q must lie in (0, 1), got {q}"
        )));
    }
    Ok(())
}

/// `log2(2n / eps)`.
pub fn log_term(n: usize, eps: f64) -> f64 {
    (2.0 * n as f64 / eps).log2()
}

/// Pre-tabulated binomial kernels for one test function. Reused across the
/// many `q` values of a grid search.
#[derive(Debug, Clone)]
pub struct DesignEvaluator {
    values: Vec<f64>,
    complement: Vec<f64>,
    increments: Vec<f64>,
    kernel_d: BinomialKernel,
    kernel_d1: BinomialKernel,
}

/// Log-space sums shared by the design quantities.
#[derive(Debug, Clone, Copy)]
struct LnSums {
    /// `ln sum_j B(d-1, j) (f(j+1) - f(j))`; `Delta = (1-q) S`, `nabla = q S`.
    ln_s: f64,
    ln_p_plus: f64,
    /// `ln (1 - Q(+,q))`, summed directly over `1 - f(j)`.
    ln_one_minus_q_plus: f64,
}

impl DesignEvaluator {
    pub fn new(f: &TestFunction) -> Self {
        let d = f.d();
        DesignEvaluator {
            values: f.values().to_vec(),
            complement: f.values().iter().map(|v| 1.0 - v).collect(),
            increments: f.increments(),
            kernel_d: BinomialKernel::new(d),
            kernel_d1: BinomialKernel::new(d - 1),
        }
    }

    pub fn d(&self) -> usize {
        self.values.len() - 1
    }

    fn ln_sums(&self, q: f64, buf: &mut Vec<f64>) -> LnSums {
        let d = self.d();
        self.kernel_d1.ln_weights_into(q, buf);
        LnSums {
            ln_s: BinomialKernel::ln_weighted_sum(buf, &self.increments),
            ln_p_plus: BinomialKernel::ln_weighted_sum(buf, &self.values[1..]),
            ln_one_minus_q_plus: BinomialKernel::ln_weighted_sum(buf, &self.complement[..d]),
        }
    }

    /// `ln Delta(q)` from the increment form.
    pub fn ln_delta(&self, q: f64, buf: &mut Vec<f64>) -> f64 {
        self.kernel_d1.ln_weights_into(q, buf);
        (-q).ln_1p() + BinomialKernel::ln_weighted_sum(buf, &self.increments)
    }

    /// Natural log of the objective, up to the `log(2n/eps)` factor and
    /// constant; `+inf` where the sensitivity vanishes.
    fn ln_objective(&self, q: f64, objective: Objective, buf: &mut Vec<f64>) -> f64 {
        let ratio = (-q).ln_1p() - q.ln();
        let value = match objective {
            Objective::GammaHat => ratio - 2.0 * self.ln_delta(q, buf),
            Objective::TOfQ => {
                let sums = self.ln_sums(q, buf);
                let ln_delta = (-q).ln_1p() + sums.ln_s;
                ratio + sums.ln_p_plus.min(sums.ln_one_minus_q_plus) - 2.0 * ln_delta
            }
        };
        if value.is_nan() {
            f64::INFINITY
        } else {
            value
        }
    }

    /// The four conditional positivity probabilities and both sensitivities.
    pub fn positivity(&self, q: f64) -> Result<Positivity> {
        validate_q(q)?;
        let mut buf = Vec::with_capacity(self.d() + 1);
        let sums = self.ln_sums(q, &mut buf);
        let delta = ((-q).ln_1p() + sums.ln_s).exp();
        if delta <= 0.0 || !delta.is_finite() {
            return Err(Error::DegenerateSensitivity { q });
        }
        let nabla = (q.ln() + sums.ln_s).exp();
        let q_plus = BinomialKernel::ln_weighted_sum(&buf, &self.values[..self.d()]).exp();
        self.kernel_d.ln_weights_into(q, &mut buf);
        Ok(Positivity {
            p_minus: BinomialKernel::ln_weighted_sum(&buf, &self.values).exp(),
            p_plus: sums.ln_p_plus.exp(),
            q_minus: q_plus + nabla,
            q_plus,
            one_minus_q_plus: sums.ln_one_minus_q_plus.exp(),
            delta,
            nabla,
        })
    }

    pub fn point(&self, q: f64, n: usize, eps: f64) -> Result<DesignPoint> {
        validate_q(q)?;
        validate(n, self.d(), eps)?;
        let Positivity {
            p_minus,
            p_plus,
            q_minus,
            q_plus,
            one_minus_q_plus,
            delta,
            nabla,
        } = self.positivity(q)?;

        let p_min = p_plus.min(one_minus_q_plus);
        let log_term = log_term(n, eps);
        let m = PARTICIPATION_CONSTANT * p_min / (delta * delta) * log_term;
        let s = PARTICIPATION_CONSTANT * p_min / (nabla * nabla) * log_term;
        let t_of_q = 13.0 * (1.0 - q) / (3.0 * q) * m;
        let gamma_hat = SURROGATE_CONSTANT * (1.0 - q) / (q * delta * delta) * log_term;
        Ok(DesignPoint {
            q,
            p_minus,
            p_plus,
            q_minus,
            q_plus,
            delta,
            nabla,
            p_min,
            m,
            s,
            t_of_q,
            gamma_hat,
        })
    }

    /// Grid search of the objective over `(lo, hi)` followed by one
    /// refinement pass around the winner. Ties go to the smaller `q`.
    fn search(&self, objective: Objective, resolution: usize, lo: f64, hi: f64) -> Option<f64> {
        let grid = |a: f64, b: f64| -> Vec<f64> {
            (0..resolution)
                .map(|k| a + (b - a) * (k + 1) as f64 / (resolution + 1) as f64)
                .collect()
        };
        let eval = |qs: &[f64]| -> Vec<f64> {
            qs.par_iter()
                .map_init(Vec::new, |buf, &q| self.ln_objective(q, objective, buf))
                .collect()
        };
        let argmin = |vals: &[f64]| -> Option<usize> {
            let mut best: Option<usize> = None;
            for (i, v) in vals.iter().enumerate() {
                if v.is_finite() && best.is_none_or(|b| *v < vals[b]) {
                    best = Some(i);
                }
            }
            best
        };

        let coarse = grid(lo, hi);
        let coarse_vals = eval(&coarse);
        let k = argmin(&coarse_vals)?;
        let a = if k == 0 { lo } else { coarse[k - 1] };
        let b = if k + 1 == coarse.len() {
            hi
        } else {
            coarse[k + 1]
        };
        let fine = grid(a, b);
        let fine_vals = eval(&fine);
        match argmin(&fine_vals) {
            Some(j) if fine_vals[j] < coarse_vals[k] => Some(fine[j]),
            _ => Some(coarse[k]),
        }
    }
}

/// Every design quantity at participation probability `q`.
pub fn design_point(f: &TestFunction, q: f64, n: usize, eps: f64) -> Result<DesignPoint> {
    DesignEvaluator::new(f).point(q, n, eps)
}

pub fn positivity(f: &TestFunction, q: f64) -> Result<Positivity> {
    DesignEvaluator::new(f).positivity(q)
}

/// The search window `(1/(c d^3), 1 - 1/(c d^3))`.
pub fn q_window(d: usize) -> (f64, f64) {
    let w = 1.0 / (Q_WINDOW_CONSTANT * (d as f64).powi(3));
    (w, 1.0 - w)
}

/// Minimises `objective` over a uniform grid of `resolution` interior points
/// of the window, then over `resolution` points between the winner's grid
/// neighbours.
pub fn optimize_q(
    f: &TestFunction,
    n: usize,
    eps: f64,
    objective: Objective,
    resolution: usize,
) -> Result<(f64, DesignPoint)> {
    validate(n, f.d(), eps)?;
    if resolution < 100 {
        return Err(Error::ParameterOutOfRange(format!(
            "resolution must be at least 100, got {resolution}"
        )));
    }
    let evaluator = DesignEvaluator::new(f);
    let (lo, hi) = q_window(f.d());
    let q_hat = evaluator
        .search(objective, resolution, lo, hi)
        .ok_or(Error::DegenerateSensitivity { q: lo })?;
    Ok((q_hat, evaluator.point(q_hat, n, eps)?))
}

/// Minimiser of `(1-z) / (z Delta(z)^2)` for the function `f`, using the
/// same grid strategy as [`optimize_q`]. Shared with the estimator of `d`.
pub(crate) fn argmin_gamma(f: &TestFunction, resolution: usize) -> Result<f64> {
    let evaluator = DesignEvaluator::new(f);
    let (lo, hi) = q_window(f.d());
    evaluator
        .search(Objective::GammaHat, resolution.max(100), lo, hi)
        .ok_or(Error::DegenerateSensitivity { q: lo })
}

/// Sensitivity parameter `H(f)` and the levels attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityResult {
    pub h: f64,
    pub l_star: usize,
    pub u_star: usize,
    /// `min{U-L, sqrt(L+1), sqrt(d-U+1)}` at the minimiser.
    pub beta: f64,
}

/// The sensitivity objective at a single pair `(l, u)`.
pub fn sensitivity_term(f: &TestFunction, l: usize, u: usize) -> f64 {
    let d = f.d();
    let width = (u - l) as f64;
    let beta = width
        .min(((l + 1) as f64).sqrt())
        .min(((d - u + 1) as f64).sqrt());
    let r = width / (beta * (f.at(u) - f.at(l)));
    r * r
}

/// Exhaustive scan of all `0 <= L < U <= d` with `f(U) > f(L)`. Ties break
/// toward the smallest `L`, then the smallest `U`.
pub fn sensitivity_h(f: &TestFunction) -> Result<SensitivityResult> {
    let d = f.d();
    let mut best: Option<SensitivityResult> = None;
    for l in 0..d {
        for u in (l + 1)..=d {
            if f.at(u) <= f.at(l) {
                continue;
            }
            let h = sensitivity_term(f, l, u);
            if best.is_none_or(|b| h < b.h) {
                let beta = ((u - l) as f64)
                    .min(((l + 1) as f64).sqrt())
                    .min(((d - u + 1) as f64).sqrt());
                best = Some(SensitivityResult {
                    h,
                    l_star: l,
                    u_star: u,
                    beta,
                });
            }
        }
    }
    best.ok_or_else(|| Error::Degenerate("no pair L < U with f(U) > f(L)".into()))
}

/// Hypergeometric mean and variance of `f` for one pool size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiStat {
    pub chi: usize,
    pub mu: f64,
    pub sigma2: f64,
    /// `mu (1 - mu) / sigma^2`; `+inf` where the variance vanishes.
    pub ratio: f64,
}

/// Concentration parameter `h(f)` with its minimising pool size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationResult {
    pub h: f64,
    pub chi_star: usize,
    pub mu_star: f64,
    pub sigma2_star: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_chi: Option<Vec<ChiStat>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConcentrationOptions {
    /// Scan every `stride`-th pool size. `1` is exact.
    pub stride: usize,
    pub keep_per_chi: bool,
}

impl Default for ConcentrationOptions {
    fn default() -> Self {
        ConcentrationOptions {
            stride: 1,
            keep_per_chi: false,
        }
    }
}

/// Mean and variance of `f(A)` for `A ~ Hypergeometric(n, d, chi)`.
///
/// The mean is accumulated alongside its complement `sum p(a) (1 - f(a))`
/// and deviations are taken from whichever is smaller, so `mu (1 - mu)` and
/// `sigma^2` stay accurate when `mu` is within rounding of 0 or 1.
pub fn pool_moments(
    table: &LnFactorials,
    f: &TestFunction,
    n: usize,
    chi: usize,
    scratch: &mut Vec<f64>,
) -> ChiStat {
    let d = f.d();
    let (lo, hi) = hypergeom_support(n, d, chi);
    scratch.clear();
    scratch.extend((lo..=hi).map(|a| table.hypergeom_ln_pmf(n, d, chi, a)));
    let max = scratch.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for w in scratch.iter_mut() {
        *w = (*w - max).exp();
        total += *w;
    }
    let mut mu = 0.0;
    let mut nu = 0.0;
    for (w, a) in scratch.iter_mut().zip(lo..=hi) {
        *w /= total;
        mu += *w * f.at(a);
        nu += *w * (1.0 - f.at(a));
    }
    let sigma2: f64 = scratch
        .iter()
        .zip(lo..=hi)
        .map(|(p, a)| {
            let dev = if mu <= 0.5 {
                f.at(a) - mu
            } else {
                nu - (1.0 - f.at(a))
            };
            p * dev * dev
        })
        .sum();
    let spread = mu * nu;
    let ratio = if sigma2 > 0.0 {
        spread / sigma2
    } else {
        f64::INFINITY
    };
    ChiStat {
        chi,
        mu,
        sigma2,
        ratio,
    }
}

pub fn concentration_h(f: &TestFunction, n: usize) -> Result<ConcentrationResult> {
    concentration_h_with(f, n, ConcentrationOptions::default())
}

/// Scans pool sizes `1..n` for the minimum of `mu (1 - mu) / sigma^2`.
/// Ties go to the smallest pool size.
pub fn concentration_h_with(
    f: &TestFunction,
    n: usize,
    options: ConcentrationOptions,
) -> Result<ConcentrationResult> {
    if n <= f.d() {
        return Err(Error::ParameterOutOfRange(format!(
            "need n > d, got n = {n}, d = {}",
            f.d()
        )));
    }
    let stride = options.stride.max(1);
    let table = LnFactorials::new(n);
    let chis: Vec<usize> = (1..n).step_by(stride).collect();
    let stats: Vec<ChiStat> = chis
        .par_iter()
        .map_init(Vec::new, |scratch, &chi| {
            pool_moments(&table, f, n, chi, scratch)
        })
        .collect();
    let mut best: Option<&ChiStat> = None;
    for s in &stats {
        if s.ratio.is_finite() && best.is_none_or(|b| s.ratio < b.ratio) {
            best = Some(s);
        }
    }
    let best =
        *best.ok_or_else(|| Error::Degenerate("sigma^2(chi) = 0 for every pool size".into()))?;
    Ok(ConcentrationResult {
        h: best.ratio,
        chi_star: best.chi,
        mu_star: best.mu,
        sigma2_star: best.sigma2,
        per_chi: options.keep_per_chi.then_some(stats),
    })
}

/// Information-theoretic lower bound on the number of tests of any
/// non-adaptive scheme with error at most `eps`.
pub fn lower_bound_tests(h: f64, n: usize, d: usize, eps: f64) -> f64 {
    std::f64::consts::LN_2 * h * ((1.0 - eps) * log2_choose(n, d) - 1.0)
}

/// Converse, achievability and their comparison for one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub lower_t: f64,
    /// `ceil(T(q))` at the minimiser of `T(q)`.
    pub upper_t: u64,
    /// `P_min(q_hat) / (mu(chi*) (1 - mu(chi*)))` at the minimiser of the surrogate.
    pub tightness_factor: f64,
    /// `min_q T(q) / (h d log n)`.
    pub conjecture_ratio: f64,
    pub q_surrogate: f64,
    pub q_tests: f64,
    pub min_t_of_q: f64,
    pub h: f64,
    pub chi_star: usize,
}

pub fn bounds_report(f: &TestFunction, n: usize, eps: f64) -> Result<BoundsReport> {
    bounds_report_with(f, n, eps, DEFAULT_RESOLUTION)
}

pub fn bounds_report_with(
    f: &TestFunction,
    n: usize,
    eps: f64,
    resolution: usize,
) -> Result<BoundsReport> {
    validate(n, f.d(), eps)?;
    let conc = concentration_h(f, n)?;
    let (q_tests, at_t) = optimize_q(f, n, eps, Objective::TOfQ, resolution)?;
    let (q_surrogate, at_gamma) = optimize_q(f, n, eps, Objective::GammaHat, resolution)?;
    let d = f.d();
    let spread = conc.mu_star * (1.0 - conc.mu_star);
    Ok(BoundsReport {
        lower_t: lower_bound_tests(conc.h, n, d, eps),
        upper_t: at_t.tests(),
        tightness_factor: at_gamma.p_min / spread,
        conjecture_ratio: at_t.t_of_q / (conc.h * d as f64 * (n as f64).log2()),
        q_surrogate,
        q_tests,
        min_t_of_q: at_t.t_of_q,
        h: conc.h,
        chi_star: conc.chi_star,
    })
}

/// The full parameter report printed by the `params` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsReport {
    pub point: DesignPoint,
    pub tests: u64,
    pub sensitivity: SensitivityResult,
    pub bounds: BoundsReport,
}

/// Design at the surrogate minimiser together with `H`, `h` and the bounds.
pub fn params_report(
    f: &TestFunction,
    n: usize,
    eps: f64,
    resolution: usize,
) -> Result<ParamsReport> {
    let (_, point) = optimize_q(f, n, eps, Objective::GammaHat, resolution)?;
    Ok(ParamsReport {
        tests: point.tests(),
        point,
        sensitivity: sensitivity_h(f)?,
        bounds: bounds_report_with(f, n, eps, resolution)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_functions::{build, Family};

    #[test]
    fn classical_delta_is_power_of_one_minus_q() {
        for d in [1usize, 3, 20, 64] {
            let f = build(&Family::Classical, d).unwrap();
            for &q in &[0.05, 0.3, 0.5, 0.8] {
                let p = design_point(&f, q, 1000, 0.01).unwrap();
                let expect = (1.0f64 - q).powi(d as i32);
                assert!((p.delta - expect).abs() <= 1e-13 * expect, "d={d} q={q}");
            }
        }
    }

    #[test]
    fn nabla_relation() {
        let f = build(&Family::Sigmoid, 30).unwrap();
        let p = design_point(&f, 0.3, 500, 0.05).unwrap();
        assert!((p.nabla - 0.3 / 0.7 * p.delta).abs() <= 1e-12 * p.nabla);
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = build(&Family::Linear, 10).unwrap();
        assert!(design_point(&f, 0.0, 100, 0.1).is_err());
        assert!(design_point(&f, 0.5, 10, 0.1).is_err());
        assert!(design_point(&f, 0.5, 100, 1.0).is_err());
        assert!(optimize_q(&f, 100, 0.1, Objective::GammaHat, 10).is_err());
    }

    #[test]
    fn degenerate_sensitivity_when_delta_underflows() {
        // Only the last increment is non-zero, so Delta ~ q^(d-1), which
        // underflows at tiny q for large d.
        let mut values = vec![0.0; 400];
        values.push(1.0);
        let f = TestFunction::new(values).unwrap();
        assert!(matches!(
            design_point(&f, 1e-5, 1000, 0.1),
            Err(Error::DegenerateSensitivity { .. })
        ));
    }

    #[test]
    fn tests_count_uses_ceiling() {
        let f = build(&Family::Classical, 4).unwrap();
        let p = design_point(&f, 0.2, 100, 0.1).unwrap();
        assert_eq!(p.tests() as f64, p.t_of_q.ceil());
        assert!((p.t_of_q - 13.0 * 0.8 / 0.6 * p.m).abs() <= 1e-12 * p.t_of_q);
    }

    #[test]
    fn sensitivity_of_classical_and_threshold() {
        let f = build(&Family::Classical, 20).unwrap();
        let s = sensitivity_h(&f).unwrap();
        assert_eq!((s.h, s.l_star, s.u_star), (1.0, 0, 1));

        let f = build(&Family::Threshold { l: 5 }, 20).unwrap();
        let s = sensitivity_h(&f).unwrap();
        assert_eq!(s.h, 1.0);
        assert_eq!(sensitivity_term(&f, 5, 6), 1.0);
        // (4, 6) also attains 1 and has the smaller L.
        assert_eq!((s.l_star, s.u_star), (4, 6));
        assert_eq!(sensitivity_term(&f, s.l_star, s.u_star), s.h);
    }

    #[test]
    fn sensitivity_linear_third_points() {
        for d in (3..=60).step_by(3) {
            let f = build(&Family::Linear, d).unwrap();
            let s = sensitivity_h(&f).unwrap();
            assert!(sensitivity_term(&f, d / 3, 2 * d / 3) <= 3.0 * d as f64 + 1e-9);
            assert!(s.h <= 3.0 * d as f64 + 1e-9);
        }
    }

    #[test]
    fn concentration_classical_is_one() {
        let f = build(&Family::Classical, 5).unwrap();
        let c = concentration_h_with(
            &f,
            60,
            ConcentrationOptions {
                stride: 1,
                keep_per_chi: true,
            },
        )
        .unwrap();
        assert!((c.h - 1.0).abs() < 1e-9);
        for s in c.per_chi.unwrap() {
            if s.ratio.is_finite() {
                assert!((s.ratio - 1.0).abs() < 1e-9, "chi={}", s.chi);
            }
        }
    }

    #[test]
    fn concentration_linear_closed_form() {
        let (n, d) = (200usize, 10usize);
        let f = build(&Family::Linear, d).unwrap();
        let c = concentration_h(&f, n).unwrap();
        let expect = d as f64 * (n - 1) as f64 / (n - d) as f64;
        assert!((c.h - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn stride_subsamples() {
        let f = build(&Family::Sigmoid, 10).unwrap();
        let full = concentration_h(&f, 300).unwrap();
        let strided = concentration_h_with(
            &f,
            300,
            ConcentrationOptions {
                stride: 7,
                keep_per_chi: true,
            },
        )
        .unwrap();
        assert!(strided.h >= full.h);
        assert_eq!(strided.per_chi.unwrap().len(), (1..300).step_by(7).count());
    }

    #[test]
    fn lower_bound_classical() {
        let (n, d, eps) = (2000, 20, 0.01);
        let lb = lower_bound_tests(1.0, n, d, eps);
        let expect = ((1.0 - eps) * log2_choose(n, d) - 1.0) / std::f64::consts::E.log2();
        assert!((lb - expect).abs() < 1e-9 * expect);
    }
}
