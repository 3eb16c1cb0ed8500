//! Log-space binomial and hypergeometric numerics.

/// Table of `ln k!` for `k = 0..=max`, accumulated with Neumaier
/// compensation so the error stays near one ulp of the largest entry.
#[derive(Debug, Clone)]
pub struct LnFactorials {
    table: Vec<f64>,
}

impl LnFactorials {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        table.push(0.0);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for k in 1..=max {
            let x = (k as f64).ln();
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
            table.push(sum + comp);
        }
        LnFactorials { table }
    }

    pub fn max(&self) -> usize {
        self.table.len() - 1
    }

    #[inline]
    pub fn ln_factorial(&self, k: usize) -> f64 {
        self.table[k]
    }

    /// `ln C(n, k)`; `-inf` when `k > n`.
    #[inline]
    pub fn ln_choose(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return f64::NEG_INFINITY;
        }
        self.table[n] - self.table[k] - self.table[n - k]
    }

    /// Log of the hypergeometric pmf: `a` successes in `draws` draws from a
    /// population of `size` containing `successes` marked items.
    pub fn hypergeom_ln_pmf(&self, size: usize, successes: usize, draws: usize, a: usize) -> f64 {
        if a > successes || a > draws || draws - a > size - successes {
            return f64::NEG_INFINITY;
        }
        self.ln_choose(successes, a) + self.ln_choose(size - successes, draws - a)
            - self.ln_choose(size, draws)
    }
}

/// Support `[lo, hi]` of the hypergeometric distribution.
pub fn hypergeom_support(size: usize, successes: usize, draws: usize) -> (usize, usize) {
    let lo = draws.saturating_sub(size - successes);
    let hi = successes.min(draws);
    (lo, hi)
}

/// `log2 C(n, k)` without forming the coefficient.
pub fn log2_choose(n: usize, k: usize) -> f64 {
    LnFactorials::new(n).ln_choose(n, k) / std::f64::consts::LN_2
}

/// Sum of non-negative terms given by their logarithms, anchored at the
/// largest exponent. Returns the log of the sum (`-inf` for an empty sum).
pub fn ln_sum_exp(ln_terms: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = ln_terms
        .clone()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let s: f64 = ln_terms.into_iter().map(|t| (t - max).exp()).sum();
    max + s.ln()
}

/// Binomial weights `C(m, j) q^j (1-q)^(m-j)` for a fixed `m`, evaluated in
/// log space.
#[derive(Debug, Clone)]
pub struct BinomialKernel {
    m: usize,
    ln_choose: Vec<f64>,
}

impl BinomialKernel {
    pub fn new(m: usize) -> Self {
        let table = LnFactorials::new(m);
        let ln_choose = (0..=m).map(|j| table.ln_choose(m, j)).collect();
        BinomialKernel { m, ln_choose }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Log weights for `j = 0..=m` at participation probability `q` in (0, 1).
    pub fn ln_weights_into(&self, q: f64, out: &mut Vec<f64>) {
        let lq = q.ln();
        let lp = (-q).ln_1p();
        out.clear();
        out.extend(
            self.ln_choose
                .iter()
                .enumerate()
                .map(|(j, c)| c + j as f64 * lq + (self.m - j) as f64 * lp),
        );
    }

    /// `ln sum_j w_j v_j` for non-negative `v`; zero entries are skipped.
    pub fn ln_weighted_sum(ln_weights: &[f64], values: &[f64]) -> f64 {
        debug_assert_eq!(ln_weights.len(), values.len());
        let terms = ln_weights
            .iter()
            .zip(values)
            .filter(|(_, &v)| v > 0.0)
            .map(|(w, v)| w + v.ln());
        ln_sum_exp(terms)
    }
}
