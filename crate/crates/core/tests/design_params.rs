use monotone_gt::design::{
    bounds_report, concentration_h, design_point, lower_bound_tests, optimize_q, pool_moments,
    sensitivity_h, sensitivity_term, Objective,
};
use monotone_gt::numerics::{log2_choose, LnFactorials};
use monotone_gt::oracles::{delta_direct, positivity_direct};
use monotone_gt::{Family, TestFunction};

fn f(spec: &str, d: usize) -> TestFunction {
    Family::parse(spec).unwrap().instantiate(d).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// Brute-force minimiser of a one-dimensional objective on a fine grid.
fn grid_argmin(objective: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> f64 {
    (1..points)
        .map(|k| lo + (hi - lo) * k as f64 / points as f64)
        .min_by(|a, b| objective(*a).total_cmp(&objective(*b)))
        .unwrap()
}

#[test]
fn threshold_delta_single_surviving_increment() {
    let tf = f("threshold:5", 20);
    let p = design_point(&tf, 0.25, 2000, 0.01).unwrap();
    let closed = 11628.0 * 0.25f64.powi(5) * 0.75f64.powi(15);
    assert!(rel(p.delta, closed) < 1e-13);
    assert!(rel(p.delta, delta_direct(&tf, 0.25)) < 1e-13);
}

#[test]
fn positivity_sums_match_exact_summation() {
    for spec in ["sigmoid", "linear", "partial-linear:2/3", "noisy:0.2,0.7"] {
        let tf = f(spec, 37);
        for q in [0.02, 0.31, 0.5, 0.88] {
            let p = design_point(&tf, q, 100, 0.1).unwrap();
            let (p_minus, p_plus) = positivity_direct(&tf, q);
            assert!(rel(p.p_minus, p_minus) < 1e-12, "{spec} q={q}");
            assert!(rel(p.p_plus, p_plus) < 1e-12, "{spec} q={q}");
            assert!(rel(p.q_minus, p_minus) < 1e-12, "{spec} q={q}");
        }
    }
}

#[test]
fn participation_parameters_follow_their_formulas() {
    let tf = f("sigmoid", 12);
    let (q, n, eps) = (0.2, 500, 0.05);
    let p = design_point(&tf, q, n, eps).unwrap();
    let log_term = (2.0 * n as f64 / eps).log2();
    assert!(rel(p.m, 8.32 * p.p_min / p.delta.powi(2) * log_term) < 1e-14);
    assert!(rel(p.s, 8.32 * p.p_min / p.nabla.powi(2) * log_term) < 1e-14);
    assert!(
        rel(
            p.gamma_hat,
            36.06 * (1.0 - q) / (q * p.delta.powi(2)) * log_term
        ) < 1e-14
    );
    assert_eq!(p.p_min, p.p_plus.min(1.0 - p.q_plus).min(p.p_min));
}

#[test]
fn optimal_q_for_threshold_is_eleven_fortieths() {
    // The surrogate is proportional to 1 / (q^11 (1-q)^29).
    let tf = f("threshold:5", 20);
    let (q, _) = optimize_q(&tf, 2000, 0.01, Objective::GammaHat, 100_000).unwrap();
    let brute = grid_argmin(
        |q| -(11.0 * q.ln() + 29.0 * (1.0 - q).ln()),
        0.0,
        1.0,
        1_000_000,
    );
    assert!((q - 0.275).abs() < 1e-6, "q = {q}");
    assert!((q - brute).abs() < 2e-6);
}

#[test]
fn optimal_q_for_classical_single_defective_is_half() {
    let tf = f("classical", 1);
    let (q, _) = optimize_q(&tf, 100, 0.01, Objective::GammaHat, 1000).unwrap();
    assert!((q - 0.5).abs() < 1e-6, "q = {q}");
}

#[test]
fn top_increment_optimum() {
    // Only f(d) - f(d-1) is non-zero. The surrogate is 1 / ((1-q) q^(2d-1)),
    // minimised at (2d-1)/(2d); T(q) is 1 / ((1-q) q^d) up to constants,
    // minimised at d/(d+1).
    let d = 8;
    let mut values = vec![0.1; d];
    values.push(0.9);
    let tf = TestFunction::new(values).unwrap();
    let (q_gamma, _) = optimize_q(&tf, 1000, 0.01, Objective::GammaHat, 20_000).unwrap();
    let (q_t, _) = optimize_q(&tf, 1000, 0.01, Objective::TOfQ, 20_000).unwrap();
    assert!(
        (q_gamma - (2 * d - 1) as f64 / (2 * d) as f64).abs() < 1e-5,
        "{q_gamma}"
    );
    let brute = grid_argmin(
        |q| design_point(&tf, q, 1000, 0.01).unwrap().t_of_q,
        0.5,
        0.99,
        200_000,
    );
    assert!((q_t - brute).abs() < 1e-5, "{q_t} vs {brute}");
    assert!((q_t - d as f64 / (d + 1) as f64).abs() < 0.02, "{q_t}");
}

#[test]
fn threshold_sensitivity_is_one_for_every_d() {
    for d in 2..=60 {
        for l in [0, 1, d / 2, d - 1] {
            let tf = f(&format!("threshold:{l}"), d);
            assert_eq!(sensitivity_term(&tf, l, l + 1), 1.0);
            assert_eq!(sensitivity_h(&tf).unwrap().h, 1.0, "d={d} l={l}");
        }
    }
}

#[test]
fn hypergeometric_mean_of_identity() {
    let (n, d) = (700usize, 30usize);
    let tf = f("linear", d);
    let table = LnFactorials::new(n);
    let mut scratch = Vec::new();
    for chi in [1, 17, 350, 699] {
        let s = pool_moments(&table, &tf, n, chi, &mut scratch);
        // mu = E[A] / d for the linear function.
        assert!(rel(s.mu * d as f64, chi as f64 * d as f64 / n as f64) < 1e-12);
    }
}

#[test]
fn concentration_of_linear_function() {
    let (n, d) = (2000usize, 20usize);
    let c = concentration_h(&f("linear", d), n).unwrap();
    assert!(rel(c.h, 20.0 * 1999.0 / 1980.0) < 1e-9);
}

#[test]
fn lower_bound_examples() {
    let (n, d, eps) = (2000, 20, 0.01);
    let classical = bounds_report(&f("classical", d), n, eps).unwrap();
    let expect = classical.h * ((1.0 - eps) * log2_choose(n, d) - 1.0) / std::f64::consts::E.log2();
    assert!(rel(classical.lower_t, expect) < 1e-9);
    let linear = bounds_report(&f("linear", d), n, eps).unwrap();
    assert!(linear.lower_t >= d as f64 * expect);
    assert!(linear.lower_t <= linear.upper_t as f64);
    assert_eq!(lower_bound_tests(classical.h, n, d, eps), classical.lower_t);
}

#[test]
fn tightness_factor_uses_surrogate_design() {
    let tf = f("sigmoid", 20);
    let b = bounds_report(&tf, 2000, 0.01).unwrap();
    let (_, p) = optimize_q(&tf, 2000, 0.01, Objective::GammaHat, 100_000).unwrap();
    let c = concentration_h(&tf, 2000).unwrap();
    assert_eq!(
        b.tightness_factor,
        p.p_min / (c.mu_star * (1.0 - c.mu_star))
    );
    assert!(b.tightness_factor > 0.0);
}
