use monotone_gt::estimate::{
    estimate_d_with, lom_decide, lom_params, LomDecision, LomPlanner, SimulationTester,
};
use monotone_gt::oracles::delta_direct;
use monotone_gt::rng::hash;
use monotone_gt::Family;

#[test]
fn threshold_test_count_from_direct_summation() {
    let family = Family::Threshold { l: 1 };
    let eps_sub = 0.01;
    let p = lom_params(&family, 3, eps_sub, 10_000).unwrap();
    let f = family.instantiate(3).unwrap();
    let delta = delta_direct(&f, p.zeta);
    let odds = (1.0 - p.zeta) / (p.zeta * delta);
    let expect = (8.32 * odds * odds * (1.0 / eps_sub).log2()).ceil() as u64;
    assert_eq!(p.t_tests, expect);
}

fn error_rate(true_d: usize, d_hat: usize, wrong: LomDecision) -> (f64, f64) {
    let family = Family::Classical;
    let params = lom_params(&family, d_hat, 0.05, 10_000).unwrap();
    let runs = 500;
    let errors = (0..runs)
        .filter(|&r| {
            let mut tester = SimulationTester::new(200, &family, true_d, hash(1, &[r])).unwrap();
            lom_decide(&mut tester, &params, hash(2, &[r]))
                .unwrap()
                .decision
                == wrong
        })
        .count();
    let bound = params.eps_sub + 3.0 * (params.eps_sub / runs as f64).sqrt();
    (errors as f64 / runs as f64, bound)
}

#[test]
fn subroutine_error_below_candidate() {
    let (rate, bound) = error_rate(3, 4, LomDecision::AtOrAbove);
    assert!(rate <= bound, "{rate} > {bound}");
}

#[test]
fn subroutine_error_at_candidate() {
    let (rate, bound) = error_rate(4, 4, LomDecision::Below);
    assert!(rate <= bound, "{rate} > {bound}");
}

#[test]
fn search_bracket_is_consistent() {
    let family = Family::Threshold { l: 1 };
    let n = 400;
    let mut planner = LomPlanner::new(family.clone(), n, 0.1)
        .unwrap()
        .with_resolution(2000);
    for (run, true_d) in [5usize, 12].into_iter().enumerate() {
        let mut tester = SimulationTester::new(n, &family, true_d, run as u64).unwrap();
        let r = estimate_d_with(&mut tester, &mut planner, n, 99).unwrap();
        assert_eq!(r.tests_used, r.calls.iter().map(|c| c.tests).sum::<u64>());
        assert_eq!(r.stages, r.calls.len());
        for call in &r.calls {
            let expected = if call.d_hat <= r.d_estimate {
                LomDecision::AtOrAbove
            } else {
                LomDecision::Below
            };
            assert_eq!(
                call.decision, expected,
                "{call:?} vs estimate {}",
                r.d_estimate
            );
        }
    }
}

#[test]
fn planner_memoises_parameters() {
    let mut planner = LomPlanner::new(Family::Classical, 1000, 0.1).unwrap();
    let a = planner.params(8).unwrap();
    let b = planner.params(8).unwrap();
    assert_eq!(a, b);
    assert!((planner.eps_sub() - 0.1 / (2.0 * 1000f64.log2() + 2.0)).abs() < 1e-15);
}

#[test]
fn threshold_level_above_candidate_is_rejected() {
    // threshold:5 is not defined at d_hat = 2.
    let mut planner = LomPlanner::new(Family::Threshold { l: 5 }, 100, 0.1).unwrap();
    assert!(planner.params(2).is_err());
}
