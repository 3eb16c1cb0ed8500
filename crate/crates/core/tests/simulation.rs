use monotone_gt::codec::{decode, simulate_outcomes, TestMatrix};
use monotone_gt::sim::{
    draw_defectives, heatmap, records_csv, run_point, waterfall, ExperimentConfig, HeatmapAxis,
    QChoice, Scale, TSweep, TestCount, TrialPlan, TrialSeeds,
};
use monotone_gt::Family;

fn config(spec: &str, n: usize, d: usize, trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        trials,
        resolution: 2000,
        ..ExperimentConfig::new(Family::parse(spec).unwrap(), n, d)
    }
}

#[test]
fn incremental_trial_matches_full_pipeline() {
    let cfg = ExperimentConfig {
        q: QChoice::Explicit(0.1),
        ..config("sigmoid", 300, 6, 1)
    };
    let plan = TrialPlan::new(&cfg).unwrap();
    let checkpoints = [0, 50, 400, 1200];
    for trial in 0..5 {
        let seeds = TrialSeeds::new(7, trial);
        let fast = plan.run_trial(seeds, &checkpoints);
        let defectives = draw_defectives(cfg.n, cfg.d, seeds.defectives);
        for (k, &t) in checkpoints.iter().enumerate().skip(1) {
            let m = TestMatrix::generate(cfg.n, t as usize, plan.q, seeds.matrix).unwrap();
            let y = simulate_outcomes(&m, &defectives, &plan.f, seeds.outcomes).unwrap();
            let full = decode(&m, &y, &plan.f).unwrap().estimated_defectives == defectives;
            assert_eq!(fast[k], full, "trial {trial} T={t}");
        }
        assert!(!fast[0]);
    }
}

#[test]
fn run_point_agrees_with_waterfall_entry() {
    let cfg = config("threshold:2", 400, 5, 40);
    let sweep = TSweep {
        scale: Scale::DLogN,
        max_multiple: 30.0,
        steps: 6,
    };
    let records = waterfall(&cfg, &sweep).unwrap();
    for r in &records {
        let single = run_point(&cfg, TestCount::tests(r.t)).unwrap();
        assert_eq!(single.successes, r.successes, "T={}", r.t);
    }
}

#[test]
fn single_trial_is_reproducible() {
    let cfg = config("linear", 200, 4, 1);
    let count: TestCount = "40*dlogn".parse().unwrap();
    assert_eq!(
        run_point(&cfg, count).unwrap(),
        run_point(&cfg, count).unwrap()
    );
}

#[test]
fn thread_count_does_not_change_results() {
    let sweep = TSweep {
        scale: Scale::DLogN,
        max_multiple: 20.0,
        steps: 4,
    };
    let one = waterfall(
        &ExperimentConfig {
            threads: 1,
            ..config("sigmoid", 300, 5, 30)
        },
        &sweep,
    );
    let two = waterfall(
        &ExperimentConfig {
            threads: 2,
            ..config("sigmoid", 300, 5, 30)
        },
        &sweep,
    );
    assert_eq!(records_csv(&one.unwrap()), records_csv(&two.unwrap()));
}

#[test]
fn single_cell_heatmap_matches_waterfall() {
    let base = config("threshold:1", 300, 4, 30);
    let sweep = TSweep {
        scale: Scale::DLogN,
        max_multiple: 25.0,
        steps: 5,
    };
    let map = heatmap(&base, &HeatmapAxis::D(vec![4]), &sweep).unwrap();
    let column = waterfall(&base, &sweep).unwrap();
    assert_eq!(map.cells.len(), column.len());
    for (cell, r) in map.cells.iter().zip(&column) {
        assert_eq!((cell.t, cell.successes), (r.t, r.successes));
        assert_eq!(cell.sweep_value, 4.0);
    }
    assert_eq!(map.minima.len(), 1);
}

#[test]
fn classical_recovery_at_twice_design_count() {
    let cfg = config("classical", 500, 5, 200);
    let plan = TrialPlan::new(&cfg).unwrap();
    let point = monotone_gt::design_point(&plan.f, plan.q, cfg.n, cfg.eps).unwrap();
    let t = (2.0 * point.t_of_q).ceil() as u64;
    let r = run_point(&cfg, TestCount::tests(t)).unwrap();
    assert!(r.success_rate >= 0.99, "{r:?}");
}

#[test]
fn defective_draw_is_a_sorted_subset() {
    for seed in 0..20 {
        let set = draw_defectives(50, 7, seed);
        assert_eq!(set.len(), 7);
        assert!(set.windows(2).all(|w| w[0] < w[1]));
        assert!(set.iter().all(|&i| i < 50));
    }
}

/// Full-scale linear reproduction; several minutes on a single core.
#[test]
#[ignore]
fn linear_full_scale() {
    let cfg = ExperimentConfig {
        q: QChoice::Explicit(0.5),
        ..config("linear", 2000, 20, 100)
    };
    let r = run_point(&cfg, "30*d2logn".parse().unwrap()).unwrap();
    assert!(r.success_rate >= 0.95, "{r:?}");
}
