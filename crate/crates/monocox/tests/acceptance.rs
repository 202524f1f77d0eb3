//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured quantities (run with `--nocapture` to see them).
//!
//! The finite-sample identities (duality, switching, envelope contraction,
//! covariate-free reduction, determinism) are exact; the Monte Carlo rate
//! and limit-law checks run at fixed seeds and desk-scale replicate counts
//! with the stated tolerances.

mod common;

use common::*;
use monocox::breslow::breslow_lambda;
use monocox::cox::{fit_beta, partial_likelihood_gradient, CoxOptions};
use monocox::estimators::{
    grenander_density, grenander_hazard, inverse_process, maxmin_oracle, npmle_hazard,
    npmle_interval_slopes, InverseKind, Method, Shape, Target,
};
use monocox::lab::{
    chernoff_sample, generate, run_experiment, CovariateLaw, EstimatorChoice, ExperimentSpec,
    GeneratorSpec,
};
use monocox::minorant::{gcm, gcm_of_function, CumSumDiagram};
use std::time::Instant;

fn experiment(
    base: GeneratorSpec,
    estimator: EstimatorChoice,
    n_list: Vec<usize>,
    replicates: usize,
    seed: u64,
    chernoff_reps: usize,
) -> ExperimentSpec {
    ExperimentSpec {
        baseline: base.baseline,
        beta0: base.beta0,
        covariate_law: base.covariate_law,
        censoring_max: base.censoring_max,
        x0: 0.5,
        estimator,
        n_list,
        replicates,
        seed,
        phi_mc_reps: 500_000,
        chernoff_reps,
        chernoff_halfwidth: 2.0,
        chernoff_step: 0.005,
    }
}

const NPMLE_HAZARD: EstimatorChoice = EstimatorChoice {
    method: Method::Npmle,
    target: Target::Hazard,
    shape: Shape::Nondecreasing,
};
const GRENANDER_HAZARD: EstimatorChoice = EstimatorChoice {
    method: Method::Grenander,
    target: Target::Hazard,
    shape: Shape::Nondecreasing,
};
const GRENANDER_DENSITY: EstimatorChoice = EstimatorChoice {
    method: Method::Grenander,
    target: Target::Density,
    shape: Shape::Nonincreasing,
};

fn fitted_beta(sample: &monocox::SurvivalSample) -> Vec<f64> {
    fit_beta(sample, &CoxOptions::default())
        .map(|f| f.beta_hat)
        .unwrap_or_else(|_| vec![0.5])
}

#[test]
fn criterion_01_maxmin_duality() {
    let started = Instant::now();
    let mut checked_slopes = 0usize;
    let mut max_diff = 0.0f64;
    for k in 0..1000u64 {
        let n = 5 + (k as usize * 13) % 36; // n <= 40, mixed sizes
        let sample = sample_with_events(n, 40_000 + k);
        let beta = fitted_beta(&sample);
        for shape in [Shape::Nondecreasing, Shape::Nonincreasing] {
            let slopes = match npmle_interval_slopes(&sample, &beta, shape) {
                Ok(s) => s,
                Err(_) => continue, // nondecreasing needs two distinct times
            };
            for (idx, &slope) in slopes.iter().enumerate() {
                let dual = maxmin_oracle(&sample, &beta, shape, idx).unwrap();
                let diff = (slope - dual).abs();
                max_diff = max_diff.max(diff);
                assert!(
                    diff <= 1e-10,
                    "dataset {k} {shape:?} interval {idx}: slope {slope} vs dual {dual}"
                );
                checked_slopes += 1;
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed <= 60.0, "duality sweep took {elapsed:.1}s");
    println!(
        "criterion 1 (max-min duality): PASS - {checked_slopes} slopes over 1000 datasets, \
         max |diff| = {max_diff:.2e}, {elapsed:.1}s"
    );
}

#[test]
fn criterion_02_switching_relations() {
    let mut rng = test_rng(20_026);
    let mut checks = 0usize;
    for k in 0..200u64 {
        let n = 15 + (k as usize * 7) % 45;
        let sample = sample_with_events(n, 61_000 + k);
        let beta = fitted_beta(&sample);
        let t1 = sample.sorted_times()[0];
        let tn = sample.max_time().unwrap();
        if t1 >= tn {
            continue;
        }
        let cases: [(InverseKind, Shape, bool); 5] = [
            (InverseKind::NpmleHazard, Shape::Nondecreasing, true),
            (InverseKind::NpmleHazard, Shape::Nonincreasing, false),
            (InverseKind::GrenanderHazard, Shape::Nondecreasing, true),
            (InverseKind::GrenanderHazard, Shape::Nonincreasing, false),
            (InverseKind::GrenanderDensity, Shape::Nonincreasing, false),
        ];
        for (kind, shape, threshold_below) in cases {
            let est = match kind {
                InverseKind::NpmleHazard => npmle_hazard(&sample, &beta, shape).unwrap(),
                InverseKind::GrenanderHazard => grenander_hazard(&sample, &beta, shape).unwrap(),
                InverseKind::GrenanderDensity => grenander_density(&sample, &beta).unwrap(),
            };
            let max_slope = est
                .estimate
                .values()
                .iter()
                .fold(0.0f64, |m, &v| m.max(v))
                .max(1e-3);
            for _ in 0..10 {
                let a = uniform_in(&mut rng, 1e-6, 1.3 * max_slope);
                let u = inverse_process(&sample, &beta, kind, shape, a).unwrap().location;
                for _ in 0..10 {
                    // Interior continuous points: almost surely no tie with
                    // breakpoints or slope values.
                    let x = if kind == InverseKind::NpmleHazard && shape == Shape::Nondecreasing {
                        uniform_in(&mut rng, t1, tn)
                    } else {
                        uniform_in(&mut rng, tn * 1e-3, tn)
                    };
                    let value = est.evaluate(x).unwrap();
                    let lhs = u >= x;
                    let rhs = if threshold_below { value <= a } else { value >= a };
                    assert_eq!(
                        lhs, rhs,
                        "dataset {k} {kind:?} {shape:?}: a={a} x={x} u={u} value={value}"
                    );
                    checks += 1;
                }
            }
        }
    }
    println!("criterion 2 (switching relations): PASS - {checks} exact boolean checks, 0 violations");
}

#[test]
fn criterion_03_marshall_inequality() {
    let truth = |x: f64| x * x; // convex cumulative hazard of Weibull(2, 1)
    let mut worst_margin = f64::NEG_INFINITY;
    for k in 0..500u64 {
        let sample = sample_with_events(100, 73_000 + k);
        let beta = fitted_beta(&sample);
        let lambda = breslow_lambda(&sample, &beta).unwrap();
        let end = sample.max_time().unwrap();
        let hull = gcm_of_function(&lambda, 0.0, end).unwrap();
        let mut grid = vec![0.0];
        grid.extend(lambda.breakpoints().iter().copied().filter(|&b| b < end));
        grid.push(end);
        let mut sup_env = 0.0f64;
        let mut sup_raw = 0.0f64;
        for &x in &grid {
            sup_env = sup_env.max((hull.envelope_at(x) - truth(x)).abs());
            sup_raw = sup_raw.max((lambda.evaluate(x).unwrap() - truth(x)).abs());
        }
        worst_margin = worst_margin.max(sup_env - sup_raw);
        assert!(
            sup_env <= sup_raw + 1e-12,
            "sample {k}: envelope sup {sup_env} exceeds raw sup {sup_raw}"
        );
    }
    println!(
        "criterion 3 (marshall inequality): PASS - 500 samples, worst margin {worst_margin:.2e} <= 1e-12"
    );
}

#[test]
fn criterion_04_covariate_free_reduction() {
    let mut rng = test_rng(444);
    let mut max_diff = 0.0f64;
    for k in 0..100u64 {
        let spec = GeneratorSpec {
            covariate_law: CovariateLaw::Fixed { designs: vec![vec![0.0]] },
            ..weibull_design(40 + (k as usize % 60), 80_000 + k)
        };
        let sample = generate(&spec).unwrap();
        if sample.event_count() == 0 {
            continue;
        }
        let lambda = breslow_lambda(&sample, &[0.0]).unwrap();
        let status: Vec<bool> = (0..sample.n()).map(|i| sample.is_event(i)).collect();
        let table = nelson_aalen(sample.times(), &status);
        assert_eq!(lambda.breakpoints().len(), table.len());
        for (&bp, &(t, cum)) in lambda.breakpoints().iter().zip(&table) {
            assert_eq!(bp, t);
            let diff = (lambda.evaluate(bp).unwrap() - cum).abs();
            max_diff = max_diff.max(diff);
            assert!(diff <= 1e-12, "sample {k}: breslow vs nelson-aalen at {bp}");
        }
        // Envelope slope estimator vs the hull slopes of the independent
        // Nelson-Aalen table.
        let end = sample.max_time().unwrap();
        let mut pts = vec![(0.0, 0.0)];
        for &(t, cum) in &table {
            if t < end {
                pts.push((t, cum));
            }
        }
        pts.push((end, nelson_aalen_at(&table, end)));
        let reference = gcm(&CumSumDiagram::new(pts.clone()).unwrap());
        let env = grenander_hazard(&sample, &[0.0], Shape::Nondecreasing).unwrap();
        for _ in 0..25 {
            let x = uniform_in(&mut rng, end * 1e-3, end);
            let j = pts.iter().position(|&(px, _)| px >= x).unwrap();
            let expected = reference.left_slopes[j - 1];
            let got = env.evaluate(x).unwrap();
            let diff = (got - expected).abs();
            max_diff = max_diff.max(diff);
            assert!(diff <= 1e-12, "sample {k}: slope {got} vs nelson-aalen hull {expected} at {x}");
        }
    }
    println!("criterion 4 (covariate-free reduction): PASS - max |diff| = {max_diff:.2e} over 100 samples");
}

#[test]
fn criterion_05_consistency() {
    let started = Instant::now();
    let mut lines = Vec::new();
    for (label, base, choice) in [
        ("npmle hazard", weibull_design(0, 0), NPMLE_HAZARD),
        ("grenander hazard", weibull_design(0, 0), GRENANDER_HAZARD),
        ("grenander density", exponential_design(0, 0), GRENANDER_DENSITY),
    ] {
        let spec = experiment(base, choice, vec![500, 4000], 200, 90_001, 0);
        let report = run_experiment(&spec).unwrap();
        assert!(report.summaries.iter().all(|s| s.excluded == 0), "{label}: unexpected exclusions");
        let small = report.summaries[0].mean_abs_error.unwrap();
        let large = report.summaries[1].mean_abs_error.unwrap();
        assert!(
            large < small,
            "{label}: mean abs error did not shrink ({small} -> {large})"
        );
        lines.push(format!("{label}: {small:.4} -> {large:.4}"));
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed <= 600.0, "consistency sweep took {elapsed:.0}s");
    println!(
        "criterion 5 (consistency): PASS - mean |error| at n=500 vs n=4000: {}; {elapsed:.0}s",
        lines.join("; ")
    );
}

#[test]
fn criterion_06_cube_root_rate() {
    let spec = experiment(weibull_design(0, 0), NPMLE_HAZARD, vec![500, 4000], 300, 90_002, 0);
    let report = run_experiment(&spec).unwrap();
    let ratio = report.rate_ratios[0].rmse_ratio.unwrap();
    assert!(
        (1.4..=2.8).contains(&ratio),
        "rmse ratio {ratio} outside [1.4, 2.8]"
    );
    println!("criterion 6 (cube-root rate): PASS - rmse(500)/rmse(4000) = {ratio:.3} (ideal 2.0)");
}

#[test]
fn criterion_07_asymptotic_equivalence() {
    let spec = experiment(
        weibull_design(0, 0),
        NPMLE_HAZARD,
        vec![500, 2000, 8000],
        300,
        90_003,
        0,
    );
    let report = run_experiment(&spec).unwrap();
    let gaps: Vec<f64> = report
        .summaries
        .iter()
        .map(|s| s.median_scaled_pair_gap.unwrap())
        .collect();
    assert!(
        gaps[0] > gaps[1] && gaps[1] > gaps[2],
        "median n^(1/3)|envelope - mle| not decreasing: {gaps:?}"
    );
    println!(
        "criterion 7 (asymptotic equivalence): PASS - median scaled gap {:.4} > {:.4} > {:.4}",
        gaps[0], gaps[1], gaps[2]
    );
}

#[test]
fn criterion_08_chernoff_limit() {
    let started = Instant::now();
    let hazard = experiment(
        weibull_design(0, 0),
        NPMLE_HAZARD,
        vec![8000],
        400,
        90_004,
        100_000,
    );
    let report = run_experiment(&hazard).unwrap();
    assert_eq!(report.summaries[0].excluded, 0);
    let ks_hazard = report.summaries[0].ks_vs_chernoff.unwrap();
    assert!(ks_hazard <= 0.15, "hazard KS {ks_hazard} > 0.15");

    let density = experiment(
        exponential_design(0, 0),
        GRENANDER_DENSITY,
        vec![8000],
        400,
        90_005,
        100_000,
    );
    let report = run_experiment(&density).unwrap();
    let ks_density = report.summaries[0].ks_vs_chernoff.unwrap();
    assert!(ks_density <= 0.15, "density KS {ks_density} > 0.15");

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed <= 1800.0, "limit-law sweep took {elapsed:.0}s");
    println!(
        "criterion 8 (limit law): PASS - KS hazard {ks_hazard:.3}, density {ks_density:.3} (<= 0.15); {elapsed:.0}s"
    );
}

#[test]
fn criterion_09_beta_recovery_and_gradient() {
    let spec = experiment(weibull_design(0, 0), NPMLE_HAZARD, vec![2000], 200, 90_006, 0);
    let report = run_experiment(&spec).unwrap();
    let mean_beta = report.summaries[0].mean_beta.as_ref().unwrap()[0];
    assert!(
        (mean_beta - 0.5).abs() <= 0.05,
        "mean beta {mean_beta} drifts from 0.5"
    );

    let mut rng = test_rng(909);
    let mut max_rel = 0.0f64;
    for k in 0..100u64 {
        let sample = sample_with_events(10 + (k as usize % 50), 95_000 + k);
        let beta = [uniform_in(&mut rng, -1.5, 1.5)];
        let g = partial_likelihood_gradient(&sample, &beta).unwrap();
        let fd = fd_gradient(&sample, &beta);
        let rel = (g[0] - fd[0]).abs() / 1.0f64.max(fd[0].abs());
        max_rel = max_rel.max(rel);
        assert!(rel <= 1e-5, "instance {k}: gradient rel err {rel}");
    }
    println!(
        "criterion 9 (beta recovery): PASS - mean beta {mean_beta:.4} (target 0.5 +/- 0.05), \
         gradient max rel err {max_rel:.2e}"
    );
}

#[test]
fn criterion_10_determinism() {
    let spec = experiment(weibull_design(0, 0), NPMLE_HAZARD, vec![300], 25, 90_007, 2_000);
    let a = run_experiment(&spec).unwrap().to_json();
    let b = run_experiment(&spec).unwrap().to_json();
    assert_eq!(a, b, "experiment reports differ between runs");

    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("r1.json");
    let p2 = dir.path().join("r2.json");
    std::fs::write(&p1, &a).unwrap();
    std::fs::write(&p2, &b).unwrap();
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());

    let c1 = chernoff_sample(2.0, 0.005, 5_000, 1).unwrap();
    let c2 = chernoff_sample(2.0, 0.005, 5_000, 1).unwrap();
    assert_eq!(c1.draws, c2.draws, "limit-law draws differ between runs");
    println!("criterion 10 (determinism): PASS - byte-identical reports and draws");
}
