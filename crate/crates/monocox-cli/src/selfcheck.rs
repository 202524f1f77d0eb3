//! Fast invariant battery over internally generated data: the quadratic
//! max-min dual against the hull slopes, the threshold/location switching
//! relations of the inverse processes, and the envelope's sup-distance
//! contraction toward a convex reference.

use monocox::estimators::{
    grenander_density, grenander_hazard, inverse_process, maxmin_oracle, npmle_hazard,
    npmle_interval_slopes, InverseKind, Shape,
};
use monocox::lab::{generate, Baseline, CovariateLaw, GeneratorSpec};
use monocox::minorant::gcm_of_function;
use monocox::{breslow_lambda, SurvivalSample};

const DUALITY_TOL: f64 = 1e-10;
const MARSHALL_SLACK: f64 = 1e-12;

fn spec(n: usize, seed: u64) -> GeneratorSpec {
    GeneratorSpec {
        baseline: Baseline::Weibull { shape: 2.0, rate: 1.0 },
        beta0: vec![0.5],
        covariate_law: CovariateLaw::Uniform01,
        censoring_max: 3.0,
        n,
        seed,
    }
}

fn datasets(seed: u64, count: usize) -> Vec<SurvivalSample> {
    (0..count)
        .map(|k| {
            let n = 5 + (seed as usize + 7 * k) % 26;
            generate(&spec(n, seed.wrapping_add(k as u64))).expect("valid spec")
        })
        .filter(|s| s.event_count() > 0 && s.n() >= 2)
        .collect()
}

fn check_duality(seed: u64, inject: Option<&str>) -> Result<(), String> {
    let beta = [0.5];
    for sample in datasets(seed, 40) {
        for shape in [Shape::Nondecreasing, Shape::Nonincreasing] {
            let mut slopes = match npmle_interval_slopes(&sample, &beta, shape) {
                Ok(s) => s,
                Err(_) => continue,
            };
            if inject == Some("gcm-off-by-one") {
                slopes.rotate_right(1);
            }
            for (k, &slope) in slopes.iter().enumerate() {
                if !slope.is_finite() {
                    continue;
                }
                let dual = maxmin_oracle(&sample, &beta, shape, k).map_err(|e| e.to_string())?;
                if (slope - dual).abs() > DUALITY_TOL {
                    return Err(format!(
                        "max-min duality: {shape:?} interval {k}: slope {slope} vs dual {dual}"
                    ));
                }
            }
        }
    }
    Ok(())
}

fn check_switching(seed: u64) -> Result<(), String> {
    let beta = [0.5];
    let level_fracs = [0.11, 0.37, 0.63, 0.89, 1.31];
    let point_fracs = [0.08, 0.27, 0.52, 0.71, 0.93];
    for sample in datasets(seed.wrapping_add(1000), 30) {
        let t1 = sample.sorted_times()[0];
        let tn = sample.max_time().unwrap();
        if t1 >= tn {
            continue;
        }
        let cases: Vec<(InverseKind, Shape, bool)> = vec![
            (InverseKind::NpmleHazard, Shape::Nondecreasing, true),
            (InverseKind::NpmleHazard, Shape::Nonincreasing, false),
            (InverseKind::GrenanderHazard, Shape::Nondecreasing, true),
            (InverseKind::GrenanderHazard, Shape::Nonincreasing, false),
            (InverseKind::GrenanderDensity, Shape::Nonincreasing, false),
        ];
        for (kind, shape, below) in cases {
            let est = match kind {
                InverseKind::NpmleHazard => npmle_hazard(&sample, &beta, shape),
                InverseKind::GrenanderHazard => grenander_hazard(&sample, &beta, shape),
                InverseKind::GrenanderDensity => grenander_density(&sample, &beta),
            };
            let est = match est {
                Ok(e) => e,
                Err(_) => continue,
            };
            let max_slope = est
                .estimate
                .values()
                .iter()
                .fold(0.0f64, |m, &v| m.max(v.abs()))
                .max(1e-6);
            for &lf in &level_fracs {
                let a = lf * max_slope;
                let u = inverse_process(&sample, &beta, kind, shape, a)
                    .map_err(|e| e.to_string())?
                    .location;
                for &pf in &point_fracs {
                    // Interior points for the MLE's half-open domain, the
                    // full (0, T_(n)) range otherwise.
                    let x = if kind == InverseKind::NpmleHazard && shape == Shape::Nondecreasing {
                        t1 + pf * (tn - t1)
                    } else {
                        pf * tn
                    };
                    let value = match est.evaluate(x) {
                        Ok(v) => v,
                        Err(_) => continue,
                    };
                    let lhs = u >= x;
                    let rhs = if below { value <= a } else { value >= a };
                    if lhs != rhs {
                        return Err(format!(
                            "switching: {kind:?} {shape:?} a={a} x={x}: location {u} vs value {value}"
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_marshall(seed: u64) -> Result<(), String> {
    let truth = |x: f64| x * x; // convex reference (Weibull shape-2 cumulative hazard)
    let beta = [0.5];
    for k in 0..20u64 {
        let sample = generate(&spec(80, seed.wrapping_add(2000 + k))).expect("valid spec");
        if sample.event_count() == 0 {
            continue;
        }
        let lambda = breslow_lambda(&sample, &beta).map_err(|e| e.to_string())?;
        let end = sample.max_time().unwrap();
        let hull = gcm_of_function(&lambda, 0.0, end).map_err(|e| e.to_string())?;
        let mut grid = vec![0.0];
        grid.extend(lambda.breakpoints().iter().copied().filter(|&b| b < end));
        grid.push(end);
        let mut sup_envelope = 0.0f64;
        let mut sup_raw = 0.0f64;
        for &x in &grid {
            sup_envelope = sup_envelope.max((hull.envelope_at(x) - truth(x)).abs());
            sup_raw = sup_raw.max((lambda.evaluate(x).unwrap() - truth(x)).abs());
        }
        if sup_envelope > sup_raw + MARSHALL_SLACK {
            return Err(format!(
                "marshall inequality: envelope sup {sup_envelope} exceeds raw sup {sup_raw}"
            ));
        }
    }
    Ok(())
}

pub fn run(seed: u64, inject: Option<&str>) -> u8 {
    if let Some(name) = inject {
        if name != "gcm-off-by-one" {
            eprintln!("error: unknown injection '{name}'");
            return 2;
        }
    }
    let checks: Vec<(&str, Result<(), String>)> = vec![
        ("max-min duality", check_duality(seed, inject)),
        ("switching relations", check_switching(seed)),
        ("marshall inequality", check_marshall(seed)),
    ];
    for (name, result) in checks {
        match result {
            Ok(()) => println!("ok - {name}"),
            Err(detail) => {
                println!("FAIL - {name}");
                eprintln!("selfcheck failed: {detail}");
                return 1;
            }
        }
    }
    println!("selfcheck passed (seed {seed})");
    0
}
