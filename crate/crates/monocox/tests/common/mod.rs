//! Shared test oracles, deliberately independent of the library's
//! implementation paths: a textbook Nelson-Aalen routine, a golden-section
//! maximizer, diagram-level max-min duals, and small data generators.

#![allow(dead_code)]

use monocox::lab::{generate, Baseline, CovariateLaw, GeneratorSpec};
use monocox::SurvivalSample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Textbook Nelson-Aalen estimator: at each distinct event time, a jump of
/// (number of events) / (number at risk). Returns the breakpoint table.
pub fn nelson_aalen(times: &[f64], status: &[bool]) -> Vec<(f64, f64)> {
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].partial_cmp(&times[b]).unwrap());
    let mut table = Vec::new();
    let mut cum = 0.0;
    let mut k = 0;
    let n = times.len();
    while k < n {
        let t = times[order[k]];
        let at_risk = n - k;
        let mut d = 0usize;
        let mut j = k;
        while j < n && times[order[j]] == t {
            if status[order[j]] {
                d += 1;
            }
            j += 1;
        }
        if d > 0 {
            cum += d as f64 / at_risk as f64;
            table.push((t, cum));
        }
        k = j;
    }
    table
}

/// Evaluate a Nelson-Aalen table as a right-continuous step function.
pub fn nelson_aalen_at(table: &[(f64, f64)], x: f64) -> f64 {
    let mut v = 0.0;
    for &(t, cum) in table {
        if t <= x {
            v = cum;
        } else {
            break;
        }
    }
    v
}

/// Golden-section maximization of a unimodal function on [a, b].
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Diagram-level isotonic dual: left slope of the lower convex hull at the
/// i-th non-origin point (1-based), as max over s <= i of min over t >= i of
/// the chord slope (y_t - y_{s-1}) / (x_t - x_{s-1}).
pub fn maxmin_gcm_slope(points: &[(f64, f64)], i: usize) -> f64 {
    let m = points.len() - 1;
    let mut best = f64::NEG_INFINITY;
    for s in 1..=i {
        let mut inner = f64::INFINITY;
        for t in i..=m {
            let slope = (points[t].1 - points[s - 1].1) / (points[t].0 - points[s - 1].0);
            inner = inner.min(slope);
        }
        best = best.max(inner);
    }
    best
}

/// Antitonic twin of [`maxmin_gcm_slope`]: min over s of max over t.
pub fn minmax_lcm_slope(points: &[(f64, f64)], i: usize) -> f64 {
    let m = points.len() - 1;
    let mut best = f64::INFINITY;
    for s in 1..=i {
        let mut inner = f64::NEG_INFINITY;
        for t in i..=m {
            let slope = (points[t].1 - points[s - 1].1) / (points[t].0 - points[s - 1].0);
            inner = inner.max(slope);
        }
        best = best.min(inner);
    }
    best
}

/// The standard synthetic design used throughout the suites: Weibull(2, 1)
/// baseline, beta0 = 0.5, Z ~ U(0, 1), C ~ U(0, 3).
pub fn weibull_design(n: usize, seed: u64) -> GeneratorSpec {
    GeneratorSpec {
        baseline: Baseline::Weibull { shape: 2.0, rate: 1.0 },
        beta0: vec![0.5],
        covariate_law: CovariateLaw::Uniform01,
        censoring_max: 3.0,
        n,
        seed,
    }
}

/// Same design with a unit-exponential baseline (decreasing density).
pub fn exponential_design(n: usize, seed: u64) -> GeneratorSpec {
    GeneratorSpec { baseline: Baseline::Exponential { rate: 1.0 }, ..weibull_design(n, seed) }
}

/// Draw from the standard design, bumping the seed until the sample has at
/// least one event (returns the sample).
pub fn sample_with_events(n: usize, mut seed: u64) -> SurvivalSample {
    loop {
        let s = generate(&weibull_design(n, seed)).unwrap();
        if s.event_count() > 0 {
            return s;
        }
        seed = seed.wrapping_add(0x9e37_79b9);
    }
}

/// A small deterministic rng for test-side draws (levels, points).
pub fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0xdead_beef)
}

/// Central finite-difference gradient of the log partial likelihood.
pub fn fd_gradient(sample: &SurvivalSample, beta: &[f64]) -> Vec<f64> {
    let mut g = Vec::with_capacity(beta.len());
    for j in 0..beta.len() {
        let h = 1e-6 * (1.0 + beta[j].abs());
        let mut plus = beta.to_vec();
        plus[j] += h;
        let mut minus = beta.to_vec();
        minus[j] -= h;
        let fp = monocox::log_partial_likelihood(sample, &plus).unwrap();
        let fm = monocox::log_partial_likelihood(sample, &minus).unwrap();
        g.push((fp - fm) / (2.0 * h));
    }
    g
}

/// Uniform draw in (lo, hi).
pub fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}
