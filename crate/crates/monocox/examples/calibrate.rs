//! One-off calibration runs backing the constants frozen into the test
//! suite: the risk-mass value for the standard Weibull design and the
//! limit-law sampler's moments at production and finer grids.

use monocox::estimators::Target;
use monocox::lab::{
    chernoff_sample, phi_true, scaling_constant_with_reps, Baseline, CovariateLaw, GeneratorSpec,
};

fn main() {
    let weibull = GeneratorSpec {
        baseline: Baseline::Weibull { shape: 2.0, rate: 1.0 },
        beta0: vec![0.5],
        covariate_law: CovariateLaw::Uniform01,
        censoring_max: 3.0,
        n: 0,
        seed: 2024,
    };
    let phi = phi_true(&weibull, 0.5, 10_000_000).unwrap();
    let analytic = (5.0 / 6.0) * 8.0 * ((-0.25f64).exp() - (-0.25 * 0.5f64.exp()).exp());
    println!("phi weibull design: mc {} (se {}), analytic {}", phi.value, phi.standard_error, analytic);

    let expo = GeneratorSpec { baseline: Baseline::Exponential { rate: 1.0 }, ..weibull.clone() };
    let phi_e = phi_true(&expo, 0.5, 10_000_000).unwrap();
    let analytic_e = (5.0 / 6.0) * 4.0 * ((-0.5f64).exp() - (-0.5 * 0.5f64.exp()).exp());
    println!("phi exponential design: mc {} (se {}), analytic {}", phi_e.value, phi_e.standard_error, analytic_e);

    let sc_h = scaling_constant_with_reps(&weibull, 0.5, Target::Hazard, 10_000_000).unwrap();
    println!("hazard scaling constant: {}", sc_h.value);
    let sc_d = scaling_constant_with_reps(&expo, 0.5, Target::Density, 10_000_000).unwrap();
    println!("density scaling constant: {}", sc_d.value);

    for (label, step, reps, seed) in [
        ("production grid", 0.005, 100_000usize, 100u64),
        ("fine grid", 0.001, 100_000, 101),
        ("fine grid big", 0.001, 200_000, 102),
    ] {
        let s = chernoff_sample(2.0, step, reps, seed).unwrap();
        println!("chernoff {label}: h={step} reps={reps} mean={:.6} sd={:.8}", s.mean(), s.sd());
    }
}
