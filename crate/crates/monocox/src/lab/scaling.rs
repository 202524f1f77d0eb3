//! The population risk mass `Phi(beta0, x0) = E[{T >= x0} e^{beta0' Z}]` and
//! the cube-root scaling constants of the pointwise limit theorems.

use super::generator::{CovariateLaw, GeneratorSpec};
use super::{map_indexed, LabError, PHI_STREAM};
use crate::estimators::Target;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

const PHI_CHUNK: usize = 1 << 16;
pub(crate) const DEFAULT_PHI_MC_REPS: usize = 2_000_000;

/// Monte Carlo (or exact, for fixed designs) estimate of the risk mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiEstimate {
    pub value: f64,
    pub standard_error: f64,
    /// True when the value is an exact integral rather than a Monte Carlo
    /// average.
    pub exact: bool,
}

/// `Phi(beta0, x0)` under the spec's design. For a fixed design with uniform
/// censoring the integral is exact:
/// `P(C >= x0) * mean_d e^{beta' z_d} exp(-Lambda_0(x0) e^{beta' z_d})`.
/// Otherwise `mc_reps` independent draws (substream of `spec.seed`) give the
/// average with its standard error.
pub fn phi_true(spec: &GeneratorSpec, x0: f64, mc_reps: usize) -> Result<PhiEstimate, LabError> {
    spec.validate()?;
    if !(x0 >= 0.0 && x0.is_finite()) {
        return Err(LabError::InvalidSpec("x0 must be finite and nonnegative".into()));
    }
    let censoring_survival = if spec.censoring_max > 0.0 {
        (1.0 - x0 / spec.censoring_max).max(0.0)
    } else if x0 == 0.0 {
        1.0
    } else {
        0.0
    };
    if let CovariateLaw::Fixed { designs } = &spec.covariate_law {
        let lam0 = spec.baseline.cumulative_hazard(x0);
        let mean = designs
            .iter()
            .map(|z| {
                let bz: f64 = z.iter().zip(&spec.beta0).map(|(zi, bi)| zi * bi).sum();
                bz.exp() * (-lam0 * bz.exp()).exp()
            })
            .sum::<f64>()
            / designs.len() as f64;
        return Ok(PhiEstimate { value: censoring_survival * mean, standard_error: 0.0, exact: true });
    }
    if mc_reps == 0 {
        return Err(LabError::InvalidSpec("phi Monte Carlo needs at least one draw".into()));
    }
    let chunks = mc_reps.div_ceil(PHI_CHUNK);
    let partials: Vec<(f64, f64, usize)> = map_indexed(chunks, |chunk| {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(PHI_STREAM | chunk as u64);
        let lo = chunk * PHI_CHUNK;
        let hi = ((chunk + 1) * PHI_CHUNK).min(mc_reps);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut z_row: Vec<f64> = Vec::with_capacity(spec.p());
        for _ in lo..hi {
            z_row.clear();
            draw_covariates(&spec.covariate_law, &mut rng, &mut z_row);
            let bz: f64 = z_row.iter().zip(&spec.beta0).map(|(z, b)| z * b).sum();
            let e: f64 = Exp1.sample(&mut rng);
            let x = spec.baseline.inverse_cumulative_hazard(e * (-bz).exp());
            let c = if spec.censoring_max > 0.0 { rng.gen::<f64>() * spec.censoring_max } else { 0.0 };
            let t = x.min(c);
            let v = if t >= x0 { bz.exp() } else { 0.0 };
            sum += v;
            sum_sq += v * v;
        }
        (sum, sum_sq, hi - lo)
    });
    let (sum, sum_sq, count) = partials
        .into_iter()
        .fold((0.0, 0.0, 0usize), |acc, p| (acc.0 + p.0, acc.1 + p.1, acc.2 + p.2));
    let nf = count as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean).max(0.0);
    Ok(PhiEstimate { value: mean, standard_error: (var / nf).sqrt(), exact: false })
}

fn draw_covariates(law: &CovariateLaw, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) {
    match law {
        CovariateLaw::Uniform01 => out.push(rng.gen::<f64>()),
        CovariateLaw::Bernoulli { p } => out.push(if rng.gen::<f64>() < *p { 1.0 } else { 0.0 }),
        CovariateLaw::Fixed { designs } => {
            let i = rng.gen_range(0..designs.len());
            out.extend_from_slice(&designs[i]);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingComponents {
    Hazard { phi0: f64, lam0: f64, dlam0: f64 },
    Density { phi0: f64, f0: f64, df0: f64, cdf0: f64 },
}

/// The constant `A(x0)` multiplying `n^(1/3) (estimate - truth)` in the
/// pointwise limit theorems:
/// `(phi0 / (4 lam0 lam0'))^(1/3)` for hazards and
/// `|phi0 / (4 f0 f0' (1 - F0))|^(1/3)` for densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingConstant {
    pub value: f64,
    pub components: ScalingComponents,
}

pub fn scaling_constant(
    spec: &GeneratorSpec,
    x0: f64,
    target: Target,
) -> Result<ScalingConstant, LabError> {
    scaling_constant_with_reps(spec, x0, target, DEFAULT_PHI_MC_REPS)
}

pub fn scaling_constant_with_reps(
    spec: &GeneratorSpec,
    x0: f64,
    target: Target,
    phi_mc_reps: usize,
) -> Result<ScalingConstant, LabError> {
    let phi = phi_true(spec, x0, phi_mc_reps)?;
    match target {
        Target::Hazard => {
            let lam0 = spec.baseline.hazard(x0);
            let dlam0 = spec.baseline.hazard_derivative(x0);
            if dlam0 == 0.0 {
                return Err(LabError::TheoremConditionsViolated(
                    "the baseline hazard has zero derivative at x0".into(),
                ));
            }
            if lam0 == 0.0 {
                return Err(LabError::TheoremConditionsViolated(
                    "the baseline hazard vanishes at x0".into(),
                ));
            }
            let value = (phi.value / (4.0 * lam0 * dlam0)).abs().powf(1.0 / 3.0);
            Ok(ScalingConstant { value, components: ScalingComponents::Hazard { phi0: phi.value, lam0, dlam0 } })
        }
        Target::Density => {
            let f0 = spec.baseline.density(x0);
            let df0 = spec.baseline.density_derivative(x0);
            let cdf0 = spec.baseline.cdf(x0);
            if df0 == 0.0 {
                return Err(LabError::TheoremConditionsViolated(
                    "the baseline density has zero derivative at x0".into(),
                ));
            }
            if f0 == 0.0 || cdf0 >= 1.0 {
                return Err(LabError::TheoremConditionsViolated(
                    "the baseline density or survival vanishes at x0".into(),
                ));
            }
            let value = (phi.value / (4.0 * f0 * df0 * (1.0 - cdf0))).abs().powf(1.0 / 3.0);
            Ok(ScalingConstant {
                value,
                components: ScalingComponents::Density { phi0: phi.value, f0, df0, cdf0 },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::generator::Baseline;
    use super::*;

    fn base_spec() -> GeneratorSpec {
        GeneratorSpec {
            baseline: Baseline::Weibull { shape: 2.0, rate: 1.0 },
            beta0: vec![0.5],
            covariate_law: CovariateLaw::Uniform01,
            censoring_max: 3.0,
            n: 0,
            seed: 17,
        }
    }

    #[test]
    fn phi_is_one_at_origin_without_censoring_effect() {
        // Z = 0, unit exponential, huge censoring bound: Phi(0, 0) = 1 and
        // Phi(0, x0) = exp(-x0).
        let spec = GeneratorSpec {
            baseline: Baseline::Exponential { rate: 1.0 },
            beta0: vec![0.0],
            covariate_law: CovariateLaw::Fixed { designs: vec![vec![0.0]] },
            censoring_max: 1e12,
            n: 0,
            seed: 1,
        };
        let at0 = phi_true(&spec, 0.0, 1).unwrap();
        assert!(at0.exact);
        assert!((at0.value - 1.0).abs() < 1e-9);
        let x0 = 0.7;
        let at = phi_true(&spec, x0, 1).unwrap();
        assert!((at.value - (-x0).exp()).abs() < 1e-9);
    }

    #[test]
    fn monte_carlo_phi_matches_closed_form_for_uniform_covariate() {
        // Exact integral for Z ~ U(0,1), C ~ U(0,3), Weibull(2,1) baseline:
        // (5/6) * 8 [e^{-1/4} - e^{-sqrt(e)/4}] at x0 = 1/2.
        let spec = base_spec();
        let exact = (5.0 / 6.0) * 8.0 * ((-0.25f64).exp() - (-0.25f64 * 0.5f64.exp()).exp());
        let est = phi_true(&spec, 0.5, 400_000).unwrap();
        assert!(!est.exact);
        assert!(
            (est.value - exact).abs() <= 4.0 * est.standard_error,
            "mc {} vs exact {exact} (se {})",
            est.value,
            est.standard_error
        );
    }

    #[test]
    fn phi_is_deterministic() {
        let spec = base_spec();
        let a = phi_true(&spec, 0.5, 100_000).unwrap();
        let b = phi_true(&spec, 0.5, 100_000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn weibull_hazard_components() {
        let spec = base_spec();
        let sc = scaling_constant_with_reps(&spec, 0.5, Target::Hazard, 50_000).unwrap();
        match sc.components {
            ScalingComponents::Hazard { lam0, dlam0, .. } => {
                assert_eq!(lam0, 1.0);
                assert_eq!(dlam0, 2.0);
            }
            _ => panic!("expected hazard components"),
        }
        assert!(sc.value > 0.0);
    }

    #[test]
    fn exponential_hazard_target_violates_conditions() {
        let mut spec = base_spec();
        spec.baseline = Baseline::Exponential { rate: 1.0 };
        assert!(matches!(
            scaling_constant_with_reps(&spec, 0.5, Target::Hazard, 1000),
            Err(LabError::TheoremConditionsViolated(_))
        ));
    }

    #[test]
    fn exponential_density_target_is_fine() {
        let mut spec = base_spec();
        spec.baseline = Baseline::Exponential { rate: 1.0 };
        let sc = scaling_constant_with_reps(&spec, 0.5, Target::Density, 50_000).unwrap();
        match sc.components {
            ScalingComponents::Density { f0, df0, cdf0, .. } => {
                assert!((f0 - (-0.5f64).exp()).abs() < 1e-12);
                assert!((df0 + (-0.5f64).exp()).abs() < 1e-12);
                assert!((cdf0 - (1.0 - (-0.5f64).exp())).abs() < 1e-12);
            }
            _ => panic!("expected density components"),
        }
        assert!(sc.value > 0.0);
    }
}
