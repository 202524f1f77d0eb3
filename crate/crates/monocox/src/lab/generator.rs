//! Samplers for the proportional hazards model with right censoring. Event
//! times come from inverse-transform sampling of the conditional cumulative
//! hazard, censoring is uniform on `(0, c_max)` with `c_max` finite, and
//! covariate laws are bounded, so the support and moment conditions of the
//! asymptotic theory hold by construction.

use super::LabError;
use crate::survival::SurvivalSample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

/// Baseline hazard families with closed-form hazard, cumulative hazard,
/// density and their derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    /// Hazard `k r^k x^(k-1)`, cumulative hazard `(r x)^k`.
    Weibull { shape: f64, rate: f64 },
    /// Constant hazard `r`.
    Exponential { rate: f64 },
    /// Piecewise-constant hazard: `rates[i]` on `[cuts[i-1], cuts[i])`,
    /// with `rates.len() == cuts.len() + 1` and the last rate holding
    /// beyond the last cut.
    HazardTable { cuts: Vec<f64>, rates: Vec<f64> },
}

impl Baseline {
    pub fn validate(&self) -> Result<(), LabError> {
        match self {
            Baseline::Weibull { shape, rate } => {
                if !(shape > &0.0 && rate > &0.0 && shape.is_finite() && rate.is_finite()) {
                    return Err(LabError::InvalidSpec("weibull needs shape > 0 and rate > 0".into()));
                }
            }
            Baseline::Exponential { rate } => {
                if !(rate > &0.0 && rate.is_finite()) {
                    return Err(LabError::InvalidSpec("exponential needs rate > 0".into()));
                }
            }
            Baseline::HazardTable { cuts, rates } => {
                if rates.len() != cuts.len() + 1 {
                    return Err(LabError::InvalidSpec("hazard table needs one more rate than cuts".into()));
                }
                if cuts.windows(2).any(|w| !(w[0] < w[1])) || cuts.iter().any(|c| !(c > &0.0)) {
                    return Err(LabError::InvalidSpec("hazard table cuts must be positive and increasing".into()));
                }
                if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
                    return Err(LabError::InvalidSpec("hazard table rates must be nonnegative".into()));
                }
            }
        }
        Ok(())
    }

    pub fn hazard(&self, x: f64) -> f64 {
        match self {
            Baseline::Weibull { shape: k, rate: r } => k * r.powf(*k) * x.powf(k - 1.0),
            Baseline::Exponential { rate } => *rate,
            Baseline::HazardTable { cuts, rates } => {
                let i = cuts.partition_point(|&c| c <= x);
                rates[i]
            }
        }
    }

    /// Derivative of the hazard; identically zero for the exponential and,
    /// away from the cuts, for hazard tables.
    pub fn hazard_derivative(&self, x: f64) -> f64 {
        match self {
            Baseline::Weibull { shape: k, rate: r } => k * (k - 1.0) * r.powf(*k) * x.powf(k - 2.0),
            Baseline::Exponential { .. } => 0.0,
            Baseline::HazardTable { .. } => 0.0,
        }
    }

    pub fn cumulative_hazard(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            Baseline::Weibull { shape: k, rate: r } => (r * x).powf(*k),
            Baseline::Exponential { rate } => rate * x,
            Baseline::HazardTable { cuts, rates } => {
                let mut total = 0.0;
                let mut prev = 0.0;
                for (i, &c) in cuts.iter().enumerate() {
                    if x <= c {
                        return total + rates[i] * (x - prev);
                    }
                    total += rates[i] * (c - prev);
                    prev = c;
                }
                total + rates[cuts.len()] * (x - prev)
            }
        }
    }

    /// Generalized inverse of the cumulative hazard; `infinity` when the
    /// hazard integrates to less than `y` (possible for tables with a
    /// vanishing tail rate).
    pub fn inverse_cumulative_hazard(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match self {
            Baseline::Weibull { shape: k, rate: r } => y.powf(1.0 / k) / r,
            Baseline::Exponential { rate } => y / rate,
            Baseline::HazardTable { cuts, rates } => {
                let mut total = 0.0;
                let mut prev = 0.0;
                for (i, &c) in cuts.iter().enumerate() {
                    let seg = rates[i] * (c - prev);
                    if total + seg >= y {
                        return prev + (y - total) / rates[i];
                    }
                    total += seg;
                    prev = c;
                }
                let tail = rates[cuts.len()];
                if tail > 0.0 {
                    prev + (y - total) / tail
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - (-self.cumulative_hazard(x)).exp()
    }

    pub fn density(&self, x: f64) -> f64 {
        self.hazard(x) * (-self.cumulative_hazard(x)).exp()
    }

    /// `f' = (lambda' - lambda^2) exp(-Lambda)`.
    pub fn density_derivative(&self, x: f64) -> f64 {
        let l = self.hazard(x);
        (self.hazard_derivative(x) - l * l) * (-self.cumulative_hazard(x)).exp()
    }
}

/// Bounded covariate laws (the exponential-moment condition is then
/// automatic).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovariateLaw {
    Uniform01,
    Bernoulli { p: f64 },
    /// Finite design list; each record draws one row uniformly at random,
    /// keeping the triplets i.i.d.
    Fixed { designs: Vec<Vec<f64>> },
}

impl CovariateLaw {
    pub fn dimension(&self) -> usize {
        match self {
            CovariateLaw::Uniform01 | CovariateLaw::Bernoulli { .. } => 1,
            CovariateLaw::Fixed { designs } => designs.first().map_or(0, |d| d.len()),
        }
    }

    pub fn validate(&self) -> Result<(), LabError> {
        match self {
            CovariateLaw::Uniform01 => Ok(()),
            CovariateLaw::Bernoulli { p } => {
                if (0.0..=1.0).contains(p) {
                    Ok(())
                } else {
                    Err(LabError::InvalidSpec("bernoulli p must be in [0, 1]".into()))
                }
            }
            CovariateLaw::Fixed { designs } => {
                if designs.is_empty() {
                    return Err(LabError::InvalidSpec("fixed design list is empty".into()));
                }
                let p = designs[0].len();
                if designs.iter().any(|d| d.len() != p) {
                    return Err(LabError::InvalidSpec("fixed design rows have unequal lengths".into()));
                }
                if designs.iter().flatten().any(|z| !z.is_finite()) {
                    return Err(LabError::InvalidSpec("fixed design contains non-finite values".into()));
                }
                Ok(())
            }
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) {
        match self {
            CovariateLaw::Uniform01 => out.push(rng.gen::<f64>()),
            CovariateLaw::Bernoulli { p } => out.push(if rng.gen::<f64>() < *p { 1.0 } else { 0.0 }),
            CovariateLaw::Fixed { designs } => {
                let i = rng.gen_range(0..designs.len());
                out.extend_from_slice(&designs[i]);
            }
        }
    }
}

/// Full description of one synthetic-data design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub baseline: Baseline,
    pub beta0: Vec<f64>,
    pub covariate_law: CovariateLaw,
    /// Censoring is uniform on `(0, censoring_max)`; zero censors everything
    /// immediately.
    pub censoring_max: f64,
    pub n: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<(), LabError> {
        self.baseline.validate()?;
        self.covariate_law.validate()?;
        if self.beta0.len() != self.covariate_law.dimension() {
            return Err(LabError::InvalidSpec(format!(
                "beta0 has length {}, covariate law has dimension {}",
                self.beta0.len(),
                self.covariate_law.dimension()
            )));
        }
        if !(self.censoring_max >= 0.0 && self.censoring_max.is_finite()) {
            return Err(LabError::InvalidSpec("censoring_max must be finite and nonnegative".into()));
        }
        if self.beta0.iter().any(|b| !b.is_finite()) {
            return Err(LabError::InvalidSpec("beta0 must be finite".into()));
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.covariate_law.dimension()
    }
}

/// Draw one i.i.d. sample of size `spec.n`, reproducible from `spec.seed`.
///
/// Per record the draw order is fixed (covariates, then the standard
/// exponential behind the event time, then the censoring time), so the
/// event-time stream does not depend on `beta0`. The event time solves
/// `Lambda_0(X) e^{beta0' z} = E`.
pub fn generate(spec: &GeneratorSpec) -> Result<SurvivalSample, LabError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(draw_sample(spec, spec.n, &mut rng))
}

pub(crate) fn draw_sample(spec: &GeneratorSpec, n: usize, rng: &mut ChaCha8Rng) -> SurvivalSample {
    let p = spec.p();
    let mut times = Vec::with_capacity(n);
    let mut status = Vec::with_capacity(n);
    let mut covariates = Vec::with_capacity(n * p);
    let mut z_row = Vec::with_capacity(p);
    for _ in 0..n {
        z_row.clear();
        spec.covariate_law.draw(rng, &mut z_row);
        let bz: f64 = z_row.iter().zip(&spec.beta0).map(|(z, b)| z * b).sum();
        let e: f64 = Exp1.sample(rng);
        let x = spec.baseline.inverse_cumulative_hazard(e * (-bz).exp());
        let c = if spec.censoring_max > 0.0 {
            rng.gen::<f64>() * spec.censoring_max
        } else {
            0.0
        };
        times.push(x.min(c));
        status.push(x <= c);
        covariates.extend_from_slice(&z_row);
    }
    SurvivalSample::new(times, status, covariates, p).expect("generated data is valid")
}
