//! Monte Carlo experiment runner: generate, fit, estimate at a fixed point,
//! and summarize raw and cube-root-scaled errors across sample sizes.

use super::chernoff::{chernoff_sample, ChernoffSample};
use super::generator::{draw_sample, Baseline, CovariateLaw, GeneratorSpec};
use super::scaling::{scaling_constant_with_reps, ScalingConstant, DEFAULT_PHI_MC_REPS};
use super::stats;
use super::{map_indexed, map_indexed_seq, replicate_stream, LabError};
use crate::cox::{fit_beta, CoxOptions};
use crate::estimators::{grenander_density, grenander_hazard, npmle_hazard, Method, Shape, Target};
use crate::survival::SurvivalSample;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorChoice {
    pub method: Method,
    pub target: Target,
    pub shape: Shape,
}

impl EstimatorChoice {
    pub fn validate(&self) -> Result<(), LabError> {
        if self.target == Target::Density && self.method == Method::Npmle {
            return Err(LabError::InvalidSpec(
                "the constrained MLE of a decreasing baseline density is not supported".into(),
            ));
        }
        if self.target == Target::Density && self.shape != Shape::Nonincreasing {
            return Err(LabError::InvalidSpec(
                "density estimation is only defined for the nonincreasing shape".into(),
            ));
        }
        Ok(())
    }
}

fn default_phi_mc_reps() -> usize {
    DEFAULT_PHI_MC_REPS
}

fn default_chernoff_reps() -> usize {
    100_000
}

fn default_chernoff_halfwidth() -> f64 {
    2.0
}

fn default_chernoff_step() -> f64 {
    0.005
}

/// Full description of one experiment campaign; serializable as the CLI's
/// spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub baseline: Baseline,
    pub beta0: Vec<f64>,
    pub covariate_law: CovariateLaw,
    pub censoring_max: f64,
    pub x0: f64,
    pub estimator: EstimatorChoice,
    pub n_list: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default = "default_phi_mc_reps")]
    pub phi_mc_reps: usize,
    #[serde(default = "default_chernoff_reps")]
    pub chernoff_reps: usize,
    #[serde(default = "default_chernoff_halfwidth")]
    pub chernoff_halfwidth: f64,
    #[serde(default = "default_chernoff_step")]
    pub chernoff_step: f64,
}

impl ExperimentSpec {
    fn generator(&self, n: usize) -> GeneratorSpec {
        GeneratorSpec {
            baseline: self.baseline.clone(),
            beta0: self.beta0.clone(),
            covariate_law: self.covariate_law.clone(),
            censoring_max: self.censoring_max,
            n,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<(), LabError> {
        self.generator(1).validate()?;
        self.estimator.validate()?;
        if !(self.x0 > 0.0 && self.x0.is_finite()) {
            return Err(LabError::InvalidSpec("x0 must be positive and finite".into()));
        }
        if self.n_list.iter().any(|&n| n < 2) {
            return Err(LabError::InvalidSpec("every n must be at least 2".into()));
        }
        Ok(())
    }
}

/// One replicate's errors; `None` marks an excluded replicate (the estimate
/// was undefined at `x0`, or the regression fit failed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub n: usize,
    pub rep: usize,
    pub raw_error: Option<f64>,
    pub scaled_error: Option<f64>,
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NSummary {
    pub n: usize,
    pub replicates: usize,
    pub excluded: usize,
    pub rmse_raw: Option<f64>,
    pub mean_abs_error: Option<f64>,
    /// Mean fitted coefficients over replicates whose fit converged.
    pub mean_beta: Option<Vec<f64>>,
    /// Quantiles (5, 25, 50, 75, 95 percent) of the scaled errors.
    pub scaled_quantiles: Option<[f64; 5]>,
    /// Median of `n^(1/3) |envelope - MLE|` at `x0` (hazard targets only).
    pub median_scaled_pair_gap: Option<f64>,
    /// Kolmogorov-Smirnov distance between the scaled errors and the
    /// limit-law sample.
    pub ks_vs_chernoff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRatio {
    pub n_small: usize,
    pub n_large: usize,
    pub rmse_ratio: Option<f64>,
    /// `(n_large / n_small)^(1/3)`, the cube-root-rate prediction.
    pub ideal: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub truth: f64,
    pub scaling: ScalingConstant,
    pub summaries: Vec<NSummary>,
    pub rate_ratios: Vec<RateRatio>,
    pub rows: Vec<ReplicateRow>,
    /// Wall-clock time; deliberately not serialized so repeated runs of the
    /// same spec produce identical report files.
    #[serde(skip)]
    pub runtime_seconds: f64,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Per-replicate CSV: `n,rep,raw_error,scaled_error,excluded_flag`.
    pub fn write_rows_csv<P: AsRef<Path>>(&self, path: P) -> std::io::Result<()> {
        let mut out = String::from("n,rep,raw_error,scaled_error,excluded_flag\n");
        for r in &self.rows {
            let fmt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                r.rep,
                fmt(r.raw_error),
                fmt(r.scaled_error),
                u8::from(r.excluded)
            ));
        }
        std::fs::write(path, out)
    }
}

struct Outcome {
    raw: Option<f64>,
    pair_gap: Option<f64>,
    beta: Option<Vec<f64>>,
}

fn evaluate_choice(
    sample: &SurvivalSample,
    beta: &[f64],
    choice: &EstimatorChoice,
    x0: f64,
) -> Option<f64> {
    let est = match (choice.method, choice.target) {
        (Method::Npmle, Target::Hazard) => npmle_hazard(sample, beta, choice.shape).ok()?,
        (Method::Grenander, Target::Hazard) => grenander_hazard(sample, beta, choice.shape).ok()?,
        (_, Target::Density) => grenander_density(sample, beta).ok()?,
    };
    est.evaluate(x0).ok()
}

fn run_one(spec: &ExperimentSpec, n_index: usize, n: usize, rep: usize, truth: f64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(replicate_stream(n_index, rep));
    let gen = spec.generator(n);
    let sample = draw_sample(&gen, n, &mut rng);
    let beta = if gen.p() == 0 {
        Vec::new()
    } else {
        match fit_beta(&sample, &CoxOptions::default()) {
            Ok(fit) => fit.beta_hat,
            Err(_) => return Outcome { raw: None, pair_gap: None, beta: None },
        }
    };
    let value = evaluate_choice(&sample, &beta, &spec.estimator, spec.x0);
    let pair_gap = if spec.estimator.target == Target::Hazard {
        let mle = evaluate_choice(
            &sample,
            &beta,
            &EstimatorChoice { method: Method::Npmle, ..spec.estimator },
            spec.x0,
        );
        let env = evaluate_choice(
            &sample,
            &beta,
            &EstimatorChoice { method: Method::Grenander, ..spec.estimator },
            spec.x0,
        );
        match (mle, env) {
            (Some(a), Some(b)) => Some((b - a).abs()),
            _ => None,
        }
    } else {
        None
    };
    Outcome { raw: value.map(|v| v - truth), pair_gap, beta: Some(beta) }
}

fn run_with(spec: &ExperimentSpec, sequential: bool) -> Result<ExperimentReport, LabError> {
    let started = Instant::now();
    spec.validate()?;
    let truth = match spec.estimator.target {
        Target::Hazard => spec.baseline.hazard(spec.x0),
        Target::Density => spec.baseline.density(spec.x0),
    };
    let scaling = scaling_constant_with_reps(
        &spec.generator(0),
        spec.x0,
        spec.estimator.target,
        spec.phi_mc_reps,
    )?;
    let chernoff: Option<ChernoffSample> = if spec.chernoff_reps > 0 {
        Some(chernoff_sample(
            spec.chernoff_halfwidth,
            spec.chernoff_step,
            spec.chernoff_reps,
            spec.seed,
        )?)
    } else {
        None
    };

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (n_index, &n) in spec.n_list.iter().enumerate() {
        let task = |rep: usize| run_one(spec, n_index, n, rep, truth);
        let outcomes: Vec<Outcome> = if sequential {
            map_indexed_seq(spec.replicates, task)
        } else {
            map_indexed(spec.replicates, task)
        };
        let scale = (n as f64).powf(1.0 / 3.0) * scaling.value;
        let pair_scale = (n as f64).powf(1.0 / 3.0);
        let mut raw = Vec::new();
        let mut scaled = Vec::new();
        let mut gaps = Vec::new();
        let mut beta_sum: Option<Vec<f64>> = None;
        let mut beta_count = 0usize;
        for (rep, o) in outcomes.iter().enumerate() {
            let scaled_err = o.raw.map(|r| scale * r);
            rows.push(ReplicateRow {
                n,
                rep,
                raw_error: o.raw,
                scaled_error: scaled_err,
                excluded: o.raw.is_none(),
            });
            if let Some(r) = o.raw {
                raw.push(r);
                scaled.push(scale * r);
            }
            if let Some(g) = o.pair_gap {
                gaps.push(pair_scale * g);
            }
            if let Some(b) = &o.beta {
                match &mut beta_sum {
                    Some(acc) => acc.iter_mut().zip(b).for_each(|(a, x)| *a += x),
                    None => beta_sum = Some(b.clone()),
                }
                beta_count += 1;
            }
        }
        let scaled_quantiles = if scaled.is_empty() {
            None
        } else {
            Some([
                stats::quantile(&scaled, 0.05).unwrap(),
                stats::quantile(&scaled, 0.25).unwrap(),
                stats::quantile(&scaled, 0.50).unwrap(),
                stats::quantile(&scaled, 0.75).unwrap(),
                stats::quantile(&scaled, 0.95).unwrap(),
            ])
        };
        summaries.push(NSummary {
            n,
            replicates: spec.replicates,
            excluded: spec.replicates - raw.len(),
            rmse_raw: stats::rmse(&raw),
            mean_abs_error: stats::mean(&raw.iter().map(|r| r.abs()).collect::<Vec<_>>()),
            mean_beta: beta_sum.map(|acc| acc.iter().map(|a| a / beta_count as f64).collect()),
            scaled_quantiles,
            median_scaled_pair_gap: stats::median(&gaps),
            ks_vs_chernoff: chernoff
                .as_ref()
                .and_then(|c| stats::ks_two_sample(&scaled, &c.draws)),
        });
    }

    let mut rate_ratios = Vec::new();
    for w in summaries.windows(2) {
        rate_ratios.push(RateRatio {
            n_small: w[0].n,
            n_large: w[1].n,
            rmse_ratio: match (w[0].rmse_raw, w[1].rmse_raw) {
                (Some(a), Some(b)) if b > 0.0 => Some(a / b),
                _ => None,
            },
            ideal: (w[1].n as f64 / w[0].n as f64).powf(1.0 / 3.0),
        });
    }

    Ok(ExperimentReport {
        spec: spec.clone(),
        truth,
        scaling,
        summaries,
        rate_ratios,
        rows,
        runtime_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Run the experiment campaign described by `spec`. Replicates are
/// independent and run in parallel when the `parallel` feature is enabled;
/// per-replicate substreams keep the output a pure function of the spec.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport, LabError> {
    run_with(spec, false)
}

/// Sequential twin of [`run_experiment`]; bitwise-identical output.
pub fn run_experiment_sequential(spec: &ExperimentSpec) -> Result<ExperimentReport, LabError> {
    run_with(spec, true)
}
