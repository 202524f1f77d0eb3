//! Empirical processes of the baseline: the risk-set process, the cumulative
//! covariate-weighted time process, the event-counting processes with strict
//! and weak boundaries, and the Breslow estimators of the baseline cumulative
//! hazard and distribution function.

use crate::stepfn::{ContinuitySide, Monotonicity, RightExtension, StepFunction};
use crate::survival::SurvivalSample;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BreslowError {
    #[error("sample has no events")]
    NoEvents,
    #[error("beta has length {found}, sample has p = {expected}")]
    DimensionMismatch { found: usize, expected: usize },
    #[error("step function error: {0}")]
    StepFn(#[from] crate::stepfn::StepFnError),
}

fn exp_linear_predictor(sample: &SurvivalSample, beta: &[f64]) -> Result<Vec<f64>, BreslowError> {
    if beta.len() != sample.p() {
        return Err(BreslowError::DimensionMismatch { found: beta.len(), expected: sample.p() });
    }
    Ok((0..sample.n())
        .map(|i| {
            sample
                .covariates_of(i)
                .iter()
                .zip(beta)
                .map(|(z, b)| z * b)
                .sum::<f64>()
                .exp()
        })
        .collect())
}

/// Risk-set process `(1/n) sum {t_i >= x} e^{beta' z_i}`, nonincreasing in
/// `x` with the closed risk-set convention.
pub fn phi_n(sample: &SurvivalSample, beta: &[f64], x: f64) -> Result<f64, BreslowError> {
    let e = exp_linear_predictor(sample, beta)?;
    let n = sample.n().max(1) as f64;
    Ok((0..sample.n())
        .filter(|&i| sample.time(i) >= x)
        .map(|i| e[i])
        .sum::<f64>()
        / n)
}

/// `(1/n) sum e^{beta' z_i} min(t_i, x)`: continuous, piecewise linear,
/// nondecreasing and concave in `x`.
pub fn w_n(sample: &SurvivalSample, beta: &[f64], x: f64) -> Result<f64, BreslowError> {
    let e = exp_linear_predictor(sample, beta)?;
    let n = sample.n().max(1) as f64;
    Ok((0..sample.n())
        .map(|i| e[i] * sample.time(i).min(x))
        .sum::<f64>()
        / n)
}

/// Event-counting process with a strict boundary:
/// `(1/n) #{events with t_i < x}`. Left-continuous.
pub fn v_n(sample: &SurvivalSample, x: f64) -> f64 {
    let n = sample.n().max(1) as f64;
    (0..sample.n())
        .filter(|&i| sample.is_event(i) && sample.time(i) < x)
        .count() as f64
        / n
}

/// Event-counting process with a weak boundary:
/// `(1/n) #{events with t_i <= x}`. Right-continuous.
pub fn y_n(sample: &SurvivalSample, x: f64) -> f64 {
    let n = sample.n().max(1) as f64;
    (0..sample.n())
        .filter(|&i| sample.is_event(i) && sample.time(i) <= x)
        .count() as f64
        / n
}

/// Distinct event times with their event multiplicities `d_i` and risk-set
/// denominators `sum {t_j >= time} e^{beta' z_j}`, in increasing time order.
fn event_table(
    sample: &SurvivalSample,
    beta: &[f64],
) -> Result<Vec<(f64, usize, f64)>, BreslowError> {
    let e = exp_linear_predictor(sample, beta)?;
    let order = sample.sort_view();
    let n = sample.n();
    // suffix[k] = sum over sorted positions k..n of e^{beta'z}.
    let mut suffix = vec![0.0; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1] + e[order[k]];
    }
    let mut table = Vec::new();
    let mut k = 0;
    while k < n {
        let t = sample.time(order[k]);
        let start = k;
        let mut d = 0;
        while k < n && sample.time(order[k]) == t {
            if sample.is_event(order[k]) {
                d += 1;
            }
            k += 1;
        }
        if d > 0 {
            table.push((t, d, suffix[start]));
        }
    }
    Ok(table)
}

/// Breslow estimator of the baseline cumulative hazard: a right-continuous
/// step function jumping by `d_i / sum_{t_j >= X_(i)} e^{beta' z_j}` at each
/// distinct event time, zero before the first event, and held at its last
/// value beyond the last follow-up time.
pub fn breslow_lambda(sample: &SurvivalSample, beta: &[f64]) -> Result<StepFunction, BreslowError> {
    let table = event_table(sample, beta)?;
    if table.is_empty() {
        return Err(BreslowError::NoEvents);
    }
    let mut breakpoints = Vec::with_capacity(table.len());
    let mut values = Vec::with_capacity(table.len());
    let mut cum = 0.0;
    for (t, d, denom) in table {
        cum += d as f64 / denom;
        breakpoints.push(t);
        values.push(cum);
    }
    Ok(StepFunction::new(
        breakpoints,
        values,
        ContinuitySide::Right,
        0.0,
        RightExtension::LastValue,
    )?
    .with_monotonicity(Monotonicity::Nondecreasing)?)
}

/// Baseline distribution estimator `F_n = 1 - exp(-Lambda_n)`, sharing the
/// breakpoints of the Breslow estimator.
pub fn breslow_f(sample: &SurvivalSample, beta: &[f64]) -> Result<StepFunction, BreslowError> {
    let lambda = breslow_lambda(sample, beta)?;
    let values = lambda.values().iter().map(|&l| 1.0 - (-l).exp()).collect();
    Ok(StepFunction::new(
        lambda.breakpoints().to_vec(),
        values,
        ContinuitySide::Right,
        0.0,
        RightExtension::LastValue,
    )?
    .with_monotonicity(Monotonicity::Nondecreasing)?)
}

/// The baseline processes of one sample at a fixed `beta`, bundled for
/// downstream estimators.
#[derive(Debug, Clone)]
pub struct BaselineProcesses<'a> {
    sample: &'a SurvivalSample,
    beta: Vec<f64>,
    pub lambda_n: StepFunction,
    pub f_n: StepFunction,
}

impl<'a> BaselineProcesses<'a> {
    pub fn compute(sample: &'a SurvivalSample, beta: &[f64]) -> Result<Self, BreslowError> {
        let lambda_n = breslow_lambda(sample, beta)?;
        let f_n = breslow_f(sample, beta)?;
        Ok(Self { sample, beta: beta.to_vec(), lambda_n, f_n })
    }

    pub fn beta_used(&self) -> &[f64] {
        &self.beta
    }

    pub fn phi(&self, x: f64) -> f64 {
        phi_n(self.sample, &self.beta, x).expect("beta validated at construction")
    }

    pub fn w(&self, x: f64) -> f64 {
        w_n(self.sample, &self.beta, x).expect("beta validated at construction")
    }

    pub fn v(&self, x: f64) -> f64 {
        v_n(self.sample, x)
    }

    pub fn y(&self, x: f64) -> f64 {
        y_n(self.sample, x)
    }
}
