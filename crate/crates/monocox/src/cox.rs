//! Maximum partial likelihood estimation of the Cox regression coefficients.
//!
//! Newton iterations on the log partial likelihood with exact analytic
//! gradient and Hessian, a halving line search, and the Breslow convention
//! for ties (the risk set at an event time contains every subject with a
//! follow-up time greater than or equal to it).

use crate::survival::SurvivalSample;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CoxError {
    #[error("beta has length {found}, sample has p = {expected}")]
    DimensionMismatch { found: usize, expected: usize },
    #[error("sample has no events")]
    NoEvents,
    #[error("sample is empty")]
    EmptySample,
    #[error("p must be at least 1 to fit")]
    NoCovariates,
    #[error("no finite maximizer: the partial likelihood is monotone in beta")]
    NoFiniteMaximizer,
    #[error("Hessian is singular even after regularization")]
    SingularHessian,
    #[error("line search failed to produce an increase")]
    LineSearchFailed,
}

/// Solver options. Defaults: tolerance `1e-8` on the gradient sup-norm,
/// 50 iterations, start at zero, declare divergence past `|beta| > 50`.
#[derive(Debug, Clone)]
pub struct CoxOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub initial_beta: Option<Vec<f64>>,
    pub divergence_bound: f64,
}

impl Default for CoxOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 50,
            initial_beta: None,
            divergence_bound: 50.0,
        }
    }
}

/// Result of a partial-likelihood fit.
#[derive(Debug, Clone, Serialize)]
pub struct CoxFit {
    #[serde(rename = "beta")]
    pub beta_hat: Vec<f64>,
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip)]
    pub gradient_norm: f64,
    /// Set when the likelihood is flat (constant covariate column): the fit
    /// is a valid degenerate maximizer at the initial beta.
    #[serde(skip)]
    pub flat: bool,
}

impl CoxFit {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cox fit serializes")
    }
}

struct Derivatives {
    loglik: f64,
    gradient: Vec<f64>,
    hessian: DMatrix<f64>,
}

/// Log partial likelihood at `beta`, Breslow tie convention, guarded by a
/// max-shift of the exponents.
pub fn log_partial_likelihood(sample: &SurvivalSample, beta: &[f64]) -> Result<f64, CoxError> {
    Ok(derivatives(sample, beta, false)?.loglik)
}

/// Analytic gradient of the log partial likelihood at `beta`.
pub fn partial_likelihood_gradient(
    sample: &SurvivalSample,
    beta: &[f64],
) -> Result<Vec<f64>, CoxError> {
    Ok(derivatives(sample, beta, true)?.gradient)
}

/// Analytic Hessian of the log partial likelihood at `beta` (negative
/// semidefinite everywhere by concavity).
pub fn partial_likelihood_hessian(
    sample: &SurvivalSample,
    beta: &[f64],
) -> Result<DMatrix<f64>, CoxError> {
    Ok(derivatives(sample, beta, true)?.hessian)
}

fn derivatives(sample: &SurvivalSample, beta: &[f64], with_derivs: bool) -> Result<Derivatives, CoxError> {
    let n = sample.n();
    let p = sample.p();
    if n == 0 {
        return Err(CoxError::EmptySample);
    }
    if beta.len() != p {
        return Err(CoxError::DimensionMismatch { found: beta.len(), expected: p });
    }

    let dot = |i: usize| -> f64 {
        sample
            .covariates_of(i)
            .iter()
            .zip(beta)
            .map(|(z, b)| z * b)
            .sum()
    };
    // Global max-shift keeps every risk-set sum of exponentials bounded by n.
    let shift = (0..n).map(dot).fold(f64::NEG_INFINITY, f64::max);
    let shift = if shift.is_finite() { shift } else { 0.0 };

    let order = sample.sort_view();
    let mut loglik = 0.0;
    let mut gradient = vec![0.0; p];
    let mut hessian: DMatrix<f64> = DMatrix::zeros(p, p);

    // Walk times in descending order, accumulating the risk-set sums
    // S0 = sum e^{b'z}, S1 = sum z e^{b'z}, S2 = sum zz' e^{b'z}; process all
    // members of a tie group before its events so risk sets include ties.
    let mut s0 = 0.0;
    let mut s1 = vec![0.0; p];
    let mut s2: DMatrix<f64> = DMatrix::zeros(p, p);
    let mut k = n;
    while k > 0 {
        let mut g = k;
        let t = sample.time(order[k - 1]);
        while g > 0 && sample.time(order[g - 1]) == t {
            g -= 1;
        }
        for &idx in &order[g..k] {
            let e = (dot(idx) - shift).exp();
            s0 += e;
            if with_derivs {
                let z = sample.covariates_of(idx);
                for a in 0..p {
                    s1[a] += z[a] * e;
                    for b in 0..p {
                        s2[(a, b)] += z[a] * z[b] * e;
                    }
                }
            }
        }
        for &idx in &order[g..k] {
            if !sample.is_event(idx) {
                continue;
            }
            let z = sample.covariates_of(idx);
            let bz: f64 = z.iter().zip(beta).map(|(zi, bi)| zi * bi).sum();
            loglik += bz - (shift + s0.ln());
            if with_derivs {
                for a in 0..p {
                    gradient[a] += z[a] - s1[a] / s0;
                    for b in 0..p {
                        hessian[(a, b)] -= s2[(a, b)] / s0 - (s1[a] / s0) * (s1[b] / s0);
                    }
                }
            }
        }
        k = g;
    }
    Ok(Derivatives { loglik, gradient, hessian })
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn euclid_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Fit the regression coefficients by Newton iterations on the partial
/// loglikelihood.
///
/// A gradient that already vanishes at the initial point with a vanishing
/// Hessian is reported as a converged `flat` fit (constant covariate
/// column). Diverging iterates with a non-vanishing gradient are a
/// monotone-likelihood error.
pub fn fit_beta(sample: &SurvivalSample, options: &CoxOptions) -> Result<CoxFit, CoxError> {
    let p = sample.p();
    if p == 0 {
        return Err(CoxError::NoCovariates);
    }
    if sample.event_count() == 0 {
        return Err(CoxError::NoEvents);
    }
    let mut beta = options
        .initial_beta
        .clone()
        .unwrap_or_else(|| vec![0.0; p]);
    if beta.len() != p {
        return Err(CoxError::DimensionMismatch { found: beta.len(), expected: p });
    }

    let mut d = derivatives(sample, &beta, true)?;
    let mut grad_norm = sup_norm(&d.gradient);
    if grad_norm <= options.tolerance {
        let flat = d.hessian.iter().all(|h| h.abs() <= 1e-10);
        return Ok(CoxFit {
            beta_hat: beta,
            loglik: d.loglik,
            iterations: 0,
            converged: true,
            gradient_norm: grad_norm,
            flat,
        });
    }

    for iter in 1..=options.max_iterations {
        // Solve (-H) step = gradient; -H is PSD by concavity.
        let neg_h = -&d.hessian;
        let g = DVector::from_column_slice(&d.gradient);
        let step = match neg_h.clone().cholesky() {
            Some(ch) => ch.solve(&g),
            None => {
                let scale = neg_h.diagonal().amax().max(1.0);
                let ridge = &neg_h + DMatrix::identity(p, p) * (1e-8 * scale);
                ridge.cholesky().ok_or(CoxError::SingularHessian)?.solve(&g)
            }
        };

        // Halving line search against non-increase. Near the optimum a
        // genuine Newton gain falls below one ulp of the loglikelihood, so
        // accept anything within rounding noise of the current value.
        let noise = 1e-11 * (1.0 + d.loglik.abs());
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let candidate: Vec<f64> = beta
                .iter()
                .zip(step.iter())
                .map(|(b, s)| b + scale * s)
                .collect();
            let trial = derivatives(sample, &candidate, true)?;
            if trial.loglik >= d.loglik - noise {
                accepted = Some((candidate, trial));
                break;
            }
            scale *= 0.5;
        }
        let (candidate, trial) = accepted.ok_or(CoxError::LineSearchFailed)?;
        let step_norm = scale * step.amax();
        beta = candidate;
        d = trial;
        grad_norm = sup_norm(&d.gradient);

        // A monotone likelihood also drives the gradient to zero along its
        // divergent path, so convergence additionally requires the Newton
        // step itself to have died out.
        let step_tol = 1e-5 * (1.0 + sup_norm(&beta));
        if grad_norm <= options.tolerance && step_norm <= step_tol {
            // Gradient, step and curvature all underflowing after genuine
            // iterations means the likelihood flattened out toward the
            // boundary rather than peaking at an interior point.
            if d.hessian.amax() <= 1e-10 {
                return Err(CoxError::NoFiniteMaximizer);
            }
            return Ok(CoxFit {
                beta_hat: beta,
                loglik: d.loglik,
                iterations: iter,
                converged: true,
                gradient_norm: grad_norm,
                flat: false,
            });
        }
        if euclid_norm(&beta) > options.divergence_bound {
            return Err(CoxError::NoFiniteMaximizer);
        }
    }
    Ok(CoxFit {
        beta_hat: beta,
        loglik: d.loglik,
        iterations: options.max_iterations,
        converged: false,
        gradient_norm: grad_norm,
        flat: false,
    })
}
