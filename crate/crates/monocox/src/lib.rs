//! Shape-constrained estimation of the baseline hazard and baseline density
//! in the proportional hazards model with right-censored data.
//!
//! The crate provides:
//!
//! * [`survival`] — validated right-censored samples and CSV ingestion;
//! * [`cox`] — maximum partial likelihood estimation of the regression
//!   coefficients;
//! * [`breslow`] — the empirical baseline processes and the Breslow
//!   estimators of the cumulative hazard and distribution function;
//! * [`minorant`] — greatest convex minorant / least concave majorant
//!   geometry with left-derivative extraction;
//! * [`estimators`] — the constrained MLE and slope-of-envelope estimators
//!   of a monotone baseline hazard, the slope-of-envelope estimator of a
//!   nonincreasing baseline density, their inverse processes, and the
//!   quadratic-time max-min dual used as an exact oracle;
//! * [`lab`] — reproducible data generators, the limit-law sampler, the
//!   cube-root scaling constants, and a Monte Carlo experiment runner.
//!
//! Monte Carlo work is data-parallel via rayon when the default `parallel`
//! feature is enabled; disabling it yields a rayon-free sequential build
//! with bitwise-identical results. `MONOCOX_THREADS` caps the worker count.

// Validation sites use `!(a < b)`-style comparisons deliberately: unlike the
// suggested rewrites they reject NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod breslow;
pub mod cox;
pub mod estimators;
pub mod lab;
pub mod minorant;
pub mod stepfn;
pub mod survival;

pub use breslow::{breslow_f, breslow_lambda, phi_n, v_n, w_n, y_n, BaselineProcesses};
pub use cox::{fit_beta, log_partial_likelihood, CoxFit, CoxOptions};
pub use estimators::{
    grenander_density, grenander_hazard, inverse_process, maxmin_oracle, npmle_hazard,
    InverseKind, InverseProcessValue, Method, MonotoneEstimate, Shape, Target,
};
pub use minorant::{gcm, gcm_of_function, lcm, lcm_of_function, CumSumDiagram, HullResult};
pub use stepfn::{ContinuitySide, Monotonicity, RightExtension, StepFunction};
pub use survival::{CsvSchema, SurvivalSample};
