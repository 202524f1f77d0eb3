//! Shape-constrained estimators of the baseline hazard and density: the
//! constrained maximum likelihood estimators (slopes of the convex minorant
//! or concave majorant of a cumulative sum diagram) and the corresponding
//! slope-of-envelope estimators built on the Breslow estimator, together
//! with their inverse processes and the quadratic-time max-min dual used as
//! an exact oracle.

use crate::breslow::{breslow_f, breslow_lambda, BreslowError};
use crate::cox::{fit_beta, CoxError, CoxFit, CoxOptions};
use crate::minorant::{gcm_of_function, lcm_of_function, MinorantError};
use crate::stepfn::{ContinuitySide, Monotonicity, RightExtension, StepFnError, StepFunction};
use crate::survival::SurvivalSample;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EstimatorError {
    #[error("sample has no events")]
    NoEvents,
    #[error("the nondecreasing estimator needs at least two distinct follow-up times")]
    NotEnoughData,
    #[error("beta has length {found}, sample has p = {expected}")]
    DimensionMismatch { found: usize, expected: usize },
    #[error("interval index {index} out of range (have {count})")]
    InvalidIndex { index: usize, count: usize },
    #[error("level a must be positive, got {0}")]
    NonPositiveLevel(f64),
    #[error("density estimation is only defined for the nonincreasing shape")]
    DensityShapeUnsupported,
    #[error("events at time zero make the nonincreasing diagram degenerate")]
    DegenerateSample,
    #[error("evaluation at {x} is outside the estimate's domain (ends at {domain_end})")]
    OutsideDomain { x: f64, domain_end: f64 },
    #[error(transparent)]
    Cox(#[from] CoxError),
    #[error(transparent)]
    Breslow(#[from] BreslowError),
    #[error(transparent)]
    Minorant(#[from] MinorantError),
    #[error(transparent)]
    StepFn(#[from] StepFnError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Npmle,
    Grenander,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Hazard,
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Nondecreasing,
    Nonincreasing,
}

/// A monotone step-function estimate with its provenance.
///
/// Every estimate lives on `[0, T_(n)]`; the value at or beyond the domain
/// end is deliberately left undefined (any value on the monotone side of the
/// last one is a maximizer there), so evaluation fails rather than guessing.
/// For the nondecreasing constrained MLE the undefined region starts *at*
/// `T_(n)`; the left-continuous estimates are still defined at `T_(n)`
/// itself.
#[derive(Debug, Clone, Serialize)]
pub struct MonotoneEstimate {
    pub estimate: StepFunction,
    pub method: Method,
    pub target: Target,
    pub shape: Shape,
    pub beta_used: Vec<f64>,
    pub domain_end: f64,
    defined_at_domain_end: bool,
}

impl MonotoneEstimate {
    pub fn evaluate(&self, x: f64) -> Result<f64, EstimatorError> {
        let beyond = if self.defined_at_domain_end { x > self.domain_end } else { x >= self.domain_end };
        if beyond {
            return Err(EstimatorError::OutsideDomain { x, domain_end: self.domain_end });
        }
        Ok(self.estimate.evaluate(x)?)
    }

    /// Clamp-to-last-value evaluation for plotting (`--extend=last`).
    pub fn evaluate_extended(&self, x: f64) -> f64 {
        self.estimate.evaluate_clamped(x)
    }

    /// `(interval_start, interval_end, value)` rows covering `(0, T_(n))`,
    /// or `(0, T_(n)]` for the left-continuous variants.
    pub fn intervals(&self) -> Vec<(f64, f64, f64)> {
        let b = self.estimate.breakpoints();
        let v = self.estimate.values();
        let mut rows = Vec::new();
        match self.estimate.side() {
            ContinuitySide::Right => {
                if b[0] > 0.0 {
                    rows.push((0.0, b[0], self.estimate.left_extension()));
                }
                for i in 0..b.len() {
                    let end = if i + 1 < b.len() { b[i + 1] } else { self.domain_end };
                    rows.push((b[i], end, v[i]));
                }
            }
            ContinuitySide::Left => {
                let mut start = 0.0;
                for i in 0..b.len() {
                    rows.push((start, b[i], v[i]));
                    start = b[i];
                }
            }
        }
        rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseProcessValue {
    /// Slope level `a`.
    pub level: f64,
    /// Supremum of the extremizing times.
    pub location: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseKind {
    NpmleHazard,
    GrenanderHazard,
    GrenanderDensity,
}

/// Sorted-view working arrays shared by the diagram builders.
struct SortedData {
    t: Vec<f64>,
    delta: Vec<bool>,
    /// Suffix sums of e^{beta' z} in sorted order; suffix[k] covers
    /// positions k..n.
    suffix: Vec<f64>,
    /// prefix_events[k] = number of events among sorted positions 0..k.
    prefix_events: Vec<usize>,
    /// First sorted position sharing the time at position k.
    group_start: Vec<usize>,
    /// One past the last sorted position sharing the time at position k.
    group_end: Vec<usize>,
}

impl SortedData {
    fn build(sample: &SurvivalSample, beta: &[f64]) -> Result<Self, EstimatorError> {
        if beta.len() != sample.p() {
            return Err(EstimatorError::DimensionMismatch { found: beta.len(), expected: sample.p() });
        }
        let order = sample.sort_view();
        let n = sample.n();
        let t: Vec<f64> = order.iter().map(|&i| sample.time(i)).collect();
        let delta: Vec<bool> = order.iter().map(|&i| sample.is_event(i)).collect();
        let mut suffix = vec![0.0; n + 1];
        for k in (0..n).rev() {
            let i = order[k];
            let bz: f64 = sample
                .covariates_of(i)
                .iter()
                .zip(beta)
                .map(|(z, b)| z * b)
                .sum();
            suffix[k] = suffix[k + 1] + bz.exp();
        }
        let mut prefix_events = vec![0usize; n + 1];
        for k in 0..n {
            prefix_events[k + 1] = prefix_events[k] + usize::from(delta[k]);
        }
        let mut group_start = vec![0usize; n];
        let mut group_end = vec![0usize; n];
        let mut k = 0;
        while k < n {
            let mut e = k;
            while e < n && t[e] == t[k] {
                e += 1;
            }
            for j in k..e {
                group_start[j] = k;
                group_end[j] = e;
            }
            k = e;
        }
        Ok(Self { t, delta, suffix, prefix_events, group_start, group_end })
    }

    fn n(&self) -> usize {
        self.t.len()
    }

    /// Events strictly before t[k] (tie-aware), divided by n.
    fn v_at(&self, k: usize) -> f64 {
        self.prefix_events[self.group_start[k]] as f64 / self.n() as f64
    }

    /// Events at or before t[k] (tie-aware), divided by n.
    fn y_at(&self, k: usize) -> f64 {
        self.prefix_events[self.group_end[k]] as f64 / self.n() as f64
    }
}

/// Diagram with each point tagged by the follow-up time it represents;
/// consecutive points with a tied x-coordinate are merged. The per-index
/// increments are kept alongside so hull-segment slopes can be computed as
/// pooled ratios of direct window sums (differencing the cumulative
/// coordinates instead would lose precision on narrow, steep segments).
struct TaggedDiagram {
    points: Vec<(f64, f64)>,
    times: Vec<f64>,
    /// Diagram position of each original index (0 = origin).
    position_of: Vec<usize>,
    /// x-increment of original index j (1-based; slot j-1).
    dx: Vec<f64>,
    /// y-increment of original index j (1-based; slot j-1).
    dy: Vec<f64>,
}

impl TaggedDiagram {
    /// Left slope at each original index: the pooled ratio of the hull
    /// segment containing its diagram point. Indices collapsed onto the
    /// origin get `placeholder`.
    fn hull_slopes_per_index(&self, concave: bool, placeholder: f64) -> Vec<f64> {
        let hull = if concave {
            crate::minorant::upper_hull_indices(&self.points)
        } else {
            crate::minorant::lower_hull_indices(&self.points)
        };
        let m = self.position_of.len() - 1;
        let mut slopes = vec![placeholder; m];
        let mut j = 1usize;
        while j <= m && self.position_of[j] == 0 {
            j += 1;
        }
        for seg in hull.windows(2) {
            let end = seg[1];
            let start_j = j;
            let mut sum_dx = 0.0;
            let mut sum_dy = 0.0;
            while j <= m && self.position_of[j] <= end {
                sum_dx += self.dx[j - 1];
                sum_dy += self.dy[j - 1];
                j += 1;
            }
            if start_j == j {
                continue;
            }
            let slope = sum_dy / sum_dx;
            for slot in &mut slopes[start_j - 1..j - 1] {
                *slot = slope;
            }
        }
        slopes
    }
}

/// Cumulative sum diagram of the nondecreasing-hazard MLE: `P_0 = (0, 0)`,
/// `P_j = (W_n(beta, T_(j+1)) - W_n(beta, T_(1)), V_n(T_(j+1)))` for
/// `j = 1..n-1`. `position_of[j]` maps the 1-based sorted index `j`
/// (0 = origin).
fn increasing_diagram(data: &SortedData) -> Result<TaggedDiagram, EstimatorError> {
    let n = data.n();
    let nf = n as f64;
    let mut points = vec![(0.0, 0.0)];
    let mut times = vec![data.t[0]];
    let mut position_of = vec![0usize];
    let mut dx = Vec::with_capacity(n - 1);
    let mut dy = Vec::with_capacity(n - 1);
    let mut x = 0.0;
    let mut prev_events = data.prefix_events[data.group_start[0]];
    for j in 1..n {
        let step_x = (data.t[j] - data.t[j - 1]) * data.suffix[j] / nf;
        let events = data.prefix_events[data.group_start[j]];
        dx.push(step_x);
        dy.push((events - prev_events) as f64 / nf);
        prev_events = events;
        x += step_x;
        let y = data.v_at(j);
        if data.t[j] == data.t[j - 1] {
            // Tied follow-up times collapse onto the previous point.
            position_of.push(*position_of.last().unwrap());
            continue;
        }
        points.push((x, y));
        times.push(data.t[j]);
        position_of.push(points.len() - 1);
    }
    Ok(TaggedDiagram { points, times, position_of, dx, dy })
}

/// Cumulative sum diagram of the nonincreasing-hazard MLE: `P_0 = (0, 0)`,
/// `P_j = (W_n(beta, T_(j)), Y_n(T_(j)))` for `j = 1..n`. The origin is
/// tagged with time zero.
fn decreasing_diagram(data: &SortedData) -> Result<TaggedDiagram, EstimatorError> {
    let n = data.n();
    let nf = n as f64;
    let mut points = vec![(0.0, 0.0)];
    let mut times = vec![0.0];
    let mut position_of = vec![0usize];
    let mut dx = Vec::with_capacity(n);
    let mut dy = Vec::with_capacity(n);
    let mut x = 0.0;
    let mut prev_events = 0usize;
    for j in 0..n {
        let prev = if j == 0 { 0.0 } else { data.t[j - 1] };
        let step_x = (data.t[j] - prev) * data.suffix[j] / nf;
        let events = data.prefix_events[data.group_end[j]];
        dx.push(step_x);
        dy.push((events - prev_events) as f64 / nf);
        prev_events = events;
        x += step_x;
        let y = data.y_at(j);
        if data.t[j] == prev {
            if j == 0 {
                // An event exactly at time zero cannot be charged to any
                // interval of positive length.
                if y > 0.0 {
                    return Err(EstimatorError::DegenerateSample);
                }
                position_of.push(0);
                continue;
            }
            position_of.push(*position_of.last().unwrap());
            continue;
        }
        points.push((x, y));
        times.push(data.t[j]);
        position_of.push(points.len() - 1);
    }
    Ok(TaggedDiagram { points, times, position_of, dx, dy })
}

fn compress_right_continuous(
    starts: &[f64],
    values: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let mut b = Vec::new();
    let mut v = Vec::new();
    for i in 0..starts.len() {
        if i + 1 < starts.len() && starts[i] == starts[i + 1] {
            continue; // empty interval
        }
        if let Some(&last) = v.last() {
            if last == values[i] {
                continue;
            }
        }
        b.push(starts[i]);
        v.push(values[i]);
    }
    (b, v)
}

fn compress_left_continuous(ends: &[f64], values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut b: Vec<f64> = Vec::new();
    let mut v: Vec<f64> = Vec::new();
    for i in 0..ends.len() {
        if i > 0 && ends[i] == ends[i - 1] {
            continue; // empty interval (tied times); the run end advances below
        }
        if let (Some(last_v), Some(last_b)) = (v.last().copied(), b.last_mut()) {
            if last_v == values[i] {
                *last_b = ends[i]; // extend the run to the new right endpoint
                continue;
            }
        }
        b.push(ends[i]);
        v.push(values[i]);
    }
    (b, v)
}

/// Constrained maximum likelihood estimator of a monotone baseline hazard
/// for a fixed `beta`.
///
/// Nondecreasing: zero on `[0, T_(1))`, the convex-minorant slope on
/// `[T_(i), T_(i+1))`, undefined from `T_(n)` on. Nonincreasing: the
/// concave-majorant slope on `(T_(i-1), T_(i)]`, undefined past `T_(n)`.
pub fn npmle_hazard(
    sample: &SurvivalSample,
    beta: &[f64],
    shape: Shape,
) -> Result<MonotoneEstimate, EstimatorError> {
    if sample.event_count() == 0 {
        return Err(EstimatorError::NoEvents);
    }
    let data = SortedData::build(sample, beta)?;
    let n = data.n();
    match shape {
        Shape::Nondecreasing => {
            if n < 2 || data.t[0] == data.t[n - 1] {
                return Err(EstimatorError::NotEnoughData);
            }
            let diagram = increasing_diagram(&data)?;
            let slopes = diagram.hull_slopes_per_index(false, 0.0);
            // slope for interval [t[i-1], t[i]) = left slope at P_i.
            let mut starts = Vec::with_capacity(n - 1);
            let mut values = Vec::with_capacity(n - 1);
            for i in 1..n {
                if diagram.position_of[i] == 0 {
                    // Tied with T_(1): the interval is empty; skip.
                    continue;
                }
                starts.push(data.t[i - 1]);
                values.push(slopes[i - 1]);
            }
            let (b, v) = compress_right_continuous(&starts, &values);
            let estimate = StepFunction::new(b, v, ContinuitySide::Right, 0.0, RightExtension::LastValue)?
                .with_monotonicity(Monotonicity::Nondecreasing)?;
            Ok(MonotoneEstimate {
                estimate,
                method: Method::Npmle,
                target: Target::Hazard,
                shape,
                beta_used: beta.to_vec(),
                domain_end: data.t[n - 1],
                defined_at_domain_end: false,
            })
        }
        Shape::Nonincreasing => {
            let diagram = decreasing_diagram(&data)?;
            let slopes = diagram.hull_slopes_per_index(true, f64::INFINITY);
            // slope for interval (prev, t[i-1]] = left slope at P_i.
            let mut ends = Vec::with_capacity(n);
            let mut values = Vec::with_capacity(n);
            for i in 1..=n {
                if diagram.position_of[i] == 0 {
                    // Censored exactly at time zero: the interval is empty.
                    continue;
                }
                ends.push(data.t[i - 1]);
                values.push(slopes[i - 1]);
            }
            let (b, v) = compress_left_continuous(&ends, &values);
            let first = v[0];
            let estimate = StepFunction::new(b, v, ContinuitySide::Left, first, RightExtension::Undefined)?
                .with_monotonicity(Monotonicity::Nonincreasing)?;
            Ok(MonotoneEstimate {
                estimate,
                method: Method::Npmle,
                target: Target::Hazard,
                shape,
                beta_used: beta.to_vec(),
                domain_end: data.t[n - 1],
                defined_at_domain_end: true,
            })
        }
    }
}

/// Direct quadratic-time evaluation of the isotonic dual for the slope on
/// interval index `k` (0-based: interval `[T_(k+1), T_(k+2))` when
/// nondecreasing, `(T_(k), T_(k+1)]` when nonincreasing).
///
/// For the nondecreasing shape this is the classical
/// `max_{s <= i} min_{t >= i}` ratio of pooled events to pooled weighted
/// gaps; the nonincreasing dual swaps the roles of the two indices
/// (`min_{s <= i} max_{t >= i}`), which is the expression solved by the
/// concave-majorant slopes. Tied follow-up times are not supported here.
pub fn maxmin_oracle(
    sample: &SurvivalSample,
    beta: &[f64],
    shape: Shape,
    k: usize,
) -> Result<f64, EstimatorError> {
    let data = SortedData::build(sample, beta)?;
    let n = data.n();
    let nf = n as f64;
    match shape {
        Shape::Nondecreasing => {
            let count = n.saturating_sub(1);
            if k >= count {
                return Err(EstimatorError::InvalidIndex { index: k, count });
            }
            // weights w[j] = (T_(j+2) - T_(j+1)) * suffix(j+2), 0-based j.
            let w: Vec<f64> = (0..count)
                .map(|j| (data.t[j + 1] - data.t[j]) * data.suffix[j + 1] / nf)
                .collect();
            let d: Vec<f64> = (0..count).map(|j| if data.delta[j] { 1.0 / nf } else { 0.0 }).collect();
            let mut best = f64::NEG_INFINITY;
            for s in 0..=k {
                let mut num = d[s..=k].iter().sum::<f64>();
                let mut den = w[s..=k].iter().sum::<f64>();
                let mut inner = num / den;
                for t in k + 1..count {
                    num += d[t];
                    den += w[t];
                    inner = inner.min(num / den);
                }
                best = best.max(inner);
            }
            Ok(best)
        }
        Shape::Nonincreasing => {
            if k >= n {
                return Err(EstimatorError::InvalidIndex { index: k, count: n });
            }
            let w: Vec<f64> = (0..n)
                .map(|j| {
                    let prev = if j == 0 { 0.0 } else { data.t[j - 1] };
                    (data.t[j] - prev) * data.suffix[j] / nf
                })
                .collect();
            let d: Vec<f64> = (0..n).map(|j| if data.delta[j] { 1.0 / nf } else { 0.0 }).collect();
            let mut best = f64::INFINITY;
            for s in 0..=k {
                let mut num = d[s..=k].iter().sum::<f64>();
                let mut den = w[s..=k].iter().sum::<f64>();
                let mut inner = num / den;
                for t in k + 1..n {
                    num += d[t];
                    den += w[t];
                    inner = inner.max(num / den);
                }
                best = best.min(inner);
            }
            Ok(best)
        }
    }
}

/// Slope-of-envelope estimator of a monotone baseline hazard: the left
/// derivative of the convex minorant (nondecreasing) or concave majorant
/// (nonincreasing) of the Breslow estimator over `[0, T_(n)]`.
pub fn grenander_hazard(
    sample: &SurvivalSample,
    beta: &[f64],
    shape: Shape,
) -> Result<MonotoneEstimate, EstimatorError> {
    let lambda = breslow_lambda(sample, beta)?;
    let end = sample.max_time().ok_or(EstimatorError::NoEvents)?;
    let hull = match shape {
        Shape::Nondecreasing => gcm_of_function(&lambda, 0.0, end)?,
        Shape::Nonincreasing => lcm_of_function(&lambda, 0.0, end)?,
    };
    let mono = match shape {
        Shape::Nondecreasing => Monotonicity::Nondecreasing,
        Shape::Nonincreasing => Monotonicity::Nonincreasing,
    };
    Ok(MonotoneEstimate {
        estimate: hull.left_derivative.with_monotonicity(mono)?,
        method: Method::Grenander,
        target: Target::Hazard,
        shape,
        beta_used: beta.to_vec(),
        domain_end: end,
        defined_at_domain_end: true,
    })
}

/// Slope-of-envelope estimator of a nonincreasing baseline density: the left
/// derivative of the concave majorant of `F_n = 1 - exp(-Lambda_n)` over
/// `[0, T_(n)]`.
pub fn grenander_density(
    sample: &SurvivalSample,
    beta: &[f64],
) -> Result<MonotoneEstimate, EstimatorError> {
    let f = breslow_f(sample, beta)?;
    let end = sample.max_time().ok_or(EstimatorError::NoEvents)?;
    let hull = lcm_of_function(&f, 0.0, end)?;
    Ok(MonotoneEstimate {
        estimate: hull
            .left_derivative
            .with_monotonicity(Monotonicity::Nonincreasing)?,
        method: Method::Grenander,
        target: Target::Density,
        shape: Shape::Nonincreasing,
        beta_used: beta.to_vec(),
        domain_end: end,
        defined_at_domain_end: true,
    })
}

/// Each estimator takes the regression coefficients explicitly; these
/// wrappers plug in the maximum partial likelihood estimate first.
pub fn npmle_hazard_fitted(
    sample: &SurvivalSample,
    shape: Shape,
) -> Result<(CoxFit, MonotoneEstimate), EstimatorError> {
    let fit = fit_beta(sample, &CoxOptions::default())?;
    let est = npmle_hazard(sample, &fit.beta_hat, shape)?;
    Ok((fit, est))
}

pub fn grenander_hazard_fitted(
    sample: &SurvivalSample,
    shape: Shape,
) -> Result<(CoxFit, MonotoneEstimate), EstimatorError> {
    let fit = fit_beta(sample, &CoxOptions::default())?;
    let est = grenander_hazard(sample, &fit.beta_hat, shape)?;
    Ok((fit, est))
}

pub fn grenander_density_fitted(
    sample: &SurvivalSample,
) -> Result<(CoxFit, MonotoneEstimate), EstimatorError> {
    let fit = fit_beta(sample, &CoxOptions::default())?;
    let est = grenander_density(sample, &fit.beta_hat)?;
    Ok((fit, est))
}

/// Inverse process of an estimator at level `a > 0`: the supremum of the
/// extremizing times of the associated objective.
///
/// * constrained MLE, nondecreasing: `argmin` over `[T_(1), T_(n)]` of
///   `V_n(x) - a (W_n(beta, x) - W_n(beta, T_(1)))`;
/// * envelope estimator, nondecreasing: `argmin` over `[0, T_(n)]` of
///   `Lambda_n(x) - a x`;
/// * nonincreasing variants use `argmax` of the same objectives;
/// * density: `argmax` over `[0, T_(n)]` of `F_n(x) - a x`.
///
/// Each objective attains its extremum on the abscissas of the estimator's
/// own diagram, so evaluation is restricted to that finite candidate set;
/// this is what makes the threshold/location switching exact in finite
/// samples.
pub fn inverse_process(
    sample: &SurvivalSample,
    beta: &[f64],
    kind: InverseKind,
    shape: Shape,
    a: f64,
) -> Result<InverseProcessValue, EstimatorError> {
    if !(a > 0.0) {
        return Err(EstimatorError::NonPositiveLevel(a));
    }
    let candidates: Vec<(f64, f64)> = match kind {
        InverseKind::NpmleHazard => {
            let data = SortedData::build(sample, beta)?;
            if data.n() == 0 {
                return Err(EstimatorError::NotEnoughData);
            }
            let diagram = match shape {
                Shape::Nondecreasing => increasing_diagram(&data)?,
                Shape::Nonincreasing => decreasing_diagram(&data)?,
            };
            diagram
                .times
                .iter()
                .zip(&diagram.points)
                .map(|(&time, &(x, y))| (time, y - a * x))
                .collect()
        }
        InverseKind::GrenanderHazard | InverseKind::GrenanderDensity => {
            if kind == InverseKind::GrenanderDensity && shape != Shape::Nonincreasing {
                return Err(EstimatorError::DensityShapeUnsupported);
            }
            let f = if kind == InverseKind::GrenanderDensity {
                breslow_f(sample, beta)?
            } else {
                breslow_lambda(sample, beta)?
            };
            let end = sample.max_time().ok_or(EstimatorError::NoEvents)?;
            let mut xs = vec![0.0];
            xs.extend(f.breakpoints().iter().copied().filter(|&b| b > 0.0 && b < end));
            xs.push(end);
            xs.iter()
                .map(|&x| {
                    let y = f.evaluate(x).expect("total on [0, end]");
                    (x, y - a * x)
                })
                .collect()
        }
    };
    let minimize = shape == Shape::Nondecreasing && kind != InverseKind::GrenanderDensity;
    let mut best = candidates[0];
    for &(time, value) in &candidates[1..] {
        let better = if minimize { value <= best.1 } else { value >= best.1 };
        if better {
            best = (time, value);
        }
    }
    Ok(InverseProcessValue { level: a, location: best.0 })
}

/// The reduced loglikelihood of a nondecreasing candidate hazard, evaluated
/// literally on the per-interval values `[T_(i), T_(i+1))`, dropping the
/// final follow-up term. Returns negative infinity when an event interval
/// carries a nonpositive value.
pub fn pseudo_loglikelihood_nondecreasing(
    sample: &SurvivalSample,
    beta: &[f64],
    interval_values: &[f64],
) -> Result<f64, EstimatorError> {
    let data = SortedData::build(sample, beta)?;
    let n = data.n();
    if n < 2 {
        return Err(EstimatorError::NotEnoughData);
    }
    if interval_values.len() != n - 1 {
        return Err(EstimatorError::InvalidIndex { index: interval_values.len(), count: n - 1 });
    }
    let mut total = 0.0;
    for (i, &lambda) in interval_values.iter().enumerate() {
        let weight = (data.t[i + 1] - data.t[i]) * data.suffix[i + 1];
        if data.delta[i] {
            if lambda <= 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            total += lambda.ln();
        }
        total -= lambda * weight;
    }
    Ok(total)
}

/// Per-interval slopes of the nondecreasing MLE, aligned with
/// [`pseudo_loglikelihood_nondecreasing`] and [`maxmin_oracle`] indexing.
pub fn npmle_interval_slopes(
    sample: &SurvivalSample,
    beta: &[f64],
    shape: Shape,
) -> Result<Vec<f64>, EstimatorError> {
    let data = SortedData::build(sample, beta)?;
    let n = data.n();
    match shape {
        Shape::Nondecreasing => {
            if n < 2 || data.t[0] == data.t[n - 1] {
                return Err(EstimatorError::NotEnoughData);
            }
            Ok(increasing_diagram(&data)?.hull_slopes_per_index(false, 0.0))
        }
        Shape::Nonincreasing => {
            Ok(decreasing_diagram(&data)?.hull_slopes_per_index(true, f64::INFINITY))
        }
    }
}
