//! Greatest convex minorant / least concave majorant of a finite point
//! diagram, with left-derivative extraction.
//!
//! The hull pass is a single monotone stack sweep over the x-sorted points,
//! O(m). Collinear points stay on the vertex list (strict turn test), which
//! keeps degenerate diagrams stable and does not affect the slopes.

use crate::stepfn::{ContinuitySide, RightExtension, StepFunction};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MinorantError {
    #[error("diagram needs at least one point")]
    Empty,
    #[error("diagram x-coordinates must be strictly increasing (offending index {0})")]
    NotIncreasing(usize),
    #[error("diagram coordinates must be finite (offending index {0})")]
    NonFinite(usize),
    #[error("empty domain [{a}, {b}]")]
    EmptyDomain { a: f64, b: f64 },
    #[error("step function error: {0}")]
    StepFn(#[from] crate::stepfn::StepFnError),
}

/// Ordered planar points `P_0, ..., P_m` feeding the hull engine. The first
/// point plays the role of the origin; callers usually supply `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CumSumDiagram {
    points: Vec<(f64, f64)>,
}

impl CumSumDiagram {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, MinorantError> {
        if points.is_empty() {
            return Err(MinorantError::Empty);
        }
        for (i, &(x, y)) in points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(MinorantError::NonFinite(i));
            }
            if i > 0 && !(points[i - 1].0 < x) {
                return Err(MinorantError::NotIncreasing(i));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Hull of a diagram: the vertex sub-list plus one left slope per non-origin
/// diagram point.
#[derive(Debug, Clone, PartialEq)]
pub struct HullResult {
    pub vertices: Vec<(f64, f64)>,
    pub left_slopes: Vec<f64>,
}

impl HullResult {
    /// Value of the piecewise-linear hull at `x` (clamped to the hull's
    /// x-range).
    pub fn interpolate(&self, x: f64) -> f64 {
        interpolate_vertices(&self.vertices, x)
    }
}

fn cross(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

pub(crate) fn lower_hull_indices(points: &[(f64, f64)]) -> Vec<usize> {
    lower_hull(points)
}

pub(crate) fn upper_hull_indices(points: &[(f64, f64)]) -> Vec<usize> {
    let reflected: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x, -y)).collect();
    lower_hull(&reflected)
}

fn lower_hull(points: &[(f64, f64)]) -> Vec<usize> {
    let mut stack: Vec<usize> = Vec::with_capacity(points.len());
    for (i, &p) in points.iter().enumerate() {
        while stack.len() >= 2 {
            let a = points[stack[stack.len() - 2]];
            let b = points[stack[stack.len() - 1]];
            // Pop only on a strict right turn; collinear stays.
            if cross(a, b, p) < 0.0 {
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(i);
    }
    stack
}

fn slopes_from_hull(points: &[(f64, f64)], hull: &[usize]) -> Vec<f64> {
    // left_slopes[i-1] = slope of the hull segment covering (x_{i-1}, x_i].
    let mut slopes = Vec::with_capacity(points.len().saturating_sub(1));
    let mut seg = 0usize; // hull segment [hull[seg], hull[seg+1]]
    for i in 1..points.len() {
        while seg + 1 < hull.len() && hull[seg + 1] < i {
            seg += 1;
        }
        let a = points[hull[seg]];
        let b = points[hull[seg + 1]];
        slopes.push((b.1 - a.1) / (b.0 - a.0));
    }
    slopes
}

/// Greatest convex minorant of the diagram. `left_slopes[i-1]` is the left
/// derivative of the minorant at the i-th non-origin point; the slopes are
/// nondecreasing.
pub fn gcm(diagram: &CumSumDiagram) -> HullResult {
    let hull = lower_hull(&diagram.points);
    let left_slopes = slopes_from_hull(&diagram.points, &hull);
    HullResult {
        vertices: hull.iter().map(|&i| diagram.points[i]).collect(),
        left_slopes,
    }
}

/// Least concave majorant, the mirror of [`gcm`] under `y -> -y`; slopes come
/// out nonincreasing.
pub fn lcm(diagram: &CumSumDiagram) -> HullResult {
    let reflected: Vec<(f64, f64)> = diagram.points.iter().map(|&(x, y)| (x, -y)).collect();
    let hull = lower_hull(&reflected);
    let left_slopes: Vec<f64> = slopes_from_hull(&reflected, &hull)
        .into_iter()
        .map(|s| -s)
        .collect();
    HullResult {
        vertices: hull.iter().map(|&i| diagram.points[i]).collect(),
        left_slopes,
    }
}

/// Hull of the graph of a step function over a closed interval: the
/// piecewise-linear envelope plus its left-derivative step function.
#[derive(Debug, Clone)]
pub struct FunctionHull {
    /// Vertices of the envelope (minorant or majorant), starting at the
    /// anchor `(a, f(a))`.
    pub vertices: Vec<(f64, f64)>,
    /// Left derivative of the envelope, a left-continuous step function on
    /// `(a, b]`; evaluation beyond `b` is a domain error.
    pub left_derivative: StepFunction,
}

impl FunctionHull {
    pub fn envelope_at(&self, x: f64) -> f64 {
        interpolate_vertices(&self.vertices, x)
    }
}

fn interpolate_vertices(v: &[(f64, f64)], x: f64) -> f64 {
    if x <= v[0].0 {
        return v[0].1;
    }
    if x >= v[v.len() - 1].0 {
        return v[v.len() - 1].1;
    }
    let j = v.partition_point(|&(vx, _)| vx < x);
    let (x0, y0) = v[j - 1];
    let (x1, y1) = v[j];
    y0 + (y1 - y0) / (x1 - x0) * (x - x0)
}

fn function_diagram(
    f: &StepFunction,
    a: f64,
    b: f64,
) -> Result<Vec<(f64, f64)>, MinorantError> {
    if !(a < b) {
        return Err(MinorantError::EmptyDomain { a, b });
    }
    let mut pts = vec![(a, f.evaluate(a)?)];
    for &bp in f.breakpoints() {
        if bp > a && bp < b {
            pts.push((bp, f.evaluate(bp)?));
        }
    }
    pts.push((b, f.evaluate(b)?));
    Ok(pts)
}

fn hull_of_function(
    f: &StepFunction,
    a: f64,
    b: f64,
    concave: bool,
) -> Result<FunctionHull, MinorantError> {
    let diagram = CumSumDiagram::new(function_diagram(f, a, b)?)?;
    let hull = if concave { lcm(&diagram) } else { gcm(&diagram) };
    let verts = &hull.vertices;
    let (breakpoints, values): (Vec<f64>, Vec<f64>) = if verts.len() == 1 {
        // Degenerate single-point domain; constant zero derivative at b.
        (vec![b], vec![0.0])
    } else {
        verts
            .windows(2)
            .map(|w| (w[1].0, (w[1].1 - w[0].1) / (w[1].0 - w[0].0)))
            .unzip()
    };
    let first = values[0];
    let left_derivative = StepFunction::new(
        breakpoints,
        values,
        ContinuitySide::Left,
        first,
        RightExtension::Undefined,
    )?;
    Ok(FunctionHull { vertices: hull.vertices, left_derivative })
}

/// Greatest convex minorant of a right-continuous step function over
/// `[a, b]`. The diagram anchors at `(a, f(a))`, runs through `(b_i, f(b_i))`
/// at every interior breakpoint, and closes at `(b, f(b))`; this is the
/// classical construction for the convex-minorant slope estimator of a
/// cumulative hazard.
pub fn gcm_of_function(f: &StepFunction, a: f64, b: f64) -> Result<FunctionHull, MinorantError> {
    hull_of_function(f, a, b, false)
}

/// Least concave majorant of a step function over `[a, b]`; mirror of
/// [`gcm_of_function`].
pub fn lcm_of_function(f: &StepFunction, a: f64, b: f64) -> Result<FunctionHull, MinorantError> {
    hull_of_function(f, a, b, true)
}
