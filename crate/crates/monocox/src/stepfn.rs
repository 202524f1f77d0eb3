//! Piecewise-constant functions with an explicit continuity convention.
//!
//! A [`StepFunction`] carries its breakpoints, one value per breakpoint, the
//! side on which the function is continuous, a value for the region left of
//! the first breakpoint and a policy for evaluation beyond the last one.
//!
//! The two continuity conventions pair values with intervals as follows
//! (`b` are breakpoints, `v` values):
//!
//! * right-continuous: `v[i]` holds on `[b[i], b[i+1])`; `f(x) =
//!   left_extension` for `x < b[0]`.
//! * left-continuous: `v[i]` holds on `(b[i-1], b[i]]`; `f(x) =
//!   left_extension` for `x <= b[0]` (so for a well-formed function
//!   `v[0]` coincides with the left extension).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StepFnError {
    #[error("step function needs at least one breakpoint")]
    Empty,
    #[error("breakpoints and values must have equal length ({breakpoints} vs {values})")]
    LengthMismatch { breakpoints: usize, values: usize },
    #[error("breakpoints must be strictly increasing and finite (offending index {0})")]
    NotIncreasing(usize),
    #[error("values must be finite (offending index {0})")]
    NonFiniteValue(usize),
    #[error("evaluation at {x} is beyond the last breakpoint and no right extension is defined")]
    BeyondDomain { x: f64 },
    #[error("values are not {0:?} as declared")]
    MonotonicityViolated(Monotonicity),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContinuitySide {
    #[serde(rename = "left")]
    Left,
    #[serde(rename = "right")]
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RightExtension {
    /// The function keeps its last value on `(b_last, inf)`.
    #[serde(rename = "last")]
    LastValue,
    /// Evaluation beyond the last breakpoint is a domain error.
    #[serde(rename = "undefined")]
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monotonicity {
    #[serde(rename = "nondecreasing")]
    Nondecreasing,
    #[serde(rename = "nonincreasing")]
    Nonincreasing,
}

/// A finite-breakpoint step function on the real line.
///
/// Deserialization funnels through the same validation as the constructor,
/// so a decoded function upholds the invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStepFunction")]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    side: ContinuitySide,
    left_extension: f64,
    right_extension: RightExtension,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    monotonicity: Option<Monotonicity>,
}

#[derive(Deserialize)]
struct RawStepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    side: ContinuitySide,
    left_extension: f64,
    right_extension: RightExtension,
    #[serde(default)]
    monotonicity: Option<Monotonicity>,
}

impl TryFrom<RawStepFunction> for StepFunction {
    type Error = StepFnError;

    fn try_from(raw: RawStepFunction) -> Result<Self, StepFnError> {
        let f = StepFunction::new(
            raw.breakpoints,
            raw.values,
            raw.side,
            raw.left_extension,
            raw.right_extension,
        )?;
        match raw.monotonicity {
            Some(m) => f.with_monotonicity(m),
            None => Ok(f),
        }
    }
}

impl StepFunction {
    pub fn new(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        side: ContinuitySide,
        left_extension: f64,
        right_extension: RightExtension,
    ) -> Result<Self, StepFnError> {
        if breakpoints.is_empty() {
            return Err(StepFnError::Empty);
        }
        if breakpoints.len() != values.len() {
            return Err(StepFnError::LengthMismatch {
                breakpoints: breakpoints.len(),
                values: values.len(),
            });
        }
        for (i, w) in breakpoints.windows(2).enumerate() {
            if !(w[0] < w[1]) {
                return Err(StepFnError::NotIncreasing(i + 1));
            }
        }
        if !breakpoints[0].is_finite() || !breakpoints[breakpoints.len() - 1].is_finite() {
            return Err(StepFnError::NotIncreasing(0));
        }
        if let Some(i) = values.iter().position(|v|!v.is_finite()) {
            return Err(StepFnError::NonFiniteValue(i));
        }
        if !left_extension.is_finite() {
            return Err(StepFnError::NonFiniteValue(0));
        }
        Ok(Self {
            breakpoints,
            values,
            side,
            left_extension,
            right_extension,
            monotonicity: None,
        })
    }

    /// Tag the function with a monotonicity claim, verifying it against the
    /// stored values (left extension included on the nondecreasing side it
    /// borders).
    pub fn with_monotonicity(mut self, m: Monotonicity) -> Result<Self, StepFnError> {
        let ok = match m {
            Monotonicity::Nondecreasing => {
                self.values.windows(2).all(|w| w[0] <= w[1])
                    && self.left_extension <= self.values[0]
            }
            Monotonicity::Nonincreasing => {
                self.values.windows(2).all(|w| w[0] >= w[1])
                    && self.left_extension >= self.values[0]
            }
        };
        if !ok {
            return Err(StepFnError::MonotonicityViolated(m));
        }
        self.monotonicity = Some(m);
        Ok(self)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn side(&self) -> ContinuitySide {
        self.side
    }

    pub fn left_extension(&self) -> f64 {
        self.left_extension
    }

    pub fn right_extension(&self) -> RightExtension {
        self.right_extension
    }

    pub fn monotonicity(&self) -> Option<Monotonicity> {
        self.monotonicity
    }

    pub fn first_breakpoint(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn last_breakpoint(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1]
    }

    pub fn last_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Evaluate at `x`, honoring the continuity side exactly at breakpoints.
    pub fn evaluate(&self, x: f64) -> Result<f64, StepFnError> {
        let b = &self.breakpoints;
        let last = b.len() - 1;
        match self.side {
            ContinuitySide::Right => {
                if x < b[0] {
                    return Ok(self.left_extension);
                }
                if x > b[last] && self.right_extension == RightExtension::Undefined {
                    return Err(StepFnError::BeyondDomain { x });
                }
                // Largest i with b[i] <= x.
                let i = b.partition_point(|&t| t <= x) - 1;
                Ok(self.values[i])
            }
            ContinuitySide::Left => {
                if x <= b[0] {
                    return Ok(self.left_extension);
                }
                if x > b[last] {
                    return match self.right_extension {
                        RightExtension::LastValue => Ok(self.values[last]),
                        RightExtension::Undefined => Err(StepFnError::BeyondDomain { x }),
                    };
                }
                // Smallest i with b[i] >= x; values[i] covers (b[i-1], b[i]].
                let i = b.partition_point(|&t| t < x);
                Ok(self.values[i])
            }
        }
    }

    /// Evaluate with the right extension forced to the last value, used by
    /// plotting paths that clamp instead of failing beyond the domain.
    pub fn evaluate_clamped(&self, x: f64) -> f64 {
        let mut clamped = self.clone();
        clamped.right_extension = RightExtension::LastValue;
        clamped.evaluate(x).expect("clamped evaluation is total")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("step function serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(side: ContinuitySide) -> StepFunction {
        StepFunction::new(vec![1.0, 2.0], vec![5.0, 7.0], side, -3.0, RightExtension::LastValue)
            .unwrap()
    }

    #[test]
    fn right_continuous_convention() {
        let f = toy(ContinuitySide::Right);
        assert_eq!(f.evaluate(1.0).unwrap(), 5.0);
        assert_eq!(f.evaluate(2.0).unwrap(), 7.0);
        assert_eq!(f.evaluate(1.5).unwrap(), 5.0);
        assert_eq!(f.evaluate(0.5).unwrap(), -3.0);
        assert_eq!(f.evaluate(9.0).unwrap(), 7.0);
    }

    #[test]
    fn left_continuous_convention() {
        let f = toy(ContinuitySide::Left);
        assert_eq!(f.evaluate(1.0).unwrap(), -3.0); // left extension at the first breakpoint
        assert_eq!(f.evaluate(2.0).unwrap(), 7.0);
        assert_eq!(f.evaluate(1.5).unwrap(), 7.0);
        assert_eq!(f.evaluate(0.0).unwrap(), -3.0);
    }

    #[test]
    fn undefined_right_extension_errors() {
        let f = StepFunction::new(
            vec![1.0, 2.0],
            vec![5.0, 7.0],
            ContinuitySide::Right,
            0.0,
            RightExtension::Undefined,
        )
        .unwrap();
        assert_eq!(f.evaluate(2.0).unwrap(), 7.0);
        assert!(matches!(f.evaluate(2.1), Err(StepFnError::BeyondDomain { .. })));
        assert_eq!(f.evaluate_clamped(2.1), 7.0);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(matches!(
            StepFunction::new(vec![], vec![], ContinuitySide::Right, 0.0, RightExtension::LastValue),
            Err(StepFnError::Empty)
        ));
        assert!(matches!(
            StepFunction::new(
                vec![1.0, 1.0],
                vec![0.0, 0.0],
                ContinuitySide::Right,
                0.0,
                RightExtension::LastValue
            ),
            Err(StepFnError::NotIncreasing(1))
        ));
        assert!(matches!(
            StepFunction::new(
                vec![1.0],
                vec![f64::NAN],
                ContinuitySide::Right,
                0.0,
                RightExtension::LastValue
            ),
            Err(StepFnError::NonFiniteValue(0))
        ));
    }

    #[test]
    fn monotonicity_tagging() {
        let f = StepFunction::new(
            vec![1.0, 2.0],
            vec![1.0, 2.0],
            ContinuitySide::Right,
            0.0,
            RightExtension::LastValue,
        )
        .unwrap();
        let f = f.with_monotonicity(Monotonicity::Nondecreasing).unwrap();
        assert_eq!(f.monotonicity(), Some(Monotonicity::Nondecreasing));
        let g = StepFunction::new(
            vec![1.0, 2.0],
            vec![2.0, 1.0],
            ContinuitySide::Right,
            0.0,
            RightExtension::LastValue,
        )
        .unwrap();
        assert!(g.with_monotonicity(Monotonicity::Nondecreasing).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = toy(ContinuitySide::Right);
        let s = f.to_json();
        assert!(s.contains("\"side\":\"right\""));
        assert!(s.contains("\"right_extension\":\"last\""));
        let g = StepFunction::from_json(&s).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn deserialization_validates_invariants() {
        let bad = r#"{"breakpoints":[2.0,1.0],"values":[0.0,0.0],"side":"right",
                      "left_extension":0.0,"right_extension":"last"}"#;
        assert!(StepFunction::from_json(bad).is_err());
        let bad_mono = r#"{"breakpoints":[1.0,2.0],"values":[3.0,1.0],"side":"right",
                           "left_extension":0.0,"right_extension":"last",
                           "monotonicity":"nondecreasing"}"#;
        assert!(StepFunction::from_json(bad_mono).is_err());
    }
}
