//! Eye Aspect Ratio from six ordered eye landmarks.

use serde::{Deserialize, Serialize};

use super::SignalError;

/// A landmark in normalized image coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

/// Six landmarks of one eye.
///
/// Ordering: `p1` outer corner, `p2`/`p3` upper lid, `p4` inner corner,
/// `p5`/`p6` lower lid, with `p6` opposite `p2` and `p5` opposite `p3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EyeLandmarks {
    pub points: [Point2; 6],
}

impl EyeLandmarks {
    pub const fn new(points: [Point2; 6]) -> Self {
        Self { points }
    }

    /// `n` is the 1-based landmark index.
    pub fn p(&self, n: usize) -> Point2 {
        self.points[n - 1]
    }

    /// Horizontal eye width, `|p1 - p4|`.
    pub fn width(&self) -> f64 {
        self.p(1).distance(self.p(4))
    }
}

/// Dimensionless EAR value, always non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ratio(f64);

impl Ratio {
    pub fn new(value: f64) -> Result<Self, SignalError> {
        if value.is_finite() && value >= 0.0 {
            Ok(Self(value))
        } else {
            Err(SignalError::InvalidRatio(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Ratio of summed vertical lid distances to twice the eye width.
pub fn compute_ear(eye: &EyeLandmarks) -> Result<Ratio, SignalError> {
    let width = eye.width();
    if !width.is_finite() || width <= 0.0 {
        return Err(SignalError::DegenerateEye);
    }
    let vertical = eye.p(2).distance(eye.p(6)) + eye.p(3).distance(eye.p(5));
    if !vertical.is_finite() {
        return Err(SignalError::DegenerateEye);
    }
    Ok(Ratio(vertical / (2.0 * width)))
}
