//! Small 2-D geometry helpers shared by the grid, pipeline and simulator.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// A point or vector in grid coordinates, millimetres.
///
/// Serializes as a `[x, y]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector pointing at `deg` degrees from the x-axis.
    pub fn from_angle_deg(deg: f64) -> Self {
        let r = deg.to_radians();
        Self::new(r.cos(), r.sin())
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Self::new(self.x / n, self.y / n)
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn rotated_deg(self, deg: f64) -> Self {
        let (s, c) = deg.to_radians().sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn lerp(self, other: Point2, t: f64) -> Self {
        self + (other - self) * t
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self::new(x, y)
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

/// Folds a line orientation in degrees into (-90, 90].
pub fn wrap_line_angle_deg(deg: f64) -> f64 {
    let mut a = deg % 180.0;
    if a <= -90.0 {
        a += 180.0;
    } else if a > 90.0 {
        a -= 180.0;
    }
    a
}

/// Smallest angle between two line orientations, degrees in [0, 90].
pub fn line_angle_difference_deg(a: f64, b: f64) -> f64 {
    wrap_line_angle_deg(a - b).abs()
}

/// Rigid 2-D transform: `p' = R(rotation_deg) * p + translation`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2 {
    pub translation: Point2,
    pub rotation_deg: f64,
}

impl Pose2 {
    pub const IDENTITY: Pose2 = Pose2 {
        translation: Point2::ORIGIN,
        rotation_deg: 0.0,
    };

    pub fn new(x: f64, y: f64, rotation_deg: f64) -> Self {
        Self {
            translation: Point2::new(x, y),
            rotation_deg,
        }
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        p.rotated_deg(self.rotation_deg) + self.translation
    }

    pub fn inverse(&self) -> Pose2 {
        Pose2 {
            translation: (self.translation * -1.0).rotated_deg(-self.rotation_deg),
            rotation_deg: -self.rotation_deg,
        }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Pose2) -> Pose2 {
        Pose2 {
            translation: self.apply(other.translation),
            rotation_deg: self.rotation_deg + other.rotation_deg,
        }
    }
}
