//! Planes, reflections and plane/circle intersection.
//!
//! Everything here is a pure function of its inputs. Planes are stored with a
//! unit normal so that two representations of the same point set compare the
//! same way regardless of how the caller scaled the normal.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold on `|(m2-m1)x(m3-m1)|` (scaled by the squared spread of
/// the points) below which three points count as colinear.
pub const COLINEAR_EPS: f64 = 1e-12;

/// Relative band on the plane-circle discriminant, `|disc| <= TANGENCY_EPS * r^2`,
/// inside which a plane is reported tangent to a circle.
pub const TANGENCY_EPS: f64 = 1e-9;

/// Two unit normals are parallel when `|n1 . n2| >= 1 - PARALLEL_EPS`.
pub const PARALLEL_EPS: f64 = 1e-12;

/// The plane `normal . (x - point) = 0`, with `normal` of unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PlaneRepr", into = "PlaneRepr")]
pub struct Plane {
    normal: Vector3<f64>,
    point: Vector3<f64>,
}

#[derive(Serialize, Deserialize)]
struct PlaneRepr {
    normal: [f64; 3],
    point: [f64; 3],
}

impl TryFrom<PlaneRepr> for Plane {
    type Error = Error;

    fn try_from(r: PlaneRepr) -> Result<Self> {
        Plane::new(Vector3::from(r.normal), Vector3::from(r.point))
    }
}

impl From<Plane> for PlaneRepr {
    fn from(p: Plane) -> Self {
        PlaneRepr {
            normal: p.normal.into(),
            point: p.point.into(),
        }
    }
}

impl Plane {
    /// Builds a plane from any nonzero normal; the normal is normalized.
    pub fn new(normal: Vector3<f64>, point: Vector3<f64>) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0) || !n.is_finite() || !point.iter().all(|c| c.is_finite()) {
            return Err(Error::DegenerateNormal);
        }
        Ok(Plane {
            normal: normal / n,
            point,
        })
    }

    /// The horizontal plane `z = height`.
    pub fn horizontal(height: f64) -> Self {
        Plane {
            normal: Vector3::z(),
            point: Vector3::new(0.0, 0.0, height),
        }
    }

    pub fn normal(&self) -> Vector3<f64> {
        self.normal
    }

    pub fn point(&self) -> Vector3<f64> {
        self.point
    }

    /// Signed distance from `x` to the plane along the unit normal.
    pub fn signed_distance(&self, x: &Vector3<f64>) -> f64 {
        self.normal.dot(&(x - self.point))
    }

    pub fn contains(&self, x: &Vector3<f64>, tol: f64) -> bool {
        self.signed_distance(x).abs() <= tol
    }

    /// Set equality: parallel unit normals and mutual point containment.
    pub fn same_as(&self, other: &Plane, tol: f64) -> bool {
        self.normal.dot(&other.normal).abs() >= 1.0 - PARALLEL_EPS
            && self.contains(&other.point, tol)
            && other.contains(&self.point, tol)
    }

    /// Reflection of a point across the plane.
    pub fn reflect(&self, a: &Vector3<f64>) -> Vector3<f64> {
        reflect_point(self, a)
    }
}

/// `a - 2 (N.(a-q)) N` for the unit normal `N` and point `q` of `plane`.
pub fn reflect_point(plane: &Plane, a: &Vector3<f64>) -> Vector3<f64> {
    a - 2.0 * plane.signed_distance(a) * plane.normal
}

/// Reflection across the parallel plane through the origin, i.e. the linear
/// part of a plane reflection. Used for free vectors such as normals.
pub fn reflect_vector(normal: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    v - 2.0 * normal.dot(v) / normal.norm_squared() * normal
}

/// The plane through three midjoints with normal `(m2-m1) x (m3-m1)`.
pub fn plane_through_midjoints(m1: &Vector3<f64>, m2: &Vector3<f64>, m3: &Vector3<f64>) -> Result<Plane> {
    let cross = (m2 - m1).cross(&(m3 - m1));
    let scale = (m2 - m1).norm().max((m3 - m1).norm()).max((m3 - m2).norm());
    // points that coincide up to roundoff must not pass as a tiny triangle
    let floor = 1e-6 * m1.norm().max(m2.norm()).max(m3.norm());
    let threshold = COLINEAR_EPS * scale.max(floor).powi(2);
    let cross_norm = cross.norm();
    if !(cross_norm > threshold) {
        return Err(Error::Colinear { cross_norm, threshold });
    }
    Plane::new(cross, *m1)
}

/// A circle in space: points `x` with `axis.(x-center) = 0` and `|x-center| = radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle3D {
    center: Vector3<f64>,
    radius: f64,
    axis: Vector3<f64>,
}

impl Circle3D {
    pub fn new(center: Vector3<f64>, radius: f64, axis: Vector3<f64>) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("circle radius must be positive, got {radius}")));
        }
        let n = axis.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::DegenerateNormal);
        }
        Ok(Circle3D {
            center,
            radius,
            axis: axis / n,
        })
    }

    pub fn center(&self) -> Vector3<f64> {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn axis(&self) -> Vector3<f64> {
        self.axis
    }

    /// The plane that carries the circle.
    pub fn plane(&self) -> Plane {
        Plane {
            normal: self.axis,
            point: self.center,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntersectionKind {
    Empty,
    Tangent,
    TwoPoints,
    WholeCircle,
}

/// Line-of-intersection data for a non-parallel plane/circle pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectionLine {
    /// Orthogonal projection of the plane's point onto the intersection line.
    pub point: Vector3<f64>,
    /// Unit direction `(N x N_i) / |N x N_i|`.
    pub direction: Vector3<f64>,
    /// `point - circle center`.
    pub offset: Vector3<f64>,
}

/// Result of intersecting a plane with a circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleIntersection {
    pub kind: IntersectionKind,
    /// 0, 1 or 2 points. The root `q - (d + sqrt(disc)) v` comes first.
    pub points: Vec<Vector3<f64>>,
    /// `(v.offset)^2 - (|offset|^2 - r^2)`; zero for the parallel cases.
    pub discriminant: f64,
    /// `None` when the plane is parallel to the circle's plane.
    pub line: Option<IntersectionLine>,
}

impl CircleIntersection {
    fn parallel(kind: IntersectionKind) -> Self {
        CircleIntersection {
            kind,
            points: Vec::new(),
            discriminant: 0.0,
            line: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.kind == IntersectionKind::Empty
    }
}

/// Intersects a plane with a circle.
///
/// Non-parallel planes meet the circle's plane in a line `q_i + t v`; the
/// points on it at distance `r` from the center are `q_i - (v.d +- sqrt(disc)) v`
/// with `d = q_i - center`. Parallel planes either coincide with the circle
/// plane (the whole circle) or miss it.
pub fn intersect_plane_circle(plane: &Plane, circle: &Circle3D) -> CircleIntersection {
    let n = plane.normal;
    let axis = circle.axis;
    let r2 = circle.radius * circle.radius;

    if n.dot(&axis).abs() >= 1.0 - PARALLEL_EPS {
        let gap = plane.signed_distance(&circle.center);
        let kind = if gap.abs() <= TANGENCY_EPS * circle.radius {
            IntersectionKind::WholeCircle
        } else {
            IntersectionKind::Empty
        };
        return CircleIntersection::parallel(kind);
    }

    let nu = n.cross(&axis);
    let nu_hat = nu / nu.norm();
    // In-plane direction orthogonal to the line; moves q onto the circle plane.
    let across = n.cross(&nu_hat);
    let q = plane.point;
    let q_i = q - axis.dot(&(q - circle.center)) / axis.dot(&across) * across;
    let delta = q_i - circle.center;
    let along = nu_hat.dot(&delta);
    let disc = along * along - (delta.norm_squared() - r2);
    let line = Some(IntersectionLine {
        point: q_i,
        direction: nu_hat,
        offset: delta,
    });

    let (kind, points) = if disc.abs() <= TANGENCY_EPS * r2 {
        (IntersectionKind::Tangent, vec![q_i - along * nu_hat])
    } else if disc > 0.0 {
        let s = disc.sqrt();
        (
            IntersectionKind::TwoPoints,
            vec![q_i - (along + s) * nu_hat, q_i - (along - s) * nu_hat],
        )
    } else {
        (IntersectionKind::Empty, Vec::new())
    };

    CircleIntersection {
        kind,
        points,
        discriminant: disc,
        line,
    }
}
