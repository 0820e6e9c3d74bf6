//! Unconstrained inverse kinematics.
//!
//! Every pointing goal is first turned into a midplane (or a family of
//! midplanes); a concrete midplane is then turned into midjoints by
//! intersecting it with the three midcircles.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{intersect_plane_circle, CircleIntersection, IntersectionKind, Plane};
use crate::model::{base_angle, BaseState, JointDesign, PointingMode};

/// Horizontal magnitude below which a unit direction counts as lying on the z-axis.
pub const AXIS_EPS: f64 = 1e-12;

/// A single midplane or a described infinite family of them.
#[derive(Debug, Clone, PartialEq)]
pub enum PlaneFamily {
    Single(Plane),
    /// Every plane through the origin.
    AllThroughOrigin,
    /// Every plane through a point.
    AllThroughPoint(Vector3<f64>),
    /// Every plane parallel to the z-axis, optionally restricted to those through a point.
    AllParallelToZ {
        through: Option<Vector3<f64>>,
    },
    /// Every plane containing a line.
    AllThroughLine {
        point: Vector3<f64>,
        direction: Vector3<f64>,
    },
    /// Every plane with the given unit normal.
    AllOrthogonalTo(Vector3<f64>),
}

impl PlaneFamily {
    pub fn single(&self) -> Option<&Plane> {
        match self {
            PlaneFamily::Single(p) => Some(p),
            _ => None,
        }
    }

    /// Whether `plane` is a member of the family, up to `tol` in position.
    pub fn contains(&self, plane: &Plane, tol: f64) -> bool {
        let n = plane.normal();
        let par = 1.0 - crate::geometry::PARALLEL_EPS;
        match self {
            PlaneFamily::Single(p) => p.same_as(plane, tol),
            PlaneFamily::AllThroughOrigin => plane.contains(&Vector3::zeros(), tol),
            PlaneFamily::AllThroughPoint(q) => plane.contains(q, tol),
            PlaneFamily::AllParallelToZ { through } => {
                n.z.abs() <= AXIS_EPS && through.is_none_or(|q| plane.contains(&q, tol))
            }
            PlaneFamily::AllThroughLine { point, direction } => {
                n.dot(direction).abs() <= AXIS_EPS && plane.contains(point, tol)
            }
            PlaneFamily::AllOrthogonalTo(m) => n.dot(m).abs() >= par,
        }
    }
}

/// Unit midplane normal for a requested distal normal, in the half-angle
/// form `sin(t/2) rho + cos(t/2) z` where `t` is the polar angle of `dir`.
/// Returns `None` when `dir` is `-z`, for which only vertical midplanes work.
pub fn half_angle_normal(dir: &Vector3<f64>) -> Option<Vector3<f64>> {
    let d = dir.normalize();
    let rho = d.x.hypot(d.y);
    if rho <= AXIS_EPS {
        return if d.z > 0.0 { Some(Vector3::z()) } else { None };
    }
    let half = 0.5 * rho.atan2(d.z);
    let (s, c) = half.sin_cos();
    Some(Vector3::new(s * d.x / rho, s * d.y / rho, c))
}

pub(crate) fn unit_direction(dir: &Vector3<f64>) -> Result<Vector3<f64>> {
    let n = dir.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Domain("direction must be a finite nonzero vector".into()));
    }
    Ok(dir / n)
}

/// Midplane(s) producing the given distal center: the perpendicular
/// bisector of the origin and `distal_center`, or every plane through the
/// origin when the distal center is the origin itself.
pub fn midplane_from_distal_center(distal_center: &Vector3<f64>) -> PlaneFamily {
    match Plane::new(*distal_center, 0.5 * distal_center) {
        Ok(p) => PlaneFamily::Single(p),
        Err(_) => PlaneFamily::AllThroughOrigin,
    }
}

/// The perpendicular bisector of `target` and `K = k_z z`, which reflects the
/// target onto the z-axis at `K`. `k_z` must be `<= 0` for forward pointing
/// and `>= 0` for backward pointing.
pub fn midplane_for_affine(target: &Vector3<f64>, k_z: f64, mode: PointingMode) -> Result<Plane> {
    if !k_z.is_finite() || !mode.on_target_side(k_z, 0.0) {
        return Err(Error::Domain(format!(
            "reflected point height {k_z} is on the wrong side of the base for {mode:?} pointing"
        )));
    }
    let k = Vector3::new(0.0, 0.0, k_z);
    let n = target - k;
    if n.norm() == 0.0 {
        return Err(Error::Degenerate);
    }
    Plane::new(n, 0.5 * (target + k))
}

/// Midplanes producing the given distal normal (for backward mode, the given
/// backward normal). Every plane orthogonal to `N_D + z` works, or every
/// plane parallel to `z` when `N_D = -z`.
pub fn midplane_for_direction(dir: &Vector3<f64>, mode: PointingMode) -> Result<PlaneFamily> {
    let d = mode.sign() * unit_direction(dir)?;
    Ok(match half_angle_normal(&d) {
        Some(n) => PlaneFamily::AllOrthogonalTo(n),
        None => PlaneFamily::AllParallelToZ { through: None },
    })
}

/// Infinite solution set: some midcircle lies entirely in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct InfiniteSolutions {
    /// Legs whose whole midcircle lies in the plane.
    pub free_legs: Vec<usize>,
    /// Finite intersections for the remaining legs (empty for free legs).
    pub fixed: [Vec<Vector3<f64>>; 3],
}

/// All ways of realizing a plane as a midplane.
#[derive(Debug, Clone, PartialEq)]
pub enum SolutionSet<T = [Vector3<f64>; 3]> {
    Empty,
    /// One to eight solutions ordered by root choice, leg 1 varying slowest.
    Finite(Vec<T>),
    Infinite(InfiniteSolutions),
}

impl<T> SolutionSet<T> {
    pub fn is_empty(&self) -> bool {
        match self {
            SolutionSet::Empty => true,
            SolutionSet::Finite(v) => v.is_empty(),
            SolutionSet::Infinite(_) => false,
        }
    }

    pub fn finite(&self) -> Option<&[T]> {
        match self {
            SolutionSet::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Keeps only the finite solutions accepted by `keep`. This is the hook
    /// for physical feasibility checks (joint limits, collisions).
    pub fn retain<F: FnMut(&T) -> bool>(self, keep: F) -> Self {
        match self {
            SolutionSet::Finite(mut v) => {
                v.retain(keep);
                if v.is_empty() {
                    SolutionSet::Empty
                } else {
                    SolutionSet::Finite(v)
                }
            }
            other => other,
        }
    }

    pub fn try_map<U, F: FnMut(T) -> Result<U>>(self, f: F) -> Result<SolutionSet<U>> {
        Ok(match self {
            SolutionSet::Empty => SolutionSet::Empty,
            SolutionSet::Finite(v) => SolutionSet::Finite(v.into_iter().map(f).collect::<Result<_>>()?),
            SolutionSet::Infinite(i) => SolutionSet::Infinite(i),
        })
    }
}

/// Intersections of `plane` with each of the three midcircles.
pub fn leg_intersections(design: &JointDesign, plane: &Plane) -> [CircleIntersection; 3] {
    [0, 1, 2].map(|i| intersect_plane_circle(plane, &design.midcircle(i)))
}

impl SolutionSet {
    /// Combines per-leg intersections into the Cartesian product.
    pub fn from_intersections(legs: &[CircleIntersection; 3]) -> Self {
        if legs.iter().any(CircleIntersection::is_empty) {
            return SolutionSet::Empty;
        }
        let free_legs: Vec<usize> = (0..3)
            .filter(|&i| legs[i].kind == IntersectionKind::WholeCircle)
            .collect();
        if !free_legs.is_empty() {
            return SolutionSet::Infinite(InfiniteSolutions {
                free_legs,
                fixed: [0, 1, 2].map(|i| legs[i].points.clone()),
            });
        }
        Self::product(&[&legs[0].points, &legs[1].points, &legs[2].points])
    }

    pub(crate) fn product(points: &[&Vec<Vector3<f64>>; 3]) -> Self {
        let mut out = Vec::with_capacity(8);
        for a in points[0] {
            for b in points[1] {
                for c in points[2] {
                    out.push([*a, *b, *c]);
                }
            }
        }
        if out.is_empty() {
            SolutionSet::Empty
        } else {
            SolutionSet::Finite(out)
        }
    }
}

/// Every midjoint triple lying on `plane` and on the midcircles.
pub fn solve_midjoints(design: &JointDesign, plane: &Plane) -> SolutionSet {
    SolutionSet::from_intersections(&leg_intersections(design, plane))
}

/// Converts midjoint triples to base angles.
pub fn midjoints_to_states(design: &JointDesign, set: SolutionSet) -> Result<SolutionSet<BaseState>> {
    set.try_map(|m| {
        let mut angles = [0.0; 3];
        for (i, a) in angles.iter_mut().enumerate() {
            *a = base_angle(design, i, &m[i])?;
        }
        Ok(BaseState::new(angles))
    })
}

/// [`solve_midjoints`] followed by conversion to base angles.
pub fn solve_base_states(design: &JointDesign, plane: &Plane) -> Result<SolutionSet<BaseState>> {
    midjoints_to_states(design, solve_midjoints(design, plane))
}
