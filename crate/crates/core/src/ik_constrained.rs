//! Inverse kinematics with midplanes forced through a prescribed point.
//!
//! Two situations produce such a constraint: a frozen midjoint (the plane
//! must contain the seized midjoint) and a plunge distance (the plane must
//! cross the z-axis at a given height).

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Circle3D, Plane, TANGENCY_EPS};
use crate::ik_core::{half_angle_normal, leg_intersections, unit_direction, PlaneFamily, SolutionSet, AXIS_EPS};
use crate::model::{midjoint_position, JointDesign, PointingMode};

/// Midplanes must contain this point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointConstraint {
    pub q: Vector3<f64>,
}

impl PointConstraint {
    pub fn new(q: Vector3<f64>) -> Self {
        PointConstraint { q }
    }
}

/// A midjoint whose base hinge has seized at `angle`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenMidjoint {
    leg: usize,
    angle: f64,
    position: Vector3<f64>,
}

impl FrozenMidjoint {
    pub fn new(design: &JointDesign, leg: usize, angle: f64) -> Result<Self> {
        if leg > 2 {
            return Err(Error::Domain(format!("leg index {leg} out of range")));
        }
        Ok(FrozenMidjoint {
            leg,
            angle,
            position: midjoint_position(design, leg, angle),
        })
    }

    pub fn leg(&self) -> usize {
        self.leg
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn position(&self) -> Vector3<f64> {
        self.position
    }

    pub fn as_point(&self) -> PointConstraint {
        PointConstraint::new(self.position)
    }
}

/// Height at which the midplane crosses the z-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlungeConstraint {
    Finite(f64),
    /// The midplane never meets the z-axis (it is vertical).
    Infinite,
}

impl PlungeConstraint {
    /// The joint center `c_J = p_d z`, or `None` for an infinite plunge.
    pub fn center(&self) -> Option<Vector3<f64>> {
        match *self {
            PlungeConstraint::Finite(p) => Some(Vector3::new(0.0, 0.0, p)),
            PlungeConstraint::Infinite => None,
        }
    }

    pub fn as_point(&self) -> Result<PointConstraint> {
        self.center().map(PointConstraint::new).ok_or(Error::InfinitePlunge)
    }
}

/// Any of the constraints that force midplanes through a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    Point(Vector3<f64>),
    Frozen(FrozenMidjoint),
    Plunge(PlungeConstraint),
}

impl Constraint {
    /// The point every midplane must contain.
    pub fn point(&self) -> Result<Vector3<f64>> {
        match self {
            Constraint::Point(q) => Ok(*q),
            Constraint::Frozen(f) => Ok(f.position()),
            Constraint::Plunge(p) => p.center().ok_or(Error::InfinitePlunge),
        }
    }
}

/// Which branch of the constrained solution was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstrainedCase {
    /// Target off the pointing half-axis: planes orthogonal to `T - K`.
    OffAxis,
    /// Target on the pointing half-axis: a family of planes plus maybe a horizontal one.
    OnAxis,
    /// Plunge constraint with `|T - c_J| >= |p_d|`.
    PlungeOuter,
    /// Plunge constraint with `|T - c_J| < |p_d|`.
    PlungeInner,
    /// Plunge constraint, target on the pointing half-axis.
    PlungeOnAxis,
    /// Infinite plunge: only the straight-down distal normal is reachable.
    InfinitePlunge,
}

/// Midplanes satisfying a point constraint and a pointing goal.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedSolution {
    pub case: ConstrainedCase,
    /// Concrete midplanes; each contains the constraint point.
    pub planes: Vec<Plane>,
    /// Reflected target on the z-axis, one per entry of `planes`.
    pub k_points: Vec<Vector3<f64>>,
    /// Infinite family of further solutions, if any.
    pub family: Option<PlaneFamily>,
    /// Whether the existence inequalities for a reflected point `K` hold.
    pub existence: bool,
}

impl ConstrainedSolution {
    pub fn is_infeasible(&self) -> bool {
        self.planes.is_empty() && self.family.is_none()
    }
}

fn on_pointing_half_axis(t: &Vector3<f64>, mode: PointingMode) -> bool {
    let scale = 1.0 + t.norm();
    t.x.hypot(t.y) <= AXIS_EPS * scale && mode.on_target_side(t.z, 0.0)
}

/// Existence test for a point `K` on the pointing half-axis with `|K - q| = |T - q|`.
fn k_exists(q: &Vector3<f64>, t: &Vector3<f64>, mode: PointingMode) -> bool {
    let r2 = (q - t).norm_squared();
    let h2 = q.x * q.x + q.y * q.y;
    // q on the same side as the half-axis: the nearest half-axis point is the
    // foot of the perpendicular; otherwise it is the origin.
    if mode.on_target_side(q.z, 0.0) {
        r2 >= h2
    } else {
        r2 >= q.norm_squared()
    }
}

/// Heights `k` on the z-axis at distance `|T - q|` from `q`, on the mode's side.
fn k_roots(q: &Vector3<f64>, t: &Vector3<f64>, mode: PointingMode) -> Vec<f64> {
    let r2 = (q - t).norm_squared();
    let disc = r2 - (q.x * q.x + q.y * q.y);
    if disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    let tol = 1e-12 * (1.0 + q.norm() + t.norm());
    let mut roots = vec![q.z - s];
    if s > tol {
        roots.push(q.z + s);
    }
    roots.retain(|&k| mode.on_target_side(k, tol));
    roots
}

/// Midplanes through `q` that point at `target`.
///
/// Off the pointing half-axis the midplane reflects the target to a point
/// `K` on that half-axis, equidistant from `q`, giving up to two planes
/// `(T - K).(x - q) = 0`. On the half-axis every plane through `q` and `T`
/// works, plus the horizontal plane through `q` when `q_z <= T_z / 2`
/// (`>=` for backward pointing).
pub fn constrained_affine_midplanes(
    q: &PointConstraint,
    target: &Vector3<f64>,
    mode: PointingMode,
) -> ConstrainedSolution {
    let q = q.q;
    let existence = k_exists(&q, target, mode);
    if on_pointing_half_axis(target, mode) {
        let family = match unit_direction(&(target - q)) {
            Ok(direction) => PlaneFamily::AllThroughLine { point: q, direction },
            Err(_) if q.norm() == 0.0 => PlaneFamily::AllThroughOrigin,
            Err(_) => PlaneFamily::AllThroughPoint(q),
        };
        let mut planes = Vec::new();
        let mut k_points = Vec::new();
        if mode.on_target_side(q.z - 0.5 * target.z, 0.0) {
            planes.push(Plane::new(Vector3::z(), q).expect("unit normal"));
            k_points.push(Vector3::new(0.0, 0.0, 2.0 * q.z - target.z));
        }
        return ConstrainedSolution {
            case: ConstrainedCase::OnAxis,
            planes,
            k_points,
            family: Some(family),
            existence,
        };
    }

    let mut planes = Vec::new();
    let mut k_points = Vec::new();
    for k in k_roots(&q, target, mode) {
        let kp = Vector3::new(0.0, 0.0, k);
        if let Ok(p) = Plane::new(target - kp, q) {
            planes.push(p);
            k_points.push(kp);
        }
    }
    ConstrainedSolution {
        case: ConstrainedCase::OffAxis,
        planes,
        k_points,
        family: None,
        existence,
    }
}

/// Midplane through `q` giving distal normal `dir` (backward normal in
/// backward mode): the plane `(z + N_D).(x - q) = 0`, or every vertical
/// plane through `q` when `N_D = -z`.
pub fn constrained_direction_midplane(
    q: &PointConstraint,
    dir: &Vector3<f64>,
    mode: PointingMode,
) -> Result<PlaneFamily> {
    let d = mode.sign() * unit_direction(dir)?;
    Ok(match half_angle_normal(&d) {
        Some(n) => PlaneFamily::Single(Plane::new(n, q.q)?),
        None => PlaneFamily::AllParallelToZ { through: Some(q.q) },
    })
}

/// What a frozen-midjoint solve is asked to achieve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Goal {
    AffineTarget(Vector3<f64>),
    Direction(Vector3<f64>),
}

/// Solutions of a frozen-midjoint pointing problem.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenSolution {
    /// Candidate midplanes with their nonempty solution sets; the frozen
    /// leg's entry of every solution is exactly the frozen midjoint.
    pub branches: Vec<(Plane, SolutionSet)>,
    /// A family of candidate midplanes that was not enumerated.
    pub family: Option<PlaneFamily>,
}

impl FrozenSolution {
    /// True when no configuration can reach the goal.
    pub fn is_unreachable(&self) -> bool {
        self.branches.is_empty() && self.family.is_none()
    }
}

fn pin_frozen_leg(design: &JointDesign, frozen: &FrozenMidjoint, plane: &Plane) -> SolutionSet {
    let legs = leg_intersections(design, plane);
    let f = frozen.leg;
    let m = frozen.position;
    let tol = TANGENCY_EPS * design.arm_length(f);
    if legs.iter().any(|x| x.is_empty()) {
        return SolutionSet::Empty;
    }
    let frozen_ok = legs[f].kind == crate::geometry::IntersectionKind::WholeCircle
        || legs[f].points.iter().any(|p| (p - m).norm() <= tol);
    if !frozen_ok {
        return SolutionSet::Empty;
    }
    let pinned = vec![m];
    let free_legs: Vec<usize> = (0..3)
        .filter(|&i| i != f && legs[i].kind == crate::geometry::IntersectionKind::WholeCircle)
        .collect();
    if free_legs.is_empty() {
        let pts: [&Vec<Vector3<f64>>; 3] = [0, 1, 2].map(|i| if i == f { &pinned } else { &legs[i].points });
        SolutionSet::product(&pts)
    } else {
        let mut fixed = [0, 1, 2].map(|i| legs[i].points.clone());
        fixed[f] = pinned;
        for &i in &free_legs {
            fixed[i].clear();
        }
        SolutionSet::Infinite(crate::ik_core::InfiniteSolutions { free_legs, fixed })
    }
}

/// Pointing with one seized midjoint: candidate midplanes come from the
/// point-constrained solvers with `q` at the frozen midjoint, and each is
/// solved for the two working legs. Branches with no solution are dropped.
pub fn frozen_solve(
    design: &JointDesign,
    frozen: &FrozenMidjoint,
    goal: Goal,
    mode: PointingMode,
) -> Result<FrozenSolution> {
    let q = frozen.as_point();
    let (planes, family) = match goal {
        Goal::AffineTarget(t) => {
            let c = constrained_affine_midplanes(&q, &t, mode);
            (c.planes, c.family)
        }
        Goal::Direction(d) => match constrained_direction_midplane(&q, &d, mode)? {
            PlaneFamily::Single(p) => (vec![p], None),
            fam => (Vec::new(), Some(fam)),
        },
    };
    let branches = planes
        .into_iter()
        .map(|p| (p, pin_frozen_leg(design, frozen, &p)))
        .filter(|(_, s)| !s.is_empty())
        .collect();
    Ok(FrozenSolution { branches, family })
}

/// Midplanes with plunge distance `p_d` that point at `target`.
///
/// With `c_J = p_d z` and `u = (T - c_J)/|T - c_J|`, the candidate planes
/// are `(z + u).(x - c_J) = 0` and `(z - u).(x - c_J) = 0`, reflecting the
/// target to `K = (p_d - |T - c_J|) z` and `(p_d + |T - c_J|) z`; a plane is
/// kept when its `K` lies on the pointing half-axis. An infinite plunge only
/// allows the straight-down normal, so only targets below the base plane
/// (above it when pointing backward) are reachable.
pub fn plunge_affine_midplanes(
    plunge: &PlungeConstraint,
    target: &Vector3<f64>,
    mode: PointingMode,
) -> ConstrainedSolution {
    let Some(c) = plunge.center() else {
        return infinite_plunge_affine(target, mode);
    };
    if on_pointing_half_axis(target, mode) {
        let mut sol = constrained_affine_midplanes(&PointConstraint::new(c), target, mode);
        sol.case = ConstrainedCase::PlungeOnAxis;
        // every plane through two distinct points of the z-axis contains the axis
        if let Some(PlaneFamily::AllThroughLine { .. }) = sol.family {
            sol.family = Some(PlaneFamily::AllThroughLine {
                point: Vector3::zeros(),
                direction: Vector3::z(),
            });
        }
        return sol;
    }

    let p_d = c.z;
    let rel = target - c;
    let dist = rel.norm();
    let u = rel / dist;
    let tol = 1e-12 * (1.0 + target.norm() + p_d.abs());
    let mut planes = Vec::new();
    let mut k_points = Vec::new();
    for (sign, k) in [(1.0, p_d - dist), (-1.0, p_d + dist)] {
        if !mode.on_target_side(k, tol) {
            continue;
        }
        if sign < 0.0 && (p_d - dist - k).abs() <= tol {
            continue;
        }
        if let Ok(p) = Plane::new(Vector3::z() + sign * u, c) {
            planes.push(p);
            k_points.push(Vector3::new(0.0, 0.0, k));
        }
    }
    ConstrainedSolution {
        case: if dist >= p_d.abs() {
            ConstrainedCase::PlungeOuter
        } else {
            ConstrainedCase::PlungeInner
        },
        planes,
        k_points,
        family: None,
        existence: k_exists(&c, target, mode),
    }
}

fn infinite_plunge_affine(target: &Vector3<f64>, mode: PointingMode) -> ConstrainedSolution {
    let mut sol = ConstrainedSolution {
        case: ConstrainedCase::InfinitePlunge,
        planes: Vec::new(),
        k_points: Vec::new(),
        family: None,
        existence: false,
    };
    // distal normal is -z, so the forward ray descends from the base plane
    let reachable = match mode {
        PointingMode::Forward => target.z <= 0.0,
        PointingMode::Backward => target.z >= 0.0,
    };
    if !reachable {
        return sol;
    }
    sol.existence = true;
    let foot = Vector3::new(0.0, 0.0, target.z);
    let horizontal = target - foot;
    if horizontal.norm() <= AXIS_EPS * (1.0 + target.norm()) {
        sol.family = Some(PlaneFamily::AllThroughLine {
            point: Vector3::zeros(),
            direction: Vector3::z(),
        });
    } else {
        sol.planes
            .push(Plane::new(horizontal, 0.5 * (target + foot)).expect("nonzero normal"));
        sol.k_points.push(foot);
    }
    sol
}

/// Midplane with plunge distance `p_d` giving distal normal `dir`:
/// `(z + N_D).(x - c_J) = 0`, or every plane containing the z-axis when
/// `N_D = -z`. An infinite plunge forces `N_D = -z` and any other request
/// fails with [`Error::InfinitePlunge`].
pub fn plunge_direction_midplane(
    plunge: &PlungeConstraint,
    dir: &Vector3<f64>,
    mode: PointingMode,
) -> Result<PlaneFamily> {
    let d = mode.sign() * unit_direction(dir)?;
    let normal = half_angle_normal(&d);
    match (plunge.center(), normal) {
        (Some(c), Some(n)) => Ok(PlaneFamily::Single(Plane::new(n, c)?)),
        (Some(_), None) => Ok(PlaneFamily::AllThroughLine {
            point: Vector3::zeros(),
            direction: Vector3::z(),
        }),
        (None, None) => Ok(PlaneFamily::AllParallelToZ { through: None }),
        (None, Some(_)) => Err(Error::InfinitePlunge),
    }
}

/// Where the distal center may go when a midjoint is frozen and the plunge is fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum FrozenPlungeLocus {
    /// The two constraint spheres coincide: two degrees of freedom remain.
    Sphere {
        center: Vector3<f64>,
        radius: f64,
    },
    /// Distinct spheres meeting in a circle: one degree of freedom.
    Circle(Circle3D),
    /// Spheres touching at a single point.
    Point(Vector3<f64>),
    Empty,
}

/// The distal center is equidistant from the origin and from every point of
/// the midplane, so it lies on the sphere about `m*` through the origin and
/// on the sphere about `c_J` through the origin.
pub fn frozen_plunge_compatibility(frozen: &FrozenMidjoint, plunge: &PlungeConstraint) -> Result<FrozenPlungeLocus> {
    let c2 = plunge.center().ok_or(Error::InfinitePlunge)?;
    let c1 = frozen.position;
    let (r1, r2) = (c1.norm(), c2.norm());
    let scale = 1.0 + r1.max(r2);
    let d_vec = c2 - c1;
    let d = d_vec.norm();
    if d <= 1e-12 * scale {
        return Ok(FrozenPlungeLocus::Sphere { center: c1, radius: r1 });
    }
    let axis = d_vec / d;
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h2 = r1 * r1 - a * a;
    let center = c1 + a * axis;
    let band = 1e-12 * scale * scale;
    if h2 < -band {
        Ok(FrozenPlungeLocus::Empty)
    } else if h2 <= band {
        Ok(FrozenPlungeLocus::Point(center))
    } else {
        Ok(FrozenPlungeLocus::Circle(Circle3D::new(center, h2.sqrt(), axis)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::standard_design;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const FWD: PointingMode = PointingMode::Forward;

    fn q_axis() -> PointConstraint {
        PointConstraint::new(Vector3::new(0.0, 0.0, 3f64.sqrt()))
    }

    #[test]
    fn affine_single_root() {
        let s = constrained_affine_midplanes(&q_axis(), &Vector3::new(5.0, 0.0, 0.0), FWD);
        assert_eq!(s.case, ConstrainedCase::OffAxis);
        assert_eq!(s.planes.len(), 1);
        let kz = 3f64.sqrt() - 28f64.sqrt();
        assert_relative_eq!(s.k_points[0].z, kz, epsilon = 1e-14);
        assert_relative_eq!(kz, -3.5594, epsilon = 1e-4);
        let want = Plane::new(Vector3::new(5.0, 0.0, 28f64.sqrt() - 3f64.sqrt()), q_axis().q).unwrap();
        assert!(s.planes[0].same_as(&want, 1e-12));
        assert!(s.existence);
    }

    #[test]
    fn affine_unreachable() {
        let s = constrained_affine_midplanes(&q_axis(), &Vector3::new(0.5, 0.0, 1.5), FWD);
        assert!(s.is_infeasible());
        assert!(!s.existence);
    }

    #[test]
    fn affine_on_axis_family() {
        let s = constrained_affine_midplanes(
            &PointConstraint::new(Vector3::zeros()),
            &Vector3::new(0.0, 0.0, -2.0),
            FWD,
        );
        assert_eq!(s.case, ConstrainedCase::OnAxis);
        assert!(s.planes.is_empty());
        match s.family.unwrap() {
            PlaneFamily::AllThroughLine { point, direction } => {
                assert_eq!(point, Vector3::zeros());
                assert_relative_eq!(direction, -Vector3::z());
            }
            f => panic!("unexpected {f:?}"),
        }
        // lowering q below T_z/2 adds the horizontal plane
        let s = constrained_affine_midplanes(
            &PointConstraint::new(Vector3::new(0.3, 0.0, -1.5)),
            &Vector3::new(0.0, 0.0, -2.0),
            FWD,
        );
        assert_eq!(s.planes.len(), 1);
        assert!(s.planes[0].same_as(&Plane::horizontal(-1.5), 1e-12));
    }

    #[test]
    fn backward_flips_half_axis() {
        let q = PointConstraint::new(Vector3::new(0.2, 0.1, 0.5));
        let s = constrained_affine_midplanes(&q, &Vector3::new(3.0, 1.0, 2.0), PointingMode::Backward);
        for k in &s.k_points {
            assert!(k.z >= 0.0);
        }
        assert!(!s.planes.is_empty());
    }

    #[test]
    fn direction_through_point() {
        let q = PointConstraint::new(Vector3::new(1.0, 0.0, 2.0));
        let p = constrained_direction_midplane(&q, &Vector3::x(), FWD).unwrap();
        let want = Plane::new(Vector3::new(1.0, 0.0, 1.0), q.q).unwrap();
        assert!(p.single().unwrap().same_as(&want, 1e-12));
        let p = constrained_direction_midplane(&q, &Vector3::z(), FWD).unwrap();
        assert!(p.single().unwrap().same_as(&Plane::horizontal(2.0), 1e-12));
        assert_eq!(
            constrained_direction_midplane(&q, &-Vector3::z(), FWD).unwrap(),
            PlaneFamily::AllParallelToZ { through: Some(q.q) }
        );
    }

    #[test]
    fn plunge_outer_case() {
        let s = plunge_affine_midplanes(&PlungeConstraint::Finite(1.0), &Vector3::new(3.0, 0.0, 1.0), FWD);
        assert_eq!(s.case, ConstrainedCase::PlungeOuter);
        assert_eq!(s.planes.len(), 1);
        let want = Plane::new(Vector3::new(1.0, 0.0, 1.0), Vector3::new(0.0, 0.0, 1.0)).unwrap();
        assert!(s.planes[0].same_as(&want, 1e-12));
        assert_relative_eq!(s.k_points[0], Vector3::new(0.0, 0.0, -2.0), epsilon = 1e-14);
    }

    #[test]
    fn plunge_inner_case() {
        let t = Vector3::new(1.0, 0.0, -1.0);
        let s = plunge_affine_midplanes(&PlungeConstraint::Finite(-5.0), &t, FWD);
        assert_eq!(s.case, ConstrainedCase::PlungeInner);
        assert_eq!(s.planes.len(), 2);
        let r = 17f64.sqrt();
        assert_relative_eq!(s.k_points[0].z, -5.0 - r, epsilon = 1e-14);
        assert_relative_eq!(s.k_points[1].z, -5.0 + r, epsilon = 1e-14);
        for (p, k) in s.planes.iter().zip(&s.k_points) {
            assert_relative_eq!(p.reflect(&t), *k, epsilon = 1e-13);
        }
        // positive plunge inside the sphere cannot point forward
        let s = plunge_affine_midplanes(&PlungeConstraint::Finite(5.0), &Vector3::new(1.0, 0.0, 4.0), FWD);
        assert!(s.is_infeasible());
    }

    #[test]
    fn plunge_on_axis_case() {
        let s = plunge_affine_midplanes(&PlungeConstraint::Finite(-1.0), &Vector3::new(0.0, 0.0, -1.0), FWD);
        assert_eq!(s.case, ConstrainedCase::PlungeOnAxis);
        assert_eq!(s.planes.len(), 1);
        assert!(s.planes[0].same_as(&Plane::horizontal(-1.0), 1e-12));
        assert!(s.family.is_some());
        let s = plunge_affine_midplanes(&PlungeConstraint::Finite(0.5), &Vector3::new(0.0, 0.0, -1.0), FWD);
        assert!(s.planes.is_empty());
        assert_eq!(
            s.family,
            Some(PlaneFamily::AllThroughLine {
                point: Vector3::zeros(),
                direction: Vector3::z()
            })
        );
    }

    #[test]
    fn infinite_plunge_points_down_only() {
        let t = Vector3::new(2.0, 1.0, -3.0);
        let s = plunge_affine_midplanes(&PlungeConstraint::Infinite, &t, FWD);
        assert_eq!(s.case, ConstrainedCase::InfinitePlunge);
        assert_eq!(s.planes.len(), 1);
        assert_eq!(s.planes[0].normal().z, 0.0);
        assert_relative_eq!(s.planes[0].reflect(&t), Vector3::new(0.0, 0.0, -3.0), epsilon = 1e-14);
        let up = plunge_affine_midplanes(&PlungeConstraint::Infinite, &Vector3::new(2.0, 1.0, 3.0), FWD);
        assert!(up.is_infeasible());
    }

    #[test]
    fn plunge_direction_planes() {
        let p = plunge_direction_midplane(&PlungeConstraint::Finite(1.0), &Vector3::x(), FWD).unwrap();
        let want = Plane::new(Vector3::new(1.0, 0.0, 1.0), Vector3::new(0.0, 0.0, 1.0)).unwrap();
        assert!(p.single().unwrap().same_as(&want, 1e-12));
        let p = plunge_direction_midplane(&PlungeConstraint::Finite(2.0), &Vector3::z(), FWD).unwrap();
        assert!(p.single().unwrap().same_as(&Plane::horizontal(2.0), 1e-12));
        for pd in [-3.0, 0.0, 0.7] {
            assert_eq!(
                plunge_direction_midplane(&PlungeConstraint::Finite(pd), &-Vector3::z(), FWD).unwrap(),
                PlaneFamily::AllThroughLine {
                    point: Vector3::zeros(),
                    direction: Vector3::z()
                }
            );
        }
        assert_eq!(
            plunge_direction_midplane(&PlungeConstraint::Infinite, &Vector3::x(), FWD),
            Err(Error::InfinitePlunge)
        );
    }

    #[test]
    fn frozen_affine_goal() {
        let d = standard_design(3f64.sqrt(), 2.0).unwrap();
        let f = FrozenMidjoint::new(&d, 0, 2.0 * PI / 3.0).unwrap();
        assert_relative_eq!(f.position(), Vector3::new(0.0, 0.0, 3f64.sqrt()), epsilon = 1e-15);
        let sol = frozen_solve(&d, &f, Goal::AffineTarget(Vector3::new(5.0, 0.0, 0.0)), FWD).unwrap();
        assert_eq!(sol.branches.len(), 1);
        for m in sol.branches[0].1.finite().unwrap() {
            assert_eq!(m[0], f.position());
        }
    }

    #[test]
    fn frozen_direction_goal() {
        let d = standard_design(3f64.sqrt(), 2.0).unwrap();
        let f = FrozenMidjoint::new(&d, 0, 2.0 * PI / 3.0).unwrap();
        let sol = frozen_solve(&d, &f, Goal::Direction(Vector3::z()), FWD).unwrap();
        assert_eq!(sol.branches.len(), 1);
        assert!(sol.branches[0].0.same_as(&Plane::horizontal(3f64.sqrt()), 1e-12));
        // legs 2 and 3 cut twice each
        assert_eq!(sol.branches[0].1.finite().unwrap().len(), 4);
    }

    #[test]
    fn frozen_unreachable_goal() {
        let d = standard_design(3f64.sqrt(), 2.0).unwrap();
        let f = FrozenMidjoint::new(&d, 0, 2.0 * PI / 3.0).unwrap();
        let sol = frozen_solve(&d, &f, Goal::AffineTarget(Vector3::new(0.5, 0.0, 1.5)), FWD).unwrap();
        assert!(sol.is_unreachable());
    }

    #[test]
    fn frozen_plunge_loci() {
        let d = standard_design(3f64.sqrt(), 2.0).unwrap();
        let f = FrozenMidjoint::new(&d, 0, 2.0 * PI / 3.0).unwrap();
        match frozen_plunge_compatibility(&f, &PlungeConstraint::Finite(3f64.sqrt())).unwrap() {
            FrozenPlungeLocus::Sphere { center, radius } => {
                assert_relative_eq!(center, Vector3::new(0.0, 0.0, 3f64.sqrt()), epsilon = 1e-15);
                assert_relative_eq!(radius, 3f64.sqrt(), epsilon = 1e-15);
            }
            l => panic!("unexpected {l:?}"),
        }
        let f = FrozenMidjoint::new(&d, 0, (2.0f64).atan2(0.0)).unwrap();
        assert_relative_eq!(f.position(), Vector3::new(1.0, 0.0, 2.0), epsilon = 1e-15);
        match frozen_plunge_compatibility(&f, &PlungeConstraint::Finite(1.0)).unwrap() {
            FrozenPlungeLocus::Circle(c) => {
                // the origin is on both spheres, hence on the circle
                assert_relative_eq!(
                    c.center().norm_squared() + c.radius().powi(2) - 2.0 * c.center().dot(&Vector3::zeros()),
                    c.center().norm_squared() + c.radius().powi(2),
                    epsilon = 1e-12
                );
                assert_relative_eq!((Vector3::zeros() - c.center()).norm(), c.radius(), epsilon = 1e-12);
            }
            l => panic!("unexpected {l:?}"),
        }
        for pd in [-2.0, 0.3, 1.0, 5.0] {
            let l = frozen_plunge_compatibility(&f, &PlungeConstraint::Finite(pd)).unwrap();
            assert!(!matches!(l, FrozenPlungeLocus::Sphere { .. }));
        }
        assert_eq!(
            frozen_plunge_compatibility(&f, &PlungeConstraint::Infinite),
            Err(Error::InfinitePlunge)
        );
    }
}
