//! Joint parametrization, forward kinematics and the pointing predicates.
//!
//! Legs are indexed `0..3` throughout the library. The base center is the
//! origin and the base plane is `z = 0`.

use std::f64::consts::PI;

use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{plane_through_midjoints, reflect_vector, Circle3D, Plane};

/// Tolerance used by `base_angle` to accept a point as lying on a midcircle.
pub const ON_CIRCLE_TOL: f64 = 1e-6;

/// Which half of the pointing axis a query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointingMode {
    #[default]
    Forward,
    Backward,
}

impl PointingMode {
    /// `+1` for forward, `-1` for backward. Backward results are obtained
    /// from the forward formulas by flipping `z`-inequalities (or negating
    /// the requested direction).
    pub fn sign(self) -> f64 {
        match self {
            PointingMode::Forward => 1.0,
            PointingMode::Backward => -1.0,
        }
    }

    /// True when `z` lies on the half-axis a reflected target must land on:
    /// `z <= 0` for forward pointing, `z >= 0` for backward.
    pub fn on_target_side(self, z: f64, tol: f64) -> bool {
        match self {
            PointingMode::Forward => z <= tol,
            PointingMode::Backward => z >= -tol,
        }
    }
}

/// Geometric parameters of a (generalized) Canfield joint.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDesign {
    hinges: [Vector3<f64>; 3],
    axes: [Vector3<f64>; 3],
    arm_lengths: [f64; 3],
    zero_dirs: [Vector3<f64>; 3],
}

const DESIGN_TOL: f64 = 1e-9;

impl JointDesign {
    /// Validates and builds a design. Axes and zero directions are
    /// normalized; hinges must lie in `z = 0`, axes must be horizontal, each
    /// zero direction must be orthogonal to its axis, and the hinges must be
    /// numbered counterclockwise about `+z`.
    pub fn new(
        hinges: [Vector3<f64>; 3],
        axes: [Vector3<f64>; 3],
        arm_lengths: [f64; 3],
        zero_dirs: [Vector3<f64>; 3],
    ) -> Result<Self> {
        let scale = hinges.iter().map(|b| b.norm()).fold(1.0, f64::max);
        let mut unit_axes = axes;
        let mut unit_zero = zero_dirs;
        for i in 0..3 {
            let b = &hinges[i];
            if !b.iter().all(|c| c.is_finite()) || b.z.abs() > DESIGN_TOL * scale {
                return Err(Error::InvalidDesign(format!("hinge {} must lie in z = 0", i + 1)));
            }
            let l = arm_lengths[i];
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::InvalidDesign(format!(
                    "arm length {} must be positive, got {l}",
                    i + 1
                )));
            }
            let an = axes[i].norm();
            let zn = zero_dirs[i].norm();
            if !(an > 0.0 && an.is_finite() && zn > 0.0 && zn.is_finite()) {
                return Err(Error::InvalidDesign(format!(
                    "axis and zero direction {} must be nonzero",
                    i + 1
                )));
            }
            unit_axes[i] = axes[i] / an;
            unit_zero[i] = zero_dirs[i] / zn;
            if unit_axes[i].z.abs() > DESIGN_TOL {
                return Err(Error::InvalidDesign(format!(
                    "hinge axis {} must lie in the base plane",
                    i + 1
                )));
            }
            if unit_axes[i].dot(&unit_zero[i]).abs() > DESIGN_TOL {
                return Err(Error::InvalidDesign(format!(
                    "zero direction {} must be orthogonal to its hinge axis",
                    i + 1
                )));
            }
        }
        let area = (hinges[1] - hinges[0]).cross(&(hinges[2] - hinges[0])).z;
        if !(area > DESIGN_TOL * scale * scale) {
            return Err(Error::InvalidDesign(
                "base hinges must form a counterclockwise triangle of nonzero area".into(),
            ));
        }
        Ok(JointDesign {
            hinges,
            axes: unit_axes,
            arm_lengths,
            zero_dirs: unit_zero,
        })
    }

    pub fn hinges(&self) -> &[Vector3<f64>; 3] {
        &self.hinges
    }

    pub fn axes(&self) -> &[Vector3<f64>; 3] {
        &self.axes
    }

    pub fn arm_lengths(&self) -> &[f64; 3] {
        &self.arm_lengths
    }

    pub fn zero_dirs(&self) -> &[Vector3<f64>; 3] {
        &self.zero_dirs
    }

    pub fn hinge(&self, leg: usize) -> Vector3<f64> {
        self.hinges[leg]
    }

    pub fn axis(&self, leg: usize) -> Vector3<f64> {
        self.axes[leg]
    }

    pub fn arm_length(&self, leg: usize) -> f64 {
        self.arm_lengths[leg]
    }

    pub fn midcircle(&self, leg: usize) -> Circle3D {
        Circle3D::new(self.hinges[leg], self.arm_lengths[leg], self.axes[leg]).expect("validated design")
    }

    /// Distance `|B_i - B_j|` between two base hinges.
    pub fn hinge_distance(&self, i: usize, j: usize) -> f64 {
        (self.hinges[i] - self.hinges[j]).norm()
    }

    /// Longest arm; used to scale tolerances.
    pub fn max_arm_length(&self) -> f64 {
        self.arm_lengths.iter().copied().fold(0.0, f64::max)
    }

    /// Characteristic length: the larger of the longest arm and the
    /// furthest hinge from the base center.
    pub fn scale(&self) -> f64 {
        self.hinges
            .iter()
            .map(|b| b.norm())
            .fold(self.max_arm_length(), f64::max)
    }
}

/// The equilateral design with hinge spacing `b` and common arm length `l`.
///
/// `B_1 = (b/sqrt3, 0, 0)` and the others follow by rotating `2pi/3` about
/// `z`. Zero directions point radially outward and each axis is parallel to
/// the opposite side, signed so `u_i x N_i = z`.
pub fn standard_design(b: f64, l: f64) -> Result<JointDesign> {
    if !(b > 0.0) || !b.is_finite() || !(l > 0.0) || !l.is_finite() {
        return Err(Error::Domain(format!(
            "standard design needs b > 0 and l > 0, got b = {b}, l = {l}"
        )));
    }
    let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), 2.0 * PI / 3.0);
    let b1 = Vector3::new(b / 3f64.sqrt(), 0.0, 0.0);
    let b2 = rot * b1;
    let b3 = rot * b2;
    let hinges = [b1, b2, b3];
    let zero_dirs = hinges.map(|h| h.normalize());
    let axes = zero_dirs.map(|u| Vector3::z().cross(&u));
    JointDesign::new(hinges, axes, [l; 3], zero_dirs)
}

/// Reduces an angle to `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.sin().atan2(theta.cos());
    if w <= -PI {
        PI
    } else {
        w
    }
}

/// Base hinge angles, one per leg, in radians within `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseState {
    angles: [f64; 3],
}

impl BaseState {
    pub fn new(angles: [f64; 3]) -> Self {
        BaseState {
            angles: angles.map(wrap_angle),
        }
    }

    pub fn from_degrees(deg: [f64; 3]) -> Self {
        Self::new(deg.map(f64::to_radians))
    }

    pub fn angles(&self) -> [f64; 3] {
        self.angles
    }

    pub fn angles_deg(&self) -> [f64; 3] {
        self.angles.map(f64::to_degrees)
    }
}

/// `B_i + l_i (cos t u_i + sin t (u_i x N_i))`.
pub fn midjoint_position(design: &JointDesign, leg: usize, theta: f64) -> Vector3<f64> {
    let u = design.zero_dirs[leg];
    let v = u.cross(&design.axes[leg]);
    design.hinges[leg] + design.arm_lengths[leg] * (theta.cos() * u + theta.sin() * v)
}

/// Inverse of [`midjoint_position`].
pub fn base_angle(design: &JointDesign, leg: usize, m: &Vector3<f64>) -> Result<f64> {
    let l = design.arm_lengths[leg];
    let d = m - design.hinges[leg];
    let planar = design.axes[leg].dot(&d).abs();
    let radial = (d.norm() - l).abs();
    if !(planar <= ON_CIRCLE_TOL * l && radial <= ON_CIRCLE_TOL * l) {
        return Err(Error::OffCircle { leg, radial, planar });
    }
    let u = design.zero_dirs[leg];
    let v = u.cross(&design.axes[leg]);
    Ok(wrap_angle(d.dot(&v).atan2(d.dot(&u))))
}

/// A midplane-symmetric configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub midjoints: [Vector3<f64>; 3],
    pub midplane: Plane,
    pub distal_hinges: [Vector3<f64>; 3],
    pub distal_center: Vector3<f64>,
    pub distal_normal: Vector3<f64>,
}

impl Configuration {
    /// Completes a configuration from a base design and a plane through
    /// the given midjoints by reflecting base features across the plane.
    pub fn from_midplane(design: &JointDesign, midjoints: [Vector3<f64>; 3], midplane: Plane) -> Self {
        let distal_hinges = design.hinges.map(|b| midplane.reflect(&b));
        let distal_center = midplane.reflect(&Vector3::zeros());
        let distal_normal = reflect_vector(&midplane.normal(), &(-Vector3::z()));
        Configuration {
            midjoints,
            midplane,
            distal_hinges,
            distal_center,
            distal_normal,
        }
    }

    /// Perpendicular distance from `target` to the pointing ray selected by `mode`.
    pub fn ray_distance(&self, target: &Vector3<f64>, mode: PointingMode) -> f64 {
        let rel = target - self.distal_center;
        let t = rel.dot(&self.distal_normal);
        let along = match mode {
            PointingMode::Forward => t.max(0.0),
            PointingMode::Backward => t.min(0.0),
        };
        (rel - along * self.distal_normal).norm()
    }
}

/// Forward kinematics: midjoints from angles, midplane through them, then
/// distal features by reflection.
pub fn forward_kinematics(design: &JointDesign, state: &BaseState) -> Result<Configuration> {
    let m = [0, 1, 2].map(|i| midjoint_position(design, i, state.angles[i]));
    let plane = plane_through_midjoints(&m[0], &m[1], &m[2])?;
    Ok(Configuration::from_midplane(design, m, plane))
}

/// Default absolute tolerance for [`points_at`]: `1e-9 (1 + |T|)`.
pub fn default_pointing_tol(target: &Vector3<f64>) -> f64 {
    1e-9 * (1.0 + target.norm())
}

/// True when `target` lies on the forward (or backward) pointing ray within `tol`.
pub fn points_at(config: &Configuration, target: &Vector3<f64>, mode: PointingMode, tol: f64) -> bool {
    config.ray_distance(target, mode) <= tol
}

/// Same predicate evaluated through the midplane: the reflected target must
/// land on the non-positive (forward) or non-negative (backward) z-axis.
pub fn points_at_by_reflection(config: &Configuration, target: &Vector3<f64>, mode: PointingMode, tol: f64) -> bool {
    let k = config.midplane.reflect(target);
    let clamped_z = match mode {
        PointingMode::Forward => k.z.min(0.0),
        PointingMode::Backward => k.z.max(0.0),
    };
    (k - Vector3::new(0.0, 0.0, clamped_z)).norm() <= tol
}
