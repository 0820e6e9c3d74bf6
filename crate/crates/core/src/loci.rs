//! Where the distal center can be for a given pointing goal, and which
//! distal normals a constrained joint can reach.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{Plane, PARALLEL_EPS, TANGENCY_EPS};
use crate::ik_constrained::Constraint;
use crate::ik_core::{half_angle_normal, unit_direction, AXIS_EPS};
use crate::model::{JointDesign, PointingMode};

/// Distal normal as a function of distal center: `2 (x.z) x - z` for unit `x`.
///
/// The polar angle of the distal normal is twice that of the distal center.
pub fn distal_normal_field(x: &Vector3<f64>) -> Result<Vector3<f64>> {
    let n = x.norm();
    if !(n > 0.0) {
        return Err(Error::Origin);
    }
    let u = x / n;
    Ok(2.0 * u.z * u - Vector3::z())
}

/// A vertical half-plane direction `rho`, giving coordinates `(rho, z)` on
/// the plane spanned by `rho` and `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialFrame {
    rho: Vector3<f64>,
}

impl RadialFrame {
    /// Frame along the horizontal part of `v`, or `None` if `v` is on the z-axis.
    pub fn from_horizontal(v: &Vector3<f64>) -> Option<Self> {
        let h = v.x.hypot(v.y);
        if h <= AXIS_EPS * v.norm() || h == 0.0 {
            return None;
        }
        Some(RadialFrame {
            rho: Vector3::new(v.x / h, v.y / h, 0.0),
        })
    }

    /// Frame at azimuth `az` (radians).
    pub fn at_azimuth(az: f64) -> Self {
        let (s, c) = az.sin_cos();
        RadialFrame {
            rho: Vector3::new(c, s, 0.0),
        }
    }

    pub fn rho(&self) -> Vector3<f64> {
        self.rho
    }

    /// `(rho, z)` coordinates of the projection of `x` onto the frame's plane.
    pub fn coords(&self, x: &Vector3<f64>) -> (f64, f64) {
        (self.rho.dot(x), x.z)
    }

    pub fn point(&self, rho: f64, z: f64) -> Vector3<f64> {
        rho * self.rho + z * Vector3::z()
    }
}

/// The cubic `rho^3 + rho z^2 + T_rho (z^2 - rho^2) - 2 T_z rho z`, which
/// vanishes on the distal centers that can point at `target`.
pub fn affine_locus_residual(target: &Vector3<f64>, frame: &RadialFrame, rho: f64, z: f64) -> f64 {
    let (tr, tz) = frame.coords(target);
    rho * rho * rho + rho * z * z + tr * (z * z - rho * rho) - 2.0 * tz * rho * z
}

/// Distal centers that point at a fixed target, forward or backward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AffineLocus {
    /// A nodal cubic in the vertical plane through the target, with its node at the origin.
    PlanarCubic { target: Vector3<f64>, frame: RadialFrame },
    /// Target on the z-axis: the z-axis together with the sphere about the target through the origin.
    ZUnionSphere { center: Vector3<f64>, radius: f64 },
}

impl AffineLocus {
    pub fn new(target: &Vector3<f64>) -> Self {
        match RadialFrame::from_horizontal(target) {
            Some(frame) => AffineLocus::PlanarCubic { target: *target, frame },
            None => AffineLocus::ZUnionSphere {
                center: Vector3::new(0.0, 0.0, target.z),
                radius: target.z.abs(),
            },
        }
    }

    /// Point `r(t) = ((|T|^2 - t^2) / |T - t z|^2)(T - t z)` of the cubic;
    /// `t <= 0` traces forward pointing and `t >= 0` backward pointing.
    pub fn point(&self, t: f64) -> Option<Vector3<f64>> {
        match self {
            AffineLocus::PlanarCubic { target, .. } => {
                let g = target - t * Vector3::z();
                Some((target.norm_squared() - t * t) / g.norm_squared() * g)
            }
            AffineLocus::ZUnionSphere { .. } => None,
        }
    }

    /// Derivative `r'(t)` of the cubic's parametrization.
    pub fn derivative(&self, t: f64) -> Option<Vector3<f64>> {
        match self {
            AffineLocus::PlanarCubic { target, .. } => {
                let g = target - t * Vector3::z();
                let g2 = g.norm_squared();
                let num = target.norm_squared() - t * t;
                let dg2 = -2.0 * g.z;
                let df = (-2.0 * t * g2 - num * dg2) / (g2 * g2);
                Some(df * g - (num / g2) * Vector3::z())
            }
            AffineLocus::ZUnionSphere { .. } => None,
        }
    }

    /// Parameters of the node: `r(t) = 0` at `t = -|T|` and `t = |T|`.
    pub fn node_parameters(&self) -> Option<[f64; 2]> {
        match self {
            AffineLocus::PlanarCubic { target, .. } => {
                let n = target.norm();
                Some([-n, n])
            }
            AffineLocus::ZUnionSphere { .. } => None,
        }
    }

    /// Whether `x` is on the locus, with the residual scaled by `|T|^3`.
    pub fn contains(&self, x: &Vector3<f64>, tol: f64) -> bool {
        match self {
            AffineLocus::PlanarCubic { target, frame } => {
                let off_plane = x.dot(&frame.rho().cross(&Vector3::z()));
                let (r, z) = frame.coords(x);
                let scale = target.norm().powi(3);
                off_plane.abs() <= tol * target.norm()
                    && affine_locus_residual(target, frame, r, z).abs() <= tol * scale
            }
            AffineLocus::ZUnionSphere { center, radius } => {
                let s = 1.0 + radius;
                x.x.hypot(x.y) <= tol * s || ((x - center).norm() - radius).abs() <= tol * s
            }
        }
    }
}

/// The quadratic `N_rho (z^2 - rho^2) - 2 N_z rho z`, which vanishes on the
/// distal centers whose distal normal is `+-N`.
pub fn azel_locus_residual(n: &Vector3<f64>, frame: &RadialFrame, rho: f64, z: f64) -> f64 {
    let (nr, nz) = frame.coords(n);
    nr * (z * z - rho * rho) - 2.0 * nz * rho * z
}

/// One half of the direction-pointing locus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AzElBranch {
    /// The line through the origin with this unit direction.
    Line(Vector3<f64>),
    /// The whole base plane `z = 0`.
    BasePlane,
}

/// Distal centers pointing along `N`: the forward branch along `z + N`, the
/// backward branch along `z - N`. The two lines are orthogonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AzElLocus {
    pub forward: AzElBranch,
    pub backward: AzElBranch,
}

impl AzElLocus {
    pub fn new(n: &Vector3<f64>) -> Result<Self> {
        let n = unit_direction(n)?;
        let branch = |v: Vector3<f64>| {
            let len = v.norm();
            if len <= AXIS_EPS {
                AzElBranch::BasePlane
            } else {
                AzElBranch::Line(v / len)
            }
        };
        Ok(AzElLocus {
            forward: branch(Vector3::z() + n),
            backward: branch(Vector3::z() - n),
        })
    }

    pub fn branch(&self, mode: PointingMode) -> AzElBranch {
        match mode {
            PointingMode::Forward => self.forward,
            PointingMode::Backward => self.backward,
        }
    }
}

/// Result of a single-direction feasibility query.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    /// Per leg `l^2 |nu|^2 - |nu x delta|^2`, which has the sign of the
    /// plane-circle discriminant.
    pub margins: [f64; 3],
    /// Midplane the margins refer to.
    pub plane: Plane,
}

/// Discriminant margin of one leg against a plane, and the tolerance it is held to.
fn leg_margin(design: &JointDesign, leg: usize, plane: &Plane, eps: f64) -> (f64, f64) {
    let n = plane.normal();
    let q = plane.point();
    let axis = design.axis(leg);
    let b = design.hinge(leg);
    let l2 = design.arm_length(leg).powi(2);
    if n.dot(&axis).abs() >= 1.0 - PARALLEL_EPS {
        // parallel planes: feasible only if the plane is the circle's own plane
        let gap = n.dot(&(b - q));
        let margin = if gap.abs() <= TANGENCY_EPS * design.arm_length(leg) {
            l2
        } else {
            -gap * gap
        };
        return (margin, 0.0);
    }
    let nu = n.cross(&axis);
    let nu2 = nu.norm_squared();
    let across = n.cross(&nu) / nu2.sqrt();
    let q_i = q - axis.dot(&(q - b)) / axis.dot(&across) * across;
    let delta = q_i - b;
    (l2 * nu2 - nu.cross(&delta).norm_squared(), eps * l2 * nu2)
}

fn evaluate_plane(design: &JointDesign, plane: Plane, eps: f64) -> FeasibilityVerdict {
    let mut feasible = true;
    let mut margins = [0.0; 3];
    for (i, m) in margins.iter_mut().enumerate() {
        let (margin, tol) = leg_margin(design, i, &plane, eps);
        *m = margin;
        feasible &= margin >= -tol;
    }
    FeasibilityVerdict {
        feasible,
        margins,
        plane,
    }
}

fn worst_margin(v: &FeasibilityVerdict) -> f64 {
    v.margins.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Number of vertical midplanes tried when the straight-down normal leaves a family.
pub const VERTICAL_SAMPLES: usize = 360;

/// Can a midplane through `q` give distal normal `dir` (backward normal in
/// backward mode) while meeting all three midcircles?
///
/// The candidate midplane has the half-angle normal through `q`. For the
/// straight-down normal every vertical plane through `q` qualifies; those
/// planes are sampled by azimuth, together with the planes of the
/// midcircles themselves, and the best one is reported.
pub fn feasible_direction(
    design: &JointDesign,
    q: &Vector3<f64>,
    dir: &Vector3<f64>,
    mode: PointingMode,
) -> Result<FeasibilityVerdict> {
    feasible_direction_with(design, q, dir, mode, TANGENCY_EPS)
}

/// [`feasible_direction`] with the tangency tolerance coefficient `eps`
/// (margins down to `-eps l^2 |nu|^2` count as feasible).
pub fn feasible_direction_with(
    design: &JointDesign,
    q: &Vector3<f64>,
    dir: &Vector3<f64>,
    mode: PointingMode,
    eps: f64,
) -> Result<FeasibilityVerdict> {
    let d = mode.sign() * unit_direction(dir)?;
    if let Some(n) = half_angle_normal(&d) {
        return Ok(evaluate_plane(design, Plane::new(n, *q)?, eps));
    }
    let mut normals: Vec<Vector3<f64>> = (0..VERTICAL_SAMPLES)
        .map(|k| {
            let a = std::f64::consts::PI * k as f64 / VERTICAL_SAMPLES as f64;
            Vector3::new(a.cos(), a.sin(), 0.0)
        })
        .collect();
    normals.extend(design.axes().iter().filter(|a| a.z.abs() <= AXIS_EPS).copied());
    let mut best: Option<FeasibilityVerdict> = None;
    for n in normals {
        let v = evaluate_plane(design, Plane::new(n, *q)?, eps);
        let better = match &best {
            None => true,
            Some(b) => (v.feasible && !b.feasible) || (v.feasible == b.feasible && worst_margin(&v) > worst_margin(b)),
        };
        if better {
            best = Some(v);
        }
    }
    Ok(best.expect("at least one sampled plane"))
}

/// Options for [`feasibility_map_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapOptions {
    pub execution: Execution,
    /// Tangency tolerance coefficient.
    pub tangency_eps: f64,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions {
            execution: Execution::default(),
            tangency_eps: TANGENCY_EPS,
        }
    }
}

/// Reachable distal normals on an azimuth/polar grid.
///
/// Azimuth cells start at `0` and step by `2 pi / n_az`; polar cells are
/// centered at `(j + 1/2) pi / n_pol`. Cells are stored polar-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityMap {
    pub n_az: usize,
    pub n_pol: usize,
    pub mode: PointingMode,
    pub constraint: Constraint,
    pub cells: Vec<bool>,
    /// Fraction of the sphere's area that is feasible, weighting cells by `sin(polar)`.
    pub feasible_fraction: f64,
}

impl FeasibilityMap {
    pub fn azimuth(&self, i: usize) -> f64 {
        grid_azimuth(i, self.n_az)
    }

    pub fn polar(&self, j: usize) -> f64 {
        grid_polar(j, self.n_pol)
    }

    pub fn get(&self, i_az: usize, j_pol: usize) -> bool {
        self.cells[j_pol * self.n_az + i_az]
    }

    /// Cells in storage order as `(azimuth, polar, feasible)`.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, bool)> + '_ {
        self.cells.iter().enumerate().map(move |(k, &f)| {
            let (j, i) = (k / self.n_az, k % self.n_az);
            (self.azimuth(i), self.polar(j), f)
        })
    }
}

fn grid_azimuth(i: usize, n_az: usize) -> f64 {
    2.0 * std::f64::consts::PI * i as f64 / n_az as f64
}

fn grid_polar(j: usize, n_pol: usize) -> f64 {
    std::f64::consts::PI * (j as f64 + 0.5) / n_pol as f64
}

/// Unit direction with the given azimuth and polar angle.
pub fn direction_from_angles(az: f64, pol: f64) -> Vector3<f64> {
    let (sp, cp) = pol.sin_cos();
    let (sa, ca) = az.sin_cos();
    Vector3::new(sp * ca, sp * sa, cp)
}

pub fn feasibility_map(
    design: &JointDesign,
    constraint: &Constraint,
    n_az: usize,
    n_pol: usize,
    mode: PointingMode,
) -> Result<FeasibilityMap> {
    feasibility_map_with(design, constraint, n_az, n_pol, mode, &MapOptions::default())
}

pub fn feasibility_map_with(
    design: &JointDesign,
    constraint: &Constraint,
    n_az: usize,
    n_pol: usize,
    mode: PointingMode,
    options: &MapOptions,
) -> Result<FeasibilityMap> {
    if n_az < 4 || n_pol < 3 {
        return Err(Error::Domain(format!(
            "feasibility grid must be at least 4x3, got {n_az}x{n_pol}"
        )));
    }
    let q = constraint.point()?;
    let cells = options
        .execution
        .map_indices(n_az * n_pol, |k| {
            let (j, i) = (k / n_az, k % n_az);
            let d = direction_from_angles(grid_azimuth(i, n_az), grid_polar(j, n_pol));
            feasible_direction_with(design, &q, &d, mode, options.tangency_eps).map(|v| v.feasible)
        })
        .into_iter()
        .collect::<Result<Vec<bool>>>()?;

    let mut total = 0.0;
    let mut covered = 0.0;
    for (k, &f) in cells.iter().enumerate() {
        let w = grid_polar(k / n_az, n_pol).sin();
        total += w;
        if f {
            covered += w;
        }
    }
    Ok(FeasibilityMap {
        n_az,
        n_pol,
        mode,
        constraint: *constraint,
        cells,
        feasible_fraction: covered / total,
    })
}
