//! Brute-force checks that share nothing with the closed-form solvers
//! beyond the kinematic definitions and plane reflection.

use nalgebra::Vector3;

use crate::error::Result;
use crate::geometry::{intersect_plane_circle, IntersectionKind, Plane};
use crate::model::{forward_kinematics, midjoint_position, points_at, BaseState, JointDesign, PointingMode};

/// Default number of samples around a midcircle.
pub const DEFAULT_SAMPLES: usize = 100_000;

fn residual(design: &JointDesign, plane: &Plane, leg: usize, theta: f64) -> f64 {
    plane.signed_distance(&midjoint_position(design, leg, theta))
}

fn bisect(design: &JointDesign, plane: &Plane, leg: usize, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = residual(design, plane, leg, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = residual(design, plane, leg, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn minimize_abs(design: &JointDesign, plane: &Plane, leg: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if residual(design, plane, leg, a).abs() <= residual(design, plane, leg, b).abs() {
            hi = b;
        } else {
            lo = a;
        }
    }
    0.5 * (lo + hi)
}

/// Midjoint positions of `leg` lying in `plane`, found on a uniform grid of
/// `n_samples` base angles: sign changes of the plane residual are refined by
/// bisection, and local minima of `|residual|` at most `tol` without a sign
/// change are reported as tangencies. Results are ordered by base angle.
/// A midcircle lying in the plane gives every sample; use
/// [`sampled_whole_circle`] to detect that case first.
pub fn sample_circle_solutions(
    design: &JointDesign,
    plane: &Plane,
    leg: usize,
    n_samples: usize,
    tol: f64,
) -> Vec<Vector3<f64>> {
    let n = n_samples.max(3);
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let theta = |k: usize| -std::f64::consts::PI + step * k as f64;
    let f: Vec<f64> = (0..n).map(|k| residual(design, plane, leg, theta(k))).collect();
    let at = |k: isize| f[k.rem_euclid(n as isize) as usize];

    let mut roots = Vec::new();
    for (k, &a) in f.iter().enumerate() {
        let b = at(k as isize + 1);
        if a == 0.0 {
            roots.push(theta(k));
        } else if b != 0.0 && (a < 0.0) != (b < 0.0) {
            roots.push(bisect(design, plane, leg, theta(k), theta(k) + step));
        } else {
            let prev = at(k as isize - 1);
            let crosses_nearby = (prev < 0.0) != (a < 0.0) || prev == 0.0 || b == 0.0;
            let is_min = a.abs() < prev.abs() && a.abs() <= b.abs();
            if is_min && !crosses_nearby {
                let t = minimize_abs(design, plane, leg, theta(k) - step, theta(k) + step);
                if residual(design, plane, leg, t).abs() <= tol {
                    roots.push(t);
                }
            }
        }
    }
    merge_tangent_pairs(design, plane, leg, &mut roots, 4.0 * step, tol);
    roots.into_iter().map(|t| midjoint_position(design, leg, t)).collect()
}

/// Roundoff can split a tangency into two sign changes a grid cell apart;
/// such a pair whose residual never exceeds `tol` between them is one root.
fn merge_tangent_pairs(design: &JointDesign, plane: &Plane, leg: usize, roots: &mut Vec<f64>, gap: f64, tol: f64) {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut k = 0;
    while roots.len() >= 2 && k < roots.len() {
        let next = (k + 1) % roots.len();
        let (a, mut b) = (roots[k], roots[next]);
        if next == 0 {
            b += two_pi;
        }
        if b - a <= gap {
            let peak = maximize_abs(design, plane, leg, a, b);
            if residual(design, plane, leg, peak).abs() <= tol {
                roots[k] = peak;
                roots.remove(next);
                continue;
            }
        }
        k += 1;
    }
}

fn maximize_abs(design: &JointDesign, plane: &Plane, leg: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if residual(design, plane, leg, a).abs() >= residual(design, plane, leg, b).abs() {
            hi = b;
        } else {
            lo = a;
        }
    }
    0.5 * (lo + hi)
}

/// True when every sample of the midcircle is within `tol` of the plane.
pub fn sampled_whole_circle(design: &JointDesign, plane: &Plane, leg: usize, n_samples: usize, tol: f64) -> bool {
    let step = 2.0 * std::f64::consts::PI / n_samples.max(3) as f64;
    (0..n_samples.max(3)).all(|k| residual(design, plane, leg, step * k as f64).abs() <= tol)
}

/// Runs forward kinematics and applies the ray definition of pointing.
pub fn verify_pointing(
    design: &JointDesign,
    state: &BaseState,
    target: &Vector3<f64>,
    mode: PointingMode,
    tol: f64,
) -> Result<bool> {
    let config = forward_kinematics(design, state)?;
    Ok(points_at(&config, target, mode, tol))
}

/// Whether a distal center `x` can point at `target` in either direction:
/// the midplane bisecting the origin and `x` must reflect the target onto
/// the z-axis.
pub fn locus_membership_bruteforce(target: &Vector3<f64>, x: &Vector3<f64>, tol: f64) -> bool {
    let Ok(plane) = Plane::new(*x, 0.5 * x) else {
        return true;
    };
    let k = plane.reflect(target);
    k.x.hypot(k.y) <= tol
}

/// Agreement between the closed-form plane/circle intersection and sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub agreed: bool,
    pub analytic_count: usize,
    pub sampled_count: usize,
    pub max_position_error: f64,
}

/// Compares [`intersect_plane_circle`] with [`sample_circle_solutions`] for
/// one leg. Positions must agree within `pos_tol`.
pub fn compare_leg(design: &JointDesign, plane: &Plane, leg: usize, n_samples: usize, pos_tol: f64) -> OracleReport {
    let analytic = intersect_plane_circle(plane, &design.midcircle(leg));
    let l = design.arm_length(leg);
    let res_tol = 1e-9 * l;
    if analytic.kind == IntersectionKind::WholeCircle {
        let whole = sampled_whole_circle(design, plane, leg, n_samples, res_tol);
        return OracleReport {
            agreed: whole,
            analytic_count: 0,
            sampled_count: 0,
            max_position_error: 0.0,
        };
    }
    let sampled = sample_circle_solutions(design, plane, leg, n_samples, res_tol);
    let mut max_err: f64 = 0.0;
    for a in &analytic.points {
        let nearest = sampled.iter().map(|s| (s - a).norm()).fold(f64::INFINITY, f64::min);
        max_err = max_err.max(nearest);
    }
    for s in &sampled {
        let nearest = analytic
            .points
            .iter()
            .map(|a| (s - a).norm())
            .fold(f64::INFINITY, f64::min);
        max_err = max_err.max(nearest);
    }
    if analytic.points.is_empty() && sampled.is_empty() {
        max_err = 0.0;
    }
    OracleReport {
        agreed: analytic.points.len() == sampled.len() && max_err <= pos_tol,
        analytic_count: analytic.points.len(),
        sampled_count: sampled.len(),
        max_position_error: max_err,
    }
}
