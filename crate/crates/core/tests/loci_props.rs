mod common;

use canfield::ik_core::{half_angle_normal, solve_midjoints};
use canfield::loci::{
    affine_locus_residual, azel_locus_residual, distal_normal_field, feasible_direction, AffineLocus, AzElBranch,
    AzElLocus, RadialFrame,
};
use canfield::oracle::locus_membership_bruteforce;
use canfield::{forward_kinematics, BaseState, Configuration, Plane, PointingMode};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn field_matches_configuration_normal() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut n = 0;
    while n < 10_000 {
        let d = random_design(&mut rng);
        let s = BaseState::new([0, 1, 2].map(|_| rng.random_range(-PI..PI)));
        let Ok(c) = forward_kinematics(&d, &s) else { continue };
        if c.distal_center.norm() < 1e-6 {
            continue;
        }
        n += 1;
        let f = distal_normal_field(&c.distal_center).unwrap();
        assert!(
            (f - c.distal_normal).norm() <= 1e-12 * 10.0,
            "{f:?} {:?}",
            c.distal_normal
        );
    }
}

#[test]
fn field_doubles_polar_angle() {
    for k in 0..1000 {
        let theta = PI * k as f64 / 999.0;
        let rho = RadialFrame::at_azimuth(0.37 * k as f64).rho();
        let x = theta.sin() * rho + theta.cos() * V3::z();
        let want = (2.0 * theta).sin() * rho + (2.0 * theta).cos() * V3::z();
        assert!((distal_normal_field(&x).unwrap() - want).norm() <= 1e-12);
    }
}

proptest! {
    #[test]
    fn parametrization_stays_on_cubic(t_vec in vec_strategy(5.0), s in -10.0..10.0f64) {
        prop_assume!(t_vec.x.hypot(t_vec.y) > 1e-3);
        let locus = AffineLocus::new(&t_vec);
        let AffineLocus::PlanarCubic { frame, .. } = locus else { panic!() };
        let n = t_vec.norm();
        let r = locus.point(s * n).unwrap();
        let (rho, z) = frame.coords(&r);
        prop_assert!(affine_locus_residual(&t_vec, &frame, rho, z).abs() <= 1e-9 * n.powi(3));
        prop_assert!(r.dot(&frame.rho().cross(&V3::z())).abs() <= 1e-12 * n * 10.0);
    }

    #[test]
    fn parametrization_points_at_target(t_vec in vec_strategy(5.0), s in -10.0..10.0f64) {
        prop_assume!(t_vec.x.hypot(t_vec.y) > 1e-3);
        let locus = AffineLocus::new(&t_vec);
        let n = t_vec.norm();
        let r = locus.point(s * n).unwrap();
        prop_assume!(r.norm() > 1e-6 * n);
        let mode = if s <= 0.0 { PointingMode::Forward } else { PointingMode::Backward };
        let d = canfield::standard_design(3f64.sqrt(), 2.0).unwrap();
        let c = Configuration::from_midplane(&d, [V3::zeros(); 3], Plane::new(r, 0.5 * r).unwrap());
        prop_assert!((c.distal_center - r).norm() <= 1e-9 * (1.0 + n));
        prop_assert!(c.ray_distance(&t_vec, mode) <= 1e-8 * (1.0 + n), "{}", c.ray_distance(&t_vec, mode));
    }

    #[test]
    fn line_pair_factorizes_quadratic(nv in vec_strategy(3.0), rho in -4.0..4.0f64, z in -4.0..4.0f64) {
        prop_assume!(nv.x.hypot(nv.y) > 1e-3);
        let frame = RadialFrame::from_horizontal(&nv).unwrap();
        let (nr, nz) = frame.coords(&nv);
        let len = nv.norm();
        let lhs = (nr * rho + (nz + len) * z) * (nr * rho + (nz - len) * z);
        let rhs = -nr * azel_locus_residual(&nv, &frame, rho, z);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + len * len) * (1.0 + rho * rho + z * z) * 10.0);
    }

    #[test]
    fn azel_lines_are_orthogonal_and_tangent_to_cubic(t_vec in vec_strategy(5.0)) {
        prop_assume!(t_vec.x.hypot(t_vec.y) > 1e-3);
        let az = AzElLocus::new(&t_vec).unwrap();
        let (AzElBranch::Line(fwd), AzElBranch::Line(bwd)) = (az.forward, az.backward) else { panic!() };
        prop_assert!(fwd.dot(&bwd).abs() <= 1e-12);
        let locus = AffineLocus::new(&t_vec);
        let [t0, t1] = locus.node_parameters().unwrap();
        for (t, dir) in [(t0, fwd), (t1, bwd)] {
            prop_assert!(locus.point(t).unwrap().norm() <= 1e-12 * t_vec.norm() * 10.0);
            let tangent = locus.derivative(t).unwrap().normalize();
            prop_assert!(tangent.cross(&dir).norm() <= 1e-9);
            // analytic derivative agrees with a central difference
            let h = 1e-6 * t_vec.norm();
            let fd = (locus.point(t + h).unwrap() - locus.point(t - h).unwrap()) / (2.0 * h);
            prop_assert!((fd - locus.derivative(t).unwrap()).norm() <= 1e-6 * (1.0 + fd.norm()));
        }
    }
}

#[test]
fn locus_oracle_agrees_with_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut on = 0;
    for _ in 0..10_000 {
        let t = random_vec(&mut rng, 4.0);
        if t.x.hypot(t.y) < 1e-3 {
            continue;
        }
        let locus = AffineLocus::new(&t);
        let x = if rng.random_bool(0.5) {
            locus.point(rng.random_range(-10.0..10.0) * t.norm()).unwrap()
        } else if rng.random_bool(0.5) {
            let AffineLocus::PlanarCubic { frame, .. } = locus else {
                unreachable!()
            };
            frame.point(rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0))
        } else {
            random_vec(&mut rng, 6.0)
        };
        if x.norm() < 1e-6 {
            continue;
        }
        let brute = locus_membership_bruteforce(&t, &x, 1e-7 * (1.0 + t.norm()));
        let analytic = locus.contains(&x, 1e-9 * (1.0 + x.norm()).powi(3));
        assert_eq!(brute, analytic, "{t:?} {x:?}");
        on += brute as usize;
    }
    assert!(on > 3000);
}

#[test]
fn degenerate_target_locus_is_axis_and_sphere() {
    let t = V3::new(0.0, 0.0, 1.5);
    let locus = AffineLocus::new(&t);
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..1000 {
        let x = t + 1.5 * random_unit(&mut rng);
        assert!(locus.contains(&x, 1e-12));
        assert!(locus_membership_bruteforce(&t, &x, 1e-9) || x.norm() < 1e-9);
        let z = V3::new(0.0, 0.0, rng.random_range(-5.0..5.0));
        assert!(locus.contains(&z, 1e-12));
    }
}

#[test]
fn feasibility_agrees_with_solving() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let mut feasible = 0;
    for _ in 0..10_000 {
        let d = random_design(&mut rng);
        let leg = rng.random_range(0..3);
        let q = d.hinge(leg) + random_vec(&mut rng, 1.5 * d.arm_length(leg));
        let dir = random_unit(&mut rng);
        let mode = if rng.random_bool(0.5) {
            PointingMode::Forward
        } else {
            PointingMode::Backward
        };
        let v = feasible_direction(&d, &q, &dir, mode).unwrap();
        let n = half_angle_normal(&(mode.sign() * dir)).unwrap();
        let solved = !solve_midjoints(&d, &Plane::new(n, q).unwrap()).is_empty();
        assert_eq!(v.feasible, solved, "{q:?} {dir:?} {:?}", v.margins);
        feasible += solved as usize;
    }
    assert!(feasible > 500, "{feasible}");
}
