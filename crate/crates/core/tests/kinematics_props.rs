mod common;

use canfield::model::{
    base_angle, default_pointing_tol, midjoint_position, points_at, points_at_by_reflection, wrap_angle,
};
use canfield::{forward_kinematics, BaseState, Error, PointingMode};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn base_angle_inverts_midjoint_position() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let d = random_design(&mut rng);
    for _ in 0..10_000 {
        let leg = rng.random_range(0..3);
        let theta = rng.random_range(-PI..PI);
        let m = midjoint_position(&d, leg, theta);
        let back = base_angle(&d, leg, &m).unwrap();
        assert!(wrap_angle(back - theta).abs() <= 1e-12, "{theta} -> {back}");
    }
}

proptest! {
    #[test]
    fn distal_hinges_are_congruent(d in design_strategy(), a in prop::array::uniform3(-PI..PI)) {
        let c = match forward_kinematics(&d, &BaseState::new(a)) {
            Ok(c) => c,
            Err(Error::Colinear { .. }) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let base = d.hinge_distance(i, j);
            let distal = (c.distal_hinges[i] - c.distal_hinges[j]).norm();
            prop_assert!((base - distal).abs() <= 1e-12 * base * 10.0);
        }
        let h = c.distal_hinges;
        let n = (h[1] - h[0]).cross(&(h[2] - h[0])).normalize();
        prop_assert!((n - c.distal_normal).norm() <= 1e-9);
        for i in 0..3 {
            let back = c.midplane.reflect(&c.distal_hinges[i]);
            prop_assert!((back - d.hinge(i)).norm() <= 1e-12 * 10.0 * (1.0 + d.scale()));
        }
        prop_assert!(c.midplane.reflect(&c.distal_center).norm() <= 1e-11 * (1.0 + d.scale()));
    }
}

#[test]
fn ray_and_reflection_tests_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut hits = 0;
    let mut n = 0;
    while n < 10_000 {
        let d = random_design(&mut rng);
        let state = BaseState::new([0, 1, 2].map(|_| rng.random_range(-PI..PI)));
        let Ok(c) = forward_kinematics(&d, &state) else {
            continue;
        };
        n += 1;
        let mode = if rng.random_bool(0.5) {
            PointingMode::Forward
        } else {
            PointingMode::Backward
        };
        let t = if rng.random_bool(0.5) {
            let s = rng.random_range(-5.0..5.0);
            c.distal_center + s * c.distal_normal + random_vec(&mut rng, 1e-3) * rng.random_range(0..2) as f64
        } else {
            random_vec(&mut rng, 6.0)
        };
        let tol = default_pointing_tol(&t);
        let a = points_at(&c, &t, mode, tol);
        let b = points_at_by_reflection(&c, &t, mode, tol);
        assert_eq!(a, b, "{t:?}");
        hits += a as usize;
    }
    assert!(hits > 1000);
}
