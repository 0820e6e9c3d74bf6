#![allow(dead_code)]

use std::f64::consts::PI;

use canfield::geometry::Plane;
use canfield::JointDesign;
use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;
use rand::Rng;

pub type V3 = Vector3<f64>;

/// Builds a design from raw parameters: a start azimuth, two hinge gaps, three
/// hinge radii, three axis tilts away from tangential, three zero-direction
/// elevations and three arm lengths.
pub fn design_from(p: [f64; 15]) -> Option<JointDesign> {
    let (g1, g2) = (p[1], p[2]);
    let g3 = 2.0 * PI - g1 - g2;
    if g3 < 0.5 {
        return None;
    }
    let az = [p[0], p[0] + g1, p[0] + g1 + g2];
    let mut hinges = [V3::zeros(); 3];
    let mut axes = [V3::zeros(); 3];
    let mut zero = [V3::zeros(); 3];
    for i in 0..3 {
        let radial = V3::new(az[i].cos(), az[i].sin(), 0.0);
        hinges[i] = p[3 + i] * radial;
        let tilt = Rotation3::from_axis_angle(&V3::z_axis(), p[6 + i]);
        axes[i] = tilt * V3::z().cross(&radial);
        let out = axes[i].cross(&V3::z());
        zero[i] = p[9 + i].cos() * out + p[9 + i].sin() * V3::z();
    }
    JointDesign::new(hinges, axes, [p[12], p[13], p[14]], zero).ok()
}

fn params_in(rng: &mut impl Rng) -> [f64; 15] {
    let mut p = [0.0; 15];
    p[0] = rng.random_range(0.0..2.0 * PI);
    p[1] = rng.random_range(0.8..2.6);
    p[2] = rng.random_range(0.8..2.6);
    for v in &mut p[3..6] {
        *v = rng.random_range(0.5..2.0);
    }
    for v in &mut p[6..9] {
        *v = rng.random_range(-0.6..0.6);
    }
    for v in &mut p[9..12] {
        *v = rng.random_range(-0.8..0.8);
    }
    for v in &mut p[12..15] {
        *v = rng.random_range(0.5..3.0);
    }
    p
}

pub fn random_design(rng: &mut impl Rng) -> JointDesign {
    loop {
        if let Some(d) = design_from(params_in(rng)) {
            return d;
        }
    }
}

pub fn random_unit(rng: &mut impl Rng) -> V3 {
    loop {
        let v = V3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn random_vec(rng: &mut impl Rng, r: f64) -> V3 {
    V3::new(
        rng.random_range(-r..r),
        rng.random_range(-r..r),
        rng.random_range(-r..r),
    )
}

/// A plane through a point near one of the midcircles, so it often cuts them.
pub fn random_plane_near(rng: &mut impl Rng, design: &JointDesign) -> Plane {
    let leg = rng.random_range(0..3);
    let c = design.hinge(leg);
    let l = design.arm_length(leg);
    let p = c + random_vec(rng, 1.2 * l);
    Plane::new(random_unit(rng), p).unwrap()
}

pub fn design_strategy() -> impl Strategy<Value = JointDesign> {
    (
        0.0..2.0 * PI,
        0.8..2.6f64,
        0.8..2.6f64,
        prop::array::uniform3(0.5..2.0f64),
        prop::array::uniform3(-0.6..0.6f64),
        prop::array::uniform3(-0.8..0.8f64),
        prop::array::uniform3(0.5..3.0f64),
    )
        .prop_filter_map("hinge gaps too uneven", |(a, g1, g2, r, t, e, l)| {
            design_from([
                a, g1, g2, r[0], r[1], r[2], t[0], t[1], t[2], e[0], e[1], e[2], l[0], l[1], l[2],
            ])
        })
}

pub fn vec_strategy(r: f64) -> impl Strategy<Value = V3> {
    prop::array::uniform3(-r..r).prop_map(|a| V3::new(a[0], a[1], a[2]))
}

pub fn unit_strategy() -> impl Strategy<Value = V3> {
    vec_strategy(1.0).prop_filter_map("too short", |v| {
        let n = v.norm();
        (n > 0.1).then(|| v / n)
    })
}
