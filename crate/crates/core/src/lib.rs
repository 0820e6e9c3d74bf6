//! Kinematics of generalized Canfield joints.
//!
//! A Canfield joint has three legs, each with a base hinge, a midjoint on a
//! circle about that hinge, and a distal hinge mirrored through the plane of
//! the midjoints. Everything the distal plate does is the reflection of the
//! base through that midplane, so forward and inverse problems reduce to
//! finding planes.
//!
//! Legs are numbered 0, 1, 2 and angles are in radians throughout the
//! library; the [`io`] documents use 1-based legs and degrees.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod geometry;
pub mod ik_constrained;
pub mod ik_core;
pub mod io;
pub mod loci;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{Circle3D, CircleIntersection, IntersectionKind, Plane};
pub use ik_constrained::{Constraint, FrozenMidjoint, PlungeConstraint};
pub use ik_core::{PlaneFamily, SolutionSet};
pub use model::{forward_kinematics, standard_design, BaseState, Configuration, JointDesign, PointingMode};
