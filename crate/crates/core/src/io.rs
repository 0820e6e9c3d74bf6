//! Serializable documents for designs, states, solution sets and constraints.
//!
//! Angles are in degrees and legs are numbered from 1 in these documents.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ik_constrained::{Constraint, FrozenMidjoint, PlungeConstraint};
use crate::ik_core::SolutionSet;
use crate::model::{base_angle, standard_design, BaseState, JointDesign};

pub fn to_array(v: &Vector3<f64>) -> [f64; 3] {
    [v.x, v.y, v.z]
}

pub fn from_array(a: [f64; 3]) -> Vector3<f64> {
    Vector3::new(a[0], a[1], a[2])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardParams {
    pub b: f64,
    pub l: f64,
}

/// Either the standard shorthand or every design vector spelled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)]
pub enum DesignDoc {
    Standard {
        standard: StandardParams,
    },
    Explicit {
        hinges: [[f64; 3]; 3],
        axes: [[f64; 3]; 3],
        arm_lengths: [f64; 3],
        zero_dirs: [[f64; 3]; 3],
    },
}

impl DesignDoc {
    pub fn build(&self) -> Result<JointDesign> {
        match self {
            DesignDoc::Standard { standard } => standard_design(standard.b, standard.l),
            DesignDoc::Explicit {
                hinges,
                axes,
                arm_lengths,
                zero_dirs,
            } => JointDesign::new(
                hinges.map(from_array),
                axes.map(from_array),
                *arm_lengths,
                zero_dirs.map(from_array),
            ),
        }
    }

    pub fn explicit(design: &JointDesign) -> Self {
        DesignDoc::Explicit {
            hinges: design.hinges().map(|v| to_array(&v)),
            axes: design.axes().map(|v| to_array(&v)),
            arm_lengths: *design.arm_lengths(),
            zero_dirs: design.zero_dirs().map(|v| to_array(&v)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub angles_deg: [f64; 3],
}

impl From<&BaseState> for StateDoc {
    fn from(s: &BaseState) -> Self {
        StateDoc {
            angles_deg: s.angles_deg(),
        }
    }
}

impl From<StateDoc> for BaseState {
    fn from(d: StateDoc) -> Self {
        BaseState::from_degrees(d.angles_deg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub midjoints: [[f64; 3]; 3],
    pub angles_deg: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SolutionSetDoc {
    Finite {
        solutions: Vec<SolutionDoc>,
    },
    Empty,
    Infinite {
        /// First leg whose whole midcircle lies in the plane.
        free_leg: usize,
        free_legs: Vec<usize>,
        /// Midjoint candidates for each leg; empty for free legs.
        fixed: Vec<Vec<[f64; 3]>>,
    },
}

impl SolutionSetDoc {
    pub fn new(design: &JointDesign, set: &SolutionSet) -> Result<Self> {
        Ok(match set {
            SolutionSet::Empty => SolutionSetDoc::Empty,
            SolutionSet::Finite(triples) => SolutionSetDoc::Finite {
                solutions: triples
                    .iter()
                    .map(|m| {
                        let mut angles_deg = [0.0; 3];
                        for (i, a) in angles_deg.iter_mut().enumerate() {
                            *a = base_angle(design, i, &m[i])?.to_degrees();
                        }
                        Ok(SolutionDoc {
                            midjoints: m.map(|v| to_array(&v)),
                            angles_deg,
                        })
                    })
                    .collect::<Result<_>>()?,
            },
            SolutionSet::Infinite(inf) => SolutionSetDoc::Infinite {
                free_leg: inf.free_legs[0] + 1,
                free_legs: inf.free_legs.iter().map(|i| i + 1).collect(),
                fixed: inf.fixed.iter().map(|pts| pts.iter().map(to_array).collect()).collect(),
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrozenDoc {
    /// 1-based leg index.
    pub leg: usize,
    pub angle_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinitePlunge {
    pub p_d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlungeSymbol {
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlungeDoc {
    Finite(FinitePlunge),
    Infinite(PlungeSymbol),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintDoc {
    Frozen(FrozenDoc),
    Plunge(PlungeDoc),
    Point([f64; 3]),
}

impl ConstraintDoc {
    pub fn build(&self, design: &JointDesign) -> Result<Constraint> {
        Ok(match *self {
            ConstraintDoc::Frozen(f) => {
                if !(1..=3).contains(&f.leg) {
                    return Err(Error::Domain(format!("frozen leg must be 1, 2 or 3, got {}", f.leg)));
                }
                Constraint::Frozen(FrozenMidjoint::new(design, f.leg - 1, f.angle_deg.to_radians())?)
            }
            ConstraintDoc::Plunge(PlungeDoc::Finite(p)) => {
                if !p.p_d.is_finite() {
                    return Err(Error::Domain("plunge distance must be finite or \"infinity\"".into()));
                }
                Constraint::Plunge(PlungeConstraint::Finite(p.p_d))
            }
            ConstraintDoc::Plunge(PlungeDoc::Infinite(_)) => Constraint::Plunge(PlungeConstraint::Infinite),
            ConstraintDoc::Point(q) => Constraint::Point(from_array(q)),
        })
    }

    pub fn from_constraint(c: &Constraint) -> Self {
        match c {
            Constraint::Frozen(f) => ConstraintDoc::Frozen(FrozenDoc {
                leg: f.leg() + 1,
                angle_deg: f.angle().to_degrees(),
            }),
            Constraint::Plunge(PlungeConstraint::Finite(p)) => {
                ConstraintDoc::Plunge(PlungeDoc::Finite(FinitePlunge { p_d: *p }))
            }
            Constraint::Plunge(PlungeConstraint::Infinite) => {
                ConstraintDoc::Plunge(PlungeDoc::Infinite(PlungeSymbol::Infinity))
            }
            Constraint::Point(q) => ConstraintDoc::Point(to_array(q)),
        }
    }
}
