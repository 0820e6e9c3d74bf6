//! Command-line front end for the `canfield` library.
//!
//! [`run`] parses arguments, dispatches to a command and returns the exit
//! code with the bytes for stdout and stderr, so tests can drive it without
//! spawning processes.

pub mod format;

use std::path::{Path, PathBuf};

use canfield::geometry::TANGENCY_EPS;
use canfield::ik_constrained::{
    constrained_affine_midplanes, constrained_direction_midplane, frozen_solve, plunge_affine_midplanes,
    plunge_direction_midplane, ConstrainedSolution, Goal, PointConstraint,
};
use canfield::ik_core::{midplane_for_affine, midplane_for_direction, midplane_from_distal_center, solve_midjoints};
use canfield::io::{
    to_array, ConstraintDoc, DesignDoc, FinitePlunge, FrozenDoc, PlungeDoc, PlungeSymbol, SolutionSetDoc,
};
use canfield::loci::{
    distal_normal_field, feasibility_map_with, AffineLocus, AzElBranch, AzElLocus, FeasibilityMap, MapOptions,
};
use canfield::model::{base_angle, default_pointing_tol};
use canfield::{
    forward_kinematics, BaseState, Configuration, Constraint, Error, JointDesign, Plane, PlaneFamily, PointingMode,
    SolutionSet,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use serde_json::{json, Value};

use crate::format::{emit_map, to_json, MapFormat};

/// Exit status of a command.
pub mod exit {
    pub const OK: i32 = 0;
    pub const BAD_INPUT: i32 = 1;
    pub const INFEASIBLE: i32 = 2;
    pub const VERIFICATION: i32 = 3;
}

/// Environment variable overriding the tangency tolerance coefficient.
pub const TANGENCY_ENV: &str = "CANFIELD_TANGENCY_EPS";

#[derive(Debug, Parser)]
#[command(name = "canfield", version, about = "Kinematics of generalized Canfield joints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Forward kinematics from base angles.
    Fk(FkArgs),
    /// Base angles placing the distal center at a point.
    IkDc(IkDcArgs),
    /// Base angles pointing at a target.
    IkAffine(IkAffineArgs),
    /// Base angles pointing along a direction.
    IkAzel(IkAzelArgs),
    /// Pointing with one seized midjoint.
    IkFrozen(IkFrozenArgs),
    /// Pointing with a fixed plunge distance.
    IkPlunge(IkPlungeArgs),
    /// Distal centers that can point at a target.
    LocusAffine(LocusAffineArgs),
    /// Distal centers that can point along a direction.
    LocusAzel(LocusAzelArgs),
    /// Distal normal at a distal center.
    Field(FieldArgs),
    /// Reachable distal normals on an azimuth/polar grid.
    FeasibilityMap(MapArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Forward,
    Backward,
}

impl From<Mode> for PointingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Forward => PointingMode::Forward,
            Mode::Backward => PointingMode::Backward,
        }
    }
}

#[derive(Debug, Args)]
struct DesignArg {
    /// `std:b=<b>,l=<l>`, `@design.json` or an inline JSON design.
    #[arg(long)]
    design: String,
}

#[derive(Debug, Args)]
struct ModeArg {
    #[arg(long, value_enum, default_value = "forward")]
    mode: Mode,
}

#[derive(Debug, Args)]
struct ConstraintArgs {
    /// Constraint as JSON, e.g. '{"plunge":{"p_d":1.0}}'.
    #[arg(long, conflicts_with_all = ["frozen", "plunge"])]
    constraint: Option<String>,
    /// Frozen midjoint as `leg=<1..3>,angle-deg=<deg>`.
    #[arg(long, conflicts_with = "plunge")]
    frozen: Option<String>,
    /// Plunge distance, or `inf`.
    #[arg(long, allow_hyphen_values = true)]
    plunge: Option<String>,
}

#[derive(Debug, Args)]
struct GoalArgs {
    /// Target point `x,y,z`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vec3, conflicts_with = "dir")]
    target: Option<Vector3<f64>>,
    /// Pointing direction `x,y,z`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vec3)]
    dir: Option<Vector3<f64>>,
}

#[derive(Debug, Args)]
struct FkArgs {
    #[command(flatten)]
    design: DesignArg,
    /// Base angles in degrees `a1,a2,a3`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vec3)]
    angles_deg: Vector3<f64>,
}

#[derive(Debug, Args)]
struct IkDcArgs {
    #[command(flatten)]
    design: DesignArg,
    /// Distal center `x,y,z`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vec3)]
    point: Vector3<f64>,
}

#[derive(Debug, Args)]
struct IkAffineArgs {
    #[command(flatten)]
    design: DesignArg,
    #[command(flatten)]
    mode: ModeArg,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vec3)]
    target: Vector3<f64>,
    /// Height of the reflected target on the z-axis (unconstrained only).
    #[arg(long, allow_hyphen_values = true)]
    k_z: Option<f64>,
    #[command(flatten)]
    constraint: ConstraintArgs,
}

#[derive(Debug, Args)]
struct IkAzelArgs {
    #[command(flatten)]
    design: DesignArg,
    #[command(flatten)]
    mode: ModeArg,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vec3)]
    dir: Vector3<f64>,
    /// Signed distance of the midplane from the origin (unconstrained only).
    #[arg(long, allow_hyphen_values = true)]
    offset: Option<f64>,
    #[command(flatten)]
    constraint: ConstraintArgs,
}

#[derive(Debug, Args)]
struct IkFrozenArgs {
    #[command(flatten)]
    design: DesignArg,
    #[command(flatten)]
    mode: ModeArg,
    /// Frozen midjoint as `leg=<1..3>,angle-deg=<deg>`.
    #[arg(long)]
    frozen: String,
    #[command(flatten)]
    goal: GoalArgs,
}

#[derive(Debug, Args)]
struct IkPlungeArgs {
    #[command(flatten)]
    design: DesignArg,
    #[command(flatten)]
    mode: ModeArg,
    /// Plunge distance, or `inf`.
    #[arg(long, allow_hyphen_values = true)]
    plunge: String,
    #[command(flatten)]
    goal: GoalArgs,
}

#[derive(Debug, Args)]
struct LocusAffineArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vec3)]
    target: Vector3<f64>,
    /// Number of points sampled along the cubic for t in [-10|T|, 10|T|].
    #[arg(long, default_value_t = 0)]
    samples: usize,
}

#[derive(Debug, Args)]
struct LocusAzelArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vec3)]
    dir: Vector3<f64>,
}

#[derive(Debug, Args)]
struct FieldArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vec3)]
    point: Vector3<f64>,
}

#[derive(Debug, Args)]
struct MapArgs {
    #[command(flatten)]
    design: DesignArg,
    #[command(flatten)]
    mode: ModeArg,
    #[command(flatten)]
    constraint: ConstraintArgs,
    /// Grid size `<n_az>x<n_pol>`.
    #[arg(long, default_value = "72x37", value_parser = parse_grid)]
    grid: (usize, usize),
    /// CSV output path; a JSON sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional PGM image path.
    #[arg(long)]
    pgm: Option<PathBuf>,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

impl Outcome {
    fn ok(doc: &Value) -> Self {
        Outcome {
            code: exit::OK,
            stdout: to_json(doc),
            stderr: String::new(),
        }
    }

    fn fail(code: i32, msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        stderr.push('\n');
        Outcome {
            code,
            stdout: Vec::new(),
            stderr,
        }
    }
}

type CmdResult = std::result::Result<Outcome, Outcome>;

fn bad(msg: impl std::fmt::Display) -> Outcome {
    Outcome::fail(exit::BAD_INPUT, format!("error: {msg}"))
}

fn lib_err(e: Error) -> Outcome {
    bad(e)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::BAD_INPUT } else { exit::OK };
            let text = e.render().to_string();
            return if code == exit::OK {
                Outcome {
                    code,
                    stdout: text.into_bytes(),
                    stderr: String::new(),
                }
            } else {
                Outcome::fail(code, text.trim_end())
            };
        }
    };
    let result = match cli.command {
        Command::Fk(a) => cmd_fk(a),
        Command::IkDc(a) => cmd_ik_dc(a),
        Command::IkAffine(a) => cmd_ik_affine(a),
        Command::IkAzel(a) => cmd_ik_azel(a),
        Command::IkFrozen(a) => cmd_ik_frozen(a),
        Command::IkPlunge(a) => cmd_ik_plunge(a),
        Command::LocusAffine(a) => cmd_locus_affine(a),
        Command::LocusAzel(a) => cmd_locus_azel(a),
        Command::Field(a) => cmd_field(a),
        Command::FeasibilityMap(a) => cmd_map(a),
    };
    result.unwrap_or_else(|e| e)
}

fn parse_vec3(s: &str) -> std::result::Result<Vector3<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got '{s}'"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|_| format!("'{p}' is not a number"))?;
        if !slot.is_finite() {
            return Err(format!("'{p}' is not finite"));
        }
    }
    Ok(Vector3::new(v[0], v[1], v[2]))
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, p) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid must look like 72x37, got '{s}'"))?;
    let a = a.trim().parse().map_err(|_| format!("bad azimuth count '{a}'"))?;
    let p = p.trim().parse().map_err(|_| format!("bad polar count '{p}'"))?;
    Ok((a, p))
}

fn parse_design(spec: &str) -> std::result::Result<JointDesign, Outcome> {
    let doc: DesignDoc = if let Some(rest) = spec.strip_prefix("std:") {
        let (mut b, mut l) = (None, None);
        for kv in rest.split(',') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| bad(format!("design shorthand expects key=value pairs, got '{kv}'")))?;
            let v: f64 = v.trim().parse().map_err(|_| bad(format!("'{v}' is not a number")))?;
            match k.trim() {
                "b" => b = Some(v),
                "l" => l = Some(v),
                other => return Err(bad(format!("unknown design key '{other}'"))),
            }
        }
        let (Some(b), Some(l)) = (b, l) else {
            return Err(bad("design shorthand needs both b and l"));
        };
        DesignDoc::Standard {
            standard: canfield::io::StandardParams { b, l },
        }
    } else if let Some(path) = spec.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {path}: {e}")))?;
        serde_json::from_str(&text).map_err(|e| bad(format!("malformed design JSON in {path}: {e}")))?
    } else {
        serde_json::from_str(spec).map_err(|e| bad(format!("malformed design '{spec}': {e}")))?
    };
    doc.build().map_err(lib_err)
}

fn parse_frozen(s: &str) -> std::result::Result<ConstraintDoc, Outcome> {
    let (mut leg, mut angle) = (None, None);
    for kv in s.split(',') {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| bad(format!("frozen spec expects key=value pairs, got '{kv}'")))?;
        match k.trim() {
            "leg" => leg = Some(v.trim().parse::<usize>().map_err(|_| bad(format!("bad leg '{v}'")))?),
            "angle-deg" | "angle_deg" => {
                angle = Some(v.trim().parse::<f64>().map_err(|_| bad(format!("bad angle '{v}'")))?)
            }
            other => return Err(bad(format!("unknown frozen key '{other}'"))),
        }
    }
    let (Some(leg), Some(angle_deg)) = (leg, angle) else {
        return Err(bad("frozen spec needs leg and angle-deg"));
    };
    if !angle_deg.is_finite() {
        return Err(bad("frozen angle must be finite"));
    }
    Ok(ConstraintDoc::Frozen(FrozenDoc { leg, angle_deg }))
}

fn parse_plunge(s: &str) -> std::result::Result<ConstraintDoc, Outcome> {
    let t = s.trim();
    if matches!(t, "inf" | "infinity" | "+inf") {
        return Ok(ConstraintDoc::Plunge(PlungeDoc::Infinite(PlungeSymbol::Infinity)));
    }
    let p_d: f64 = t
        .parse()
        .map_err(|_| bad(format!("plunge must be a number or 'inf', got '{s}'")))?;
    if !p_d.is_finite() {
        return Err(bad("plunge must be finite or 'inf'"));
    }
    Ok(ConstraintDoc::Plunge(PlungeDoc::Finite(FinitePlunge { p_d })))
}

/// A constraint together with the document it was given as, for echoing.
struct ParsedConstraint {
    constraint: Constraint,
    doc: ConstraintDoc,
}

impl ParsedConstraint {
    fn build(design: &JointDesign, doc: ConstraintDoc) -> std::result::Result<Self, Outcome> {
        let constraint = doc.build(design).map_err(lib_err)?;
        Ok(ParsedConstraint { constraint, doc })
    }

    fn json(&self) -> Value {
        serde_json::to_value(self.doc).expect("constraint serializes")
    }
}

fn parse_constraint(
    design: &JointDesign,
    a: &ConstraintArgs,
) -> std::result::Result<Option<ParsedConstraint>, Outcome> {
    let doc = if let Some(j) = &a.constraint {
        serde_json::from_str(j).map_err(|e| bad(format!("malformed constraint: {e}")))?
    } else if let Some(f) = &a.frozen {
        parse_frozen(f)?
    } else if let Some(p) = &a.plunge {
        parse_plunge(p)?
    } else {
        return Ok(None);
    };
    ParsedConstraint::build(design, doc).map(Some)
}

fn tangency_eps() -> std::result::Result<f64, Outcome> {
    match std::env::var(TANGENCY_ENV) {
        Ok(v) => {
            let e: f64 = v
                .trim()
                .parse()
                .map_err(|_| bad(format!("{TANGENCY_ENV} must be a number, got '{v}'")))?;
            if !e.is_finite() || e < 0.0 {
                return Err(bad(format!("{TANGENCY_ENV} must be a nonnegative number")));
            }
            Ok(e)
        }
        Err(_) => Ok(TANGENCY_EPS),
    }
}

fn arr(v: &Vector3<f64>) -> Value {
    json!(to_array(v))
}

fn plane_json(p: &Plane) -> Value {
    serde_json::to_value(p).expect("plane serializes")
}

fn family_json(f: &PlaneFamily) -> Value {
    match f {
        PlaneFamily::Single(p) => json!({"family": "single", "plane": plane_json(p)}),
        PlaneFamily::AllThroughOrigin => json!({"family": "all_through_origin"}),
        PlaneFamily::AllThroughPoint(q) => json!({"family": "all_through_point", "point": arr(q)}),
        PlaneFamily::AllParallelToZ { through } => {
            json!({"family": "all_parallel_to_z", "through": through.as_ref().map(arr)})
        }
        PlaneFamily::AllThroughLine { point, direction } => {
            json!({"family": "all_through_line", "point": arr(point), "direction": arr(direction)})
        }
        PlaneFamily::AllOrthogonalTo(n) => json!({"family": "all_orthogonal_to", "normal": arr(n)}),
    }
}

/// What every emitted solution must achieve.
#[derive(Debug, Clone, Copy)]
enum Check {
    Target(Vector3<f64>, PointingMode),
    Direction(Vector3<f64>, PointingMode),
    DistalCenter(Vector3<f64>),
}

impl Check {
    fn from_goal(goal: Goal, mode: PointingMode) -> Self {
        match goal {
            Goal::AffineTarget(t) => Check::Target(t, mode),
            Goal::Direction(d) => Check::Direction(d, mode),
        }
    }

    /// FK-verifies a solution triple; `Err` describes the failure.
    ///
    /// When the midjoints are colinear FK cannot recover the midplane, so
    /// the configuration is rebuilt from the solved `plane` instead, after
    /// checking that the midjoints lie on it.
    fn verify(&self, design: &JointDesign, m: &[Vector3<f64>; 3], plane: &Plane) -> std::result::Result<(), String> {
        let mut angles = [0.0; 3];
        for (i, a) in angles.iter_mut().enumerate() {
            *a = base_angle(design, i, &m[i]).map_err(|e| e.to_string())?;
        }
        let scale = 1.0 + design.scale();
        let c = match forward_kinematics(design, &BaseState::new(angles)) {
            Ok(c) => c,
            Err(Error::Colinear { .. }) => {
                if let Some(i) = (0..3).find(|&i| plane.signed_distance(&m[i]).abs() > 1e-9 * scale) {
                    return Err(format!("midjoint {} is off the solved midplane", i + 1));
                }
                Configuration::from_midplane(design, *m, *plane)
            }
            Err(e) => return Err(e.to_string()),
        };
        let (residual, tol) = match *self {
            Check::Target(t, mode) => (c.ray_distance(&t, mode), default_pointing_tol(&t) * scale),
            Check::Direction(d, mode) => ((c.distal_normal - mode.sign() * d.normalize()).norm(), 1e-9 * scale),
            Check::DistalCenter(x) => ((c.distal_center - x).norm(), 1e-9 * (scale + x.norm())),
        };
        if residual <= tol {
            Ok(())
        } else {
            Err(format!("pointing residual {residual:e} exceeds {tol:e}"))
        }
    }
}

/// A candidate midplane with its solved midjoints.
struct Branch {
    plane: Plane,
    k_point: Option<Vector3<f64>>,
    set: SolutionSet,
}

fn verified_branches(
    design: &JointDesign,
    branches: &[Branch],
    check: Check,
) -> std::result::Result<Vec<Value>, Outcome> {
    let mut out = Vec::new();
    for b in branches {
        for m in b.set.finite().unwrap_or(&[]) {
            check.verify(design, m, &b.plane).map_err(|e| {
                Outcome::fail(
                    exit::VERIFICATION,
                    format!("internal error: solution failed verification: {e}"),
                )
            })?;
        }
        let doc = SolutionSetDoc::new(design, &b.set).map_err(|e| {
            Outcome::fail(
                exit::VERIFICATION,
                format!("internal error: solution off its midcircle: {e}"),
            )
        })?;
        let mut v = json!({
            "midplane": plane_json(&b.plane),
            "solution_set": serde_json::to_value(doc).expect("solution set serializes"),
        });
        if let Some(k) = b.k_point {
            v["k_point"] = arr(&k);
        }
        out.push(v);
    }
    Ok(out)
}

/// Emits an IK document; exit 2 when nothing was found.
fn ik_outcome(
    command: &str,
    design: &JointDesign,
    branches: Vec<Branch>,
    family: Option<&PlaneFamily>,
    check: Check,
    extra: Value,
) -> CmdResult {
    let docs = verified_branches(design, &branches, check)?;
    let solvable = branches.iter().any(|b| !b.set.is_empty()) || family.is_some();
    let mut doc = json!({
        "command": command,
        "branches": docs,
        "family": family.map(family_json),
    });
    if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
        d.extend(e);
    }
    let mut out = Outcome::ok(&doc);
    if !solvable {
        out.code = exit::INFEASIBLE;
        out.stderr = "no configuration reaches the goal\n".into();
    }
    Ok(out)
}

fn solve_planes(design: &JointDesign, planes: &[Plane], k_points: &[Vector3<f64>]) -> Vec<Branch> {
    planes
        .iter()
        .enumerate()
        .map(|(i, p)| Branch {
            plane: *p,
            k_point: k_points.get(i).copied(),
            set: solve_midjoints(design, p),
        })
        .collect()
}

fn cmd_fk(a: FkArgs) -> CmdResult {
    let design = parse_design(&a.design.design)?;
    let state = BaseState::from_degrees(to_array(&a.angles_deg));
    let c = match forward_kinematics(&design, &state) {
        Ok(c) => c,
        Err(e @ Error::Colinear { .. }) => return Err(Outcome::fail(exit::INFEASIBLE, format!("singular: {e}"))),
        Err(e) => return Err(lib_err(e)),
    };
    Ok(Outcome::ok(&json!({
        "command": "fk",
        "angles_deg": state.angles_deg(),
        "midjoints": c.midjoints.map(|m| to_array(&m)),
        "midplane": plane_json(&c.midplane),
        "distal_hinges": c.distal_hinges.map(|m| to_array(&m)),
        "distal_center": arr(&c.distal_center),
        "distal_normal": arr(&c.distal_normal),
    })))
}

fn cmd_ik_dc(a: IkDcArgs) -> CmdResult {
    let design = parse_design(&a.design.design)?;
    let extra = json!({"distal_center": arr(&a.point)});
    match midplane_from_distal_center(&a.point) {
        PlaneFamily::Single(p) => ik_outcome(
            "ik-dc",
            &design,
            solve_planes(&design, &[p], &[]),
            None,
            Check::DistalCenter(a.point),
            extra,
        ),
        fam => ik_outcome(
            "ik-dc",
            &design,
            Vec::new(),
            Some(&fam),
            Check::DistalCenter(a.point),
            extra,
        ),
    }
}

fn constrained_affine(
    design: &JointDesign,
    constraint: &Constraint,
    target: Vector3<f64>,
    mode: PointingMode,
) -> std::result::Result<(Vec<Branch>, Option<PlaneFamily>, Value), Outcome> {
    let solved = |s: ConstrainedSolution| {
        let extra = json!({"case": s.case, "existence": s.existence});
        (solve_planes(design, &s.planes, &s.k_points), s.family, extra)
    };
    Ok(match constraint {
        Constraint::Frozen(f) => {
            let s = frozen_solve(design, f, Goal::AffineTarget(target), mode).map_err(lib_err)?;
            let sol = constrained_affine_midplanes(&f.as_point(), &target, mode);
            let branches = s
                .branches
                .into_iter()
                .map(|(plane, set)| {
                    let k = sol.planes.iter().position(|p| *p == plane).map(|i| sol.k_points[i]);
                    Branch { plane, k_point: k, set }
                })
                .collect();
            (
                branches,
                s.family,
                json!({"case": sol.case, "existence": sol.existence}),
            )
        }
        Constraint::Plunge(p) => solved(plunge_affine_midplanes(p, &target, mode)),
        Constraint::Point(q) => solved(constrained_affine_midplanes(&PointConstraint::new(*q), &target, mode)),
    })
}

fn constrained_direction(
    design: &JointDesign,
    constraint: &Constraint,
    dir: Vector3<f64>,
    mode: PointingMode,
) -> std::result::Result<(Vec<Branch>, Option<PlaneFamily>), Outcome> {
    let family = match constraint {
        Constraint::Frozen(f) => {
            let s = frozen_solve(design, f, Goal::Direction(dir), mode).map_err(lib_err)?;
            let branches = s
                .branches
                .into_iter()
                .map(|(plane, set)| Branch {
                    plane,
                    k_point: None,
                    set,
                })
                .collect();
            return Ok((branches, s.family));
        }
        Constraint::Plunge(p) => match plunge_direction_midplane(p, &dir, mode) {
            Ok(f) => f,
            Err(Error::InfinitePlunge) => return Ok((Vec::new(), None)),
            Err(e) => return Err(lib_err(e)),
        },
        Constraint::Point(q) => {
            constrained_direction_midplane(&PointConstraint::new(*q), &dir, mode).map_err(lib_err)?
        }
    };
    Ok(match family {
        PlaneFamily::Single(p) => (solve_planes(design, &[p], &[]), None),
        fam => (Vec::new(), Some(fam)),
    })
}

fn cmd_ik_affine(a: IkAffineArgs) -> CmdResult {
    let design = parse_design(&a.design.design)?;
    let mode: PointingMode = a.mode.mode.into();
    let check = Check::Target(a.target, mode);
    match parse_constraint(&design, &a.constraint)? {
        Some(c) => {
            if a.k_z.is_some() {
                return Err(bad("--k-z cannot be combined with a constraint"));
            }
            let (branches, family, mut extra) = constrained_affine(&design, &c.constraint, a.target, mode)?;
            extra["constraint"] = c.json();
            ik_outcome("ik-affine", &design, branches, family.as_ref(), check, extra)
        }
        None => {
            let k_z = a.k_z.ok_or_else(|| bad("ik-affine needs --k-z or a constraint"))?;
            let plane = midplane_for_affine(&a.target, k_z, mode).map_err(lib_err)?;
            let k = Vector3::new(0.0, 0.0, k_z);
            ik_outcome(
                "ik-affine",
                &design,
                solve_planes(&design, &[plane], &[k]),
                None,
                check,
                json!({}),
            )
        }
    }
}

fn cmd_ik_azel(a: IkAzelArgs) -> CmdResult {
    let design = parse_design(&a.design.design)?;
    let mode: PointingMode = a.mode.mode.into();
    let check = Check::Direction(a.dir, mode);
    match parse_constraint(&design, &a.constraint)? {
        Some(c) => {
            if a.offset.is_some() {
                return Err(bad("--offset cannot be combined with a constraint"));
            }
            let (branches, family) = constrained_direction(&design, &c.constraint, a.dir, mode)?;
            let extra = json!({"constraint": c.json()});
            ik_outcome("ik-azel", &design, branches, family.as_ref(), check, extra)
        }
        None => {
            let fam = midplane_for_direction(&a.dir, mode).map_err(lib_err)?;
            match (fam, a.offset) {
                (PlaneFamily::AllOrthogonalTo(n), Some(h)) => {
                    let plane = Plane::new(n, h * n).map_err(lib_err)?;
                    ik_outcome(
                        "ik-azel",
                        &design,
                        solve_planes(&design, &[plane], &[]),
                        None,
                        check,
                        json!({}),
                    )
                }
                (PlaneFamily::AllParallelToZ { .. }, Some(_)) => Err(bad(
                    "straight-down pointing admits every vertical midplane; use a constraint instead of --offset",
                )),
                (fam, _) => ik_outcome("ik-azel", &design, Vec::new(), Some(&fam), check, json!({})),
            }
        }
    }
}

fn goal_from(g: &GoalArgs) -> std::result::Result<Goal, Outcome> {
    match (g.target, g.dir) {
        (Some(t), None) => Ok(Goal::AffineTarget(t)),
        (None, Some(d)) => Ok(Goal::Direction(d)),
        _ => Err(bad("exactly one of --target or --dir is required")),
    }
}

fn constrained_goal(
    command: &str,
    design: &JointDesign,
    c: ParsedConstraint,
    goal: Goal,
    mode: PointingMode,
) -> CmdResult {
    let check = Check::from_goal(goal, mode);
    let (branches, family, mut extra) = match goal {
        Goal::AffineTarget(t) => constrained_affine(design, &c.constraint, t, mode)?,
        Goal::Direction(d) => {
            let (b, f) = constrained_direction(design, &c.constraint, d, mode)?;
            (b, f, json!({}))
        }
    };
    extra["constraint"] = c.json();
    ik_outcome(command, design, branches, family.as_ref(), check, extra)
}

fn cmd_ik_frozen(a: IkFrozenArgs) -> CmdResult {
    let design = parse_design(&a.design.design)?;
    let c = ParsedConstraint::build(&design, parse_frozen(&a.frozen)?)?;
    let goal = goal_from(&a.goal)?;
    constrained_goal("ik-frozen", &design, c, goal, a.mode.mode.into())
}

fn cmd_ik_plunge(a: IkPlungeArgs) -> CmdResult {
    let design = parse_design(&a.design.design)?;
    let c = ParsedConstraint::build(&design, parse_plunge(&a.plunge)?)?;
    let goal = goal_from(&a.goal)?;
    constrained_goal("ik-plunge", &design, c, goal, a.mode.mode.into())
}

fn cmd_locus_affine(a: LocusAffineArgs) -> CmdResult {
    let locus = AffineLocus::new(&a.target);
    let doc = match locus {
        AffineLocus::PlanarCubic { target, frame } => {
            let (t_rho, t_z) = frame.coords(&target);
            let n = target.norm();
            let samples: Vec<Value> = (0..a.samples)
                .map(|k| {
                    let t = if a.samples == 1 {
                        0.0
                    } else {
                        -10.0 * n + 20.0 * n * k as f64 / (a.samples - 1) as f64
                    };
                    let mode = if t <= 0.0 { "forward" } else { "backward" };
                    json!({"t": t, "point": arr(&locus.point(t).expect("cubic")), "mode": mode})
                })
                .collect();
            json!({
                "command": "locus-affine",
                "kind": "planar_cubic",
                "target": arr(&target),
                "frame_rho": arr(&frame.rho()),
                "target_rho": t_rho,
                "target_z": t_z,
                "node_parameters": locus.node_parameters(),
                "samples": samples,
            })
        }
        AffineLocus::ZUnionSphere { center, radius } => json!({
            "command": "locus-affine",
            "kind": "z_union_sphere",
            "target": arr(&a.target),
            "center": arr(&center),
            "radius": radius,
        }),
    };
    Ok(Outcome::ok(&doc))
}

fn branch_json(b: AzElBranch) -> Value {
    match b {
        AzElBranch::Line(d) => json!({"kind": "line", "direction": arr(&d)}),
        AzElBranch::BasePlane => json!({"kind": "base_plane"}),
    }
}

fn cmd_locus_azel(a: LocusAzelArgs) -> CmdResult {
    let l = AzElLocus::new(&a.dir).map_err(lib_err)?;
    Ok(Outcome::ok(&json!({
        "command": "locus-azel",
        "dir": arr(&a.dir),
        "forward": branch_json(l.forward),
        "backward": branch_json(l.backward),
    })))
}

fn cmd_field(a: FieldArgs) -> CmdResult {
    let n = distal_normal_field(&a.point).map_err(lib_err)?;
    Ok(Outcome::ok(&json!({
        "command": "field",
        "point": arr(&a.point),
        "distal_normal": arr(&n),
    })))
}

fn sidecar_json(map: &FeasibilityMap, constraint: &ParsedConstraint, eps: f64) -> Value {
    json!({
        "command": "feasibility-map",
        "constraint": constraint.json(),
        "mode": map.mode,
        "grid": {
            "n_az": map.n_az,
            "n_pol": map.n_pol,
            "azimuth": "i*360/n_az deg, i = 0..n_az-1",
            "polar": "(j+0.5)*180/n_pol deg, j = 0..n_pol-1",
            "order": "polar-major",
        },
        "tangency_eps": eps,
        "feasible_cells": map.cells.iter().filter(|&&f| f).count(),
        "feasible_fraction": map.feasible_fraction,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> std::result::Result<(), Outcome> {
    std::fs::write(path, bytes).map_err(|e| bad(format!("cannot write {}: {e}", path.display())))
}

fn cmd_map(a: MapArgs) -> CmdResult {
    let design = parse_design(&a.design.design)?;
    let parsed = parse_constraint(&design, &a.constraint)?.ok_or_else(|| bad("feasibility-map needs a constraint"))?;
    let constraint = parsed.constraint;
    let eps = tangency_eps()?;
    let options = MapOptions {
        tangency_eps: eps,
        ..MapOptions::default()
    };
    let (n_az, n_pol) = a.grid;
    let map = match feasibility_map_with(&design, &constraint, n_az, n_pol, a.mode.mode.into(), &options) {
        Ok(m) => m,
        Err(Error::InfinitePlunge) => {
            return Err(Outcome::fail(
                exit::INFEASIBLE,
                "an infinite plunge only reaches the straight-down normal, which no grid cell contains",
            ))
        }
        Err(e) => return Err(lib_err(e)),
    };
    if let Some(p) = &a.pgm {
        write_file(p, &emit_map(&map, MapFormat::Pgm))?;
    }
    let sidecar = sidecar_json(&map, &parsed, eps);
    match &a.out {
        Some(path) => {
            write_file(path, &emit_map(&map, MapFormat::Csv))?;
            write_file(&path.with_extension("json"), &to_json(&sidecar))?;
            Ok(Outcome::ok(&sidecar))
        }
        None => Ok(Outcome {
            code: exit::OK,
            stdout: emit_map(&map, MapFormat::Csv),
            stderr: String::new(),
        }),
    }
}
