use std::process::{Command, Output};

use serde_json::Value;

const STD: &str = "std:b=1.7320508075688772,l=2";

fn canfield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_canfield"))
        .args(args)
        .output()
        .expect("spawn")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn vec3(v: &Value) -> [f64; 3] {
    let a = v.as_array().unwrap();
    [0, 1, 2].map(|i| a[i].as_f64().unwrap())
}

#[test]
fn help_lists_commands() {
    let out = canfield(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for c in [
        "fk",
        "ik-dc",
        "ik-affine",
        "ik-azel",
        "ik-frozen",
        "ik-plunge",
        "feasibility-map",
    ] {
        assert!(text.contains(c), "{c}");
    }
}

#[test]
fn malformed_input_exits_one() {
    for args in [
        vec!["fk", "--design", "{bad", "--angles-deg", "0,0,0"],
        vec!["fk", "--design", STD, "--angles-deg", "0,0"],
        vec!["fk", "--design", "std:b=-1,l=2", "--angles-deg", "0,0,0"],
        vec![
            "ik-frozen",
            "--design",
            STD,
            "--frozen",
            "leg=4,angle-deg=0",
            "--target",
            "1,1,1",
        ],
        vec!["no-such-command"],
    ] {
        let out = canfield(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unreachable_goal_exits_two() {
    let out = canfield(&["ik-dc", "--design", STD, "--point", "0,0,50"]);
    assert_eq!(out.status.code(), Some(2));
    let out = canfield(&["feasibility-map", "--design", STD, "--plunge", "inf", "--grid", "8x5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fk_ik_roundtrip() {
    let angles = [12.5, -40.0, 77.0];
    let a = format!("{},{},{}", angles[0], angles[1], angles[2]);
    let fk = json(&canfield(&["fk", "--design", STD, "--angles-deg", &a]));
    let dc = vec3(&fk["distal_center"]);
    let p = format!("{},{},{}", dc[0], dc[1], dc[2]);
    let ik = canfield(&["ik-dc", "--design", STD, "--point", &p]);
    assert!(ik.status.success());
    let ik = json(&ik);
    let sols = ik["branches"][0]["solution_set"]["solutions"].as_array().unwrap();
    let back = sols
        .iter()
        .map(|s| vec3(&s["angles_deg"]))
        .find(|s| (0..3).all(|i| (s[i] - angles[i]).abs() < 1e-7))
        .expect("original state among solutions");
    let b = format!("{},{},{}", back[0], back[1], back[2]);
    let fk2 = json(&canfield(&["fk", "--design", STD, "--angles-deg", &b]));
    let dc2 = vec3(&fk2["distal_center"]);
    for i in 0..3 {
        assert!((dc[i] - dc2[i]).abs() <= 1e-9 * 2.0);
    }
}

#[test]
fn frozen_on_axis_solutions_keep_the_frozen_leg() {
    let out = canfield(&[
        "ik-frozen",
        "--design",
        STD,
        "--target",
        "5,0,0",
        "--frozen",
        "leg=1,angle-deg=120",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["constraint"]["frozen"]["leg"], 1);
    assert_eq!(v["constraint"]["frozen"]["angle_deg"].as_f64(), Some(120.0));
    for b in v["branches"].as_array().unwrap() {
        for s in b["solution_set"]["solutions"].as_array().unwrap() {
            let m = vec3(&s["midjoints"][0]);
            assert!(m[0].abs() < 1e-12 && m[1].abs() < 1e-12);
        }
    }
}

#[test]
fn feasibility_map_writes_csv_sidecar_and_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("map.csv");
    let pgm = dir.path().join("map.pgm");
    let out = canfield(&[
        "feasibility-map",
        "--design",
        STD,
        "--plunge",
        "3",
        "--grid",
        "12x7",
        "--out",
        csv.to_str().unwrap(),
        "--pgm",
        pgm.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "az_deg,pol_deg,feasible");
    assert_eq!(lines.len(), 1 + 12 * 7);
    let image = std::fs::read_to_string(&pgm).unwrap();
    assert!(image.starts_with("P2\n12 7\n1\n"));
    let sidecar: Value = serde_json::from_str(&std::fs::read_to_string(csv.with_extension("json")).unwrap()).unwrap();
    assert_eq!(sidecar, json(&out));
    let fraction = sidecar["feasible_fraction"].as_f64().unwrap();
    assert!(fraction > 0.0 && fraction < 1.0, "{fraction}");
    // the top row, nearest straight up, is out of reach at this plunge
    assert!(lines[1..13].iter().all(|l| l.ends_with(",0")));
}

#[test]
fn tangency_override_applies_to_maps() {
    let run = |eps: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_canfield"));
        c.args([
            "feasibility-map",
            "--design",
            STD,
            "--frozen",
            "leg=1,angle-deg=120",
            "--grid",
            "8x5",
        ]);
        if let Some(e) = eps {
            c.env("CANFIELD_TANGENCY_EPS", e);
        }
        c.output().unwrap()
    };
    assert!(run(None).status.success());
    assert_eq!(run(Some("nonsense")).status.code(), Some(1));
}

#[test]
fn design_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    std::fs::write(&path, r#"{"standard":{"b":1.7320508075688772,"l":2.0}}"#).unwrap();
    let at = format!("@{}", path.display());
    let a = canfield(&["fk", "--design", &at, "--angles-deg", "90,90,90"]);
    let b = canfield(&["fk", "--design", STD, "--angles-deg", "90,90,90"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
