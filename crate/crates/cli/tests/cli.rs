use std::io::Write;
use std::process::{Command, Output, Stdio};

fn facetvol(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_facetvol"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn facetvol");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn right_triangle_volumes() {
    let out = facetvol(&["volumes", "-"], Some("0 0\n3 0\n0 4\n"));
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("5 4 3 | Right(1) | Inside"), "{text}");
}

#[test]
fn collinear_vertices_are_a_geometry_error() {
    let out = facetvol(&["volumes", "-"], Some("0 0\n1 1\n2 2\n"));
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn boundary_roundtrip_exits_three() {
    let out = facetvol(&["roundtrip", "1", "1", "2"], None);
    assert_eq!(code(&out), 3);
    let report = json(&out);
    assert_eq!(report["status"], "rejected");
}

#[test]
fn unreachable_tolerance_exits_four() {
    let out = facetvol(&["--tol-area", "1e-300", "roundtrip", "3", "4", "5"], None);
    assert_eq!(code(&out), 4);
}

#[test]
fn help_and_bad_arguments() {
    assert_eq!(code(&facetvol(&["--help"], None)), 0);
    assert_eq!(code(&facetvol(&["--version"], None)), 0);
    assert_eq!(code(&facetvol(&["--bogus"], None)), 1);
    assert_eq!(code(&facetvol(&["membership", "1", "x", "2"], None)), 1);
    assert_eq!(code(&facetvol(&["--tol-area", "-1", "roundtrip", "3", "4", "5"], None)), 1);
}

#[test]
fn sampling_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = facetvol(
            &["--d", "3", "--count", "10000", "--seed", "7", "--out", path.to_str().unwrap(), "sample"],
            None,
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().count(), 10_001);
}

#[test]
fn tetrahedral_polar_is_cube_and_octahedron() {
    let out = facetvol(&["--n", "4", "polar"], None);
    assert_eq!(code(&out), 0);
    let audit = &json(&out)["audit"];
    assert_eq!(audit["p_vertex_count"], 8);
    assert_eq!(audit["p_star_vertex_count"], 6);
    assert_eq!(audit["is_cube"], true);
    assert_eq!(audit["polar_is_regular_octahedron"], true);
    assert_eq!(audit["bipolar_matches"], true);
}

#[test]
fn solved_normals_feed_reconstruct() {
    let solved = facetvol(&["solve-normals", "3", "4", "5"], None);
    assert_eq!(code(&solved), 0);
    let system = String::from_utf8(solved.stdout).unwrap();
    let out = facetvol(&["reconstruct", "-"], Some(&system));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let record = json(&out);
    let areas: Vec<f64> = record["facet_areas"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_f64().unwrap())
        .collect();
    for (a, target) in areas.iter().zip([3.0, 4.0, 5.0]) {
        assert!((a - target).abs() <= 1e-8 * target, "{areas:?}");
    }
}

#[test]
fn latitude_check_passes() {
    let out = facetvol(&["--seed", "3", "latitude-check", "--circles", "20"], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}
