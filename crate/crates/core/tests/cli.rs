use coupled_scatter::cli::run_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("scatter").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn spiral_starts_at_threshold_value() {
    let (code, out, _) = run(&["spiral", "--spec", "bundled:double_delta_a1_00", "--kmin", "1e-3", "--kmax", "1", "--points", "5"]);
    assert_eq!(code, 0);
    let r = rows(&out);
    assert_eq!(r[0][0], 0.0);
    assert!((r[0][1] - 7.0 / 9.0).abs() < 1e-6, "{out}");
    assert!(r[0][2].abs() < 1e-12);
}

#[test]
fn spectrum_lists_three_states_past_critical_spacing() {
    let (code, out, err) = run(&["spectrum", "--spec", "bundled:double_delta_a1_05"]);
    assert_eq!(code, 0);
    assert!(err.starts_with("n_b=3 n_half=0 channels=2"), "{err}");
    let r = rows(&out);
    assert_eq!(r.len(), 3);
    assert!((r[2][0] - 3.3508).abs() < 1e-4);
}

#[test]
fn levinson_free_is_zero() {
    let (code, out, _) = run(&["levinson", "--spec", "bundled:free"]);
    assert_eq!(code, 0);
    let r = rows(&out);
    assert!(r[0][0].abs() < 1e-12 && r[0][1] == 0.0);
}

#[test]
fn json_output_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("amp.json");
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&[
        "amplitudes", "--spec", "bundled:single_delta", "--kmin", "0.5", "--kmax", "1", "--points", "2",
        "--format", "json", "--out", p,
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v.is_array() || v.is_object());
}

#[test]
fn spec_file_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    std::fs::write(
        &path,
        r#"{"channels": 1, "range": 1.0, "segments": [], "deltas": [{"pos": 0.0, "matrix": [[-2.0]]}]}"#,
    )
    .unwrap();
    let (code, out, _) = run(&["spectrum", "--spec", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!((rows(&out)[0][0] - 1.0).abs() < 1e-9, "{out}");
}

#[test]
fn deterministic_output() {
    let args = ["phase", "--spec", "bundled:double_delta_a0_95", "--points", "300"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
}

#[test]
fn compose_periodic() {
    let (code, out, err) = run(&["compose", "--spec", "bundled:single_delta", "--copies", "3", "--spacing", "2.5", "--kmin", "0.5", "--kmax", "2", "--points", "4"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn error_exit_codes() {
    let (code, _, err) = run(&["bogus"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error kind=Usage"));

    let (code, _, err) = run(&["spectrum", "--spec", "/nonexistent/spec.json"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error kind=Io"), "{err}");

    let (code, _, err) = run(&["amplitudes", "--spec", "bundled:free", "--kmin", "2", "--kmax", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("kind=InvalidArgument"));

    let (code, _, err) = run(&["spectrum", "--spec", "bundled:free", "--tol", "nonsense=1"]);
    assert_eq!(code, 1, "{err}");

    // anchor failure is numerical
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strong.json");
    std::fs::write(
        &path,
        r#"{"channels": 1, "range": 1.0, "segments": [], "deltas": [{"pos": 0.0, "matrix": [[-40.0]]}]}"#,
    )
    .unwrap();
    let (code, _, err) = run(&["levinson", "--spec", path.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("kind=AnchorNotConverged"), "{err}");
}

#[test]
fn selftest_single_criterion() {
    let (code, out, _) = run(&["selftest", "--criterion", "6"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("PASS [ 6]"), "{out}");
}
