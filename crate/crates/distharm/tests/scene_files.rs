use distharm::scene_file::{load, parse};
use distharm::CliError;
use distharm_core::scene::builtin;
use distharm_core::tension::Form;

const SPHERE: &str = r#"{
  "dimension": 2,
  "metric": [["4/(1+x^2+y^2)^2", "0"], ["0", "4/(1+x^2+y^2)^2"]],
  "distribution": [["-y", "x"]],
  "constant_curvature": 1,
  "domain": { "box": [[-2.5, 2.5], [-2.5, 2.5]] },
  "exclusions": [{ "center": [0, 0], "radius": 0.3 }]
}"#;

#[test]
fn handwritten_sphere_matches_builtin() {
    let file = parse(SPHERE, "sphere.json").unwrap();
    let reference = builtin("sphere-chart").unwrap();
    assert_eq!(file.constant_curvature, Some(1.0));
    let pts = reference.sample_points(10, 3).unwrap();
    assert_eq!(file.sample_points(10, 3).unwrap(), pts);
    for x in &pts {
        let a = file.framed_at(x).unwrap();
        let b = reference.framed_at(x).unwrap();
        for (u, v) in a.tau_h(Form::Primed).iter().zip(b.tau_h(Form::Primed)) {
            assert!((u - v).abs() <= 1e-12, "{x:?}");
        }
        for (u, v) in a.report().tau_v.iter().flatten().zip(b.report().tau_v.iter().flatten()) {
            assert!((u - v).abs() <= 1e-12, "{x:?}");
        }
    }
}

#[test]
fn name_defaults_to_file_stem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("my-sphere.json");
    std::fs::write(&path, SPHERE).unwrap();
    assert_eq!(load(&path).unwrap().name, "my-sphere");
}

#[test]
fn non_square_metric_is_rejected() {
    let text = SPHERE.replace(r#"["0", "4/(1+x^2+y^2)^2"]]"#, r#"["0", "1", "1"]]"#);
    match parse(&text, "bad.json") {
        Err(e @ CliError::Scene { .. }) => {
            assert!(e.to_string().contains("dimension mismatch"), "{e}");
            assert_eq!(e.exit_code(), 2);
        }
        other => panic!("expected a scene error, got {other:?}"),
    }
}

#[test]
fn full_rank_distribution_is_rejected() {
    let text = SPHERE.replace(r#"[["-y", "x"]]"#, r#"[["1", "0"], ["0", "1"]]"#);
    let err = parse(&text, "full.json").unwrap_err();
    assert!(matches!(err, CliError::Scene { .. }), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn syntax_errors_in_expressions_are_configuration_errors() {
    let text = SPHERE.replace("\"-y\"", "\"-y +\"");
    let err = parse(&text, "typo.json").unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
}
