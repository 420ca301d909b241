use serde_json::Value;
use whitney_cli::run_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("whitney").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn approx_x_squared_on_interval() {
    let v = json(&["approx", "--fn", "x^2", "--body", "[-1,1]", "--m", "1"]);
    let e = v["error"].as_f64().unwrap();
    // equioscillation of x² - ½ at -1, 0, 1
    assert!((e - 0.5).abs() < 1e-12, "{e}");
    assert_eq!(v["polynomial"], "0.5");
}

#[test]
fn ramp_ratio() {
    let v = json(&["whitney-ratio", "--fn", "ramp", "--delta", "0.5", "--m", "2"]);
    assert!((v["ratio"].as_f64().unwrap() - 0.375).abs() < 1e-9);
    assert!((v["omega"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn unknown_command_and_flag_are_usage_errors() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["approx", "--bogus"]).0, 2);
    assert_eq!(run(&[]).0, 2);
}

#[test]
fn invalid_parameters_are_usage_errors() {
    assert_eq!(run(&["approx", "--fn", "x", "--resolution", "1"]).0, 2);
    assert_eq!(run(&["approx", "--fn", "x", "--tol", "0"]).0, 2);
    assert_eq!(run(&["approx", "--fn", "x", "--format", "xml"]).0, 2);
    assert_eq!(run(&["approx"]).0, 2);
    assert_eq!(run(&["approx", "--fn", "x*y", "--body", "[-1,1]"]).0, 2);
}

#[test]
fn parse_error_cites_position() {
    let (code, _, err) = run(&["approx", "--fn", "x^2 + #"]);
    assert_eq!(code, 2);
    assert!(err.contains("position 6"), "{err}");
}

#[test]
fn help_and_version_exit_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("verify-prop18"));
    assert_eq!(run(&["--version"]).0, 0);
}

#[test]
fn repair_rejects_nonconvex_function() {
    let (code, _, err) = run(&["repair", "--fn", "x^2 - y^2", "--body", "cube:2"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn repair_maps_back_to_original_body() {
    let v = json(&["repair", "--fn", "x^2 + x*y + y^2", "--body", "[-1,1]x[0,2]", "--resolution", "21"]);
    assert_eq!(v["report"]["cases"].as_array().unwrap().len(), 3);
    assert!(v["result"]["q_min_eigenvalue"].as_f64().unwrap() >= 0.0);
    // f is itself a convex quadratic, so the repair returns it unchanged up to rounding
    let q = whitney_cli::parse_polynomial(v["result"]["q"].as_str().unwrap(), 2).unwrap();
    for x in [[-1.0, 0.0], [1.0, 2.0], [0.3, 1.1]] {
        let f = x[0] * x[0] + x[0] * x[1] + x[1] * x[1];
        assert!((q.eval(&x).unwrap() - f).abs() < 1e-9, "{x:?}");
    }
}

#[test]
fn convexify_smooth_gives_convex_polynomial() {
    let v = json(&["convexify-smooth", "--fn", "x^3 - y^3", "--body", "cube:2"]);
    assert!((v["result"]["l"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!(v["result"]["min_hessian_eig"].as_f64().unwrap() >= -1e-12);
}

#[test]
fn prop18_fails_only_on_uniform_multipliers() {
    let (code, out, err) = run(&["verify-prop18", "--resolution", "101", "--format", "csv"]);
    assert_eq!(code, 1);
    let failing: Vec<&str> = out.lines().filter(|l| l.ends_with(",false")).collect();
    assert_eq!(failing.len(), 2, "{out}");
    assert!(failing.iter().all(|l| l.contains("/uniform")));
    assert!(err.contains("certificate/P/uniform") && err.contains("certificate/Q/uniform"));
}

#[test]
fn report_json_schema() {
    let v = json(&["verify-thm16", "--cases", "4", "--seed", "7"]);
    assert_eq!(v["suite"], "repair");
    for c in v["cases"].as_array().unwrap() {
        for key in ["id", "expected", "actual", "tol", "provenance", "pass"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
        assert_eq!(c["pass"], true);
    }
}

#[test]
fn identical_arguments_give_identical_output() {
    let args = ["verify-thm13", "--cases", "6", "--seed", "11", "--resolution", "21"];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!(c1, c2);
    assert_eq!(a, b);
    let (_, c, _) = run(&["verify-thm13", "--cases", "6", "--seed", "12", "--resolution", "21"]);
    assert_ne!(a, c);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("modulus.csv");
    let (code, out, _) = run(&[
        "modulus",
        "--fn",
        "x^2",
        "--m",
        "2",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("key,value\n"));
    // Δ_h² x² = 2h², largest with h = 1 on [-1,1]
    let value: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("value,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 2.0).abs() < 1e-9, "{value}");
}

#[test]
fn body_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("box.json");
    std::fs::write(&path, r#"{"shape":"box","lower":[-1.0],"upper":[1.0]}"#).unwrap();
    let v = json(&["approx", "--fn", "x^2", "--body", path.to_str().unwrap(), "--m", "1"]);
    assert!((v["error"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn numbers_have_twelve_significant_digits() {
    let v = json(&["e1-convex", "--fn", "entropy", "--n", "1"]);
    let e = v["e1_lower"].as_f64().unwrap();
    let digits: String = format!("{e:e}").split('e').next().unwrap().replace(['.', '-'], "");
    assert!(digits.len() <= 12, "{e}");
}
