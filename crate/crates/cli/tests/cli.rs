use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

fn maxsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxsurf"))
        .args(args)
        .env_remove("MAXSURF_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn validate(schema: &str, doc: &Value) {
    let text = std::fs::read_to_string(schema_dir().join(format!("{schema}.schema.json"))).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let compiled = JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(doc) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{schema}: {msgs:#?}");
    };
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn catalog_list() {
    let o = maxsurf(&["catalog", "list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(names, ["plane", "lorentzian-catenoid", "enneper", "minimal-catenoid"]);
}

#[test]
fn superharmonic_catenoid_passes() {
    let o = maxsurf(&["check", "superharmonic", "lorentzian-catenoid"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    validate("superharmonic", &r);
    assert_eq!(r["report"]["base"]["closed_nonpositive"], true);
    assert!(r["report"]["base"]["max_closed"].as_f64().unwrap() < 0.0);
}

#[test]
fn conjugate_of_minimal_catenoid_is_not_exact() {
    let o = maxsurf(&["check", "conjugate", "minimal-catenoid", "--epsilon", "0.1"]);
    assert_eq!(code(&o), 2);
    let r = report(&o);
    validate("conjugate", &r);
    assert_eq!(r["pass"], false);
    assert_eq!(r["error"]["kind"], "NotExact");
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["check", "superharmonic", "lorentzian-catenoid"][..],
        &["check", "parabolicity", "plane", "--grid", "64"],
        &["check", "starlike", "lorentzian-catenoid", "--format", "csv"],
    ] {
        let (a, b) = (maxsurf(args), maxsurf(args));
        assert_eq!(code(&a), code(&b));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn reports_match_schemas() {
    let cases: [(&str, &[&str], i32); 9] = [
        ("starlike", &["check", "starlike", "plane"], 0),
        ("cone", &["check", "cone", "lorentzian-catenoid", "--alpha", "0.5"], 2),
        ("parabolicity", &["check", "parabolicity", "plane", "--grid", "64"], 0),
        ("conjugate", &["check", "conjugate", "enneper", "--epsilon", "0.4"], 2),
        ("pipeline", &["check", "pipeline", "enneper"], 0),
        ("pipeline", &["check", "pipeline", "minimal-catenoid"], 2),
        (
            "classify",
            &["classify", "lorentzian-catenoid", "--site", "loop", "1"],
            0,
        ),
        ("classify", &["classify", "enneper", "--site", "point", "0.1,-0.2"], 0),
        (
            "superharmonic",
            &[
                "check",
                "superharmonic",
                "plane",
                "--nx",
                "21",
                "--ny",
                "21",
                "--mask",
                "0.5",
            ],
            0,
        ),
    ];
    for (schema, args, want) in cases {
        let o = maxsurf(args);
        assert_eq!(code(&o), want, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        validate(schema, &report(&o));
    }
}

#[test]
fn parabolicity_flags_override_catalog() {
    let o = maxsurf(&[
        "check",
        "parabolicity",
        "plane",
        "--inner",
        "0.1",
        "--radii",
        "0.5,0.7,0.9",
        "--probe",
        "0.2",
        "--limit",
        "1",
        "--grid",
        "48",
    ]);
    assert_eq!(code(&o), 2);
    let r = report(&o);
    assert_eq!(r["report"]["verdict"], "hyperbolic-evidence");
    validate("parabolicity", &r);
    assert_eq!(r["report"]["stages"].as_array().unwrap().len(), 3);
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad_json = dir.path().join("bad.json");
    std::fs::write(&bad_json, "{ \"kind\": ").unwrap();
    let bad_expr = dir.path().join("expr.json");
    std::fs::write(
        &bad_expr,
        r#"{"kind":"maximal","domain":{"type":"disc","radius":0.5},"g":"z +","phi3":"1","basepoint":[0,0],"base_value":[0,0,0]}"#,
    )
    .unwrap();
    let bad_domain = dir.path().join("domain.json");
    std::fs::write(
        &bad_domain,
        r#"{"kind":"maximal","domain":{"type":"annulus","r_in":2,"r_out":1},"g":"z","phi3":"1","basepoint":[1.5,0],"base_value":[0,0,0]}"#,
    )
    .unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["check", "starlike", "no-such-surface"],
        vec!["check", "starlike", bad_json.to_str().unwrap()],
        vec!["check", "starlike", bad_expr.to_str().unwrap()],
        vec!["mesh", bad_domain.to_str().unwrap()],
        vec!["check", "cone", "plane", "--alpha", "1.2"],
        vec!["check", "conjugate", "plane", "--epsilon", "0.1"],
        vec!["check", "parabolicity", "enneper"],
        vec!["classify", "enneper", "--site", "point", "x,y"],
    ];
    for args in cases {
        let o = maxsurf(&args);
        assert_eq!(code(&o), 1, "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{err}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn mesh_goes_to_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_maxsurf"))
        .args(["mesh", "lorentzian-catenoid"])
        .env("MAXSURF_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let obj = std::fs::read_to_string(dir.path().join("lorentzian-catenoid.obj")).unwrap();
    let count = |p: &str| obj.lines().filter(|l| l.starts_with(p)).count();
    assert!(count("v ") > 0);
    assert_eq!(count("v "), count("vn "));
    assert!(count("f ") > 0);

    let csv = dir.path().join("plane.csv");
    let o = maxsurf(&["mesh", "plane", "--format", "csv", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("re,im,x1,x2,x3,n1,n2,n3,lambda_sq,interior"));
}

#[test]
fn dualized_surface_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let once = dir.path().join("once.json");
    let o = maxsurf(&["dualize", "lorentzian-catenoid", "--out", once.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&once).unwrap()).unwrap();
    validate("surface", &doc);
    assert_eq!(doc["kind"], "minimal");

    let o = maxsurf(&["dualize", once.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let twice = report(&o);
    validate("surface", &twice);
    assert_eq!(twice["kind"], "maximal");

    let back = dir.path().join("twice.json");
    std::fs::write(&back, &o.stdout).unwrap();
    let o = maxsurf(&["classify", back.to_str().unwrap(), "--site", "loop", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["report"]["classification"]["conelike"], true);
}

#[test]
fn superharmonic_csv_lists_nodes() {
    let o = maxsurf(&["check", "superharmonic", "lorentzian-catenoid", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,re,im,norm_sq,fd,closed,residual"));
    assert!(lines.count() > 1000);
}
