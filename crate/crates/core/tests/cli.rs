use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gauge_asym::cli::BodyDocument;
use gauge_asym::experiments::ExperimentResult;
use tempfile::TempDir;

fn asym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asym"))
        .args(args)
        .env_remove("ASYM_SEED")
        .output()
        .expect("run asym")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SQUARE: &str = r#"{"type":"polygon","vertices":[[1,1],[-1,1],[-1,-1],[1,-1]]}"#;

#[test]
fn square_constants_are_zero() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "sq.json", SQUARE);
    let o = asym(&["constants", s(&f), "--which", "all", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let value: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(value, 0.0);
    }
}

#[test]
fn smoothed_hexagon_constant_is_near_envelope() {
    let dir = TempDir::new().unwrap();
    // hexagon(3) shifted by (ε, 0) and rounded by ε
    let e = 1e-3;
    let doc = format!(
        r#"{{"type":"rounded","vertices":[[{e},1],[{},0],[{},-1],[{e},-1],[{},0],[{},0.75]],"radius":{e}}}"#,
        -1.0 + e,
        -1.0 + e,
        3.0 + e,
        0.75 + e
    );
    let f = write(&dir, "hex.json", &doc);
    let o = asym(&["constants", s(&f), "--which", "out", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c = v["reports"][0]["value"].as_f64().unwrap();
    assert!(c < 2.0 && (c - 7.0 / 4.5).abs() < 1e-2, "{c}");
}

#[test]
fn dual_twice_negates() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "sq.json", SQUARE);
    let o = asym(&["dual", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    let d = write(&dir, "d.json", &stdout(&o));
    let dual = BodyDocument::parse(&fs::read_to_string(&d).unwrap()).unwrap();
    assert!(dual.context().is_ok());
    let o = asym(&["dual", s(&d)]);
    assert_eq!(o.status.code(), Some(0));
    let bi = BodyDocument::parse(&stdout(&o)).unwrap();
    let gauge_asym::cli::BodyKind::Polygon { vertices } = bi.kind else {
        panic!("polygon expected")
    };
    let mut got: Vec<[f64; 2]> = vertices;
    got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut want = vec![[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]];
    want.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (g, w) in got.iter().zip(&want) {
        assert!((g[0] - w[0]).abs() < 1e-12 && (g[1] - w[1]).abs() < 1e-12);
    }
}

#[test]
fn triangle_dual_has_three_vertices() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "t.json",
        r#"{"type":"polygon","vertices":[[1,0],[0,1],[-1,-1]],"omega_scale":2}"#,
    );
    let o = asym(&["dual", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    let d = BodyDocument::parse(&stdout(&o)).unwrap();
    assert_eq!(d.omega_scale, 2.0);
    assert_eq!(d.context().unwrap().body().core().len(), 3);
}

#[test]
fn random_seed_7_matches_golden() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "r.json", r#"{"type":"random","n":8,"seed":7}"#);
    let o = asym(&["constants", s(&f), "--which", "all", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/random_seed7.json");
    if !golden.exists() {
        fs::create_dir_all(golden.parent().unwrap()).unwrap();
        fs::write(&golden, &out).unwrap();
    }
    let got: serde_json::Value = serde_json::from_str(&out).unwrap();
    let want: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&golden).unwrap()).unwrap();
    assert_json_close(&got, &want);
}

fn assert_json_close(a: &serde_json::Value, b: &serde_json::Value) {
    use serde_json::Value;
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!(
                (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0),
                "{x} vs {y}"
            );
        }
        (Value::Array(x), Value::Array(y)) => {
            assert_eq!(x.len(), y.len());
            x.iter().zip(y).for_each(|(x, y)| assert_json_close(x, y));
        }
        (Value::Object(x), Value::Object(y)) => {
            assert_eq!(x.keys().collect::<Vec<_>>(), y.keys().collect::<Vec<_>>());
            x.iter().for_each(|(k, v)| assert_json_close(v, &y[k]));
        }
        _ => assert_eq!(a, b),
    }
}

#[test]
fn invalid_documents_exit_2() {
    let dir = TempDir::new().unwrap();
    let missing_field = write(
        &dir,
        "a.json",
        r#"{"type":"rounded","vertices":[[1,0],[0,1],[-1,-1]]}"#,
    );
    let bad_type = write(&dir, "b.json", r#"{"type":"blob"}"#);
    let not_convex = write(
        &dir,
        "c.json",
        r#"{"type":"polygon","vertices":[[1,0],[0,0.1],[-1,0],[0,1]]}"#,
    );
    let outside = write(
        &dir,
        "d.json",
        r#"{"type":"polygon","vertices":[[1,1],[2,1],[2,2]]}"#,
    );
    for f in [&missing_field, &bad_type, &not_convex, &outside] {
        let o = asym(&["constants", s(f)]);
        assert_eq!(o.status.code(), Some(2), "{f:?}");
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
    let o = asym(&["constants", s(&missing_field), "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["error"]["code"], 2);
    assert!(v["error"]["message"].as_str().unwrap().contains("radius"));
    assert!(v["error"]["message"].as_str().unwrap().contains("line 1"));
    assert_eq!(
        asym(&["constants", "/nonexistent/body.json"]).status.code(),
        Some(2)
    );
    let rounded = write(
        &dir,
        "r.json",
        r#"{"type":"rounded","vertices":[[1,0],[0,1],[-1,-1]],"radius":0.1}"#,
    );
    assert_eq!(asym(&["dual", s(&rounded)]).status.code(), Some(2));
}

#[test]
fn bad_flags_exit_2() {
    for args in [
        &["verify", "nope"][..],
        &["verify", "duality", "--trials", "0"],
        &["verify", "duality", "--seed", "x"],
        &["constants"],
        &["frobnicate"],
    ] {
        let o = asym(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn verify_duality_passes_and_writes_results() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("results.json");
    let o = asym(&[
        "verify",
        "duality",
        "--trials",
        "100",
        "--seed",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: ExperimentResult = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r.pass);
    assert_eq!(r.trials, 100);
}

#[test]
fn verify_bound_is_monotone() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bound.json");
    let o = asym(&["verify", "bound", "--alphas", "1,3,10,50", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let r: ExperimentResult = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let pts = &r.series[0].points;
    assert_eq!(pts.len(), 4);
    assert!(pts.windows(2).all(|w| w[0].1 < w[1].1));
}

#[test]
fn failing_suite_exits_1_with_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bound.json");
    let o = asym(&["verify", "bound", "--eps", "0.5", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));
    let r: ExperimentResult = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(!r.pass);
}

#[test]
fn seed_comes_from_environment() {
    let run = |env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_asym"));
        c.args(args).env_remove("ASYM_SEED");
        if let Some(v) = env {
            c.env("ASYM_SEED", v);
        }
        let o = c.output().unwrap();
        assert_eq!(o.status.code(), Some(0));
        let r: ExperimentResult = serde_json::from_slice(&o.stdout).unwrap();
        r.records
    };
    let from_env = run(Some("5"), &["verify", "sandwich", "--trials", "3"]);
    let from_flag = run(
        None,
        &["verify", "sandwich", "--trials", "3", "--seed", "5"],
    );
    let default = run(None, &["verify", "sandwich", "--trials", "3"]);
    assert_eq!(from_env, from_flag);
    assert_ne!(from_env, default);
    let flag_wins = run(
        Some("9"),
        &["verify", "sandwich", "--trials", "3", "--seed", "5"],
    );
    assert_eq!(flag_wins, from_flag);
}

#[test]
fn plots_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let hex = write(&dir, "h.json", r#"{"type":"hexagon","alpha":3}"#);
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for p in [&a, &b] {
        let o = asym(&["plot", s(&hex), "--format", "svg", "--out", s(p)]);
        assert_eq!(o.status.code(), Some(0));
    }
    let svg = fs::read(&a).unwrap();
    assert_eq!(svg, fs::read(&b).unwrap());
    let text = String::from_utf8(svg).unwrap();
    assert!(text.contains(r#"viewBox="0 0 800 600""#) && text.contains("sans-serif"));

    let sq = write(&dir, "sq.json", SQUARE);
    let o = asym(&["plot", s(&sq), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert!(csv.starts_with("series,parameter,value\n"));
    for line in csv.lines().skip(1) {
        assert_eq!(
            line.split(',')
                .nth(2)
                .unwrap()
                .parse::<f64>()
                .unwrap()
                .abs(),
            0.0
        );
    }
}

#[test]
fn continuity_series_plot_on_log_scale() {
    let dir = TempDir::new().unwrap();
    let r = r#"{"name":"continuity","trials":2,"tolerance":0.01,"max_residual":0.001,"pass":true,"failures":[],
        "records":[],"series":[{"name":"rounded/c_out","points":[[4,0.1],[8,0.05]]}],"runtime_seconds":0}"#;
    let f = write(&dir, "c.json", r);
    let o = asym(&["plot", s(&f), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("series,parameter,value,log10_parameter,log10_value")
    );
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .skip(1)
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(row[3], -1.0);

    let bad = write(&dir, "bad.json", "{not json");
    assert_eq!(asym(&["plot", s(&bad)]).status.code(), Some(2));
    let wrong = write(&dir, "w.json", r#"{"series":3}"#);
    assert_eq!(asym(&["plot", s(&wrong)]).status.code(), Some(2));
}
