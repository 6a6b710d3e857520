use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "axis,method,V_min,V_max,phi_star_rad,squeeze_db,occupancy,micromotion_pp,stable";

const SMALL: &str = r#"
[squeezing]
input_db = 6.0
b_x_hz = 20.0e6

[scenario]
kind = "custom"
axis = "input_db"
start = 0.0
stop = 6.0
points = 3
"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mechsqueeze")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analytic_writes_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL);
    let o = run(&["analytic", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 1 + 3 * 3);
    assert!(lines[1..].iter().all(|l| !l.contains(",exact,")));
}

#[test]
fn exact_json_to_file_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL);
    let out = dir.path().join("out.json");
    let o = run(&["exact", "--config", &cfg, "--format", "json", "--out", out.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let result = mechsqueeze_core::experiments::read_json(&out).unwrap();
    assert_eq!(result.rows.len(), 3);
    assert!(result.rows.iter().all(|r| r.method.name() == "exact" && r.micromotion_pp.is_some()));
    assert_eq!(result.metadata.axis_unit, "dB");
}

#[test]
fn csv_output_does_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL);
    let a = run(&["sweep", "--config", &cfg, "--jobs", "1"]);
    let b = run(&["sweep", "--config", &cfg, "--jobs", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 1 + 3 * 4);
}

#[test]
fn config_problems_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "u.toml", "[system]\nfoo = 1\n");
    let threshold = write_config(dir.path(), "t.toml", "[squeezing]\ngamma_o_hz = 1.0e6\nepsilon_hz = 6.0e5\n");
    let missing = dir.path().join("missing.toml");
    for args in [
        vec!["sweep", "--config", unknown.as_str()],
        vec!["exact", "--config", threshold.as_str()],
        vec!["analytic", "--config", missing.to_str().unwrap()],
        vec!["sweep", "--format", "xml"],
        vec!["sweep", "--jobs", "0"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn numerical_failures_exit_with_3_except_in_sweeps() {
    // The last point puts the squeezing carrier blue of the cooling laser.
    let text = SMALL.replace(r#"axis = "input_db""#, r#"axis = "delta""#).replace("stop = 6.0", "stop = 2.0e6");
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "d.toml", &text);
    let exact = run(&["exact", "--config", &cfg]);
    assert_eq!(exact.status.code(), Some(3));
    assert!(stdout(&exact).lines().any(|l| l.ends_with(",false")));

    let sweep = run(&["sweep", "--config", &cfg]);
    assert_eq!(sweep.status.code(), Some(0));
    assert!(stdout(&sweep).contains("2000000,exact,,,,,,,false"));
}

#[test]
fn validate_source_passes_for_an_opo_source() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.toml",
        "[squeezing]\ngamma_o_hz = 2.0e6\nepsilon_hz = 4.0e5\nepsilon_phase_rad = 0.7\n\n[scenario]\nkind = \"fig3a\"\n",
    );
    let o = run(&["validate-source", "--config", &cfg, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["max_deviation"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["rows"].as_array().unwrap().len(), 201);
}
