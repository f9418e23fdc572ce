use std::path::Path;
use std::process::{Command, Output};

use besovflow_core::read_field;

fn besovflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besovflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_norm_pressure_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let u = dir.path().join("u.pfld");
    let p = dir.path().join("p.pfld");
    let out = besovflow(&[
        "gen",
        "--kind",
        "lacunary",
        "--theta",
        "0.4",
        "--grid",
        "64x64",
        "--jmax",
        "3",
        "--solenoidal",
        "--output",
        path(&u),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(json(&out)["components"], 2);

    let out = besovflow(&["norm", path(&u), "--theta", "0.3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["norm"].as_f64().unwrap() >= v["seminorm"].as_f64().unwrap());
    assert_eq!(v["estimator"], "littlewood_paley");

    let out = besovflow(&["pressure", "--input", path(&u), "--output", path(&p)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let pressure = read_field(&p).unwrap();
    assert_eq!(pressure.components(), 1);
    assert!(pressure.mean(0).abs() < 1e-12);

    // the default depth at this size leaves energy outside the 2/3 box
    let deep = dir.path().join("deep.pfld");
    besovflow(&[
        "gen",
        "--theta",
        "0.4",
        "--grid",
        "64x64",
        "--solenoidal",
        "--output",
        path(&deep),
    ]);
    let out = besovflow(&["pressure", "--input", path(&deep)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("resolution too small"));
}

#[test]
fn scalar_input_is_not_a_velocity() {
    let dir = tempfile::tempdir().unwrap();
    let u = dir.path().join("u.pfld");
    besovflow(&[
        "gen",
        "--kind",
        "power",
        "--theta",
        "0.5",
        "--grid",
        "32x32",
        "--output",
        path(&u),
    ]);
    let out = besovflow(&["pressure", "--input", path(&u)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreadable_input_maps_to_io_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.pfld");
    assert_eq!(besovflow(&["norm", path(&missing)]).status.code(), Some(3));
    let junk = dir.path().join("junk.pfld");
    std::fs::write(&junk, b"not a field").unwrap();
    assert_eq!(besovflow(&["norm", path(&junk)]).status.code(), Some(3));
}

#[test]
fn hypothesis_gate_reports_reason() {
    let out = besovflow(&["timereg", "--claim", "ii", "--theta", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("requires theta > 1/2"));
}

#[test]
fn config_file_runs_and_report_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results");
    let config = dir.path().join("kfun.toml");
    std::fs::write(
        &config,
        format!(
            "[experiment]\nclaim = \"kfun-profile\"\ncorpus_size = 2\n[grid]\nn = 32\n[output]\nout = \"{}\"\n",
            path(&results)
        ),
    )
    .unwrap();
    let out = besovflow(&["run", "--config", path(&config)]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(results.join("kfun-profile-theta0.5.json").exists());
    let csv = std::fs::read_dir(&results)
        .unwrap()
        .filter_map(|e| e.ok())
        .find(|e| e.path().extension().is_some_and(|x| x == "csv"))
        .expect("a profile csv");
    let text = std::fs::read_to_string(csv.path()).unwrap();
    assert!(text.starts_with("# config-hash: "));

    assert_eq!(
        besovflow(&["report", path(&results)]).status.code(),
        Some(0)
    );
    assert!(results.join("summary.txt").exists());

    // a failing report flips the aggregate
    let failing = std::fs::read_to_string(results.join("kfun-profile-theta0.5.json"))
        .unwrap()
        .replace("\"pass\": true", "\"pass\": false");
    std::fs::write(results.join("forced.json"), failing).unwrap();
    assert_eq!(
        besovflow(&["report", path(&results)]).status.code(),
        Some(1)
    );
}

#[test]
fn unknown_config_keys_are_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "[experiment]\nclaim = \"molli\"\nbogus = 1\n").unwrap();
    assert_eq!(
        besovflow(&["run", "--config", path(&config)]).status.code(),
        Some(2)
    );
}
