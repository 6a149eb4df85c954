use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tentspace"))
}

#[test]
fn list_names_all_experiments() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().collect();
    assert_eq!(names.len(), 10);
    for name in ["a1-sweep", "geometry-props", "carleson-sweep"] {
        assert!(names.contains(&name), "missing {name}");
    }
}

#[test]
fn run_writes_reports_and_exits_zero() {
    let dir = std::env::temp_dir().join(format!("tentspace-cli-{}", std::process::id()));
    let out = bin()
        .args([
            "run",
            "--experiment",
            "geometry-props",
            "--grid-preset",
            "fast",
            "--seed",
            "3",
            "--jobs",
            "2",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stdout: {} stderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.join("geometry-props.csv")).unwrap();
    assert!(csv.starts_with("experiment,p,n,alpha,norm,slope,residual,tolerance,pass"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("geometry-props.json")).unwrap())
            .unwrap();
    assert_eq!(json["name"], "geometry-props");
    assert_eq!(json["passed"], true);
    assert_eq!(json["seed"], 3);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_file_provides_defaults_and_flags_override() {
    let dir = std::env::temp_dir().join(format!("tentspace-cfg-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    fs::write(
        &cfg,
        "experiment = \"geometry-props\"\ngrid_preset = \"fast\"\nseed = 11\n",
    )
    .unwrap();
    let out = bin()
        .args(["run", "--seed", "7", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("geometry-props.json")).unwrap())
            .unwrap();
    // flag beats config
    assert_eq!(json["seed"], 7);
    assert_eq!(json["preset"], "fast");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let out = bin()
        .args(["run", "--experiment", "no-such-thing"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown experiment"));
}

#[test]
fn failing_assertions_exit_one() {
    // aperture 64 reaches far outside the spatial box, so the Fubini ratio
    // check must fail rather than error
    let out = bin()
        .args([
            "run",
            "--experiment",
            "l2-fubini",
            "--grid-preset",
            "fast",
            "--alphas",
            "64",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn bad_aperture_list_is_rejected() {
    let out = bin()
        .args([
            "run",
            "--experiment",
            "a1-sweep",
            "--grid-preset",
            "fast",
            "--alphas",
            "8,4,2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
