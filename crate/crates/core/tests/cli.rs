use std::fs;
use std::path::Path;
use std::process::Command;

fn run_cli(config: &str, dir: &Path, extra: &[&str]) -> (i32, String) {
    let path = dir.join("run.conf");
    fs::write(&path, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tailineq"))
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .env_remove("TAILINEQ_OUTPUT_DIR")
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), text)
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn profile_csv_matches_cauchy_formula() {
    let dir = tempfile::tempdir().unwrap();
    let config = "command = profile\nmeasure.family = cauchy\nmeasure.alpha = 2\ngrid.t.min = 1e-4\ngrid.t.max = 0.5\ngrid.t.points = 40\n";
    let (code, _) = run_cli(config, dir.path(), &[]);
    assert_eq!(code, 0);
    let table = rows(&dir.path().join("out/profile.csv"));
    assert_eq!(table[0], ["t", "J", "I", "lower_bound", "provenance"]);
    assert_eq!(table.len(), 41);
    for row in &table[1..] {
        let t: f64 = row[0].parse().unwrap();
        let j: f64 = row[1].parse().unwrap();
        let formula = 2.0 * 2f64.sqrt() * t.powf(1.5);
        assert!(((j - formula) / formula).abs() < 1e-12, "{t} {j} {formula}");
        assert!(row[2].parse::<f64>().unwrap() <= j);
        assert!(row[3].parse::<f64>().unwrap() <= row[2].parse::<f64>().unwrap());
        assert_eq!(row[4], "paper-formula");
    }
}

#[test]
fn halved_constant_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = "command = verify\nverify.inequality = muckenhoupt\nverify.scale = 0.5\n";
    let (code, text) = run_cli(config, dir.path(), &[]);
    assert_eq!(code, 1, "{text}");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/verify.json")).unwrap()).unwrap();
    assert_eq!(json[0]["outcome"], "fail");
    assert_eq!(json[0]["provenance"], "quadrature");
}

#[test]
fn empty_grid_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_cli("command = profile\ngrid.t.points = 0\n", dir.path(), &[]);
    assert_eq!(code, 3);
    assert!(text.contains("line 2") && text.contains("grid.t.points"), "{text}");
}

#[test]
fn unknown_key_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_cli("command = weak\nmeasure.alfa = 2\n", dir.path(), &[]);
    assert_eq!(code, 3);
    assert!(text.contains("measure.alfa"), "{text}");
}

#[test]
fn reruns_are_byte_identical() {
    let config = "command = verify\nverify.inequality = spherical-cauchy\nmc.samples = 20000\nmc.blocks = 8\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ca, _) = run_cli(config, a.path(), &["--seed", "11"]);
    let (cb, _) = run_cli(config, b.path(), &["--seed", "11"]);
    assert_eq!(ca, cb);
    let first = fs::read(a.path().join("out/verify.json")).unwrap();
    assert_eq!(first, fs::read(b.path().join("out/verify.json")).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(
        text.contains("\"seed\": 11") && text.contains("\"provenance\": \"MC\""),
        "{text}"
    );

    let c = tempfile::tempdir().unwrap();
    run_cli(config, c.path(), &["--seed", "12"]);
    assert_ne!(
        fs::read(c.path().join("out/verify.json")).unwrap(),
        fs::read(a.path().join("out/verify.json")).unwrap()
    );
}

#[test]
fn every_command_writes_its_tables() {
    let cases = [
        ("command = duality\nmeasure.family = cauchy\nmeasure.alpha = 1\ngrid.s.points = 5\ngrid.t.points = 5\n", vec!["beta.csv", "profile_from_beta.csv"]),
        ("command = lyapunov\nmeasure.family = subexp\nmeasure.p = 0.5\nmeasure.n = 2\ngrid.x.points = 101\n", vec!["certificate.json", "drift.csv"]),
        ("command = constants\nmeasure.family = cauchy\nmeasure.alpha = 2\ndimensions = 1, 3\n", vec!["constants.csv"]),
        ("command = weak\nmeasure.family = cauchy\nmeasure.alpha = 2\ndimensions = 3\ngrid.s.points = 4\ngrid.t.points = 4\n", vec!["weak_rates.csv", "weak_bounds.csv"]),
    ];
    for (config, files) in cases {
        let dir = tempfile::tempdir().unwrap();
        let (code, text) = run_cli(config, dir.path(), &[]);
        assert_eq!(code, 0, "{config}\n{text}");
        for f in files {
            let path = dir.path().join("out").join(f);
            let body = fs::read_to_string(&path).unwrap();
            if f.ends_with(".csv") {
                let table = rows(&path);
                assert_eq!(table[0].last().unwrap(), "provenance", "{f}");
                assert!(
                    table.len() > 1 && table.iter().all(|r| r.len() == table[0].len()),
                    "{f}"
                );
            } else {
                assert!(body.contains("\"provenance\""), "{f}");
            }
        }
    }
}

#[test]
fn environment_sets_default_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    fs::write(&path, "command = profile\ngrid.t.points = 3\n").unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_tailineq"))
        .arg(&path)
        .env("TAILINEQ_OUTPUT_DIR", dir.path().join("env-out"))
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("env-out/profile.csv").exists());
}
