use sliclab::runner::{
    emit_plot_data, run_experiment, ExperimentConfig, Kind, RunManifest, Verdict, MANIFEST_NAME,
};
use std::fs;
use std::path::Path;
use std::process::Command;

const CRACK_SMALL: &str = r#"
kind = "crack1d"
scales = [8, 16, 32]

[model]
law = "saturating"

[[tests]]
center = [0.1, 1.0]
half = [0.5, 0.6]

[tolerances]
residual = 1e-2
"#;

fn sliclab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sliclab"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn masked_manifest(dir: &Path) -> serde_json::Value {
    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_NAME)).unwrap()).unwrap();
    v["wall_clock_s"] = serde_json::Value::Null;
    v
}

#[test]
fn identical_configs_give_identical_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "vacuum.toml",
        "kind = \"vacuum\"\nscales = [32, 64, 128, 256, 512]\n",
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let out = sliclab(&["run", &cfg, "--out", d.to_str().unwrap()]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let m = RunManifest::load(&a.join(MANIFEST_NAME)).unwrap();
    assert!(!m.artifacts.is_empty());
    for art in &m.artifacts {
        let x = fs::read(a.join(&art.path)).unwrap();
        let y = fs::read(b.join(&art.path)).unwrap();
        assert!(x == y, "{} differs between runs", art.path);
        assert!(!x.contains(&b'\r'));
    }
    assert_eq!(masked_manifest(&a), masked_manifest(&b));
}

#[test]
fn vacuum_defaults_reach_the_closed_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run_experiment(&ExperimentConfig::defaults(Kind::Vacuum), tmp.path()).unwrap();
    assert!(!m.failed());
    let e = m.check("energy").unwrap();
    assert!((e.value.unwrap() - 13.0).abs() < 1e-6);
    for name in [
        "residual_0",
        "residual_1",
        "residual_2",
        "first_equation",
        "bounds",
        "fan_edges",
    ] {
        assert_eq!(m.check(name).unwrap().verdict, Verdict::Pass, "{name}");
    }
}

#[test]
fn crack_manifest_and_plot_data() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_toml(CRACK_SMALL).unwrap();
    let m = run_experiment(&cfg, tmp.path()).unwrap();
    assert!(!m.failed(), "{:#?}", m.checks);
    let t = m.check("energy_balance").unwrap();
    assert!((t.value.unwrap() - 0.6669064).abs() < 1e-6);
    let names: Vec<&str> = m.checks.iter().map(|c| c.name.as_str()).collect();
    for want in [
        "fan_kinematics",
        "energy_balance",
        "residual_0",
        "kernel_a",
        "kernel_b",
        "energy_rate",
    ] {
        assert_eq!(names.iter().filter(|n| **n == want).count(), 1, "{want}");
    }

    let files = emit_plot_data(&tmp.path().join(MANIFEST_NAME)).unwrap();
    assert!(files.iter().any(|p| p.ends_with("plot_residual_0.csv")));
    let mut r = csv::Reader::from_path(tmp.path().join("plot_fan_profile_t1.csv")).unwrap();
    let rows: Vec<(f64, f64)> = r
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].parse().unwrap(), rec[1].parse().unwrap())
        })
        .collect();
    let at_zero: Vec<f64> = rows
        .iter()
        .filter(|(x, _)| *x == 0.0)
        .map(|(_, y)| *y)
        .collect();
    assert_eq!(at_zero.len(), 2);
    assert!((at_zero[1] - at_zero[0] - 2.0 * 0.5f64.sqrt()).abs() < 1e-10);

    let mut r = csv::Reader::from_path(tmp.path().join("plot_residual_0.csv")).unwrap();
    let res: Vec<f64> = r
        .records()
        .map(|rec| rec.unwrap()[1].parse().unwrap())
        .collect();
    assert!(res.windows(2).all(|w| w[1] < w[0]), "{res:?}");
}

#[test]
fn empty_manifest_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::defaults(Kind::Crack1d);
    let manifest = RunManifest {
        schema_version: sliclab::runner::SCHEMA_VERSION,
        version: "0".into(),
        seed: 1,
        config: cfg,
        checks: Vec::new(),
        artifacts: Vec::new(),
        wall_clock_s: 0.0,
    };
    let p = tmp.path().join(MANIFEST_NAME);
    fs::write(&p, serde_json::to_string(&manifest).unwrap()).unwrap();
    assert!(emit_plot_data(&p).is_err());
    let out = sliclab(&["plotdata", p.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn missing_artifact_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_toml(CRACK_SMALL).unwrap();
    let m = run_experiment(&cfg, tmp.path()).unwrap();
    fs::remove_file(tmp.path().join(&m.artifacts[0].path)).unwrap();
    assert!(matches!(
        emit_plot_data(&tmp.path().join(MANIFEST_NAME)),
        Err(sliclab::Error::MissingArtifact(_))
    ));
}

#[test]
fn failing_check_sets_the_exit_status() {
    let tmp = tempfile::tempdir().unwrap();
    let text = CRACK_SMALL.replace("residual = 1e-2", "residual = 1e-12");
    let cfg = write(tmp.path(), "strict.toml", &text);
    let out = sliclab(&["run", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn infinite_crack_cost_is_a_sentinel() {
    let tmp = tempfile::tempdir().unwrap();
    let text = CRACK_SMALL.replace(
        "\"saturating\"",
        "\"nonsaturating\"\nexpect_infinite = true",
    );
    let cfg = write(tmp.path(), "nonsat.toml", &text);
    let out = sliclab(&["run", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let m = RunManifest::load(&tmp.path().join("o").join(MANIFEST_NAME)).unwrap();
    assert_eq!(
        m.check("energy_balance").unwrap().verdict,
        Verdict::Sentinel
    );
}

#[test]
fn unexpected_infinity_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let text = CRACK_SMALL.replace(
        "\"saturating\"",
        "\"nonsaturating\"\nexpect_infinite = false",
    );
    let m = run_experiment(&ExperimentConfig::from_toml(&text).unwrap(), tmp.path()).unwrap();
    assert_eq!(m.check("energy_balance").unwrap().verdict, Verdict::Fail);
}

#[test]
fn output_root_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.toml",
        &format!("{CRACK_SMALL}\n[output]\ndir = \"here\"\n"),
    );
    let out = Command::new(env!("CARGO_BIN_EXE_sliclab"))
        .args(["run", &cfg])
        .env("SLICLAB_OUT", tmp.path().join("root"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(tmp.path().join("root/here").join(MANIFEST_NAME).exists());
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        "kind = \"crack\"",
        "kind = \"crack1d\"\nkernel = \"gauss\"",
        "kind = \"crack1d\"\nscales = [8, 16]",
        "kind = \"crack1d\"\nscales = [16, 8, 32]",
        "kind = \"vacuum\"\n[model]\nlambda = 2.0",
        "kind = \"vacuum\"\n[[tests]]\ncenter = [0.0, 1.0]\nhalf = [0.5, 0.5]",
        "kind = \"crack1d\"\ncolour = \"blue\"",
        "kind = \"crack1d\"\n[tolerances]\nresidual = -1.0",
    ];
    for text in bad {
        assert!(ExperimentConfig::from_toml(text).is_err(), "{text}");
    }
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.toml", bad[0]);
    assert_eq!(sliclab(&["run", &cfg]).status.code(), Some(2));
}

#[test]
fn downstream_errors_carry_context() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_toml("kind = \"vacuum\"\n[model]\nv_bar = 0.5").unwrap();
    let err = run_experiment(&cfg, tmp.path()).unwrap_err();
    assert!(err.to_string().contains("w ="), "{err}");
    let cfg = ExperimentConfig::from_toml("kind = \"cavity3d\"\n[model]\nlambda = 1.5").unwrap();
    assert!(matches!(
        run_experiment(&cfg, tmp.path()),
        Err(sliclab::Error::NoCavitation(_))
    ));
}

#[test]
fn divergent_cavity_energy_exits_cleanly_with_a_sentinel() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "kind = \"cavity3d\"\nscales = [8, 16, 32]\n[model]\nenergy = \"superlinear\"\nexpect_infinite = true\n";
    let cfg = write(tmp.path(), "sup.toml", text);
    let out = sliclab(&["run", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let m = RunManifest::load(&tmp.path().join("o").join(MANIFEST_NAME)).unwrap();
    assert!(m.checks.iter().any(|c| c.verdict == Verdict::Sentinel));
    assert!(tmp.path().join("o/divergence.json").exists());
}
