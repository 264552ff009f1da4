use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qle_core::applications::{josephson_phase_variance_weak, JosephsonJunction};
use qle_core::correlations::classical_free_msd;
use qle_core::units::{ThermalState, UnitSystem};

fn qle(cwd: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qle"))
        .current_dir(cwd)
        .args(args)
        .output()
        .expect("failed to launch qle")
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

/// Header names and numeric rows of a CSV written by the tool.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn dir_listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn msd_matches_closed_form_column_for_column() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qle(tmp.path(), &["msd", "-c", &config("msd_classical.toml"), "-o", "run"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&tmp.path().join("run/msd.csv"));
    assert_eq!(header, ["t", "msd", "error_estimate", "closed_form"]);
    assert_eq!(rows.len(), 40);
    for r in &rows {
        let oracle = classical_free_msd(100.0, 1.0, 1.0, r[0]);
        assert_eq!(r[3], oracle);
        assert!(((r[1] - oracle) / oracle).abs() < 1e-8, "t = {}: {} vs {oracle}", r[0], r[1]);
    }
    let json: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("run/msd.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 40);
    assert_eq!(json["rows"][5][1].as_f64().unwrap(), rows[5][1]);
}

#[test]
fn josephson_sample_matches_weak_coupling() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qle(tmp.path(), &["josephson", "-c", &config("josephson_weak.toml"), "-o", "j"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&tmp.path().join("j/josephson.csv"));
    assert_eq!(header[2], "phase_variance");
    let j = JosephsonJunction::new(1.0, 1e3 * FRAC_1_SQRT_2, 0.0, 1.0, UnitSystem::reduced()).unwrap();
    let weak = josephson_phase_variance_weak(&j, &ThermalState::new(FRAC_1_SQRT_2).unwrap()).unwrap();
    let full = rows[0][2];
    assert!(((full - weak) / weak).abs() < 5e-3, "{full} vs {weak}");
    assert!((rows[0][1] / rows[0][0] - 1e-3).abs() < 1e-6);
}

#[test]
fn unknown_key_fails_validation_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[bath]\nmodel = \"ohmic\"\nzetta = 2.0\n").unwrap();
    let out = qle(tmp.path(), &["msd", "-c", cfg.to_str().unwrap(), "-o", "run"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("zetta"), "{err}");
    assert!(!tmp.path().join("run").exists());

    let out = qle(tmp.path(), &["msd", "--set", "grid.nope=1", "-o", "run"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!tmp.path().join("run").exists());
}

#[test]
fn invalid_parameters_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        vec!["msd", "--set", "system.mass=-1", "-o", "run"],
        vec!["bath", "--set", "bath.model=single-relaxation", "-o", "run"],
        vec!["radiate", "-o", "run"],
        vec!["msd", "--set", "grid.spacing=log", "--set", "grid.start=0", "-o", "run"],
    ] {
        let out = qle(tmp.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!tmp.path().join("run").exists());
    }
}

#[test]
fn numeric_failure_exits_one_with_error_name() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qle(tmp.path(), &["correlate", "-o", "run"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[Divergent]"));
    assert!(!tmp.path().join("run").exists());

    let out = qle(tmp.path(), &["josephson", "--set", "josephson.bias=2", "-o", "run"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[RunningState]"));
}

#[test]
fn overrides_take_precedence_over_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qle(
        tmp.path(),
        &["msd", "-c", &config("msd_classical.toml"), "--set", "thermal.temperature=3", "-o", "run"],
    );
    assert!(out.status.success());
    let (_, rows) = read_csv(&tmp.path().join("run/msd.csv"));
    assert_eq!(rows[0][3], classical_free_msd(3.0, 1.0, 1.0, rows[0][0]));
    let m: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("run/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config"]["thermal"]["temperature"], 3.0);
    // defaults are recorded too
    assert_eq!(m["config"]["simulate"]["record_stride"], 10);
    assert_eq!(m["quadrature"]["rel_tol"], 1e-8);
}

#[test]
fn rerun_reproduces_outputs_bit_for_bit() {
    let tmp = tempfile::tempdir().unwrap();
    let table = tmp.path().join("mu.csv");
    let mut text = String::from("omega,re_mu\n0,1\n");
    for k in 1..=400 {
        let w = 1e-3 * 10f64.powf(5.0 * k as f64 / 400.0);
        text.push_str(&format!("{w},{}\n", 4.0 / (4.0 + w * w)));
    }
    fs::write(&table, text).unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(
        &cfg,
        "seed = 11\n[system]\nomega0 = 1.0\n[bath]\nmodel = \"tabulated\"\ntable = \"mu.csv\"\n\
         [grid]\nstart = 0.0\nstop = 5.0\npoints = 11\n",
    )
    .unwrap();
    let out = qle(tmp.path(), &["correlate", "-c", cfg.to_str().unwrap(), "-o", "a"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = qle(tmp.path(), &["rerun", "a/manifest.json", "-o", "b"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(dir_listing(&tmp.path().join("a")), dir_listing(&tmp.path().join("b")));

    let sim = [
        "simulate", "--set", "simulate.paths=200", "--set", "simulate.steps=500", "--set",
        "simulate.dump=true", "--set", "seed=5", "-o", "s1",
    ];
    assert!(qle(tmp.path(), &sim).status.success());
    let out = qle(tmp.path(), &["rerun", "s1/manifest.json", "-o", "s2", "--workers", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(dir_listing(&tmp.path().join("s1")), dir_listing(&tmp.path().join("s2")));

    // a changed input invalidates the manifest
    fs::write(&table, "omega,re_mu\n0,1\n10,1\n").unwrap();
    let out = qle(tmp.path(), &["rerun", "a/manifest.json", "-o", "c"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!tmp.path().join("c").exists());
}

#[test]
fn writes_only_inside_the_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qle(tmp.path(), &["junction", "-c", &config("junction_resistor.toml"), "-o", "nested/run"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let top: Vec<String> = fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(top, ["nested"]);
    let names: Vec<String> = dir_listing(&tmp.path().join("nested/run")).into_iter().map(|f| f.0).collect();
    assert_eq!(names, ["junction.csv", "junction.json", "manifest.json"]);
    let (_, rows) = read_csv(&tmp.path().join("nested/run/junction.csv"));
    assert!((rows[0][1] / rows[0][2] - 1.0).abs() < 0.01);
}

#[test]
fn path_dump_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qle(
        tmp.path(),
        &[
            "simulate", "--set", "simulate.paths=100", "--set", "simulate.steps=300", "--set",
            "simulate.record_stride=30", "--set", "simulate.dump=true", "-o", "s",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (spacing, paths) =
        qle_core::simulate::read_path_dump(fs::File::open(tmp.path().join("s/paths.bin")).unwrap()).unwrap();
    assert_eq!(paths.len(), 100);
    assert_eq!(paths[0].len(), 11);
    assert!((spacing - 0.03).abs() < 1e-15);
    let (_, rows) = read_csv(&tmp.path().join("s/simulate.csv"));
    let k = 10;
    let mean: f64 = paths.iter().map(|p| (p[k] - p[0]).powi(2)).sum::<f64>() / 100.0;
    assert!(((rows[k][1] - mean) / mean).abs() < 1e-12);
}
