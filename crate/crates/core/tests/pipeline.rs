use std::fs;
use std::path::Path;

use piezoguide::analysis::{PeakModel, SkewGaussian};
use piezoguide::io::write_spectrum_csv;
use piezoguide::pipeline::{cmd_analyze, cmd_relax, cmd_spectrum, cmd_sweep, cmd_trace, AnalyzeInputs, RunOptions};
use piezoguide::scenario::Scenario;
use piezoguide::{Error, Spectrum};

fn small() -> Scenario {
    let mut s = Scenario::default();
    s.trace.n_rays = 4000;
    s
}

fn opts(dir: &Path) -> RunOptions {
    RunOptions { out: Some(dir.to_path_buf()), overwrite: false, threads: Some(2) }
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn trace_writes_stamped_data_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("trace");
    let s = small();
    let m = cmd_trace(&s, &opts(&out)).unwrap();
    assert!(!m.has_errors());
    for name in ["tally.json", "detector_records.csv", "histograms.csv", "errors.json", "manifest.json"] {
        assert!(m.artifacts.iter().any(|a| a == name), "{name} not listed");
        assert!(out.join(name).exists(), "{name} missing");
    }
    let records = String::from_utf8(read(&out, "detector_records.csv")).unwrap();
    assert!(records.starts_with(&format!(
        "# master_seed={}\n# config_hash={}\n",
        s.trace.master_seed,
        s.config_hash()
    )));
    let manifest: serde_json::Value = serde_json::from_slice(&read(&out, "manifest.json")).unwrap();
    assert_eq!(manifest["command"], "trace");
    assert_eq!(manifest["config_hash"], s.config_hash());
}

#[test]
fn existing_output_requires_overwrite() {
    let tmp = tempfile::tempdir().unwrap();
    let s = small();
    let err = cmd_trace(&s, &opts(tmp.path())).unwrap_err();
    assert!(matches!(err, Error::OutputExists(_)));
    let o = RunOptions { overwrite: true, ..opts(tmp.path()) };
    cmd_trace(&s, &o).unwrap();
}

#[test]
fn repeated_runs_give_identical_data_files() {
    let tmp = tempfile::tempdir().unwrap();
    let s = small();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    cmd_trace(&s, &opts(&a)).unwrap();
    cmd_trace(&s, &RunOptions { threads: Some(5), ..opts(&b) }).unwrap();
    for name in ["tally.json", "detector_records.csv", "histograms.csv"] {
        assert_eq!(read(&a, name), read(&b, name), "{name} differs");
    }
}

#[test]
fn spectrum_command_reports_merge() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("spec");
    cmd_spectrum(&Scenario::default(), &opts(&out)).unwrap();
    let summary: serde_json::Value = serde_json::from_slice(&read(&out, "spectrum.json")).unwrap();
    let merge = summary["merge_force_nn"].as_f64().unwrap();
    assert!((0.024..=0.036).contains(&merge));
    let heat = String::from_utf8(read(&out, "heatmap.csv")).unwrap();
    assert_eq!(heat.lines().filter(|l| !l.starts_with('#')).count(), 1 + 41 * 1501);
}

#[test]
fn sweep_writes_one_curve_per_segment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let mut s = small();
    s.trace.n_rays = 20_000;
    s.sweep.forces_nn = piezoguide::scenario::ForceList::List(vec![1.0, 1.5]);
    let m = cmd_sweep(&s, &opts(&out)).unwrap();
    assert!(!m.has_errors(), "{:?}", m.errors);
    for seg in [2, 1] {
        let csv = String::from_utf8(read(&out, &format!("calibration_segment{seg}.csv"))).unwrap();
        assert!(csv.contains("F_norm,delta_A_pct,delta_lambda_nm,std_A,std_lambda"));
    }
    assert!(out.join("sweep_spectra.csv").exists());
}

fn write_peak(path: &Path, height: f64, mode_shift: f64) {
    let x: Vec<f64> = (0..=400).map(|i| 450.0 + 0.5 * i as f64).collect();
    let p = [1.0, 545.0 - mode_shift, 20.0, 3.0];
    let scale = height / SkewGaussian.height(&p);
    let y = x.iter().map(|v| scale * SkewGaussian.eval(&p, *v)).collect();
    write_spectrum_csv(path, &Spectrum::new(x, y).unwrap()).unwrap();
}

#[test]
fn analyze_builds_stats_and_calibration() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    fs::create_dir(&data).unwrap();
    let mut manifest = String::from("force_nn,path\n");
    let forces = [1.0, 2.0, 3.0, 4.0];
    for (i, f) in forces.iter().enumerate() {
        let name = format!("f{i}.csv");
        write_peak(&data.join(&name), 100.0 * (1.0 + 0.1 * i as f64), 0.5 * i as f64);
        manifest.push_str(&format!("{f},{name}\n"));
    }
    fs::write(data.join("forces.csv"), manifest).unwrap();
    let inputs = AnalyzeInputs {
        replicates: vec![data.join("f0.csv"), data.join("f1.csv")],
        force_manifest: Some(data.join("forces.csv")),
    };
    let out = tmp.path().join("out");
    let m = cmd_analyze(&Scenario::default(), &inputs, &opts(&out)).unwrap();
    assert!(!m.has_errors(), "{:?}", m.errors);
    let stats: serde_json::Value = serde_json::from_slice(&read(&out, "fit_stats.json")).unwrap();
    assert_eq!(stats["n_used"], 2);
    let csv = String::from_utf8(read(&out, "calibration.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for (k, r) in rows.iter().enumerate() {
        assert!((r[1] - 10.0 * k as f64).abs() < 1e-6, "delta_A {r:?}");
        assert!((r[2] + 0.5 * k as f64).abs() < 1e-6, "delta_lambda {r:?}");
    }
}

#[test]
fn analyze_rejects_malformed_input_before_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "wavelength_nm,intensity\n500,1\n501,x\n").unwrap();
    let out = tmp.path().join("out");
    let inputs = AnalyzeInputs { replicates: vec![bad], force_manifest: None };
    match cmd_analyze(&Scenario::default(), &inputs, &opts(&out)) {
        Err(Error::Parse { row, .. }) => assert_eq!(row, 3),
        other => panic!("expected a parse error, got {other:?}"),
    }
    assert!(!out.exists());
}

#[test]
fn relax_recovers_time_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("relax.csv");
    let mut csv = String::from("time_min,amplitude,wavelength_nm\n");
    for i in 0..=120 {
        let t = i as f64;
        csv.push_str(&format!("{t},{},{}\n", 0.4 + 0.6 * (-t / 25.0).exp(), 560.0 - 0.01 * t));
    }
    fs::write(&input, csv).unwrap();
    let out = tmp.path().join("out");
    cmd_relax(&Scenario::default(), &input, &opts(&out)).unwrap();
    let fit: serde_json::Value = serde_json::from_slice(&read(&out, "relaxation.json")).unwrap();
    assert!((fit["tau"].as_f64().unwrap() - 25.0).abs() < 1e-6);
    assert!((fit["wavelength_slope"].as_f64().unwrap() + 0.01).abs() < 1e-9);
}
