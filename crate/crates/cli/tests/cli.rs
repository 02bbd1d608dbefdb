use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn piezoguide(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_piezoguide"))
        .args(args)
        .current_dir(cwd)
        .env_remove("PIEZOGUIDE_THREADS")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn spectrum_at_a_single_zero_force() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("s.toml"), "[spectrum]\nforces_nn = [0.0]\n").unwrap();
    let o = piezoguide(&["spectrum", "--config", "s.toml", "--out", "out"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.lines().any(|l| l == "heatmap.csv"));
    let heat = fs::read_to_string(tmp.path().join("out/heatmap.csv")).unwrap();
    let rows: Vec<&str> = heat.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 1501);
    assert!(rows.iter().all(|r| r.ends_with(",0.0")));
}

#[test]
fn malformed_config_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.toml"), "[trace]\n\n[qd]\nradius_nm = -2.0\n").unwrap();
    let o = piezoguide(&["spectrum", "--config", "bad.toml", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("qd.radius_nm"), "{err}");
    assert!(err.contains("line 4"), "{err}");
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn wrong_type_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.toml"), "[trace]\nn_rays = \"many\"\n").unwrap();
    let o = piezoguide(&["trace", "--config", "bad.toml", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trace.n_rays"), "{}", stderr(&o));
}

#[test]
fn empty_input_file_is_a_row_zero_parse_error() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("empty.csv"), "").unwrap();
    let o = piezoguide(&["relax", "empty.csv", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("empty.csv") && err.contains("row 0"), "{err}");
}

#[test]
fn existing_output_needs_overwrite() {
    let tmp = tempfile::tempdir().unwrap();
    fs::create_dir(tmp.path().join("out")).unwrap();
    fs::write(tmp.path().join("s.toml"), "[spectrum]\nforces_nn = [0.01]\n").unwrap();
    let o = piezoguide(&["spectrum", "--config", "s.toml", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = piezoguide(&["spectrum", "--config", "s.toml", "--out", "out", "--overwrite"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn point_failures_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    // a flat spectrum cannot be fitted: reported in errors.json, not fatal
    let mut csv = String::from("wavelength_nm,intensity\n");
    for i in 0..50 {
        csv.push_str(&format!("{},1.0\n", 500 + i));
    }
    fs::write(tmp.path().join("flat.csv"), csv).unwrap();
    let o = piezoguide(&["analyze", "flat.csv", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("replicates"));
    let errors: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/errors.json")).unwrap()).unwrap();
    assert_eq!(errors.as_array().unwrap().len(), 1);
}

#[test]
fn flat_relaxation_is_degenerate_not_fatal() {
    let tmp = tempfile::tempdir().unwrap();
    let mut csv = String::from("time_min,amplitude,wavelength_nm\n");
    for i in 0..10 {
        csv.push_str(&format!("{i},1.0,560\n"));
    }
    fs::write(tmp.path().join("flat.csv"), csv).unwrap();
    let o = piezoguide(&["relax", "flat.csv", "--out", "out"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let fit = fs::read_to_string(tmp.path().join("out/relaxation.json")).unwrap();
    assert!(fit.contains("\"degenerate\": true"), "{fit}");
}

#[test]
fn empty_scene_trace_smoke() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("s.toml"), "[scene]\npopulate_qds = false\n\n[trace]\nn_rays = 2000\n").unwrap();
    let o = piezoguide(&["trace", "--config", "s.toml", "--out", "out", "--seed", "7", "--threads", "2"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let tally: String = fs::read_to_string(tmp.path().join("out/tally.json")).unwrap();
    assert!(tally.contains("\"master_seed\": 7") || tally.contains("\"master_seed\":7"), "{tally}");
    let records = fs::read_to_string(tmp.path().join("out/detector_records.csv")).unwrap();
    assert!(records.starts_with("# master_seed=7\n"));
}

#[test]
fn zero_threads_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let o = piezoguide(&["trace", "--threads", "0", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}
