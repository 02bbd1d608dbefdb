//! End-to-end commands: each takes a resolved [`Scenario`], writes its data
//! files into an output directory and returns a [`RunManifest`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::analysis::{
    binned_spectrum, build_calibration, fit_relaxation, repeated_fit_stats, CalibrationCurve, ForcePoint, PeakRegistry,
};
use crate::error::{Error, Result};
use crate::io;
use crate::qd::{spectrum_sweep, SpectrumSweep};
use crate::scenario::{Normalization, Scenario};
use crate::scene::{build_scene, Scene};
use crate::spectrum::Spectrum;
use crate::tracer::{
    detector_histograms, run_simulation, run_simulation_with_threads, write_histograms_csv, write_records_csv,
    write_tally_json, DotOptics, OutcomeTally, RunStamp, SimulationResult,
};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub overwrite: bool,
    pub threads: Option<usize>,
}

/// A failure confined to one sweep point or input file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointError {
    pub context: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub artifacts: Vec<String>,
    pub versions: BTreeMap<String, String>,
    pub timings_s: BTreeMap<String, f64>,
    pub errors: Vec<PointError>,
}

impl RunManifest {
    fn new(command: &str, scenario: &Scenario) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("piezoguide".to_string(), env!("CARGO_PKG_VERSION").to_string());
        RunManifest {
            command: command.to_string(),
            config_hash: scenario.config_hash(),
            master_seed: scenario.trace.master_seed,
            artifacts: Vec::new(),
            versions,
            timings_s: BTreeMap::new(),
            errors: Vec::new(),
        }
    }

    pub fn stamp(&self) -> RunStamp {
        RunStamp { master_seed: self.master_seed, config_hash: self.config_hash.clone() }
    }

    pub fn has_errors(&self) -> bool {
        !self.errors.is_empty()
    }

    /// Writes `errors.json` and `manifest.json` and lists both.
    fn finish(mut self, dir: &Path) -> Result<Self> {
        self.artifacts.push("errors.json".into());
        self.artifacts.push("manifest.json".into());
        io::write_json(&dir.join("errors.json"), &self.errors)?;
        io::write_json(&dir.join("manifest.json"), &self)?;
        Ok(self)
    }
}

/// Output directory for a command; refuses an existing one unless `overwrite`.
pub fn prepare_output(scenario: &Scenario, opts: &RunOptions) -> Result<PathBuf> {
    let dir = opts.out.clone().unwrap_or_else(|| scenario.output.directory.clone());
    if dir.exists() && !opts.overwrite {
        return Err(Error::OutputExists(dir));
    }
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn timed<T>(timings: &mut BTreeMap<String, f64>, key: &str, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let v = f();
    timings.insert(key.to_string(), t.elapsed().as_secs_f64());
    v
}

pub fn compute_spectrum_sweep(scenario: &Scenario) -> Result<SpectrumSweep> {
    let base = scenario.qd_config(0.0)?;
    spectrum_sweep(&scenario.spectrum.forces_nn.values(), &base, &scenario.material, &scenario.grid)
}

#[derive(Serialize)]
struct SpectrumSummary {
    forces: usize,
    merge_force_nn: Option<f64>,
}

pub fn cmd_spectrum(scenario: &Scenario, opts: &RunOptions) -> Result<RunManifest> {
    let dir = prepare_output(scenario, opts)?;
    let mut m = RunManifest::new("spectrum", scenario);
    let sweep = timed(&mut m.timings_s, "spectrum_sweep", || compute_spectrum_sweep(scenario))?;
    let stamp = m.stamp();
    io::write_heatmap_csv(&dir.join("heatmap.csv"), &stamp, &sweep)?;
    io::write_feature_track_csv(&dir.join("features.csv"), &stamp, &sweep)?;
    io::write_json(
        &dir.join("spectrum.json"),
        &SpectrumSummary { forces: sweep.forces.len(), merge_force_nn: sweep.merge_force },
    )?;
    m.artifacts.extend(["heatmap.csv", "features.csv", "spectrum.json"].map(String::from));
    m.finish(&dir)
}

/// Builds the scene and dot tables for `scenario` and traces it.
pub fn simulate(scenario: &Scenario, threads: Option<usize>) -> Result<(Scene, SimulationResult)> {
    let scene = build_scene(&scenario.scene_config())?;
    let optics =
        DotOptics::build(&scene, &scenario.material, scenario.qd.radius_nm, scenario.qd.temperature_k, &scenario.grid)?;
    let result = match threads {
        Some(n) => run_simulation_with_threads(&scene, &optics, &scenario.trace, n)?,
        None => run_simulation(&scene, &optics, &scenario.trace)?,
    };
    Ok((scene, result))
}

pub fn cmd_trace(scenario: &Scenario, opts: &RunOptions) -> Result<RunManifest> {
    let dir = prepare_output(scenario, opts)?;
    let mut m = RunManifest::new("trace", scenario);
    let (_, result) = timed(&mut m.timings_s, "run_simulation", || simulate(scenario, opts.threads))?;
    let stamp = m.stamp();
    write_tally_json(&dir.join("tally.json"), &stamp, &result.tally)?;
    write_records_csv(&dir.join("detector_records.csv"), &stamp, &result.records)?;
    write_histograms_csv(&dir.join("histograms.csv"), &stamp, &detector_histograms(&result.records))?;
    m.artifacts.extend(["tally.json", "detector_records.csv", "histograms.csv"].map(String::from));
    if result.tally.diagnostics.geometry_errors > 0 {
        m.errors.push(PointError {
            context: "trace".into(),
            message: format!("{} rays aborted by geometry errors", result.tally.diagnostics.geometry_errors),
        });
    }
    m.finish(&dir)
}

/// Detected emitted-ray spectrum and tally of one sweep point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub segment: usize,
    pub force_nn: f64,
    pub spectrum: Spectrum,
    pub tally: OutcomeTally,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub points: Vec<SweepPoint>,
    /// One curve per swept segment, in `sweep.segments` order.
    pub curves: Vec<(usize, CalibrationCurve)>,
    pub errors: Vec<PointError>,
}

fn base_force(scenario: &Scenario) -> f64 {
    match scenario.analysis.normalization {
        Normalization::Ambient => scenario.qd.ambient_force_nn,
        Normalization::Reference => scenario.analysis.reference_force_nn,
    }
}

/// Traces every (segment, force) pair of the sweep block and builds the
/// calibration curves. Failing points are reported, not fatal.
pub fn run_sweep(scenario: &Scenario, threads: Option<usize>) -> Result<SweepOutcome> {
    let model = PeakRegistry::default().build(&scenario.analysis.peak_model)?;
    let forces = scenario.sweep.forces_nn.values();
    let grid = scenario.grid;
    let mut points = Vec::new();
    let mut curves = Vec::new();
    let mut errors = Vec::new();
    for &seg in &scenario.sweep.segments {
        let mut force_points = Vec::new();
        for &f in &forces {
            let mut s = scenario.clone();
            s.scene.segment_forces_nn[seg] = f;
            match simulate(&s, threads) {
                Ok((_, r)) => {
                    let spectrum = binned_spectrum(
                        r.records.iter().filter(|d| d.emitted_count > 0).map(|d| d.wavelength_nm),
                        grid.start_nm,
                        grid.stop_nm,
                        scenario.analysis.bin_width_nm,
                    );
                    force_points.push(ForcePoint { force_nn: f, spectra: vec![spectrum.clone()] });
                    points.push(SweepPoint { segment: seg, force_nn: f, spectrum, tally: r.tally });
                }
                Err(e) => {
                    errors.push(PointError { context: format!("segment {seg}, force {f} nN"), message: e.to_string() })
                }
            }
        }
        match build_calibration(
            &force_points,
            base_force(scenario),
            model.as_ref(),
            scenario.analysis.normalization,
            scenario.analysis.saturation_tolerance_pct,
        ) {
            Ok(c) => curves.push((seg, c)),
            Err(e) => errors.push(PointError { context: format!("segment {seg} calibration"), message: e.to_string() }),
        }
    }
    Ok(SweepOutcome { points, curves, errors })
}

fn write_calibration_csv(path: &Path, stamp: &RunStamp, curve: &CalibrationCurve) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    stamp.write_comment(&mut out)?;
    std::io::Write::write_all(&mut out, format!("# f_sat_nN={}\n", curve.f_sat).as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["F_norm", "delta_A_pct", "delta_lambda_nm", "std_A", "std_lambda", "force_nN"])?;
    for p in &curve.points {
        w.serialize((p.f_norm, p.delta_a_pct, p.delta_lambda_nm, p.std_a, p.std_lambda, p.force_nn))?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_sweep(scenario: &Scenario, opts: &RunOptions) -> Result<RunManifest> {
    let dir = prepare_output(scenario, opts)?;
    let mut m = RunManifest::new("sweep", scenario);
    let outcome = timed(&mut m.timings_s, "sweep", || run_sweep(scenario, opts.threads))?;
    let stamp = m.stamp();
    for (seg, curve) in &outcome.curves {
        let name = format!("calibration_segment{seg}.csv");
        write_calibration_csv(&dir.join(&name), &stamp, curve)?;
        m.artifacts.push(name);
    }
    {
        let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("sweep_spectra.csv"))?);
        stamp.write_comment(&mut out)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["segment", "force_nN", "wavelength_nm", "count"])?;
        for p in &outcome.points {
            for (x, y) in p.spectrum.wavelengths().iter().zip(p.spectrum.intensities()) {
                w.serialize((p.segment, p.force_nn, x, y))?;
            }
        }
        w.flush()?;
    }
    m.artifacts.push("sweep_spectra.csv".into());
    let curves: Vec<_> = outcome.curves.iter().map(|(s, c)| (s, c)).collect();
    io::write_json(&dir.join("calibration.json"), &curves)?;
    m.artifacts.push("calibration.json".into());
    m.errors = outcome.errors;
    m.finish(&dir)
}

/// Inputs of `analyze`: replicate spectra and/or a force manifest.
#[derive(Debug, Clone, Default)]
pub struct AnalyzeInputs {
    pub replicates: Vec<PathBuf>,
    pub force_manifest: Option<PathBuf>,
}

pub fn cmd_analyze(scenario: &Scenario, inputs: &AnalyzeInputs, opts: &RunOptions) -> Result<RunManifest> {
    let model = PeakRegistry::default().build(&scenario.analysis.peak_model)?;
    // parse everything before touching the output directory
    let replicates = inputs.replicates.iter().map(|p| io::read_spectrum_csv(p)).collect::<Result<Vec<_>>>()?;
    let forces = match &inputs.force_manifest {
        Some(p) => io::read_force_manifest(p)?
            .into_iter()
            .map(|(f, path)| Ok((f, io::read_spectrum_csv(&path)?)))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    if replicates.is_empty() && forces.is_empty() {
        return Err(Error::config("analyze", "no input spectra"));
    }
    let dir = prepare_output(scenario, opts)?;
    let mut m = RunManifest::new("analyze", scenario);
    if !replicates.is_empty() {
        match repeated_fit_stats(model.as_ref(), &replicates) {
            Ok(r) => {
                io::write_json(&dir.join("fit_stats.json"), &r)?;
                m.artifacts.push("fit_stats.json".into());
            }
            Err(e) => m.errors.push(PointError { context: "replicates".into(), message: e.to_string() }),
        }
    }
    if !forces.is_empty() {
        let mut grouped: Vec<ForcePoint> = Vec::new();
        for (f, s) in forces {
            match grouped.iter_mut().find(|p| p.force_nn == f) {
                Some(p) => p.spectra.push(s),
                None => grouped.push(ForcePoint { force_nn: f, spectra: vec![s] }),
            }
        }
        match build_calibration(
            &grouped,
            base_force(scenario),
            model.as_ref(),
            scenario.analysis.normalization,
            scenario.analysis.saturation_tolerance_pct,
        ) {
            Ok(c) => {
                write_calibration_csv(&dir.join("calibration.csv"), &m.stamp(), &c)?;
                m.artifacts.push("calibration.csv".into());
            }
            Err(e) => m.errors.push(PointError { context: "calibration".into(), message: e.to_string() }),
        }
    }
    m.finish(&dir)
}

pub fn cmd_relax(scenario: &Scenario, input: &Path, opts: &RunOptions) -> Result<RunManifest> {
    let (t, a, w) = io::read_relaxation_csv(input)?;
    let dir = prepare_output(scenario, opts)?;
    let mut m = RunManifest::new("relax", scenario);
    match fit_relaxation(&t, &a, &w) {
        Ok(fit) => {
            io::write_json(&dir.join("relaxation.json"), &fit)?;
            m.artifacts.push("relaxation.json".into());
        }
        Err(e) => m.errors.push(PointError { context: input.display().to_string(), message: e.to_string() }),
    }
    m.finish(&dir)
}
