//! CSV ingestion of measured spectra and the plot-ready data files.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::qd::SpectrumSweep;
use crate::spectrum::Spectrum;
use crate::tracer::RunStamp;

fn parse_err(path: &Path, row: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), row, message: message.into() }
}

/// Reads numeric rows of `columns` fields. A header row is expected and `#`
/// lines are skipped. Rows are numbered by file line; an empty file is row 0.
pub fn read_numeric_csv<R: Read>(reader: R, path: &Path, columns: usize) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_err(path, 0, e.to_string()))?.clone();
    if headers.is_empty() {
        return Err(parse_err(path, 0, "empty file"));
    }
    if headers.len() != columns {
        return Err(parse_err(path, 1, format!("expected {columns} columns, found {}", headers.len())));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(path, row, e.to_string())
        })?;
        let row = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let vals = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| parse_err(path, row, format!("`{f}` is not a number"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(vals);
    }
    if rows.is_empty() {
        return Err(parse_err(path, 0, "no data rows"));
    }
    Ok(rows)
}

/// Two-column `wavelength_nm,intensity` spectrum.
pub fn read_spectrum_csv(path: &Path) -> Result<Spectrum> {
    let rows = read_numeric_csv(File::open(path)?, path, 2)?;
    let (w, i): (Vec<f64>, Vec<f64>) = rows.into_iter().map(|r| (r[0], r[1])).unzip();
    Spectrum::new(w, i).map_err(|e| parse_err(path, 0, e.to_string()))
}

/// Relaxation series `time_min,amplitude,wavelength_nm`.
pub fn read_relaxation_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let rows = read_numeric_csv(File::open(path)?, path, 3)?;
    let mut out = (Vec::new(), Vec::new(), Vec::new());
    for r in rows {
        out.0.push(r[0]);
        out.1.push(r[1]);
        out.2.push(r[2]);
    }
    Ok(out)
}

/// Calibration manifest `force_nn,path`; paths are relative to the manifest.
pub fn read_force_manifest(path: &Path) -> Result<Vec<(f64, PathBuf)>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != 2 {
            return Err(parse_err(path, row, "expected `force_nn,path`"));
        }
        let force =
            rec[0].parse::<f64>().map_err(|_| parse_err(path, row, format!("`{}` is not a number", &rec[0])))?;
        out.push((force, dir.join(&rec[1])));
    }
    if out.is_empty() {
        return Err(parse_err(path, 0, "no data rows"));
    }
    Ok(out)
}

fn create(path: &Path, stamp: Option<&RunStamp>) -> Result<BufWriter<File>> {
    let mut w = BufWriter::new(File::create(path)?);
    if let Some(s) = stamp {
        s.write_comment(&mut w)?;
    }
    Ok(w)
}

pub fn write_spectrum_csv(path: &Path, spectrum: &Spectrum) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path, None)?);
    w.write_record(["wavelength_nm", "intensity"])?;
    for (x, y) in spectrum.wavelengths().iter().zip(spectrum.intensities()) {
        w.serialize((x, y))?;
    }
    w.flush()?;
    Ok(())
}

/// `force_nN,wavelength_nm,intensity`, one row per heat-map cell.
pub fn write_heatmap_csv(path: &Path, stamp: &RunStamp, sweep: &SpectrumSweep) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path, Some(stamp))?);
    w.write_record(["force_nN", "wavelength_nm", "intensity"])?;
    for (f, s) in sweep.forces.iter().zip(&sweep.spectra) {
        for (x, y) in s.wavelengths().iter().zip(s.intensities()) {
            w.serialize((f, x, y))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Tracked feature maxima per force; forces without any feature are omitted.
pub fn write_feature_track_csv(path: &Path, stamp: &RunStamp, sweep: &SpectrumSweep) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path, Some(stamp))?);
    w.write_record(["force_nN", "excitonic_nm", "excitonic_intensity", "piezo_nm", "piezo_intensity"])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for (f, feat) in sweep.forces.iter().zip(&sweep.features) {
        let Some(ex) = feat.excitonic else { continue };
        w.write_record([
            f.to_string(),
            ex.wavelength_nm.to_string(),
            ex.intensity.to_string(),
            opt(feat.piezo.map(|p| p.wavelength_nm)),
            opt(feat.piezo.map(|p| p.intensity)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
