use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

use super::histogram::{DetectorHistograms, HISTOGRAM_BINS};
use super::types::{DetectorRecord, OutcomeReport, OutcomeTally};

/// Reproducibility stamp written into every output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunStamp {
    pub master_seed: u64,
    pub config_hash: String,
}

impl RunStamp {
    pub fn write_comment<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "# master_seed={}", self.master_seed)?;
        writeln!(w, "# config_hash={}", self.config_hash)
    }
}

#[derive(Serialize)]
struct TallyFile<'a> {
    master_seed: u64,
    config_hash: &'a str,
    counts: &'a OutcomeTally,
    percentages: OutcomeReport,
}

pub fn write_tally_json(path: &Path, stamp: &RunStamp, tally: &OutcomeTally) -> Result<()> {
    let file = TallyFile {
        master_seed: stamp.master_seed,
        config_hash: &stamp.config_hash,
        counts: tally,
        percentages: tally.report(),
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &file)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn write_records_csv(path: &Path, stamp: &RunStamp, records: &[DetectorRecord]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    stamp.write_comment(&mut out)?;
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(["wavelength_nm", "r_norm", "p_perp", "p_par", "emitted_count"])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns: `band,quantity,bin_lo,bin_hi,count`.
pub fn write_histograms_csv(path: &Path, stamp: &RunStamp, h: &DetectorHistograms) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    stamp.write_comment(&mut out)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["band", "quantity", "bin_lo", "bin_hi", "count"])?;
    let width = 1.0 / HISTOGRAM_BINS as f64;
    for b in &h.bands {
        for (name, counts) in [("r_norm", &b.r_norm), ("p_perp", &b.p_perp), ("p_par", &b.p_par)] {
            for (k, c) in counts.iter().enumerate() {
                w.serialize((b.band.label(), name, k as f64 * width, (k + 1) as f64 * width, c))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
