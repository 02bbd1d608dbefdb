use serde::Serialize;

use super::types::{Band, DetectorRecord};

pub const HISTOGRAM_BINS: usize = 50;

/// Counts of `values` in 50 equal bins over [0, 1]; 1.0 falls in the last bin.
pub fn histogram(values: impl IntoIterator<Item = f64>) -> Vec<u64> {
    let mut h = vec![0; HISTOGRAM_BINS];
    for v in values {
        if (0.0..=1.0).contains(&v) {
            let k = ((v * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
            h[k] += 1;
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BandHistograms {
    pub band: Band,
    pub r_norm: Vec<u64>,
    pub p_perp: Vec<u64>,
    pub p_par: Vec<u64>,
}

/// Histograms of the emitted detector records, one set per wavelength band.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetectorHistograms {
    pub bands: [BandHistograms; 3],
}

pub fn detector_histograms(records: &[DetectorRecord]) -> DetectorHistograms {
    let bands = Band::ALL.map(|band| {
        let sel: Vec<&DetectorRecord> =
            records.iter().filter(|r| r.emitted_count > 0 && Band::of(r.wavelength_nm) == band).collect();
        BandHistograms {
            band,
            r_norm: histogram(sel.iter().map(|r| r.r_norm)),
            p_perp: histogram(sel.iter().map(|r| r.p_perp)),
            p_par: histogram(sel.iter().map(|r| r.p_par)),
        }
    });
    DetectorHistograms { bands }
}
