use serde::Serialize;

use crate::constants::{ev_to_wavelength_nm, wavelength_nm_to_ev};
use crate::error::{Error, Result};
use crate::numerics::golden_max;
use crate::spectrum::{Spectrum, WavelengthGrid};

use super::emission::EmissionModel;
use super::material::{QDConfig, QDMaterial};

/// Energy step of the ridge scan, eV.
const SCAN_STEP_EV: f64 = 2e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeaturePeak {
    pub energy_ev: f64,
    pub wavelength_nm: f64,
    pub intensity: f64,
}

/// Local maxima of one emission spectrum.
///
/// `excitonic` is the maximum closest to E_QD; `piezo` is the strongest of the
/// others. Once the features have merged only `excitonic` is present.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Features {
    pub count: usize,
    pub excitonic: Option<FeaturePeak>,
    pub piezo: Option<FeaturePeak>,
}

impl Features {
    pub fn separated(&self) -> bool {
        self.excitonic.is_some() && self.piezo.is_some()
    }
}

/// Locates the spectral features of `model` between `e_lo` and `e_hi` (eV):
/// a scan of ln R followed by golden-section refinement of each local maximum.
pub fn find_features(model: &EmissionModel, e_lo: f64, e_hi: f64) -> Features {
    let n = (((e_hi - e_lo) / SCAN_STEP_EV).ceil() as usize).max(3);
    let step = (e_hi - e_lo) / n as f64;
    let values: Vec<f64> = (0..=n).map(|i| model.ln_rate(e_lo + step * i as f64)).collect();
    if values.iter().all(|v| *v == f64::NEG_INFINITY) {
        return Features::default();
    }
    let mut peaks = Vec::new();
    for i in 1..n {
        if values[i] > values[i - 1] && values[i] >= values[i + 1] {
            let a = e_lo + step * (i - 1) as f64;
            let b = e_lo + step * (i + 1) as f64;
            let e = golden_max(|x| model.ln_rate(x), a, b, 1e-12);
            peaks.push(FeaturePeak { energy_ev: e, wavelength_nm: ev_to_wavelength_nm(e), intensity: model.rate(e) });
        }
    }
    let count = peaks.len();
    if peaks.is_empty() {
        return Features::default();
    }
    let target = model.effective_ev;
    let (ix, _) = peaks
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1.energy_ev - target).abs().total_cmp(&(b.1.energy_ev - target).abs()))
        .expect("non-empty");
    let excitonic = peaks.swap_remove(ix);
    let piezo = peaks.into_iter().max_by(|a, b| a.intensity.total_cmp(&b.intensity));
    Features { count, excitonic: Some(excitonic), piezo }
}

fn energy_window(grid: &WavelengthGrid) -> (f64, f64) {
    (wavelength_nm_to_ev(grid.stop_nm), wavelength_nm_to_ev(grid.start_nm))
}

fn features_at(base: &QDConfig, material: &QDMaterial, force: f64, grid: &WavelengthGrid) -> Result<Features> {
    let model = EmissionModel::new(&base.with_force(force), material)?;
    let (lo, hi) = energy_window(grid);
    Ok(find_features(&model, lo, hi))
}

/// Bisects for the force at which the two features coalesce, given
/// `separated_at` (two features) and `merged_at` (one).
pub fn merge_force(
    base: &QDConfig,
    material: &QDMaterial,
    grid: &WavelengthGrid,
    separated_at: f64,
    merged_at: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = (separated_at, merged_at);
    if !features_at(base, material, lo, grid)?.separated() {
        return Err(Error::domain(format!("features are not separated at F={lo} nN")));
    }
    if features_at(base, material, hi, grid)?.separated() {
        return Err(Error::domain(format!("features are still separated at F={hi} nN")));
    }
    while hi - lo > 1e-7 * hi {
        let mid = 0.5 * (lo + hi);
        if features_at(base, material, mid, grid)?.separated() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One emission spectrum per force plus the tracked features.
#[derive(Debug, Clone)]
pub struct SpectrumSweep {
    pub forces: Vec<f64>,
    pub spectra: Vec<Spectrum>,
    pub features: Vec<Features>,
    /// Refined force where the two features first merge, if the sweep crosses it.
    pub merge_force: Option<f64>,
}

pub fn spectrum_sweep(
    forces: &[f64],
    base: &QDConfig,
    material: &QDMaterial,
    grid: &WavelengthGrid,
) -> Result<SpectrumSweep> {
    if forces.iter().any(|f| !(*f >= 0.0)) {
        return Err(Error::domain("sweep forces must be non-negative"));
    }
    if forces.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("sweep forces must be sorted"));
    }
    let (lo, hi) = energy_window(grid);
    let mut spectra = Vec::with_capacity(forces.len());
    let mut features = Vec::with_capacity(forces.len());
    for &f in forces {
        let model = EmissionModel::new(&base.with_force(f), material)?;
        spectra.push(model.spectrum(grid)?);
        features.push(find_features(&model, lo, hi));
    }
    let mut merge = None;
    for i in 1..forces.len() {
        if features[i - 1].separated() && !features[i].separated() && features[i].count > 0 {
            merge = Some(merge_force(base, material, grid, forces[i - 1], forces[i])?);
            break;
        }
    }
    Ok(SpectrumSweep { forces: forces.to_vec(), spectra, features, merge_force: merge })
}
