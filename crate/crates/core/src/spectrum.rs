use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Intensities sampled on a strictly increasing wavelength grid (nm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    wavelengths: Vec<f64>,
    intensities: Vec<f64>,
}

impl Spectrum {
    pub fn new(wavelengths: Vec<f64>, intensities: Vec<f64>) -> Result<Self> {
        if wavelengths.len() != intensities.len() {
            return Err(Error::domain(format!(
                "spectrum has {} wavelengths but {} intensities",
                wavelengths.len(),
                intensities.len()
            )));
        }
        if wavelengths.iter().any(|w| !w.is_finite()) {
            return Err(Error::domain("spectrum wavelengths must be finite"));
        }
        if wavelengths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("spectrum wavelengths must be strictly increasing"));
        }
        if intensities.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::domain("spectrum intensities must be finite and non-negative"));
        }
        Ok(Spectrum { wavelengths, intensities })
    }

    /// Zero intensities on `grid`.
    pub fn zeros(grid: &WavelengthGrid) -> Self {
        let wavelengths = grid.points();
        let n = wavelengths.len();
        Spectrum { wavelengths, intensities: vec![0.0; n] }
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn len(&self) -> usize {
        self.wavelengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavelengths.is_empty()
    }

    /// Same grid, intensities multiplied by `factor` (must be ≥ 0).
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor >= 0.0);
        Spectrum {
            wavelengths: self.wavelengths.clone(),
            intensities: self.intensities.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn max_intensity(&self) -> f64 {
        self.intensities.iter().copied().fold(0.0, f64::max)
    }

    /// Wavelength of the largest sample, `None` for an empty or all-zero spectrum.
    pub fn argmax(&self) -> Option<f64> {
        let (i, v) = self.intensities.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
        (*v > 0.0).then(|| self.wavelengths[i])
    }
}

/// Uniform wavelength axis `[start, stop]` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavelengthGrid {
    pub start_nm: f64,
    pub stop_nm: f64,
    pub count: usize,
}

impl WavelengthGrid {
    pub fn new(start_nm: f64, stop_nm: f64, count: usize) -> Result<Self> {
        let g = WavelengthGrid { start_nm, stop_nm, count };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start_nm > 0.0 && self.stop_nm > self.start_nm && self.count >= 2) {
            return Err(Error::config("grid", "need 0 < start_nm < stop_nm and count >= 2"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.stop_nm - self.start_nm) / (self.count - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let step = self.step();
        (0..self.count).map(|i| self.start_nm + step * i as f64).collect()
    }

    /// Same span with `factor` times the point density.
    pub fn refined(&self, factor: usize) -> Self {
        WavelengthGrid { count: (self.count - 1) * factor + 1, ..*self }
    }
}
