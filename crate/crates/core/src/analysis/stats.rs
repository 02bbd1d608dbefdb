use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

use super::peaks::{fit_peak, PeakFit, PeakModel};

/// Coefficient means and sample standard deviations over replicate fits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepeatedFit {
    pub model: &'static str,
    pub param_names: Vec<&'static str>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub amplitude_mean: f64,
    pub amplitude_std: f64,
    pub position_mean: f64,
    pub position_std: f64,
    pub n_used: usize,
    pub n_excluded: usize,
    /// Individual fits in input order, failures omitted.
    #[serde(skip)]
    pub fits: Vec<PeakFit>,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    // offset by the first value so identical inputs give an exact mean
    let mean = v[0] + v.iter().map(|x| x - v[0]).sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Fits each spectrum independently. Failed fits are excluded and counted;
/// more than half failing is an error.
pub fn repeated_fit_stats(model: &dyn PeakModel, spectra: &[Spectrum]) -> Result<RepeatedFit> {
    if spectra.len() < 2 {
        return Err(Error::Fit(format!("{} spectra, need at least 2", spectra.len())));
    }
    let mut fits = Vec::new();
    let mut excluded = 0;
    let mut last_err = None;
    for s in spectra {
        match fit_peak(model, s) {
            Ok(f) => fits.push(f),
            Err(e) => {
                excluded += 1;
                last_err = Some(e);
            }
        }
    }
    if 2 * excluded > spectra.len() {
        return Err(Error::Fit(format!(
            "{excluded} of {} fits failed, last error: {}",
            spectra.len(),
            last_err.map(|e| e.to_string()).unwrap_or_default()
        )));
    }
    let n_params = model.param_names().len();
    let mut mean = Vec::with_capacity(n_params);
    let mut std = Vec::with_capacity(n_params);
    for k in 0..n_params {
        let col: Vec<f64> = fits.iter().map(|f| f.params[k]).collect();
        let (m, s) = mean_std(&col);
        mean.push(m);
        std.push(s);
    }
    let (amplitude_mean, amplitude_std) = mean_std(&fits.iter().map(|f| f.amplitude).collect::<Vec<_>>());
    let (position_mean, position_std) = mean_std(&fits.iter().map(|f| f.position).collect::<Vec<_>>());
    Ok(RepeatedFit {
        model: model.name(),
        param_names: model.param_names().to_vec(),
        mean,
        std,
        amplitude_mean,
        amplitude_std,
        position_mean,
        position_std,
        n_used: fits.len(),
        n_excluded: excluded,
        fits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::peaks::Gaussian;

    fn gauss(a: f64) -> Spectrum {
        let x: Vec<f64> = (0..200).map(|i| 500.0 + i as f64 * 0.5).collect();
        let y = x.iter().map(|v| a * (-0.5 * ((v - 550.0) / 8.0f64).powi(2)).exp()).collect();
        Spectrum::new(x, y).unwrap()
    }

    #[test]
    fn identical_replicas_have_zero_std() {
        let r = repeated_fit_stats(&Gaussian, &vec![gauss(1.0); 10]).unwrap();
        assert!(r.std.iter().all(|s| *s == 0.0));
        assert_eq!((r.n_used, r.n_excluded), (10, 0));
    }

    #[test]
    fn failures_are_excluded_and_counted() {
        let flat = Spectrum::new((0..20).map(|i| i as f64).collect(), vec![1.0; 20]).unwrap();
        let mut v = vec![gauss(1.0); 6];
        v.extend(vec![flat.clone(); 4]);
        let r = repeated_fit_stats(&Gaussian, &v).unwrap();
        assert_eq!((r.n_used, r.n_excluded), (6, 4));
        let mut bad = vec![gauss(1.0); 4];
        bad.extend(vec![flat; 6]);
        assert!(repeated_fit_stats(&Gaussian, &bad).is_err());
    }
}
