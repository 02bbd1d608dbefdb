//! Single-peak line shapes behind a common trait, selected by name.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt::Debug;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::golden_max;
use crate::spectrum::Spectrum;

use super::lm::{levenberg_marquardt, LmOptions};

const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// A parametric peak shape `f(p, λ)`.
pub trait PeakModel: Send + Sync + Debug {
    fn name(&self) -> &'static str;
    fn param_names(&self) -> &'static [&'static str];
    fn eval(&self, p: &[f64], x: f64) -> f64;
    /// Starting points for the solver; the best converged fit wins.
    fn initial_guesses(&self, x: &[f64], y: &[f64]) -> Vec<Vec<f64>>;
    /// Puts equivalent parameter sets into canonical form (positive widths).
    fn canonical(&self, p: Vec<f64>) -> Vec<f64> {
        p
    }
    /// Wavelength of the peak maximum.
    fn position(&self, p: &[f64]) -> f64;
    /// Peak height above the baseline.
    fn height(&self, p: &[f64]) -> f64;
    /// Multiplies the fitted intensity scale by `c`.
    fn scale_amplitude(&self, p: &[f64], c: f64) -> Vec<f64>;
}

/// `A·exp(−(λ−μ)²/2σ²) + b`; parameters `[A, μ, σ, b]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Gaussian;

/// `A·φ(z)·Φ(αz)`, `z = (λ−ξ)/ω`, with φ, Φ the standard normal density and
/// distribution; parameters `[A, ξ, ω, α]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SkewGaussian;

struct Moments {
    baseline: f64,
    peak_x: f64,
    peak_y: f64,
    mean: f64,
    std: f64,
    skewness: f64,
    fwhm: Option<f64>,
}

fn moments(x: &[f64], y: &[f64]) -> Moments {
    let baseline = y.iter().copied().fold(f64::INFINITY, f64::min);
    let (imax, &ymax) = y.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
    let w: Vec<f64> = y.iter().map(|v| v - baseline).collect();
    let sw: f64 = w.iter().sum();
    let mean = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let var = x.iter().zip(&w).map(|(a, b)| (a - mean).powi(2) * b).sum::<f64>() / sw;
    let m3 = x.iter().zip(&w).map(|(a, b)| (a - mean).powi(3) * b).sum::<f64>() / sw;
    let std = var.sqrt();
    let half = baseline + 0.5 * (ymax - baseline);
    let cross = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = imax;
        for i in range {
            if y[i] < half {
                let t = (half - y[i]) / (y[prev] - y[i]);
                return Some(x[i] + t * (x[prev] - x[i]));
            }
            prev = i;
        }
        None
    };
    let left = cross(&mut (0..imax).rev());
    let right = cross(&mut (imax + 1..x.len()));
    let fwhm = match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        (Some(l), None) => Some(2.0 * (x[imax] - l)),
        (None, Some(r)) => Some(2.0 * (r - x[imax])),
        (None, None) => None,
    };
    Moments {
        baseline,
        peak_x: x[imax],
        peak_y: ymax,
        mean,
        std,
        skewness: if std > 0.0 { m3 / std.powi(3) } else { 0.0 },
        fwhm,
    }
}

impl PeakModel for Gaussian {
    fn name(&self) -> &'static str {
        "gaussian"
    }

    fn param_names(&self) -> &'static [&'static str] {
        &["amplitude", "centroid", "sigma", "baseline"]
    }

    fn eval(&self, p: &[f64], x: f64) -> f64 {
        let z = (x - p[1]) / p[2];
        p[0] * (-0.5 * z * z).exp() + p[3]
    }

    fn initial_guesses(&self, x: &[f64], y: &[f64]) -> Vec<Vec<f64>> {
        let m = moments(x, y);
        let sigma = m.fwhm.map(|f| f / FWHM_PER_SIGMA).filter(|s| *s > 0.0).unwrap_or(m.std);
        vec![vec![m.peak_y - m.baseline, m.peak_x, sigma, m.baseline]]
    }

    fn canonical(&self, mut p: Vec<f64>) -> Vec<f64> {
        p[2] = p[2].abs();
        p
    }

    fn position(&self, p: &[f64]) -> f64 {
        p[1]
    }

    fn height(&self, p: &[f64]) -> f64 {
        p[0]
    }

    fn scale_amplitude(&self, p: &[f64], c: f64) -> Vec<f64> {
        vec![p[0] * c, p[1], p[2], p[3] * c]
    }
}

impl SkewGaussian {
    /// Mode of the skew-normal shape, located numerically.
    pub fn mode(xi: f64, omega: f64, alpha: f64) -> f64 {
        if alpha == 0.0 {
            return xi;
        }
        let w = omega.abs();
        let z = golden_max(
            |z| {
                let v = std_normal_pdf(z) * std_normal_cdf(alpha * z);
                if v > 0.0 {
                    v.ln()
                } else {
                    f64::NEG_INFINITY
                }
            },
            -1.0,
            1.0,
            1e-13,
        );
        xi + w * z
    }
}

impl PeakModel for SkewGaussian {
    fn name(&self) -> &'static str {
        "skew_gaussian"
    }

    fn param_names(&self) -> &'static [&'static str] {
        &["amplitude", "location", "scale", "shape"]
    }

    fn eval(&self, p: &[f64], x: f64) -> f64 {
        let z = (x - p[1]) / p[2];
        p[0] * std_normal_pdf(z) * std_normal_cdf(p[3] * z)
    }

    fn initial_guesses(&self, x: &[f64], y: &[f64]) -> Vec<Vec<f64>> {
        let m = moments(x, y);
        let from_moments = (1.5 * m.skewness).clamp(-6.0, 6.0);
        let mut guesses = Vec::new();
        for alpha in [from_moments, 0.0, 2.0, -2.0, 5.0, -5.0] {
            let delta = alpha / (1.0 + alpha * alpha).sqrt();
            let omega = m.std / (1.0 - 2.0 * delta * delta / PI).sqrt();
            let xi = m.mean - omega * delta * (2.0 / PI).sqrt();
            let z = (Self::mode(xi, omega, alpha) - xi) / omega;
            let shape_max = std_normal_pdf(z) * std_normal_cdf(alpha * z);
            guesses.push(vec![m.peak_y / shape_max, xi, omega, alpha]);
        }
        guesses
    }

    fn canonical(&self, mut p: Vec<f64>) -> Vec<f64> {
        // (ω, α) and (−ω, −α) give the same curve
        if p[2] < 0.0 {
            p[2] = -p[2];
            p[3] = -p[3];
        }
        p
    }

    fn position(&self, p: &[f64]) -> f64 {
        Self::mode(p[1], p[2], p[3])
    }

    fn height(&self, p: &[f64]) -> f64 {
        self.eval(p, self.position(p))
    }

    fn scale_amplitude(&self, p: &[f64], c: f64) -> Vec<f64> {
        vec![p[0] * c, p[1], p[2], p[3]]
    }
}

/// Result of fitting one spectrum with a [`PeakModel`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakFit {
    pub model: &'static str,
    pub params: Vec<f64>,
    /// Peak height above the baseline.
    pub amplitude: f64,
    /// Wavelength of the maximum (centroid or mode), nm.
    pub position: f64,
    pub residual_rms: f64,
    pub iterations: usize,
}

/// Fits `model` to `spectrum` by damped least squares from each of the
/// model's initial guesses and keeps the lowest residual.
pub fn fit_peak(model: &dyn PeakModel, spectrum: &Spectrum) -> Result<PeakFit> {
    let guesses = model.initial_guesses(spectrum.wavelengths(), spectrum.intensities());
    fit_peak_from(model, spectrum, guesses)
}

/// As [`fit_peak`] with caller-supplied starting points.
pub fn fit_peak_from(model: &dyn PeakModel, spectrum: &Spectrum, guesses: Vec<Vec<f64>>) -> Result<PeakFit> {
    let x = spectrum.wavelengths();
    let y = spectrum.intensities();
    if x.len() < 5 {
        return Err(Error::Fit(format!("{} samples, need at least 5", x.len())));
    }
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    if !(hi - lo > 1e-12 * hi.abs().max(f64::MIN_POSITIVE)) {
        return Err(Error::Fit(format!("flat spectrum (min {lo}, max {hi}): no peak above the baseline")));
    }
    let fit_from = |p0: &[f64]| {
        let residuals = |p: &[f64], out: &mut [f64]| {
            for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
                *o = model.eval(p, *xi) - yi;
            }
        };
        levenberg_marquardt(residuals, p0, x.len(), LmOptions::default())
    };
    let mut best = None;
    let mut last_err = None;
    for p0 in guesses {
        if p0.iter().any(|v| !v.is_finite()) {
            continue;
        }
        match fit_from(&p0) {
            Ok(s) if best.as_ref().is_none_or(|b: &super::lm::LmSolution| s.cost < b.cost) => best = Some(s),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    let sol = best.ok_or_else(|| last_err.unwrap_or_else(|| Error::Fit("no usable initial guess".into())))?;
    let params = model.canonical(sol.params);
    let amplitude = model.height(&params);
    if !(amplitude > 0.0) || params.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit(format!("degenerate fit {params:?}")));
    }
    let position = model.position(&params);
    Ok(PeakFit {
        model: model.name(),
        residual_rms: (sol.cost / x.len() as f64).sqrt(),
        iterations: sol.iterations,
        amplitude,
        position,
        params,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub centroid: f64,
    pub sigma: f64,
    pub baseline: f64,
    pub residual_rms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkewGaussianFit {
    pub amplitude: f64,
    pub location: f64,
    pub scale: f64,
    pub shape: f64,
    /// Wavelength of the distribution maximum.
    pub mode: f64,
    pub residual_rms: f64,
}

pub fn fit_gaussian(spectrum: &Spectrum) -> Result<GaussianFit> {
    let f = fit_peak(&Gaussian, spectrum)?;
    Ok(GaussianFit {
        amplitude: f.params[0],
        centroid: f.params[1],
        sigma: f.params[2],
        baseline: f.params[3],
        residual_rms: f.residual_rms,
    })
}

pub fn fit_skewed_gaussian(spectrum: &Spectrum) -> Result<SkewGaussianFit> {
    let f = fit_peak(&SkewGaussian, spectrum)?;
    Ok(SkewGaussianFit {
        amplitude: f.params[0],
        location: f.params[1],
        scale: f.params[2],
        shape: f.params[3],
        mode: f.position,
        residual_rms: f.residual_rms,
    })
}

pub type PeakFactory = fn() -> Box<dyn PeakModel>;

/// Peak models by config name.
pub struct PeakRegistry {
    factories: BTreeMap<&'static str, PeakFactory>,
}

impl PeakRegistry {
    pub fn empty() -> Self {
        PeakRegistry { factories: BTreeMap::new() }
    }

    pub fn register(&mut self, name: &'static str, factory: PeakFactory) {
        self.factories.insert(name, factory);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn build(&self, name: &str) -> Result<Box<dyn PeakModel>> {
        let f = self.factories.get(name).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            Error::config("analysis.peak_model", format!("unknown peak model `{name}`, known: {known:?}"))
        })?;
        Ok(f())
    }
}

impl Default for PeakRegistry {
    fn default() -> Self {
        let mut r = PeakRegistry::empty();
        r.register("gaussian", || Box::new(Gaussian));
        r.register("skew_gaussian", || Box::new(SkewGaussian));
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(model: &dyn PeakModel, p: &[f64]) -> Spectrum {
        let x: Vec<f64> = (0..301).map(|i| 450.0 + i as f64).collect();
        let y = x.iter().map(|xi| model.eval(p, *xi).max(0.0)).collect();
        Spectrum::new(x, y).unwrap()
    }

    #[test]
    fn cdf_reference_values() {
        assert!((std_normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((std_normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
    }

    #[test]
    fn zero_skew_mode_is_location() {
        assert_eq!(SkewGaussian::mode(560.0, 10.0, 0.0), 560.0);
        let p = [1.0, 560.0, 10.0, 0.0];
        assert!((SkewGaussian.position(&p) - 560.0).abs() < 1e-12);
    }

    #[test]
    fn right_skew_mode_above_location() {
        assert!(SkewGaussian::mode(560.0, 10.0, 4.0) > 560.0);
        assert!(SkewGaussian::mode(560.0, 10.0, -4.0) < 560.0);
    }

    #[test]
    fn mode_is_the_maximum() {
        let p = [1.0, 560.0, 12.0, 3.0];
        let m = SkewGaussian.position(&p);
        let v = SkewGaussian.eval(&p, m);
        assert!(v >= SkewGaussian.eval(&p, m + 1e-3) && v >= SkewGaussian.eval(&p, m - 1e-3));
    }

    #[test]
    fn constant_spectrum_fails() {
        let s = Spectrum::new((0..50).map(|i| i as f64).collect(), vec![2.0; 50]).unwrap();
        assert!(matches!(fit_gaussian(&s), Err(Error::Fit(_))));
    }

    #[test]
    fn refit_is_idempotent() {
        let mut s = sample(&SkewGaussian, &[30.0, 550.0, 20.0, 3.0]);
        // perturb so the optimum has non-zero residuals
        let y: Vec<f64> =
            s.intensities().iter().enumerate().map(|(i, v)| v + 0.01 * ((i * 7919) % 13) as f64).collect();
        s = Spectrum::new(s.wavelengths().to_vec(), y).unwrap();
        let a = fit_peak(&SkewGaussian, &s).unwrap();
        let b = fit_peak_from(&SkewGaussian, &s, vec![a.params.clone()]).unwrap();
        for (u, v) in a.params.iter().zip(&b.params) {
            assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0), "{u} vs {v}");
        }
    }

    #[test]
    fn registry() {
        let r = PeakRegistry::default();
        assert_eq!(r.names().collect::<Vec<_>>(), vec!["gaussian", "skew_gaussian"]);
        assert_eq!(r.build("gaussian").unwrap().name(), "gaussian");
        assert!(r.build("lorentz").unwrap_err().to_string().contains("analysis.peak_model"));
    }
}
