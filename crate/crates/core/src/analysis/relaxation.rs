use serde::Serialize;

use crate::error::{Error, Result};

use super::lm::{levenberg_marquardt, LmOptions};

/// Fit of `A(t) = A_eq + (A0 − A_eq)·e^{−t/τ}` plus a linear wavelength drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelaxationFit {
    pub a0: f64,
    pub a_eq: f64,
    /// Minutes; NaN when degenerate.
    pub tau: f64,
    /// nm per minute.
    pub wavelength_slope: f64,
    pub residual_rms: f64,
    /// Constant amplitude: τ is not identifiable.
    pub degenerate: bool,
}

impl RelaxationFit {
    pub fn amplitude(&self, t: f64) -> f64 {
        if self.degenerate {
            return self.a_eq;
        }
        self.a_eq + (self.a0 - self.a_eq) * (-t / self.tau).exp()
    }
}

/// Ordinary least-squares slope.
pub fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

pub fn fit_relaxation(times: &[f64], amplitudes: &[f64], wavelengths: &[f64]) -> Result<RelaxationFit> {
    let n = times.len();
    if n < 5 {
        return Err(Error::Fit(format!("{n} time points, need at least 5")));
    }
    if amplitudes.len() != n || wavelengths.len() != n {
        return Err(Error::Fit("times, amplitudes and wavelengths differ in length".into()));
    }
    let wavelength_slope = linear_slope(times, wavelengths);
    let (lo, hi) = amplitudes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let scale = hi.abs().max(lo.abs());
    if hi - lo <= 1e-12 * scale {
        let mean = amplitudes.iter().sum::<f64>() / n as f64;
        let rms = (amplitudes.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        return Ok(RelaxationFit {
            a0: mean,
            a_eq: mean,
            tau: f64::NAN,
            wavelength_slope,
            residual_rms: rms,
            degenerate: true,
        });
    }
    let t_span = times[n - 1] - times[0];
    let (first, last) = (amplitudes[0], amplitudes[n - 1]);
    let target = last + (first - last) / std::f64::consts::E;
    let tau0 = times
        .iter()
        .zip(amplitudes)
        .find(|(_, a)| (first - last).signum() * (**a - target) <= 0.0)
        .map(|(t, _)| (t - times[0]).max(t_span / n as f64))
        .unwrap_or(t_span / 3.0);
    let residuals = |p: &[f64], out: &mut [f64]| {
        for ((o, t), a) in out.iter_mut().zip(times).zip(amplitudes) {
            *o = p[1] + (p[0] - p[1]) * (-t / p[2]).exp() - a;
        }
    };
    let sol = levenberg_marquardt(residuals, &[first, last, tau0], n, LmOptions::default())?;
    let [a0, a_eq, tau] = [sol.params[0], sol.params[1], sol.params[2]];
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Fit(format!("fitted τ = {tau} is not positive")));
    }
    Ok(RelaxationFit { a0, a_eq, tau, wavelength_slope, residual_rms: (sol.cost / n as f64).sqrt(), degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_recovery() {
        let t: Vec<f64> = (0..40).map(|i| i as f64 * 2.5).collect();
        let a: Vec<f64> = t.iter().map(|t| 0.5 + 0.5 * (-t / 20.0).exp()).collect();
        let w: Vec<f64> = t.iter().map(|t| 560.0 - 0.01 * t).collect();
        let f = fit_relaxation(&t, &a, &w).unwrap();
        assert!((f.a0 - 1.0).abs() < 1e-6 && (f.a_eq - 0.5).abs() < 1e-6 && (f.tau - 20.0).abs() < 2e-5);
        assert!((f.wavelength_slope + 0.01).abs() < 1e-12);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let t: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let f = fit_relaxation(&t, &[2.0; 10], &[560.0; 10]).unwrap();
        assert!(f.degenerate);
        assert_eq!(f.a0, f.a_eq);
    }

    #[test]
    fn too_few_points() {
        assert!(fit_relaxation(&[0.0, 1.0], &[1.0, 0.5], &[0.0, 0.0]).is_err());
    }
}
