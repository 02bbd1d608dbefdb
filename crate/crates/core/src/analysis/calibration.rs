use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::Normalization;
use crate::spectrum::Spectrum;

use super::peaks::{fit_peak, PeakModel};
use super::stats::repeated_fit_stats;

/// Replicate spectra measured at one force.
#[derive(Debug, Clone)]
pub struct ForcePoint {
    pub force_nn: f64,
    pub spectra: Vec<Spectrum>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub force_nn: f64,
    /// F / F_sat
    pub f_norm: f64,
    /// Fitted amplitude over the base amplitude.
    pub amplitude_ratio: f64,
    /// 100 · (ratio − 1)
    pub delta_a_pct: f64,
    /// Peak shift against the base point; negative is a blue shift.
    pub delta_lambda_nm: f64,
    pub std_a: f64,
    pub std_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationCurve {
    pub normalization: Normalization,
    /// Force of the amplitude/wavelength reference.
    pub base_force_nn: f64,
    pub f_sat: f64,
    /// Forces ≤ F_sat, sorted.
    pub points: Vec<CalibrationPoint>,
    /// Points above F_sat left out of the curve.
    pub beyond_saturation: Vec<CalibrationPoint>,
}

impl CalibrationCurve {
    /// Least-squares slope of `(F, y)` over the curve points.
    pub fn slope(&self, y: impl Fn(&CalibrationPoint) -> f64) -> f64 {
        let xs: Vec<f64> = self.points.iter().map(|p| p.force_nn).collect();
        let ys: Vec<f64> = self.points.iter().map(y).collect();
        super::relaxation::linear_slope(&xs, &ys)
    }
}

struct Summary {
    amplitude: f64,
    position: f64,
    std_a: f64,
    std_lambda: f64,
}

fn summarize(model: &dyn PeakModel, spectra: &[Spectrum]) -> Result<Summary> {
    match spectra {
        [] => Err(Error::Fit("force point without spectra".into())),
        [single] => {
            let f = fit_peak(model, single)?;
            Ok(Summary { amplitude: f.amplitude, position: f.position, std_a: 0.0, std_lambda: 0.0 })
        }
        many => {
            let r = repeated_fit_stats(model, many)?;
            Ok(Summary {
                amplitude: r.amplitude_mean,
                position: r.position_mean,
                std_a: r.amplitude_std,
                std_lambda: r.position_std,
            })
        }
    }
}

/// Fits every force point and expresses amplitude and peak shift against the
/// base force (ambient or reference). F_sat is the smallest force after which
/// ΔA grows by less than `tolerance_pct` to the next force; the largest force
/// when that never happens.
pub fn build_calibration(
    points: &[ForcePoint],
    base_force_nn: f64,
    model: &dyn PeakModel,
    normalization: Normalization,
    tolerance_pct: f64,
) -> Result<CalibrationCurve> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("{} force points, need at least 2", points.len())));
    }
    let mut sorted: Vec<&ForcePoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.force_nn.total_cmp(&b.force_nn));
    let sums: Vec<Summary> = sorted.iter().map(|p| summarize(model, &p.spectra)).collect::<Result<_>>()?;
    let base = sorted
        .iter()
        .position(|p| p.force_nn == base_force_nn)
        .ok_or_else(|| Error::Fit(format!("no spectrum at the base force {base_force_nn} nN")))?;
    let (a0, l0) = (sums[base].amplitude, sums[base].position);
    let mut all: Vec<CalibrationPoint> = sorted
        .iter()
        .zip(&sums)
        .map(|(p, s)| CalibrationPoint {
            force_nn: p.force_nn,
            f_norm: 0.0,
            amplitude_ratio: s.amplitude / a0,
            delta_a_pct: 100.0 * (s.amplitude / a0 - 1.0),
            delta_lambda_nm: s.position - l0,
            std_a: 100.0 * s.std_a / a0,
            std_lambda: s.std_lambda,
        })
        .collect();
    // exact zero at the base point
    all[base].amplitude_ratio = 1.0;
    all[base].delta_a_pct = 0.0;
    all[base].delta_lambda_nm = 0.0;

    let sat = (0..all.len() - 1)
        .find(|&i| all[i + 1].delta_a_pct - all[i].delta_a_pct < tolerance_pct)
        .unwrap_or(all.len() - 1);
    let f_sat = all[sat].force_nn;
    for p in &mut all {
        p.f_norm = if f_sat > 0.0 { p.force_nn / f_sat } else { 1.0 };
    }
    let beyond = all.split_off(sat + 1);
    Ok(CalibrationCurve { normalization, base_force_nn, f_sat, points: all, beyond_saturation: beyond })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::peaks::Gaussian;

    fn peak(a: f64, mu: f64) -> Spectrum {
        let x: Vec<f64> = (0..300).map(|i| 450.0 + i as f64 * 0.5).collect();
        let y = x.iter().map(|v| a * (-0.5 * ((v - mu) / 10.0f64).powi(2)).exp()).collect();
        Spectrum::new(x, y).unwrap()
    }

    fn point(f: f64, a: f64, mu: f64) -> ForcePoint {
        ForcePoint { force_nn: f, spectra: vec![peak(a, mu)] }
    }

    #[test]
    fn identical_spectra_flat_curve() {
        let pts = [point(1.0, 1.0, 560.0), point(2.0, 1.0, 560.0), point(3.0, 1.0, 560.0)];
        let c = build_calibration(&pts, 1.0, &Gaussian, Normalization::Ambient, 1.0).unwrap();
        for p in c.points.iter().chain(&c.beyond_saturation) {
            assert!(p.delta_a_pct.abs() < 1e-6 && p.delta_lambda_nm.abs() < 1e-6);
        }
    }

    #[test]
    fn saturation_and_normalization() {
        let pts = [
            point(1.0, 1.0, 560.0),
            point(2.0, 1.2, 558.0),
            point(3.0, 1.4, 556.0),
            point(4.0, 1.403, 555.0),
            point(5.0, 1.404, 555.0),
        ];
        let c = build_calibration(&pts, 1.0, &Gaussian, Normalization::Ambient, 1.0).unwrap();
        assert_eq!(c.f_sat, 3.0);
        assert_eq!(c.points.len(), 3);
        assert_eq!(c.points[0].delta_a_pct, 0.0);
        assert_eq!(c.points.last().unwrap().f_norm, 1.0);
        assert!((c.points[1].delta_a_pct - 20.0).abs() < 1e-6);
        assert!((c.points[2].delta_lambda_nm + 4.0).abs() < 1e-6);
        assert!(c.points.iter().all(|p| (0.0..=1.0).contains(&p.f_norm)));
    }

    #[test]
    fn missing_base_force() {
        let pts = [point(1.0, 1.0, 560.0), point(2.0, 1.0, 560.0)];
        assert!(build_calibration(&pts, 12.0, &Gaussian, Normalization::Reference, 1.0).is_err());
    }
}
