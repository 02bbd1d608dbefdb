//! Peak fitting, force calibration curves and stress-relaxation fits.

mod calibration;
mod lm;
mod peaks;
mod relaxation;
mod stats;

pub use calibration::{build_calibration, CalibrationCurve, CalibrationPoint, ForcePoint};
pub use lm::{levenberg_marquardt, LmOptions, LmSolution};
pub use peaks::{
    fit_gaussian, fit_peak, fit_peak_from, fit_skewed_gaussian, Gaussian, GaussianFit, PeakFactory, PeakFit, PeakModel,
    PeakRegistry, SkewGaussian, SkewGaussianFit,
};
pub use relaxation::{fit_relaxation, linear_slope, RelaxationFit};
pub use stats::{repeated_fit_stats, RepeatedFit};

use crate::spectrum::Spectrum;

/// Histogram of `wavelengths` in bins of `width` nm covering `[start, stop)`,
/// as a spectrum sampled at the bin centers.
pub fn binned_spectrum(wavelengths: impl IntoIterator<Item = f64>, start: f64, stop: f64, width: f64) -> Spectrum {
    let n = ((stop - start) / width).ceil().max(1.0) as usize;
    let mut counts = vec![0.0; n];
    for w in wavelengths {
        if w >= start && w < start + n as f64 * width {
            counts[((w - start) / width) as usize] += 1.0;
        }
    }
    let centers = (0..n).map(|i| start + (i as f64 + 0.5) * width).collect();
    Spectrum::new(centers, counts).expect("bin centers increase")
}
