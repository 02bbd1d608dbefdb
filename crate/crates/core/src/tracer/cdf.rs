use crate::spectrum::Spectrum;

/// Wavelength sampler for a tabulated spectrum, treated as a piecewise
/// linear density between grid points.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    x: Vec<f64>,
    y: Vec<f64>,
    /// cum[i] = mass below x[i]
    cum: Vec<f64>,
}

impl InverseCdf {
    /// `None` when the spectrum carries no weight.
    pub fn new(spectrum: &Spectrum) -> Option<Self> {
        let x = spectrum.wavelengths().to_vec();
        let y = spectrum.intensities().to_vec();
        if x.len() < 2 {
            return None;
        }
        let mut cum = Vec::with_capacity(x.len());
        cum.push(0.0);
        for i in 0..x.len() - 1 {
            let m = 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
            cum.push(cum[i] + m);
        }
        let total = *cum.last()?;
        (total > 0.0 && total.is_finite()).then_some(InverseCdf { x, y, cum })
    }

    pub fn total(&self) -> f64 {
        *self.cum.last().expect("non-empty")
    }

    /// Wavelength at cumulative fraction `u ∈ [0, 1)`.
    pub fn sample(&self, u: f64) -> f64 {
        let target = u * self.total();
        // first segment whose upper cumulative value exceeds the target
        let k = self.cum[1..].partition_point(|c| *c <= target).min(self.x.len() - 2);
        let (a, b) = (self.y[k], self.y[k + 1]);
        let h = self.x[k + 1] - self.x[k];
        let r = (target - self.cum[k]).max(0.0);
        let s = (b - a) / h;
        let disc = (a * a + 2.0 * s * r).max(0.0);
        let denom = a + disc.sqrt();
        let t = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
        self.x[k] + t.clamp(0.0, h)
    }
}
