use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Material constants of the emitting semiconductor.
///
/// Units: energies in eV, masses in units of the electron rest mass,
/// piezoelectric coefficients in pC/N, `piezo_kappa` in eV·nm/nN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QDMaterial {
    pub band_gap_ev: f64,
    pub electron_mass: f64,
    pub hole_mass: f64,
    pub d31_pc_per_n: f64,
    pub d33_pc_per_n: f64,
    pub alpha1_ev_per_k: f64,
    pub debye_temperature_k: f64,
    /// Emission line width Γ (full width at half maximum).
    pub linewidth_ev: f64,
    pub exciton_binding_ev: f64,
    pub refractive_index: f64,
    pub relative_permittivity: f64,
    /// Piezoelectric level shift E_p = κ·F/r.
    pub piezo_kappa_ev_nm_per_nn: f64,
    /// Absorption probability far above the absorption edge.
    pub absorption_plateau: f64,
}

impl Default for QDMaterial {
    fn default() -> Self {
        crate::scenario::Scenario::default().material
    }
}

impl QDMaterial {
    /// Reduced electron–hole mass m_e·m_h/(m_e+m_h).
    pub fn reduced_mass(&self) -> f64 {
        self.electron_mass * self.hole_mass / (self.electron_mass + self.hole_mass)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("material.electron_mass", self.electron_mass),
            ("material.hole_mass", self.hole_mass),
            ("material.linewidth_ev", self.linewidth_ev),
            ("material.refractive_index", self.refractive_index),
            ("material.relative_permittivity", self.relative_permittivity),
            ("material.debye_temperature_k", self.debye_temperature_k),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(field, format!("must be > 0, got {v}")));
            }
        }
        if !(self.exciton_binding_ev >= 0.0) {
            return Err(Error::config("material.exciton_binding_ev", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.absorption_plateau) {
            return Err(Error::config("material.absorption_plateau", "must lie in [0, 1]"));
        }
        for (field, v) in [
            ("material.band_gap_ev", self.band_gap_ev),
            ("material.d31_pc_per_n", self.d31_pc_per_n),
            ("material.d33_pc_per_n", self.d33_pc_per_n),
            ("material.alpha1_ev_per_k", self.alpha1_ev_per_k),
            ("material.piezo_kappa_ev_nm_per_nn", self.piezo_kappa_ev_nm_per_nn),
        ] {
            if !v.is_finite() {
                return Err(Error::config(field, "must be finite"));
            }
        }
        Ok(())
    }
}

/// State of one dot: radius (nm), applied force (nN), temperature (K).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QDConfig {
    pub radius: f64,
    pub force: f64,
    pub temperature: f64,
}

impl QDConfig {
    pub fn new(radius: f64, force: f64, temperature: f64) -> Result<Self> {
        let c = QDConfig { radius, force, temperature };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::domain(format!("radius must be > 0, got {}", self.radius)));
        }
        if !(self.force.is_finite() && self.force >= 0.0) {
            return Err(Error::domain(format!("force must be >= 0, got {}", self.force)));
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::domain(format!("temperature must be > 0, got {}", self.temperature)));
        }
        Ok(())
    }

    pub fn with_force(self, force: f64) -> Self {
        QDConfig { force, ..self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_mass_of_defaults() {
        let m = QDMaterial::default();
        let mr = m.reduced_mass();
        assert!((mr - 0.13 * 0.45 / 0.58).abs() < 1e-15);
        m.validate().unwrap();
    }

    #[test]
    fn config_validation() {
        assert!(QDConfig::new(0.0, 1.0, 300.0).is_err());
        assert!(QDConfig::new(2.0, -1e-9, 300.0).is_err());
        assert!(QDConfig::new(2.0, 0.0, 0.0).is_err());
        assert!(QDConfig::new(2.0, 0.0, 300.0).is_ok());
    }

    #[test]
    fn material_validation_names_field() {
        let m = QDMaterial { linewidth_ev: 0.0, ..QDMaterial::default() };
        let err = m.validate().unwrap_err().to_string();
        assert!(err.contains("material.linewidth_ev"), "{err}");
    }
}
