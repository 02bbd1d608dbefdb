use std::f64::consts::PI;

use crate::constants::{ev_to_wavelength_nm, thermal_energy_ev, wavelength_nm_to_ev, E_CHARGE, HBAR, M0};
use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, WavelengthGrid};

use super::carriers::{ln_fermi, logistic, CarrierState};
use super::material::{QDConfig, QDMaterial};

/// Ground-state confinement energy ħ²π²/(2·m·r²) of a spherical well, in eV.
/// `radius` in nm, `mass` in units of m0.
pub fn confinement_energy(radius: f64, mass: f64) -> Result<f64> {
    if !(radius > 0.0) || !(mass > 0.0) {
        return Err(Error::domain(format!("confinement needs radius > 0 and mass > 0, got r={radius}, m={mass}")));
    }
    let r = radius * 1e-9;
    Ok(HBAR * HBAR * PI * PI / (2.0 * mass * M0 * r * r) / E_CHARGE)
}

/// Piezoelectric level shift κ·F/r in eV.
pub fn piezo_energy(radius: f64, force: f64, material: &QDMaterial) -> f64 {
    material.piezo_kappa_ev_nm_per_nn * force / radius
}

/// Transition energy without the piezoelectric term:
/// E_g + E_e(r) + E_h(r) − E_ex + α₁T.
pub fn unstrained_energy(cfg: &QDConfig, material: &QDMaterial) -> Result<f64> {
    cfg.validate()?;
    Ok(material.band_gap_ev
        + confinement_energy(cfg.radius, material.electron_mass)?
        + confinement_energy(cfg.radius, material.hole_mass)?
        - material.exciton_binding_ev
        + material.alpha1_ev_per_k * cfg.temperature)
}

/// Effective dot energy E_QD(r, F, T) in eV.
pub fn effective_energy(cfg: &QDConfig, material: &QDMaterial) -> Result<f64> {
    Ok(unstrained_energy(cfg, material)? - piezo_energy(cfg.radius, cfg.force, material))
}

/// Emission rate of one dot as a function of photon energy.
///
/// `R(ħω) = (Γ/2)/((ħω − E_QD)² + (Γ/2)²) · f_c · (1 − f_v)`.
///
/// The occupations are taken on the carrier kinetic energies of a
/// k-conserving transition above the unstrained level E₀: the photon excess
/// ε = ħω − E₀ splits into ε·m_r/m_e for the electron and ε·m_r/m_h for the
/// hole. The Lorentzian sits at E_QD = E₀ − E_p, so the piezoelectric shift
/// moves the dot line but not the occupation window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionModel {
    pub unstrained_ev: f64,
    pub effective_ev: f64,
    pub linewidth_ev: f64,
    pub carriers: CarrierState,
    kt: f64,
    electron_share: f64,
    hole_share: f64,
}

impl EmissionModel {
    pub fn new(cfg: &QDConfig, material: &QDMaterial) -> Result<Self> {
        material.validate()?;
        let unstrained_ev = unstrained_energy(cfg, material)?;
        let carriers = CarrierState::compute(cfg, material)?;
        let mr = material.reduced_mass();
        Ok(EmissionModel {
            unstrained_ev,
            effective_ev: unstrained_ev - piezo_energy(cfg.radius, cfg.force, material),
            linewidth_ev: material.linewidth_ev,
            carriers,
            kt: thermal_energy_ev(cfg.temperature),
            electron_share: mr / material.electron_mass,
            hole_share: mr / material.hole_mass,
        })
    }

    /// Lorentzian factor; equals 2/Γ at ħω = E_QD.
    pub fn lorentzian(&self, energy: f64) -> f64 {
        let half = 0.5 * self.linewidth_ev;
        let d = energy - self.effective_ev;
        half / (d * d + half * half)
    }

    fn occupation_args(&self, energy: f64) -> (f64, f64) {
        let excess = energy - self.unstrained_ev;
        let xc = (self.electron_share * excess - self.carriers.mu_c) / self.kt;
        let xv = (self.hole_share * excess - self.carriers.mu_v) / self.kt;
        (xc, xv)
    }

    /// f_c·(1 − f_v) at photon energy `energy`.
    pub fn occupation(&self, energy: f64) -> f64 {
        let (xc, xv) = self.occupation_args(energy);
        logistic(-xc) * logistic(xv)
    }

    pub fn rate(&self, energy: f64) -> f64 {
        self.lorentzian(energy) * self.occupation(energy)
    }

    /// ln R, finite wherever R > 0 even when R itself underflows.
    pub fn ln_rate(&self, energy: f64) -> f64 {
        let (xc, xv) = self.occupation_args(energy);
        let half = 0.5 * self.linewidth_ev;
        let d = energy - self.effective_ev;
        half.ln() - (d * d + half * half).ln() + ln_fermi(xc) + ln_fermi(-xv)
    }

    pub fn spectrum(&self, grid: &WavelengthGrid) -> Result<Spectrum> {
        let wl = grid.points();
        let values = wl.iter().map(|&w| self.rate(wavelength_nm_to_ev(w))).collect();
        Spectrum::new(wl, values)
    }

    pub fn effective_wavelength_nm(&self) -> f64 {
        ev_to_wavelength_nm(self.effective_ev)
    }
}

pub fn emission_spectrum(cfg: &QDConfig, material: &QDMaterial, grid: &WavelengthGrid) -> Result<Spectrum> {
    EmissionModel::new(cfg, material)?.spectrum(grid)
}

/// Sigmoid absorption edge `p_max/(1 + e^{(E_edge − E)/w})` with the edge at
/// E_QD and width Γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionModel {
    pub edge_ev: f64,
    pub width_ev: f64,
    pub plateau: f64,
}

impl AbsorptionModel {
    pub fn new(cfg: &QDConfig, material: &QDMaterial) -> Result<Self> {
        Ok(AbsorptionModel {
            edge_ev: effective_energy(cfg, material)?,
            width_ev: material.linewidth_ev,
            plateau: material.absorption_plateau,
        })
    }

    pub fn probability_at_energy(&self, energy: f64) -> f64 {
        self.plateau * logistic((energy - self.edge_ev) / self.width_ev)
    }

    pub fn probability(&self, wavelength_nm: f64) -> f64 {
        self.probability_at_energy(wavelength_nm_to_ev(wavelength_nm))
    }
}

pub fn absorption_spectrum(cfg: &QDConfig, material: &QDMaterial, grid: &WavelengthGrid) -> Result<Spectrum> {
    let model = AbsorptionModel::new(cfg, material)?;
    let wl = grid.points();
    let values = wl.iter().map(|&w| model.probability(w)).collect();
    Spectrum::new(wl, values)
}
