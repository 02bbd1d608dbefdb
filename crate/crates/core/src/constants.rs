//! CODATA 2018 constants and the eV/nm conversion used at every interface.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Electron rest mass, kg.
pub const M0: f64 = 9.109_383_701_5e-31;
/// h·c in eV·nm.
pub const HC_EV_NM: f64 = 1_239.841_984;

/// Bundle of the constants above, for code that wants to pass them around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub e_charge: f64,
    pub eps0: f64,
    pub m0: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants =
        PhysicalConstants { hbar: HBAR, k_b: K_B, e_charge: E_CHARGE, eps0: EPS0, m0: M0 };
}

/// Thermal energy k_B·T in eV.
#[inline]
pub fn thermal_energy_ev(temperature: f64) -> f64 {
    K_B * temperature / E_CHARGE
}

#[inline]
pub fn wavelength_nm_to_ev(wavelength: f64) -> f64 {
    HC_EV_NM / wavelength
}

#[inline]
pub fn ev_to_wavelength_nm(energy: f64) -> f64 {
    HC_EV_NM / energy
}
