use std::f64::consts::PI;

use crate::constants::{thermal_energy_ev, E_CHARGE, HBAR, K_B, M0};
use crate::error::{Error, Result};
use crate::numerics::{brent_root, integrate};

use super::material::{QDConfig, QDMaterial};

/// Piezoelectric carrier density (m⁻³) in a spherical dot.
///
/// The piezo charge `d·F` is turned into a carrier count with the elementary
/// charge and spread over the dot volume `4/3·π·r³`. `force` in nN, `radius`
/// in nm, `d` in pC/N; the sign of `d` is irrelevant, only |d·F| carriers exist.
pub fn carrier_density(force: f64, radius: f64, d: f64) -> Result<f64> {
    if !(force >= 0.0) {
        return Err(Error::domain(format!("force must be >= 0, got {force}")));
    }
    if !(radius > 0.0) {
        return Err(Error::domain(format!("radius must be > 0, got {radius}")));
    }
    let charge = (d * 1e-12).abs() * force * 1e-9;
    let r = radius * 1e-9;
    let volume = 4.0 / 3.0 * PI * r * r * r;
    Ok(charge / E_CHARGE / volume)
}

/// Occupancy 1/(e^{(E−μ)/k_BT}+1), stable for any finite or infinite argument.
#[inline]
pub fn fermi_dirac(energy: f64, mu: f64, temperature: f64) -> f64 {
    let x = (energy - mu) / thermal_energy_ev(temperature);
    logistic(-x)
}

#[inline]
pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// ln(1/(1+e^x)), i.e. −softplus(x), without overflow.
#[inline]
pub(crate) fn ln_fermi(x: f64) -> f64 {
    if x == f64::INFINITY {
        f64::NEG_INFINITY
    } else if x > 0.0 {
        -x - (-x).exp().ln_1p()
    } else {
        -x.exp().ln_1p()
    }
}

/// ∫₀^∞ √x/(e^{x−η}+1) dx (the complete Fermi–Dirac integral of order ½,
/// without the 1/Γ(3/2) normalization).
///
/// Integrated in `t = √x` so the integrand is smooth at the origin. The range
/// ends where the integrand has fallen below 1e−16 of its peak. For η < 0 the
/// factor e^η is pulled out so non-degenerate tails never underflow.
pub fn fermi_integral_half(eta: f64) -> f64 {
    let x_max = eta.max(0.0) + 40.0;
    let t_max = x_max.sqrt();
    if eta < 0.0 {
        let g = |t: f64| {
            let t2 = t * t;
            2.0 * t2 * (-t2).exp() / (1.0 + (eta - t2).exp())
        };
        let (v, _) = integrate(g, 0.0, t_max, 0.0, 1e-14, 400);
        v * eta.exp()
    } else {
        let g = |t: f64| 2.0 * t * t * logistic(eta - t * t);
        // split at the Fermi edge so both pieces are smooth
        let edge = eta.sqrt();
        let (a, _) = integrate(g, 0.0, edge, 0.0, 1e-14, 400);
        let (b, _) = integrate(g, edge, t_max, 0.0, 1e-14, 400);
        a + b
    }
}

/// Prefactor (1/2π²)(2 m k_BT/ħ²)^{3/2} in m⁻³; `mass` in units of m0.
fn density_prefactor(temperature: f64, mass: f64) -> f64 {
    let m = mass * M0;
    let kt = K_B * temperature;
    (2.0 * m * kt / (HBAR * HBAR)).powf(1.5) / (2.0 * PI * PI)
}

/// Carrier density (m⁻³) of a parabolic band with chemical potential `mu` (eV).
pub fn band_density(mu: f64, temperature: f64, mass: f64) -> f64 {
    if mu == f64::NEG_INFINITY {
        return 0.0;
    }
    let eta = mu / thermal_energy_ev(temperature);
    density_prefactor(temperature, mass) * fermi_integral_half(eta)
}

/// Chemical potential (eV, measured from the band edge) holding `n` carriers per m³.
///
/// `n = 0` returns `f64::NEG_INFINITY`, the empty-band sentinel; every
/// occupancy evaluated with it is exactly zero.
pub fn solve_chemical_potential(n: f64, temperature: f64, mass: f64) -> Result<f64> {
    if !(n >= 0.0 && n.is_finite()) {
        return Err(Error::domain(format!("carrier density must be >= 0, got {n}")));
    }
    if !(temperature > 0.0) {
        return Err(Error::domain(format!("temperature must be > 0, got {temperature}")));
    }
    if !(mass > 0.0) {
        return Err(Error::domain(format!("mass must be > 0, got {mass}")));
    }
    if n == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let reduced = n / density_prefactor(temperature, mass);
    let target = reduced.ln();
    // Boltzmann statistics overestimate F(η), so its η is a lower bound;
    // F(η) > η^{3/2}/3 bounds η from above.
    let lo = (reduced / (PI.sqrt() / 2.0)).ln() - 1.0;
    let hi = lo.max((3.0 * reduced).powf(2.0 / 3.0)) + 1.0;
    let residual = |eta: f64| fermi_integral_half(eta).ln() - target;
    // relative tolerance 1e-10 on n is |Δ ln n| < 1e-10; solve tighter than that
    let eta = brent_root(residual, lo, hi, 1e-13, 1e-12, 200)?;
    Ok(eta * thermal_energy_ev(temperature))
}

/// Piezoelectric carrier populations and chemical potentials of one dot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierState {
    pub n_c: f64,
    pub n_v: f64,
    pub mu_c: f64,
    pub mu_v: f64,
}

impl CarrierState {
    /// Uniaxial compression: both bands receive `d33·F/e` carriers; each band
    /// is solved with its own effective mass.
    pub fn compute(cfg: &QDConfig, material: &QDMaterial) -> Result<Self> {
        cfg.validate()?;
        let n = carrier_density(cfg.force, cfg.radius, material.d33_pc_per_n)?;
        let mu_c = solve_chemical_potential(n, cfg.temperature, material.electron_mass)?;
        let mu_v = solve_chemical_potential(n, cfg.temperature, material.hole_mass)?;
        Ok(CarrierState { n_c: n, n_v: n, mu_c, mu_v })
    }

    pub fn is_empty(&self) -> bool {
        self.n_c == 0.0 && self.n_v == 0.0
    }
}
