//! Single quantum-dot emission and absorption under compression.
//!
//! The emission rate is a Lorentzian at the effective dot energy multiplied by
//! the conduction/valence occupation window of the piezoelectrically generated
//! carriers. Both factors are evaluated on the photon-energy axis; wavelength
//! grids are converted with `λ = hc/E`.

mod carriers;
mod emission;
mod material;
mod sweep;

pub use carriers::{
    band_density, carrier_density, fermi_dirac, fermi_integral_half, solve_chemical_potential, CarrierState,
};
pub use emission::{
    absorption_spectrum, confinement_energy, effective_energy, emission_spectrum, piezo_energy, unstrained_energy,
    AbsorptionModel, EmissionModel,
};
pub use material::{QDConfig, QDMaterial};
pub use sweep::{find_features, merge_force, spectrum_sweep, FeaturePeak, Features, SpectrumSweep};
