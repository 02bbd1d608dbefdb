//! Monte Carlo photon transport through the doped waveguide.
//!
//! Rays start at the entrance face with the source wavelength and a cone
//! direction. At every interface a single uniform draw against the Fresnel
//! reflectance decides between reflection and transmission. Entering a dot
//! the ray may be absorbed and, with the quantum yield, re-emitted
//! isotropically at a wavelength drawn from that segment's emission spectrum.

mod cdf;
mod histogram;
mod output;
mod rng;
mod run;
mod transport;
mod types;

pub use cdf::InverseCdf;
pub use histogram::{detector_histograms, histogram, BandHistograms, DetectorHistograms, HISTOGRAM_BINS};
pub use output::{write_histograms_csv, write_records_csv, write_tally_json, RunStamp};
pub use rng::{ray_rng, ray_seed};
pub use run::{run_simulation, run_simulation_with_threads, spawn_ray, SimulationResult, CHUNK_SIZE};
pub use transport::{trace_ray, Absorber, DotOptics, TraceResult};
pub use types::{
    Band, BandCounts, DetectorRecord, Diagnostics, Outcome, OutcomeReport, OutcomeTally, Ray, Tag, TagCounts,
    TraceConfig,
};
