//! Simulation of a quantum-dot doped polymer waveguide used as a pressure
//! sensor.
//!
//! * [`qd`]: force-dependent emission and absorption of a single CdSe dot.
//! * [`scene`]: waveguide geometry and the analytic optics primitives.
//! * [`tracer`]: Monte Carlo photon transport with absorption and re-emission.
//! * [`analysis`]: peak fitting, force calibration curves, stress relaxation.
//! * [`scenario`] and [`pipeline`]: config files and the end-to-end commands.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod constants;
pub mod error;
pub mod io;
pub mod numerics;
pub mod pipeline;
pub mod qd;
pub mod scenario;
pub mod scene;
pub mod spectrum;
pub mod tracer;

pub use error::{Error, Result};
pub use spectrum::{Spectrum, WavelengthGrid};
