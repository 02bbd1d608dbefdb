use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scene::{sample_cone_direction, Scene, Vec3};

use super::rng::ray_rng;
use super::transport::{trace_ray, DotOptics};
use super::types::{DetectorRecord, Outcome, OutcomeTally, Ray, Tag, TraceConfig};

/// Rays per work unit. Units are traced independently and merged in index
/// order, so the result does not depend on the number of workers.
pub const CHUNK_SIZE: u64 = 2048;

/// Distance of the spawn plane inside the entrance face, nm.
const SPAWN_DEPTH: f64 = 1e-6;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimulationResult {
    pub tally: OutcomeTally,
    pub records: Vec<DetectorRecord>,
}

/// Source ray `index`: uniform over the entrance face, cone direction.
pub fn spawn_ray<R: Rng + ?Sized>(scene: &Scene, rng: &mut R) -> Ray {
    let c = scene.core;
    let x = c.min.x + (c.max.x - c.min.x) * rng.random::<f64>();
    let y = c.min.y + (c.max.y - c.min.y) * rng.random::<f64>();
    let dir = sample_cone_direction(rng, scene.config.cone_half_angle_deg);
    Ray::new(Vec3::new(x, y, c.min.z + SPAWN_DEPTH), dir, scene.config.source_wavelength_nm)
}

fn run_chunk(scene: &Scene, optics: &DotOptics, cfg: &TraceConfig, start: u64, end: u64) -> SimulationResult {
    let mut out = SimulationResult::default();
    for index in start..end {
        let mut rng = ray_rng(cfg.master_seed, index);
        let ray = spawn_ray(scene, &mut rng);
        match trace_ray(scene, optics, ray, &mut rng, cfg) {
            Ok(r) => {
                out.tally.record(r.outcome, r.wavelength_nm);
                if r.capped {
                    out.tally.diagnostics.bounce_cap += 1;
                }
                out.records.extend(r.record);
            }
            Err(_) => {
                out.tally.record(Outcome { tag: Tag::WgLoss, emitted: false }, ray.wavelength);
                out.tally.diagnostics.geometry_errors += 1;
            }
        }
    }
    out
}

fn run_all(scene: &Scene, optics: &DotOptics, cfg: &TraceConfig) -> SimulationResult {
    let n_chunks = cfg.n_rays.div_ceil(CHUNK_SIZE);
    let parts: Vec<SimulationResult> = (0..n_chunks)
        .into_par_iter()
        .map(|k| run_chunk(scene, optics, cfg, k * CHUNK_SIZE, ((k + 1) * CHUNK_SIZE).min(cfg.n_rays)))
        .collect();
    let mut total = SimulationResult::default();
    for p in parts {
        total.tally.merge(&p.tally);
        total.records.extend(p.records);
    }
    total
}

/// Traces `cfg.n_rays` source rays on the current rayon pool.
pub fn run_simulation(scene: &Scene, optics: &DotOptics, cfg: &TraceConfig) -> Result<SimulationResult> {
    if !(0.0..=1.0).contains(&cfg.quantum_yield) {
        return Err(Error::config("trace.quantum_yield", "must lie in [0, 1]"));
    }
    Ok(run_all(scene, optics, cfg))
}

/// As [`run_simulation`] on a dedicated pool of `threads` workers.
pub fn run_simulation_with_threads(
    scene: &Scene,
    optics: &DotOptics,
    cfg: &TraceConfig,
    threads: usize,
) -> Result<SimulationResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))?;
    pool.install(|| run_simulation(scene, optics, cfg))
}
