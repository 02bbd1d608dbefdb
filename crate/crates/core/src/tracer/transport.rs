use rand::Rng;

use crate::error::{Error, Result};
use crate::qd::{AbsorptionModel, EmissionModel, QDConfig, QDMaterial};
use crate::scene::{
    fresnel_from_cos, reflect, refract_unchecked, sample_isotropic, Medium, Refraction, Scene, Surface, SEGMENT_COUNT,
};
use crate::spectrum::WavelengthGrid;

use super::cdf::InverseCdf;
use super::types::{DetectorRecord, Outcome, Ray, Tag, TraceConfig};

/// Absorption probability of a dot as a function of wavelength.
#[derive(Debug, Clone, Copy)]
pub enum Absorber {
    Edge(AbsorptionModel),
    Constant(f64),
}

impl Absorber {
    pub fn probability(&self, wavelength_nm: f64) -> f64 {
        match self {
            Absorber::Edge(m) => m.probability(wavelength_nm),
            Absorber::Constant(p) => *p,
        }
    }
}

/// Absorption and emission tables, one entry per distinct segment force.
#[derive(Debug, Clone)]
pub struct DotOptics {
    pub forces: Vec<f64>,
    pub absorbers: Vec<Absorber>,
    /// `None` for dots that cannot emit (empty spectrum).
    pub emitters: Vec<Option<InverseCdf>>,
    pub handle: [usize; SEGMENT_COUNT],
}

impl DotOptics {
    pub fn build(
        scene: &Scene,
        material: &QDMaterial,
        radius_nm: f64,
        temperature_k: f64,
        grid: &WavelengthGrid,
    ) -> Result<Self> {
        let (forces, handle) = scene.spectrum_handles();
        let mut absorbers = Vec::with_capacity(forces.len());
        let mut emitters = Vec::with_capacity(forces.len());
        for &f in &forces {
            let cfg = QDConfig::new(radius_nm, f, temperature_k)?;
            absorbers.push(Absorber::Edge(AbsorptionModel::new(&cfg, material)?));
            let spectrum = EmissionModel::new(&cfg, material)?.spectrum(grid)?;
            emitters.push(InverseCdf::new(&spectrum));
        }
        Ok(DotOptics { forces, absorbers, emitters, handle })
    }

    /// Same absorber and emitter for every dot.
    pub fn uniform(absorber: Absorber, emitter: Option<InverseCdf>) -> Self {
        DotOptics { forces: vec![0.0], absorbers: vec![absorber], emitters: vec![emitter], handle: [0; SEGMENT_COUNT] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceResult {
    pub outcome: Outcome,
    pub record: Option<DetectorRecord>,
    /// Final wavelength of the ray.
    pub wavelength_nm: f64,
    /// Stopped by the bounce cap.
    pub capped: bool,
}

fn finish(ray: &Ray, tag: Tag, record: Option<DetectorRecord>, capped: bool) -> TraceResult {
    TraceResult {
        outcome: Outcome { tag, emitted: ray.emitted_count > 0 },
        record,
        wavelength_nm: ray.wavelength,
        capped,
    }
}

/// Follows one ray, which must start inside the core, to its terminal event.
pub fn trace_ray<R: Rng + ?Sized>(
    scene: &Scene,
    optics: &DotOptics,
    mut ray: Ray,
    rng: &mut R,
    cfg: &TraceConfig,
) -> Result<TraceResult> {
    let mut medium = Medium::Core;
    loop {
        if ray.bounce_count >= cfg.max_bounces {
            return Ok(finish(&ray, Tag::WgLoss, None, true));
        }
        let hit = scene.intersect(ray.origin, ray.dir, medium).ok_or_else(|| {
            Error::Geometry(format!("no surface ahead in {medium:?} at {:?} along {:?}", ray.origin, ray.dir))
        })?;
        ray.bounce_count += 1;
        ray.origin = hit.point;

        let n1 = scene.refractive_index(medium);
        let n2 = scene.refractive_index(hit.next);
        let cos_i = (-ray.dir.dot(hit.normal)).clamp(0.0, 1.0);
        if rng.random::<f64>() < fresnel_from_cos(cos_i, n1, n2) {
            ray.dir = reflect(ray.dir, hit.normal);
            continue;
        }
        let incident = ray.dir;
        match refract_unchecked(ray.dir, hit.normal, n1, n2) {
            Refraction::Transmitted(t) => ray.dir = t,
            Refraction::TotalInternalReflection => {
                ray.dir = reflect(ray.dir, hit.normal);
                continue;
            }
        }
        match hit.surface {
            Surface::Detector => {
                let core = scene.core;
                let half = 0.5 * (core.max.x - core.min.x);
                let dx = hit.point.x - 0.5 * (core.min.x + core.max.x);
                let dy = hit.point.y - 0.5 * (core.min.y + core.max.y);
                let record = DetectorRecord {
                    wavelength_nm: ray.wavelength,
                    r_norm: ((dx * dx + dy * dy).sqrt() / (half * std::f64::consts::SQRT_2)).min(1.0),
                    p_perp: (incident.x * incident.x + incident.y * incident.y).sqrt(),
                    p_par: incident.z,
                    emitted_count: ray.emitted_count,
                };
                return Ok(finish(&ray, Tag::Detector, Some(record), false));
            }
            Surface::Entrance | Surface::CladOuter(_) | Surface::CladEnd(_) => {
                return Ok(finish(&ray, Tag::WgLoss, None, false));
            }
            Surface::CoreWall(_) => medium = hit.next,
            Surface::Dot(i) => {
                if medium != Medium::Core {
                    medium = Medium::Core;
                    continue;
                }
                let handle = optics.handle[scene.qds[i].segment_index];
                if rng.random::<f64>() >= optics.absorbers[handle].probability(ray.wavelength) {
                    medium = Medium::Dot(i);
                    continue;
                }
                let emitter = match &optics.emitters[handle] {
                    Some(e) if rng.random::<f64>() < cfg.quantum_yield => e,
                    _ => return Ok(finish(&ray, Tag::QdLoss, None, false)),
                };
                let dot = &scene.qds[i];
                ray.wavelength = emitter.sample(rng.random::<f64>());
                ray.dir = sample_isotropic(rng);
                ray.origin = dot.center + ray.dir * dot.radius;
                ray.emitted_count += 1;
                medium = Medium::Core;
            }
        }
    }
}
