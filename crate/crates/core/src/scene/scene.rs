use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::accel::{AccelContext, AccelRegistry, DotIntersector};
use super::geometry::{sphere_roots, Aabb, HIT_EPS};
use super::vec3::Vec3;

pub const SEGMENT_COUNT: usize = 3;

/// Waveguide description. Geometry in nm, forces in nN, angles in degrees.
/// The waveguide axis is +z; the core cross-section is the square
/// `[0, L]×[0, L]` and segment `k` spans `z ∈ [kL, (k+1)L]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub n_core: f64,
    pub n_clad: f64,
    pub n_outside: f64,
    pub segment_length_nm: f64,
    pub clad_thickness_nm: f64,
    pub qd_spacing_nm: f64,
    pub qd_radius_nm: f64,
    pub segment_forces_nn: [f64; SEGMENT_COUNT],
    pub cone_half_angle_deg: f64,
    pub source_wavelength_nm: f64,
    /// `false` builds the bare waveguide without dots.
    pub populate_qds: bool,
    pub accelerator: String,
    /// Index of the dot spheres; taken from the material block when resolving a scenario.
    #[serde(skip)]
    pub qd_refractive_index: f64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        crate::scenario::Scenario::default().scene_config()
    }
}

impl SceneConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.n_outside >= 1.0 && self.n_clad > self.n_outside && self.n_core > self.n_clad) {
            return Err(Error::config(
                "scene.n_core",
                format!(
                    "need n_core > n_clad > n_outside >= 1, got {} / {} / {}",
                    self.n_core, self.n_clad, self.n_outside
                ),
            ));
        }
        for (field, v) in [
            ("scene.segment_length_nm", self.segment_length_nm),
            ("scene.clad_thickness_nm", self.clad_thickness_nm),
            ("scene.qd_spacing_nm", self.qd_spacing_nm),
            ("scene.qd_radius_nm", self.qd_radius_nm),
            ("scene.source_wavelength_nm", self.source_wavelength_nm),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(field, format!("must be > 0, got {v}")));
            }
        }
        if self.qd_spacing_nm <= 2.0 * self.qd_radius_nm {
            return Err(Error::config(
                "scene.qd_spacing_nm",
                format!(
                    "spacing {} nm must exceed the dot diameter {} nm",
                    self.qd_spacing_nm,
                    2.0 * self.qd_radius_nm
                ),
            ));
        }
        if self.populate_qds && self.qd_spacing_nm > self.segment_length_nm {
            return Err(Error::config("scene.qd_spacing_nm", "spacing exceeds the segment length"));
        }
        if self.segment_forces_nn.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
            return Err(Error::config("scene.segment_forces_nn", "forces must be >= 0"));
        }
        if !(self.cone_half_angle_deg > 0.0 && self.cone_half_angle_deg <= 90.0) {
            return Err(Error::config("scene.cone_half_angle_deg", "must lie in (0, 90]"));
        }
        if self.populate_qds && !(self.qd_refractive_index > 0.0) {
            return Err(Error::config("material.refractive_index", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub index: usize,
    pub extent: Aabb,
    pub n_core: f64,
    pub force: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QDSphere {
    pub center: Vec3,
    pub radius: f64,
    pub n_refr: f64,
    pub segment_index: usize,
}

/// Where a ray currently travels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Medium {
    Core,
    Cladding,
    Dot(usize),
    Outside,
}

/// Box face: axis (0=x, 1=y, 2=z) and side (false = min, true = max).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub axis: usize,
    pub max_side: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surface {
    Dot(usize),
    /// Side wall between core and cladding.
    CoreWall(Face),
    /// Outer cladding wall facing the surroundings.
    CladOuter(Face),
    /// Bare end face of the cladding shell.
    CladEnd(Face),
    /// Source-side core face at z = 0.
    Entrance,
    /// Core/outside interface at the far end; the detector sits behind it.
    Detector,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub surface: Surface,
    pub point: Vec3,
    /// Unit surface normal facing the incoming ray.
    pub normal: Vec3,
    pub distance: f64,
    /// Medium on the far side of the surface.
    pub next: Medium,
}

/// Immutable waveguide built from a [`SceneConfig`].
pub struct Scene {
    pub config: SceneConfig,
    pub segments: [Segment; SEGMENT_COUNT],
    pub qds: Vec<QDSphere>,
    pub core: Aabb,
    pub cladding: Aabb,
    intersector: Box<dyn DotIntersector>,
}

impl fmt::Debug for Scene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scene")
            .field("segments", &self.segments)
            .field("qds", &self.qds.len())
            .field("intersector", &self.intersector.name())
            .finish()
    }
}

/// Lattice coordinates along one segment edge: `floor(L/s)` points centered
/// in the edge (offset s/2 from each face when s divides L).
fn lattice(length: f64, spacing: f64) -> Vec<f64> {
    let count = (length / spacing + 1e-9).floor() as usize;
    let margin = 0.5 * (length - (count as f64 - 1.0) * spacing);
    (0..count).map(|i| margin + spacing * i as f64).collect()
}

pub fn build_scene(cfg: &SceneConfig) -> Result<Scene> {
    Scene::build(cfg, &AccelRegistry::default())
}

impl Scene {
    pub fn build(cfg: &SceneConfig, registry: &AccelRegistry) -> Result<Self> {
        cfg.validate()?;
        let mut qds = Vec::new();
        if cfg.populate_qds {
            let coords = lattice(cfg.segment_length_nm, cfg.qd_spacing_nm);
            for seg in 0..SEGMENT_COUNT {
                let z0 = seg as f64 * cfg.segment_length_nm;
                for &z in &coords {
                    for &y in &coords {
                        for &x in &coords {
                            qds.push(QDSphere {
                                center: Vec3::new(x, y, z0 + z),
                                radius: cfg.qd_radius_nm,
                                n_refr: cfg.qd_refractive_index,
                                segment_index: seg,
                            });
                        }
                    }
                }
            }
        }
        Self::with_dots(cfg, qds, registry)
    }

    /// Scene with an explicit dot list (tests, custom meshes).
    pub fn with_dots(cfg: &SceneConfig, qds: Vec<QDSphere>, registry: &AccelRegistry) -> Result<Self> {
        let l = cfg.segment_length_nm;
        let length = l * SEGMENT_COUNT as f64;
        let core = Aabb::new(Vec3::ZERO, Vec3::new(l, l, length));
        let t = cfg.clad_thickness_nm;
        let cladding = Aabb::new(Vec3::new(-t, -t, 0.0), Vec3::new(l + t, l + t, length));
        let segments = std::array::from_fn(|i| Segment {
            index: i,
            extent: Aabb::new(Vec3::new(0.0, 0.0, i as f64 * l), Vec3::new(l, l, (i + 1) as f64 * l)),
            n_core: cfg.n_core,
            force: cfg.segment_forces_nn[i],
        });
        for d in &qds {
            if d.segment_index >= SEGMENT_COUNT {
                return Err(Error::Geometry(format!("dot at {:?} has no segment", d.center)));
            }
            let seg: &Segment = &segments[d.segment_index];
            let inner = Aabb::new(
                seg.extent.min + Vec3::new(d.radius, d.radius, d.radius),
                seg.extent.max - Vec3::new(d.radius, d.radius, d.radius),
            );
            if !inner.contains(d.center, -1e-12) {
                return Err(Error::Geometry(format!("dot at {:?} is not inside its segment", d.center)));
            }
        }
        let cell = cfg.qd_spacing_nm.min(l);
        let intersector =
            registry.build(&cfg.accelerator, &AccelContext { dots: &qds, bounds: core, cell_size: cell })?;
        Ok(Scene { config: cfg.clone(), segments, qds, core, cladding, intersector })
    }

    pub fn accelerator_name(&self) -> &'static str {
        self.intersector.name()
    }

    pub fn length(&self) -> f64 {
        self.core.max.z
    }

    /// Distinct segment forces and, per segment, the index into that list.
    /// Dots in segments with equal forces share one spectrum.
    pub fn spectrum_handles(&self) -> (Vec<f64>, [usize; SEGMENT_COUNT]) {
        let mut forces: Vec<f64> = Vec::new();
        let mut handle = [0; SEGMENT_COUNT];
        for (i, s) in self.segments.iter().enumerate() {
            handle[i] = match forces.iter().position(|f| *f == s.force) {
                Some(k) => k,
                None => {
                    forces.push(s.force);
                    forces.len() - 1
                }
            };
        }
        (forces, handle)
    }

    pub fn refractive_index(&self, medium: Medium) -> f64 {
        match medium {
            Medium::Core => self.config.n_core,
            Medium::Cladding => self.config.n_clad,
            Medium::Dot(i) => self.qds[i].n_refr,
            Medium::Outside => self.config.n_outside,
        }
    }

    fn face_normal(axis: usize, max_side: bool) -> Vec3 {
        let mut n = [0.0; 3];
        n[axis] = if max_side { 1.0 } else { -1.0 };
        Vec3::new(n[0], n[1], n[2])
    }

    /// Nearest surface hit (`distance > HIT_EPS`) for a ray travelling in `medium`.
    pub fn intersect(&self, origin: Vec3, dir: Vec3, medium: Medium) -> Option<Hit> {
        match medium {
            Medium::Core => self.intersect_core(origin, dir),
            Medium::Cladding => self.intersect_cladding(origin, dir),
            Medium::Dot(i) => self.intersect_dot_interior(i, origin, dir),
            Medium::Outside => None,
        }
    }

    fn intersect_core(&self, origin: Vec3, dir: Vec3) -> Option<Hit> {
        let (_, _, t_exit, axis) = self.core.ray_interval(origin, dir)?;
        let dot = self.intersector.nearest(&self.qds, origin, dir, t_exit);
        if let Some((i, t)) = dot {
            let point = origin + dir * t;
            let normal = (point - self.qds[i].center).normalized();
            return Some(Hit { surface: Surface::Dot(i), point, normal, distance: t, next: Medium::Dot(i) });
        }
        if t_exit <= HIT_EPS {
            return None;
        }
        let max_side = dir.axis(axis) > 0.0;
        let outward = Self::face_normal(axis, max_side);
        let (surface, next) = match (axis, max_side) {
            (2, true) => (Surface::Detector, Medium::Outside),
            (2, false) => (Surface::Entrance, Medium::Outside),
            _ => (Surface::CoreWall(Face { axis, max_side }), Medium::Cladding),
        };
        Some(Hit { surface, point: origin + dir * t_exit, normal: -outward, distance: t_exit, next })
    }

    fn intersect_cladding(&self, origin: Vec3, dir: Vec3) -> Option<Hit> {
        let (_, _, t_out, axis) = self.cladding.ray_interval(origin, dir)?;
        let mut best: Option<Hit> = None;
        if t_out > HIT_EPS {
            let max_side = dir.axis(axis) > 0.0;
            let outward = Self::face_normal(axis, max_side);
            let surface = if axis == 2 {
                Surface::CladEnd(Face { axis, max_side })
            } else {
                Surface::CladOuter(Face { axis, max_side })
            };
            best = Some(Hit {
                surface,
                point: origin + dir * t_out,
                normal: -outward,
                distance: t_out,
                next: Medium::Outside,
            });
        }
        // re-entry into the core through a side wall
        if let Some((t_in, ax_in, _, _)) = self.core.ray_interval(origin, dir) {
            if t_in > HIT_EPS && ax_in != 2 && best.is_none_or(|b| t_in < b.distance) {
                let max_side = dir.axis(ax_in) < 0.0;
                let outward = Self::face_normal(ax_in, max_side);
                best = Some(Hit {
                    surface: Surface::CoreWall(Face { axis: ax_in, max_side }),
                    point: origin + dir * t_in,
                    normal: outward,
                    distance: t_in,
                    next: Medium::Core,
                });
            }
        }
        best
    }

    fn intersect_dot_interior(&self, i: usize, origin: Vec3, dir: Vec3) -> Option<Hit> {
        let d = &self.qds[i];
        let (_, t1) = sphere_roots(d.center, d.radius, origin, dir)?;
        if t1 <= HIT_EPS {
            return None;
        }
        let point = origin + dir * t1;
        let outward = (point - d.center).normalized();
        Some(Hit { surface: Surface::Dot(i), point, normal: -outward, distance: t1, next: Medium::Core })
    }

    /// Which segment a point on the core axis belongs to.
    pub fn segment_of(&self, z: f64) -> usize {
        ((z / self.config.segment_length_nm).floor().max(0.0) as usize).min(SEGMENT_COUNT - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SceneConfig {
        SceneConfig::default()
    }

    #[test]
    fn default_mesh_has_375_dots() {
        let s = build_scene(&cfg()).unwrap();
        assert_eq!(s.qds.len(), 375);
        for seg in 0..3 {
            assert_eq!(s.qds.iter().filter(|d| d.segment_index == seg).count(), 125);
        }
        assert_eq!(s.qds[0].center, Vec3::new(5.0, 5.0, 5.0));
        assert_eq!(s.accelerator_name(), "grid");
    }

    #[test]
    fn degenerate_lattice_centers_one_dot() {
        let mut c = cfg();
        c.qd_spacing_nm = 50.0;
        let s = build_scene(&c).unwrap();
        assert_eq!(s.qds.len(), 3);
        assert_eq!(s.qds[1].center, Vec3::new(25.0, 25.0, 75.0));
    }

    #[test]
    fn overlapping_dots_rejected() {
        let mut c = cfg();
        c.qd_spacing_nm = 3.0;
        let err = build_scene(&c).unwrap_err().to_string();
        assert!(err.contains("scene.qd_spacing_nm"), "{err}");
    }

    #[test]
    fn uniform_forces_share_one_spectrum() {
        let mut c = cfg();
        c.segment_forces_nn = [1.0, 1.0, 1.0];
        let s = build_scene(&c).unwrap();
        let (forces, handles) = s.spectrum_handles();
        assert_eq!(forces, vec![1.0]);
        assert_eq!(handles, [0, 0, 0]);
        c.segment_forces_nn = [1.0, 2.0, 1.0];
        let (forces, handles) = build_scene(&c).unwrap().spectrum_handles();
        assert_eq!(forces, vec![1.0, 2.0]);
        assert_eq!(handles, [0, 1, 0]);
    }

    #[test]
    fn axial_ray_in_corridor_hits_detector() {
        let s = build_scene(&cfg()).unwrap();
        // x = y = 10 runs between lattice columns at 5 and 15
        let o = Vec3::new(10.0, 10.0, 12.0);
        let hit = s.intersect(o, Vec3::Z, Medium::Core).unwrap();
        assert_eq!(hit.surface, Surface::Detector);
        assert!((hit.distance - (150.0 - 12.0)).abs() < 1e-12);
        assert_eq!(hit.normal, -Vec3::Z);
    }

    #[test]
    fn ray_at_dot_center() {
        let s = build_scene(&cfg()).unwrap();
        let o = Vec3::new(15.0, 15.0, 10.0);
        let hit = s.intersect(o, Vec3::Z, Medium::Core).unwrap();
        assert_eq!(
            hit.surface,
            Surface::Dot(s.qds.iter().position(|d| d.center == Vec3::new(15.0, 15.0, 15.0)).unwrap())
        );
        assert!((hit.distance - 3.5).abs() < 1e-12);
    }

    #[test]
    fn ray_on_detector_plane_leaving_misses() {
        let s = build_scene(&cfg()).unwrap();
        assert!(s.intersect(Vec3::new(10.0, 10.0, 150.0), Vec3::Z, Medium::Core).is_none());
    }

    #[test]
    fn cladding_hits() {
        let s = build_scene(&cfg()).unwrap();
        let o = Vec3::new(-5.0, 20.0, 30.0);
        let out = s.intersect(o, -Vec3::X, Medium::Cladding).unwrap();
        assert!(matches!(out.surface, Surface::CladOuter(_)));
        assert!((out.distance - 5.0).abs() < 1e-12);
        let back = s.intersect(o, Vec3::X, Medium::Cladding).unwrap();
        assert!(matches!(back.surface, Surface::CoreWall(_)));
        assert_eq!(back.next, Medium::Core);
        assert!((back.distance - 5.0).abs() < 1e-12);
    }
}
