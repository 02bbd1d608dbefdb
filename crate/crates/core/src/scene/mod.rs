//! Waveguide geometry and the analytic optics primitives.

mod accel;
mod geometry;
mod optics;
mod sampling;
#[allow(clippy::module_inception)]
mod scene;
mod vec3;
mod wireframe;

pub use accel::{AccelContext, AccelFactory, AccelRegistry, BruteForce, DotIntersector, UniformGrid};
pub use geometry::{sphere_entry, sphere_roots, Aabb, HIT_EPS};
pub use optics::{critical_angle, fresnel_reflectance, reflect, refract, Refraction};
pub(crate) use optics::{fresnel_from_cos, refract_unchecked};
pub use sampling::{sample_cone_direction, sample_isotropic};
pub use scene::{build_scene, Face, Hit, Medium, QDSphere, Scene, SceneConfig, Segment, Surface, SEGMENT_COUNT};
pub use vec3::Vec3;
pub use wireframe::write_wireframe_csv;
