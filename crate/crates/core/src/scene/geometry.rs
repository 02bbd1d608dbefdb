use serde::Serialize;

use super::vec3::Vec3;

/// Smallest accepted hit distance, nm.
pub const HIT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Aabb { min, max }
    }

    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        (0..3).all(|i| p.axis(i) >= self.min.axis(i) - tol && p.axis(i) <= self.max.axis(i) + tol)
    }

    /// Slab test. Returns the parametric entry/exit interval of the full line
    /// and the axis of each event.
    pub fn ray_interval(&self, origin: Vec3, dir: Vec3) -> Option<(f64, usize, f64, usize)> {
        let mut t_enter = f64::NEG_INFINITY;
        let mut t_exit = f64::INFINITY;
        let (mut ax_enter, mut ax_exit) = (0, 0);
        for i in 0..3 {
            let o = origin.axis(i);
            let d = dir.axis(i);
            let (lo, hi) = (self.min.axis(i), self.max.axis(i));
            if d == 0.0 {
                if o < lo || o > hi {
                    return None;
                }
                continue;
            }
            let inv = 1.0 / d;
            let (mut t0, mut t1) = ((lo - o) * inv, (hi - o) * inv);
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            if t0 > t_enter {
                t_enter = t0;
                ax_enter = i;
            }
            if t1 < t_exit {
                t_exit = t1;
                ax_exit = i;
            }
        }
        (t_enter <= t_exit).then_some((t_enter, ax_enter, t_exit, ax_exit))
    }

    pub fn corners(&self) -> [Vec3; 8] {
        let (a, b) = (self.min, self.max);
        [
            Vec3::new(a.x, a.y, a.z),
            Vec3::new(b.x, a.y, a.z),
            Vec3::new(a.x, b.y, a.z),
            Vec3::new(b.x, b.y, a.z),
            Vec3::new(a.x, a.y, b.z),
            Vec3::new(b.x, a.y, b.z),
            Vec3::new(a.x, b.y, b.z),
            Vec3::new(b.x, b.y, b.z),
        ]
    }
}

/// Both roots of |o + t·d − c|² = r² for unit `d`, or `None` on a miss.
#[inline]
pub fn sphere_roots(center: Vec3, radius: f64, origin: Vec3, dir: Vec3) -> Option<(f64, f64)> {
    let oc = origin - center;
    let b = oc.dot(dir);
    let c = oc.dot(oc) - radius * radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    Some((-b - s, -b + s))
}

/// Nearest positive entry distance from outside the sphere.
#[inline]
pub fn sphere_entry(center: Vec3, radius: f64, origin: Vec3, dir: Vec3) -> Option<f64> {
    let (t0, _) = sphere_roots(center, radius, origin, dir)?;
    (t0 > HIT_EPS).then_some(t0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_hit_distance() {
        let t = sphere_entry(Vec3::new(0.0, 0.0, 5.0), 1.5, Vec3::ZERO, Vec3::Z).unwrap();
        assert!((t - 3.5).abs() < 1e-14);
        assert!(sphere_entry(Vec3::new(0.0, 2.0, 5.0), 1.5, Vec3::ZERO, Vec3::Z).is_none());
        assert!(sphere_entry(Vec3::new(0.0, 0.0, -5.0), 1.5, Vec3::ZERO, Vec3::Z).is_none());
    }

    #[test]
    fn box_interval() {
        let b = Aabb::new(Vec3::ZERO, Vec3::new(1.0, 1.0, 3.0));
        let (t0, _, t1, ax) = b.ray_interval(Vec3::new(0.5, 0.5, 1.0), Vec3::Z).unwrap();
        assert_eq!((t0, t1, ax), (-1.0, 2.0, 2));
        assert!(b.ray_interval(Vec3::new(2.0, 0.5, 1.0), Vec3::Z).is_none());
    }
}
