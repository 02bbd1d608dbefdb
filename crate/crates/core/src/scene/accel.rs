//! Nearest-dot queries behind a common trait, selected by name at runtime.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::geometry::{sphere_entry, Aabb};
use super::scene::QDSphere;
use super::vec3::Vec3;

/// Finds the nearest dot a ray enters, with `HIT_EPS < t < t_max`.
pub trait DotIntersector: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn nearest(&self, dots: &[QDSphere], origin: Vec3, dir: Vec3, t_max: f64) -> Option<(usize, f64)>;
}

/// What a factory gets to build an intersector.
pub struct AccelContext<'a> {
    pub dots: &'a [QDSphere],
    pub bounds: Aabb,
    pub cell_size: f64,
}

pub type AccelFactory = fn(&AccelContext<'_>) -> Box<dyn DotIntersector>;

pub struct AccelRegistry {
    factories: BTreeMap<&'static str, AccelFactory>,
}

impl AccelRegistry {
    pub fn empty() -> Self {
        AccelRegistry { factories: BTreeMap::new() }
    }

    pub fn register(&mut self, name: &'static str, factory: AccelFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn build(&self, name: &str, ctx: &AccelContext<'_>) -> Result<Box<dyn DotIntersector>> {
        let factory = self.factories.get(name).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            Error::config("scene.accelerator", format!("unknown accelerator `{name}`, known: {known:?}"))
        })?;
        Ok(factory(ctx))
    }
}

impl Default for AccelRegistry {
    fn default() -> Self {
        let mut r = AccelRegistry::empty();
        r.register("brute", |_| Box::new(BruteForce));
        r.register("grid", |ctx| Box::new(UniformGrid::new(ctx)));
        r
    }
}

/// Tests every dot.
#[derive(Debug, Clone, Copy)]
pub struct BruteForce;

impl DotIntersector for BruteForce {
    fn name(&self) -> &'static str {
        "brute"
    }

    fn nearest(&self, dots: &[QDSphere], origin: Vec3, dir: Vec3, t_max: f64) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, d) in dots.iter().enumerate() {
            if let Some(t) = sphere_entry(d.center, d.radius, origin, dir) {
                if t < t_max && best.is_none_or(|b| t < b.1) {
                    best = Some((i, t));
                }
            }
        }
        best
    }
}

/// Uniform grid over the core; each cell lists the dots whose bounding box
/// overlaps it. Traversal visits cells in ray order (3D DDA) and stops at the
/// first cell that contains a hit closer than its exit distance.
#[derive(Debug, Clone)]
pub struct UniformGrid {
    bounds: Aabb,
    cell: f64,
    dims: [usize; 3],
    cells: Vec<Vec<u32>>,
}

impl UniformGrid {
    pub fn new(ctx: &AccelContext<'_>) -> Self {
        let b = ctx.bounds;
        let cell = ctx.cell_size;
        let dims = [0, 1, 2].map(|i| (((b.max.axis(i) - b.min.axis(i)) / cell).ceil() as usize).max(1));
        let mut cells = vec![Vec::new(); dims[0] * dims[1] * dims[2]];
        for (idx, d) in ctx.dots.iter().enumerate() {
            let lo = [0, 1, 2].map(|i| Self::coord(&b, cell, dims[i], i, d.center.axis(i) - d.radius));
            let hi = [0, 1, 2].map(|i| Self::coord(&b, cell, dims[i], i, d.center.axis(i) + d.radius));
            for x in lo[0]..=hi[0] {
                for y in lo[1]..=hi[1] {
                    for z in lo[2]..=hi[2] {
                        cells[(z * dims[1] + y) * dims[0] + x].push(idx as u32);
                    }
                }
            }
        }
        UniformGrid { bounds: b, cell, dims, cells }
    }

    fn coord(b: &Aabb, cell: f64, dim: usize, axis: usize, v: f64) -> usize {
        let c = ((v - b.min.axis(axis)) / cell).floor();
        (c.max(0.0) as usize).min(dim - 1)
    }
}

impl DotIntersector for UniformGrid {
    fn name(&self) -> &'static str {
        "grid"
    }

    fn nearest(&self, dots: &[QDSphere], origin: Vec3, dir: Vec3, t_max: f64) -> Option<(usize, f64)> {
        let (t_enter, _, t_exit, _) = self.bounds.ray_interval(origin, dir)?;
        let t_start = t_enter.max(0.0);
        let t_end = t_exit.min(t_max);
        if t_start > t_end {
            return None;
        }
        let p = origin + dir * t_start;
        let mut idx = [0usize; 3];
        let mut step = [0isize; 3];
        let mut t_next = [f64::INFINITY; 3];
        let mut t_delta = [f64::INFINITY; 3];
        for i in 0..3 {
            idx[i] = Self::coord(&self.bounds, self.cell, self.dims[i], i, p.axis(i));
            let d = dir.axis(i);
            if d > 0.0 {
                step[i] = 1;
                let boundary = self.bounds.min.axis(i) + (idx[i] + 1) as f64 * self.cell;
                t_next[i] = (boundary - origin.axis(i)) / d;
                t_delta[i] = self.cell / d;
            } else if d < 0.0 {
                step[i] = -1;
                let boundary = self.bounds.min.axis(i) + idx[i] as f64 * self.cell;
                t_next[i] = (boundary - origin.axis(i)) / d;
                t_delta[i] = -self.cell / d;
            }
        }
        let mut best: Option<(usize, f64)> = None;
        loop {
            let cell = &self.cells[(idx[2] * self.dims[1] + idx[1]) * self.dims[0] + idx[0]];
            for &k in cell {
                let d = &dots[k as usize];
                if let Some(t) = sphere_entry(d.center, d.radius, origin, dir) {
                    if t < t_max && best.is_none_or(|b| t < b.1) {
                        best = Some((k as usize, t));
                    }
                }
            }
            let axis = if t_next[0] <= t_next[1] && t_next[0] <= t_next[2] {
                0
            } else if t_next[1] <= t_next[2] {
                1
            } else {
                2
            };
            let cell_exit = t_next[axis];
            if let Some((_, t)) = best {
                if t <= cell_exit {
                    return best;
                }
            }
            if cell_exit > t_end {
                return best;
            }
            let next = idx[axis] as isize + step[axis];
            if next < 0 || next >= self.dims[axis] as isize {
                return best;
            }
            idx[axis] = next as usize;
            t_next[axis] += t_delta[axis];
        }
    }
}
