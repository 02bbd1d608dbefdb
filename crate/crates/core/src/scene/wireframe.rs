use std::io::Write;

use crate::error::Result;

use super::scene::Scene;

/// Debug export of the scene: one row per box corner and per dot center.
/// Columns: `kind,index,x_nm,y_nm,z_nm,radius_nm`.
pub fn write_wireframe_csv<W: Write>(scene: &Scene, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "index", "x_nm", "y_nm", "z_nm", "radius_nm"])?;
    let boxes = scene.segments.iter().map(|s| ("segment", s.index, s.extent)).chain(std::iter::once((
        "cladding",
        0,
        scene.cladding,
    )));
    for (kind, index, aabb) in boxes {
        for c in aabb.corners() {
            w.serialize((kind, index, c.x, c.y, c.z, 0.0))?;
        }
    }
    for (i, d) in scene.qds.iter().enumerate() {
        w.serialize(("qd", i, d.center.x, d.center.y, d.center.z, d.radius))?;
    }
    w.flush()?;
    Ok(())
}
