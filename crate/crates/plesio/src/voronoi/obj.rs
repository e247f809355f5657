//! Wavefront OBJ export for cells and cell assemblies.

use std::io::{self, Write};

use nalgebra::Vector3;

use super::ConvexCell;

/// One named object in an export.
pub struct ObjObject<'a> {
    pub name: String,
    pub cell: &'a ConvexCell,
    pub offset: Vector3<f64>,
}

impl<'a> ObjObject<'a> {
    pub fn new(name: impl Into<String>, cell: &'a ConvexCell) -> Self {
        ObjObject {
            name: name.into(),
            cell,
            offset: Vector3::zeros(),
        }
    }

    pub fn translated(name: impl Into<String>, cell: &'a ConvexCell, offset: Vector3<f64>) -> Self {
        ObjObject {
            name: name.into(),
            cell,
            offset,
        }
    }
}

/// Format with 9 significant digits, shortest decimal form.
fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let mag = v.abs().log10().floor() as i32;
    let scale = 10f64.powi(8 - mag);
    format!("{}", (v * scale).round() / scale)
}

/// Write `v`/`f` records, one `o` object per cell, polygon faces wound
/// counterclockwise from outside, vertex indices 1-based and file-global.
pub fn write_obj<W: Write>(w: &mut W, objects: &[ObjObject<'_>]) -> io::Result<()> {
    let mut base = 1usize;
    for obj in objects {
        writeln!(w, "o {}", obj.name)?;
        for v in &obj.cell.vertices {
            let p = v + obj.offset;
            writeln!(w, "v {} {} {}", sig9(p.x), sig9(p.y), sig9(p.z))?;
        }
        for face in &obj.cell.faces {
            write!(w, "f")?;
            for &i in &face.cycle {
                write!(w, " {}", base + i)?;
            }
            writeln!(w)?;
        }
        base += obj.cell.vertices.len();
    }
    Ok(())
}
