//! VTK XML ImageData writer with ascii payloads.

use std::fs;
use std::path::Path;

use crate::analysis::Field;
use crate::Error;

/// Writes named fields sharing one grid to a `.vti` file.
///
/// The file is ImageData with `WholeExtent "0 nx-1 0 ny-1 0 0"`, the grid
/// origin and spacing from the first field, and one point-data DataArray
/// per field with one or two components.
pub fn write_vti<P: AsRef<Path>>(fields: &[(&str, &Field)], path: P) -> Result<(), Error> {
    let (first_name, first) = fields
        .first()
        .ok_or_else(|| Error::Validation("vti output needs at least one field".into()))?;
    for (name, field) in fields {
        if field.nx != first.nx || field.ny != first.ny {
            return Err(Error::Validation(format!(
                "vti field {name} has shape {}x{}, expected {}x{} like {first_name}",
                field.nx, field.ny, first.nx, first.ny
            )));
        }
    }

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\"?>\n");
    out.push_str("<VTKFile type=\"ImageData\" version=\"0.1\" byte_order=\"LittleEndian\">\n");
    out.push_str(&format!(
        "<ImageData WholeExtent=\"0 {} 0 {} 0 0\" Origin=\"{} {} 0\" Spacing=\"{} {} {}\">\n",
        first.nx - 1,
        first.ny - 1,
        fmt_f64(first.origin[0]),
        fmt_f64(first.origin[1]),
        fmt_f64(first.delta_x),
        fmt_f64(first.delta_x),
        fmt_f64(first.delta_x),
    ));
    out.push_str(&format!(
        "<Piece Extent=\"0 {} 0 {} 0 0\">\n<PointData>\n",
        first.nx - 1,
        first.ny - 1
    ));
    for (name, field) in fields {
        out.push_str(&format!(
            "<DataArray type=\"Float64\" Name=\"{name}\" NumberOfComponents=\"{}\" format=\"ascii\">\n",
            field.components
        ));
        for iy in 0..field.ny {
            for ix in 0..field.nx {
                for c in 0..field.components {
                    out.push_str(&fmt_f64(field.get(ix, iy, c)));
                    out.push(' ');
                }
            }
            out.push('\n');
        }
        out.push_str("</DataArray>\n");
    }
    out.push_str("</PointData>\n<CellData>\n</CellData>\n</Piece>\n</ImageData>\n</VTKFile>\n");
    fs::write(path, out)?;
    Ok(())
}

fn fmt_f64(v: f64) -> String {
    // 17 significant digits round-trip an f64 through text.
    format!("{v:.16e}")
}
