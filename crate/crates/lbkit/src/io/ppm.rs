//! Binary PPM heatmap renderer for scalar fields.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::analysis::Field;
use crate::Error;

/// Color ramps for [`write_ppm_heatmap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Colormap {
    Grey,
    Rainbow,
}

impl Colormap {
    /// Maps `t` in [0,1] to an RGB triple.
    fn sample(&self, t: f64) -> [u8; 3] {
        let t = t.clamp(0.0, 1.0);
        match self {
            Colormap::Grey => {
                let v = (t * 255.0).round() as u8;
                [v, v, v]
            }
            Colormap::Rainbow => {
                // Piecewise-linear blue -> cyan -> green -> yellow -> red.
                let (r, g, b) = if t < 0.25 {
                    (0.0, 4.0 * t, 1.0)
                } else if t < 0.5 {
                    (0.0, 1.0, 1.0 - 4.0 * (t - 0.25))
                } else if t < 0.75 {
                    (4.0 * (t - 0.5), 1.0, 0.0)
                } else {
                    (1.0, 1.0 - 4.0 * (t - 0.75), 0.0)
                };
                [
                    (r * 255.0).round() as u8,
                    (g * 255.0).round() as u8,
                    (b * 255.0).round() as u8,
                ]
            }
        }
    }
}

/// Renders a scalar field as a binary P6 image, one pixel per cell.
///
/// The field minimum maps to the colormap start and the maximum to its end;
/// with `bounds` given, that range is used instead. A constant field maps
/// to the colormap midpoint. Rows are written top-down, so the highest `iy`
/// forms the first image row.
pub fn write_ppm_heatmap<P: AsRef<Path>>(
    field: &Field,
    path: P,
    colormap: Colormap,
    bounds: Option<(f64, f64)>,
) -> Result<(), Error> {
    if field.components != 1 {
        return Err(Error::Validation(
            "heatmap rendering needs a scalar field".into(),
        ));
    }
    let (min, max) = match bounds {
        Some((lo, hi)) => (lo, hi),
        None => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for iy in 0..field.ny {
                for ix in 0..field.nx {
                    let v = field.get(ix, iy, 0);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            (lo, hi)
        }
    };
    let span = max - min;

    let mut bytes = Vec::with_capacity(32 + 3 * field.nx * field.ny);
    bytes.extend_from_slice(format!("P6\n{} {}\n255\n", field.nx, field.ny).as_bytes());
    for iy in (0..field.ny).rev() {
        for ix in 0..field.nx {
            let t = if span == 0.0 {
                0.5
            } else {
                (field.get(ix, iy, 0) - min) / span
            };
            bytes.extend_from_slice(&colormap.sample(t));
        }
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}
