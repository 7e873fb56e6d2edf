//! File output and configuration input.
//!
//! All writers are deterministic: identical inputs produce byte-identical
//! files. The VTI writer emits VTK XML ImageData with plain-text payloads,
//! the CSV writer plain comma-separated tables, and the PPM writer binary
//! P6 heatmaps. Configuration files use a flat `[Section] Key = value`
//! format whose keys mirror the solver parameter tables.

mod config;
mod csv;
mod ppm;
mod vti;

pub use config::{parse_config, parse_config_str, ConfigTree};
pub use csv::write_csv;
pub use ppm::{write_ppm_heatmap, Colormap};
pub use vti::write_vti;
