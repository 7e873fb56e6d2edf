//! Benchmark cases wiring the kit together, plus the dispatch used by the
//! command line tool.
//!
//! Every case reads its parameters from a [`ConfigTree`] seeded with the
//! case defaults and optionally overlaid by a configuration file. Console
//! output is prefixed with the producing component in brackets so logs can
//! be filtered mechanically.

mod advection_diffusion;
mod cavity;
mod optimization;
mod poiseuille;
mod porous_plate;

pub use advection_diffusion::{run_advection_diffusion_1d, run_advection_diffusion_2d};
pub use cavity::run_cavity_2d;
pub use optimization::{run_poiseuille_identification, run_rosenbrock};
pub use poiseuille::{run_poiseuille_2d, PoiseuilleMode};
pub use porous_plate::run_porous_plate_2d;

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use crate::geometry::Geometry;
use crate::io::{parse_config, ConfigTree};
use crate::lattice::{BlockLattice, Dynamics};
use crate::Error;

/// Environment variable overriding the output directory of all cases.
pub const OUTPUT_DIR_ENV: &str = "LBKIT_OUTPUT_DIR";

/// Prints one tagged console line, `[component] message`.
pub fn log(tag: &str, message: impl Display) {
    println!("[{tag}] {message}");
}

/// Per-resolution error norms of one case run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub resolution: usize,
    pub spacing: f64,
    /// Absolute L1, L2, Linf.
    pub abs: [f64; 3],
    /// Relative L1, L2, Linf.
    pub rel: [f64; 3],
}

/// Outcome of one case invocation.
#[derive(Debug, Clone, Default)]
pub struct CaseReport {
    pub case: String,
    pub error_table: Vec<ErrorRow>,
    /// Fitted order of convergence over the error table, when applicable.
    pub eoc_slope: Option<f64>,
    pub eoc_pairwise: Vec<f64>,
    /// Steps at which each resolution reached its convergence criterion.
    pub convergence_steps: Vec<(usize, u64)>,
    pub wall_clock_seconds: f64,
    /// Files written by the run.
    pub manifest: Vec<PathBuf>,
    /// Case-specific scalar results (recovered controls, drifts, ...).
    pub values: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl CaseReport {
    fn new(case: &str) -> Self {
        CaseReport {
            case: case.to_string(),
            ..Default::default()
        }
    }
}

/// Shared case setup: merged configuration and resolved output directory.
pub struct CaseContext {
    pub config: ConfigTree,
    pub output_dir: PathBuf,
}

impl CaseContext {
    /// Builds the context for a named case: case defaults, overlaid by the
    /// optional configuration file, the output-directory environment
    /// variable and the explicit override (strongest last).
    pub fn new(
        case: &str,
        config_path: Option<&Path>,
        output_override: Option<PathBuf>,
    ) -> Result<Self, Error> {
        let mut config = default_config(case)?;
        if let Some(path) = config_path {
            let file = parse_config(path)?;
            for (key, value) in file.iter() {
                config.set(key, value);
            }
        }
        let mut output_dir = PathBuf::from(
            config
                .raw("Output.OutputDir")
                .unwrap_or("./tmp")
                .to_string(),
        );
        if let Ok(env_dir) = std::env::var(OUTPUT_DIR_ENV) {
            output_dir = PathBuf::from(env_dir);
        }
        if let Some(dir) = output_override {
            output_dir = dir;
        }
        output_dir = output_dir.join(case);
        std::fs::create_dir_all(&output_dir)?;
        Ok(CaseContext { config, output_dir })
    }
}

/// All case names known to the dispatcher.
pub fn known_cases() -> &'static [&'static str] {
    &[
        "poiseuille2d",
        "advectionDiffusion1d",
        "advectionDiffusion2d",
        "porousPlate2d",
        "cavity2d",
        "rosenbrock",
        "poiseuilleIdentification",
    ]
}

fn default_config(case: &str) -> Result<ConfigTree, Error> {
    let mut c = ConfigTree::default();
    c.set("Application.Name", case);
    c.set("Output.OutputDir", "./tmp");
    match case {
        "poiseuille2d" => {
            c.set("Application.Mode", "ForceDriven");
            c.set("Application.Discretization.Resolution", 51);
            c.set("Application.Discretization.LatticeRelaxationTime", 0.8);
            c.set("Application.PhysParameters.CharPhysLength", 1.0);
            c.set("Application.PhysParameters.CharPhysVelocity", 1.0);
            c.set("Application.PhysParameters.ReynoldsNumber", 10.0);
            c.set("Application.PhysParameters.PhysDensity", 1.0);
            c.set("Application.PhysParameters.PhysMaxTime", 60.0);
            c.set("Application.StartUpTime", 2.0);
            c.set("Application.ConvergenceCheck.Interval", 1.0);
            c.set("Application.ConvergenceCheck.Residuum", 1e-5);
            c.set("Output.SaveTime", 10.0);
            c.set("Eoc.Resolutions", "21,31,41,51");
        }
        "advectionDiffusion1d" => {
            c.set("Application.Discretization.Resolution", 100);
            c.set("Application.Discretization.LatticeRelaxationTime", 0.8);
            c.set("Application.PhysParameters.Diffusivity", 1.5);
            c.set("Application.PhysParameters.PecletNumber", 40.0 / 3.0);
            c.set("Application.PhysParameters.DomainLength", 2.0);
            c.set("Application.PhysParameters.AmplitudeFraction", 0.1);
            c.set("Eoc.Resolutions", "50,100,200");
            c.set("Output.SaveTime", 0.05);
        }
        "advectionDiffusion2d" => {
            c.set("Application.Discretization.Resolution", 100);
            c.set("Application.Discretization.LatticeRelaxationTime", 0.8);
            c.set("Application.PhysParameters.Diffusivity", 0.05);
            c.set("Application.PhysParameters.PecletNumber", 100.0);
            c.set("Application.PhysParameters.DomainLength", 2.0);
            c.set("Application.PhysParameters.AmplitudeFraction", 0.1);
            c.set("Eoc.Resolutions", "50,100,200");
            c.set("Output.SaveTime", 0.5);
        }
        "porousPlate2d" => {
            c.set("Application.Discretization.Resolution", 64);
            c.set("Application.Discretization.LatticeRelaxationTime", 0.8);
            c.set("Application.PhysParameters.CharPhysLength", 1.0);
            c.set("Application.PhysParameters.CharPhysVelocity", 0.1);
            c.set("Application.PhysParameters.PhysViscosity", 0.05);
            c.set("Application.PhysParameters.PhysDensity", 1.0);
            c.set("Application.PhysParameters.ReynoldsNumber", 2.0);
            c.set("Application.PhysParameters.PrandtlNumber", 1.0);
            c.set("Application.PhysParameters.ColdTemperature", 0.0);
            c.set("Application.PhysParameters.HotTemperature", 1.0);
            c.set("Application.PhysParameters.PhysMaxTime", 400.0);
            c.set("Application.ConvergenceCheck.Interval", 2.0);
            c.set("Application.ConvergenceCheck.Residuum", 1e-9);
            c.set("Output.SaveTime", 100.0);
        }
        "cavity2d" => {
            c.set("Application.Discretization.Resolution", 64);
            c.set("Application.Discretization.LatticeRelaxationTime", 0.692);
            c.set("Application.PhysParameters.CharPhysLength", 1.0);
            c.set("Application.PhysParameters.CharPhysVelocity", 1.0);
            c.set("Application.PhysParameters.ReynoldsNumber", 100.0);
            c.set("Application.PhysParameters.PhysDensity", 1.0);
            c.set("Application.PhysParameters.PhysMaxTime", 100.0);
            c.set("Application.StartUpTime", 2.0);
            c.set("Application.ConvergenceCheck.Interval", 1.0);
            c.set("Application.ConvergenceCheck.Residuum", 1e-6);
            c.set("Output.SaveTime", 20.0);
        }
        "rosenbrock" => {
            c.set("Optimization.MaxIter", 100);
            c.set("Optimization.MaxStepAttempts", 20);
            c.set("Optimization.Tolerance", 1e-10);
            c.set("Optimization.Lambda", 1.0);
            c.set("Optimization.L", 20);
            c.set("Optimization.StepCondition", "StrongWolfe");
            c.set("Optimization.StartX", -1.2);
            c.set("Optimization.StartY", 1.0);
        }
        "poiseuilleIdentification" => {
            c.set("Application.Discretization.Resolution", 21);
            c.set("Application.Discretization.LatticeRelaxationTime", 0.8);
            c.set("Application.PhysParameters.CharPhysLength", 1.0);
            c.set("Application.PhysParameters.CharPhysVelocity", 1.0);
            c.set("Application.PhysParameters.ReynoldsNumber", 10.0);
            c.set("Application.PhysParameters.PhysDensity", 1.0);
            c.set("Application.PhysParameters.PhysMaxTime", 16.0);
            c.set("Application.StartUpTime", 2.0);
            c.set("Optimization.MaxIter", 50);
            c.set("Optimization.MaxStepAttempts", 20);
            c.set("Optimization.Tolerance", 1e-6);
            c.set("Optimization.ControlTolerance", 1e-8);
            c.set("Optimization.Lambda", 1.0);
            c.set("Optimization.L", 20);
            c.set("Optimization.StepCondition", "StrongWolfe");
            c.set("Optimization.StartScale", 0.5);
        }
        other => {
            return Err(Error::Validation(format!(
                "unknown case `{other}`; known cases: {}",
                known_cases().join(", ")
            )))
        }
    }
    Ok(c)
}

/// Runs a simulation case by name.
pub fn run_case(
    name: &str,
    config_path: Option<&Path>,
    output_override: Option<PathBuf>,
) -> Result<CaseReport, Error> {
    let mut ctx = CaseContext::new(name, config_path, output_override)?;
    match name {
        "poiseuille2d" => run_poiseuille_2d(&mut ctx, None),
        "advectionDiffusion1d" => run_advection_diffusion_1d(&mut ctx, None),
        "advectionDiffusion2d" => run_advection_diffusion_2d(&mut ctx, None),
        "porousPlate2d" => run_porous_plate_2d(&mut ctx),
        "cavity2d" => run_cavity_2d(&mut ctx),
        "rosenbrock" => run_rosenbrock(&mut ctx),
        "poiseuilleIdentification" => run_poiseuille_identification(&mut ctx),
        other => Err(Error::Validation(format!(
            "unknown case `{other}`; known cases: {}",
            known_cases().join(", ")
        ))),
    }
}

/// Runs the mesh-refinement study of a case over explicit resolutions.
pub fn run_eoc(
    name: &str,
    resolutions: &[usize],
    config_path: Option<&Path>,
    output_override: Option<PathBuf>,
) -> Result<CaseReport, Error> {
    if resolutions.len() < 2 {
        return Err(Error::Validation(
            "a refinement study needs at least two resolutions".into(),
        ));
    }
    if resolutions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation(
            "resolutions must be strictly increasing".into(),
        ));
    }
    let mut ctx = CaseContext::new(name, config_path, output_override)?;
    match name {
        "poiseuille2d" => run_poiseuille_2d(&mut ctx, Some(resolutions)),
        "advectionDiffusion1d" => run_advection_diffusion_1d(&mut ctx, Some(resolutions)),
        "advectionDiffusion2d" => run_advection_diffusion_2d(&mut ctx, Some(resolutions)),
        other => Err(Error::Validation(format!(
            "case `{other}` has no refinement study; use poiseuille2d or advectionDiffusion1d/2d"
        ))),
    }
}

/// Runs an optimization case by name.
pub fn run_optimization(
    name: &str,
    config_path: Option<&Path>,
    output_override: Option<PathBuf>,
) -> Result<CaseReport, Error> {
    let mut ctx = CaseContext::new(name, config_path, output_override)?;
    match name {
        "rosenbrock" => run_rosenbrock(&mut ctx),
        "poiseuilleIdentification" => run_poiseuille_identification(&mut ctx),
        other => Err(Error::Validation(format!(
            "case `{other}` is not an optimization case; use rosenbrock or poiseuilleIdentification"
        ))),
    }
}

/// Process exit code for an error: 1 validation, 2 numerical blow-up,
/// 3 optimizer failure.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Blowup { .. } => 2,
        Error::StepFailure { .. } | Error::MaxIterations { .. } => 3,
        _ => 1,
    }
}

/// Tags lattice cells from the material grid.
pub(crate) fn tag_material(
    lattice: &mut BlockLattice,
    geometry: &Geometry,
    material: u8,
    dynamics: Dynamics,
) {
    for iy in 0..geometry.ny {
        for ix in 0..geometry.nx {
            if geometry.material(ix, iy) == material {
                lattice.set_dynamics(ix, iy, dynamics);
            }
        }
    }
}

/// Step-stamped output file name, `name_iT<8 digits>.<ext>`.
pub(crate) fn stamped(name: &str, step: u64, ext: &str) -> String {
    format!("{name}_iT{step:08}.{ext}")
}

pub(crate) fn parse_resolution_list(raw: &str) -> Result<Vec<usize>, Error> {
    let list: Result<Vec<usize>, _> = raw
        .split(',')
        .map(|token| token.trim().parse::<usize>())
        .collect();
    list.map_err(|_| Error::Validation(format!("cannot parse resolution list `{raw}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_case_is_rejected_with_the_case_list() {
        let err = run_case("nozzle3d", None, None).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("poiseuille2d"));
        assert_eq!(exit_code(&err), 1);
    }

    #[test]
    fn exit_codes_by_error_family() {
        assert_eq!(exit_code(&Error::Validation("x".into())), 1);
        assert_eq!(
            exit_code(&Error::Blowup {
                step: 3,
                what: "x".into()
            }),
            2
        );
        assert_eq!(
            exit_code(&Error::MaxIterations {
                iterations: 5,
                value: 1.0,
                gradient_norm: 1.0
            }),
            3
        );
    }

    #[test]
    fn resolution_lists_parse() {
        assert_eq!(parse_resolution_list("21, 31,41").unwrap(), vec![21, 31, 41]);
        assert!(parse_resolution_list("a,b").is_err());
    }
}
