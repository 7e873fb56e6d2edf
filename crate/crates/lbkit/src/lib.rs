//! Two-dimensional lattice Boltzmann simulation kit.
//!
//! The crate provides the numerical machinery for plane kinetic
//! simulations: exact D2Q9/D2Q5 velocity-set descriptors, physical/lattice
//! unit conversion, indicator-based geometry with material numbers,
//! structure-of-arrays population storage with BGK/TRT/forced collision and
//! periodic streaming, wet-node and link-local boundaries, one- and two-way
//! coupling to an advection-diffusion lattice, error norms and convergence
//! analysis, VTI/CSV/PPM output, and a gradient-based line-search optimizer
//! for parameter identification.
//!
//! The accompanying guide under `book/` walks through the concepts with
//! runnable snippets; the benchmark cases are exposed both as library
//! functions in [`cases`] and through the `lbkit` command line tool.

pub mod analysis;
pub mod boundary;
pub mod cases;
pub mod coupling;
pub mod descriptor;
pub mod geometry;
pub mod io;
pub mod lattice;
pub mod optimize;
pub mod units;

use thiserror::Error as ThisError;

/// Unified error type of the kit.
#[derive(Debug, ThisError)]
pub enum Error {
    /// Invalid input or configuration.
    #[error("validation: {0}")]
    Validation(String),

    /// Parameter choice outside the stable regime.
    #[error("stability: {0}")]
    Stability(String),

    /// Inconsistent or empty geometry.
    #[error("geometry: {0}")]
    Geometry(String),

    /// Numerical divergence during time stepping.
    #[error("numerical blow-up at step {step}: {what}")]
    Blowup { step: u64, what: String },

    /// Malformed configuration file.
    #[error("config line {line}: {what}")]
    Config { line: usize, what: String },

    /// Line search exhausted its step attempts.
    #[error(
        "line search failed after {attempts} attempts (best step {best_step}, objective {best_value})"
    )]
    StepFailure {
        attempts: usize,
        best_step: f64,
        best_value: f64,
    },

    /// Optimization problem failed to converge within the specified
    /// iteration limit.
    #[error(
        "optimization failed to converge within {iterations} iterations (objective {value}, gradient norm {gradient_norm})"
    )]
    MaxIterations {
        iterations: usize,
        value: f64,
        gradient_norm: f64,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(descriptors, "../../../book/src/descriptors.md");
    chapter!(units, "../../../book/src/units.md");
    chapter!(geometry, "../../../book/src/geometry.md");
    chapter!(lattice, "../../../book/src/lattice.md");
    chapter!(boundaries, "../../../book/src/boundaries.md");
    chapter!(coupling, "../../../book/src/coupling.md");
    chapter!(analysis, "../../../book/src/analysis.md");
    chapter!(io, "../../../book/src/io.md");
    chapter!(optimization, "../../../book/src/optimization.md");
    chapter!(cases, "../../../book/src/cases.md");
}
