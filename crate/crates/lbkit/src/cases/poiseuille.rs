//! Plane channel flow benchmark, force-driven or with velocity inlet and
//! pressure outlet, validated against the parabolic profile.

use std::time::Instant;

use super::{log, stamped, tag_material, CaseContext, CaseReport, ErrorRow};
use crate::analysis::{
    compute_eoc, error_norm, poiseuille_profile, start_scale, velocity_field, Field, Norm,
    StartScale, ValueTracer,
};
use crate::descriptor::LatticeSet;
use crate::geometry::Geometry;
use crate::io::{write_csv, write_ppm_heatmap, write_vti, Colormap};
use crate::lattice::{BlockLattice, Dynamics, DynamicsParams};
use crate::units::UnitConverter;
use crate::Error;

/// Channel driving mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoiseuilleMode {
    /// Periodic channel with a constant body force.
    ForceDriven,
    /// Wet-node velocity inlet and pressure outlet.
    InletOutlet,
}

/// Physical and numerical parameters of one channel run.
#[derive(Debug, Clone)]
pub(crate) struct ChannelParams {
    pub resolution: usize,
    pub tau: f64,
    pub char_length: f64,
    pub char_velocity: f64,
    pub viscosity: f64,
    pub density: f64,
    pub max_time: f64,
    pub startup_time: f64,
    pub interval: f64,
    pub residuum: f64,
    pub mode: PoiseuilleMode,
}

impl ChannelParams {
    pub(crate) fn from_config(ctx: &mut CaseContext, resolution: Option<usize>) -> Result<Self, Error> {
        let cfg = &mut ctx.config;
        let n = match resolution {
            Some(n) => n,
            None => cfg.read_or_warn("Application.Discretization.Resolution", 51usize),
        };
        let tau = cfg.read_or_warn("Application.Discretization.LatticeRelaxationTime", 0.8);
        let char_length = cfg.read_or_warn("Application.PhysParameters.CharPhysLength", 1.0);
        let char_velocity = cfg.read_or_warn("Application.PhysParameters.CharPhysVelocity", 1.0);
        let reynolds = cfg.read_or_warn("Application.PhysParameters.ReynoldsNumber", 10.0);
        let viscosity = if cfg.contains("Application.PhysParameters.PhysViscosity") {
            cfg.read_or_warn("Application.PhysParameters.PhysViscosity", 0.1)
        } else {
            char_velocity * char_length / reynolds
        };
        let density = cfg.read_or_warn("Application.PhysParameters.PhysDensity", 1.0);
        let max_time = cfg.read_or_warn("Application.PhysParameters.PhysMaxTime", 60.0);
        let startup_time = cfg.read_or_warn("Application.StartUpTime", 2.0);
        let interval = cfg.read_or_warn("Application.ConvergenceCheck.Interval", 1.0);
        let residuum = cfg.read_or_warn("Application.ConvergenceCheck.Residuum", 1e-5);
        let mode = match cfg.raw("Application.Mode").unwrap_or("ForceDriven") {
            "InletOutlet" => PoiseuilleMode::InletOutlet,
            _ => PoiseuilleMode::ForceDriven,
        };
        Ok(ChannelParams {
            resolution: n,
            tau,
            char_length,
            char_velocity,
            viscosity,
            density,
            max_time,
            startup_time,
            interval,
            residuum,
            mode,
        })
    }
}

pub(crate) struct ChannelRun {
    pub lattice: BlockLattice,
    pub geometry: Geometry,
    pub converter: UnitConverter,
    pub params: DynamicsParams,
    ramp_steps: u64,
    mode: PoiseuilleMode,
    inlet_scale: f64,
}

impl ChannelRun {
    /// Builds the channel. The wall rows sit half a link outside the fluid,
    /// so the no-slip planes lie at `y = 0` and `y = L`; wet-node columns
    /// sit exactly on the inlet/outlet planes.
    pub(crate) fn new(p: &ChannelParams, inlet_scale: f64) -> Result<Self, Error> {
        let converter = UnitConverter::from_resolution_and_relaxation_time(
            p.resolution,
            p.tau,
            p.char_length,
            p.char_velocity,
            p.viscosity,
            p.density,
        )?;
        let n = p.resolution;
        let dx = converter.delta_x;
        let (nx, origin_x) = match p.mode {
            PoiseuilleMode::ForceDriven => (2 * n, 0.5 * dx),
            PoiseuilleMode::InletOutlet => (2 * n + 1, 0.0),
        };
        let ny = n + 2;
        let mut geometry = Geometry::new(nx, ny, [origin_x, -0.5 * dx], dx, 1);
        for ix in 0..nx {
            geometry.set_material(ix, 0, 2);
            geometry.set_material(ix, ny - 1, 2);
        }
        if p.mode == PoiseuilleMode::InletOutlet {
            for iy in 1..=n {
                geometry.set_material(0, iy, 3);
                geometry.set_material(nx - 1, iy, 4);
            }
        }

        let mut lattice = BlockLattice::new(LatticeSet::D2Q9, nx, ny);
        tag_material(&mut lattice, &geometry, 2, Dynamics::BounceBack);
        match p.mode {
            PoiseuilleMode::ForceDriven => {
                tag_material(&mut lattice, &geometry, 1, Dynamics::ForcedBgk);
                // F = 8 nu_L u_L / N^2 drives the parabola to u_max = u_L.
                let force = [
                    8.0 * converter.lattice_viscosity * converter.char_lattice_velocity
                        / (n as f64 * n as f64),
                    0.0,
                ];
                for iy in 0..ny {
                    for ix in 0..nx {
                        if geometry.material(ix, iy) == 1 {
                            lattice.set_force(ix, iy, force);
                        }
                    }
                }
            }
            PoiseuilleMode::InletOutlet => {
                tag_material(&mut lattice, &geometry, 1, Dynamics::Bgk);
                tag_material(
                    &mut lattice,
                    &geometry,
                    3,
                    Dynamics::ZouHeVelocity {
                        normal: [1, 0],
                        u: [0.0, 0.0],
                    },
                );
                tag_material(
                    &mut lattice,
                    &geometry,
                    4,
                    Dynamics::ZouHePressure {
                        normal: [-1, 0],
                        rho: 1.0,
                    },
                );
            }
        }

        let ramp_steps = converter.lattice_time(p.startup_time)?.max(1);
        Ok(ChannelRun {
            lattice,
            geometry,
            params: DynamicsParams::bgk(converter.omega),
            converter,
            ramp_steps,
            mode: p.mode,
            inlet_scale,
        })
    }

    /// Refreshes the ramped inlet profile, advances one step.
    pub(crate) fn step(&mut self, step: u64) -> Result<(), Error> {
        if self.mode == PoiseuilleMode::InletOutlet && step <= self.ramp_steps {
            let frac = start_scale(step, self.ramp_steps, StartScale::Polynomial);
            // Mean-to-peak factor 3/2 of the plane parabola.
            let u_peak = 1.5 * self.converter.char_lattice_velocity * frac * self.inlet_scale;
            let n = self.geometry.ny - 2;
            let height = self.converter.char_phys_length;
            for iy in 1..=n {
                let y = self.geometry.position(0, iy)[1];
                let u = poiseuille_profile(y, u_peak, height);
                self.lattice.set_dynamics(
                    0,
                    iy,
                    Dynamics::ZouHeVelocity {
                        normal: [1, 0],
                        u: [u, 0.0],
                    },
                );
            }
        }
        self.lattice.collide_and_stream(&self.params)
    }

    /// Target peak velocity of the steady profile in physical units.
    fn target_peak(&self) -> f64 {
        match self.mode {
            PoiseuilleMode::ForceDriven => self.converter.char_phys_velocity,
            PoiseuilleMode::InletOutlet => {
                1.5 * self.converter.char_phys_velocity * self.inlet_scale
            }
        }
    }

    /// Physical velocity field with the grid placement of the geometry.
    pub(crate) fn physical_velocity(&self) -> Field {
        let mut field = velocity_field(&self.lattice, self.geometry.origin, self.geometry.delta_x);
        let scale = self.converter.delta_x / self.converter.delta_t;
        for iy in 0..field.ny {
            for ix in 0..field.nx {
                for c in 0..2 {
                    let v = field.get(ix, iy, c);
                    field.set(ix, iy, c, v * scale);
                }
            }
        }
        field
    }
}

fn run_single(
    p: &ChannelParams,
    ctx: &CaseContext,
    report: &mut CaseReport,
    write_outputs: bool,
) -> Result<ErrorRow, Error> {
    let tag = "poiseuille2d";
    let mut run = ChannelRun::new(p, 1.0)?;
    log(tag, format!("resolution {}, mode {:?}", p.resolution, p.mode));
    log(
        tag,
        format!(
            "omega = {:.6}, dx = {:.6e}, dt = {:.6e}, u_L = {:.6e}",
            run.converter.omega,
            run.converter.delta_x,
            run.converter.delta_t,
            run.converter.char_lattice_velocity
        ),
    );

    let max_steps = run.converter.lattice_time(p.max_time)?;
    let window = run.converter.lattice_time(p.interval)?.max(2) as usize;
    let mut tracer = ValueTracer::new(window, p.residuum);
    let save_every = run
        .converter
        .lattice_time(ctx_save_time(ctx))?
        .max(1);

    let mut converged_at = max_steps;
    let mut speed_warned = false;
    for step in 1..=max_steps {
        run.step(step)?;
        tracer.take_value(run.lattice.average_energy());
        if step % 64 == 0 && tracer.has_converged() {
            converged_at = step;
            break;
        }
        if step % 1024 == 0 {
            let speed = run.lattice.max_speed();
            if speed > 0.4 && !speed_warned {
                log(
                    tag,
                    format!("warning: max lattice speed {speed:.3} approaches the Mach limit"),
                );
                speed_warned = true;
            }
        }
        if write_outputs && step % save_every == 0 {
            let velocity = run.physical_velocity();
            let path = ctx.output_dir.join(stamped("velocity", step, "vti"));
            write_vti(&[("velocity", &velocity)], &path)?;
            report.manifest.push(path);
        }
    }
    log(
        tag,
        format!(
            "converged after {converged_at} steps (t = {:.3} s)",
            run.converter.phys_time(converged_at)
        ),
    );
    report
        .convergence_steps
        .push((p.resolution, converged_at));

    // Velocity error against the parabolic profile on the comparison cells.
    let velocity = run.physical_velocity();
    let peak = run.target_peak();
    let height = p.char_length;
    let reference = Field::from_fn(
        velocity.nx,
        velocity.ny,
        2,
        velocity.origin,
        velocity.delta_x,
        |_, y| vec![poiseuille_profile(y, peak, height), 0.0],
    );
    let geometry = run.geometry.clone();
    let mask = move |ix: usize, iy: usize| geometry.material(ix, iy) != 2;
    let mut abs = [0.0; 3];
    let mut rel = [0.0; 3];
    for (slot, norm) in [Norm::L1, Norm::L2, Norm::LInf].iter().enumerate() {
        abs[slot] = error_norm(&velocity, &reference, &mask, *norm, false)?;
        rel[slot] = error_norm(&velocity, &reference, &mask, *norm, true)?;
    }
    log(
        tag,
        format!(
            "velocity errors: abs L1 {:.3e} L2 {:.3e} Linf {:.3e} | rel L1 {:.3e} L2 {:.3e} Linf {:.3e}",
            abs[0], abs[1], abs[2], rel[0], rel[1], rel[2]
        ),
    );

    if write_outputs {
        let vti = ctx.output_dir.join(stamped("velocity", converged_at, "vti"));
        write_vti(&[("velocity", &velocity)], &vti)?;
        report.manifest.push(vti);

        let ppm = ctx.output_dir.join(stamped("velocityNorm", converged_at, "ppm"));
        write_ppm_heatmap(&velocity.magnitude(), &ppm, Colormap::Rainbow, None)?;
        report.manifest.push(ppm);
    }

    Ok(ErrorRow {
        resolution: p.resolution,
        spacing: run.converter.delta_x,
        abs,
        rel,
    })
}

fn ctx_save_time(ctx: &CaseContext) -> f64 {
    ctx.config
        .raw("Output.SaveTime")
        .and_then(|raw| raw.parse().ok())
        .unwrap_or(10.0)
}

/// Runs the channel benchmark; with `resolutions` given, performs the
/// refinement study and fits the order of convergence of the relative L2
/// velocity error.
pub fn run_poiseuille_2d(
    ctx: &mut CaseContext,
    resolutions: Option<&[usize]>,
) -> Result<CaseReport, Error> {
    let tag = "poiseuille2d";
    let start = Instant::now();
    let mut report = CaseReport::new(tag);

    let resolutions: Vec<usize> = match resolutions {
        Some(list) => list.to_vec(),
        None => vec![ChannelParams::from_config(ctx, None)?.resolution],
    };
    let single = resolutions.len() == 1;

    for &n in &resolutions {
        let p = ChannelParams::from_config(ctx, Some(n))?;
        let row = run_single(&p, ctx, &mut report, single || n == *resolutions.last().unwrap())?;
        report.error_table.push(row);
    }

    if report.error_table.len() >= 2 {
        let pairs: Vec<(f64, f64)> = report
            .error_table
            .iter()
            .map(|row| (row.spacing, row.rel[1]))
            .collect();
        let eoc = compute_eoc(&pairs)?;
        log(
            tag,
            format!("fitted velocity EOC = {:.3} ({:?})", eoc.slope, eoc.pairwise),
        );
        report.eoc_slope = Some(eoc.slope);
        report.eoc_pairwise = eoc.pairwise;
    }

    let table_path = ctx.output_dir.join("velocityErrors.csv");
    write_error_table(&report, &table_path)?;
    report.manifest.push(table_path);

    report.warnings = ctx.config.warnings().to_vec();
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    log(
        tag,
        format!("finished in {:.2} s", report.wall_clock_seconds),
    );
    Ok(report)
}

pub(crate) fn write_error_table(report: &CaseReport, path: &std::path::Path) -> Result<(), Error> {
    let rows: Vec<Vec<f64>> = report
        .error_table
        .iter()
        .map(|row| {
            vec![
                row.resolution as f64,
                row.spacing,
                row.abs[0],
                row.abs[1],
                row.abs[2],
                row.rel[0],
                row.rel[1],
                row.rel[2],
            ]
        })
        .collect();
    write_csv(
        &rows,
        &["N", "h", "absL1", "absL2", "absLinf", "relL1", "relL2", "relLinf"],
        path,
        None,
    )?;
    if let Some(slope) = report.eoc_slope {
        let mut text = std::fs::read_to_string(path)?;
        text.push_str(&format!("EOC,{slope:.12e}\n"));
        std::fs::write(path, text)?;
    }
    Ok(())
}
