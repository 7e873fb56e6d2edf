//! Lid-driven cavity: bounce-back walls, a ramped wet-node lid, and a
//! convergence check on the average energy. Reported are the mean density
//! drift and the convergence step.

use std::time::Instant;

use super::{log, stamped, tag_material, CaseContext, CaseReport};
use crate::analysis::{start_scale, velocity_field, StartScale, ValueTracer};
use crate::descriptor::LatticeSet;
use crate::geometry::Geometry;
use crate::io::{write_ppm_heatmap, write_vti, Colormap};
use crate::lattice::{BlockLattice, Dynamics, DynamicsParams};
use crate::units::UnitConverter;
use crate::Error;

pub(crate) struct CavityRun {
    pub lattice: BlockLattice,
    pub geometry: Geometry,
    pub converter: UnitConverter,
    pub params: DynamicsParams,
    ramp_steps: u64,
    lid_cells: Vec<usize>,
}

impl CavityRun {
    pub(crate) fn new(
        n: usize,
        tau: f64,
        length: f64,
        velocity: f64,
        viscosity: f64,
        density: f64,
        startup_time: f64,
    ) -> Result<Self, Error> {
        let converter = UnitConverter::from_resolution_and_relaxation_time(
            n, tau, length, velocity, viscosity, density,
        )?;
        let dx = converter.delta_x;
        let nx = n + 2;
        let ny = n + 2;
        // Walls half a link outside the fluid; the lid row carries the
        // moving wall, its corners stay bounce-back.
        let mut geometry = Geometry::new(nx, ny, [-0.5 * dx, -0.5 * dx], dx, 1);
        for ix in 0..nx {
            geometry.set_material(ix, 0, 2);
            geometry.set_material(ix, ny - 1, 3);
        }
        for iy in 0..ny {
            geometry.set_material(0, iy, 2);
            geometry.set_material(nx - 1, iy, 2);
        }
        geometry.set_material(0, ny - 1, 2);
        geometry.set_material(nx - 1, ny - 1, 2);

        let mut lattice = BlockLattice::new(LatticeSet::D2Q9, nx, ny);
        tag_material(&mut lattice, &geometry, 1, Dynamics::Bgk);
        tag_material(&mut lattice, &geometry, 2, Dynamics::BounceBack);
        tag_material(
            &mut lattice,
            &geometry,
            3,
            Dynamics::ZouHeVelocity {
                normal: [0, -1],
                u: [0.0, 0.0],
            },
        );
        let lid_cells = (1..nx - 1).collect();

        let ramp_steps = converter.lattice_time(startup_time)?.max(1);
        Ok(CavityRun {
            params: DynamicsParams::bgk(converter.omega),
            lattice,
            geometry,
            converter,
            ramp_steps,
            lid_cells,
        })
    }

    pub(crate) fn step(&mut self, step: u64) -> Result<(), Error> {
        if step <= self.ramp_steps {
            let frac = start_scale(step, self.ramp_steps, StartScale::Polynomial);
            let u_lid = self.converter.char_lattice_velocity * frac;
            let iy = self.lattice.ny() - 1;
            for &ix in &self.lid_cells {
                self.lattice.set_dynamics(
                    ix,
                    iy,
                    Dynamics::ZouHeVelocity {
                        normal: [0, -1],
                        u: [u_lid, 0.0],
                    },
                );
            }
        }
        self.lattice.collide_and_stream(&self.params)
    }
}

pub fn run_cavity_2d(ctx: &mut CaseContext) -> Result<CaseReport, Error> {
    let tag = "cavity2d";
    let start = Instant::now();
    let mut report = CaseReport::new(tag);
    let cfg = &mut ctx.config;

    let n = cfg.read_or_warn("Application.Discretization.Resolution", 64usize);
    let tau = cfg.read_or_warn("Application.Discretization.LatticeRelaxationTime", 0.692);
    let length = cfg.read_or_warn("Application.PhysParameters.CharPhysLength", 1.0);
    let velocity = cfg.read_or_warn("Application.PhysParameters.CharPhysVelocity", 1.0);
    let reynolds = cfg.read_or_warn("Application.PhysParameters.ReynoldsNumber", 100.0);
    let viscosity = if cfg.contains("Application.PhysParameters.PhysViscosity") {
        cfg.read_or_warn("Application.PhysParameters.PhysViscosity", 0.01)
    } else {
        velocity * length / reynolds
    };
    let density = cfg.read_or_warn("Application.PhysParameters.PhysDensity", 1.0);
    let max_time = cfg.read_or_warn("Application.PhysParameters.PhysMaxTime", 100.0);
    let startup_time = cfg.read_or_warn("Application.StartUpTime", 2.0);
    let interval = cfg.read_or_warn("Application.ConvergenceCheck.Interval", 1.0);
    let residuum = cfg.read_or_warn("Application.ConvergenceCheck.Residuum", 1e-6);
    let save_time: f64 = cfg.read_or_warn("Output.SaveTime", 20.0);

    let mut run = CavityRun::new(n, tau, length, velocity, viscosity, density, startup_time)?;
    log(
        tag,
        format!(
            "N = {n}, Re = {reynolds}: omega = {:.4}, u_L = {:.4e}",
            run.converter.omega, run.converter.char_lattice_velocity
        ),
    );

    let max_steps = run.converter.lattice_time(max_time)?;
    let window = run.converter.lattice_time(interval)?.max(2) as usize;
    let mut tracer = ValueTracer::new(window, residuum);
    let save_every = run.converter.lattice_time(save_time)?.max(1);

    let mut converged_at = max_steps;
    for step in 1..=max_steps {
        run.step(step)?;
        tracer.take_value(run.lattice.average_energy());
        if step % 64 == 0 && step > run.ramp_steps && tracer.has_converged() {
            converged_at = step;
            break;
        }
        if step % save_every == 0 {
            let velocity_out = velocity_field(&run.lattice, run.geometry.origin, run.geometry.delta_x);
            let path = ctx.output_dir.join(stamped("velocity", step, "vti"));
            write_vti(&[("velocity", &velocity_out)], &path)?;
            report.manifest.push(path);
        }
    }
    log(
        tag,
        format!(
            "converged after {converged_at} steps (t = {:.2} s)",
            run.converter.phys_time(converged_at)
        ),
    );
    report.convergence_steps.push((n, converged_at));

    let mean_density = run.lattice.average_density();
    let drift = (mean_density - 1.0).abs();
    log(tag, format!("mean density drift |rho - 1| = {drift:.4e}"));
    report.values.insert("meanDensityDrift".into(), drift);
    report
        .values
        .insert("averageEnergy".into(), run.lattice.average_energy());

    let velocity_out = velocity_field(&run.lattice, run.geometry.origin, run.geometry.delta_x);
    let vti_path = ctx.output_dir.join(stamped("velocity", converged_at, "vti"));
    write_vti(&[("velocity", &velocity_out)], &vti_path)?;
    report.manifest.push(vti_path);
    let ppm_path = ctx
        .output_dir
        .join(stamped("velocityNorm", converged_at, "ppm"));
    write_ppm_heatmap(&velocity_out.magnitude(), &ppm_path, Colormap::Rainbow, None)?;
    report.manifest.push(ppm_path);

    report.warnings = ctx.config.warnings().to_vec();
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    log(tag, format!("finished in {:.2} s", report.wall_clock_seconds));
    Ok(report)
}
