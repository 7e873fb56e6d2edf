//! Injected channel flow with a moving heated plate: a flow lattice and a
//! transport lattice advance together with one-way velocity coupling, and
//! the steady profiles are validated against their closed forms.
//!
//! The cold plate at `y = 0` injects fluid upward at the injection
//! velocity; the hot plate at `y = L` moves horizontally and withdraws
//! fluid at the same rate. Both walls are wet nodes sitting exactly on the
//! plate planes.

use std::time::Instant;

use super::{log, stamped, CaseContext, CaseReport, ErrorRow};
use crate::analysis::{
    density_field, error_norm, porous_plate_analytic, velocity_field, Field, Norm, ValueTracer,
};
use crate::coupling::couple_velocity;
use crate::descriptor::LatticeSet;
use crate::io::{write_csv, write_ppm_heatmap, write_vti, Colormap};
use crate::lattice::{BlockLattice, Dynamics, DynamicsParams};
use crate::units::{AdeUnitConverter, UnitConverter};
use crate::Error;

pub fn run_porous_plate_2d(ctx: &mut CaseContext) -> Result<CaseReport, Error> {
    let tag = "porousPlate2d";
    let start = Instant::now();
    let mut report = CaseReport::new(tag);
    let cfg = &mut ctx.config;

    let n = cfg.read_or_warn("Application.Discretization.Resolution", 64usize);
    let tau = cfg.read_or_warn("Application.Discretization.LatticeRelaxationTime", 0.8);
    let length = cfg.read_or_warn("Application.PhysParameters.CharPhysLength", 1.0);
    let u0 = cfg.read_or_warn("Application.PhysParameters.CharPhysVelocity", 0.1);
    let viscosity = cfg.read_or_warn("Application.PhysParameters.PhysViscosity", 0.05);
    let density = cfg.read_or_warn("Application.PhysParameters.PhysDensity", 1.0);
    let reynolds = cfg.read_or_warn("Application.PhysParameters.ReynoldsNumber", 2.0);
    let prandtl = cfg.read_or_warn("Application.PhysParameters.PrandtlNumber", 1.0);
    let t_cold = cfg.read_or_warn("Application.PhysParameters.ColdTemperature", 0.0);
    let t_hot = cfg.read_or_warn("Application.PhysParameters.HotTemperature", 1.0);
    let max_time = cfg.read_or_warn("Application.PhysParameters.PhysMaxTime", 400.0);
    let interval = cfg.read_or_warn("Application.ConvergenceCheck.Interval", 2.0);
    let residuum = cfg.read_or_warn("Application.ConvergenceCheck.Residuum", 1e-9);
    let save_time: f64 = cfg.read_or_warn("Output.SaveTime", 100.0);

    let converter = UnitConverter::from_resolution_and_relaxation_time(
        n, tau, length, u0, viscosity, density,
    )?;
    let diffusivity = viscosity / prandtl;
    let ade_converter = AdeUnitConverter::new(converter.clone(), diffusivity, 1.0 / 3.0)?;
    let delta_t_temp = t_hot - t_cold;

    // Injection velocity from the Reynolds number, Re = v0 L / nu.
    let v0 = reynolds * viscosity / length;
    let u0_l = converter.lattice_velocity(u0);
    let v0_l = converter.lattice_velocity(v0);
    log(
        tag,
        format!(
            "N = {n}, Re = {reynolds}, Pr = {prandtl}: u0_L = {u0_l:.4e}, v0_L = {v0_l:.4e}, omega = {:.4}, omega_AD = {:.4}",
            converter.omega, ade_converter.omega_ad
        ),
    );

    // Wet-node rows at y = 0 and y = L; any periodic width works since the
    // solution is x-invariant.
    let nx = 8;
    let ny = n + 1;
    let dx = converter.delta_x;
    let origin = [0.0, 0.0];

    let mut nse = BlockLattice::new(LatticeSet::D2Q9, nx, ny);
    nse.set_dynamics_where(|_, iy| iy > 0 && iy < ny - 1, Dynamics::Bgk);
    nse.set_dynamics_where(
        |_, iy| iy == 0,
        Dynamics::ZouHeVelocity {
            normal: [0, 1],
            u: [0.0, v0_l],
        },
    );
    nse.set_dynamics_where(
        |_, iy| iy == ny - 1,
        Dynamics::ZouHeVelocity {
            normal: [0, -1],
            u: [u0_l, v0_l],
        },
    );

    let mut ade = BlockLattice::new(LatticeSet::D2Q5, nx, ny);
    ade.set_dynamics_where(|_, iy| iy > 0 && iy < ny - 1, Dynamics::AdeBgk);
    ade.set_dynamics_where(
        |_, iy| iy == 0,
        Dynamics::AdeDirichlet {
            normal: [0, 1],
            value: t_cold,
        },
    );
    ade.set_dynamics_where(
        |_, iy| iy == ny - 1,
        Dynamics::AdeDirichlet {
            normal: [0, -1],
            value: t_hot,
        },
    );

    // Start from the conduction profile and uniform injection.
    for iy in 0..ny {
        let y = iy as f64 * dx;
        let t_init = t_cold + delta_t_temp * y / length;
        let u_init = [0.0, v0_l];
        for ix in 0..nx {
            nse.init_equilibrium(ix, iy, 1.0, u_init);
            ade.set_velocity_field(ix, iy, u_init);
            ade.init_ade_equilibrium(ix, iy, t_init, u_init);
        }
    }
    // Boundary rows keep their wall velocities in the transport lattice.
    for ix in 0..nx {
        ade.set_velocity_field(ix, 0, [0.0, v0_l]);
        ade.set_velocity_field(ix, ny - 1, [u0_l, v0_l]);
    }

    let nse_params = DynamicsParams::bgk(converter.omega);
    let ade_params = DynamicsParams::bgk(ade_converter.omega_ad);

    let max_steps = converter.lattice_time(max_time)?;
    let window = converter.lattice_time(interval)?.max(2) as usize;
    let mut flow_tracer = ValueTracer::new(window, residuum);
    let mut heat_tracer = ValueTracer::new(window, residuum);
    let save_every = converter.lattice_time(save_time)?.max(1);

    let temperature_monitor = |ade: &BlockLattice| -> f64 {
        let mut sum = 0.0;
        for iy in 0..ade.ny() {
            for ix in 0..ade.nx() {
                let t = ade.zeroth_moment(ix, iy);
                sum += t * t;
            }
        }
        sum / (ade.nx() * ade.ny()) as f64
    };

    let mut converged_at = max_steps;
    for step in 1..=max_steps {
        nse.collide_and_stream(&nse_params)?;
        couple_velocity(&nse, &mut ade)?;
        ade.collide_and_stream(&ade_params)?;

        flow_tracer.take_value(nse.average_energy());
        heat_tracer.take_value(temperature_monitor(&ade));
        if step % 64 == 0 && flow_tracer.has_converged() && heat_tracer.has_converged() {
            converged_at = step;
            break;
        }
        if step % save_every == 0 {
            let t_field = density_field(&ade, origin, dx);
            let path = ctx.output_dir.join(stamped("temperature", step, "vti"));
            write_vti(&[("temperature", &t_field)], &path)?;
            report.manifest.push(path);
        }
    }
    log(
        tag,
        format!(
            "converged after {converged_at} steps (t = {:.2} s)",
            converter.phys_time(converged_at)
        ),
    );
    report.convergence_steps.push((n, converged_at));

    // Relative global errors against the closed-form profiles,
    // E = sqrt(sum |phi - phi_a|^2) / sqrt(sum |phi_a|^2).
    let u_field = velocity_field(&nse, origin, dx);
    let t_field = density_field(&ade, origin, dx);
    let mut num_u = 0.0;
    let mut den_u = 0.0;
    let mut num_t = 0.0;
    let mut den_t = 0.0;
    for iy in 0..ny {
        let y = iy as f64 * dx;
        let (u_ref_phys, t_ref) =
            porous_plate_analytic(y, length, reynolds, prandtl, u0, t_cold, delta_t_temp);
        let u_ref = converter.lattice_velocity(u_ref_phys);
        for ix in 0..nx {
            let du = u_field.get(ix, iy, 0) - u_ref;
            num_u += du * du;
            den_u += u_ref * u_ref;
            let dt = t_field.get(ix, iy, 0) - t_ref;
            num_t += dt * dt;
            den_t += t_ref * t_ref;
        }
    }
    let e_u = (num_u / den_u).sqrt();
    let e_t = (num_t / den_t).sqrt();
    log(tag, format!("relative global errors: E_u = {e_u:.4e}, E_T = {e_t:.4e}"));
    report.values.insert("E_u".into(), e_u);
    report.values.insert("E_T".into(), e_t);

    // Full norms of the temperature field for the error table.
    let t_reference = Field::from_fn(nx, ny, 1, origin, dx, |_, y| {
        vec![porous_plate_analytic(y, length, reynolds, prandtl, u0, t_cold, delta_t_temp).1]
    });
    let all = |_: usize, _: usize| true;
    let mut abs = [0.0; 3];
    let mut rel = [0.0; 3];
    for (slot, norm) in [Norm::L1, Norm::L2, Norm::LInf].iter().enumerate() {
        abs[slot] = error_norm(&t_field, &t_reference, all, *norm, false)?;
        rel[slot] = error_norm(&t_field, &t_reference, all, *norm, true)?;
    }
    report.error_table.push(ErrorRow {
        resolution: n,
        spacing: dx,
        abs,
        rel,
    });

    // Profile table along one column plus outputs.
    let profile_rows: Vec<Vec<f64>> = (0..ny)
        .map(|iy| {
            let y = iy as f64 * dx;
            let (u_ref_phys, t_ref) =
                porous_plate_analytic(y, length, reynolds, prandtl, u0, t_cold, delta_t_temp);
            vec![
                y,
                converter.phys_velocity(u_field.get(0, iy, 0)),
                u_ref_phys,
                t_field.get(0, iy, 0),
                t_ref,
            ]
        })
        .collect();
    let profile_path = ctx.output_dir.join("profiles.csv");
    write_csv(
        &profile_rows,
        &["y", "ux", "uxAnalytic", "T", "TAnalytic"],
        &profile_path,
        None,
    )?;
    report.manifest.push(profile_path);

    let vti_path = ctx.output_dir.join(stamped("fields", converged_at, "vti"));
    write_vti(&[("velocity", &u_field), ("temperature", &t_field)], &vti_path)?;
    report.manifest.push(vti_path);
    let ppm_path = ctx
        .output_dir
        .join(stamped("temperature", converged_at, "ppm"));
    write_ppm_heatmap(&t_field, &ppm_path, Colormap::Rainbow, None)?;
    report.manifest.push(ppm_path);

    report.warnings = ctx.config.warnings().to_vec();
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    log(tag, format!("finished in {:.2} s", report.wall_clock_seconds));
    Ok(report)
}
