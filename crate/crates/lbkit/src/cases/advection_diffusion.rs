//! Mesh-convergence benchmarks for the scalar transport lattice: a sine
//! pulse advected and diffused on a periodic domain, compared against the
//! closed-form solution in one and two dimensions.

use std::fs;
use std::time::Instant;

use super::{log, parse_resolution_list, stamped, CaseContext, CaseReport, ErrorRow};
use crate::analysis::{
    ade_analytic_1d, ade_analytic_2d, compute_eoc, density_field, error_norm, Field, Norm,
};
use crate::descriptor::LatticeSet;
use crate::io::{write_csv, write_ppm_heatmap, Colormap};
use crate::lattice::{BlockLattice, Dynamics, DynamicsParams};
use crate::units::{AdeUnitConverter, UnitConverter};
use crate::Error;

struct PulseParams {
    diffusivity: f64,
    peclet: f64,
    domain_length: f64,
    tau: f64,
    amplitude_fraction: f64,
    save_time: f64,
}

impl PulseParams {
    fn from_config(ctx: &mut CaseContext, default_mu: f64, default_pe: f64) -> Self {
        let cfg = &mut ctx.config;
        PulseParams {
            diffusivity: cfg.read_or_warn("Application.PhysParameters.Diffusivity", default_mu),
            peclet: cfg.read_or_warn("Application.PhysParameters.PecletNumber", default_pe),
            domain_length: cfg.read_or_warn("Application.PhysParameters.DomainLength", 2.0),
            tau: cfg.read_or_warn("Application.Discretization.LatticeRelaxationTime", 0.8),
            amplitude_fraction: cfg
                .read_or_warn("Application.PhysParameters.AmplitudeFraction", 0.1),
            save_time: cfg.read_or_warn("Output.SaveTime", 0.5),
        }
    }

    /// Advection speed per axis from the Peclet number, `u = Pe mu / L`.
    fn advection_speed(&self) -> f64 {
        self.peclet * self.diffusivity / self.domain_length
    }
}

struct PulseRun {
    lattice: BlockLattice,
    converter: AdeUnitConverter,
    params: DynamicsParams,
    origin: [f64; 2],
    u_phys: [f64; 2],
    two_dimensional: bool,
}

impl PulseRun {
    /// Periodic square grid over `[-1, 1]^2` under diffusive scaling: the
    /// characteristic velocity is chosen so that `dt = dx^2` numerically,
    /// making the lattice diffusivity resolution-independent.
    fn new(p: &PulseParams, n: usize, two_dimensional: bool) -> Result<Self, Error> {
        let u = p.advection_speed();
        let char_velocity = if u > 0.0 { u } else { 1.0 };
        // nu = cs2 (tau - 1/2) in physical units realizes dt = dx^2.
        let viscosity = (p.tau - 0.5) / 3.0;
        let base = UnitConverter::from_resolution_and_relaxation_time(
            n,
            p.tau,
            p.domain_length,
            char_velocity,
            viscosity,
            1.0,
        )?;
        let converter = AdeUnitConverter::new(base, p.diffusivity, 1.0 / 3.0)?;

        let mut lattice = BlockLattice::new(LatticeSet::D2Q5, n, n);
        lattice.set_dynamics_where(|_, _| true, Dynamics::AdeBgk);

        let dx = converter.base.delta_x;
        let origin = [
            -0.5 * p.domain_length + 0.5 * dx,
            -0.5 * p.domain_length + 0.5 * dx,
        ];
        let u_lattice = converter.base.lattice_velocity(u);
        let u_phys = if two_dimensional { [u, u] } else { [u, 0.0] };
        let u_l = if two_dimensional {
            [u_lattice, u_lattice]
        } else {
            [u_lattice, 0.0]
        };
        for iy in 0..n {
            for ix in 0..n {
                lattice.set_velocity_field(ix, iy, u_l);
            }
        }

        let mut run = PulseRun {
            params: DynamicsParams::bgk(converter.omega_ad),
            lattice,
            converter,
            origin,
            u_phys,
            two_dimensional,
        };
        run.initialize();
        Ok(run)
    }

    /// Exact initialization: first-order equilibrium of the analytic pulse.
    fn initialize(&mut self) {
        let n = self.lattice.nx();
        for iy in 0..n {
            for ix in 0..n {
                let [x, y] = self.position(ix, iy);
                let value = self.analytic(x, y, 0.0);
                let u = self.lattice.velocity_field(ix, iy);
                self.lattice.init_ade_equilibrium(ix, iy, value, u);
            }
        }
    }

    fn position(&self, ix: usize, iy: usize) -> [f64; 2] {
        let dx = self.converter.base.delta_x;
        [
            self.origin[0] + dx * ix as f64,
            self.origin[1] + dx * iy as f64,
        ]
    }

    fn analytic(&self, x: f64, y: f64, t: f64) -> f64 {
        if self.two_dimensional {
            ade_analytic_2d(x, y, t, self.u_phys, self.converter.phys_diffusivity)
        } else {
            ade_analytic_1d(x, t, self.u_phys[0], self.converter.phys_diffusivity)
        }
    }

    /// Relative L2 error at physical time `t`: over the centerline row in
    /// one dimension, over the whole domain in two.
    fn rel_l2_error(&self, t: f64) -> Result<f64, Error> {
        let n = self.lattice.nx();
        let sim = density_field(&self.lattice, self.origin, self.converter.base.delta_x);
        let reference = Field::from_fn(
            n,
            n,
            1,
            self.origin,
            self.converter.base.delta_x,
            |x, y| vec![self.analytic(x, y, t)],
        );
        let centerline = n / 2;
        let two_dimensional = self.two_dimensional;
        error_norm(
            &sim,
            &reference,
            move |_, iy| two_dimensional || iy == centerline,
            Norm::L2,
            true,
        )
    }
}

fn run_resolution(
    p: &PulseParams,
    n: usize,
    two_dimensional: bool,
    ctx: &CaseContext,
    report: &mut CaseReport,
    dump_images: bool,
) -> Result<(ErrorRow, f64), Error> {
    let tag = if two_dimensional {
        "advectionDiffusion2d"
    } else {
        "advectionDiffusion1d"
    };
    let mut run = PulseRun::new(p, n, two_dimensional)?;
    let dt = run.converter.base.delta_t;
    // Stop once the analytic envelope decays below the target fraction.
    let decay = p.diffusivity
        * std::f64::consts::PI.powi(2)
        * if two_dimensional { 2.0 } else { 1.0 };
    let t_end = (1.0 / p.amplitude_fraction).ln() / decay;
    let steps = (t_end / dt).ceil() as u64;
    log(
        tag,
        format!(
            "N = {n}: dx = {:.4e}, dt = {:.4e}, u_L = {:.4e}, omega_AD = {:.4}, {} steps",
            run.converter.base.delta_x,
            dt,
            run.converter.base.char_lattice_velocity,
            run.converter.omega_ad,
            steps
        ),
    );

    let resolution_dir = ctx.output_dir.join(format!("N{n}"));
    let image_dir = resolution_dir.join("imageData");
    if dump_images {
        fs::create_dir_all(&image_dir)?;
    }
    let save_every = (p.save_time / dt).ceil().max(1.0) as u64;

    // Exact initialization: the error vanishes at t = 0.
    let mut errors = vec![run.rel_l2_error(0.0)?];
    for step in 1..=steps {
        run.lattice.collide_and_stream(&run.params)?;
        let t = step as f64 * dt;
        errors.push(run.rel_l2_error(t)?);
        if dump_images && step % save_every == 0 {
            let field = density_field(&run.lattice, run.origin, run.converter.base.delta_x);
            let path = image_dir.join(stamped("pulse", step, "ppm"));
            write_ppm_heatmap(&field, &path, Colormap::Rainbow, Some((-1.0, 1.0)))?;
            report.manifest.push(path);
        }
    }
    let average = errors.iter().sum::<f64>() / errors.len() as f64;
    log(
        tag,
        format!("N = {n}: time-averaged rel L2 error = {average:.6e}"),
    );

    // Per-step error history, mirroring the per-resolution data files.
    fs::create_dir_all(&resolution_dir)?;
    let history: Vec<Vec<f64>> = errors
        .iter()
        .enumerate()
        .map(|(k, e)| vec![k as f64 * dt, *e])
        .collect();
    let history_path = resolution_dir.join("averageL2RelError.csv");
    write_csv(&history, &["t", "relL2"], &history_path, None)?;
    report.manifest.push(history_path);

    // Final-time norms for the error table.
    let sim = density_field(&run.lattice, run.origin, run.converter.base.delta_x);
    let t_final = steps as f64 * dt;
    let reference = Field::from_fn(n, n, 1, run.origin, run.converter.base.delta_x, |x, y| {
        vec![run.analytic(x, y, t_final)]
    });
    let centerline = n / 2;
    let mask = move |_: usize, iy: usize| two_dimensional || iy == centerline;
    let mut abs = [0.0; 3];
    let mut rel = [0.0; 3];
    for (slot, norm) in [Norm::L1, Norm::L2, Norm::LInf].iter().enumerate() {
        abs[slot] = error_norm(&sim, &reference, &mask, *norm, false)?;
        rel[slot] = error_norm(&sim, &reference, &mask, *norm, true)?;
    }

    report.values.insert(
        format!("timeAveragedRelL2.N{n}"),
        average,
    );
    Ok((
        ErrorRow {
            resolution: n,
            spacing: run.converter.base.delta_x,
            abs,
            rel,
        },
        average,
    ))
}

fn run_pulse_case(
    ctx: &mut CaseContext,
    resolutions: Option<&[usize]>,
    two_dimensional: bool,
    default_mu: f64,
    default_pe: f64,
) -> Result<CaseReport, Error> {
    let tag = if two_dimensional {
        "advectionDiffusion2d"
    } else {
        "advectionDiffusion1d"
    };
    let start = Instant::now();
    let mut report = CaseReport::new(tag);
    let p = PulseParams::from_config(ctx, default_mu, default_pe);

    let resolutions: Vec<usize> = match resolutions {
        Some(list) => list.to_vec(),
        None => {
            let raw = ctx.config.raw("Eoc.Resolutions").unwrap_or("50,100,200");
            parse_resolution_list(raw)?
        }
    };

    let mut pairs = Vec::new();
    let finest = *resolutions.iter().max().unwrap_or(&0);
    for &n in &resolutions {
        let (row, average) =
            run_resolution(&p, n, two_dimensional, ctx, &mut report, n == finest)?;
        pairs.push((row.spacing, average));
        report.error_table.push(row);
    }

    // Global error file: one row per resolution plus the fitted-order line.
    let global_path = ctx.output_dir.join("averageSimL2RelErr.csv");
    let rows: Vec<Vec<f64>> = report
        .error_table
        .iter()
        .zip(&pairs)
        .map(|(row, (h, avg))| vec![row.resolution as f64, *h, *avg])
        .collect();
    write_csv(&rows, &["N", "h", "avgRelL2"], &global_path, None)?;
    if pairs.len() >= 2 {
        let eoc = compute_eoc(&pairs)?;
        log(
            tag,
            format!(
                "fitted EOC = {:.4} (pairwise {:?})",
                eoc.slope, eoc.pairwise
            ),
        );
        let mut text = fs::read_to_string(&global_path)?;
        text.push_str(&format!("EOC,{:.12e}\n", eoc.slope));
        fs::write(&global_path, text)?;
        report.eoc_slope = Some(eoc.slope);
        report.eoc_pairwise = eoc.pairwise;
    }
    report.manifest.push(global_path);

    report.warnings = ctx.config.warnings().to_vec();
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    log(tag, format!("finished in {:.2} s", report.wall_clock_seconds));
    Ok(report)
}

/// Sine pulse on a periodic line (run on a square lattice and evaluated
/// along the centerline): second-order mesh convergence benchmark.
pub fn run_advection_diffusion_1d(
    ctx: &mut CaseContext,
    resolutions: Option<&[usize]>,
) -> Result<CaseReport, Error> {
    run_pulse_case(ctx, resolutions, false, 1.5, 40.0 / 3.0)
}

/// Product sine pulse on the periodic square: the two-dimensional
/// convergence benchmark.
pub fn run_advection_diffusion_2d(
    ctx: &mut CaseContext,
    resolutions: Option<&[usize]>,
) -> Result<CaseReport, Error> {
    run_pulse_case(ctx, resolutions, true, 0.05, 100.0)
}
