//! Optimization showcases: the analytic banana-valley function and the
//! mass-flow parameter identification on the channel benchmark.

use std::time::Instant;

use super::poiseuille::{ChannelParams, ChannelRun};
use super::{log, CaseContext, CaseReport};
use crate::analysis::line_flux;
use crate::io::write_csv;
use crate::optimize::{
    optimize, rosenbrock, rosenbrock_gradient, GradientMode, Method, OptimizationProblem,
    OptimizeOutcome, OptimizerParams, StepCondition,
};
use crate::Error;

fn optimizer_params_from_config(ctx: &mut CaseContext, method: Method) -> OptimizerParams {
    let cfg = &mut ctx.config;
    let mut params = OptimizerParams::for_method(method);
    params.max_iterations = cfg.read_or_warn("Optimization.MaxIter", 100usize);
    params.max_step_attempts = cfg.read_or_warn("Optimization.MaxStepAttempts", 20usize);
    params.tolerance = cfg.read_or_warn("Optimization.Tolerance", 1e-10);
    params.control_tolerance = cfg.read_or_warn("Optimization.ControlTolerance", 0.0);
    params.lambda = cfg.read_or_warn("Optimization.Lambda", 1.0);
    params.memory = cfg.read_or_warn("Optimization.L", 20usize);
    params.step_condition = match cfg
        .read_or_warn("Optimization.StepCondition", "StrongWolfe".to_string())
        .as_str()
    {
        "None" => StepCondition::None,
        "Smaller" => StepCondition::Smaller,
        "Armijo" => StepCondition::Armijo,
        "Wolfe" => StepCondition::Wolfe,
        _ => StepCondition::StrongWolfe,
    };
    params
}

fn write_trace(
    ctx: &CaseContext,
    report: &mut CaseReport,
    outcome: &OptimizeOutcome,
) -> Result<(), Error> {
    let rows: Vec<Vec<f64>> = outcome
        .trace
        .iter()
        .map(|row| {
            vec![
                row.iteration as f64,
                row.objective,
                row.gradient_norm,
                row.step,
            ]
        })
        .collect();
    let path = ctx.output_dir.join("optimizerTrace.csv");
    write_csv(&rows, &["it", "J", "gradNorm", "step"], &path, None)?;
    report.manifest.push(path);
    Ok(())
}

/// Minimizes the banana-valley function with the quasi-Newton line-search
/// stack and records the iteration trace.
pub fn run_rosenbrock(ctx: &mut CaseContext) -> Result<CaseReport, Error> {
    let tag = "rosenbrock";
    let start = Instant::now();
    let mut report = CaseReport::new(tag);

    let params = optimizer_params_from_config(ctx, Method::Lbfgs);
    let x0 = ctx.config.read_or_warn("Optimization.StartX", -1.2);
    let y0 = ctx.config.read_or_warn("Optimization.StartY", 1.0);

    let mut problem = OptimizationProblem::new(|a: &[f64]| Ok(rosenbrock(a)))
        .with_gradient_mode(GradientMode::Provided(Box::new(|a| {
            Ok(rosenbrock_gradient(a))
        })));
    let outcome = optimize(&mut problem, &params, &[x0, y0])?;
    log(
        tag,
        format!(
            "converged in {} iterations: J = {:.3e} at ({:.8}, {:.8}), {} evaluations",
            outcome.iterations,
            outcome.objective,
            outcome.control[0],
            outcome.control[1],
            outcome.objective_evaluations
        ),
    );

    write_trace(ctx, &mut report, &outcome)?;
    report.values.insert("finalObjective".into(), outcome.objective);
    report
        .values
        .insert("iterations".into(), outcome.iterations as f64);
    report.values.insert("controlX".into(), outcome.control[0]);
    report.values.insert("controlY".into(), outcome.control[1]);

    report.warnings = ctx.config.warnings().to_vec();
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    log(tag, format!("finished in {:.2} s", report.wall_clock_seconds));
    Ok(report)
}

/// Mass flow of the inlet/outlet channel at the given inlet scale: a fixed
/// number of steps makes the map from control to flow smooth and
/// deterministic.
fn channel_mass_flow(p: &ChannelParams, scale: f64) -> Result<f64, Error> {
    let mut run = ChannelRun::new(p, scale)?;
    let steps = run.converter.lattice_time(p.max_time)?;
    for step in 1..=steps {
        run.step(step)?;
    }
    let velocity = run.physical_velocity();
    // Vertical line at mid-channel, x = L.
    let mid_x = p.char_length;
    let geometry = run.geometry.clone();
    let mask = move |ix: usize, iy: usize| geometry.material(ix, iy) == 1;
    let (flux, _, _) = line_flux(&velocity, [mid_x, 0.5], [1, 0], mask)?;
    Ok(flux)
}

/// Parameter identification on the channel: recovers the inlet velocity
/// scale that produces a target mass flow. The target is synthesized by a
/// forward run at the true control, so the optimum is exactly known.
pub fn run_poiseuille_identification(ctx: &mut CaseContext) -> Result<CaseReport, Error> {
    let tag = "poiseuilleIdentification";
    let start = Instant::now();
    let mut report = CaseReport::new(tag);

    ctx.config.set("Application.Mode", "InletOutlet");
    let channel = ChannelParams::from_config(ctx, None)?;
    let params = optimizer_params_from_config(ctx, Method::Lbfgs);
    let start_scale = ctx.config.read_or_warn("Optimization.StartScale", 0.5);

    let true_control = 1.0;
    log(tag, "computing the target mass flow at the true control");
    let target = channel_mass_flow(&channel, true_control)?;
    log(tag, format!("target mass flow = {target:.8e}"));

    let mut problem = OptimizationProblem::new(|alpha: &[f64]| {
        let flow = channel_mass_flow(&channel, alpha[0])?;
        Ok(0.5 * (flow - target) * (flow - target))
    });
    let outcome = optimize(&mut problem, &params, &[start_scale * true_control])?;

    let recovered = outcome.control[0];
    let control_error = (recovered - true_control).abs() / true_control.abs();
    log(
        tag,
        format!(
            "recovered control {recovered:.8} (relative error {control_error:.3e}) in {} iterations, {} flow evaluations",
            outcome.iterations, outcome.objective_evaluations
        ),
    );

    write_trace(ctx, &mut report, &outcome)?;
    report.values.insert("targetMassFlow".into(), target);
    report.values.insert("recoveredControl".into(), recovered);
    report.values.insert("controlError".into(), control_error);
    report
        .values
        .insert("iterations".into(), outcome.iterations as f64);
    report.values.insert("finalObjective".into(), outcome.objective);

    report.warnings = ctx.config.warnings().to_vec();
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    log(tag, format!("finished in {:.2} s", report.wall_clock_seconds));
    Ok(report)
}
