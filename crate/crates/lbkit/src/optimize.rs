//! Gradient-based minimization of black-box objectives.
//!
//! The driver iterates `alpha <- clamp(alpha + s d)` where the direction
//! `d` comes from steepest descent, a Barzilai-Borwein scaled gradient or
//! the LBFGS two-loop recursion, and the step `s` from a line search
//! enforcing the Armijo or (strong) Wolfe-Powell conditions. Gradients are
//! forward or central difference quotients of the objective, or supplied
//! analytically.

use std::collections::VecDeque;

use crate::Error;

/// Objective callback; failures propagate out of the optimizer.
pub type Objective<'a> = dyn FnMut(&[f64]) -> Result<f64, Error> + 'a;
/// Analytic gradient callback.
pub type Gradient<'a> = dyn FnMut(&[f64]) -> Result<Vec<f64>, Error> + 'a;

/// How the functional gradient is obtained.
pub enum GradientMode<'a> {
    /// Forward difference quotient of the objective.
    Fdq,
    /// Central difference quotient of the objective.
    Cdq,
    /// Caller-supplied gradient (e.g. worked out analytically).
    Provided(Box<Gradient<'a>>),
}

/// Minimization problem: objective, gradient backend, optional
/// component-wise bounds and the relative difference-quotient step.
pub struct OptimizationProblem<'a> {
    objective: Box<Objective<'a>>,
    gradient_mode: GradientMode<'a>,
    bounds: Option<(Vec<f64>, Vec<f64>)>,
    fd_step: f64,
    evaluations: usize,
}

impl<'a> OptimizationProblem<'a> {
    pub fn new<F: FnMut(&[f64]) -> Result<f64, Error> + 'a>(objective: F) -> Self {
        OptimizationProblem {
            objective: Box::new(objective),
            gradient_mode: GradientMode::Cdq,
            bounds: None,
            fd_step: 1e-6,
            evaluations: 0,
        }
    }

    pub fn with_gradient_mode(mut self, mode: GradientMode<'a>) -> Self {
        self.gradient_mode = mode;
        self
    }

    /// Component-wise bounds; iterates are projected after every step.
    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        assert!(
            lower.iter().zip(&upper).all(|(l, u)| l <= u),
            "lower bounds must not exceed upper bounds"
        );
        self.bounds = Some((lower, upper));
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        assert!(h > 0.0, "difference-quotient step must be positive");
        self.fd_step = h;
        self
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn evaluate(&mut self, alpha: &[f64]) -> Result<f64, Error> {
        self.evaluations += 1;
        (self.objective)(alpha)
    }

    fn clamp(&self, alpha: &mut [f64]) {
        if let Some((lower, upper)) = &self.bounds {
            for ((a, l), u) in alpha.iter_mut().zip(lower).zip(upper) {
                *a = a.clamp(*l, *u);
            }
        }
    }

    /// Gradient at `alpha`; `value` is the already known objective there
    /// (saves one evaluation for the forward quotient).
    fn gradient(&mut self, alpha: &[f64], value: Option<f64>) -> Result<Vec<f64>, Error> {
        match &mut self.gradient_mode {
            GradientMode::Provided(g) => g(alpha),
            GradientMode::Fdq => {
                let h = self.fd_step;
                let j0 = match value {
                    Some(v) => v,
                    None => self.evaluate(alpha)?,
                };
                let mut grad = vec![0.0; alpha.len()];
                let mut probe = alpha.to_vec();
                for k in 0..alpha.len() {
                    let hk = h * alpha[k].abs().max(1.0);
                    probe[k] = alpha[k] + hk;
                    let jp = self.evaluate(&probe)?;
                    probe[k] = alpha[k];
                    grad[k] = (jp - j0) / hk;
                }
                Ok(grad)
            }
            GradientMode::Cdq => {
                let h = self.fd_step;
                let mut grad = vec![0.0; alpha.len()];
                let mut probe = alpha.to_vec();
                for k in 0..alpha.len() {
                    let hk = h * alpha[k].abs().max(1.0);
                    probe[k] = alpha[k] + hk;
                    let jp = self.evaluate(&probe)?;
                    probe[k] = alpha[k] - hk;
                    let jm = self.evaluate(&probe)?;
                    probe[k] = alpha[k];
                    grad[k] = (jp - jm) / (2.0 * hk);
                }
                Ok(grad)
            }
        }
    }
}

/// Forward difference quotient `(J(a + h_k e_k) - J(a)) / h_k` with the
/// per-component step `h_k = max(1, |a_k|) h`.
pub fn gradient_fdq<F: FnMut(&[f64]) -> Result<f64, Error>>(
    mut objective: F,
    alpha: &[f64],
    h: f64,
) -> Result<Vec<f64>, Error> {
    assert!(h > 0.0);
    let j0 = objective(alpha)?;
    let mut grad = vec![0.0; alpha.len()];
    let mut probe = alpha.to_vec();
    for k in 0..alpha.len() {
        let hk = h * alpha[k].abs().max(1.0);
        probe[k] = alpha[k] + hk;
        grad[k] = (objective(&probe)? - j0) / hk;
        probe[k] = alpha[k];
    }
    Ok(grad)
}

/// Central difference quotient `(J(a + h_k e_k) - J(a - h_k e_k)) / 2 h_k`.
pub fn gradient_cdq<F: FnMut(&[f64]) -> Result<f64, Error>>(
    mut objective: F,
    alpha: &[f64],
    h: f64,
) -> Result<Vec<f64>, Error> {
    assert!(h > 0.0);
    let mut grad = vec![0.0; alpha.len()];
    let mut probe = alpha.to_vec();
    for k in 0..alpha.len() {
        let hk = h * alpha[k].abs().max(1.0);
        probe[k] = alpha[k] + hk;
        let jp = objective(&probe)?;
        probe[k] = alpha[k] - hk;
        let jm = objective(&probe)?;
        probe[k] = alpha[k];
        grad[k] = (jp - jm) / (2.0 * hk);
    }
    Ok(grad)
}

/// Descent direction family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    SteepestDescent,
    Lbfgs,
    BarzilaiBorwein,
}

/// Step acceptance rule of the line search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepCondition {
    /// Accept the initial step unchanged.
    None,
    /// Require plain descent `J(a + s d) < J(a)`.
    Smaller,
    /// Sufficient decrease `J(a + s d) <= J(a) + rho s grad.d`.
    Armijo,
    /// Armijo plus the curvature bound `grad(a + s d).d >= delta grad.d`.
    Wolfe,
    /// Armijo plus `|grad(a + s d).d| <= -delta grad.d`.
    StrongWolfe,
}

/// Optimizer parameters with the conventional defaults
/// (100 iterations, 20 step attempts, tolerance 1e-10, unit initial step,
/// 20 stored pairs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerParams {
    pub method: Method,
    pub max_iterations: usize,
    pub max_step_attempts: usize,
    /// Stop once the gradient norm falls below this.
    pub tolerance: f64,
    /// Stop once the control change falls below this (0 disables).
    pub control_tolerance: f64,
    /// Initial step length of every line search.
    pub lambda: f64,
    /// Number of stored iteration pairs for LBFGS.
    pub memory: usize,
    pub step_condition: StepCondition,
    pub armijo_rho: f64,
    pub wolfe_delta: f64,
    /// Fail with an error when the iteration limit is hit.
    pub fail_on_max_iterations: bool,
}

impl OptimizerParams {
    /// Defaults for a method, including its customary step condition:
    /// Armijo for steepest descent, strong Wolfe for LBFGS, none for
    /// Barzilai-Borwein.
    pub fn for_method(method: Method) -> Self {
        let step_condition = match method {
            Method::SteepestDescent => StepCondition::Armijo,
            Method::Lbfgs => StepCondition::StrongWolfe,
            Method::BarzilaiBorwein => StepCondition::None,
        };
        OptimizerParams {
            method,
            max_iterations: 100,
            max_step_attempts: 20,
            tolerance: 1e-10,
            control_tolerance: 0.0,
            lambda: 1.0,
            memory: 20,
            step_condition,
            armijo_rho: 1e-4,
            wolfe_delta: 0.9,
            fail_on_max_iterations: true,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if !(self.armijo_rho > 0.0 && self.armijo_rho < 1.0) {
            return Err(Error::Validation(format!(
                "armijo rho {} must lie in (0, 1)",
                self.armijo_rho
            )));
        }
        if matches!(
            self.step_condition,
            StepCondition::Wolfe | StepCondition::StrongWolfe
        ) && !(self.wolfe_delta > self.armijo_rho && self.wolfe_delta < 1.0)
        {
            return Err(Error::Validation(format!(
                "wolfe delta {} must lie in (rho, 1)",
                self.wolfe_delta
            )));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::Validation("initial step must be positive".into()));
        }
        Ok(())
    }
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    ControlTolerance,
    MaxIterations,
}

/// One per-iteration record of the optimization history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub objective: f64,
    pub gradient_norm: f64,
    pub step: f64,
}

/// Final state and history of one optimization run.
#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub control: Vec<f64>,
    pub objective: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub termination: Termination,
    pub trace: Vec<TraceRow>,
    pub objective_evaluations: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// LBFGS search direction by the two-loop recursion over the stored
/// `(s, y)` pairs (oldest first). Pairs with `s.y <= 1e-14 |s||y|` are
/// skipped; with no usable pair the direction is the negative gradient.
/// The initial Hessian scaling is `gamma = s.y / y.y` of the newest pair.
pub fn lbfgs_direction(memory: &[(Vec<f64>, Vec<f64>)], gradient: &[f64]) -> Vec<f64> {
    let usable: Vec<&(Vec<f64>, Vec<f64>)> = memory
        .iter()
        .filter(|(s, y)| dot(s, y) > 1e-14 * norm(s) * norm(y))
        .collect();
    if usable.is_empty() {
        return gradient.iter().map(|g| -g).collect();
    }

    let mut q = gradient.to_vec();
    let mut alphas = Vec::with_capacity(usable.len());
    for (s, y) in usable.iter().rev() {
        let rho = 1.0 / dot(s, y);
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push((a, rho));
    }

    let (s_new, y_new) = usable[usable.len() - 1];
    let gamma = dot(s_new, y_new) / dot(y_new, y_new);
    let mut r: Vec<f64> = q.iter().map(|v| gamma * v).collect();

    for ((s, y), (a, rho)) in usable.iter().zip(alphas.iter().rev()) {
        let beta = rho * dot(y, &r);
        for (ri, si) in r.iter_mut().zip(s.iter()) {
            *ri += (a - beta) * si;
        }
    }
    r.iter().map(|v| -v).collect()
}

struct StepRecord {
    step: f64,
    objective: f64,
    /// Directional derivative at the accepted point when the condition
    /// required it.
    slope: Option<f64>,
}

/// Verifies the accepted step against its declared condition.
fn condition_holds(
    condition: StepCondition,
    params: &OptimizerParams,
    j0: f64,
    g0d: f64,
    record: &StepRecord,
) -> bool {
    let armijo =
        record.objective <= j0 + params.armijo_rho * record.step * g0d + 1e-15 * j0.abs().max(1.0);
    match condition {
        StepCondition::None => true,
        StepCondition::Smaller => record.objective < j0,
        StepCondition::Armijo => armijo,
        StepCondition::Wolfe => {
            armijo && record.slope.is_some_and(|g| g >= params.wolfe_delta * g0d)
        }
        StepCondition::StrongWolfe => {
            armijo
                && record
                    .slope
                    .is_some_and(|g| g.abs() <= -params.wolfe_delta * g0d)
        }
    }
}

fn line_search(
    problem: &mut OptimizationProblem,
    alpha: &[f64],
    direction: &[f64],
    j0: f64,
    g0d: f64,
    params: &OptimizerParams,
) -> Result<StepRecord, Error> {
    let probe_point = |s: f64| -> Vec<f64> {
        alpha
            .iter()
            .zip(direction)
            .map(|(a, d)| a + s * d)
            .collect()
    };

    match params.step_condition {
        StepCondition::None => {
            let s = params.lambda;
            let objective = problem.evaluate(&probe_point(s))?;
            Ok(StepRecord {
                step: s,
                objective,
                slope: None,
            })
        }
        StepCondition::Smaller | StepCondition::Armijo => {
            let armijo = params.step_condition == StepCondition::Armijo;
            let mut s = params.lambda;
            let mut best = (s, f64::INFINITY);
            for _ in 0..params.max_step_attempts {
                let j = problem.evaluate(&probe_point(s))?;
                if j < best.1 {
                    best = (s, j);
                }
                let ok = if armijo {
                    j <= j0 + params.armijo_rho * s * g0d
                } else {
                    j < j0
                };
                if ok {
                    return Ok(StepRecord {
                        step: s,
                        objective: j,
                        slope: None,
                    });
                }
                s *= 0.5;
            }
            Err(Error::StepFailure {
                attempts: params.max_step_attempts,
                best_step: best.0,
                best_value: best.1,
            })
        }
        StepCondition::Wolfe | StepCondition::StrongWolfe => {
            wolfe_search(problem, alpha, direction, j0, g0d, params)
        }
    }
}

/// Bracketing plus bisection zoom for the Wolfe-Powell conditions.
fn wolfe_search(
    problem: &mut OptimizationProblem,
    alpha: &[f64],
    direction: &[f64],
    j0: f64,
    g0d: f64,
    params: &OptimizerParams,
) -> Result<StepRecord, Error> {
    let strong = params.step_condition == StepCondition::StrongWolfe;
    let probe_point = |s: f64| -> Vec<f64> {
        alpha
            .iter()
            .zip(direction)
            .map(|(a, d)| a + s * d)
            .collect()
    };
    let mut attempts = 0usize;
    let mut best = (params.lambda, f64::INFINITY);

    let evaluate = |problem: &mut OptimizationProblem,
                        s: f64,
                        attempts: &mut usize,
                        best: &mut (f64, f64)|
     -> Result<(f64, f64), Error> {
        *attempts += 1;
        let point = probe_point(s);
        let j = problem.evaluate(&point)?;
        if j < best.1 {
            *best = (s, j);
        }
        let grad = problem.gradient(&point, Some(j))?;
        Ok((j, dot(&grad, direction)))
    };

    let curvature_ok = |slope: f64| -> bool {
        if strong {
            slope.abs() <= -params.wolfe_delta * g0d
        } else {
            slope >= params.wolfe_delta * g0d
        }
    };

    // Bracketing phase: expand until the Armijo bound breaks or the slope
    // turns non-negative.
    let mut s_prev = 0.0;
    let mut j_prev = j0;
    let mut s = params.lambda;
    let mut bracket: Option<(f64, f64, f64)> = None; // (lo, j_lo, hi)
    let mut first = true;
    while attempts < params.max_step_attempts {
        let (j_s, slope) = evaluate(problem, s, &mut attempts, &mut best)?;
        if j_s > j0 + params.armijo_rho * s * g0d || (!first && j_s >= j_prev) {
            bracket = Some((s_prev, j_prev, s));
            break;
        }
        if curvature_ok(slope) {
            return Ok(StepRecord {
                step: s,
                objective: j_s,
                slope: Some(slope),
            });
        }
        if slope >= 0.0 {
            bracket = Some((s, j_s, s_prev));
            break;
        }
        s_prev = s;
        j_prev = j_s;
        s *= 2.0;
        first = false;
    }

    // Zoom phase: bisect the bracket.
    if let Some((mut lo, mut j_lo, mut hi)) = bracket {
        while attempts < params.max_step_attempts {
            let mid = 0.5 * (lo + hi);
            let (j_mid, slope) = evaluate(problem, mid, &mut attempts, &mut best)?;
            if j_mid > j0 + params.armijo_rho * mid * g0d || j_mid >= j_lo {
                hi = mid;
            } else {
                if curvature_ok(slope) {
                    return Ok(StepRecord {
                        step: mid,
                        objective: j_mid,
                        slope: Some(slope),
                    });
                }
                if slope * (hi - lo) >= 0.0 {
                    hi = lo;
                }
                lo = mid;
                j_lo = j_mid;
            }
        }
    }
    Err(Error::StepFailure {
        attempts,
        best_step: best.0,
        best_value: best.1,
    })
}

/// Runs the configured minimization from `alpha0`.
///
/// Stops when the gradient norm drops below `tolerance`, the control
/// change drops below `control_tolerance`, or the iteration limit is
/// reached (an error if `fail_on_max_iterations`). Every accepted step is
/// re-checked against its declared line-search condition.
pub fn optimize(
    problem: &mut OptimizationProblem,
    params: &OptimizerParams,
    alpha0: &[f64],
) -> Result<OptimizeOutcome, Error> {
    params.validate()?;
    if alpha0.is_empty() || alpha0.iter().any(|a| !a.is_finite()) {
        return Err(Error::Validation(
            "initial control must be finite and non-empty".into(),
        ));
    }

    let mut alpha = alpha0.to_vec();
    problem.clamp(&mut alpha);
    let mut objective = problem.evaluate(&alpha)?;
    let mut gradient = problem.gradient(&alpha, Some(objective))?;
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::new();
    let mut bb_scale = params.lambda;
    let mut trace = vec![TraceRow {
        iteration: 0,
        objective,
        gradient_norm: norm(&gradient),
        step: 0.0,
    }];

    let outcome = |alpha: Vec<f64>,
                   objective: f64,
                   gradient: Vec<f64>,
                   iterations: usize,
                   termination: Termination,
                   trace: Vec<TraceRow>,
                   evaluations: usize| OptimizeOutcome {
        control: alpha,
        objective,
        gradient,
        iterations,
        termination,
        trace,
        objective_evaluations: evaluations,
    };

    for iteration in 0..params.max_iterations {
        let gradient_norm = norm(&gradient);
        if gradient_norm < params.tolerance {
            return Ok(outcome(
                alpha,
                objective,
                gradient,
                iteration,
                Termination::GradientTolerance,
                trace,
                problem.evaluations(),
            ));
        }

        let mut direction = match params.method {
            Method::SteepestDescent => gradient.iter().map(|g| -g).collect::<Vec<f64>>(),
            Method::Lbfgs => {
                memory.make_contiguous();
                lbfgs_direction(memory.as_slices().0, &gradient)
            }
            Method::BarzilaiBorwein => gradient.iter().map(|g| -bb_scale * g).collect(),
        };
        let mut g0d = dot(&gradient, &direction);
        if g0d >= 0.0 {
            // Not a descent direction (stale curvature); fall back.
            direction = gradient.iter().map(|g| -g).collect();
            g0d = dot(&gradient, &direction);
        }

        let record = line_search(problem, &alpha, &direction, objective, g0d, params)?;
        if !condition_holds(params.step_condition, params, objective, g0d, &record) {
            return Err(Error::Validation(format!(
                "accepted step {} violates its line-search condition",
                record.step
            )));
        }

        let mut next: Vec<f64> = alpha
            .iter()
            .zip(&direction)
            .map(|(a, d)| a + record.step * d)
            .collect();
        let unclamped = next.clone();
        problem.clamp(&mut next);
        let next_objective = if next == unclamped {
            record.objective
        } else {
            problem.evaluate(&next)?
        };
        let next_gradient = problem.gradient(&next, Some(next_objective))?;

        let delta: Vec<f64> = next.iter().zip(&alpha).map(|(n, a)| n - a).collect();
        let y: Vec<f64> = next_gradient
            .iter()
            .zip(&gradient)
            .map(|(n, g)| n - g)
            .collect();
        if params.method == Method::Lbfgs && params.memory > 0 {
            if memory.len() == params.memory {
                memory.pop_front();
            }
            memory.push_back((delta.clone(), y.clone()));
        }
        if params.method == Method::BarzilaiBorwein {
            let sy = dot(&delta, &y);
            let yy = dot(&y, &y);
            if sy > 0.0 && yy > 0.0 {
                bb_scale = sy / yy;
            }
        }

        let control_change = norm(&delta);
        alpha = next;
        objective = next_objective;
        gradient = next_gradient;
        trace.push(TraceRow {
            iteration: iteration + 1,
            objective,
            gradient_norm: norm(&gradient),
            step: record.step,
        });

        if params.control_tolerance > 0.0 && control_change < params.control_tolerance {
            return Ok(outcome(
                alpha,
                objective,
                gradient,
                iteration + 1,
                Termination::ControlTolerance,
                trace,
                problem.evaluations(),
            ));
        }
    }

    let gradient_norm = norm(&gradient);
    if gradient_norm < params.tolerance {
        return Ok(outcome(
            alpha,
            objective,
            gradient,
            params.max_iterations,
            Termination::GradientTolerance,
            trace,
            problem.evaluations(),
        ));
    }
    if params.fail_on_max_iterations {
        Err(Error::MaxIterations {
            iterations: params.max_iterations,
            value: objective,
            gradient_norm,
        })
    } else {
        Ok(outcome(
            alpha,
            objective,
            gradient,
            params.max_iterations,
            Termination::MaxIterations,
            trace,
            problem.evaluations(),
        ))
    }
}

/// The classic banana-valley test function `(1-x)^2 + 100 (y - x^2)^2`.
pub fn rosenbrock(alpha: &[f64]) -> f64 {
    let (x, y) = (alpha[0], alpha[1]);
    (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2)
}

/// Analytic gradient of [`rosenbrock`].
pub fn rosenbrock_gradient(alpha: &[f64]) -> Vec<f64> {
    let (x, y) = (alpha[0], alpha[1]);
    vec![
        -2.0 * (1.0 - x) - 400.0 * x * (y - x * x),
        200.0 * (y - x * x),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_problem<'a>() -> OptimizationProblem<'a> {
        OptimizationProblem::new(|a: &[f64]| Ok(a.iter().map(|x| x * x).sum()))
    }

    #[test]
    fn cdq_is_exact_on_quadratics() {
        let g = gradient_cdq(
            |a| Ok(a.iter().map(|x| x * x).sum()),
            &[1.0, 2.0],
            1e-3,
        )
        .unwrap();
        assert!((g[0] - 2.0).abs() < 1e-9);
        assert!((g[1] - 4.0).abs() < 1e-9);

        let g = gradient_cdq(|_| Ok(7.0), &[0.3, -0.4, 5.0], 1e-5).unwrap();
        assert!(g.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn quotient_orders_on_a_cubic() {
        // J = a^3 at a = 1: derivative 3. FDQ error is Theta(h), CDQ error
        // Theta(h^2): halving h quarters the CDQ error.
        let cube = |a: &[f64]| Ok(a[0] * a[0] * a[0]);
        let h = 1e-3;
        let fdq_err = (gradient_fdq(cube, &[1.0], h).unwrap()[0] - 3.0).abs();
        let fdq_err_half = (gradient_fdq(cube, &[1.0], h / 2.0).unwrap()[0] - 3.0).abs();
        assert!((fdq_err / fdq_err_half - 2.0).abs() < 0.05);

        let cdq_err = (gradient_cdq(cube, &[1.0], h).unwrap()[0] - 3.0).abs();
        let cdq_err_half = (gradient_cdq(cube, &[1.0], h / 2.0).unwrap()[0] - 3.0).abs();
        assert!((cdq_err / cdq_err_half - 4.0).abs() < 0.1);
        assert!(cdq_err < fdq_err);
    }

    #[test]
    fn armijo_backtracking_on_a_parabola() {
        // J(a) = a^2 at a = 1, d = -2, lambda = 1, rho = 0.5: s = 1 gives
        // J = 1 > 1 - 2, s = 0.5 lands at the minimum and passes.
        let mut problem = OptimizationProblem::new(|a: &[f64]| Ok(a[0] * a[0]));
        let mut params = OptimizerParams::for_method(Method::SteepestDescent);
        params.armijo_rho = 0.5;
        params.lambda = 1.0;
        let record = line_search(&mut problem, &[1.0], &[-2.0], 1.0, -4.0, &params).unwrap();
        assert_eq!(record.step, 0.5);
        assert_eq!(record.objective, 0.0);
    }

    #[test]
    fn none_condition_returns_lambda() {
        let mut problem = quadratic_problem();
        let mut params = OptimizerParams::for_method(Method::BarzilaiBorwein);
        params.lambda = 0.37;
        let record = line_search(&mut problem, &[1.0], &[-1.0], 1.0, -2.0, &params).unwrap();
        assert_eq!(record.step, 0.37);
    }

    #[test]
    fn strong_wolfe_step_satisfies_both_inequalities() {
        let mut problem = quadratic_problem();
        let mut params = OptimizerParams::for_method(Method::Lbfgs);
        params.wolfe_delta = 0.9;
        let alpha = [1.0, -2.0];
        let j0 = 5.0;
        let d = [-2.0, 4.0];
        let g0d = dot(&[2.0, -4.0], &d);
        let record = line_search(&mut problem, &alpha, &d, j0, g0d, &params).unwrap();
        assert!(condition_holds(
            StepCondition::StrongWolfe,
            &params,
            j0,
            g0d,
            &record
        ));
    }

    #[test]
    fn lbfgs_direction_empty_memory_is_negative_gradient() {
        let d = lbfgs_direction(&[], &[3.0, -4.0]);
        assert_eq!(d, vec![-3.0, 4.0]);
    }

    #[test]
    fn lbfgs_direction_is_newton_on_a_1d_quadratic() {
        // J = a/2 x^2: after one step the pair (s, y = a s) makes the
        // two-loop recursion return -g/a exactly.
        let a = 4.0;
        let s = vec![0.5];
        let y = vec![a * 0.5];
        let g = vec![a * 1.7];
        let d = lbfgs_direction(&[(s, y)], &g);
        assert!((d[0] + g[0] / a).abs() < 1e-12);
    }

    #[test]
    fn lbfgs_direction_descends_and_guards_curvature() {
        let memory = vec![
            (vec![0.1, 0.2], vec![0.3, 0.1]),
            // Degenerate pair that the guard must skip.
            (vec![1.0, 0.0], vec![0.0, 1.0]),
        ];
        let g = vec![0.5, -1.0];
        let d = lbfgs_direction(&memory, &g);
        assert!(dot(&g, &d) < 0.0);
    }

    #[test]
    fn steepest_descent_solves_the_convex_quadratic() {
        let mut problem = quadratic_problem();
        let params = OptimizerParams::for_method(Method::SteepestDescent);
        let outcome = optimize(&mut problem, &params, &[3.0, -4.0]).unwrap();
        assert_eq!(outcome.termination, Termination::GradientTolerance);
        assert!(outcome.iterations <= 100);
        assert!(norm(&outcome.gradient) < 1e-10);
        assert!(outcome.control.iter().all(|c| c.abs() < 1e-9));
        // Armijo steps decrease the objective monotonically.
        for w in outcome.trace.windows(2) {
            assert!(w[1].objective < w[0].objective);
        }
    }

    #[test]
    fn stationary_start_terminates_immediately() {
        let mut problem = OptimizationProblem::new(|a: &[f64]| Ok(rosenbrock(a)))
            .with_gradient_mode(GradientMode::Provided(Box::new(|a| {
                Ok(rosenbrock_gradient(a))
            })));
        let params = OptimizerParams::for_method(Method::Lbfgs);
        let outcome = optimize(&mut problem, &params, &[1.0, 1.0]).unwrap();
        assert_eq!(outcome.iterations, 0);
        assert_eq!(outcome.termination, Termination::GradientTolerance);
    }

    #[test]
    fn lbfgs_strong_wolfe_solves_rosenbrock() {
        let mut problem = OptimizationProblem::new(|a: &[f64]| Ok(rosenbrock(a)))
            .with_gradient_mode(GradientMode::Provided(Box::new(|a| {
                Ok(rosenbrock_gradient(a))
            })));
        let params = OptimizerParams::for_method(Method::Lbfgs);
        let outcome = optimize(&mut problem, &params, &[-1.2, 1.0]).unwrap();
        assert!(outcome.objective < 1e-10, "J = {}", outcome.objective);
        assert!(outcome.iterations <= 100);
        assert!((outcome.control[0] - 1.0).abs() < 1e-5);
        assert!((outcome.control[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn lbfgs_without_memory_matches_steepest_descent() {
        let run = |method: Method, memory: usize| {
            let mut problem = OptimizationProblem::new(|a: &[f64]| {
                Ok((a[0] - 0.5).powi(2) + 3.0 * (a[1] + 1.0).powi(2))
            });
            let mut params = OptimizerParams::for_method(method);
            params.memory = memory;
            params.step_condition = StepCondition::Armijo;
            params.max_iterations = 40;
            params.fail_on_max_iterations = false;
            optimize(&mut problem, &params, &[2.0, 2.0]).unwrap()
        };
        let sd = run(Method::SteepestDescent, 0);
        let lbfgs0 = run(Method::Lbfgs, 0);
        assert_eq!(sd.trace.len(), lbfgs0.trace.len());
        for (a, b) in sd.trace.iter().zip(&lbfgs0.trace) {
            assert_eq!(a.objective, b.objective);
            assert_eq!(a.step, b.step);
        }
    }

    #[test]
    fn barzilai_borwein_converges_on_a_quadratic() {
        let mut problem = OptimizationProblem::new(|a: &[f64]| {
            Ok(0.5 * (a[0] * a[0] + 7.0 * a[1] * a[1]))
        });
        let mut params = OptimizerParams::for_method(Method::BarzilaiBorwein);
        params.lambda = 0.1;
        params.tolerance = 1e-8;
        params.max_iterations = 200;
        let outcome = optimize(&mut problem, &params, &[1.0, 1.0]).unwrap();
        assert_eq!(outcome.termination, Termination::GradientTolerance);
        assert!(norm(&outcome.gradient) < 1e-8);
    }

    #[test]
    fn bounds_project_every_iterate() {
        let mut problem = OptimizationProblem::new(|a: &[f64]| {
            Ok((a[0] - 5.0).powi(2) + (a[1] + 5.0).powi(2))
        })
        .with_bounds(vec![-1.0, -1.0], vec![1.0, 1.0]);
        let mut params = OptimizerParams::for_method(Method::SteepestDescent);
        params.control_tolerance = 1e-12;
        params.fail_on_max_iterations = false;
        let outcome = optimize(&mut problem, &params, &[0.0, 0.0]).unwrap();
        assert!(outcome.control.iter().all(|c| (-1.0..=1.0).contains(c)));
        assert!((outcome.control[0] - 1.0).abs() < 1e-9);
        assert!((outcome.control[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn max_iterations_failure_carries_state() {
        let mut problem = OptimizationProblem::new(|a: &[f64]| Ok(rosenbrock(a)));
        let mut params = OptimizerParams::for_method(Method::SteepestDescent);
        params.max_iterations = 3;
        let err = optimize(&mut problem, &params, &[-1.2, 1.0]).unwrap_err();
        assert!(matches!(err, Error::MaxIterations { iterations: 3, .. }));
    }

    #[test]
    fn objective_failures_propagate() {
        let mut problem = OptimizationProblem::new(|a: &[f64]| {
            if a[0] < -2.0 {
                Err(Error::Validation("domain".into()))
            } else {
                Ok(a[0] * a[0])
            }
        });
        let params = OptimizerParams::for_method(Method::SteepestDescent);
        assert!(optimize(&mut problem, &params, &[-3.0]).is_err());
    }
}
