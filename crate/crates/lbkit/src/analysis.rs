//! Observables and verification math: analytic reference profiles, error
//! norms, mesh-convergence regression, the windowed convergence tracer,
//! line flux integrals and smooth start-up scales.

use std::collections::VecDeque;

use crate::lattice::BlockLattice;
use crate::Error;

/// Sampled field on a regular grid with one or two components per cell.
/// Component planes are stored back to back, row-major with x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub nx: usize,
    pub ny: usize,
    pub components: usize,
    pub origin: [f64; 2],
    pub delta_x: f64,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(nx: usize, ny: usize, components: usize, origin: [f64; 2], delta_x: f64) -> Self {
        assert!(components == 1 || components == 2);
        Field {
            nx,
            ny,
            components,
            origin,
            delta_x,
            data: vec![0.0; components * nx * ny],
        }
    }

    /// Builds a field by evaluating `f` at every cell center.
    pub fn from_fn<F: Fn(f64, f64) -> Vec<f64>>(
        nx: usize,
        ny: usize,
        components: usize,
        origin: [f64; 2],
        delta_x: f64,
        f: F,
    ) -> Self {
        let mut field = Field::zeros(nx, ny, components, origin, delta_x);
        for iy in 0..ny {
            for ix in 0..nx {
                let p = field.position(ix, iy);
                let v = f(p[0], p[1]);
                for c in 0..components {
                    field.set(ix, iy, c, v[c]);
                }
            }
        }
        field
    }

    #[inline]
    pub fn position(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.origin[0] + self.delta_x * ix as f64,
            self.origin[1] + self.delta_x * iy as f64,
        ]
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize, component: usize) -> f64 {
        self.data[component * self.nx * self.ny + iy * self.nx + ix]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, iy: usize, component: usize, value: f64) {
        self.data[component * self.nx * self.ny + iy * self.nx + ix] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Euclidean norm over components as a scalar field.
    pub fn magnitude(&self) -> Field {
        let mut out = Field::zeros(self.nx, self.ny, 1, self.origin, self.delta_x);
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let mut sq = 0.0;
                for c in 0..self.components {
                    let v = self.get(ix, iy, c);
                    sq += v * v;
                }
                out.set(ix, iy, 0, sq.sqrt());
            }
        }
        out
    }
}

/// Velocity field of a lattice (half-force shift applied on forced cells).
pub fn velocity_field(lattice: &BlockLattice, origin: [f64; 2], delta_x: f64) -> Field {
    let mut field = Field::zeros(lattice.nx(), lattice.ny(), 2, origin, delta_x);
    for iy in 0..lattice.ny() {
        for ix in 0..lattice.nx() {
            let (_, u) = lattice.moments(ix, iy);
            field.set(ix, iy, 0, u[0]);
            field.set(ix, iy, 1, u[1]);
        }
    }
    field
}

/// Zeroth-moment field of a lattice (density, or the transported scalar).
pub fn density_field(lattice: &BlockLattice, origin: [f64; 2], delta_x: f64) -> Field {
    let mut field = Field::zeros(lattice.nx(), lattice.ny(), 1, origin, delta_x);
    for iy in 0..lattice.ny() {
        for ix in 0..lattice.nx() {
            field.set(ix, iy, 0, lattice.zeroth_moment(ix, iy));
        }
    }
    field
}

/// Plane channel profile `u(y) = 4 u_max y (H - y) / H^2`, clamped to zero
/// outside `[0, H]`.
pub fn poiseuille_profile(y: f64, max_velocity: f64, height: f64) -> f64 {
    if y < 0.0 || y > height {
        return 0.0;
    }
    4.0 * max_velocity * y * (height - y) / (height * height)
}

/// Advected-diffused sine pulse `sin(pi (x - u t)) exp(-mu pi^2 t)`.
pub fn ade_analytic_1d(x: f64, t: f64, u: f64, mu: f64) -> f64 {
    (std::f64::consts::PI * (x - u * t)).sin() * (-mu * std::f64::consts::PI.powi(2) * t).exp()
}

/// Two-dimensional product pulse
/// `sin(pi (x - ux t)) sin(pi (y - uy t)) exp(-2 mu pi^2 t)`.
pub fn ade_analytic_2d(x: f64, y: f64, t: f64, u: [f64; 2], mu: f64) -> f64 {
    let pi = std::f64::consts::PI;
    (pi * (x - u[0] * t)).sin() * (pi * (y - u[1] * t)).sin() * (-2.0 * mu * pi * pi * t).exp()
}

/// Steady profiles of the injected channel flow:
/// `u_x(y) = u0 (e^{Re y/L} - 1)/(e^{Re} - 1)` and
/// `T(y) = Tc + dT (e^{Pr Re y/L} - 1)/(e^{Pr Re} - 1)`.
/// `Re = 0` degenerates to the linear profiles `y/L`.
pub fn porous_plate_analytic(
    y: f64,
    length: f64,
    re: f64,
    pr: f64,
    u0: f64,
    t_cold: f64,
    delta_t: f64,
) -> (f64, f64) {
    let shape = |exponent: f64| -> f64 {
        if exponent.abs() < 1e-12 {
            y / length
        } else {
            ((exponent * y / length).exp() - 1.0) / (exponent.exp() - 1.0)
        }
    };
    let u = u0 * shape(re);
    let t = t_cold + delta_t * shape(pr * re);
    (u, t)
}

/// Norm selector for [`error_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

/// Grid error norm between a simulated and a reference field over the
/// masked cells:
/// `E_L1 = sum |d| dx^2`, `E_L2 = sqrt(sum |d|^2 dx^2)`, `E_Linf = max |d|`,
/// summed over cells and components. Relative norms divide by the same
/// norm of the reference.
pub fn error_norm<M: Fn(usize, usize) -> bool>(
    sim: &Field,
    reference: &Field,
    mask: M,
    norm: Norm,
    relative: bool,
) -> Result<f64, Error> {
    if sim.nx != reference.nx || sim.ny != reference.ny || sim.components != reference.components {
        return Err(Error::Validation(
            "error norm requires fields of identical shape".into(),
        ));
    }
    let area = sim.delta_x * sim.delta_x;
    let mut abs_acc = 0.0_f64;
    let mut ref_acc = 0.0_f64;
    let mut any = false;
    for iy in 0..sim.ny {
        for ix in 0..sim.nx {
            if !mask(ix, iy) {
                continue;
            }
            any = true;
            for c in 0..sim.components {
                let d = (sim.get(ix, iy, c) - reference.get(ix, iy, c)).abs();
                let r = reference.get(ix, iy, c).abs();
                match norm {
                    Norm::L1 => {
                        abs_acc += d * area;
                        ref_acc += r * area;
                    }
                    Norm::L2 => {
                        abs_acc += d * d * area;
                        ref_acc += r * r * area;
                    }
                    Norm::LInf => {
                        abs_acc = abs_acc.max(d);
                        ref_acc = ref_acc.max(r);
                    }
                }
            }
        }
    }
    if !any {
        return Err(Error::Validation("error norm mask selects no cell".into()));
    }
    let (mut abs, mut reference_norm) = (abs_acc, ref_acc);
    if norm == Norm::L2 {
        abs = abs.sqrt();
        reference_norm = reference_norm.sqrt();
    }
    if !relative {
        return Ok(abs);
    }
    if reference_norm == 0.0 {
        return Err(Error::Validation(
            "relative error norm with zero reference norm".into(),
        ));
    }
    Ok(abs / reference_norm)
}

/// Result of an experimental-order-of-convergence fit.
#[derive(Debug, Clone, PartialEq)]
pub struct EocResult {
    /// `ln(E_i/E_j) / ln(h_i/h_j)` for consecutive pairs.
    pub pairwise: Vec<f64>,
    /// Least-squares slope of `ln E` against `ln h`.
    pub slope: f64,
}

/// Fits the error law `E = C h^alpha` from (spacing, error) samples.
pub fn compute_eoc(pairs: &[(f64, f64)]) -> Result<EocResult, Error> {
    if pairs.len() < 2 {
        return Err(Error::Validation(
            "order-of-convergence fit needs at least two samples".into(),
        ));
    }
    if pairs.iter().any(|(h, e)| *h <= 0.0 || *e <= 0.0) {
        return Err(Error::Validation(
            "order-of-convergence fit needs positive spacings and errors".into(),
        ));
    }
    let pairwise = pairs
        .windows(2)
        .map(|w| {
            let (h0, e0) = w[0];
            let (h1, e1) = w[1];
            (e0 / e1).ln() / (h0 / h1).ln()
        })
        .collect();

    let n = pairs.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (h, e) in pairs {
        let x = h.ln();
        let y = e.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(EocResult { pairwise, slope })
}

/// Windowed standard-deviation convergence monitor: converged once the
/// window is full and `sigma < epsilon * |mean|`.
#[derive(Debug, Clone)]
pub struct ValueTracer {
    window: usize,
    epsilon: f64,
    buffer: VecDeque<f64>,
}

impl ValueTracer {
    /// `window` is the number of samples the deviation is taken over.
    pub fn new(window: usize, epsilon: f64) -> Self {
        assert!(window >= 2, "tracer window must hold at least two samples");
        assert!(epsilon > 0.0, "tracer tolerance must be positive");
        ValueTracer {
            window,
            epsilon,
            buffer: VecDeque::with_capacity(window),
        }
    }

    pub fn take_value(&mut self, sample: f64) {
        if self.buffer.len() == self.window {
            self.buffer.pop_front();
        }
        self.buffer.push_back(sample);
    }

    pub fn mean(&self) -> f64 {
        self.buffer.iter().sum::<f64>() / self.buffer.len().max(1) as f64
    }

    pub fn standard_deviation(&self) -> f64 {
        if self.buffer.is_empty() {
            return 0.0;
        }
        let mean = self.mean();
        let var = self
            .buffer
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / self.buffer.len() as f64;
        var.sqrt()
    }

    /// Never converged before the window fills.
    pub fn has_converged(&self) -> bool {
        self.buffer.len() == self.window
            && self.standard_deviation() < self.epsilon * self.mean().abs()
    }
}

/// Discrete flux through an axis-aligned line: samples the vector field at
/// the lattice points of the line and returns
/// `(dx * sum v.n, sampled length, dx * sum v)`.
pub fn line_flux<M: Fn(usize, usize) -> bool>(
    field: &Field,
    origin: [f64; 2],
    normal: [i32; 2],
    mask: M,
) -> Result<(f64, f64, [f64; 2]), Error> {
    if field.components != 2 {
        return Err(Error::Validation("line flux needs a vector field".into()));
    }
    let along_x = match normal {
        [1, 0] | [-1, 0] => false,
        [0, 1] | [0, -1] => true,
        _ => {
            return Err(Error::Validation(
                "line flux normal must be axis-aligned".into(),
            ))
        }
    };
    let dx = field.delta_x;
    let mut flux = 0.0;
    let mut count = 0usize;
    let mut flow = [0.0, 0.0];
    if along_x {
        // Horizontal line: fixed iy, iterate ix.
        let fy = (origin[1] - field.origin[1]) / dx;
        let iy = fy.round() as i64;
        if iy < 0 || iy >= field.ny as i64 || (fy - iy as f64).abs() > 0.5 + 1e-9 {
            return Err(Error::Validation("line lies outside the grid".into()));
        }
        let iy = iy as usize;
        for ix in 0..field.nx {
            if !mask(ix, iy) {
                continue;
            }
            let vx = field.get(ix, iy, 0);
            let vy = field.get(ix, iy, 1);
            flux += vx * normal[0] as f64 + vy * normal[1] as f64;
            flow[0] += vx;
            flow[1] += vy;
            count += 1;
        }
    } else {
        let fx = (origin[0] - field.origin[0]) / dx;
        let ix = fx.round() as i64;
        if ix < 0 || ix >= field.nx as i64 || (fx - ix as f64).abs() > 0.5 + 1e-9 {
            return Err(Error::Validation("line lies outside the grid".into()));
        }
        let ix = ix as usize;
        for iy in 0..field.ny {
            if !mask(ix, iy) {
                continue;
            }
            let vx = field.get(ix, iy, 0);
            let vy = field.get(ix, iy, 1);
            flux += vx * normal[0] as f64 + vy * normal[1] as f64;
            flow[0] += vx;
            flow[1] += vy;
            count += 1;
        }
    }
    Ok((
        dx * flux,
        dx * count as f64,
        [dx * flow[0], dx * flow[1]],
    ))
}

/// Start-up ramp family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartScale {
    /// Smoothstep `3 s^2 - 2 s^3`.
    Polynomial,
    /// Raised cosine `(1 - cos(pi s)) / 2`.
    Sinus,
}

/// Smooth ramp from 0 at step 0 to 1 at `ramp_steps`, clamped and monotone,
/// with zero slope at the ramp end.
pub fn start_scale(step: u64, ramp_steps: u64, kind: StartScale) -> f64 {
    assert!(ramp_steps >= 1, "ramp must span at least one step");
    let s = (step as f64 / ramp_steps as f64).clamp(0.0, 1.0);
    match kind {
        StartScale::Polynomial => s * s * (3.0 - 2.0 * s),
        StartScale::Sinus => 0.5 * (1.0 - (std::f64::consts::PI * s).cos()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poiseuille_profile_values() {
        assert_eq!(poiseuille_profile(0.5, 2.0, 1.0), 2.0);
        assert_eq!(poiseuille_profile(0.0, 2.0, 1.0), 0.0);
        assert!((poiseuille_profile(0.25, 1.0, 1.0) - 0.75).abs() < 1e-15);
        assert_eq!(poiseuille_profile(-0.1, 1.0, 1.0), 0.0);
        assert_eq!(poiseuille_profile(1.1, 1.0, 1.0), 0.0);
    }

    #[test]
    fn ade_pulse_values() {
        let pi = std::f64::consts::PI;
        assert!((ade_analytic_1d(0.25, 0.0, 1.0, 1.0) - (0.25 * pi).sin()).abs() < 1e-15);
        // The sine zero advects with the flow.
        assert!(ade_analytic_1d(0.5 * 0.1, 0.1, 0.5, 1.5).abs() < 1e-15);
        let expected = (0.45 * pi).sin() * (-0.15 * pi * pi).exp();
        assert!((ade_analytic_1d(0.5, 0.1, 0.5, 1.5) - expected).abs() < 1e-15);

        // Separable product at t = 0 and zero on advected node lines.
        assert!(
            (ade_analytic_2d(0.3, 0.7, 0.0, [1.0, 2.0], 0.05)
                - (0.3 * pi).sin() * (0.7 * pi).sin())
            .abs()
                < 1e-15
        );
        assert!(ade_analytic_2d(1.0 + 0.2 * 0.5, 0.33, 0.5, [0.2, 0.1], 0.05).abs() < 1e-12);
        let spot = ade_analytic_2d(0.4, -0.2, 0.3, [0.25, -0.5], 0.05);
        let direct =
            (pi * (0.4 - 0.075)).sin() * (pi * (-0.2 + 0.15)).sin() * (-2.0 * 0.05 * pi * pi * 0.3).exp();
        assert!((spot - direct).abs() < 1e-15);
    }

    #[test]
    fn porous_plate_profiles() {
        let (u, t) = porous_plate_analytic(0.0, 1.0, 2.0, 1.0, 0.3, 0.5, 1.0);
        assert_eq!(u, 0.0);
        assert_eq!(t, 0.5);
        let (u, t) = porous_plate_analytic(1.0, 1.0, 2.0, 1.0, 0.3, 0.5, 1.0);
        assert!((u - 0.3).abs() < 1e-15);
        assert!((t - 1.5).abs() < 1e-15);
        // Pr = 1 collapses both shapes.
        for y in [0.2, 0.5, 0.8] {
            let (u, t) = porous_plate_analytic(y, 1.0, 2.0, 1.0, 1.0, 0.0, 1.0);
            assert!((u - t).abs() < 1e-15);
        }
        // Vanishing Reynolds number degenerates to linear profiles.
        let (u, t) = porous_plate_analytic(0.25, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0);
        assert!((u - 0.25).abs() < 1e-15);
        assert!((t - 0.25).abs() < 1e-15);
    }

    #[test]
    fn error_norm_closed_forms() {
        let nx = 5;
        let ny = 4;
        let dx = 0.1;
        let sim = Field::from_fn(nx, ny, 1, [0.0, 0.0], dx, |_, _| vec![1.3]);
        let reference = Field::from_fn(nx, ny, 1, [0.0, 0.0], dx, |_, _| vec![1.0]);
        let all = |_: usize, _: usize| true;

        let zero = error_norm(&sim, &sim, all, Norm::L1, false).unwrap();
        assert_eq!(zero, 0.0);

        let m = (nx * ny) as f64;
        let l1 = error_norm(&sim, &reference, all, Norm::L1, false).unwrap();
        assert!((l1 - 0.3 * m * dx * dx).abs() < 1e-12);
        let linf = error_norm(&sim, &reference, all, Norm::LInf, false).unwrap();
        assert!((linf - 0.3).abs() < 1e-15);
        let l2 = error_norm(&sim, &reference, all, Norm::L2, false).unwrap();
        assert!((l2 - (0.09 * m * dx * dx).sqrt()).abs() < 1e-12);
        let rel = error_norm(&sim, &reference, all, Norm::L2, true).unwrap();
        assert!((rel - 0.3).abs() < 1e-12);
    }

    #[test]
    fn error_norm_matches_brute_force_and_scales() {
        let nx = 6;
        let ny = 3;
        let dx = 0.25;
        let f = |x: f64, y: f64| vec![(3.1 * x).sin() * (1.7 * y).cos(), x * y - 0.3];
        let g = |x: f64, y: f64| vec![(2.3 * x).cos(), (x - y).sin()];
        let sim = Field::from_fn(nx, ny, 2, [0.0, 0.0], dx, f);
        let reference = Field::from_fn(nx, ny, 2, [0.0, 0.0], dx, g);
        let all = |_: usize, _: usize| true;

        // Independent accumulation.
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        let mut linf = 0.0_f64;
        for iy in 0..ny {
            for ix in 0..nx {
                let x = ix as f64 * dx;
                let y = iy as f64 * dx;
                for c in 0..2 {
                    let d = (f(x, y)[c] - g(x, y)[c]).abs();
                    l1 += d * dx * dx;
                    l2 += d * d * dx * dx;
                    linf = linf.max(d);
                }
            }
        }
        l2 = l2.sqrt();
        assert!((error_norm(&sim, &reference, all, Norm::L1, false).unwrap() - l1).abs() < 1e-14);
        assert!((error_norm(&sim, &reference, all, Norm::L2, false).unwrap() - l2).abs() < 1e-14);
        assert!(
            (error_norm(&sim, &reference, all, Norm::LInf, false).unwrap() - linf).abs() < 1e-14
        );

        // Absolute norms are homogeneous of degree one.
        let scale = -2.5_f64;
        let sim_s = Field::from_fn(nx, ny, 2, [0.0, 0.0], dx, |x, y| {
            f(x, y).iter().map(|v| scale * v).collect()
        });
        let ref_s = Field::from_fn(nx, ny, 2, [0.0, 0.0], dx, |x, y| {
            g(x, y).iter().map(|v| scale * v).collect()
        });
        for norm in [Norm::L1, Norm::L2, Norm::LInf] {
            let base = error_norm(&sim, &reference, all, norm, false).unwrap();
            let scaled = error_norm(&sim_s, &ref_s, all, norm, false).unwrap();
            assert!((scaled - scale.abs() * base).abs() < 1e-12);
            // Relative norms are invariant under the global scaling.
            let rel = error_norm(&sim, &reference, all, norm, true).unwrap();
            let rel_s = error_norm(&sim_s, &ref_s, all, norm, true).unwrap();
            assert!((rel - rel_s).abs() < 1e-12);
        }
    }

    #[test]
    fn error_norm_rejects_degenerate_inputs() {
        let sim = Field::zeros(2, 2, 1, [0.0, 0.0], 1.0);
        assert!(error_norm(&sim, &sim, |_, _| false, Norm::L1, false).is_err());
        assert!(error_norm(&sim, &sim, |_, _| true, Norm::L1, true).is_err());
    }

    #[test]
    fn eoc_on_exact_quadratic_data() {
        let c = 3.7;
        let pairs: Vec<(f64, f64)> = [0.04, 0.02, 0.01].iter().map(|h| (*h, c * h * h)).collect();
        let result = compute_eoc(&pairs).unwrap();
        for eoc in &result.pairwise {
            assert!((eoc - 2.0).abs() < 1e-12);
        }
        assert!((result.slope - 2.0).abs() < 1e-12);

        let two = compute_eoc(&[(0.04, 0.04), (0.02, 0.01)]).unwrap();
        assert!((two.pairwise[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn eoc_matches_closed_form_regression_on_noisy_data() {
        let pairs = [
            (0.08, 2.1e-2),
            (0.04, 5.3e-3),
            (0.02, 1.4e-3),
            (0.01, 3.2e-4),
        ];
        let result = compute_eoc(&pairs).unwrap();
        // Closed-form least squares on the log data.
        let xs: Vec<f64> = pairs.iter().map(|(h, _)| h.ln()).collect();
        let ys: Vec<f64> = pairs.iter().map(|(_, e)| e.ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        assert!((result.slope - num / den).abs() < 1e-12);

        assert!(compute_eoc(&[(0.1, 1.0)]).is_err());
        assert!(compute_eoc(&[(0.1, 1.0), (0.05, -1.0)]).is_err());
    }

    #[test]
    fn tracer_convergence_rules() {
        // Not converged before the window fills, whatever the values.
        let mut tracer = ValueTracer::new(3, 1e100);
        tracer.take_value(1.0);
        tracer.take_value(1.0);
        assert!(!tracer.has_converged());

        // Constant window converges for any tolerance.
        tracer.take_value(1.0);
        assert!(tracer.has_converged());

        // [1, 2, 3]: sigma = sqrt(2/3) > 2e-5.
        let mut tracer = ValueTracer::new(3, 1e-5);
        for v in [1.0, 2.0, 3.0] {
            tracer.take_value(v);
        }
        assert!((tracer.standard_deviation() - (2.0_f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(!tracer.has_converged());
    }

    #[test]
    fn line_flux_closed_forms() {
        let nx = 7;
        let ny = 5;
        let dx = 0.5;
        let uniform = Field::from_fn(nx, ny, 2, [0.0, 0.0], dx, |_, _| vec![1.0, 0.0]);
        let all = |_: usize, _: usize| true;

        // Vertical line with normal (1,0): flux = dx * ny.
        let (flux, length, flow) =
            line_flux(&uniform, [1.0, 0.0], [1, 0], all).unwrap();
        assert!((flux - dx * ny as f64).abs() < 1e-14);
        assert!((length - dx * ny as f64).abs() < 1e-14);
        assert!((flow[0] - dx * ny as f64).abs() < 1e-14);

        // Orthogonal normal sees no flux.
        let (flux, _, _) = line_flux(&uniform, [0.0, 1.0], [0, 1], all).unwrap();
        assert!(flux.abs() < 1e-14);

        // Random field equals a brute-force sample sum.
        let field = Field::from_fn(nx, ny, 2, [0.0, 0.0], dx, |x, y| {
            vec![(x * 2.0 + y).sin(), (x - y * 3.0).cos()]
        });
        let ix = 4;
        let (flux, _, _) =
            line_flux(&field, [ix as f64 * dx, 0.0], [1, 0], all).unwrap();
        let expected: f64 = (0..ny).map(|iy| field.get(ix, iy, 0)).sum::<f64>() * dx;
        assert!((flux - expected).abs() < 1e-14);

        // Outside the grid.
        assert!(line_flux(&uniform, [100.0, 0.0], [1, 0], all).is_err());
    }

    #[test]
    fn start_scales_ramp_smoothly() {
        for kind in [StartScale::Polynomial, StartScale::Sinus] {
            assert_eq!(start_scale(0, 100, kind), 0.0);
            assert_eq!(start_scale(100, 100, kind), 1.0);
            assert_eq!(start_scale(250, 100, kind), 1.0);
            assert!((start_scale(50, 100, kind) - 0.5).abs() < 1e-15);
            // Monotone nondecreasing over the ramp.
            let mut prev = -1.0;
            for step in 0..=120 {
                let v = start_scale(step, 100, kind);
                assert!(v >= prev - 1e-15);
                prev = v;
            }
            // Flat arrival at the ramp end.
            let slope = start_scale(100, 100, kind) - start_scale(99, 100, kind);
            assert!(slope < 5e-4);
        }
    }
}
