//! Cell-local kinetic kernels: equilibria, moments, BGK/TRT collision and
//! the Guo forcing source.
//!
//! All functions operate on a gathered population slice of length `q`. The
//! [`Kernel`] caches the descriptor constants in floating point so the hot
//! loop avoids rational conversions and heap traffic.

use crate::descriptor::DescriptorTable;

/// Largest supported velocity count (D2Q9).
pub const MAX_Q: usize = 9;

/// Floating-point view of a descriptor for the per-cell kernels.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub q: usize,
    pub c: [[f64; 2]; MAX_Q],
    pub ci: [[i32; 2]; MAX_Q],
    pub w: [f64; MAX_Q],
    pub opposite: [usize; MAX_Q],
    pub cs2: f64,
    pub inv_cs2: f64,
}

impl Kernel {
    pub fn new(desc: &DescriptorTable) -> Self {
        let mut c = [[0.0; 2]; MAX_Q];
        let mut ci = [[0; 2]; MAX_Q];
        let mut w = [0.0; MAX_Q];
        let mut opposite = [0; MAX_Q];
        for i in 0..desc.q {
            ci[i] = desc.c[i];
            c[i] = [desc.c[i][0] as f64, desc.c[i][1] as f64];
            w[i] = desc.weight_f64(i);
            opposite[i] = desc.opposite[i];
        }
        let cs2 = desc.cs2_f64();
        Kernel {
            q: desc.q,
            c,
            ci,
            w,
            opposite,
            cs2,
            inv_cs2: 1.0 / cs2,
        }
    }

    /// Second-order Maxwellian expansion
    /// `w_i rho [1 + c.u/cs2 + (c.u)^2/(2 cs4) - u^2/(2 cs2)]`.
    #[inline]
    pub fn equilibrium_second_order(&self, rho: f64, u: [f64; 2], out: &mut [f64]) {
        let usq = (u[0] * u[0] + u[1] * u[1]) * 0.5 * self.inv_cs2;
        for i in 0..self.q {
            let cu = (self.c[i][0] * u[0] + self.c[i][1] * u[1]) * self.inv_cs2;
            out[i] = self.w[i] * rho * (1.0 + cu + 0.5 * cu * cu - usq);
        }
    }

    /// First-order equilibrium `w_i rho (1 + c.u/cs2)` used for
    /// advection-diffusion transport.
    #[inline]
    pub fn equilibrium_first_order(&self, rho: f64, u: [f64; 2], out: &mut [f64]) {
        for i in 0..self.q {
            let cu = (self.c[i][0] * u[0] + self.c[i][1] * u[1]) * self.inv_cs2;
            out[i] = self.w[i] * rho * (1.0 + cu);
        }
    }

    /// Zeroth and first moment: `rho = sum f`, `u = sum c f / rho`.
    #[inline]
    pub fn moments(&self, f: &[f64]) -> (f64, [f64; 2]) {
        let mut rho = 0.0;
        let mut jx = 0.0;
        let mut jy = 0.0;
        for i in 0..self.q {
            rho += f[i];
            jx += self.c[i][0] * f[i];
            jy += self.c[i][1] * f[i];
        }
        (rho, [jx / rho, jy / rho])
    }

    /// BGK relaxation toward the second-order equilibrium:
    /// `f <- (1 - omega) f + omega feq`.
    #[inline]
    pub fn bgk(&self, f: &mut [f64], omega: f64) -> (f64, [f64; 2]) {
        let (rho, u) = self.moments(f);
        self.bgk_with(f, omega, rho, u);
        (rho, u)
    }

    /// BGK step with externally supplied moments (forced dynamics shift
    /// the velocity before relaxing).
    #[inline]
    pub fn bgk_with(&self, f: &mut [f64], omega: f64, rho: f64, u: [f64; 2]) {
        let mut feq = [0.0; MAX_Q];
        self.equilibrium_second_order(rho, u, &mut feq[..self.q]);
        for i in 0..self.q {
            f[i] += omega * (feq[i] - f[i]);
        }
    }

    /// BGK relaxation toward the first-order equilibrium with a prescribed
    /// advection velocity.
    #[inline]
    pub fn ade_bgk(&self, g: &mut [f64], omega: f64, u: [f64; 2]) -> f64 {
        let rho: f64 = g[..self.q].iter().sum();
        let mut geq = [0.0; MAX_Q];
        self.equilibrium_first_order(rho, u, &mut geq[..self.q]);
        for i in 0..self.q {
            g[i] += omega * (geq[i] - g[i]);
        }
        rho
    }

    /// Two-relaxation-time collision. The even part over opposite pairs
    /// relaxes with `omega`, the odd part with the rate linked through the
    /// magic parameter: `(1/omega - 1/2)(1/omega_minus - 1/2) = lambda`.
    #[inline]
    pub fn trt(&self, f: &mut [f64], omega: f64, lambda: f64) -> (f64, [f64; 2]) {
        let (rho, u) = self.moments(f);
        let mut feq = [0.0; MAX_Q];
        self.equilibrium_second_order(rho, u, &mut feq[..self.q]);

        let a = 1.0 / omega - 0.5;
        let omega_minus = 1.0 / (lambda / a + 0.5);

        for i in 0..self.q {
            let j = self.opposite[i];
            if j < i {
                continue;
            }
            if i == j {
                f[i] -= omega * (f[i] - feq[i]);
                continue;
            }
            let f_even = 0.5 * (f[i] + f[j]);
            let f_odd = 0.5 * (f[i] - f[j]);
            let eq_even = 0.5 * (feq[i] + feq[j]);
            let eq_odd = 0.5 * (feq[i] - feq[j]);
            let d_even = omega * (f_even - eq_even);
            let d_odd = omega_minus * (f_odd - eq_odd);
            f[i] -= d_even + d_odd;
            f[j] -= d_even - d_odd;
        }
        (rho, u)
    }

    /// Guo source terms
    /// `S_i = (1 - omega/2) w_i [ (c - u)/cs2 + (c.u)/cs4 c ] . F`.
    #[inline]
    pub fn guo_source(&self, u: [f64; 2], omega: f64, force: [f64; 2], out: &mut [f64]) {
        let pref = 1.0 - 0.5 * omega;
        let inv_cs4 = self.inv_cs2 * self.inv_cs2;
        for i in 0..self.q {
            let cu = self.c[i][0] * u[0] + self.c[i][1] * u[1];
            let sx = (self.c[i][0] - u[0]) * self.inv_cs2 + cu * self.c[i][0] * inv_cs4;
            let sy = (self.c[i][1] - u[1]) * self.inv_cs2 + cu * self.c[i][1] * inv_cs4;
            out[i] = pref * self.w[i] * (sx * force[0] + sy * force[1]);
        }
    }

    /// Adds the Guo source to freshly collided populations.
    #[inline]
    pub fn apply_guo(&self, f: &mut [f64], u: [f64; 2], omega: f64, force: [f64; 2]) {
        let mut s = [0.0; MAX_Q];
        self.guo_source(u, omega, force, &mut s[..self.q]);
        for i in 0..self.q {
            f[i] += s[i];
        }
    }
}

/// Allocating convenience wrapper around [`Kernel::equilibrium_second_order`].
pub fn equilibrium_second_order(rho: f64, u: [f64; 2], desc: &DescriptorTable) -> Vec<f64> {
    let kern = Kernel::new(desc);
    let mut out = vec![0.0; desc.q];
    kern.equilibrium_second_order(rho, u, &mut out);
    out
}

/// Allocating convenience wrapper around [`Kernel::equilibrium_first_order`].
pub fn equilibrium_first_order(rho: f64, u: [f64; 2], desc: &DescriptorTable) -> Vec<f64> {
    let kern = Kernel::new(desc);
    let mut out = vec![0.0; desc.q];
    kern.equilibrium_first_order(rho, u, &mut out);
    out
}

/// Moments of a gathered cell. With `force` given, applies the half-force
/// velocity shift `u += F/2` used by the forced dynamics.
pub fn compute_moments(
    f: &[f64],
    desc: &DescriptorTable,
    force: Option<[f64; 2]>,
) -> (f64, [f64; 2]) {
    let kern = Kernel::new(desc);
    let (rho, mut u) = kern.moments(f);
    if let Some(fc) = force {
        u[0] += 0.5 * fc[0];
        u[1] += 0.5 * fc[1];
    }
    (rho, u)
}

/// In-place BGK collision of one gathered cell.
pub fn collide_bgk(f: &mut [f64], omega: f64, desc: &DescriptorTable) {
    Kernel::new(desc).bgk(f, omega);
}

/// In-place TRT collision of one gathered cell.
pub fn collide_trt(f: &mut [f64], omega: f64, lambda: f64, desc: &DescriptorTable) {
    Kernel::new(desc).trt(f, omega, lambda);
}

/// Guo source terms for one cell as a vector.
pub fn guo_source_terms(
    u: [f64; 2],
    omega: f64,
    force: [f64; 2],
    desc: &DescriptorTable,
) -> Vec<f64> {
    let kern = Kernel::new(desc);
    let mut out = vec![0.0; desc.q];
    kern.guo_source(u, omega, force, &mut out);
    out
}

/// Adds the Guo source terms to a collided cell.
pub fn apply_guo_force(
    f: &mut [f64],
    u: [f64; 2],
    omega: f64,
    force: [f64; 2],
    desc: &DescriptorTable,
) {
    Kernel::new(desc).apply_guo(f, u, omega, force);
}
