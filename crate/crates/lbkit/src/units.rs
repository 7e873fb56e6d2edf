//! Conversion between physical SI quantities and lattice units.
//!
//! The converter is parametrized by the resolution `N` (cells per
//! characteristic length) and the lattice relaxation time `tau`. All other
//! factors follow from
//!
//! ```text
//! dx   = L / N
//! nu_L = cs2 (tau - 1/2),  cs2 = 1/3,  omega = 1/tau
//! dt   = nu_L dx^2 / nu            (diffusive scaling)
//! u_L  = U dt / dx
//! ```

use crate::Error;
use std::fmt;

const CS2: f64 = 1.0 / 3.0;

/// Physical/lattice scaling for a flow lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitConverter {
    pub resolution: usize,
    pub lattice_relaxation_time: f64,
    pub char_phys_length: f64,
    pub char_phys_velocity: f64,
    pub phys_viscosity: f64,
    pub phys_density: f64,
    pub delta_x: f64,
    pub delta_t: f64,
    pub lattice_viscosity: f64,
    pub omega: f64,
    pub char_lattice_velocity: f64,
}

impl UnitConverter {
    /// Builds the converter from resolution and relaxation time.
    pub fn from_resolution_and_relaxation_time(
        resolution: usize,
        tau: f64,
        char_phys_length: f64,
        char_phys_velocity: f64,
        phys_viscosity: f64,
        phys_density: f64,
    ) -> Result<Self, Error> {
        if resolution < 1 {
            return Err(Error::Validation("resolution must be >= 1".into()));
        }
        if tau <= 0.5 {
            return Err(Error::Stability(format!(
                "lattice relaxation time {tau} must exceed 0.5"
            )));
        }
        for (name, v) in [
            ("charPhysLength", char_phys_length),
            ("charPhysVelocity", char_phys_velocity),
            ("physViscosity", phys_viscosity),
            ("physDensity", phys_density),
        ] {
            if !(v > 0.0) {
                return Err(Error::Validation(format!("{name} must be positive, got {v}")));
            }
        }

        let delta_x = char_phys_length / resolution as f64;
        let lattice_viscosity = CS2 * (tau - 0.5);
        let delta_t = lattice_viscosity * delta_x * delta_x / phys_viscosity;
        let char_lattice_velocity = char_phys_velocity * delta_t / delta_x;

        Ok(UnitConverter {
            resolution,
            lattice_relaxation_time: tau,
            char_phys_length,
            char_phys_velocity,
            phys_viscosity,
            phys_density,
            delta_x,
            delta_t,
            lattice_viscosity,
            omega: 1.0 / tau,
            char_lattice_velocity,
        })
    }

    /// Physical time to step count, rounded to nearest (ties round half up).
    pub fn lattice_time(&self, phys_time: f64) -> Result<u64, Error> {
        if phys_time < 0.0 {
            return Err(Error::Validation(format!(
                "time must be non-negative, got {phys_time}"
            )));
        }
        Ok((phys_time / self.delta_t + 0.5).floor() as u64)
    }

    pub fn phys_time(&self, steps: u64) -> f64 {
        steps as f64 * self.delta_t
    }

    pub fn lattice_velocity(&self, phys_velocity: f64) -> f64 {
        phys_velocity * self.delta_t / self.delta_x
    }

    pub fn phys_velocity(&self, lattice_velocity: f64) -> f64 {
        lattice_velocity * self.delta_x / self.delta_t
    }

    pub fn lattice_length(&self, phys_length: f64) -> f64 {
        phys_length / self.delta_x
    }

    pub fn phys_length(&self, lattice_length: f64) -> f64 {
        lattice_length * self.delta_x
    }

    pub fn lattice_density(&self, phys_density: f64) -> f64 {
        phys_density / self.phys_density
    }

    pub fn phys_density_of(&self, lattice_density: f64) -> f64 {
        lattice_density * self.phys_density
    }

    /// Physical pressure from a lattice density, `p_L = (rho - 1)/3` scaled
    /// by `rho_phys dx^2/dt^2`.
    pub fn phys_pressure(&self, lattice_density: f64) -> Result<f64, Error> {
        if !(lattice_density > 0.0) {
            return Err(Error::Validation(format!(
                "lattice density must be positive, got {lattice_density}"
            )));
        }
        let lattice_pressure = (lattice_density - 1.0) / 3.0;
        let scale = self.phys_density * (self.delta_x / self.delta_t).powi(2);
        Ok(lattice_pressure * scale)
    }

    /// One `key = value` line per parameter, keys as printed by the solver log.
    pub fn summary(&self) -> String {
        format!(
            "Resolution = {}\n\
             LatticeRelaxationTime = {}\n\
             CharPhysLength = {}\n\
             CharPhysVelocity = {}\n\
             PhysViscosity = {}\n\
             PhysDensity = {}\n\
             DeltaX = {}\n\
             DeltaT = {}\n\
             Omega = {}\n\
             CharLatticeVelocity = {}\n",
            self.resolution,
            self.lattice_relaxation_time,
            self.char_phys_length,
            self.char_phys_velocity,
            self.phys_viscosity,
            self.phys_density,
            self.delta_x,
            self.delta_t,
            self.omega,
            self.char_lattice_velocity,
        )
    }
}

impl fmt::Display for UnitConverter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

/// Scaling extension for an advection-diffusion lattice sharing the base
/// discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct AdeUnitConverter {
    pub base: UnitConverter,
    pub phys_diffusivity: f64,
    pub lattice_diffusivity: f64,
    pub omega_ad: f64,
}

impl AdeUnitConverter {
    /// `D_L = D dt / dx^2`, `omega_AD = 1 / (D_L / cs2_ad + 1/2)`.
    pub fn new(base: UnitConverter, phys_diffusivity: f64, cs2_ad: f64) -> Result<Self, Error> {
        if !(phys_diffusivity > 0.0) {
            return Err(Error::Validation(format!(
                "physDiffusivity must be positive, got {phys_diffusivity}"
            )));
        }
        let lattice_diffusivity = phys_diffusivity * base.delta_t / (base.delta_x * base.delta_x);
        let omega_ad = 1.0 / (lattice_diffusivity / cs2_ad + 0.5);
        if !(omega_ad > 0.0 && omega_ad < 2.0) {
            return Err(Error::Stability(format!(
                "omega_AD = {omega_ad} lies outside (0, 2)"
            )));
        }
        Ok(AdeUnitConverter {
            base,
            phys_diffusivity,
            lattice_diffusivity,
            omega_ad,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_converter() -> UnitConverter {
        // Inputs of the Re = 20 cylinder benchmark configuration.
        UnitConverter::from_resolution_and_relaxation_time(
            100,
            0.53,
            0.1,
            0.2,
            0.2 * 2.0 * 0.05 / 20.0,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn derived_factors_match_hand_evaluation() {
        let c = reference_converter();
        assert!((c.delta_x - 1e-3).abs() < 1e-18);
        assert!((c.lattice_viscosity - 0.01).abs() < 1e-15);
        assert!((c.delta_t - 1e-5).abs() < 1e-18);
        assert!((c.char_lattice_velocity - 0.002).abs() < 1e-15);
        assert!((c.omega - 1.0 / 0.53).abs() < 1e-15);
    }

    #[test]
    fn tau_one_gives_sixth_viscosity() {
        let c =
            UnitConverter::from_resolution_and_relaxation_time(1, 1.0, 1.0, 1.0, 1.0 / 6.0, 1.0)
                .unwrap();
        assert!((c.lattice_viscosity - 1.0 / 6.0).abs() < 1e-15);
        assert!((c.delta_t - c.delta_x * c.delta_x).abs() < 1e-15);
        assert!((c.char_lattice_velocity - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(matches!(
            UnitConverter::from_resolution_and_relaxation_time(10, 0.5, 1.0, 1.0, 1.0, 1.0),
            Err(Error::Stability(_))
        ));
        assert!(matches!(
            UnitConverter::from_resolution_and_relaxation_time(10, 0.8, -1.0, 1.0, 1.0, 1.0),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn lattice_time_rounds_to_nearest() {
        let c = reference_converter(); // dt = 1e-5
        assert_eq!(c.lattice_time(0.0).unwrap(), 0);
        assert_eq!(c.lattice_time(1.0).unwrap(), 100_000);
        assert_eq!(c.lattice_time(1.000004).unwrap(), 100_000);
        assert_eq!(c.lattice_time(1.000006).unwrap(), 100_001);
        assert!(c.lattice_time(-1.0).is_err());
        let t = 0.731;
        let steps = c.lattice_time(t).unwrap();
        assert!((c.phys_time(steps) - t).abs() <= c.delta_t / 2.0);
    }

    #[test]
    fn pressure_conversion() {
        let c = reference_converter(); // dx/dt = 100 m/s, rho = 1
        assert_eq!(c.phys_pressure(1.0).unwrap(), 0.0);
        let high = c.phys_pressure(1.03).unwrap();
        let low = c.phys_pressure(0.97).unwrap();
        assert!((high - 100.0).abs() < 1e-9);
        assert!((high + low).abs() < 1e-9);
        assert!(c.phys_pressure(0.0).is_err());
    }

    #[test]
    fn round_trips() {
        let c = reference_converter();
        for v in [0.0, 0.13, 2.5] {
            assert!((c.phys_velocity(c.lattice_velocity(v)) - v).abs() <= 1e-15 * (1.0 + v));
            assert!((c.phys_length(c.lattice_length(v)) - v).abs() <= 1e-15 * (1.0 + v));
            assert!(
                (c.phys_density_of(c.lattice_density(v)) - v).abs() <= 1e-15 * (1.0 + v)
            );
        }
    }

    #[test]
    fn diffusive_scaling_under_refinement() {
        let make = |n| {
            UnitConverter::from_resolution_and_relaxation_time(n, 0.8, 1.0, 1.0, 0.1, 1.0).unwrap()
        };
        let coarse = make(50);
        let fine = make(100);
        assert!((coarse.delta_t / fine.delta_t - 4.0).abs() < 1e-12);
    }

    #[test]
    fn ade_converter_follows_invariants() {
        // Default pulse-transport configuration: N = 50 over a length-2
        // domain, diffusive scaling dt = dx^2.
        let base =
            UnitConverter::from_resolution_and_relaxation_time(50, 0.8, 2.0, 10.0, 0.1, 1.0)
                .unwrap();
        assert!((base.delta_x - 0.04).abs() < 1e-15);
        assert!((base.delta_t - base.delta_x * base.delta_x).abs() < 1e-15);
        assert!((base.char_lattice_velocity - 0.4).abs() < 1e-12);

        let ade = AdeUnitConverter::new(base, 1.5, 1.0 / 3.0).unwrap();
        assert!((ade.lattice_diffusivity - 1.5).abs() < 1e-12);
        assert!((ade.omega_ad - 0.2).abs() < 1e-12);
    }

    #[test]
    fn ade_omega_limits() {
        let base =
            UnitConverter::from_resolution_and_relaxation_time(10, 1.0, 1.0, 1.0, 1.0 / 6.0, 1.0)
                .unwrap();
        // D_L = cs2/2 gives omega_AD = 1.
        let cs2 = 1.0 / 3.0;
        let d_phys = 0.5 * cs2 * base.delta_x * base.delta_x / base.delta_t;
        let ade = AdeUnitConverter::new(base.clone(), d_phys, cs2).unwrap();
        assert!((ade.omega_ad - 1.0).abs() < 1e-12);
        // D_L -> 0 drives omega_AD toward 2 from below.
        let ade = AdeUnitConverter::new(base, d_phys * 1e-9, cs2).unwrap();
        assert!(ade.omega_ad < 2.0 && ade.omega_ad > 2.0 - 1e-6);
    }

    #[test]
    fn summary_lists_all_parameters() {
        let s = reference_converter().summary();
        for key in [
            "Resolution",
            "LatticeRelaxationTime",
            "CharPhysLength",
            "CharPhysVelocity",
            "PhysViscosity",
            "PhysDensity",
            "DeltaX",
            "DeltaT",
            "Omega",
            "CharLatticeVelocity",
        ] {
            assert!(s.contains(&format!("{key} = ")), "missing {key} in {s}");
        }
    }
}
