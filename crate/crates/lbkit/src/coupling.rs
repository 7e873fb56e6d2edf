//! Coupling between a flow lattice and an advection-diffusion lattice.
//!
//! The velocity computed on the flow lattice is transferred into the
//! VELOCITY field of the transport lattice each step; the buoyancy coupling
//! writes the Boussinesq force back onto the flow lattice. The driver
//! executes the coupling between the two collide-and-stream calls.

use crate::lattice::{BlockLattice, Dynamics};
use crate::Error;

/// Parameters of the Boussinesq buoyancy force
/// `F = rho (T - T0)/deltaT g * direction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoussinesqParams {
    /// Gravity magnitude in lattice units.
    pub gravity: f64,
    /// Reference temperature, the mean of hot and cold.
    pub t0: f64,
    /// Temperature difference hot minus cold.
    pub delta_t: f64,
    /// Unit vector along which the force acts.
    pub direction: [f64; 2],
}

impl BoussinesqParams {
    pub fn new(gravity: f64, t0: f64, delta_t: f64, direction: [f64; 2]) -> Result<Self, Error> {
        if delta_t == 0.0 {
            return Err(Error::Validation(
                "Boussinesq temperature difference must be nonzero".into(),
            ));
        }
        let norm = (direction[0] * direction[0] + direction[1] * direction[1]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!(
                "Boussinesq direction must be a unit vector, |d| = {norm}"
            )));
        }
        Ok(BoussinesqParams {
            gravity,
            t0,
            delta_t,
            direction,
        })
    }
}

fn check_shapes(a: &BlockLattice, b: &BlockLattice) -> Result<(), Error> {
    if a.nx() != b.nx() || a.ny() != b.ny() {
        return Err(Error::Geometry(format!(
            "coupled lattices differ in shape: {}x{} vs {}x{}",
            a.nx(),
            a.ny(),
            b.nx(),
            b.ny()
        )));
    }
    Ok(())
}

fn is_bulk(dynamics: Dynamics) -> bool {
    matches!(
        dynamics,
        Dynamics::Bgk | Dynamics::ForcedBgk | Dynamics::Trt
    )
}

/// Writes the flow velocity of every fluid cell into the VELOCITY field of
/// the transport lattice. Forced cells include the half-force shift.
pub fn couple_velocity(nse: &BlockLattice, ade: &mut BlockLattice) -> Result<(), Error> {
    check_shapes(nse, ade)?;
    for iy in 0..nse.ny() {
        for ix in 0..nse.nx() {
            if is_bulk(nse.dynamics(ix, iy)) {
                let (_, u) = nse.moments(ix, iy);
                ade.set_velocity_field(ix, iy, u);
            }
        }
    }
    Ok(())
}

/// Writes the Boussinesq force onto the FORCE field of every fluid cell of
/// the flow lattice, reading the temperature from the transport lattice.
pub fn couple_boussinesq(
    nse: &mut BlockLattice,
    ade: &BlockLattice,
    params: &BoussinesqParams,
) -> Result<(), Error> {
    check_shapes(nse, ade)?;
    for iy in 0..nse.ny() {
        for ix in 0..nse.nx() {
            if is_bulk(nse.dynamics(ix, iy)) {
                let temperature = ade.zeroth_moment(ix, iy);
                let rho = nse.zeroth_moment(ix, iy);
                let scale = params.gravity * rho * (temperature - params.t0) / params.delta_t;
                nse.set_force(
                    ix,
                    iy,
                    [scale * params.direction[0], scale * params.direction[1]],
                );
            }
        }
    }
    Ok(())
}
