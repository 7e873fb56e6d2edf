//! Population storage and the collide-and-stream evolution.
//!
//! Populations live in structure-of-arrays layout: one `nx * ny` plane per
//! discrete velocity, row-major with x fastest. Auxiliary per-cell fields
//! (FORCE, VELOCITY, BOUNDARY) use the same plane layout, one plane per
//! component. Every cell carries a dynamics tag selecting its collision
//! behavior; streaming is a global periodic shift of the planes.
//!
//! One evolution step runs in three stages: cell-local collision (bulk
//! collisions and the local wall algorithms), nearest-neighbor streaming,
//! and the non-local boundary post-step (flux-wall target refresh).

pub mod kernels;

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::boundary;
use crate::descriptor::{descriptor_data, DescriptorTable, LatticeSet};
use crate::Error;
use kernels::{Kernel, MAX_Q};

/// Per-cell dynamics selector with the prescribed boundary values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dynamics {
    /// Exterior cell, skipped entirely.
    None,
    Bgk,
    /// BGK with the Guo forcing scheme reading the FORCE field.
    ForcedBgk,
    Trt,
    /// First-order equilibrium BGK advected by the VELOCITY field.
    AdeBgk,
    BounceBack,
    ZouHeVelocity { normal: [i32; 2], u: [f64; 2] },
    ZouHePressure { normal: [i32; 2], rho: f64 },
    AdeDirichlet { normal: [i32; 2], value: f64 },
    /// Flux wall; `value` holds the Dirichlet target computed from the
    /// interior neighbor in the post-stream stage.
    AdeNeumann { normal: [i32; 2], value: f64 },
    AdeAdiabatic { normal: [i32; 2] },
}

/// Relaxation parameters of one lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsParams {
    pub omega: f64,
    /// TRT magic parameter.
    pub lambda: f64,
}

impl DynamicsParams {
    pub fn bgk(omega: f64) -> Self {
        DynamicsParams {
            omega,
            lambda: 0.25,
        }
    }

    pub fn trt(omega: f64, lambda: f64) -> Self {
        DynamicsParams { omega, lambda }
    }
}

const CHECKPOINT_MAGIC: &[u8; 8] = b"LBK2CKPT";

/// One block of lattice data with its per-cell dynamics tags.
#[derive(Debug, Clone)]
pub struct BlockLattice {
    desc: DescriptorTable,
    kern: Kernel,
    nx: usize,
    ny: usize,
    f: Vec<f64>,
    f_back: Vec<f64>,
    force: Option<Vec<f64>>,
    velocity: Option<Vec<f64>>,
    boundary: Option<Vec<f64>>,
    dynamics: Vec<Dynamics>,
    steps: u64,
}

impl BlockLattice {
    /// Creates a lattice at rest equilibrium (`rho = 1`, `u = 0`) with all
    /// cells tagged [`Dynamics::None`].
    pub fn new(set: LatticeSet, nx: usize, ny: usize) -> Self {
        assert!(nx >= 1 && ny >= 1, "lattice dimensions must be positive");
        let desc = descriptor_data(set);
        let kern = Kernel::new(&desc);
        let np = nx * ny;
        let mut f = vec![0.0; desc.q * np];
        for i in 0..desc.q {
            let w = desc.weight_f64(i);
            f[i * np..(i + 1) * np].fill(w);
        }
        BlockLattice {
            f_back: f.clone(),
            f,
            kern,
            desc,
            nx,
            ny,
            force: None,
            velocity: None,
            boundary: None,
            dynamics: vec![Dynamics::None; np],
            steps: 0,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn q(&self) -> usize {
        self.desc.q
    }

    pub fn descriptor(&self) -> &DescriptorTable {
        &self.desc
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    #[inline]
    fn cell_index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.nx && iy < self.ny);
        iy * self.nx + ix
    }

    #[inline]
    pub fn population(&self, i: usize, ix: usize, iy: usize) -> f64 {
        self.f[i * self.nx * self.ny + self.cell_index(ix, iy)]
    }

    #[inline]
    pub fn set_population(&mut self, i: usize, ix: usize, iy: usize, value: f64) {
        let idx = i * self.nx * self.ny + self.cell_index(ix, iy);
        self.f[idx] = value;
    }

    /// Gathers the populations of one cell.
    pub fn cell(&self, ix: usize, iy: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.desc.q];
        self.gather(ix, iy, &mut out);
        out
    }

    #[inline]
    fn gather(&self, ix: usize, iy: usize, out: &mut [f64]) {
        let np = self.nx * self.ny;
        let base = self.cell_index(ix, iy);
        for i in 0..self.desc.q {
            out[i] = self.f[i * np + base];
        }
    }

    #[inline]
    fn scatter(&mut self, ix: usize, iy: usize, cell: &[f64]) {
        let np = self.nx * self.ny;
        let base = self.cell_index(ix, iy);
        for i in 0..self.desc.q {
            self.f[i * np + base] = cell[i];
        }
    }

    pub fn set_cell(&mut self, ix: usize, iy: usize, populations: &[f64]) {
        assert_eq!(populations.len(), self.desc.q);
        self.scatter(ix, iy, populations);
    }

    pub fn dynamics(&self, ix: usize, iy: usize) -> Dynamics {
        self.dynamics[self.cell_index(ix, iy)]
    }

    pub fn set_dynamics(&mut self, ix: usize, iy: usize, dynamics: Dynamics) {
        let idx = self.cell_index(ix, iy);
        self.dynamics[idx] = dynamics;
    }

    /// Tags every cell selected by the predicate.
    pub fn set_dynamics_where<P: Fn(usize, usize) -> bool>(&mut self, pred: P, dynamics: Dynamics) {
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if pred(ix, iy) {
                    self.set_dynamics(ix, iy, dynamics);
                }
            }
        }
    }

    /// Initializes one cell to the second-order equilibrium.
    pub fn init_equilibrium(&mut self, ix: usize, iy: usize, rho: f64, u: [f64; 2]) {
        let mut cell = [0.0; MAX_Q];
        self.kern
            .equilibrium_second_order(rho, u, &mut cell[..self.desc.q]);
        self.scatter(ix, iy, &cell[..self.desc.q]);
    }

    /// Initializes one cell to the first-order equilibrium.
    pub fn init_ade_equilibrium(&mut self, ix: usize, iy: usize, rho: f64, u: [f64; 2]) {
        let mut cell = [0.0; MAX_Q];
        self.kern
            .equilibrium_first_order(rho, u, &mut cell[..self.desc.q]);
        self.scatter(ix, iy, &cell[..self.desc.q]);
    }

    fn field_mut(slot: &mut Option<Vec<f64>>, len: usize) -> &mut Vec<f64> {
        slot.get_or_insert_with(|| vec![0.0; len])
    }

    pub fn set_force(&mut self, ix: usize, iy: usize, force: [f64; 2]) {
        let np = self.nx * self.ny;
        let base = self.cell_index(ix, iy);
        let field = Self::field_mut(&mut self.force, 2 * np);
        field[base] = force[0];
        field[np + base] = force[1];
    }

    pub fn force(&self, ix: usize, iy: usize) -> [f64; 2] {
        let np = self.nx * self.ny;
        let base = self.cell_index(ix, iy);
        match &self.force {
            Some(field) => [field[base], field[np + base]],
            None => [0.0, 0.0],
        }
    }

    pub fn set_velocity_field(&mut self, ix: usize, iy: usize, u: [f64; 2]) {
        let np = self.nx * self.ny;
        let base = self.cell_index(ix, iy);
        let field = Self::field_mut(&mut self.velocity, 2 * np);
        field[base] = u[0];
        field[np + base] = u[1];
    }

    pub fn velocity_field(&self, ix: usize, iy: usize) -> [f64; 2] {
        let np = self.nx * self.ny;
        let base = self.cell_index(ix, iy);
        match &self.velocity {
            Some(field) => [field[base], field[np + base]],
            None => [0.0, 0.0],
        }
    }

    /// Sets the flux payload `dx * flux` of a Neumann wall cell.
    pub fn set_boundary_field(&mut self, ix: usize, iy: usize, payload: f64) {
        let np = self.nx * self.ny;
        let base = self.cell_index(ix, iy);
        Self::field_mut(&mut self.boundary, np)[base] = payload;
    }

    pub fn boundary_field(&self, ix: usize, iy: usize) -> f64 {
        match &self.boundary {
            Some(field) => field[self.cell_index(ix, iy)],
            None => 0.0,
        }
    }

    /// Moments of one cell; applies the half-force shift on forced cells.
    pub fn moments(&self, ix: usize, iy: usize) -> (f64, [f64; 2]) {
        let mut cell = [0.0; MAX_Q];
        self.gather(ix, iy, &mut cell[..self.desc.q]);
        let (rho, mut u) = self.kern.moments(&cell[..self.desc.q]);
        if matches!(self.dynamics(ix, iy), Dynamics::ForcedBgk) {
            let f = self.force(ix, iy);
            u[0] += 0.5 * f[0];
            u[1] += 0.5 * f[1];
        }
        (rho, u)
    }

    /// Zeroth moment of one cell (density or transported scalar).
    pub fn zeroth_moment(&self, ix: usize, iy: usize) -> f64 {
        let plane = self.nx * self.ny;
        let base = self.cell_index(ix, iy);
        (0..self.desc.q).map(|i| self.f[i * plane + base]).sum()
    }

    /// Total mass over all cells.
    pub fn total_mass(&self) -> f64 {
        self.f.iter().sum()
    }

    fn is_active(&self, idx: usize) -> bool {
        !matches!(self.dynamics[idx], Dynamics::None)
    }

    /// Mean density over active cells.
    pub fn average_density(&self) -> f64 {
        let np = self.nx * self.ny;
        let mut sum = 0.0;
        let mut count = 0usize;
        for idx in 0..np {
            if self.is_active(idx) {
                let rho: f64 = (0..self.desc.q).map(|i| self.f[i * np + idx]).sum();
                sum += rho;
                count += 1;
            }
        }
        sum / count.max(1) as f64
    }

    /// Half the mean squared velocity over active cells, the usual
    /// convergence monitor.
    pub fn average_energy(&self) -> f64 {
        let mut cell = [0.0; MAX_Q];
        let mut sum = 0.0;
        let mut count = 0usize;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let idx = self.cell_index(ix, iy);
                if !self.is_active(idx) {
                    continue;
                }
                self.gather(ix, iy, &mut cell[..self.desc.q]);
                let (_, u) = self.kern.moments(&cell[..self.desc.q]);
                sum += 0.5 * (u[0] * u[0] + u[1] * u[1]);
                count += 1;
            }
        }
        sum / count.max(1) as f64
    }

    /// Largest velocity magnitude over active cells.
    pub fn max_speed(&self) -> f64 {
        let mut cell = [0.0; MAX_Q];
        let mut max = 0.0_f64;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let idx = self.cell_index(ix, iy);
                if !self.is_active(idx) {
                    continue;
                }
                self.gather(ix, iy, &mut cell[..self.desc.q]);
                let (_, u) = self.kern.moments(&cell[..self.desc.q]);
                max = max.max((u[0] * u[0] + u[1] * u[1]).sqrt());
            }
        }
        max
    }

    /// Cell-local collision stage.
    pub fn collide(&mut self, params: &DynamicsParams) -> Result<(), Error> {
        let np = self.nx * self.ny;
        let mut cell = [0.0; MAX_Q];
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let idx = self.cell_index(ix, iy);
                let dynamics = self.dynamics[idx];
                if matches!(dynamics, Dynamics::None) {
                    continue;
                }
                self.gather(ix, iy, &mut cell[..self.desc.q]);
                let q = self.desc.q;
                match dynamics {
                    Dynamics::None => unreachable!(),
                    Dynamics::Bgk => {
                        let (rho, _) = self.kern.bgk(&mut cell[..q], params.omega);
                        self.check_density(rho, ix, iy)?;
                    }
                    Dynamics::Trt => {
                        let (rho, _) = self.kern.trt(&mut cell[..q], params.omega, params.lambda);
                        self.check_density(rho, ix, iy)?;
                    }
                    Dynamics::ForcedBgk => {
                        let force = match &self.force {
                            Some(field) => [field[idx], field[np + idx]],
                            None => [0.0, 0.0],
                        };
                        let (rho, mut u) = self.kern.moments(&cell[..q]);
                        self.check_density(rho, ix, iy)?;
                        u[0] += 0.5 * force[0];
                        u[1] += 0.5 * force[1];
                        self.kern.bgk_with(&mut cell[..q], params.omega, rho, u);
                        self.kern.apply_guo(&mut cell[..q], u, params.omega, force);
                    }
                    Dynamics::AdeBgk => {
                        let u = match &self.velocity {
                            Some(field) => [field[idx], field[np + idx]],
                            None => [0.0, 0.0],
                        };
                        let rho = self.kern.ade_bgk(&mut cell[..q], params.omega, u);
                        if !rho.is_finite() {
                            return Err(self.blowup(rho, ix, iy));
                        }
                    }
                    Dynamics::BounceBack => {
                        boundary::apply_bounce_back(&mut cell[..q], &self.desc);
                    }
                    Dynamics::ZouHeVelocity { normal, u } => {
                        let rho =
                            boundary::apply_zou_he_velocity(&mut cell[..q], &self.desc, normal, u)?;
                        self.check_density(rho, ix, iy)?;
                        self.kern.bgk_with(&mut cell[..q], params.omega, rho, u);
                    }
                    Dynamics::ZouHePressure { normal, rho } => {
                        let u =
                            boundary::apply_zou_he_pressure(&mut cell[..q], &self.desc, normal, rho)?;
                        self.kern.bgk_with(&mut cell[..q], params.omega, rho, u);
                    }
                    Dynamics::AdeDirichlet { normal, value }
                    | Dynamics::AdeNeumann { normal, value } => {
                        boundary::apply_ade_dirichlet(&mut cell[..q], &self.desc, normal, value)?;
                        let u = match &self.velocity {
                            Some(field) => [field[idx], field[np + idx]],
                            None => [0.0, 0.0],
                        };
                        self.kern.ade_bgk(&mut cell[..q], params.omega, u);
                    }
                    Dynamics::AdeAdiabatic { normal } => {
                        boundary::apply_ade_adiabatic(&mut cell[..q], &self.desc, normal)?;
                    }
                }
                self.scatter(ix, iy, &cell[..self.desc.q]);
            }
        }
        Ok(())
    }

    fn check_density(&self, rho: f64, ix: usize, iy: usize) -> Result<(), Error> {
        if rho > 0.0 && rho.is_finite() {
            Ok(())
        } else {
            Err(self.blowup(rho, ix, iy))
        }
    }

    fn blowup(&self, rho: f64, ix: usize, iy: usize) -> Error {
        Error::Blowup {
            step: self.steps,
            what: format!("density {rho} at cell ({ix}, {iy})"),
        }
    }

    /// Periodic streaming: `f_i(x + c_i) <- f_i(x)` with wraparound on both
    /// axes. The multiset of population values is preserved exactly.
    pub fn stream(&mut self) {
        let (nx, ny) = (self.nx, self.ny);
        let np = nx * ny;
        for i in 0..self.desc.q {
            let [cx, cy] = self.desc.c[i];
            let src = &self.f[i * np..(i + 1) * np];
            let dst = &mut self.f_back[i * np..(i + 1) * np];
            let shift_x = cx.rem_euclid(nx as i32) as usize;
            let shift_y = cy.rem_euclid(ny as i32) as usize;
            for ty in 0..ny {
                let sy = (ty + ny - shift_y) % ny;
                let src_row = &src[sy * nx..(sy + 1) * nx];
                let dst_row = &mut dst[ty * nx..(ty + 1) * nx];
                if shift_x == 0 {
                    dst_row.copy_from_slice(src_row);
                } else {
                    let split = nx - shift_x;
                    dst_row[shift_x..].copy_from_slice(&src_row[..split]);
                    dst_row[..shift_x].copy_from_slice(&src_row[split..]);
                }
            }
        }
        std::mem::swap(&mut self.f, &mut self.f_back);
    }

    /// One full evolution step: collide, stream, then refresh the flux-wall
    /// Dirichlet targets from the post-stream interior neighbors.
    pub fn collide_and_stream(&mut self, params: &DynamicsParams) -> Result<(), Error> {
        self.collide(params)?;
        self.stream();
        self.refresh_neumann_targets()?;
        self.steps += 1;
        Ok(())
    }

    /// Non-local post-step of the flux walls: reads the interior neighbor's
    /// zeroth moment and stores the Dirichlet value for the next collision.
    pub fn refresh_neumann_targets(&mut self) -> Result<(), Error> {
        let np = self.nx * self.ny;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let idx = self.cell_index(ix, iy);
                if let Dynamics::AdeNeumann { normal, .. } = self.dynamics[idx] {
                    let jx = ix as i64 + normal[0] as i64;
                    let jy = iy as i64 + normal[1] as i64;
                    if jx < 0 || jy < 0 || jx >= self.nx as i64 || jy >= self.ny as i64 {
                        return Err(Error::Geometry(format!(
                            "flux wall at ({ix}, {iy}) lacks an interior neighbor"
                        )));
                    }
                    let nidx = jy as usize * self.nx + jx as usize;
                    let neighbor: f64 = (0..self.desc.q).map(|i| self.f[i * np + nidx]).sum();
                    let payload = self
                        .boundary
                        .as_ref()
                        .map(|b| b[idx])
                        .unwrap_or(0.0);
                    let value = boundary::neumann_wall_value(payload, neighbor, normal);
                    self.dynamics[idx] = Dynamics::AdeNeumann { normal, value };
                }
            }
        }
        Ok(())
    }

    /// Serializes populations and fields to a flat binary checkpoint.
    /// The round trip is bit-exact.
    pub fn save_checkpoint<P: AsRef<Path>>(&self, path: P) -> Result<(), Error> {
        let np = self.nx * self.ny;
        let mut fields: Vec<(&str, &Vec<f64>)> = Vec::new();
        if let Some(f) = &self.force {
            fields.push(("FORCE", f));
        }
        if let Some(v) = &self.velocity {
            fields.push(("VELOCITY", v));
        }
        if let Some(b) = &self.boundary {
            fields.push(("BOUNDARY", b));
        }

        let mut bytes = Vec::with_capacity(64 + 8 * (self.desc.q * np));
        bytes.extend_from_slice(CHECKPOINT_MAGIC);
        let name = self.desc.name.to_string();
        bytes.push(name.len() as u8);
        bytes.extend_from_slice(name.as_bytes());
        bytes.extend_from_slice(&(self.nx as u64).to_le_bytes());
        bytes.extend_from_slice(&(self.ny as u64).to_le_bytes());
        bytes.push(fields.len() as u8);
        for (name, _) in &fields {
            bytes.push(name.len() as u8);
            bytes.extend_from_slice(name.as_bytes());
        }
        for v in &self.f {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        for (_, data) in &fields {
            for v in data.iter() {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        let mut file = fs::File::create(path)?;
        file.write_all(&bytes)?;
        Ok(())
    }

    /// Restores populations and fields from a checkpoint written by
    /// [`BlockLattice::save_checkpoint`]. Dynamics tags are not part of the
    /// state and stay as configured.
    pub fn load_checkpoint<P: AsRef<Path>>(&mut self, path: P) -> Result<(), Error> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        let mut pos = 0usize;

        let take = |pos: &mut usize, n: usize| -> Result<&[u8], Error> {
            if *pos + n > bytes.len() {
                return Err(Error::Validation("checkpoint file truncated".into()));
            }
            let slice = &bytes[*pos..*pos + n];
            *pos += n;
            Ok(slice)
        };

        if take(&mut pos, 8)? != CHECKPOINT_MAGIC {
            return Err(Error::Validation("not a lattice checkpoint".into()));
        }
        let name_len = take(&mut pos, 1)?[0] as usize;
        let name = String::from_utf8_lossy(take(&mut pos, name_len)?).into_owned();
        if name != self.desc.name.to_string() {
            return Err(Error::Validation(format!(
                "checkpoint descriptor {name} does not match lattice {}",
                self.desc.name
            )));
        }
        let nx = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap()) as usize;
        let ny = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap()) as usize;
        if nx != self.nx || ny != self.ny {
            return Err(Error::Validation(format!(
                "checkpoint grid {nx}x{ny} does not match lattice {}x{}",
                self.nx, self.ny
            )));
        }
        let field_count = take(&mut pos, 1)?[0] as usize;
        let mut field_names = Vec::with_capacity(field_count);
        for _ in 0..field_count {
            let len = take(&mut pos, 1)?[0] as usize;
            field_names.push(String::from_utf8_lossy(take(&mut pos, len)?).into_owned());
        }

        let np = nx * ny;
        let read_plane = |pos: &mut usize, len: usize| -> Result<Vec<f64>, Error> {
            let raw = take(pos, 8 * len)?;
            Ok(raw
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect())
        };

        self.f = read_plane(&mut pos, self.desc.q * np)?;
        self.f_back = self.f.clone();
        for name in field_names {
            match name.as_str() {
                "FORCE" => self.force = Some(read_plane(&mut pos, 2 * np)?),
                "VELOCITY" => self.velocity = Some(read_plane(&mut pos, 2 * np)?),
                "BOUNDARY" => self.boundary = Some(read_plane(&mut pos, np)?),
                other => {
                    return Err(Error::Validation(format!(
                        "unknown checkpoint field {other}"
                    )))
                }
            }
        }
        Ok(())
    }

    /// Raw population planes, plane-major.
    pub fn populations(&self) -> &[f64] {
        &self.f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_bgk(lattice: &mut BlockLattice) {
        lattice.set_dynamics_where(|_, _| true, Dynamics::Bgk);
    }

    #[test]
    fn new_lattice_is_rest_equilibrium() {
        let lattice = BlockLattice::new(LatticeSet::D2Q9, 4, 3);
        let (rho, u) = lattice.moments(2, 1);
        assert!((rho - 1.0).abs() < 1e-15);
        assert_eq!(u, [0.0, 0.0]);
    }

    #[test]
    fn single_pulse_streams_to_its_neighbor() {
        let mut lattice = BlockLattice::new(LatticeSet::D2Q9, 4, 4);
        let np = 16;
        lattice.f.fill(0.0);
        lattice.f_back.fill(0.0);
        // Index 6 carries c = (1, 0).
        lattice.set_population(6, 0, 0, 1.0);
        lattice.stream();
        for iy in 0..4 {
            for ix in 0..4 {
                let expected = if (ix, iy) == (1, 0) { 1.0 } else { 0.0 };
                assert_eq!(lattice.population(6, ix, iy), expected);
            }
        }
        // Rest plane is untouched by construction.
        assert_eq!(lattice.f[..np].iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn streaming_wraps_periodically() {
        let mut lattice = BlockLattice::new(LatticeSet::D2Q9, 3, 3);
        lattice.f.fill(0.0);
        // Index 3 carries c = (-1, -1).
        lattice.set_population(3, 0, 0, 2.0);
        lattice.stream();
        assert_eq!(lattice.population(3, 2, 2), 2.0);
    }

    #[test]
    fn streaming_preserves_the_population_multiset() {
        let mut lattice = BlockLattice::new(LatticeSet::D2Q9, 5, 7);
        let mut state = 0.123_f64;
        for v in lattice.f.iter_mut() {
            state = (state * 883.0).fract();
            *v = state;
        }
        let mut before = lattice.f.clone();
        lattice.stream();
        let mut after = lattice.f.clone();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        assert_eq!(before, after);
    }

    #[test]
    fn uniform_equilibrium_is_a_global_fixed_point() {
        let mut lattice = BlockLattice::new(LatticeSet::D2Q9, 6, 6);
        all_bgk(&mut lattice);
        let before = lattice.f.clone();
        let params = DynamicsParams::bgk(1.6);
        for _ in 0..10 {
            lattice.collide_and_stream(&params).unwrap();
        }
        for (a, b) in lattice.f.iter().zip(&before) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_force_accelerates_the_mean_flow() {
        let mut lattice = BlockLattice::new(LatticeSet::D2Q9, 8, 8);
        lattice.set_dynamics_where(|_, _| true, Dynamics::ForcedBgk);
        let force = [1e-4, 0.0];
        for iy in 0..8 {
            for ix in 0..8 {
                lattice.set_force(ix, iy, force);
            }
        }
        let params = DynamicsParams::bgk(1.2);
        let steps = 20;
        for _ in 0..steps {
            lattice.collide_and_stream(&params).unwrap();
        }
        // Each step adds F/rho to the mean velocity; rho stays 1 on the
        // homogeneous lattice.
        let mut mean = 0.0;
        for iy in 0..8 {
            for ix in 0..8 {
                mean += lattice.moments(ix, iy).1[0];
            }
        }
        mean /= 64.0;
        assert!((mean - steps as f64 * force[0]).abs() < 1e-12);
    }

    #[test]
    fn blowup_is_reported_with_step_and_cell() {
        let mut lattice = BlockLattice::new(LatticeSet::D2Q9, 3, 3);
        all_bgk(&mut lattice);
        let zeros = vec![0.0; 9];
        lattice.set_cell(1, 1, &zeros);
        let err = lattice
            .collide_and_stream(&DynamicsParams::bgk(1.0))
            .unwrap_err();
        assert!(matches!(err, Error::Blowup { .. }), "{err}");
    }

    #[test]
    fn enclosed_box_conserves_mass_over_many_steps() {
        let n = 12;
        let mut lattice = BlockLattice::new(LatticeSet::D2Q9, n, n);
        lattice.set_dynamics_where(|_, _| true, Dynamics::Bgk);
        lattice.set_dynamics_where(
            |ix, iy| ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1,
            Dynamics::BounceBack,
        );
        // Perturb the interior so the flow is nontrivial.
        for iy in 2..6 {
            for ix in 2..6 {
                lattice.init_equilibrium(ix, iy, 1.05, [0.03, -0.01]);
            }
        }
        let mass0 = lattice.total_mass();
        let params = DynamicsParams::bgk(1.7);
        for _ in 0..1000 {
            lattice.collide_and_stream(&params).unwrap();
        }
        assert!((lattice.total_mass() - mass0).abs() < 1e-10);
    }

    #[test]
    fn checkpoint_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.chk");

        let mut lattice = BlockLattice::new(LatticeSet::D2Q9, 6, 5);
        all_bgk(&mut lattice);
        lattice.set_force(2, 2, [0.01, -0.02]);
        let params = DynamicsParams::bgk(1.4);
        for iy in 0..5 {
            for ix in 0..6 {
                lattice.init_equilibrium(ix, iy, 1.0 + 0.01 * ix as f64, [0.01, 0.005]);
            }
        }
        for _ in 0..7 {
            lattice.collide_and_stream(&params).unwrap();
        }
        lattice.save_checkpoint(&path).unwrap();

        let mut restored = BlockLattice::new(LatticeSet::D2Q9, 6, 5);
        all_bgk(&mut restored);
        restored.load_checkpoint(&path).unwrap();
        assert_eq!(restored.f, lattice.f);
        assert_eq!(restored.force, lattice.force);

        // Continuing both lattices stays bit-identical.
        for _ in 0..5 {
            lattice.collide_and_stream(&params).unwrap();
            restored.collide_and_stream(&params).unwrap();
        }
        assert_eq!(restored.f, lattice.f);
    }

    #[test]
    fn checkpoint_shape_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.chk");
        let lattice = BlockLattice::new(LatticeSet::D2Q9, 4, 4);
        lattice.save_checkpoint(&path).unwrap();

        let mut other = BlockLattice::new(LatticeSet::D2Q9, 5, 4);
        assert!(other.load_checkpoint(&path).is_err());
        let mut other = BlockLattice::new(LatticeSet::D2Q5, 4, 4);
        assert!(other.load_checkpoint(&path).is_err());
    }

    #[test]
    fn neumann_target_follows_the_neighbor() {
        let mut lattice = BlockLattice::new(LatticeSet::D2Q5, 4, 4);
        lattice.set_dynamics_where(|_, iy| iy > 0, Dynamics::AdeBgk);
        lattice.set_dynamics_where(
            |_, iy| iy == 0,
            Dynamics::AdeNeumann {
                normal: [0, 1],
                value: 0.0,
            },
        );
        for ix in 0..4 {
            lattice.set_boundary_field(ix, 0, 0.25);
            lattice.init_ade_equilibrium(ix, 1, 2.0, [0.0, 0.0]);
        }
        lattice.refresh_neumann_targets().unwrap();
        match lattice.dynamics(0, 0) {
            Dynamics::AdeNeumann { value, .. } => assert!((value - 2.25).abs() < 1e-14),
            other => panic!("unexpected dynamics {other:?}"),
        }
    }
}
