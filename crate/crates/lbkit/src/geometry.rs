//! Material-number grids built from indicator primitives.
//!
//! Indicators are closed-set membership functions over the plane. Composite
//! domains are assembled with `+` (union), `-` (set difference) and `*`
//! (intersection), mirroring the primitive-functor arithmetic. Voxelization
//! samples cell centers: a cell belongs to the domain iff its center
//! satisfies the indicator.

use std::ops::{Add, Mul, Sub};

use crate::Error;

/// Membership predicate over the plane.
#[derive(Debug, Clone, PartialEq)]
pub enum Indicator {
    Cuboid { origin: [f64; 2], extent: [f64; 2] },
    Circle { center: [f64; 2], radius: f64 },
    Union(Box<Indicator>, Box<Indicator>),
    Intersection(Box<Indicator>, Box<Indicator>),
    Difference(Box<Indicator>, Box<Indicator>),
}

impl Indicator {
    /// Axis-aligned box from its lower-left corner and positive extent.
    pub fn cuboid(origin: [f64; 2], extent: [f64; 2]) -> Self {
        assert!(
            extent[0] > 0.0 && extent[1] > 0.0,
            "cuboid extent must be positive"
        );
        Indicator::Cuboid { origin, extent }
    }

    pub fn circle(center: [f64; 2], radius: f64) -> Self {
        assert!(radius > 0.0, "circle radius must be positive");
        Indicator::Circle { center, radius }
    }

    /// Closed-set membership; composites follow boolean algebra.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        match self {
            Indicator::Cuboid { origin, extent } => {
                p[0] >= origin[0]
                    && p[0] <= origin[0] + extent[0]
                    && p[1] >= origin[1]
                    && p[1] <= origin[1] + extent[1]
            }
            Indicator::Circle { center, radius } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                dx * dx + dy * dy <= radius * radius
            }
            Indicator::Union(a, b) => a.contains(p) || b.contains(p),
            Indicator::Intersection(a, b) => a.contains(p) && b.contains(p),
            Indicator::Difference(a, b) => a.contains(p) && !b.contains(p),
        }
    }

    /// Bounding box as (min, max); difference uses the left operand's box.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            Indicator::Cuboid { origin, extent } => {
                (*origin, [origin[0] + extent[0], origin[1] + extent[1]])
            }
            Indicator::Circle { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Indicator::Union(a, b) => {
                let (amin, amax) = a.bounding_box();
                let (bmin, bmax) = b.bounding_box();
                (
                    [amin[0].min(bmin[0]), amin[1].min(bmin[1])],
                    [amax[0].max(bmax[0]), amax[1].max(bmax[1])],
                )
            }
            Indicator::Intersection(a, b) => {
                let (amin, amax) = a.bounding_box();
                let (bmin, bmax) = b.bounding_box();
                (
                    [amin[0].max(bmin[0]), amin[1].max(bmin[1])],
                    [amax[0].min(bmax[0]), amax[1].min(bmax[1])],
                )
            }
            Indicator::Difference(a, _) => a.bounding_box(),
        }
    }
}

impl Add for Indicator {
    type Output = Indicator;
    fn add(self, rhs: Indicator) -> Indicator {
        Indicator::Union(Box::new(self), Box::new(rhs))
    }
}

impl Sub for Indicator {
    type Output = Indicator;
    fn sub(self, rhs: Indicator) -> Indicator {
        Indicator::Difference(Box::new(self), Box::new(rhs))
    }
}

impl Mul for Indicator {
    type Output = Indicator;
    fn mul(self, rhs: Indicator) -> Indicator {
        Indicator::Intersection(Box::new(self), Box::new(rhs))
    }
}

/// Regular grid of material numbers with physical placement.
///
/// Cell `(ix, iy)` has its center at `origin + delta_x * (ix, iy)`.
/// Material 0 marks exterior cells, 1 fluid, numbers >= 2 boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub nx: usize,
    pub ny: usize,
    pub origin: [f64; 2],
    pub delta_x: f64,
    materials: Vec<u8>,
}

impl Geometry {
    pub fn new(nx: usize, ny: usize, origin: [f64; 2], delta_x: f64, material: u8) -> Self {
        assert!(nx >= 1 && ny >= 1, "grid dimensions must be positive");
        assert!(delta_x > 0.0, "grid spacing must be positive");
        Geometry {
            nx,
            ny,
            origin,
            delta_x,
            materials: vec![material; nx * ny],
        }
    }

    #[inline]
    pub fn material(&self, ix: usize, iy: usize) -> u8 {
        self.materials[iy * self.nx + ix]
    }

    #[inline]
    pub fn set_material(&mut self, ix: usize, iy: usize, m: u8) {
        self.materials[iy * self.nx + ix] = m;
    }

    /// Physical position of the cell center.
    #[inline]
    pub fn position(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.origin[0] + self.delta_x * ix as f64,
            self.origin[1] + self.delta_x * iy as f64,
        ]
    }

    pub fn count_material(&self, m: u8) -> usize {
        self.materials.iter().filter(|&&v| v == m).count()
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Replaces every `from` cell with `to`.
    pub fn rename(&mut self, from: u8, to: u8) {
        for m in &mut self.materials {
            if *m == from {
                *m = to;
            }
        }
    }

    /// Renames `from` cells to `to` only where every cell in the
    /// `(2*offset+1)^2` box around them carries material `from` or `to`.
    /// With an all-`from` block this carves the interior out and leaves the
    /// outermost ring untouched.
    pub fn rename_with_offset(&mut self, from: u8, to: u8, offset: [usize; 2]) {
        let prev = self.materials.clone();
        let (ox, oy) = (offset[0] as isize, offset[1] as isize);
        for iy in 0..self.ny as isize {
            for ix in 0..self.nx as isize {
                if prev[iy as usize * self.nx + ix as usize] != from {
                    continue;
                }
                let mut interior = true;
                'scan: for dy in -oy..=oy {
                    for dx in -ox..=ox {
                        let (jx, jy) = (ix + dx, iy + dy);
                        if jx < 0 || jy < 0 || jx >= self.nx as isize || jy >= self.ny as isize {
                            interior = false;
                            break 'scan;
                        }
                        let m = prev[jy as usize * self.nx + jx as usize];
                        if m != from && m != to {
                            interior = false;
                            break 'scan;
                        }
                    }
                }
                if interior {
                    self.materials[iy as usize * self.nx + ix as usize] = to;
                }
            }
        }
    }

    /// Renames `from` cells whose center satisfies the indicator.
    pub fn rename_where(&mut self, from: u8, to: u8, condition: &Indicator) {
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if self.material(ix, iy) == from && condition.contains(self.position(ix, iy)) {
                    self.set_material(ix, iy, to);
                }
            }
        }
    }

    /// Renames `from` cells to `to` when the neighbors at one and two steps
    /// along `test_direction` both carry material `test_m`.
    pub fn rename_facing(&mut self, from: u8, to: u8, test_m: u8, test_direction: [i32; 2]) {
        let prev = self.materials.clone();
        let probe = |ix: isize, iy: isize| -> Option<u8> {
            if ix < 0 || iy < 0 || ix >= self.nx as isize || iy >= self.ny as isize {
                None
            } else {
                Some(prev[iy as usize * self.nx + ix as usize])
            }
        };
        for iy in 0..self.ny as isize {
            for ix in 0..self.nx as isize {
                if prev[iy as usize * self.nx + ix as usize] != from {
                    continue;
                }
                let (dx, dy) = (test_direction[0] as isize, test_direction[1] as isize);
                let near = probe(ix + dx, iy + dy);
                let far = probe(ix + 2 * dx, iy + 2 * dy);
                if near == Some(test_m) && far == Some(test_m) {
                    self.materials[iy as usize * self.nx + ix as usize] = to;
                }
            }
        }
    }

    /// Cell predicate selecting the given material numbers.
    pub fn material_indicator(&self, materials: &[u8]) -> MaterialIndicator {
        let mask = self
            .materials
            .iter()
            .map(|m| materials.contains(m))
            .collect();
        MaterialIndicator {
            nx: self.nx,
            mask,
        }
    }
}

/// Precomputed per-cell predicate over a geometry.
#[derive(Debug, Clone)]
pub struct MaterialIndicator {
    nx: usize,
    mask: Vec<bool>,
}

impl MaterialIndicator {
    #[inline]
    pub fn contains(&self, ix: usize, iy: usize) -> bool {
        self.mask[iy * self.nx + ix]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
}

/// Voxelizes an indicator domain onto a regular grid.
///
/// Cells whose centers satisfy the indicator get material 2 (the expected
/// workflow then refines the bulk via the rename operations); all other
/// cells stay 0. The grid covers the indicator's bounding box plus
/// `padding` cells on every side.
pub fn build_geometry(domain: &Indicator, delta_x: f64, padding: usize) -> Result<Geometry, Error> {
    if !(delta_x > 0.0) {
        return Err(Error::Validation(format!(
            "grid spacing must be positive, got {delta_x}"
        )));
    }
    let (min, max) = domain.bounding_box();
    let extent = [max[0] - min[0], max[1] - min[1]];
    if extent[0] <= 0.0 || extent[1] <= 0.0 {
        return Err(Error::Geometry("indicator domain is empty".into()));
    }
    let cells = |len: f64| ((len / delta_x - 1e-9).ceil() as usize).max(1);
    let core = [cells(extent[0]), cells(extent[1])];
    let nx = core[0] + 2 * padding;
    let ny = core[1] + 2 * padding;
    let origin = [
        min[0] + 0.5 * delta_x - padding as f64 * delta_x,
        min[1] + 0.5 * delta_x - padding as f64 * delta_x,
    ];

    let mut geo = Geometry::new(nx, ny, origin, delta_x, 0);
    let mut any = false;
    for iy in 0..ny {
        for ix in 0..nx {
            if domain.contains(geo.position(ix, iy)) {
                geo.set_material(ix, iy, 2);
                any = true;
            }
        }
    }
    if !any {
        return Err(Error::Geometry(
            "no cell center falls inside the indicator domain".into(),
        ));
    }
    Ok(geo)
}
