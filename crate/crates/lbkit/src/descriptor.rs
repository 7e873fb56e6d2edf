//! Velocity-set descriptors for two-dimensional lattices.
//!
//! A descriptor bundles the constants of a discrete velocity set: the
//! velocity vectors `c_i`, the quadrature weights `w_i`, the opposite-index
//! permutation and the lattice speed of sound. Weights are kept as exact
//! rationals so that the moment identities can be checked without rounding;
//! [`DescriptorTable::weights_f64`] yields the floating-point view used by
//! the kernels.

use num_rational::Ratio;
use std::fmt;

use crate::Error;

type Frac = Ratio<i64>;

/// Supported velocity sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeSet {
    /// Nine-velocity set for plane hydrodynamics.
    D2Q9,
    /// Five-velocity set for plane advection-diffusion.
    D2Q5,
}

impl fmt::Display for LatticeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeSet::D2Q9 => write!(f, "D2Q9"),
            LatticeSet::D2Q5 => write!(f, "D2Q5"),
        }
    }
}

impl LatticeSet {
    pub fn parse(name: &str) -> Result<Self, Error> {
        match name {
            "D2Q9" => Ok(LatticeSet::D2Q9),
            "D2Q5" => Ok(LatticeSet::D2Q5),
            other => Err(Error::Validation(format!(
                "unsupported lattice set `{other}` (supported: D2Q9, D2Q5)"
            ))),
        }
    }
}

/// Constant data of one velocity set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescriptorTable {
    pub name: LatticeSet,
    /// Spatial dimension, always 2.
    pub d: usize,
    /// Number of discrete velocities.
    pub q: usize,
    /// Discrete velocity vectors, components in {-1, 0, 1}.
    pub c: Vec<[i32; 2]>,
    /// Quadrature weights as exact rationals.
    pub w: Vec<Frac>,
    /// Index of the opposing velocity: `c[opposite[i]] == -c[i]`.
    pub opposite: Vec<usize>,
    /// Lattice speed of sound squared as an exact rational.
    pub cs2: Frac,
    /// Neighborhood radius in cells.
    pub vicinity: usize,
}

impl DescriptorTable {
    pub fn weights_f64(&self) -> Vec<f64> {
        self.w.iter().map(frac_f64).collect()
    }

    pub fn weight_f64(&self, i: usize) -> f64 {
        frac_f64(&self.w[i])
    }

    pub fn cs2_f64(&self) -> f64 {
        frac_f64(&self.cs2)
    }
}

fn frac_f64(r: &Frac) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Returns the constant table of the named velocity set.
///
/// The D2Q9 ordering starts at the rest velocity and walks the
/// neighborhood counter-clockwise from (-1,1):
/// `{(0,0),(-1,1),(-1,0),(-1,-1),(0,-1),(1,-1),(1,0),(1,1),(0,1)}`.
pub fn descriptor_data(name: LatticeSet) -> DescriptorTable {
    match name {
        LatticeSet::D2Q9 => DescriptorTable {
            name,
            d: 2,
            q: 9,
            c: vec![
                [0, 0],
                [-1, 1],
                [-1, 0],
                [-1, -1],
                [0, -1],
                [1, -1],
                [1, 0],
                [1, 1],
                [0, 1],
            ],
            w: vec![
                Frac::new(4, 9),
                Frac::new(1, 36),
                Frac::new(1, 9),
                Frac::new(1, 36),
                Frac::new(1, 9),
                Frac::new(1, 36),
                Frac::new(1, 9),
                Frac::new(1, 36),
                Frac::new(1, 9),
            ],
            opposite: vec![0, 5, 6, 7, 8, 1, 2, 3, 4],
            cs2: Frac::new(1, 3),
            vicinity: 1,
        },
        // Isotropic BGK weights; the moment identities below hold exactly.
        LatticeSet::D2Q5 => DescriptorTable {
            name,
            d: 2,
            q: 5,
            c: vec![[0, 0], [-1, 0], [0, -1], [1, 0], [0, 1]],
            w: vec![
                Frac::new(1, 3),
                Frac::new(1, 6),
                Frac::new(1, 6),
                Frac::new(1, 6),
                Frac::new(1, 6),
            ],
            opposite: vec![0, 3, 4, 1, 2],
            cs2: Frac::new(1, 3),
            vicinity: 1,
        },
    }
}

/// One failed identity found by [`validate_descriptor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Name of the failing identity, e.g. `weight-sum`.
    pub identity: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.identity, self.detail)
    }
}

/// Checks the moment identities of a descriptor in exact rational arithmetic.
///
/// An empty report means all of the following hold:
/// sum of weights is one, the first weighted moment of the velocities
/// vanishes, the second moment is `cs^2 I`, opposite indices pair
/// `c[opp(i)] = -c[i]` with equal weights, and all velocity components lie
/// in {-1,0,1} with a vicinity of one cell.
pub fn validate_descriptor(table: &DescriptorTable) -> Vec<Violation> {
    let mut report = Vec::new();
    let zero = Frac::new(0, 1);
    let one = Frac::new(1, 1);

    let sum: Frac = table.w.iter().sum();
    if sum != one {
        report.push(Violation {
            identity: "weight-sum",
            detail: format!("sum of weights is {sum}, expected 1"),
        });
    }

    for axis in 0..2 {
        let m1: Frac = table
            .w
            .iter()
            .zip(&table.c)
            .map(|(w, c)| *w * Frac::from(c[axis] as i64))
            .sum();
        if m1 != zero {
            report.push(Violation {
                identity: "first-moment",
                detail: format!("sum w_i c_i[{axis}] is {m1}, expected 0"),
            });
        }
    }

    for alpha in 0..2 {
        for beta in 0..2 {
            let m2: Frac = table
                .w
                .iter()
                .zip(&table.c)
                .map(|(w, c)| *w * Frac::from((c[alpha] * c[beta]) as i64))
                .sum();
            let expected = if alpha == beta { table.cs2 } else { zero };
            if m2 != expected {
                report.push(Violation {
                    identity: "second-moment",
                    detail: format!(
                        "sum w_i c_i[{alpha}] c_i[{beta}] is {m2}, expected {expected}"
                    ),
                });
            }
        }
    }

    for i in 0..table.q {
        let j = table.opposite[i];
        if j >= table.q
            || table.c[j][0] != -table.c[i][0]
            || table.c[j][1] != -table.c[i][1]
            || table.w[j] != table.w[i]
        {
            report.push(Violation {
                identity: "opposite-pairing",
                detail: format!("opposite[{i}] = {j} does not mirror c[{i}]"),
            });
        }
    }

    for (i, c) in table.c.iter().enumerate() {
        if c[0].abs() > 1 || c[1].abs() > 1 {
            report.push(Violation {
                identity: "speed-range",
                detail: format!("c[{i}] = ({}, {}) leaves the unit neighborhood", c[0], c[1]),
            });
        }
    }
    if table.vicinity != 1 {
        report.push(Violation {
            identity: "vicinity",
            detail: format!("vicinity is {}, expected 1", table.vicinity),
        });
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d2q9_matches_reference_listing() {
        let t = descriptor_data(LatticeSet::D2Q9);
        assert_eq!(t.q, 9);
        assert_eq!(t.d, 2);
        assert_eq!(t.c[1], [-1, 1]);
        assert_eq!(t.opposite, vec![0, 5, 6, 7, 8, 1, 2, 3, 4]);
        assert_eq!(t.w[0], Frac::new(4, 9));
        assert_eq!(t.w[1], Frac::new(1, 36));
        assert_eq!(t.w[2], Frac::new(1, 9));
        assert_eq!(t.cs2, Frac::new(1, 3));
        assert_eq!(t.vicinity, 1);
    }

    #[test]
    fn d2q5_constants() {
        let t = descriptor_data(LatticeSet::D2Q5);
        assert_eq!(t.c, vec![[0, 0], [-1, 0], [0, -1], [1, 0], [0, 1]]);
        assert_eq!(t.opposite, vec![0, 3, 4, 1, 2]);
        assert_eq!(t.w[0], Frac::new(1, 3));
        assert_eq!(t.w[4], Frac::new(1, 6));
        assert_eq!(t.cs2, Frac::new(1, 3));
    }

    #[test]
    fn both_tables_validate_clean() {
        for name in [LatticeSet::D2Q9, LatticeSet::D2Q5] {
            let report = validate_descriptor(&descriptor_data(name));
            assert!(report.is_empty(), "{name}: {report:?}");
        }
    }

    #[test]
    fn descriptor_data_is_pure() {
        assert_eq!(
            descriptor_data(LatticeSet::D2Q9),
            descriptor_data(LatticeSet::D2Q9)
        );
        assert_eq!(
            descriptor_data(LatticeSet::D2Q5),
            descriptor_data(LatticeSet::D2Q5)
        );
    }

    #[test]
    fn perturbed_weight_reports_weight_sum() {
        let mut t = descriptor_data(LatticeSet::D2Q9);
        t.w[0] = Frac::new(4001, 9000); // 4/9 + ~1e-4 in rational form
        let report = validate_descriptor(&t);
        assert!(report.iter().any(|v| v.identity == "weight-sum"));
    }

    #[test]
    fn broken_opposite_reports_pairing() {
        let mut t = descriptor_data(LatticeSet::D2Q9);
        t.opposite[1] = 1;
        let report = validate_descriptor(&t);
        assert!(report.iter().any(|v| v.identity == "opposite-pairing"));
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(LatticeSet::parse("D3Q19").is_err());
        assert_eq!(LatticeSet::parse("D2Q5").unwrap(), LatticeSet::D2Q5);
    }

    #[test]
    fn float_view_matches_rationals() {
        let t = descriptor_data(LatticeSet::D2Q9);
        let w = t.weights_f64();
        assert_eq!(w[0], 4.0 / 9.0);
        assert_eq!(w[1], 1.0 / 36.0);
        assert_eq!(t.cs2_f64(), 1.0 / 3.0);
        let total: f64 = w.iter().sum();
        assert!((total - 1.0).abs() <= 1e-15);
    }
}
