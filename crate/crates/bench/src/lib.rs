//! Fixtures shared by the benches.

use epi_core::characters::MultChar;
use epi_core::gl_side::{EpipelagicDatum, GlError};
use epi_core::LocalFieldDesc;

/// `(name, p, f, r)` for the benchmarked parameter computations.
pub const SHAPES: [(&str, u32, u32, u32); 5] = [
    ("p2r1", 2, 1, 1),
    ("p3r1", 3, 1, 1),
    ("p2f2r1", 2, 2, 1),
    ("p5r1", 5, 1, 1),
    ("p2r2", 2, 1, 2),
];

/// The datum with `det alpha = pi^{-1}`, trivial `omega` and eps index 0.
pub fn unit_datum(p: u32, f: u32, r: u32) -> Result<EpipelagicDatum, GlError> {
    let base = LocalFieldDesc::base(p, f)?;
    let one = base.residue().one();
    EpipelagicDatum::new(&base, p.pow(r), one, MultChar::trivial(&base), 0)
}
