//! Equal-characteristic local fields `F_q((t))` and their tame towers.

mod elem;
mod fq;
mod norm;
mod series;
mod tower;

pub use elem::{LFElem, UnitQuotient};
pub use fq::{Embedding, Fe, FqField, MAX_Q};
pub use norm::{conjugate_norm_trace, embeds, norm_trace, series_det, unit_quotients};
pub use series::Series;
pub use tower::{make_field, LocalFieldDesc, Step};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("degree {0} must be positive")]
    BadDegree(u32),
    #[error("F_{p}^{f} exceeds the log-table limit")]
    FieldTooLarge { p: u32, f: u32 },
    #[error("F_{}^{} is not a subfield of F_{}^{}", small.0, small.1, big.0, big.1)]
    NotSubfield { small: (u32, u32), big: (u32, u32) },
    #[error("cannot parse residue element {0:?}")]
    Parse(String),
    #[error("wild step requested: e = {e} is divisible by p = {p}")]
    WildStep { e: u32, p: u32 },
    #[error("tower description is empty")]
    EmptyTower,
    #[error("tower must start with exactly one base step")]
    BaseFirst,
    #[error("unit must be a nonzero root of unity")]
    NotRootOfUnity,
    #[error("field is not an ancestor in the same tower")]
    NotAncestor,
    #[error("insufficient precision: input must be known modulo p^{needed}")]
    InsufficientPrecision { needed: i64 },
    #[error("level must be positive, got {0}")]
    NonPositiveLevel(i64),
    #[error("element is not in U^{0}")]
    NotInUnitGroup(i64),
    #[error("element is not a unit to known precision")]
    NotInvertible,
    #[error("operands live in different fields")]
    FieldMismatch,
}
