//! Explicit parameter data for epipelagic representations of `GL_n` over
//! equal-characteristic local fields.

pub mod field_tower;
pub mod gl_side;
pub mod characters;
pub mod ramification;
pub mod galois_side;
pub mod strata_lab;
pub mod suite;
pub mod wire;

pub use field_tower::{
    make_field, norm_trace, unit_quotients, FieldError, Fe, FqField, LFElem, LocalFieldDesc,
    Series, Step,
};
