//! Exact computations with two-point affine enveloping algebras at the
//! critical level: Laurent rings in `t` and `s = t - a`, Sugawara operators,
//! oper coordinates and Weyl-module actions, all at explicit truncation.

pub mod env;
pub mod liealg;
pub mod opers;
pub mod scalar;
pub mod series;
mod text;
pub mod verify;
pub mod weyl;
