//! Exact symmetry analysis of the short pulse equation
//! `u_xt = a u + (b/3) (u^3)_xx`.

pub mod claims;
pub mod engine;
pub mod expoly;
pub mod expr;
pub mod fields;
pub mod group;
pub mod jet;
pub mod lie;
