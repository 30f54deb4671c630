//! Pseudo-spectral laboratory for generalized KdV equations
//! `U_t + nu U_xxx + nu F(U) U_x = 0` with polynomial `F` on a periodic box.
//!
//! The crate provides the spectral discretization ([`spectral`]), the
//! equation family ([`models`]), an integrating-factor RK4 stepper
//! ([`integrator`]), exact soliton data ([`initial_data`]), scalar monitors
//! and series analysis ([`diagnostics`]), predicted lifespans and proximity
//! windows ([`bounds`]), and configured experiments with CSV/SVG artifacts
//! ([`experiments`]).

pub mod bounds;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod initial_data;
pub mod integrator;
pub mod models;
pub mod spectral;

pub use error::{Error, Result};
