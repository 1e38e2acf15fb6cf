#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Bäcklund and auto-Bäcklund transformations for `y y'' = F(z, y^2)`.
//!
//! The crate is organized along the chain of constructions:
//!
//! - [`jetcalc`]: truncated-Taylor jets, expressions, the Schwarzian derivative;
//! - [`chart`]: structure functions, Möbius maps and the map `Y^2 = y^2(f)/f'`;
//! - [`ermakov`] and [`emden`]: the Ermakov-Pinney and Emden-Fowler families;
//! - [`verify`]: grid residual certification and an independent Runge-Kutta check.

pub mod chart;
pub mod emden;
pub mod ermakov;
pub mod error;
pub mod jetcalc;
pub mod verify;

pub use error::{Error, Result};
