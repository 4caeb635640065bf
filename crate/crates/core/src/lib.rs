//! Finite-volume simulation and functional diagnostics for the quasilinear
//! fully parabolic Keller–Segel system on an interval and on the unit ball
//! under radial symmetry.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod fv;
pub mod harness;
pub mod initdata;
pub mod kinetics;
pub mod quadrature;
pub mod solver1d;
pub mod solver_radial;

pub use error::{KsError, Result};
