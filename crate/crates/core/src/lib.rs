//! Moment guided Monte Carlo for the one-dimensional BGK equation.
//!
//! A particle ensemble is relaxed toward local equilibrium with the BGK
//! operator while a set of deterministic moment equations, corrected by the
//! non-equilibrium fluxes measured on the particles, is advanced alongside.
//! After every step the particle moments are matched to the deterministic
//! ones.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fluid;
pub mod grid;
pub mod harness;
pub mod matching;
pub mod particles;
pub mod reference;
pub mod rng;
pub mod state;

pub use error::{Error, Result};
pub use grid::{Boundary, Grid1D};
pub use state::{Conserved, MacroField, Primitive};
