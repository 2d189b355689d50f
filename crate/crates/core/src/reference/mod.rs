//! Deterministic reference solvers.

pub mod dvm;
pub mod euler;

pub use dvm::{discrete_maxwellian, DvmState, VelocityGrid};
pub use euler::{euler_run, euler_step};
