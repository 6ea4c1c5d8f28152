//! Linear probe response of a two-cavity magnomechanical system.
//!
//! Cavity A holds two YIG spheres (magnon modes `n1`, `n2`; `n2` is coupled to
//! a phonon `p` and driven by a control field), cavity B holds an atomic
//! ensemble `u`, and the cavities exchange photons at rate `f`. This crate
//! computes the driven steady state, the probe response in closed form and by
//! a direct 12×12 solve, and the spectral observables built on them.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod error;
mod linalg;
pub mod oracle;
pub mod params;
pub mod response;
pub mod steady;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use params::{CouplingMode, SystemParams};
pub use steady::SteadyState;

/// 2π.
pub const TAU: f64 = core::f64::consts::TAU;
