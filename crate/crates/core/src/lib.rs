//! Bases of steerable convolution kernels for SO(2), O(2), SO(3), O(3) and the
//! proper orthochronous Lorentz group.
//!
//! The pipeline is: pick a base point on an orbit, solve the stabilizer
//! constraint there (numerically in [`solver`], in closed form in
//! [`analytic`]), then extend over the orbit by steering ([`steering`]).
//! [`verify`] cross-checks the two routes and [`export`] writes sampled bases
//! to disk.

pub mod analytic;
pub mod error;
pub mod export;
pub mod groups;
pub mod irreps;
pub mod numerics;
pub mod solver;
pub mod steering;
pub mod verify;

pub use error::{Error, Result};
