//! Exact verification engine and integrator for polynomial Hamiltonian
//! systems with affine Weyl group symmetry of types E6, E7, E8 (and the
//! sixth Painlevé system in a polynomial gauge).

mod data;
pub mod error;
pub mod exactpoly;
pub mod flow;
pub mod geometry;
pub mod report;
pub mod sampling;
pub mod systems;
pub mod transforms;
pub mod weyl;

pub use data::data_dir;
pub use error::{Error, Result};
