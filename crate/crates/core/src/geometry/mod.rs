//! Picard-lattice bookkeeping for the resolution sequences, accessible
//! boundary points and the chart chains behind the holomorphy charts.

mod accessible;
mod lattice;

pub use accessible::*;
pub use lattice::*;
