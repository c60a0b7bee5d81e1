//! Numerical integration with chart switching, first-integral monitoring
//! and numeric Bäcklund checks.

mod field;
mod integrate;

pub use field::{FloatPoly, FloatRational};
pub use integrate::*;
