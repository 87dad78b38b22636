//! Exact and Monte Carlo statistics for how linear subspaces of projective
//! space over finite fields meet a fixed variety, together with the
//! geometric predicates those statistics rely on.

pub mod budget;
pub mod error;
pub mod gf;
pub mod linsub;
pub mod polynomial;
pub mod projspace;
pub mod report;
pub mod stats;
pub mod tangency;
pub mod variety;

pub use budget::Budget;
pub use error::{Error, ErrorKind, Result};
pub use gf::{Elem, Field};
pub use projspace::ProjPoint;
