//! Exact finite-ring linear algebra for vertex lattices in split hermitian
//! spaces over ramified quadratic extensions of Q_p, the Deligne-Lusztig type
//! varieties attached to them, and the affine charts of their strata.

pub mod chainring;
pub mod charts;
pub mod counting;
pub mod dlstrata;
pub mod error;
pub mod formspace;
pub mod gf;
pub mod howell;
pub mod lattices;
pub mod linalg;
pub mod report;
pub mod rzpoints;
pub mod suites;

pub use error::{Error, Result};
