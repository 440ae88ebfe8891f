//! Sparse dyadic function-space toolkit: grid functions on the unit cube,
//! weighted dyadic maximal operators and Riesz potentials, sparse families
//! with constructive domination, the SR / RMT / Morrey / Lorentz norm zoo,
//! Littlewood-Paley and sequence-space machinery, and the sparse
//! compactness indices with certified brackets.
//!
//! Everything is deterministic: fixed summation orders, seeded generators,
//! and order-preserving parallel maps (the `parallel` feature, on by
//! default, switches the maps to rayon without changing a single bit of
//! output).

pub mod corpus;
pub mod error;
pub mod grid;
pub mod harness;
pub mod maximal;
pub mod norms;
pub mod numeric;
pub mod par;
pub mod seq;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{build_table, DyadicCube, GridFunction, IntegralTable};
pub use numeric::CertInterval;
pub use sparse::{SparseFamily, SRParams};
