//! Exact production matrices and certified growth bounds for crossing-free
//! geometric graphs on convex point sets and on generalized double zig-zag
//! chains.
//!
//! - [`linalg`]: exact rational matrices and degree vectors.
//! - [`production`]: the matrices `C`, `R`, `S`, `L`, `P`, `P'` and their products.
//! - [`oracle`]: brute-force enumeration on small configurations.
//! - [`perron`]: certified Perron-root lower bounds.
//! - [`inner`]: the entropy bound for the inner part.

pub mod decimal;
pub mod error;
pub mod inner;
pub mod linalg;
pub mod oracle;
pub mod perron;
pub mod production;

pub use decimal::FloorDecimal;
pub use error::{Error, Result};
pub use linalg::{DegreeVector, ExactMatrix, Rational};
