//! Exact computer algebra for polynomial solutions of `η^{ab}∂_a∂_b φ = 0`.

pub mod error;
pub mod io;
pub mod linalg;
pub mod metric;
pub mod poly;
pub mod projector;
pub mod rmatrix;
pub mod scalars;
pub mod states;
pub mod weyl;
pub mod zalgebra;

pub use error::{Error, Result};
pub use metric::Metric;
pub use poly::{MultiIndex, Poly};
pub use scalars::{Coeff, Rational, RationalFn};
pub use weyl::WeylElement;
