//! Dense and sparse numeric primitives.
//!
//! Everything here is `f64` and single-threaded; results are bitwise
//! reproducible for a given input regardless of the host.

mod activation;
mod dense;
mod rng;
mod sparse;

pub use activation::{log1mexp, log_sigmoid, sigmoid, softplus, Activation};
pub use dense::DenseMatrix;
pub(crate) use dense::dot as dense_dot;
pub use rng::RngStream;
pub use sparse::CsrMatrix;
