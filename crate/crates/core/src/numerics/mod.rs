//! Small dense complex linear algebra and discrete optimal transport.
//!
//! Everything here is sized for the problems the checkers produce (a few
//! hundred rows at most), so the kernels favour accuracy and simplicity.

mod eigen;
mod lstsq;
mod matrix;
mod svd;
pub mod transport;

pub use eigen::{complex_eigenvalues, hermitian_eigen, HermitianEigen};
pub use lstsq::least_squares;
pub use matrix::CMatrix;
pub use svd::{sigma_min_via_gram, subspace_svd, Svd};
pub use transport::{min_cost_transport, TransportPlan};
