//! Dense complex matrix kernels: structured products, Hermitian eigensolver and PD solves.

mod eigen;
mod error;
mod lowrank;
mod matrix;
mod products;
mod qr;
mod solve;

pub(crate) use eigen::shifted_identity;
pub use eigen::{condition_number, extreme_eigenvalues, hermitian_evd, HermitianEvd, HERMITIAN_TOL, RANK_TOL};
pub use error::LinalgError;
pub use lowrank::LowRankPsd;
pub use matrix::ComplexMatrix;
pub use products::{hadamard, khatri_rao, kronecker, unvec, vec};
pub use qr::{orthonormal_complement, thin_qr, ThinQr};
pub use solve::{log_det, solve_hermitian_pd, trace_inverse_bounds, Cholesky};
