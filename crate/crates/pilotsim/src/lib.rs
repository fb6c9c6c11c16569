//! Uplink pilot transmission schemes for multiuser MIMO cluster channels.
//!
//! Three training schemes are modelled: non-precoded/uncombined (`NPuC`),
//! precoded/uncombined (`PuC`) and precoded/combined (`PC`). The crate provides MMSE channel
//! estimation with closed-form error covariances and NMSE bounds, a data-phase sum-rate Monte
//! Carlo, and seeded sweep runners with CSV output.

// `!(x > 0)` style checks are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod experiments;
pub mod linalg;
pub mod pilot;
pub mod random;
pub mod rate;
mod scalar;

pub use scalar::Real;

use num_complex::Complex;

/// Double precision complex scalar.
pub type C64 = Complex<f64>;
/// Double precision complex matrix.
pub type CMatrix = linalg::ComplexMatrix<f64>;
/// Double precision channel statistics.
pub type Stats = channel::ChannelStats<f64>;
