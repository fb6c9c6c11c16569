//! Equal-power precoders along the dominant right singular directions of a channel estimate.

use num_complex::Complex;

use super::RateError;
use crate::linalg::{hermitian_evd, orthonormal_complement, ComplexMatrix, ThinQr, RANK_TOL};
use crate::Real;

/// Keeps eigenvectors with significant eigenvalues, pads with a complement, scales by `1/√L`.
fn finish<T: Real>(values: &[T], vectors: &ComplexMatrix<T>, streams: usize) -> Result<ComplexMatrix<T>, RateError> {
    let n = vectors.rows();
    if streams > n {
        return Err(RateError::Dimension(format!(
            "{streams} streams exceed {n} transmit antennas"
        )));
    }
    let top = values.first().copied().unwrap_or_else(T::zero);
    let keep = if top > T::zero() {
        values
            .iter()
            .take(streams)
            .filter(|&&v| v > T::lit(RANK_TOL) * top)
            .count()
    } else {
        0
    };
    let scale = Complex::new(T::one() / T::lit(streams as f64).sqrt(), T::zero());
    let directions = match keep {
        // nothing to align with: Gram-Schmidt over an empty set is the standard basis
        0 => ComplexMatrix::identity(n).columns(0, streams),
        k if k == streams => vectors.columns(0, streams),
        k => {
            let kept = vectors.columns(0, k);
            let fill = orthonormal_complement(&kept, streams - k)?;
            ComplexMatrix::hstack(&[&kept, &fill])?
        }
    };
    Ok(directions.scale(scale))
}

/// `F = E T_L / √L` from the eigendecomposition of `ĤᴴĤ` (N × N).
pub fn data_precoder<T: Real>(estimate: &ComplexMatrix<T>, streams: usize) -> Result<ComplexMatrix<T>, RateError> {
    let evd = hermitian_evd(&estimate.gram().hermitian_part())?;
    finish(&evd.values, &evd.vectors, streams)
}

/// Same precoder for `Ĥ = B diag(ĝ) Uᴴ` using a thin QR `U = QR`, so only an r × r core is
/// decomposed: `ĤᴴĤ = Q (R D* BᴴB D Rᴴ) Qᴴ`.
pub fn factored_precoder<T: Real>(
    bs_gram: &ComplexMatrix<T>,
    ue_qr: &ThinQr<T>,
    gains: &[Complex<T>],
    streams: usize,
) -> Result<ComplexMatrix<T>, RateError> {
    let conj: Vec<_> = gains.iter().map(|g| g.conj()).collect();
    let inner = bs_gram.scale_rows(&conj)?.scale_cols(gains)?;
    let core = ue_qr.r.matmul(&inner)?.mul_adjoint(&ue_qr.r)?.hermitian_part();
    let evd = hermitian_evd(&core)?;
    let lifted = ue_qr.q.matmul(&evd.vectors)?;
    if lifted.rows() < streams {
        return Err(RateError::Dimension(format!(
            "{streams} streams exceed {} transmit antennas",
            lifted.rows()
        )));
    }
    finish(&evd.values, &lifted, streams)
}

/// `R_x = (ρ_d / T_d) F Fᴴ`.
pub fn transmit_covariance<T: Real>(precoder: &ComplexMatrix<T>, symbol_energy: T) -> ComplexMatrix<T> {
    precoder
        .mul_adjoint(precoder)
        .expect("conformable")
        .scale_real(symbol_energy)
}
