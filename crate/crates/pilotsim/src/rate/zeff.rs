//! Covariance of the effective noise: receiver noise plus residual estimation error.

use num_complex::Complex;

use super::RateError;
use crate::linalg::{hadamard, ComplexMatrix};
use crate::pilot::ErrorCovariance;
use crate::Real;

/// `σ_z² I + Σ_k E[H̃_k R_x H̃_kᴴ]` from dense MN × MN error covariances.
///
/// With column-major vectorization `E[H̃ A H̃ᴴ] = Σ_{i,j} A[i,j] R̃_{ij}` where `R̃_{ij}` is the
/// M × M block in block-row `i` and block-column `j`.
pub fn zeff_covariance<T: Real>(
    error_covs: &[ComplexMatrix<T>],
    precoders: &[ComplexMatrix<T>],
    symbol_energy: T,
    sigma_z_sq: T,
) -> Result<ComplexMatrix<T>, RateError> {
    if error_covs.len() != precoders.len() || error_covs.is_empty() {
        return Err(RateError::Dimension(format!(
            "{} error covariances for {} precoders",
            error_covs.len(),
            precoders.len()
        )));
    }
    let n = precoders[0].rows();
    let dim = error_covs[0].rows();
    if !dim.is_multiple_of(n) {
        return Err(RateError::Dimension(format!(
            "error covariance of size {dim} is not M*{n}"
        )));
    }
    let m = dim / n;
    let mut out = ComplexMatrix::identity(m).scale_real(sigma_z_sq);
    for (cov, f) in error_covs.iter().zip(precoders) {
        if cov.shape() != (m * n, m * n) || f.rows() != n {
            return Err(RateError::Dimension("error covariance and precoder disagree".into()));
        }
        let tx = f.mul_adjoint(f)?.scale_real(symbol_energy);
        for j in 0..n {
            for i in 0..n {
                let w = tx[(i, j)];
                if w == Complex::new(T::zero(), T::zero()) {
                    continue;
                }
                out.axpy(w, &cov.block(i * m, j * m, m, m))?;
            }
        }
    }
    Ok(out.hermitian_part())
}

/// Gain-domain interference core `Ψ = Φ ∘ (Uᴴ R_x U)` so that `E[H̃ R_x H̃ᴴ] = B Ψ Bᴴ`.
pub fn error_interference<T: Real>(
    error: &ErrorCovariance<T>,
    precoder: &ComplexMatrix<T>,
    symbol_energy: T,
) -> Result<ComplexMatrix<T>, RateError> {
    let projected = error.ue_steering().adjoint_mul(precoder)?;
    let tx = projected.mul_adjoint(&projected)?.scale_real(symbol_energy);
    Ok(hadamard(error.core(), &tx)?)
}

/// Factored evaluation of [`zeff_covariance`]: `σ_z² I + Σ_k B_k Ψ_k B_kᴴ`.
pub fn zeff_covariance_factored<T: Real>(
    errors: &[ErrorCovariance<T>],
    precoders: &[ComplexMatrix<T>],
    symbol_energy: T,
    sigma_z_sq: T,
) -> Result<ComplexMatrix<T>, RateError> {
    if errors.len() != precoders.len() || errors.is_empty() {
        return Err(RateError::Dimension(format!(
            "{} errors for {} precoders",
            errors.len(),
            precoders.len()
        )));
    }
    let m = errors[0].bs_steering().rows();
    let mut out = ComplexMatrix::identity(m).scale_real(sigma_z_sq);
    for (e, f) in errors.iter().zip(precoders) {
        let psi = error_interference(e, f, symbol_energy)?;
        let b = e.bs_steering();
        out.axpy(Complex::new(T::one(), T::zero()), &b.matmul(&psi)?.mul_adjoint(b)?)?;
    }
    Ok(out.hermitian_part())
}
