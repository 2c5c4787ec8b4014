use super::kernel::Kernel;
use super::DoiError;
use crate::linalg::{GeneralOperator, HermitianOperator};
use crate::scalar::Real;

/// `V_A (Phi o (V_A* T V_B)) V_B*` with `Phi_ij = K(lambda_i, mu_j)`.
pub fn doi_apply<T: Real>(
    kernel: &Kernel<T>,
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    t: &GeneralOperator<T>,
) -> Result<GeneralOperator<T>, DoiError> {
    let n = a.dim();
    if b.dim() != n || t.dim() != n {
        return Err(DoiError::DimensionMismatch {
            left: n,
            right: if b.dim() != n { b.dim() } else { t.dim() },
        });
    }
    let phi = kernel_matrix(kernel, a.eigenvalues(), b.eigenvalues())?;
    let va = a.spectral().eigenvectors();
    let vb = b.spectral().eigenvectors();
    let inner = &(&va.adjoint() * t) * vb;
    let weighted = inner.hadamard(&phi);
    Ok(&(va * &weighted) * &vb.adjoint())
}

/// `[K(lambda_i, mu_j)]_{ij}`.
pub fn kernel_matrix<T: Real>(kernel: &Kernel<T>, lambdas: &[T], mus: &[T]) -> Result<GeneralOperator<T>, DoiError> {
    let n = lambdas.len();
    if mus.len() != n {
        return Err(DoiError::DimensionMismatch { left: n, right: mus.len() });
    }
    let mut values = Vec::with_capacity(n * n);
    for &l in lambdas {
        for &m in mus {
            values.push(kernel.evaluate(l, m)?);
        }
    }
    Ok(GeneralOperator::from_fn(n, |i, j| values[i * n + j]))
}
