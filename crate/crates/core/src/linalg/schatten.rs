use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;

use super::eigh::jacobi_eigh;
use super::{GeneralOperator, LinalgError};
use crate::scalar::Real;

/// Singular values in descending order.
///
/// Computed from the spectral decomposition of the Hermitian dilation
/// `[[0, T], [T*, 0]]`, whose eigenvalues are `±s_i`. This keeps the absolute
/// error of small singular values at `eps * ||T||` instead of the
/// `sqrt(eps) * ||T||` the Gram matrix `T*T` would give.
pub fn singular_values<T: Real>(t: &GeneralOperator<T>) -> Vec<T> {
    let n = t.dim();
    let e = t.entries();
    let dilation = DMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, false) => e[(i, j - n)],
        (false, true) => e[(j, i - n)].conj(),
        _ => Complex::zero(),
    });
    let (mut values, _) = jacobi_eigh(&dilation);
    values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    values.truncate(n);
    values.into_iter().map(|s| s.max(T::zero())).collect()
}

/// Schatten `p`-norm; `p = +inf` selects the operator norm.
pub fn schatten_norm<T: Real>(t: &GeneralOperator<T>, p: T) -> Result<T, LinalgError> {
    if p.is_nan() || p < T::one() {
        return Err(LinalgError::SchattenIndex {
            p: p.to_f64_lossy(),
        });
    }
    Ok(norm_of_singular_values(&singular_values(t), p))
}

/// `(sum s_i^p)^{1/p}` for already computed singular values.
pub fn norm_of_singular_values<T: Real>(s: &[T], p: T) -> T {
    let smax = s.iter().fold(T::zero(), |m, &x| m.max(x));
    if p.is_infinite() || smax.is_zero() {
        return smax;
    }
    if p == T::one() {
        return s.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    // Scaled by the largest value to avoid overflow for large p.
    let sum = s
        .iter()
        .fold(T::zero(), |acc, &x| acc + (x / smax).powf(p));
    smax * sum.powf(p.recip())
}

pub fn trace_norm<T: Real>(t: &GeneralOperator<T>) -> T {
    singular_values(t).iter().fold(T::zero(), |a, &x| a + x)
}

pub fn operator_norm<T: Real>(t: &GeneralOperator<T>) -> T {
    singular_values(t).first().copied().unwrap_or_else(T::zero)
}

/// Schatten norms for several exponents sharing one singular value computation.
pub fn schatten_norms<T: Real>(t: &GeneralOperator<T>, ps: &[T]) -> Result<Vec<T>, LinalgError> {
    if let Some(&bad) = ps.iter().find(|p| p.is_nan() || **p < T::one()) {
        return Err(LinalgError::SchattenIndex {
            p: bad.to_f64_lossy(),
        });
    }
    let s = singular_values(t);
    Ok(ps.iter().map(|&p| norm_of_singular_values(&s, p)).collect())
}
