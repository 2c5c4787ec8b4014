use num_complex::Complex;

use crate::linalg::{apply_function, GeneralOperator, HermitianOperator, LinalgError};
use crate::scalar::{cx, re, Real};

/// `gamma(x) = (x + i) / (x - i)`, a point of the unit circle other than 1.
pub fn cayley<T: Real>(x: T) -> Complex<T> {
    let i = cx(T::zero(), T::one());
    (re(x) + i) / (re(x) - i)
}

/// `gamma^{-1}(w) = i (w + 1) / (w - 1)`; real for `w` on the circle.
pub fn inverse_cayley<T: Real>(w: Complex<T>) -> Complex<T> {
    let i = cx(T::zero(), T::one());
    i * (w + T::one()) / (w - T::one())
}

/// `gamma(A)` through the functional calculus.
pub fn cayley_of_operator<T: Real>(a: &HermitianOperator<T>) -> GeneralOperator<T> {
    apply_function(cayley, a).expect("Cayley transform is finite on the real line")
}

/// `(A + iI)(A - iI)^{-1}` by direct inversion.
pub fn cayley_by_solve<T: Real>(a: &HermitianOperator<T>) -> Result<GeneralOperator<T>, LinalgError> {
    let n = a.dim();
    let i_n = GeneralOperator::identity(n).scale(cx(T::zero(), T::one()));
    let plus = a.as_operator() + &i_n;
    let minus = a.as_operator() - &i_n;
    Ok(&plus * &minus.inverse()?)
}
