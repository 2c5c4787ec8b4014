use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};

use super::LinalgError;
use crate::scalar::{is_finite_cx, Real};

/// A dense square complex matrix with no symmetry constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralOperator<T: Real> {
    entries: DMatrix<Complex<T>>,
}

impl<T: Real> GeneralOperator<T> {
    pub fn new(entries: DMatrix<Complex<T>>) -> Result<Self, LinalgError> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(LinalgError::Shape {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_matrix(entries: DMatrix<Complex<T>>) -> Self {
        debug_assert!(entries.nrows() == entries.ncols() && entries.nrows() > 0);
        Self { entries }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        Self::from_matrix(DMatrix::from_fn(dim, dim, f))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix(DMatrix::from_element(dim, dim, Complex::zero()))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn diagonal(values: &[Complex<T>]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { values[i] } else { Complex::zero() })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex<T>> {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[(i, j)]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_matrix(self.entries.map(|z| z.conj()).transpose())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::from_matrix(self.entries.map(|z| z * s))
    }

    /// Sum of the diagonal entries.
    pub fn trace(&self) -> Complex<T> {
        (0..self.dim()).fold(Complex::zero(), |acc, i| acc + self.entries[(i, i)])
    }

    /// Entrywise (Schur) product.
    pub fn hadamard(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "hadamard: dimension mismatch");
        Self::from_matrix(self.entries.zip_map(&other.entries, |a, b| a * b))
    }

    pub fn max_abs_entry(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |s, z| s + z.norm_sqr())
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| is_finite_cx(*z))
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.dim());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    ///
    /// Independent of the spectral route; used to cross-check resolvents.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        let n = self.dim();
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n).entries;
        let scale = self.max_abs_entry().max(T::min_positive_value());
        for col in 0..n {
            let (piv, piv_abs) = (col..n)
                .map(|r| (r, a[(r, col)].norm()))
                .fold((col, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if piv_abs <= T::epsilon() * scale * T::lit(1e-3) {
                return Err(LinalgError::Singular);
            }
            if piv != col {
                a.swap_rows(piv, col);
                inv.swap_rows(piv, col);
            }
            let d = a[(col, col)].inv();
            for j in 0..n {
                a[(col, j)] *= d;
                inv[(col, j)] *= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let (arj, ivj) = (a[(col, j)], inv[(col, j)]);
                    a[(r, j)] -= factor * arj;
                    inv[(r, j)] -= factor * ivj;
                }
            }
        }
        Ok(Self::from_matrix(inv))
    }
}

impl<'a, T: Real> Add<&'a GeneralOperator<T>> for &'a GeneralOperator<T> {
    type Output = GeneralOperator<T>;
    fn add(self, rhs: &'a GeneralOperator<T>) -> GeneralOperator<T> {
        assert_eq!(self.dim(), rhs.dim(), "add: dimension mismatch");
        GeneralOperator::from_matrix(&self.entries + &rhs.entries)
    }
}

impl<'a, T: Real> Sub<&'a GeneralOperator<T>> for &'a GeneralOperator<T> {
    type Output = GeneralOperator<T>;
    fn sub(self, rhs: &'a GeneralOperator<T>) -> GeneralOperator<T> {
        assert_eq!(self.dim(), rhs.dim(), "sub: dimension mismatch");
        GeneralOperator::from_matrix(&self.entries - &rhs.entries)
    }
}

impl<'a, T: Real> Mul<&'a GeneralOperator<T>> for &'a GeneralOperator<T> {
    type Output = GeneralOperator<T>;
    fn mul(self, rhs: &'a GeneralOperator<T>) -> GeneralOperator<T> {
        assert_eq!(self.dim(), rhs.dim(), "mul: dimension mismatch");
        GeneralOperator::from_matrix(&self.entries * &rhs.entries)
    }
}

impl<T: Real> Neg for &GeneralOperator<T> {
    type Output = GeneralOperator<T>;
    fn neg(self) -> GeneralOperator<T> {
        GeneralOperator::from_matrix(self.entries.map(|z| -z))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Real> $tr<GeneralOperator<T>> for GeneralOperator<T> {
            type Output = GeneralOperator<T>;
            fn $m(self, rhs: GeneralOperator<T>) -> GeneralOperator<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
