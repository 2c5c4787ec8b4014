//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.
//!
//! Each rotation removes the phase of the pivot entry, then applies the real
//! symmetric Jacobi rotation to the resulting 2x2 block. Eigenvalues come out
//! with absolute accuracy of order `eps * ||A||`.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Returns (unsorted eigenvalues, eigenvector columns).
pub(crate) fn jacobi_eigh<T: Real>(input: &DMatrix<Complex<T>>) -> (Vec<T>, DMatrix<Complex<T>>) {
    let n = input.nrows();
    let mut a = input.clone();
    let mut v = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex::<T>::one()
        } else {
            Complex::zero()
        }
    });
    for i in 0..n {
        a[(i, i)] = Complex::new(a[(i, i)].re, T::zero());
    }
    if n == 1 {
        return (vec![a[(0, 0)].re], v);
    }

    let frob: T = a.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
    let stop = frob * T::epsilon() * T::epsilon() * T::lit(0.25);

    for _sweep in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off <= stop || off.is_zero() {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag.is_zero() {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Entries negligible against both diagonals are zeroed outright.
                let tiny = T::epsilon() * T::lit(1e-2);
                if mag <= tiny * app.abs() && mag <= tiny * aqq.abs() {
                    a[(p, q)] = Complex::zero();
                    a[(q, p)] = Complex::zero();
                    continue;
                }
                let phase = apq / mag;
                let tau = (aqq - app) / (mag + mag);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let e_minus = phase.conj(); // e^{-i alpha}
                let e_plus = phase; // e^{+i alpha}
                let cc = Complex::new(c, T::zero());
                let sc = Complex::new(s, T::zero());

                // A <- A J, J = [[c, s], [-s e^{-ia}, c e^{-ia}]]
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = cc * akp - sc * e_minus * akq;
                    a[(k, q)] = sc * akp + cc * e_minus * akq;
                }
                // A <- J^* A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = cc * apk - sc * e_plus * aqk;
                    a[(q, k)] = sc * apk + cc * e_plus * aqk;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = Complex::new(app - t * mag, T::zero());
                a[(q, q)] = Complex::new(aqq + t * mag, T::zero());

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = cc * vkp - sc * e_minus * vkq;
                    v[(k, q)] = sc * vkp + cc * e_minus * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    (values, v)
}
