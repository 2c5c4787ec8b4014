//! Seeded random operators.
//!
//! Generator version `chacha8-cn-v1`: ChaCha8 seeded with `seed ^ stream`;
//! complex standard normal entries `(x + iy) / sqrt(2)` with `x, y ~ N(0, 1)`;
//! Hermitian samples are `(M + M*) / 2`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{GeneralOperator, HermitianOperator};
use crate::scalar::{re, Real};

pub const GENERATOR_VERSION: &str = "chacha8-cn-v1";

/// Per-trial generator: trials are reproducible independently of run order.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stream)
}

pub fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::lit(x * s), T::lit(y * s))
}

pub fn random_general<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> GeneralOperator<T> {
    let mut vals = Vec::with_capacity(dim * dim);
    for _ in 0..dim * dim {
        vals.push(complex_normal(rng));
    }
    GeneralOperator::from_fn(dim, |i, j| vals[i * dim + j])
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator<T> {
    let m = random_general::<T, R>(dim, rng);
    let h = (&m + &m.adjoint()).scale(re(T::lit(0.5)));
    HermitianOperator::from_operator(&h).expect("symmetrized sample is Hermitian")
}

pub fn random_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex<T>> {
    (0..dim).map(|_| complex_normal(rng)).collect()
}

fn normalize<T: Real>(v: &mut [Complex<T>]) {
    let n = v.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
}

/// Unitary from modified Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> GeneralOperator<T> {
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = random_vector::<T, R>(dim, rng);
        for _pass in 0..2 {
            for c in &cols {
                let proj = c
                    .iter()
                    .zip(&v)
                    .fold(Complex::new(T::zero(), T::zero()), |s, (a, b)| s + a.conj() * b);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let n = v.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
        if n > T::lit(1e-6) {
            normalize(&mut v);
            cols.push(v);
        }
    }
    GeneralOperator::from_fn(dim, |i, j| cols[j][i])
}

/// `sum_k s_k u_k u_k*` with unit vectors `u_k` and `s_k ~ scale * N(0, 1)`.
pub fn random_low_rank_hermitian<T: Real, R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    scale: T,
    rng: &mut R,
) -> HermitianOperator<T> {
    let mut acc = GeneralOperator::zeros(dim);
    for _ in 0..rank {
        let mut u = random_vector::<T, R>(dim, rng);
        normalize(&mut u);
        let s: f64 = rng.sample(StandardNormal);
        let s = T::lit(s) * scale;
        let outer = GeneralOperator::from_fn(dim, |i, j| u[i] * u[j].conj() * s);
        acc = &acc + &outer;
    }
    HermitianOperator::from_operator(&acc).expect("sum of rank-one projections is Hermitian")
}

/// Random Hermitian shifted so its smallest eigenvalue is at least `floor`.
/// Returns the operator and the shift applied.
pub fn random_positive<T: Real, R: Rng + ?Sized>(
    dim: usize,
    floor: T,
    rng: &mut R,
) -> (HermitianOperator<T>, T) {
    let a = random_hermitian::<T, R>(dim, rng);
    let lo = a.eigenvalues()[0];
    let shift = (floor - lo).max(T::zero());
    (a.shift(shift), shift)
}
