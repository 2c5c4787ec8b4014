use std::cmp::Ordering;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex;

use super::eigh::jacobi_eigh;
use super::{GeneralOperator, LinalgError};
use crate::scalar::{cpowi, is_finite_cx, re, Real};

/// Eigenvalues in ascending order with orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real> {
    eigenvalues: Vec<T>,
    eigenvectors: GeneralOperator<T>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Columns are the eigenvectors, in the order of [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &GeneralOperator<T> {
        &self.eigenvectors
    }

    /// `V diag(values) V*`.
    pub fn synthesize(&self, values: &[Complex<T>]) -> GeneralOperator<T> {
        let v = self.eigenvectors.entries();
        let n = v.nrows();
        let mut scaled = v.clone();
        for (j, &d) in values.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= d;
            }
        }
        let vh = v.map(|z| z.conj()).transpose();
        GeneralOperator::from_matrix(scaled * vh)
    }

    pub fn spread(&self) -> T {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(&lo), Some(&hi)) => hi - lo,
            _ => T::zero(),
        }
    }
}

/// A finite-dimensional self-adjoint operator with a lazily computed,
/// cached spectral decomposition.
#[derive(Debug)]
pub struct HermitianOperator<T: Real> {
    matrix: GeneralOperator<T>,
    decomposition: OnceLock<SpectralDecomposition<T>>,
}

impl<T: Real> Clone for HermitianOperator<T> {
    fn clone(&self) -> Self {
        let decomposition = OnceLock::new();
        if let Some(d) = self.decomposition.get() {
            let _ = decomposition.set(d.clone());
        }
        Self {
            matrix: self.matrix.clone(),
            decomposition,
        }
    }
}

impl<T: Real> HermitianOperator<T> {
    /// Accepts `entries` when `max |a_ij - conj(a_ji)| <= 1e-12 (1 + max |a_ij|)`,
    /// then stores the exactly symmetrized matrix `(M + M*) / 2`.
    pub fn new(entries: DMatrix<Complex<T>>) -> Result<Self, LinalgError> {
        let m = GeneralOperator::new(entries)?;
        Self::from_operator(&m)
    }

    pub fn from_operator(m: &GeneralOperator<T>) -> Result<Self, LinalgError> {
        let defect = m.hermitian_defect();
        let bound = T::tol(1e-12) * (T::one() + m.max_abs_entry());
        if !(defect <= bound) {
            return Err(LinalgError::NotHermitian {
                defect: defect.to_f64_lossy(),
                bound: bound.to_f64_lossy(),
            });
        }
        let half = T::lit(0.5);
        let sym = (m + &m.adjoint()).scale(re(half));
        Ok(Self {
            matrix: sym,
            decomposition: OnceLock::new(),
        })
    }

    pub fn from_real_diagonal(values: &[T]) -> Self {
        let d: Vec<_> = values.iter().map(|&x| re(x)).collect();
        Self {
            matrix: GeneralOperator::diagonal(&d),
            decomposition: OnceLock::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![T::one(); dim])
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn as_operator(&self) -> &GeneralOperator<T> {
        &self.matrix
    }

    pub fn to_operator(&self) -> GeneralOperator<T> {
        self.matrix.clone()
    }

    /// Cached spectral decomposition (see [`eigh`]).
    pub fn spectral(&self) -> &SpectralDecomposition<T> {
        self.decomposition.get_or_init(|| decompose(&self.matrix))
    }

    pub fn eigenvalues(&self) -> &[T] {
        self.spectral().eigenvalues()
    }

    /// `self + s * other`, Hermitian by construction.
    pub fn add_scaled(&self, s: T, other: &Self) -> Self {
        let m = &self.matrix + &other.matrix.scale(re(s));
        Self {
            matrix: m,
            decomposition: OnceLock::new(),
        }
    }

    pub fn shift(&self, s: T) -> Self {
        self.add_scaled(s, &Self::identity(self.dim()))
    }

    /// Conjugation `U A U*` by a unitary.
    pub fn conjugate_by(&self, u: &GeneralOperator<T>) -> Result<Self, LinalgError> {
        let m = &(u * &self.matrix) * &u.adjoint();
        Self::from_operator(&m)
    }

    /// `f(A) = V diag(f(lambda_i)) V*`.
    pub fn apply_function<F>(&self, f: F) -> Result<GeneralOperator<T>, LinalgError>
    where
        F: Fn(T) -> Complex<T>,
    {
        apply_function(f, self)
    }

    /// Functional calculus for a real-valued `f`; the result is Hermitian.
    pub fn apply_real_function<F>(&self, f: F) -> Result<HermitianOperator<T>, LinalgError>
    where
        F: Fn(T) -> T,
    {
        let m = apply_function(|x| re(f(x)), self)?;
        let half = T::lit(0.5);
        Ok(Self {
            matrix: (&m + &m.adjoint()).scale(re(half)),
            decomposition: OnceLock::new(),
        })
    }
}

/// Spectral decomposition with deterministic ordering: ascending eigenvalues;
/// eigenvectors phase-normalized so their first non-negligible component is
/// real positive; within numerically tied eigenvalues columns are ordered
/// lexicographically by their normalized components.
pub fn eigh<T: Real>(a: &HermitianOperator<T>) -> SpectralDecomposition<T> {
    a.spectral().clone()
}

fn decompose<T: Real>(m: &GeneralOperator<T>) -> SpectralDecomposition<T> {
    let (values, mut vecs) = jacobi_eigh(m.entries());
    let n = values.len();
    for j in 0..n {
        let col_max = (0..n).fold(T::zero(), |acc, i| acc.max(vecs[(i, j)].norm()));
        let cut = col_max * T::tol(1e-8);
        if let Some(i) = (0..n).find(|&i| vecs[(i, j)].norm() > cut) {
            let z = vecs[(i, j)];
            let phase = (z / z.norm()).conj();
            for k in 0..n {
                vecs[(k, j)] *= phase;
            }
            vecs[(i, j)] = re(vecs[(i, j)].re);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[x].partial_cmp(&values[y]).unwrap_or(Ordering::Equal));
    let spread = match (order.first(), order.last()) {
        (Some(&lo), Some(&hi)) => values[hi] - values[lo],
        _ => T::zero(),
    };
    let tie = T::tol(1e-12) * (T::one() + spread);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] - values[order[end - 1]] <= tie {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by(|&x, &y| lexicographic(&vecs, x, y));
        }
        start = end;
    }
    // Tied eigenvalues keep ascending order; only their vectors are permuted.
    let mut eigenvalues: Vec<T> = order.iter().map(|&k| values[k]).collect();
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors: GeneralOperator::from_matrix(eigenvectors),
    }
}

fn lexicographic<T: Real>(v: &DMatrix<Complex<T>>, x: usize, y: usize) -> Ordering {
    for i in 0..v.nrows() {
        let (a, b) = (v[(i, x)], v[(i, y)]);
        // Larger components first.
        match b.re.partial_cmp(&a.re).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            o => return o,
        }
        match b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

/// `V diag(f(lambda_i)) V*`.
pub fn apply_function<T, F>(f: F, a: &HermitianOperator<T>) -> Result<GeneralOperator<T>, LinalgError>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    let sd = a.spectral();
    let mut values = Vec::with_capacity(sd.eigenvalues.len());
    for &lambda in &sd.eigenvalues {
        let v = f(lambda);
        if !is_finite_cx(v) {
            return Err(LinalgError::FunctionNotFinite {
                eigenvalue: lambda.to_f64_lossy(),
            });
        }
        values.push(v);
    }
    Ok(sd.synthesize(&values))
}

/// `(A - z I)^{-m}` through the spectral decomposition of `A`.
pub fn resolvent_power<T: Real>(
    a: &HermitianOperator<T>,
    z: Complex<T>,
    m: u32,
) -> Result<GeneralOperator<T>, LinalgError> {
    let sd = a.spectral();
    let near = T::tol(1e-12);
    let mut values = Vec::with_capacity(sd.eigenvalues.len());
    for &lambda in &sd.eigenvalues {
        let d = re(lambda) - z;
        if d.norm() <= near {
            return Err(LinalgError::NearSingular {
                eigenvalue: lambda.to_f64_lossy(),
                re: z.re.to_f64_lossy(),
                im: z.im.to_f64_lossy(),
            });
        }
        values.push(cpowi(d, -(m as i32)));
    }
    Ok(sd.synthesize(&values))
}

/// `(A - zI)^{-m} - (B - zI)^{-m}`: first argument minus second, everywhere.
pub fn resolvent_power_diff<T: Real>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    z: Complex<T>,
    m: u32,
) -> Result<GeneralOperator<T>, LinalgError> {
    if a.dim() != b.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(&resolvent_power(a, z, m)? - &resolvent_power(b, z, m)?)
}

/// Reconstruction residual `||A - V diag(lambda) V*||_2` and orthonormality
/// defect `||V* V - I||_2` of the cached decomposition.
pub fn decomposition_residuals<T: Real>(a: &HermitianOperator<T>) -> (T, T) {
    let sd = a.spectral();
    let values: Vec<_> = sd.eigenvalues.iter().map(|&x| re(x)).collect();
    let recon = &sd.synthesize(&values) - a.as_operator();
    let v = sd.eigenvectors();
    let gram = &(&v.adjoint() * v) - &GeneralOperator::identity(a.dim());
    (
        super::schatten::operator_norm(&recon),
        super::schatten::operator_norm(&gram),
    )
}
