use std::sync::Arc;

use num_complex::Complex;

use super::kernel::Kernel;
use super::DoiError;
use crate::linalg::HermitianOperator;
use crate::scalar::Real;

pub type Factor<T> = Arc<dyn Fn(T) -> Complex<T> + Send + Sync>;

/// One term `eta * alpha(x) * beta(y)` of a separable sum.
#[derive(Clone)]
pub struct SeparableNode<T: Real> {
    pub weight: T,
    pub alpha: Factor<T>,
    pub beta: Factor<T>,
}

/// `K(x, y) = sum_t eta_t alpha_t(x) beta_t(y)` with positive weights.
#[derive(Clone, Default)]
pub struct SeparableRepresentation<T: Real> {
    nodes: Vec<SeparableNode<T>>,
}

impl<T: Real> SeparableRepresentation<T> {
    pub fn new() -> Self {
        Self { nodes: Vec::new() }
    }

    pub fn push(
        mut self,
        weight: T,
        alpha: impl Fn(T) -> Complex<T> + Send + Sync + 'static,
        beta: impl Fn(T) -> Complex<T> + Send + Sync + 'static,
    ) -> Result<Self, DoiError> {
        if !(weight > T::zero()) {
            return Err(DoiError::InvalidParameter(format!("node weight {weight} must be positive")));
        }
        self.nodes.push(SeparableNode { weight, alpha: Arc::new(alpha), beta: Arc::new(beta) });
        Ok(self)
    }

    pub fn nodes(&self) -> &[SeparableNode<T>] {
        &self.nodes
    }

    /// The kernel the representation sums to.
    pub fn kernel(&self) -> Kernel<T> {
        let nodes = self.nodes.clone();
        Kernel::new(format!("separable[{}]", nodes.len()), move |x, y| {
            nodes
                .iter()
                .fold(Complex::new(T::zero(), T::zero()), |acc, n| acc + n.alpha.as_ref()(x) * n.beta.as_ref()(y) * n.weight)
        })
    }
}

/// Grid suprema `C_alpha`, `C_beta` and their product, an upper bound on the
/// multiplier norm of the kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparableBound<T: Real> {
    pub c_alpha: T,
    pub c_beta: T,
    pub bound: T,
}

/// `C_alpha^2 = sup_x sum_t eta_t |alpha_t(x)|^2` over `lambdas`, likewise
/// `C_beta` over `mus`.
pub fn separable_bound<T: Real>(rep: &SeparableRepresentation<T>, lambdas: &[T], mus: &[T]) -> SeparableBound<T> {
    let sup = |grid: &[T], pick: &dyn Fn(&SeparableNode<T>, T) -> Complex<T>| {
        grid.iter()
            .map(|&x| rep.nodes.iter().fold(T::zero(), |s, n| s + n.weight * pick(n, x).norm_sqr()))
            .fold(T::zero(), T::max)
            .sqrt()
    };
    let c_alpha = sup(lambdas, &|n, x| n.alpha.as_ref()(x));
    let c_beta = sup(mus, &|n, x| n.beta.as_ref()(x));
    SeparableBound { c_alpha, c_beta, bound: c_alpha * c_beta }
}

/// `eps_n = [sum_t eta_t |alpha_t(A_n) v - alpha_t(A) v|^2]^{1/2}` for each
/// operator of the sequence.
pub fn strong_membership_diagnostic<T: Real>(
    rep: &SeparableRepresentation<T>,
    sequence: &[HermitianOperator<T>],
    limit: &HermitianOperator<T>,
    v: &[Complex<T>],
) -> Result<Vec<T>, DoiError> {
    let n = limit.dim();
    if v.len() != n {
        return Err(DoiError::DimensionMismatch { left: n, right: v.len() });
    }
    if let Some(bad) = sequence.iter().find(|a| a.dim() != n) {
        return Err(DoiError::DimensionMismatch { left: n, right: bad.dim() });
    }
    let apply = |a: &HermitianOperator<T>, f: &Factor<T>| -> Result<Vec<Complex<T>>, DoiError> {
        let m = a.apply_function(|x| f.as_ref()(x))?;
        Ok((0..n)
            .map(|i| (0..n).fold(Complex::new(T::zero(), T::zero()), |s, j| s + m.get(i, j) * v[j]))
            .collect())
    };
    let limits: Vec<Vec<Complex<T>>> = rep.nodes.iter().map(|node| apply(limit, &node.alpha)).collect::<Result<_, _>>()?;
    sequence
        .iter()
        .map(|a_n| {
            let mut total = T::zero();
            for (node, base) in rep.nodes.iter().zip(&limits) {
                let w = apply(a_n, &node.alpha)?;
                let d = w.iter().zip(base).fold(T::zero(), |s, (x, y)| s + (x - y).norm_sqr());
                total += node.weight * d;
            }
            Ok(total.sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doi::{doi_apply, kernel_matrix};
    use crate::linalg::schatten_norm;
    use crate::random::{random_general, random_hermitian, random_vector, rng_for};
    use crate::scalar::re;

    fn grid() -> Vec<f64> {
        (0..201).map(|k| -10.0 + 0.1 * k as f64).collect()
    }

    #[test]
    fn single_unit_node() {
        let rep = SeparableRepresentation::new().push(1.0, |_| re(1.0), |_| re(1.0)).unwrap();
        let b = separable_bound(&rep, &grid(), &grid());
        assert!((b.bound - 1.0).abs() < 1e-15);
        assert_eq!(rep.kernel().evaluate(0.3, -2.0).unwrap(), re(1.0));
    }

    #[test]
    fn two_orthogonal_terms() {
        // indicator-like factors with disjoint supports, each of size sqrt(2)
        let s = 2f64.sqrt();
        let rep = SeparableRepresentation::new()
            .push(1.0, move |x: f64| re(if x < 0.0 { s } else { 0.0 }), move |y: f64| re(if y < 0.0 { s } else { 0.0 }))
            .unwrap()
            .push(1.0, move |x: f64| re(if x >= 0.0 { s } else { 0.0 }), move |y: f64| re(if y >= 0.0 { s } else { 0.0 }))
            .unwrap();
        let b = separable_bound(&rep, &grid(), &grid());
        assert!((b.bound - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bound_controls_transformer_norms() {
        let rep = SeparableRepresentation::new()
            .push(0.5, |x: f64| re(x.cos()), |y: f64| re((-y * y).exp()))
            .unwrap()
            .push(2.0, |x: f64| Complex::new(0.0, 1.0 / (1.0 + x * x)), |y: f64| re(y.sin()))
            .unwrap();
        let k = rep.kernel();
        for seed in 0..20 {
            let mut rng = rng_for(seed, 9);
            let a = random_hermitian::<f64, _>(6, &mut rng);
            let b = random_hermitian::<f64, _>(6, &mut rng);
            let t = random_general::<f64, _>(6, &mut rng);
            let spectrum: Vec<f64> = a.eigenvalues().iter().chain(b.eigenvalues()).copied().collect();
            let bound = separable_bound(&rep, &spectrum, &spectrum).bound;
            let out = doi_apply(&k, &a, &b, &t).unwrap();
            for p in [1.0, 2.0, f64::INFINITY] {
                let lhs = schatten_norm(&out, p).unwrap();
                let rhs = bound * schatten_norm(&t, p).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-12), "p={p}: {lhs} > {rhs}");
            }
        }
        let phi = kernel_matrix(&k, &[0.0, 1.0], &[2.0, 3.0]).unwrap();
        assert!(phi.is_finite());
    }

    #[test]
    fn strong_membership_sequence() {
        let rep = SeparableRepresentation::new().push(1.0, |x: f64| re(x.sin()), |_| re(1.0)).unwrap();
        let mut rng = rng_for(2, 2);
        let a = random_hermitian::<f64, _>(5, &mut rng);
        let x = random_hermitian::<f64, _>(5, &mut rng);
        let v = random_vector::<f64, _>(5, &mut rng);
        let constant: Vec<_> = (0..4).map(|_| a.clone()).collect();
        assert!(strong_membership_diagnostic(&rep, &constant, &a, &v).unwrap().iter().all(|&e| e == 0.0));
        let zero = vec![Complex::new(0.0, 0.0); 5];
        let moving: Vec<_> = (0..8).map(|k| a.add_scaled(1.0 / 2f64.powi(k), &x)).collect();
        assert!(strong_membership_diagnostic(&rep, &moving, &a, &zero).unwrap().iter().all(|&e| e == 0.0));
        let eps = strong_membership_diagnostic(&rep, &moving, &a, &v).unwrap();
        for w in eps.windows(2) {
            assert!(w[1] < w[0]);
        }
        let slope = (eps[7] / eps[3]).ln() / (2f64.powi(-7) / 2f64.powi(-3)).ln();
        assert!((slope - 1.0).abs() < 0.1, "{slope}");
        assert!(matches!(
            strong_membership_diagnostic(&rep, &constant, &a, &v[..3]),
            Err(DoiError::DimensionMismatch { .. })
        ));
    }
}
