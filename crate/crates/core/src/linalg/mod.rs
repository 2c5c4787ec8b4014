//! Dense complex Hermitian linear algebra: spectral decompositions,
//! functional calculus, resolvent powers and Schatten norms.

mod eigh;
mod hermitian;
pub mod io;
mod operator;
mod schatten;

use thiserror::Error;

pub use hermitian::{
    apply_function, decomposition_residuals, eigh, resolvent_power, resolvent_power_diff,
    HermitianOperator, SpectralDecomposition,
};
pub use operator::GeneralOperator;
pub use schatten::{
    norm_of_singular_values, operator_norm, schatten_norm, schatten_norms, singular_values,
    trace_norm,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: defect {defect:e} exceeds {bound:e}")]
    NotHermitian { defect: f64, bound: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("function is not finite at eigenvalue {eigenvalue}")]
    FunctionNotFinite { eigenvalue: f64 },
    #[error("z = {re}{im:+}i is within tolerance of eigenvalue {eigenvalue}")]
    NearSingular { eigenvalue: f64, re: f64, im: f64 },
    #[error("Schatten exponent must satisfy p >= 1, got {p}")]
    SchattenIndex { p: f64 },
    #[error("matrix is numerically singular")]
    Singular,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Relative Frobenius distance `||a - b|| / max(||a||, ||b||)`; zero when both vanish.
pub fn relative_error<T: crate::Real>(a: &GeneralOperator<T>, b: &GeneralOperator<T>) -> T {
    let scale = a.frobenius_norm().max(b.frobenius_norm());
    let diff = (a - b).frobenius_norm();
    if scale == T::zero() {
        diff
    } else {
        diff / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_unitary, rng_for};
    use crate::scalar::{cx, re};
    use num_complex::Complex;
    use proptest::prelude::*;

    type H = HermitianOperator<f64>;

    fn pauli_x() -> H {
        H::new(GeneralOperator::from_fn(2, |i, j| if i != j { cx(1.0, 0.0) } else { cx(0.0, 0.0) }).into_entries())
            .unwrap()
    }

    #[test]
    fn eigh_of_diagonal() {
        let a = H::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let sd = eigh(&a);
        assert_eq!(sd.eigenvalues(), &[1.0, 2.0, 3.0]);
        let v = sd.eigenvectors();
        for j in 0..3 {
            let ones: Vec<_> = (0..3).filter(|&i| (v.get(i, j) - cx(1.0, 0.0)).norm() < 1e-15).collect();
            assert_eq!(ones.len(), 1);
        }
        // column for eigenvalue 1 is e_2
        assert!((v.get(1, 0) - cx(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eigh_of_pauli_x() {
        let sd = eigh(&pauli_x());
        assert!((sd.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((sd.eigenvalues()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigh_invariants_on_random_matrices() {
        for seed in 0..20 {
            let mut rng = rng_for(seed, 0);
            let a = random_hermitian::<f64, _>(8, &mut rng);
            let (recon, ortho) = decomposition_residuals(&a);
            let scale = 1.0 + operator_norm(a.as_operator());
            assert!(recon <= 1e-10 * scale, "recon {recon}");
            assert!(ortho <= 1e-11, "ortho {ortho}");
            let ev = a.eigenvalues();
            assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigh_handles_degenerate_spectrum_deterministically() {
        let mut rng = rng_for(3, 0);
        let u = random_unitary::<f64, _>(5, &mut rng);
        let a = H::from_real_diagonal(&[1.0, 1.0, 2.0, 2.0, 2.0]).conjugate_by(&u).unwrap();
        let first = eigh(&a);
        let again = eigh(&H::from_operator(a.as_operator()).unwrap());
        assert_eq!(first.eigenvalues(), again.eigenvalues());
        assert_eq!(first.eigenvectors(), again.eigenvectors());
        let (recon, ortho) = decomposition_residuals(&a);
        assert!(recon < 1e-12 && ortho < 1e-12);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let m = GeneralOperator::from_fn(2, |i, j| if (i, j) == (0, 1) { cx(1.0, 0.0) } else { cx(0.0, 0.0) });
        assert!(matches!(H::new(m.into_entries()), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn apply_function_examples() {
        let a = pauli_x();
        let id = a.apply_function(re).unwrap();
        assert!((&id - a.as_operator()).max_abs_entry() < 1e-15);
        let sq = a.apply_function(|x| re(x * x)).unwrap();
        assert!((&sq - &GeneralOperator::identity(2)).max_abs_entry() < 1e-15);
    }

    #[test]
    fn apply_function_reports_non_finite_values() {
        let a = H::from_real_diagonal(&[0.0, 1.0]);
        let err = a.apply_function(|x| re(1.0 / x)).unwrap_err();
        assert_eq!(err, LinalgError::FunctionNotFinite { eigenvalue: 0.0 });
    }

    #[test]
    fn resolvent_matches_direct_inverse() {
        for seed in 0..10 {
            let mut rng = rng_for(seed, 1);
            let a = random_hermitian::<f64, _>(6, &mut rng);
            let z = cx(0.0, 1.0);
            let spectral = a.apply_function(|x| (re(x) - z).inv()).unwrap();
            let shifted = a.as_operator() - &GeneralOperator::identity(6).scale(z);
            let direct = shifted.inverse().unwrap();
            assert!((&spectral - &direct).max_abs_entry() <= 1e-10);
            // repeated-solve oracle for m = 3
            let cube = direct.pow(3);
            let rp = resolvent_power(&a, z, 3).unwrap();
            assert!((&cube - &rp).max_abs_entry() <= 1e-9);
        }
    }

    #[test]
    fn resolvent_power_of_scaled_identity() {
        let a = H::from_real_diagonal(&[3f64.sqrt(), 3f64.sqrt()]);
        let r = resolvent_power(&a, cx(0.0, 1.0), 3).unwrap();
        let expected = GeneralOperator::identity(2).scale(cx(0.0, 0.125));
        assert!((&r - &expected).max_abs_entry() < 1e-15);
    }

    #[test]
    fn resolvent_power_first_order_on_diagonal() {
        let a = H::from_real_diagonal(&[0.5, -2.0]);
        let z = cx(1.0, 1.0);
        let r = resolvent_power(&a, z, 1).unwrap();
        assert!((r.get(0, 0) - (cx(0.5, 0.0) - z).inv()).norm() < 1e-15);
        assert!((r.get(1, 1) - (cx(-2.0, 0.0) - z).inv()).norm() < 1e-15);
        assert_eq!(r.get(0, 1), Complex::new(0.0, 0.0));
    }

    #[test]
    fn resolvent_near_eigenvalue_is_an_error() {
        let a = H::from_real_diagonal(&[1.0, 2.0]);
        assert!(matches!(
            resolvent_power(&a, cx(2.0, 0.0), 1),
            Err(LinalgError::NearSingular { .. })
        ));
    }

    #[test]
    fn resolvent_power_diff_of_equal_operators_vanishes() {
        let mut rng = rng_for(9, 0);
        let a = random_hermitian::<f64, _>(5, &mut rng);
        let d = resolvent_power_diff(&a, &a, cx(0.3, -1.0), 3).unwrap();
        assert_eq!(d.max_abs_entry(), 0.0);
    }

    #[test]
    fn resolvent_power_diff_matches_telescoping_sum() {
        for seed in 0..10 {
            let mut rng = rng_for(seed, 2);
            let a = random_hermitian::<f64, _>(6, &mut rng);
            let b = random_hermitian::<f64, _>(6, &mut rng);
            let z = cx(0.2, 1.5);
            for n in 3..=5u32 {
                let ra = resolvent_power(&a, z, 1).unwrap();
                let rb = resolvent_power(&b, z, 1).unwrap();
                let diff1 = &ra - &rb;
                let mut sum = GeneralOperator::zeros(6);
                for k in 0..n {
                    let term = &(&ra.pow(k) * &diff1) * &rb.pow(n - 1 - k);
                    sum = &sum + &term;
                }
                let d = resolvent_power_diff(&a, &b, z, n).unwrap();
                assert!((&d - &sum).max_abs_entry() <= 1e-9);
                assert!(trace_norm(&d).is_finite());
            }
        }
    }

    #[test]
    fn schatten_norm_examples() {
        let d = GeneralOperator::diagonal(&[cx(1.0f64, 0.0), cx(-2.0, 0.0), cx(3.0, 0.0)]);
        assert!((schatten_norm(&d, 1.0).unwrap() - 6.0).abs() < 1e-14);
        assert!((schatten_norm(&d, 2.0).unwrap() - 14f64.sqrt()).abs() < 1e-14);
        assert!((schatten_norm(&d, f64::INFINITY).unwrap() - 3.0).abs() < 1e-14);
        assert!(matches!(schatten_norm(&d, 0.5), Err(LinalgError::SchattenIndex { .. })));
    }

    #[test]
    fn hilbert_schmidt_norm_matches_trace_identity() {
        for seed in 0..20 {
            let mut rng = rng_for(seed, 3);
            let t = crate::random::random_general::<f64, _>(7, &mut rng);
            let hs = schatten_norm(&t, 2.0).unwrap();
            let tr = (&t.adjoint() * &t).trace().re;
            assert!((hs * hs - tr).abs() <= 1e-10 * tr);
        }
    }

    #[test]
    fn trace_cyclicity_and_eigenvalue_sum() {
        for seed in 0..10 {
            let mut rng = rng_for(seed, 4);
            let a = crate::random::random_general::<f64, _>(5, &mut rng);
            let b = crate::random::random_general::<f64, _>(5, &mut rng);
            assert!(((&a * &b).trace() - (&b * &a).trace()).norm() <= 1e-10);
            let h = random_hermitian::<f64, _>(5, &mut rng);
            let f = |x: f64| cx((x * x + 1.0).recip(), x.sin());
            let lhs = h.apply_function(f).unwrap().trace();
            let rhs = h.eigenvalues().iter().fold(cx(0.0, 0.0), |s, &x| s + f(x));
            assert!((lhs - rhs).norm() <= 1e-10);
        }
    }

    #[test]
    fn single_precision_instantiation() {
        let a = HermitianOperator::<f32>::from_real_diagonal(&[2.0, -1.0]);
        assert_eq!(a.eigenvalues(), &[-1.0, 2.0]);
        let n = schatten_norm(a.as_operator(), 1.0f32).unwrap();
        assert!((n - 3.0).abs() < 1e-5);
    }

    fn hermitian_strategy(n: usize) -> impl Strategy<Value = H> {
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), n * n).prop_map(move |v| {
            let m = GeneralOperator::from_fn(n, |i, j| cx(v[i * n + j].0, v[i * n + j].1));
            H::from_operator(&(&m + &m.adjoint()).scale(cx(0.5, 0.0))).unwrap()
        })
    }

    fn general_strategy(n: usize) -> impl Strategy<Value = GeneralOperator<f64>> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n)
            .prop_map(move |v| GeneralOperator::from_fn(n, |i, j| cx(v[i * n + j].0, v[i * n + j].1)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn polynomial_functional_calculus(a in hermitian_strategy(4), c in prop::array::uniform4(-2.0f64..2.0)) {
            let q = |x: f64| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
            let spectral = a.apply_function(|x| re(q(x))).unwrap();
            let m = a.as_operator();
            let id = GeneralOperator::identity(4);
            let direct = &(&(&id.scale(re(c[0])) + &m.scale(re(c[1]))) + &m.pow(2).scale(re(c[2]))) + &m.pow(3).scale(re(c[3]));
            let scale = 1.0 + operator_norm(m).powi(3);
            prop_assert!((&spectral - &direct).max_abs_entry() <= 1e-9 * scale);
        }

        #[test]
        fn schatten_triangle_inequality(s in general_strategy(4), t in general_strategy(4), p in prop_oneof![Just(1.0f64), Just(1.5), Just(2.0), Just(4.0), Just(f64::INFINITY)]) {
            let lhs = schatten_norm(&(&s + &t), p).unwrap();
            let rhs = schatten_norm(&s, p).unwrap() + schatten_norm(&t, p).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }

        #[test]
        fn schatten_unitary_invariance(t in general_strategy(5), seed in 0u64..1000, p in prop_oneof![Just(1.0f64), Just(2.0), Just(3.0), Just(f64::INFINITY)]) {
            let mut rng = rng_for(seed, 5);
            let u = random_unitary::<f64, _>(5, &mut rng);
            let v = random_unitary::<f64, _>(5, &mut rng);
            let base = schatten_norm(&t, p).unwrap();
            let rotated = schatten_norm(&(&(&u * &t) * &v), p).unwrap();
            prop_assert!((base - rotated).abs() <= 1e-9 * base);
        }

        #[test]
        fn schatten_norms_decrease_in_p(t in general_strategy(5)) {
            let ps = [1.0, 1.5, 2.0, 3.0, 4.0, 8.0, f64::INFINITY];
            let norms = schatten_norms(&t, &ps).unwrap();
            for w in norms.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12 * w[0]);
            }
        }
    }
}
