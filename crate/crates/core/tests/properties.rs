//! Randomized invariants checked against oracles that do not go through
//! the eigensolver: entrywise norms, matrix products and direct inverses.

use doi_lab::doi::{divided_difference, doi_apply};
use doi_lab::funcspace::{build_phi, cayley, cayley_by_solve, cayley_of_operator, inverse_cayley, Smooth, DEFAULT_C, DEFAULT_R};
use doi_lab::linalg::io::{read_matrix, write_matrix};
use doi_lab::linalg::{operator_norm, resolvent_power, schatten_norm, trace_norm};
use doi_lab::random::{random_general, random_hermitian, random_unitary, rng_for};
use doi_lab::ssf::{counting_function, pseudometric, xi, StepFunction};
use doi_lab::{Hermitian, Kernel, Operator, C64};
use proptest::prelude::*;

fn hermitian(seed: u64, stream: u64, dim: usize) -> Hermitian {
    random_hermitian(dim, &mut rng_for(seed, stream))
}

fn general(seed: u64, stream: u64, dim: usize) -> Operator {
    random_general(dim, &mut rng_for(seed, stream))
}

fn p_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY), 1.0f64..8.0]
}

fn cube() -> Smooth<f64> {
    Smooth::real("x^3", |x| x * x * x, |x| 3.0 * x * x, |x| 6.0 * x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schatten_two_is_frobenius(seed: u64, dim in 1usize..9) {
        let t = general(seed, 1, dim);
        let s2 = schatten_norm(&t, 2.0).unwrap();
        prop_assert!((s2 - t.frobenius_norm()).abs() <= 1e-12 * t.frobenius_norm());
    }

    #[test]
    fn schatten_norm_axioms(seed: u64, dim in 1usize..9, p in p_strategy(), c in -5.0f64..5.0) {
        let s = general(seed, 1, dim);
        let t = general(seed, 2, dim);
        let u: Operator = random_unitary(dim, &mut rng_for(seed, 3));
        let ns = schatten_norm(&s, p).unwrap();
        let nt = schatten_norm(&t, p).unwrap();
        prop_assert!(schatten_norm(&(&s + &t), p).unwrap() <= (ns + nt) * (1.0 + 1e-12));
        let scaled = schatten_norm(&s.scale(C64::new(c, 0.0)), p).unwrap();
        prop_assert!((scaled - c.abs() * ns).abs() <= 1e-12 * ns.max(1.0));
        let rotated = schatten_norm(&(&(&u * &s) * &u.adjoint()), p).unwrap();
        prop_assert!((rotated - ns).abs() <= 1e-10 * ns);
        prop_assert!((schatten_norm(&s.adjoint(), p).unwrap() - ns).abs() <= 1e-12 * ns);
        prop_assert!(schatten_norm(&s, p + 1.0).unwrap() <= ns * (1.0 + 1e-12));
        prop_assert!(operator_norm(&s) <= ns * (1.0 + 1e-12));
        prop_assert!(s.trace().norm() <= trace_norm(&s) * (1.0 + 1e-12));
    }

    #[test]
    fn hermitian_spectrum_matches_traces(seed: u64, dim in 1usize..12) {
        let a = hermitian(seed, 1, dim);
        let ev = a.eigenvalues();
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = ev.iter().sum();
        let sq: f64 = ev.iter().map(|x| x * x).sum();
        let op = a.to_operator();
        prop_assert!((sum - op.trace().re).abs() <= 1e-10 * (1.0 + sq.sqrt()));
        prop_assert!((sq - (&op * &op).trace().re).abs() <= 1e-10 * (1.0 + sq));
        let abs_sum: f64 = ev.iter().map(|x| x.abs()).sum();
        prop_assert!((trace_norm(&op) - abs_sum).abs() <= 1e-10 * (1.0 + abs_sum));
    }

    #[test]
    fn divided_difference_of_cube_matches_products(seed: u64, dim in 1usize..10) {
        let a = hermitian(seed, 1, dim);
        let b = hermitian(seed, 2, dim);
        let (ao, bo) = (a.to_operator(), b.to_operator());
        let want = &(&(&ao * &ao) * &ao) - &(&(&bo * &bo) * &bo);
        let got = doi_apply(&divided_difference(&cube()), &a, &b, &(&ao - &bo)).unwrap();
        prop_assert!((&got - &want).max_abs_entry() <= 1e-10 * (1.0 + want.max_abs_entry()));
    }

    #[test]
    fn doi_is_linear_in_operator_and_kernel(seed: u64, dim in 1usize..9, c in -3.0f64..3.0) {
        let a = hermitian(seed, 1, dim);
        let b = hermitian(seed, 2, dim);
        let s = general(seed, 3, dim);
        let t = general(seed, 4, dim);
        let k1 = divided_difference(&cube());
        let k2 = Kernel::new("x+y^2", |x: f64, y: f64| C64::new(x + y * y, x - y));
        let cc = C64::new(c, 0.5);
        let j = |k: &Kernel, op: &Operator| doi_apply(k, &a, &b, op).unwrap();
        let lhs = j(&k1, &(&s + &t.scale(cc)));
        let rhs = &j(&k1, &s) + &j(&k1, &t).scale(cc);
        prop_assert!((&lhs - &rhs).max_abs_entry() <= 1e-10 * (1.0 + rhs.max_abs_entry()));
        let summed = j(&k1.sum(&k2), &s);
        let separate = &j(&k1, &s) + &j(&k2, &s);
        prop_assert!((&summed - &separate).max_abs_entry() <= 1e-10 * (1.0 + separate.max_abs_entry()));
        let one = j(&Kernel::constant(C64::new(1.0, 0.0)), &s);
        prop_assert!((&one - &s).max_abs_entry() <= 1e-12 * (1.0 + s.max_abs_entry()));
    }

    #[test]
    fn resolvent_power_matches_direct_inverse(seed: u64, dim in 1usize..9, m in 1u32..5, im in prop_oneof![-3.0f64..-0.5, 0.5f64..3.0]) {
        let a = hermitian(seed, 1, dim);
        let z = C64::new(0.3, im);
        let shifted = &a.to_operator() - &Operator::identity(dim).scale(z);
        let want = shifted.inverse().unwrap().pow(m);
        let got = resolvent_power(&a, z, m).unwrap();
        prop_assert!((&got - &want).max_abs_entry() <= 1e-10 * (1.0 + want.max_abs_entry()));
    }

    #[test]
    fn cayley_transform_agrees_with_solve(seed: u64, dim in 1usize..9, x in -50.0f64..50.0) {
        let a = hermitian(seed, 1, dim);
        let by_eig = cayley_of_operator(&a);
        let by_solve = cayley_by_solve(&a).unwrap();
        prop_assert!((&by_eig - &by_solve).max_abs_entry() <= 1e-10);
        let unitary_defect = (&(&by_eig * &by_eig.adjoint()) - &Operator::identity(dim)).max_abs_entry();
        prop_assert!(unitary_defect <= 1e-12);
        let w = cayley(x);
        prop_assert!((w.norm() - 1.0).abs() <= 1e-14);
        prop_assert!((inverse_cayley(w) - C64::new(x, 0.0)).norm() <= 1e-9 * (1.0 + x * x));
    }

    #[test]
    fn xi_counts_eigenvalues(seed: u64, dim in 1usize..12, x in -8.0f64..8.0) {
        let a = hermitian(seed, 1, dim);
        let b = hermitian(seed, 2, dim);
        let count = |h: &Hermitian| h.eigenvalues().iter().filter(|&&l| l <= x).count() as i64;
        prop_assert_eq!(xi(&a, &b).unwrap().value(x), count(&a) - count(&b));
        prop_assert_eq!(counting_function(&a).value(x), count(&a));
    }

    #[test]
    fn xi_is_additive_and_antisymmetric(seed: u64, dim in 1usize..12) {
        let a = hermitian(seed, 1, dim);
        let b = hermitian(seed, 2, dim);
        let c = hermitian(seed, 3, dim);
        let ab = xi(&a, &b).unwrap();
        prop_assert_eq!(xi(&a, &c).unwrap(), ab.add(&xi(&b, &c).unwrap()));
        prop_assert_eq!(xi(&b, &a).unwrap(), ab.neg());
        prop_assert_eq!(xi(&a, &a).unwrap(), StepFunction::zero());
        prop_assert!(ab.is_compactly_supported());
        prop_assert!(ab.levels().iter().all(|l| l.unsigned_abs() as usize <= dim));
    }

    #[test]
    fn xi_integrates_to_the_trace_difference(seed: u64, dim in 1usize..12) {
        let a = hermitian(seed, 1, dim);
        let b = hermitian(seed, 2, dim);
        let integral = xi(&a, &b).unwrap().integrate_derivative(|x| C64::new(x, 0.0));
        let want = b.to_operator().trace() - a.to_operator().trace();
        prop_assert!((integral - want).norm() <= 1e-10 * (1.0 + want.norm()));
    }

    #[test]
    fn pseudometric_axioms(seed: u64, dim in 1usize..8, m in prop_oneof![Just(1u32), Just(3u32)], im in 0.5f64..3.0) {
        let a = hermitian(seed, 1, dim);
        let b = hermitian(seed, 2, dim);
        let c = hermitian(seed, 3, dim);
        let z = C64::new(0.7, im);
        let d = |x: &Hermitian, y: &Hermitian| pseudometric(x, y, m, z).unwrap().value;
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-12 * d(&a, &b).max(1.0));
        prop_assert!(d(&a, &c) <= (d(&a, &b) + d(&b, &c)) * (1.0 + 1e-12));
        prop_assert!(pseudometric(&a, &b, m, C64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn matrix_text_round_trip(seed: u64, dim in 1usize..7) {
        let t = general(seed, 1, dim);
        let back: Operator = read_matrix(&write_matrix(&t)).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn step_function_csv_round_trip(seed: u64, dim in 1usize..10) {
        let s = xi(&hermitian(seed, 1, dim), &hermitian(seed, 2, dim)).unwrap();
        let back: StepFunction<f64> = StepFunction::from_csv(&s.to_csv()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn phi_inverse_round_trip(m in prop_oneof![Just(1u32), Just(3u32), Just(5u32)], x in -20.0f64..20.0) {
        let phi = build_phi::<f64>(m, DEFAULT_R, DEFAULT_C).unwrap();
        let y = phi.eval(x);
        let back = phi.inverse(y).unwrap();
        prop_assert!((back - x).abs() <= 1e-12 * (1.0 + x.abs()));
        prop_assert!(phi.deriv(x) > 0.0);
    }
}
