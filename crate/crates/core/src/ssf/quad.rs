use crate::scalar::Real;

const NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];
const MAX_DEPTH: u32 = 40;

/// Ten-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> T {
    let half = (b - a) * T::lit(0.5);
    let mid = a + half;
    let mut sum = T::zero();
    for (&x, &w) in NODES.iter().zip(&WEIGHTS) {
        let dx = half * T::lit(x);
        sum += T::lit(w) * (f(mid - dx) + f(mid + dx));
    }
    sum * half
}

/// Adaptive Gauss-Legendre: an interval is accepted once the rule on it and
/// the sum over its halves agree to `tol`; the tolerance is split between
/// halves on refinement.
pub fn integrate<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, tol: T) -> T {
    fn rec<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, whole: T, tol: T, depth: u32) -> T {
        let mid = a + (b - a) * T::lit(0.5);
        let left = gauss_legendre(f, a, mid);
        let right = gauss_legendre(f, mid, b);
        let split = left + right;
        if (split - whole).abs() <= tol || depth >= MAX_DEPTH {
            return split;
        }
        let half_tol = tol * T::lit(0.5);
        rec(f, a, mid, left, half_tol, depth + 1) + rec(f, mid, b, right, half_tol, depth + 1)
    }
    if a == b {
        return T::zero();
    }
    rec(f, a, b, gauss_legendre(f, a, b), tol, 0)
}

/// `int_a^inf f` through `x = a + t / (1 - t)`, `t` in `[0, 1)`.
pub fn integrate_to_infinity<T: Real>(f: &impl Fn(T) -> T, a: T, tol: T) -> T {
    let g = |t: T| {
        let s = T::one() - t;
        if s <= T::zero() {
            return T::zero();
        }
        let v = f(a + t / s) / (s * s);
        if v.is_finite() { v } else { T::zero() }
    };
    integrate(&g, T::zero(), T::one(), tol)
}
