//! Workloads shared by the benchmarks.

use kcollapse::constructions::{lift_almost_orthogonal, polynomial_vectors};
use kcollapse::{FiniteFieldParams, NormSpace, Rational, Scalar, VectorFamily};

/// The lift of the `q = 7, s = 1` polynomial code: 49 vectors in a 43-dimensional slab space.
pub fn lifted_poly_family() -> VectorFamily<Rational> {
    let params = FiniteFieldParams::new(7, 1).expect("7 is prime");
    let u = polynomial_vectors(&params).expect("valid parameters");
    lift_almost_orthogonal(&u, 2).expect("bound 1/6 <= 1/5").family
}

/// `m` pseudo-random vectors with entries in `[-1/d, 1/d]` on a grid of step `1/(4d)`.
pub fn small_linf_family(m: usize, d: usize) -> VectorFamily<Rational> {
    let mut state = 0x9e37_79b9_u64;
    let den = 4 * d as i64;
    let vectors = (0..m)
        .map(|_| {
            (0..d)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    Rational::ratio((state >> 33) as i64 % 9 - 4, den)
                })
                .collect()
        })
        .collect();
    VectorFamily::new(NormSpace::linf(d), vectors).expect("consistent dimensions")
}
