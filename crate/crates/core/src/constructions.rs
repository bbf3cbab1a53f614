//! Concrete families for the lower bounds and the sharpness examples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::family::VectorFamily;
use crate::gf::GaloisField;
use crate::linalg;
use crate::scalar::{Rational, Scalar};
use crate::spaces::{Cap, NormSpace};
use crate::subsets::RevolvingDoor;
use crate::vector::{dot, unit, zeros};

pub use crate::family::{collapsing_counterexample, counterexample_tuple};

/// `{+-e_1, ..., +-e_d}` in `l_inf^d`, ordered `e_1, -e_1, e_2, -e_2, ...`.
pub fn linf_cross<S: Scalar>(d: usize) -> Result<VectorFamily<S>> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    let mut v = Vec::with_capacity(2 * d);
    for i in 0..d {
        v.push(unit::<S>(d, i));
        v.push(unit::<S>(d, i).into_iter().map(|x| -x).collect());
    }
    VectorFamily::new(NormSpace::linf(d), v)
}

/// The space whose unit ball is `conv{ sum_{i in I} +-e_i : 1 <= |I| <= k }`.
///
/// Signs are independent, so the ball is the whole cube `[-1,1]^d` once `k >= d`.
pub fn pk_polytope_norm(d: usize, k: usize) -> Result<NormSpace<Rational>> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidParameter(format!("need d, k >= 1, got d={d}, k={k}")));
    }
    let mut gens = Vec::new();
    for size in 1..=k.min(d) {
        for (support, _) in RevolvingDoor::new(d, size) {
            // the first coordinate keeps a + sign; the ball is symmetric anyway
            for signs in 0..(1usize << (size - 1)) {
                let mut g = zeros::<Rational>(d);
                for (t, &i) in support.iter().enumerate() {
                    let neg = t > 0 && (signs >> (t - 1)) & 1 == 1;
                    g[i] = Rational::from_i64(if neg { -1 } else { 1 });
                }
                gens.push(g);
            }
        }
    }
    NormSpace::polytope(d, gens)
}

/// Inner product on stored coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Identity,
    /// Consecutive blocks of this length are rows of a matrix whose dropped last entry is
    /// minus the block sum, so each block contributes `a.b + (sum a)(sum b)`.
    RowBlocks(usize),
}

/// Unit vectors `u_i` with `|<u_i, u_j>| <= bound` (strictly when `strict`).
///
/// The true inner product is `scale * metric(coords_i, coords_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmostOrthogonalSet<S> {
    pub dim: usize,
    pub coords: Vec<Vec<S>>,
    pub metric: Metric,
    pub scale: S,
    pub bound: S,
    pub strict: bool,
}

impl<S: Scalar> AlmostOrthogonalSet<S> {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// `metric(a, b)` without the scale.
    pub fn raw_inner(&self, a: &[S], b: &[S]) -> S {
        match self.metric {
            Metric::Identity => dot(a, b),
            Metric::RowBlocks(w) => {
                let sa: Vec<S> = a.chunks(w).map(S::sum).collect();
                let sb: Vec<S> = b.chunks(w).map(S::sum).collect();
                dot(a, b) + dot(&sa, &sb)
            }
        }
    }

    pub fn gram(&self, i: usize, j: usize) -> S {
        self.scale.clone() * self.raw_inner(&self.coords[i], &self.coords[j])
    }

    /// `metric` applied to one side: the functional `v -> metric(a, v)` as a coordinate array.
    fn metric_apply(&self, a: &[S]) -> Vec<S> {
        match self.metric {
            Metric::Identity => a.to_vec(),
            Metric::RowBlocks(w) => a
                .chunks(w)
                .flat_map(|x| {
                    let s = x.iter().fold(S::zero(), |s, v| s + v.clone());
                    x.iter().map(move |v| v.clone() + s.clone()).collect::<Vec<_>>()
                })
                .collect(),
        }
    }

    /// True when every vector has unit length and every pair respects the bound.
    pub fn verify(&self) -> bool {
        let one = S::one();
        for i in 0..self.len() {
            if !(self.gram(i, i) - one.clone()).approx_zero() {
                return false;
            }
            for j in 0..i {
                let g = self.gram(i, j).abs();
                let ok = if self.strict { g.approx_lt(&self.bound) } else { g.approx_le(&self.bound) };
                if !ok {
                    return false;
                }
            }
        }
        true
    }
}

/// A family `x_i = u_i + e` in the slab space cut out by `y_i = (1+1/2k) u_i - (1/2k) e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lifted<S> {
    pub family: VectorFamily<S>,
    pub functionals: Vec<Vec<S>>,
    pub cap: Option<Cap<S>>,
}

/// Lifts an almost orthogonal set with bound `<= 1/(2k+1)` to a k-collapsing family of unit
/// vectors in dimension `dim + 1`.
///
/// Coordinates are `(coords, t)`; functionals carry the metric so that pairing by the plain
/// dot product reproduces the Euclidean inner products of the construction.
pub fn lift_almost_orthogonal<S: Scalar>(u: &AlmostOrthogonalSet<S>, k: usize) -> Result<Lifted<S>> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let kk = S::from_i64(k as i64);
    if !u.bound.approx_le(&(S::one() / (S::from_i64(2) * kk.clone() + S::one()))) {
        return Err(Error::PreconditionViolated(format!("bound {} exceeds 1/(2k+1) for k={k}", u.bound)));
    }
    let d = u.dim + 1;
    let half = S::one() / (S::from_i64(2) * kk);
    let factor = (S::one() + half.clone()) * u.scale.clone();
    let xs: Vec<Vec<S>> = u
        .coords
        .iter()
        .map(|c| {
            let mut x = c.clone();
            x.push(S::one());
            x
        })
        .collect();
    let ys: Vec<Vec<S>> = u
        .coords
        .iter()
        .map(|c| {
            let mut y: Vec<S> = u.metric_apply(c).into_iter().map(|v| v * factor.clone()).collect();
            y.push(-half.clone());
            y
        })
        .collect();
    let cap = match linalg::rank(&ys, d) {
        r if r == d => None,
        r if r + 1 == d => {
            let v = linalg::nullspace(&ys, d).pop().expect("corank one");
            let mut proj: Vec<S> = xs.iter().map(|x| dot(x, &v)).collect();
            proj.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
            let kk = k.min(proj.len());
            let top = proj.iter().rev().take(kk).fold(S::zero(), |a, b| a + b.clone());
            let bottom = proj.iter().take(kk).fold(S::zero(), |a, b| a + b.clone());
            let mut lambda = proj.iter().map(|p| p.abs()).fold(top.abs(), |a, b| if b > a { b } else { a });
            if bottom.abs() > lambda {
                lambda = bottom.abs();
            }
            lambda = if lambda.is_zero() { S::one() } else { S::from_i64(2) * lambda };
            Some(Cap { direction: v, bound: lambda })
        }
        r => return Err(Error::PreconditionViolated(format!("lifted functionals span only {r} of {d} dimensions"))),
    };
    let space = NormSpace::slab(d, ys.clone(), cap.clone())?;
    Ok(Lifted { family: VectorFamily::new(space, xs)?, functionals: ys, cap })
}

/// Seeded rejection-greedy unit vectors in `R^dim` with pairwise `|<u_i,u_j>| < delta`.
///
/// Stops after `max_trials` consecutive rejections or once `max_size` vectors are accepted.
pub fn greedy_unit_vectors(
    dim: usize,
    delta: f64,
    seed: u64,
    max_trials: u64,
    max_size: usize,
) -> Result<AlmostOrthogonalSet<f64>> {
    if dim == 0 || !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("need dim >= 1 and 0 < delta <= 1, got {dim}, {delta}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted: Vec<Vec<f64>> = Vec::new();
    let mut rejections = 0;
    while rejections < max_trials && accepted.len() < max_size {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= n);
        if accepted.iter().all(|a| dot(a, &v).abs() < delta) {
            accepted.push(v);
            rejections = 0;
        } else {
            rejections += 1;
        }
    }
    Ok(AlmostOrthogonalSet { dim, coords: accepted, metric: Metric::Identity, scale: 1.0, bound: delta, strict: true })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFieldParams {
    pub q: usize,
    pub s: usize,
}

impl FiniteFieldParams {
    pub fn new(q: usize, s: usize) -> Result<Self> {
        if crate::gf::prime_power(q).is_none() {
            return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
        }
        if s == 0 || s >= q {
            return Err(Error::InvalidParameter(format!("need 1 <= s < q, got s={s}, q={q}")));
        }
        Ok(FiniteFieldParams { q, s })
    }

    /// The `c` of the lower bound, `s - 1`.
    pub fn c(&self) -> usize {
        self.s - 1
    }
}

/// Value tables of all polynomials of degree `<= s` over `GF(q)`.
#[derive(Debug, Clone)]
pub struct PolynomialCode {
    pub q: usize,
    pub s: usize,
    /// `values[p][x] = p(x)`; polynomial `p` has base-`q` digits as coefficients.
    pub values: Vec<Vec<u16>>,
}

impl PolynomialCode {
    pub fn new(params: &FiniteFieldParams) -> Result<Self> {
        let (q, s) = (params.q, params.s);
        let field = GaloisField::new(q)?;
        let count = q.pow(s as u32 + 1);
        let values = (0..count)
            .map(|mut idx| {
                let coeffs: Vec<usize> = (0..=s)
                    .map(|_| {
                        let c = idx % q;
                        idx /= q;
                        c
                    })
                    .collect();
                (0..q).map(|x| field.eval(&coeffs, x) as u16).collect()
            })
            .collect();
        Ok(PolynomialCode { q, s, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of points where the two polynomials agree.
    pub fn coincidences(&self, a: usize, b: usize) -> usize {
        self.values[a].iter().zip(&self.values[b]).filter(|(x, y)| x == y).count()
    }

    /// `(q-1) M(p)` as an integer `q x q` matrix: `q-1` where `p(i) = j`, else `-1`.
    pub fn scaled_matrix(&self, a: usize) -> Vec<Vec<i64>> {
        let q = self.q;
        (0..q)
            .map(|i| (0..q).map(|j| if self.values[a][i] as usize == j { q as i64 - 1 } else { -1 }).collect())
            .collect()
    }

    /// `<M(p_a), M(p_b)>` computed entrywise from the matrices.
    pub fn frobenius(&self, a: usize, b: usize) -> Rational {
        let (ma, mb) = (self.scaled_matrix(a), self.scaled_matrix(b));
        let s: i64 = ma.iter().flatten().zip(mb.iter().flatten()).map(|(x, y)| x * y).sum();
        let q1 = self.q as i64 - 1;
        Rational::ratio(s, q1 * q1)
    }

    /// Inner product of the normalised vectors, `(c - 1)/(q - 1)` for distinct polynomials.
    pub fn normalised_gram(&self, a: usize, b: usize) -> Rational {
        let q = self.q as i64;
        self.frobenius(a, b) * Rational::ratio(q - 1, q * q)
    }

    /// `(c - 1)/(q - 1)` from the coincidence count alone.
    pub fn gram_from_coincidences(&self, a: usize, b: usize) -> Rational {
        Rational::ratio(self.coincidences(a, b) as i64 - 1, self.q as i64 - 1)
    }

    /// True when every row of every `M(p)` sums to zero.
    pub fn rows_sum_to_zero(&self) -> bool {
        (0..self.len()).all(|a| self.scaled_matrix(a).iter().all(|r| r.iter().sum::<i64>() == 0))
    }

    pub fn all_distinct(&self) -> bool {
        let mut v = self.values.clone();
        v.sort();
        v.dedup();
        v.len() == self.values.len()
    }

    /// Unit vectors in the `(q^2 - q)`-dimensional row-sum-zero subspace.
    pub fn to_almost_orthogonal(&self) -> AlmostOrthogonalSet<Rational> {
        let q = self.q as i64;
        let coords = (0..self.len())
            .map(|a| {
                self.scaled_matrix(a)
                    .into_iter()
                    .flat_map(|row| row.into_iter().take(self.q - 1).map(Rational::from_i64))
                    .collect()
            })
            .collect();
        let hi = Rational::ratio(self.s as i64 - 1, q - 1);
        let lo = Rational::ratio(1, q - 1);
        AlmostOrthogonalSet {
            dim: self.q * (self.q - 1),
            coords,
            metric: Metric::RowBlocks(self.q - 1),
            scale: Rational::ratio(1, q * q * (q - 1)),
            bound: if hi > lo { hi } else { lo },
            strict: false,
        }
    }
}

/// The `q^{s+1}` almost orthogonal unit vectors from polynomials of degree `<= s` over `GF(q)`.
pub fn polynomial_vectors(params: &FiniteFieldParams) -> Result<AlmostOrthogonalSet<Rational>> {
    Ok(PolynomialCode::new(params)?.to_almost_orthogonal())
}

fn r(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// `d` unit vectors in `{sum_{i<=d} a_i = 0}` of `l_1^{d+1}` with diameter `1 + 1/d - eps`
/// and centroid norm `1/d^2 + (1 - 1/d) eps`.
pub fn fixture_x(d: usize, eps: &Rational) -> Result<VectorFamily<Rational>> {
    let di = d as i64;
    if d < 2 || *eps <= r(0, 1) || *eps >= r(di + 1, di) {
        return Err(Error::InvalidParameter(format!("need d >= 2 and 0 < eps < 1 + 1/d, got d={d}, eps={eps}")));
    }
    let mut basis: Vec<Vec<Rational>> = (0..d - 1)
        .map(|i| {
            let mut b = zeros::<Rational>(d + 1);
            b[i] = r(1, 1);
            b[d - 1] = r(-1, 1);
            b
        })
        .collect();
    basis.push(unit(d + 1, d));
    let space = NormSpace::l1_subspace(basis)?;
    let a = (r(di + 1, di) - eps) / r(2, 1);
    let h = r(1, di * di) + (r(1, 1) - r(1, di)) * eps;
    let vectors = (0..d)
        .map(|i| {
            let mut x: Vec<Rational> = (0..=d).map(|j| if j < d { -&a / r(di, 1) } else { h.clone() }).collect();
            x[i] += &a;
            x
        })
        .collect();
    VectorFamily::new(space, vectors)
}

/// `d + 1` unit vectors in `{sum a_i = 0}` of `l_1^{d+1}`, pairwise at distance `1 + 1/d`,
/// summing to zero.
pub fn fixture_y(d: usize) -> Result<VectorFamily<Rational>> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("need d >= 2, got {d}")));
    }
    let di = d as i64;
    let basis = (0..d)
        .map(|i| {
            let mut b = zeros::<Rational>(d + 1);
            b[i] = r(1, 1);
            b[d] = r(-1, 1);
            b
        })
        .collect();
    let space = NormSpace::l1_subspace(basis)?;
    let vectors = (0..=d)
        .map(|i| (0..=d).map(|j| if i == j { r(di + 1, 2 * di) - r(1, 2 * di) } else { r(-1, 2 * di) }).collect())
        .collect();
    VectorFamily::new(space, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{check_k_collapsing, check_strong_balancing, diameter_centroid_check, ScanOptions};

    #[test]
    fn cross_family() {
        let f = linf_cross::<Rational>(3).unwrap();
        assert_eq!(f.len(), 6);
        assert!(check_k_collapsing(&f, 4, &ScanOptions::default()).unwrap().holds);
        assert!(check_strong_balancing(&f).unwrap().holds);
    }

    #[test]
    fn pk_gauges() {
        let one = vec![r(1, 1); 3];
        assert_eq!(pk_polytope_norm(3, 3).unwrap().gauge(&one).unwrap(), r(1, 1));
        assert_eq!(pk_polytope_norm(3, 2).unwrap().gauge(&one).unwrap(), r(3, 2));
        let p = pk_polytope_norm(2, 5).unwrap();
        assert_eq!(p.gauge(&[r(1, 2), r(-1, 1)]).unwrap(), r(1, 1));
    }

    #[test]
    fn polynomial_small_cases() {
        let c = PolynomialCode::new(&FiniteFieldParams::new(3, 1).unwrap()).unwrap();
        assert_eq!(c.len(), 9);
        assert!(c.all_distinct() && c.rows_sum_to_zero());
        for a in 0..9 {
            assert_eq!(c.frobenius(a, a), r(9, 2));
            for b in 0..a {
                let g = c.normalised_gram(a, b);
                assert!(g == r(-1, 2) || g == r(0, 1));
                assert_eq!(g, c.gram_from_coincidences(a, b));
            }
        }
        let u = polynomial_vectors(&FiniteFieldParams::new(4, 2).unwrap()).unwrap();
        assert_eq!(u.len(), 64);
        assert_eq!(u.bound, r(1, 3));
        assert!(u.verify());
    }

    #[test]
    fn reduced_coordinates_preserve_gram() {
        let c = PolynomialCode::new(&FiniteFieldParams::new(5, 2).unwrap()).unwrap();
        let u = c.to_almost_orthogonal();
        for (a, b) in [(0, 1), (3, 77), (12, 12), (100, 124)] {
            assert_eq!(u.gram(a, b), c.normalised_gram(a, b));
        }
    }

    #[test]
    fn lift_with_cap() {
        let u = AlmostOrthogonalSet {
            dim: 2,
            coords: vec![vec![r(1, 1), r(0, 1)], vec![r(0, 1), r(1, 1)]],
            metric: Metric::Identity,
            scale: r(1, 1),
            bound: r(0, 1),
            strict: true,
        };
        let l = lift_almost_orthogonal(&u, 2).unwrap();
        assert!(l.cap.is_some());
        for x in &l.family.vectors {
            assert_eq!(l.family.space.norm(x).unwrap(), r(1, 1));
        }
        assert!(check_k_collapsing(&l.family, 2, &ScanOptions::default()).unwrap().holds);
    }

    #[test]
    fn lift_polynomial_q5() {
        let u = polynomial_vectors(&FiniteFieldParams::new(5, 1).unwrap()).unwrap();
        // Gram values reach -1/4, inside 1/(2k+1) only for k = 1
        assert!(lift_almost_orthogonal(&u, 2).is_err());
        let l = lift_almost_orthogonal(&u, 1).unwrap();
        assert_eq!(l.family.space.dim, 21);
        for (i, x) in l.family.vectors.iter().enumerate() {
            for (j, y) in l.functionals.iter().enumerate() {
                let v = dot(x, y);
                if i == j {
                    assert_eq!(v, r(1, 1));
                } else {
                    assert!(v >= r(-1, 1) && v <= r(0, 1));
                }
            }
            assert_eq!(l.family.space.norm(x).unwrap(), r(1, 1));
        }
    }

    #[test]
    fn greedy_vectors() {
        let u = greedy_unit_vectors(49, 0.2, 1, 2000, 10_000).unwrap();
        assert!(u.len() >= 2);
        assert!(u.verify());
        let line = greedy_unit_vectors(1, 0.1, 3, 100, 10).unwrap();
        assert_eq!(line.len(), 1);
    }

    #[test]
    fn fixtures() {
        let x = fixture_x(2, &r(1, 10)).unwrap();
        let rep = diameter_centroid_check(&x).unwrap();
        assert_eq!(rep.diameter, r(7, 5));
        assert_eq!(rep.centroid_norm, r(3, 10));
        let y = fixture_y(3).unwrap();
        for v in &y.vectors {
            assert_eq!(y.space.norm(v).unwrap(), r(1, 1));
        }
        assert_eq!(diameter_centroid_check(&y).unwrap().diameter, r(4, 3));
        assert!(fixture_x(3, &r(4, 3)).is_err());
        assert!(fixture_x(3, &r(1, 3)).is_ok());
    }
}
