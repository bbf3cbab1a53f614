//! Finite-dimensional normed spaces: norms, dual norms and dual unit vectors.
//!
//! Vectors and functionals are coordinate arrays paired by the plain dot product.
//! For [`NormKind::L1Subspace`] both live in ambient coordinates.

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp;
use crate::scalar::{sign_of, Rational, Scalar};
use crate::vector::{convert, dot, max_abs, scale};

/// An optional extra slab `|<direction, x>| <= bound` closing a slab ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Cap<S> {
    pub direction: Vec<S>,
    pub bound: S,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NormKind<S> {
    /// `l_p` norm with `1 <= p <= inf` (`f64::INFINITY` for the max norm).
    Lp { p: f64 },
    /// Unit ball `{x : |<y_i, x>| <= 1 for all i}`, optionally capped.
    Slab { functionals: Vec<Vec<S>>, cap: Option<Cap<S>> },
    /// Subspace of `l_1^n` spanned by `basis`, with the restricted `l_1` norm.
    L1Subspace { basis: Vec<Vec<S>> },
    /// Unit ball `conv{+-g_j}`; the gauge is an exact LP.
    Polytope { generators: Vec<Vec<S>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormSpace<S> {
    pub dim: usize,
    pub kind: NormKind<S>,
}

impl<S: Scalar> NormSpace<S> {
    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
        }
        Ok(NormSpace { dim, kind: NormKind::Lp { p } })
    }

    pub fn linf(dim: usize) -> Self {
        NormSpace { dim, kind: NormKind::Lp { p: f64::INFINITY } }
    }

    pub fn l1(dim: usize) -> Self {
        NormSpace { dim, kind: NormKind::Lp { p: 1.0 } }
    }

    pub fn l2(dim: usize) -> Self {
        NormSpace { dim, kind: NormKind::Lp { p: 2.0 } }
    }

    /// Slab ball; fails if the functionals (and cap) do not span, since the ball would be unbounded.
    pub fn slab(dim: usize, functionals: Vec<Vec<S>>, cap: Option<Cap<S>>) -> Result<Self> {
        for f in &functionals {
            check_len(dim, f)?;
        }
        let mut rows = functionals.clone();
        if let Some(c) = &cap {
            check_len(dim, &c.direction)?;
            if !c.bound.is_positive() {
                return Err(Error::InvalidParameter("cap bound must be positive".into()));
            }
            rows.push(c.direction.clone());
        }
        if linalg::rank(&rows, dim) < dim {
            return Err(Error::UnboundedBall("slab functionals do not span the dual space".into()));
        }
        Ok(NormSpace { dim, kind: NormKind::Slab { functionals, cap } })
    }

    pub fn l1_subspace(basis: Vec<Vec<S>>) -> Result<Self> {
        let ambient = basis.first().map_or(0, |b| b.len());
        for b in &basis {
            check_len(ambient, b)?;
        }
        if linalg::rank(&basis, ambient) < basis.len() {
            return Err(Error::InvalidParameter("subspace basis is linearly dependent".into()));
        }
        Ok(NormSpace { dim: basis.len(), kind: NormKind::L1Subspace { basis } })
    }

    pub fn polytope(dim: usize, generators: Vec<Vec<S>>) -> Result<Self> {
        for g in &generators {
            check_len(dim, g)?;
        }
        if linalg::rank(&generators, dim) < dim {
            return Err(Error::UnboundedBall("polytope generators do not span".into()));
        }
        Ok(NormSpace { dim, kind: NormKind::Polytope { generators } })
    }

    /// Length of coordinate arrays for vectors in this space.
    pub fn coord_len(&self) -> usize {
        match &self.kind {
            NormKind::L1Subspace { basis } => basis.first().map_or(0, |b| b.len()),
            _ => self.dim,
        }
    }

    /// Checks that `x` is a vector of this space.
    pub fn check_member(&self, x: &[S]) -> Result<()> {
        check_len(self.coord_len(), x)?;
        if let NormKind::L1Subspace { basis } = &self.kind {
            let n = self.coord_len();
            let cols: Vec<Vec<S>> = (0..n).map(|i| basis.iter().map(|b| b[i].clone()).collect()).collect();
            if linalg::solve_any(&cols, x, basis.len()).is_none() {
                return Err(Error::NotInSubspace);
            }
        }
        Ok(())
    }

    /// Norm of `x` after a membership check.
    pub fn norm(&self, x: &[S]) -> Result<S> {
        self.check_member(x)?;
        self.gauge(x)
    }

    /// Norm of `x` assuming `x` already belongs to the space.
    pub fn gauge(&self, x: &[S]) -> Result<S> {
        match &self.kind {
            NormKind::Lp { p } => lp_norm(x, *p),
            NormKind::Slab { functionals, cap } => Ok(slab_gauge(functionals, cap.as_ref(), x).0),
            NormKind::L1Subspace { .. } => lp_norm(x, 1.0),
            NormKind::Polytope { generators } => {
                let gens: Vec<Vec<Rational>> = generators.iter().map(|g| convert(g)).collect();
                let v = lp::l1_decomposition(&gens, &convert::<S, Rational>(x)).ok_or(Error::NotInSpan)?;
                Ok(crate::vector::cast(&v))
            }
        }
    }

    /// A functional `f` with `<f, x> = ||x||` and `||f||_* = 1`.
    pub fn dual_unit_vector(&self, x: &[S]) -> Result<Vec<S>> {
        self.check_member(x)?;
        if x.iter().all(|v| v.is_zero()) {
            return Err(Error::ZeroVector);
        }
        match &self.kind {
            NormKind::Lp { p } => {
                if *p == 1.0 {
                    Ok(x.iter().map(sign_of).collect())
                } else if p.is_infinite() {
                    let m = max_abs(x);
                    let i = x.iter().position(|v| v.abs() == m).unwrap_or(0);
                    let mut f = vec![S::zero(); x.len()];
                    f[i] = sign_of(&x[i]);
                    Ok(f)
                } else {
                    let nrm = lp_norm(x, *p)?;
                    let denom = nrm.powf(p - 1.0).ok_or_else(|| Error::Inexact(format!("l_{p} dual vector")))?;
                    x.iter()
                        .map(|v| {
                            let mag =
                                v.abs().powf(p - 1.0).ok_or_else(|| Error::Inexact(format!("l_{p} dual vector")))?;
                            Ok(sign_of(v) * mag / denom.clone())
                        })
                        .collect()
                }
            }
            NormKind::Slab { functionals, cap } => {
                let (_, idx, sign) = slab_gauge(functionals, cap.as_ref(), x);
                if idx < functionals.len() {
                    Ok(scale(&functionals[idx], &sign))
                } else {
                    let c = cap.as_ref().expect("cap index implies a cap");
                    Ok(scale(&c.direction, &(sign / c.bound.clone())))
                }
            }
            NormKind::L1Subspace { .. } => Ok(x.iter().map(sign_of).collect()),
            NormKind::Polytope { generators } => {
                let gens: Vec<Vec<Rational>> = generators.iter().map(|g| convert(g)).collect();
                let (_, f) = lp::max_functional(&gens, &convert::<S, Rational>(x)).ok_or(Error::NotInSpan)?;
                Ok(convert(&f))
            }
        }
    }

    /// Dual norm `sup { <f, x> : ||x|| <= 1 }` of a functional.
    pub fn dual_norm(&self, f: &[S]) -> Result<S> {
        check_len(self.coord_len(), f)?;
        match &self.kind {
            NormKind::Lp { p } => {
                let q = if *p == 1.0 {
                    f64::INFINITY
                } else if p.is_infinite() {
                    1.0
                } else {
                    p / (p - 1.0)
                };
                lp_norm(f, q)
            }
            NormKind::Slab { functionals, cap } => {
                let mut gens: Vec<Vec<Rational>> = functionals.iter().map(|g| convert(g)).collect();
                if let Some(c) = cap {
                    let b = c.bound.to_rational();
                    gens.push(convert::<S, Rational>(&c.direction).iter().map(|v| v / &b).collect());
                }
                let v = lp::l1_decomposition(&gens, &convert::<S, Rational>(f)).ok_or(Error::NotInSpan)?;
                Ok(crate::vector::cast(&v))
            }
            NormKind::L1Subspace { basis } => {
                let v = l1_subspace_dual(basis, f);
                Ok(crate::vector::cast(&v))
            }
            NormKind::Polytope { generators } => {
                Ok(generators.iter().map(|g| dot(g, f).abs()).fold(S::zero(), |m, v| if v > m { v } else { m }))
            }
        }
    }

    /// Converts the space to another backend.
    pub fn cast<T: Scalar>(&self) -> NormSpace<T> {
        let kind = match &self.kind {
            NormKind::Lp { p } => NormKind::Lp { p: *p },
            NormKind::Slab { functionals, cap } => NormKind::Slab {
                functionals: functionals.iter().map(|f| convert(f)).collect(),
                cap: cap
                    .as_ref()
                    .map(|c| Cap { direction: convert(&c.direction), bound: crate::vector::cast(&c.bound) }),
            },
            NormKind::L1Subspace { basis } => {
                NormKind::L1Subspace { basis: basis.iter().map(|b| convert(b)).collect() }
            }
            NormKind::Polytope { generators } => {
                NormKind::Polytope { generators: generators.iter().map(|g| convert(g)).collect() }
            }
        };
        NormSpace { dim: self.dim, kind }
    }

    /// Short name of the norm kind, as used in descriptors.
    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            NormKind::Lp { p } if p.is_infinite() => "linf",
            NormKind::Lp { .. } => "lp",
            NormKind::Slab { .. } => "slab",
            NormKind::L1Subspace { .. } => "l1sub",
            NormKind::Polytope { .. } => "polytope",
        }
    }
}

fn check_len<S>(expected: usize, x: &[S]) -> Result<()> {
    if x.len() != expected {
        Err(Error::DimensionMismatch { expected, got: x.len() })
    } else {
        Ok(())
    }
}

fn lp_norm<S: Scalar>(x: &[S], p: f64) -> Result<S> {
    if p.is_infinite() {
        return Ok(max_abs(x));
    }
    if p == 1.0 {
        return Ok(x.iter().fold(S::zero(), |acc, v| acc + v.abs()));
    }
    if S::EXACT {
        if p.fract() != 0.0 {
            return Err(Error::Inexact(format!("l_{p} norm needs the float backend")));
        }
        let e = p as u32;
        let s = x.iter().fold(S::zero(), |acc, v| acc + v.abs().powi(e));
        return s.nth_root(e).ok_or_else(|| Error::Inexact(format!("l_{p} norm is irrational here")));
    }
    let s = x.iter().fold(S::zero(), |acc, v| acc + v.abs().powf(p).expect("float powf"));
    Ok(s.powf(1.0 / p).expect("float powf"))
}

/// Slab gauge with the lowest index attaining it (cap counted last) and its sign.
fn slab_gauge<S: Scalar>(functionals: &[Vec<S>], cap: Option<&Cap<S>>, x: &[S]) -> (S, usize, S) {
    let mut best = S::zero();
    let mut idx = 0;
    let mut sign = S::one();
    for (i, y) in functionals.iter().enumerate() {
        let v = dot(y, x);
        let a = v.abs();
        if a > best {
            best = a;
            idx = i;
            sign = sign_of(&v);
        }
    }
    if let Some(c) = cap {
        let v = dot(&c.direction, x) / c.bound.clone();
        let a = v.abs();
        if a > best {
            best = a;
            idx = functionals.len();
            sign = sign_of(&v);
        }
    }
    (best, idx, sign)
}

/// `max <f, x>` over `x = B c` with `||x||_1 <= 1`.
fn l1_subspace_dual<S: Scalar>(basis: &[Vec<S>], f: &[S]) -> Rational {
    let n = f.len();
    let d = basis.len();
    let basis: Vec<Vec<Rational>> = basis.iter().map(|b| convert(b)).collect();
    let f: Vec<Rational> = convert(f);
    // variables (x+, x-, c+, c-, slack)
    let nv = 2 * n + 2 * d;
    let mut a_eq: Vec<Vec<Rational>> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut row = vec![Rational::from_i64(0); nv + 1];
        row[i] = Rational::from_i64(1);
        row[n + i] = Rational::from_i64(-1);
        for (j, b) in basis.iter().enumerate() {
            row[2 * n + j] = -b[i].clone();
            row[2 * n + d + j] = b[i].clone();
        }
        a_eq.push(row);
    }
    let mut norm_row = vec![Rational::from_i64(0); nv + 1];
    for v in norm_row.iter_mut().take(2 * n) {
        *v = Rational::from_i64(1);
    }
    norm_row[nv] = Rational::from_i64(1); // slack
    a_eq.push(norm_row);
    let mut b = vec![Rational::from_i64(0); n];
    b.push(Rational::from_i64(1));
    let mut c = vec![Rational::from_i64(0); nv + 1];
    for i in 0..n {
        c[i] = -f[i].clone();
        c[n + i] = f[i].clone();
    }
    match lp::minimize_eq(&a_eq, &b, &c) {
        lp::LpOutcome::Optimal { value, .. } => -value,
        _ => Rational::from_i64(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn lp_norms_exact() {
        let linf = NormSpace::<Rational>::linf(2);
        assert_eq!(linf.norm(&[r(3, 1), r(-4, 1)]).unwrap(), r(4, 1));
        let l2 = NormSpace::<Rational>::l2(2);
        assert_eq!(l2.norm(&[r(3, 1), r(-4, 1)]).unwrap(), r(5, 1));
        let l1 = NormSpace::<Rational>::l1(2);
        assert_eq!(l1.norm(&[r(3, 1), r(-4, 1)]).unwrap(), r(7, 1));
        assert!(matches!(l2.norm(&[r(1, 1), r(1, 1)]), Err(Error::Inexact(_))));
    }

    #[test]
    fn dual_unit_vectors() {
        let linf = NormSpace::<Rational>::linf(2);
        assert_eq!(linf.dual_unit_vector(&[r(1, 2), r(1, 2)]).unwrap(), vec![r(1, 1), r(0, 1)]);
        let l1 = NormSpace::<Rational>::l1(2);
        assert_eq!(l1.dual_unit_vector(&[r(1, 1), r(-2, 1)]).unwrap(), vec![r(1, 1), r(-1, 1)]);
        assert_eq!(linf.dual_unit_vector(&[r(0, 1), r(0, 1)]), Err(Error::ZeroVector));
        let l2 = NormSpace::<f64>::l2(2);
        let f = l2.dual_unit_vector(&[3.0, 4.0]).unwrap();
        assert!((f[0] - 0.6).abs() < 1e-12 && (f[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn slab_norm_and_dual() {
        let s = NormSpace::slab(2, vec![vec![r(1, 1), r(0, 1)], vec![r(0, 1), r(1, 1)], vec![r(1, 2), r(1, 2)]], None)
            .unwrap();
        assert_eq!(s.norm(&[r(1, 1), r(-1, 2)]).unwrap(), r(1, 1));
        assert_eq!(s.dual_norm(&[r(1, 1), r(1, 1)]).unwrap(), r(2, 1));
        let f = s.dual_unit_vector(&[r(1, 1), r(-1, 2)]).unwrap();
        assert_eq!(f, vec![r(1, 1), r(0, 1)]);
        assert!(NormSpace::slab(2, vec![vec![r(1, 1), r(0, 1)]], None).is_err());
    }

    #[test]
    fn capped_slab() {
        let s = NormSpace::slab(
            2,
            vec![vec![r(1, 1), r(0, 1)]],
            Some(Cap { direction: vec![r(0, 1), r(1, 1)], bound: r(2, 1) }),
        )
        .unwrap();
        assert_eq!(s.norm(&[r(1, 2), r(1, 1)]).unwrap(), r(1, 2));
        assert_eq!(s.norm(&[r(1, 2), r(4, 1)]).unwrap(), r(2, 1));
        let f = s.dual_unit_vector(&[r(1, 2), r(4, 1)]).unwrap();
        assert_eq!(f, vec![r(0, 1), r(1, 2)]);
        assert_eq!(s.dual_norm(&f).unwrap(), r(1, 1));
    }

    #[test]
    fn l1_subspace() {
        // {x in l_1^3 : x1 + x2 + x3 = 0}
        let s =
            NormSpace::l1_subspace(vec![vec![r(1, 1), r(0, 1), r(-1, 1)], vec![r(0, 1), r(1, 1), r(-1, 1)]]).unwrap();
        assert_eq!(s.norm(&[r(1, 1), r(1, 1), r(-2, 1)]).unwrap(), r(4, 1));
        assert_eq!(s.norm(&[r(1, 1), r(0, 1), r(0, 1)]), Err(Error::NotInSubspace));
        let x = vec![r(1, 1), r(-1, 1), r(0, 1)];
        let f = s.dual_unit_vector(&x).unwrap();
        assert_eq!(dot(&f, &x), r(2, 1));
        assert_eq!(s.dual_norm(&f).unwrap(), r(1, 1));
        // e1 restricted to the subspace has dual norm 1/2
        assert_eq!(s.dual_norm(&[r(1, 1), r(0, 1), r(0, 1)]).unwrap(), r(1, 2));
    }

    #[test]
    fn polytope_gauge() {
        let gens = vec![vec![r(1, 1), r(0, 1)], vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(1, 1)]];
        let s = NormSpace::polytope(2, gens).unwrap();
        assert_eq!(s.norm(&[r(1, 1), r(-1, 1)]).unwrap(), r(2, 1));
        let x = vec![r(2, 1), r(1, 1)];
        let f = s.dual_unit_vector(&x).unwrap();
        assert_eq!(dot(&f, &x), s.norm(&x).unwrap());
        assert_eq!(s.dual_norm(&f).unwrap(), r(1, 1));
    }
}
