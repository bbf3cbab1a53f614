//! Maximising `sum alpha_i^{2p}` over sorted k-collapsing scalar families.
//!
//! A family is normalised so that `alpha_m = 1` and `alpha_1 >= ... >= alpha_{m-1}`; the
//! remaining coordinates range over a polytope, so the convex objective peaks at a vertex.
//! Closed forms give the peak directly; the vertex oracle enumerates every vertex exactly.

use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{Rational, Scalar};
use crate::vector::dot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    UpperBoundOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub value: Rational,
    /// Attaining vertex `(alpha_1, ..., alpha_{m-1})`, present when the value is exact.
    pub vertex: Option<Vec<Rational>>,
    pub exactness: Exactness,
    /// For the relaxed branch: the stationary point `t_0` and the relaxed value `s(t_0)`.
    pub relaxation: Option<(Rational, Rational)>,
}

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn int(n: i64) -> Rational {
    Rational::from_i64(n)
}

fn objective(v: &[Rational], p: u32) -> Rational {
    v.iter().fold(Rational::zero(), |acc, a| acc + Scalar::powi(a, 2 * p))
}

fn check_range(m: usize, k: usize) -> Result<()> {
    if m < 4 || k < 2 || k + 2 > m {
        return Err(Error::InvalidParameter(format!("need m >= 4 and 2 <= k <= m-2, got m={m}, k={k}")));
    }
    Ok(())
}

/// Balanced families (`sum alpha_i = 0`): the maximum of `sum_{i<m} alpha_i^2` is 1,
/// attained at `(0, ..., 0, -1)`.
pub fn max_sq_balanced(m: usize, k: usize) -> Result<OptResult> {
    check_range(m, k)?;
    let mut v = vec![Rational::zero(); m - 1];
    v[m - 2] = int(-1);
    Ok(OptResult { value: Rational::one(), vertex: Some(v), exactness: Exactness::Exact, relaxation: None })
}

/// Candidate vertices of the sorted collapsing polytope used by the closed forms.
fn named_vertices(m: usize, k: usize) -> Vec<Vec<Rational>> {
    let ki = k as i64;
    let mut out = vec![vec![q(-1, ki); m - 1]];
    let mut corner = vec![Rational::zero(); m - 1];
    corner[m - 2] = int(-1);
    out.push(corner);
    if k >= 3 {
        let mut v = vec![q(-1, ki); m - 1];
        v[0] = q(ki - 2, ki);
        out.push(v);
    }
    out
}

/// `t_0` and `s_{k,m}(t_0)` for the relaxed continuous branch.
pub fn relaxation_point(m: usize, k: usize) -> (Rational, Rational) {
    let (mi, ki) = (m as i64, k as i64);
    let t0 = q((ki - 1).pow(2) * (mi - ki - 1), 2 * (2 * ki - mi - 1) * (mi - ki - 1) + ki - 1);
    let s = s_km(m, k, &t0);
    (t0, s)
}

/// `s_{k,m}(t) = ((m-2k+1) t^2 + (k-1)^2 t) / (t + (m-1-k)(k-1))^2`.
pub fn s_km(m: usize, k: usize, t: &Rational) -> Rational {
    let (mi, ki) = (m as i64, k as i64);
    let num = int(mi - 2 * ki + 1) * t * t + int((ki - 1).pow(2)) * t;
    let den = t + int((mi - 1 - ki) * (ki - 1));
    num / (&den * &den)
}

/// Closed-form maximum of `sum_{i<m} alpha_i^{2p}` over sorted k-collapsing families
/// with `alpha_m = 1`.
///
/// For `p = 1` the value is exact when `k < 2m/3` and an upper bound otherwise.
/// For `p >= 2` it requires `k <= (m+1)/2` and is exact.
pub fn max_pow_general(m: usize, k: usize, p: u32) -> Result<OptResult> {
    check_range(m, k)?;
    if p == 0 {
        return Err(Error::InvalidParameter("p must be positive".into()));
    }
    if p >= 2 && 2 * k > m + 1 {
        return Err(Error::InvalidParameter(format!("p >= 2 needs k <= (m+1)/2, got m={m}, k={k}")));
    }
    let cands = named_vertices(m, k);
    let mut best = 0;
    let mut best_val = objective(&cands[0], p);
    for (i, v) in cands.iter().enumerate().skip(1) {
        let val = objective(v, p);
        if val > best_val {
            best = i;
            best_val = val;
        }
    }
    if p == 1 && 3 * k >= 2 * m {
        let (mi, ki) = (m as i64, k as i64);
        let relaxed = q((ki - 1).pow(2), 4 * (mi - ki - 1) * (2 * ki - mi) * (mi - ki));
        let value = if relaxed > best_val { relaxed } else { best_val };
        return Ok(OptResult {
            value,
            vertex: None,
            exactness: Exactness::UpperBoundOnly,
            relaxation: Some(relaxation_point(m, k)),
        });
    }
    Ok(OptResult { value: best_val, vertex: Some(cands[best].clone()), exactness: Exactness::Exact, relaxation: None })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: Rational,
    pub argmax: Vec<Rational>,
    pub vertices: Vec<Vec<Rational>>,
}

/// Largest `m` accepted by the vertex oracle.
pub const ORACLE_MAX_M: usize = 16;

/// Constraint rows `a . alpha <= b` of the sorted collapsing polytope.
fn constraints(m: usize, k: usize) -> Vec<(Vec<Rational>, Rational)> {
    let n = m - 1;
    let mut rows = Vec::with_capacity(m);
    for i in 0..n - 1 {
        let mut a = vec![Rational::zero(); n];
        a[i] = int(-1);
        a[i + 1] = int(1);
        rows.push((a, Rational::zero()));
    }
    // the k-1 largest plus alpha_m stay at most 1
    let mut top = vec![Rational::zero(); n];
    for v in top.iter_mut().take(k - 1) {
        *v = int(1);
    }
    rows.push((top, Rational::zero()));
    // the k smallest stay at least -1
    let mut bottom = vec![Rational::zero(); n];
    for v in bottom.iter_mut().skip(n - k) {
        *v = int(-1);
    }
    rows.push((bottom, int(1)));
    rows
}

/// Enumerates all vertices of the sorted collapsing polytope (intersected with
/// `sum alpha_i = -1` when `balanced`) and maximises `sum alpha_i^{2p}` over them.
pub fn vertex_oracle(m: usize, k: usize, p: u32, balanced: bool) -> Result<OracleResult> {
    check_range(m, k)?;
    if m > ORACLE_MAX_M {
        return Err(Error::InvalidParameter(format!("oracle supports m <= {ORACLE_MAX_M}, got {m}")));
    }
    let n = m - 1;
    let ineq = constraints(m, k);
    let eq: Vec<(Vec<Rational>, Rational)> = if balanced { vec![(vec![int(1); n], int(-1))] } else { Vec::new() };
    let pick = n - eq.len();
    let mut vertices: Vec<Vec<Rational>> = Vec::new();
    for (active, _) in crate::subsets::RevolvingDoor::new(ineq.len(), pick) {
        let mut a: Vec<Vec<Rational>> = eq.iter().map(|(r, _)| r.clone()).collect();
        let mut b: Vec<Rational> = eq.iter().map(|(_, v)| v.clone()).collect();
        for &i in &active {
            a.push(ineq[i].0.clone());
            b.push(ineq[i].1.clone());
        }
        let Some(x) = linalg::solve_unique(&a, &b, n) else { continue };
        if ineq.iter().all(|(row, rhs)| dot(row, &x) <= *rhs) && !vertices.contains(&x) {
            vertices.push(x);
        }
    }
    vertices.sort();
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    for v in &vertices {
        let val = objective(v, p);
        if best.as_ref().map_or(true, |(bv, _)| val > *bv) {
            best = Some((val, v.clone()));
        }
    }
    let (value, argmax) = best.ok_or_else(|| Error::InvariantBreach("collapsing polytope has no vertex".into()))?;
    Ok(OracleResult { value, argmax, vertices })
}

/// Appends `alpha_m = 1` and checks the k-collapsing condition of the full tuple.
pub fn vertex_is_collapsing(vertex: &[Rational], k: usize) -> bool {
    let mut full = vertex.to_vec();
    full.push(Rational::one());
    crate::family::scalar_k_collapsing(&full, k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub m: usize,
    pub k: usize,
    pub p: u32,
    pub closed_form: Rational,
    pub oracle: Rational,
    pub exactness: Exactness,
}

impl GridRow {
    /// Exact rows must agree with the oracle; bound rows must dominate it.
    pub fn consistent(&self) -> bool {
        match self.exactness {
            Exactness::Exact => self.closed_form == self.oracle,
            Exactness::UpperBoundOnly => self.oracle <= self.closed_form,
        }
    }
}

/// Closed form against oracle for every admissible `(m, k)` with `m` in `ms` and each `p`.
pub fn oracle_grid(ms: std::ops::RangeInclusive<usize>, ps: &[u32]) -> Result<Vec<GridRow>> {
    let mut rows = Vec::new();
    for m in ms {
        for k in 2..=m.saturating_sub(2) {
            for &p in ps {
                if p >= 2 && 2 * k > m + 1 {
                    continue;
                }
                let cf = max_pow_general(m, k, p)?;
                let or = vertex_oracle(m, k, p, false)?;
                rows.push(GridRow { m, k, p, closed_form: cf.value, oracle: or.value, exactness: cf.exactness });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        assert_eq!(max_pow_general(14, 3, 1).unwrap().value, q(13, 9));
        assert_eq!(max_pow_general(6, 2, 1).unwrap().value, q(5, 4));
        assert_eq!(max_pow_general(10, 4, 2).unwrap().value, int(1));
        let b = max_pow_general(9, 6, 1).unwrap();
        assert_eq!(b.exactness, Exactness::UpperBoundOnly);
        assert!(b.relaxation.is_some());
        assert!(max_pow_general(10, 6, 2).is_err());
    }

    #[test]
    fn balanced_oracle() {
        for m in 4..=9 {
            for k in 2..=m - 2 {
                let o = vertex_oracle(m, k, 1, true).unwrap();
                assert_eq!(o.value, int(1), "m={m} k={k}");
                assert_eq!(o.argmax, max_sq_balanced(m, k).unwrap().vertex.unwrap());
            }
        }
    }

    #[test]
    fn oracle_matches_closed_form_small() {
        for row in oracle_grid(4..=8, &[1, 2]).unwrap() {
            assert!(row.consistent(), "{row:?}");
        }
    }

    #[test]
    fn oracle_vertices_are_collapsing() {
        let o = vertex_oracle(9, 4, 1, false).unwrap();
        for v in &o.vertices {
            assert!(vertex_is_collapsing(v, 4), "{v:?}");
        }
    }

    #[test]
    fn relaxed_value_dominates_discrete_point() {
        let (m, k) = (9, 7);
        let (_, s0) = relaxation_point(m, k);
        assert!(s0 >= s_km(m, k, &int(k as i64 - 2)));
    }
}
