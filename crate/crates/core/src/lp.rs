//! Exact two-phase simplex over the rationals (Bland's rule, so it never cycles).

use num::{One, Signed, Zero};

use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs the simplex loop for `cost` over the columns `< allowed`.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.rows[i][j].is_zero() && !cost[b].is_zero() {
                        rc -= &cost[b] * &self.rows[i][j];
                    }
                }
                if rc.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Minimises `c.x` subject to `A x = b`, `x >= 0`.
pub fn minimize_eq(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let neg = b[i].is_negative();
        let mut row = vec![Rational::zero(); width + 1];
        for j in 0..n {
            row[j] = if neg { -a[i][j].clone() } else { a[i][j].clone() };
        }
        row[n + i] = Rational::one();
        row[width] = if neg { -b[i].clone() } else { b[i].clone() };
        rows.push(row);
    }
    let mut t = Tableau { rows, basis: (n..n + m).collect(), width };

    let mut phase1 = vec![Rational::zero(); width];
    for v in phase1.iter_mut().skip(n) {
        *v = Rational::one();
    }
    t.optimize(&phase1, width);
    let infeas: Rational = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bcol)| bcol >= n)
        .map(|(i, _)| t.rhs(i).clone())
        .fold(Rational::zero(), |acc, v| acc + v);
    if infeas.is_positive() {
        return LpOutcome::Infeasible;
    }

    // drive artificial columns out of the basis, dropping redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => {
                    t.pivot(i, j);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    let mut cost = c.to_vec();
    cost.resize(width, Rational::zero());
    if !t.optimize(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bcol) in t.basis.iter().enumerate() {
        if bcol < n {
            x[bcol] = t.rhs(i).clone();
        }
    }
    let value = x.iter().zip(c).fold(Rational::zero(), |acc, (xi, ci)| acc + xi * ci);
    LpOutcome::Optimal { value, x }
}

/// Maximises `c.x` subject to `A x <= b`, `x >= 0` (slack columns added internally).
pub fn maximize_le(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    let rows: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.resize(n + m, Rational::zero());
            r[n + i] = Rational::one();
            r
        })
        .collect();
    let mut cost: Vec<Rational> = c.iter().map(|v| -v.clone()).collect();
    cost.resize(n + m, Rational::zero());
    match minimize_eq(&rows, b, &cost) {
        LpOutcome::Optimal { value, mut x } => {
            x.truncate(n);
            LpOutcome::Optimal { value: -value, x }
        }
        other => other,
    }
}

/// Minimum of `sum |c_j|` over representations `target = sum c_j g_j`;
/// `None` when `target` is outside the span of the generators.
///
/// This is the gauge of `target` for the symmetric polytope `conv{+-g_j}`.
pub fn l1_decomposition(generators: &[Vec<Rational>], target: &[Rational]) -> Option<Rational> {
    let k = generators.len();
    let d = target.len();
    let a: Vec<Vec<Rational>> = (0..d)
        .map(|row| {
            let mut r = Vec::with_capacity(2 * k);
            for g in generators {
                r.push(g[row].clone());
            }
            for g in generators {
                r.push(-g[row].clone());
            }
            r
        })
        .collect();
    let c = vec![Rational::one(); 2 * k];
    match minimize_eq(&a, target, &c) {
        LpOutcome::Optimal { value, .. } => Some(value),
        _ => None,
    }
}

/// A functional `f` maximising `<f, x>` subject to `|<f, g_j>| <= 1`.
///
/// Returns `None` when the optimum is unbounded (the generators do not span).
pub fn max_functional(generators: &[Vec<Rational>], x: &[Rational]) -> Option<(Rational, Vec<Rational>)> {
    let d = x.len();
    // variables f+ (d) and f- (d); rows g.f <= 1 and -g.f <= 1
    let mut a = Vec::with_capacity(2 * generators.len());
    for g in generators {
        let mut pos = Vec::with_capacity(2 * d);
        pos.extend(g.iter().cloned());
        pos.extend(g.iter().map(|v| -v.clone()));
        let neg: Vec<Rational> = pos.iter().map(|v| -v.clone()).collect();
        a.push(pos);
        a.push(neg);
    }
    let b = vec![Rational::one(); a.len()];
    let mut c: Vec<Rational> = x.to_vec();
    c.extend(x.iter().map(|v| -v.clone()));
    match maximize_le(&a, &b, &c) {
        LpOutcome::Optimal { value, x: sol } => {
            let f = (0..d).map(|i| &sol[i] - &sol[d + i]).collect();
            Some((value, f))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn small_lp() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6
        let a = vec![vec![r(1, 1), r(2, 1)], vec![r(3, 1), r(1, 1)]];
        let out = maximize_le(&a, &[r(4, 1), r(6, 1)], &[r(1, 1), r(1, 1)]);
        match out {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, r(14, 5));
                assert_eq!(x, vec![r(8, 5), r(6, 5)]);
            }
            _ => panic!("expected optimum"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x = -1 with x >= 0
        let out = minimize_eq(&[vec![r(1, 1)]], &[r(-1, 1)], &[r(1, 1)]);
        assert_eq!(out, LpOutcome::Infeasible);
        // max x with no constraints on x
        let out = maximize_le(&[vec![r(0, 1)]], &[r(1, 1)], &[r(1, 1)]);
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        // x + y = 1, 2x + 2y = 2, min x
        let a = vec![vec![r(1, 1), r(1, 1)], vec![r(2, 1), r(2, 1)]];
        match minimize_eq(&a, &[r(1, 1), r(2, 1)], &[r(1, 1), r(0, 1)]) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(0, 1)),
            _ => panic!(),
        }
    }

    #[test]
    fn l1_decomposition_in_the_plane() {
        let gens = vec![vec![r(1, 1), r(0, 1)], vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(1, 1)]];
        assert_eq!(l1_decomposition(&gens, &[r(1, 1), r(1, 1)]), Some(r(1, 1)));
        assert_eq!(l1_decomposition(&gens, &[r(1, 1), r(-1, 1)]), Some(r(2, 1)));
        let line = vec![vec![r(1, 1), r(0, 1)]];
        assert_eq!(l1_decomposition(&line, &[r(0, 1), r(1, 1)]), None);
    }

    #[test]
    fn max_functional_matches_gauge() {
        let gens = vec![vec![r(1, 1), r(0, 1)], vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(1, 1)]];
        let x = vec![r(3, 1), r(-1, 1)];
        let (value, f) = max_functional(&gens, &x).unwrap();
        assert_eq!(Some(value.clone()), l1_decomposition(&gens, &x));
        assert_eq!(crate::vector::dot(&f, &x), value);
    }
}
