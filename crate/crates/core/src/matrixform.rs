//! Collapsing matrices, the trace/Frobenius rank certificate and Hadamard powers.

use crate::error::{Error, Result};
use crate::family::{scalar_k_collapsing, VectorFamily};
use crate::linalg;
use crate::scalar::Scalar;
use crate::spaces::NormSpace;
use crate::vector::{convert, dot};

/// Square matrix stored by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseMatrix<S> {
    pub m: usize,
    pub entries: Vec<Vec<S>>,
}

impl<S: Scalar> CollapseMatrix<S> {
    pub fn new(entries: Vec<Vec<S>>) -> Result<Self> {
        let m = entries.len();
        for row in &entries {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: row.len() });
            }
        }
        Ok(CollapseMatrix { m, entries })
    }

    pub fn identity(m: usize) -> Self {
        let entries = (0..m).map(|i| (0..m).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect();
        CollapseMatrix { m, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i][j]
    }

    pub fn trace(&self) -> S {
        (0..self.m).fold(S::zero(), |acc, i| acc + self.entries[i][i].clone())
    }

    pub fn frobenius_sq(&self) -> S {
        self.entries.iter().flatten().fold(S::zero(), |acc, v| acc + v.clone() * v.clone())
    }

    pub fn transpose(&self) -> Self {
        let entries = (0..self.m).map(|i| (0..self.m).map(|j| self.entries[j][i].clone()).collect()).collect();
        CollapseMatrix { m: self.m, entries }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let t = other.transpose();
        let entries = self.entries.iter().map(|row| t.entries.iter().map(|col| dot(row, col)).collect()).collect();
        CollapseMatrix { m: self.m, entries }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.m).all(|i| (0..i).all(|j| (self.entries[i][j].clone() - self.entries[j][i].clone()).approx_zero()))
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<S> {
        self.entries.iter().map(|row| row[j].clone()).collect()
    }

    pub fn cast<T: Scalar>(&self) -> CollapseMatrix<T> {
        CollapseMatrix { m: self.m, entries: self.entries.iter().map(|r| convert(r)).collect() }
    }
}

/// `A_ij = <x_i^*, x_j>` where `x_i^*` is the dual unit vector of `x_i`.
pub fn gram_from_family<S: Scalar>(fam: &VectorFamily<S>) -> Result<CollapseMatrix<S>> {
    let duals: Vec<Vec<S>> = fam.vectors.iter().map(|x| fam.space.dual_unit_vector(x)).collect::<Result<_>>()?;
    let entries = duals.iter().map(|f| fam.vectors.iter().map(|x| dot(f, x)).collect()).collect();
    Ok(CollapseMatrix { m: fam.len(), entries })
}

/// Rank by exact elimination (exact backend) or by SVD (float backend).
pub fn rank<S: Scalar>(a: &CollapseMatrix<S>) -> usize {
    if S::EXACT {
        linalg::rank(&a.entries, a.m)
    } else {
        let rows: Vec<Vec<f64>> = a.entries.iter().map(|r| r.iter().map(|v| v.to_f64()).collect()).collect();
        linalg::svd_rank(&rows, a.m)
    }
}

/// The columns of `A`, as vectors of `l_inf^m`; they span a space of dimension `rank(A)`.
///
/// When the rows of `A` are k-collapsing so is this family.
pub fn family_from_matrix<S: Scalar>(a: &CollapseMatrix<S>, d: usize) -> Result<VectorFamily<S>> {
    let r = rank(a);
    if r > d {
        return Err(Error::RankTooLarge { rank: r, d });
    }
    Ok(VectorFamily { space: NormSpace::linf(a.m), vectors: (0..a.m).map(|j| a.column(j)).collect() })
}

/// Divides each row by its diagonal entry.
///
/// Requires `a_ii >= 1` and `|a_ij| <= 1` off the diagonal (both are verified).
pub fn row_normalize<S: Scalar>(a: &CollapseMatrix<S>) -> Result<CollapseMatrix<S>> {
    let one = S::one();
    for i in 0..a.m {
        if !one.approx_le(&a.entries[i][i]) {
            return Err(Error::PreconditionViolated(format!("diagonal entry {} is below 1", i + 1)));
        }
        for j in 0..a.m {
            if i != j && !a.entries[i][j].abs().approx_le(&one) {
                return Err(Error::PreconditionViolated(format!(
                    "off-diagonal entry ({}, {}) exceeds 1 in absolute value",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let entries = a
        .entries
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let d = row[i].clone();
            row.iter().map(|v| v.clone() / d.clone()).collect()
        })
        .collect();
    Ok(CollapseMatrix { m: a.m, entries })
}

/// True when every row is k-collapsing as a scalar family.
pub fn check_rows<S: Scalar>(a: &CollapseMatrix<S>, k: usize) -> bool {
    a.entries.iter().all(|row| scalar_k_collapsing(row, k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankCertificate<S> {
    pub trace: S,
    pub frobenius_sq: S,
    /// `trace^2 / ||A||_F^2` (zero for the zero matrix).
    pub rank_lower_bound: S,
    pub rank: usize,
    /// Symmetric with `A^2 = (trace/rank) A`, i.e. the bound is attained.
    pub equality_case: bool,
}

impl<S: Scalar> RankCertificate<S> {
    /// `trace^2 <= rank * ||A||_F^2`, exact or with relative slack `1e-9` for floats.
    pub fn bound_holds(&self) -> bool {
        let lhs = self.trace.clone() * self.trace.clone();
        let rhs = S::from_i64(self.rank as i64) * self.frobenius_sq.clone();
        if S::EXACT {
            lhs <= rhs
        } else {
            lhs.to_f64() <= rhs.to_f64() * (1.0 + 1e-9) + 1e-12
        }
    }
}

/// Rank lower bound `rank(A) >= trace(A)^2 / ||A||_F^2` together with the true rank.
pub fn rank_certificate<S: Scalar>(a: &CollapseMatrix<S>) -> RankCertificate<S> {
    let trace = a.trace();
    let frobenius_sq = a.frobenius_sq();
    let r = rank(a);
    let rank_lower_bound =
        if frobenius_sq.is_zero() { S::zero() } else { trace.clone() * trace.clone() / frobenius_sq.clone() };
    let equality_case = if r == 0 {
        true
    } else if !a.is_symmetric() {
        false
    } else {
        let c = trace.clone() / S::from_i64(r as i64);
        let sq = a.mul(a);
        sq.entries
            .iter()
            .zip(&a.entries)
            .all(|(sr, ar)| sr.iter().zip(ar).all(|(s, v)| (s.clone() - c.clone() * v.clone()).approx_zero()))
    };
    RankCertificate { trace, frobenius_sq, rank_lower_bound, rank: r, equality_case }
}

/// Entrywise power `A^{(p)}`.
pub fn hadamard_power<S: Scalar>(a: &CollapseMatrix<S>, p: u32) -> CollapseMatrix<S> {
    CollapseMatrix { m: a.m, entries: a.entries.iter().map(|r| r.iter().map(|v| v.powi(p)).collect()).collect() }
}

/// `C(p + d - 1, p)`, the rank bound for the `p`-th Hadamard power of a rank-`d` matrix.
pub fn hadamard_rank_bound(d: usize, p: u32) -> u128 {
    crate::subsets::binomial((p as usize + d).saturating_sub(1) as u64, p as u64)
}
