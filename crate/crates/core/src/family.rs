//! Finite vector families and the collapsing / balancing conditions.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{self, LpOutcome};
use crate::scalar::{Rational, Scalar};
use crate::spaces::NormSpace;
use crate::subsets::{binomial, RevolvingDoor};
use crate::vector::{add_assign, convert, sub, sub_assign, sum_of, zeros};

#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily<S> {
    pub space: NormSpace<S>,
    pub vectors: Vec<Vec<S>>,
}

impl<S: Scalar> VectorFamily<S> {
    /// Builds a family after checking that every vector lies in the space.
    pub fn new(space: NormSpace<S>, vectors: Vec<Vec<S>>) -> Result<Self> {
        for v in &vectors {
            space.check_member(v)?;
        }
        Ok(VectorFamily { space, vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn norms(&self) -> Result<Vec<S>> {
        self.vectors.iter().map(|v| self.space.gauge(v)).collect()
    }

    pub fn sum(&self, idx: &[usize]) -> Vec<S> {
        sum_of(&self.vectors, idx, self.space.coord_len())
    }

    pub fn subfamily(&self, idx: &[usize]) -> Self {
        VectorFamily { space: self.space.clone(), vectors: idx.iter().map(|&i| self.vectors[i].clone()).collect() }
    }

    pub fn cast<T: Scalar>(&self) -> VectorFamily<T> {
        VectorFamily { space: self.space.cast(), vectors: self.vectors.iter().map(|v| convert(v)).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    KCollapsing(usize),
    FullCollapsing,
    StrongBalancing,
    WeakBalancing,
}

impl Condition {
    pub fn name(&self) -> String {
        match self {
            Condition::KCollapsing(k) => format!("{k}-collapsing"),
            Condition::FullCollapsing => "collapsing".into(),
            Condition::StrongBalancing => "strongly-balancing".into(),
            Condition::WeakBalancing => "weakly-balancing".into(),
        }
    }
}

/// Outcome of a condition check.
///
/// `witness` holds the lexicographically smallest violating subset (0-based).
/// `margin` is the largest subset-sum norm seen for collapsing checks, the norm of the
/// total for strong balancing, and the largest achievable minimum convex weight for weak
/// balancing (positive exactly when the origin is in the relative interior).
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport<S> {
    pub condition: Condition,
    pub holds: bool,
    pub witness: Option<Vec<usize>>,
    pub margin: S,
    pub sampled: bool,
    pub checked: u128,
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    /// Largest number of subsets enumerated exhaustively.
    pub budget: u64,
    /// Seed for sampling when the budget is exceeded; without it an error is returned.
    pub seed: Option<u64>,
    pub threads: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { budget: 20_000_000, seed: None, threads: 1 }
    }
}

struct ScanOutcome<S> {
    max_norm: S,
    witness: Option<Vec<usize>>,
    checked: u128,
}

fn merge<S: Scalar>(a: ScanOutcome<S>, b: ScanOutcome<S>) -> ScanOutcome<S> {
    let witness = match (a.witness, b.witness) {
        (Some(x), Some(y)) => Some(if x <= y { x } else { y }),
        (x, y) => x.or(y),
    };
    ScanOutcome {
        max_norm: if b.max_norm > a.max_norm { b.max_norm } else { a.max_norm },
        witness,
        checked: a.checked + b.checked,
    }
}

fn scan_range<S: Scalar>(fam: &VectorFamily<S>, k: usize, start: u128, count: u128) -> Result<ScanOutcome<S>> {
    let m = fam.len();
    let len = fam.space.coord_len();
    let one = S::one();
    let mut out = ScanOutcome { max_norm: S::zero(), witness: None, checked: 0 };
    let mut sum = zeros::<S>(len);
    for (step, (subset, swap)) in RevolvingDoor::starting_at(m, k, start, count).enumerate() {
        match swap {
            Some((left, entered)) if S::EXACT || step % 256 != 0 => {
                sub_assign(&mut sum, &fam.vectors[left]);
                add_assign(&mut sum, &fam.vectors[entered]);
            }
            _ => sum = fam.sum(&subset),
        }
        let nrm = fam.space.gauge(&sum)?;
        if !nrm.approx_le(&one) && out.witness.as_ref().map_or(true, |w| subset < *w) {
            out.witness = Some(subset);
        }
        if nrm > out.max_norm {
            out.max_norm = nrm;
        }
        out.checked += 1;
    }
    Ok(out)
}

fn scan_sampled<S: Scalar>(fam: &VectorFamily<S>, k: usize, samples: u64, seed: u64) -> Result<ScanOutcome<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = S::one();
    let mut out = ScanOutcome { max_norm: S::zero(), witness: None, checked: 0 };
    for _ in 0..samples {
        let mut subset = sample(&mut rng, fam.len(), k).into_vec();
        subset.sort_unstable();
        let nrm = fam.space.gauge(&fam.sum(&subset))?;
        if !nrm.approx_le(&one) && out.witness.as_ref().map_or(true, |w| subset < *w) {
            out.witness = Some(subset);
        }
        if nrm > out.max_norm {
            out.max_norm = nrm;
        }
        out.checked += 1;
    }
    Ok(out)
}

/// Checks `||sum_{i in I} x_i|| <= 1` for every `k`-subset `I`.
pub fn check_k_collapsing<S: Scalar>(
    fam: &VectorFamily<S>,
    k: usize,
    opts: &ScanOptions,
) -> Result<ConditionReport<S>> {
    let m = fam.len();
    if k == 0 || k > m {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= m, got k={k}, m={m}")));
    }
    let total = binomial(m as u64, k as u64);
    let (outcome, sampled) = if total > opts.budget as u128 {
        let seed = opts.seed.ok_or(Error::BudgetExceeded { needed: total, budget: opts.budget })?;
        (scan_sampled(fam, k, opts.budget, seed)?, true)
    } else if opts.threads <= 1 || total < 1024 {
        (scan_range(fam, k, 0, total)?, false)
    } else {
        let t = opts.threads as u128;
        let chunk = total.div_ceil(t);
        let parts: Vec<Result<ScanOutcome<S>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..t).map(|i| scope.spawn(move || scan_range(fam, k, i * chunk, chunk))).collect();
            handles.into_iter().map(|h| h.join().expect("scan thread panicked")).collect()
        });
        let mut acc = ScanOutcome { max_norm: S::zero(), witness: None, checked: 0 };
        for p in parts {
            acc = merge(acc, p?);
        }
        (acc, false)
    };
    Ok(ConditionReport {
        condition: Condition::KCollapsing(k),
        holds: outcome.witness.is_none(),
        witness: outcome.witness,
        margin: outcome.max_norm,
        sampled,
        checked: outcome.checked,
    })
}

/// Largest family size for which every subset is enumerated by `check_full_collapsing`.
pub const FULL_COLLAPSING_MAX: usize = 24;

/// Checks `||sum_{i in I} x_i|| <= 1` for every non-empty subset, walking a Gray code.
pub fn check_full_collapsing<S: Scalar>(fam: &VectorFamily<S>) -> Result<ConditionReport<S>> {
    let m = fam.len();
    if m > FULL_COLLAPSING_MAX {
        return Err(Error::InvalidParameter(format!(
            "full collapsing check supports at most {FULL_COLLAPSING_MAX} vectors, got {m}"
        )));
    }
    let one = S::one();
    let mut sum = zeros::<S>(fam.space.coord_len());
    let mut member = vec![false; m];
    let mut max_norm = S::zero();
    let mut witness: Option<Vec<usize>> = None;
    let mut checked = 0u128;
    for g in 1u64..(1u64 << m) {
        let bit = g.trailing_zeros() as usize;
        member[bit] = !member[bit];
        if member[bit] {
            add_assign(&mut sum, &fam.vectors[bit]);
        } else {
            sub_assign(&mut sum, &fam.vectors[bit]);
        }
        if !S::EXACT && g % 256 == 0 {
            let idx: Vec<usize> = (0..m).filter(|&i| member[i]).collect();
            sum = fam.sum(&idx);
        }
        let nrm = fam.space.gauge(&sum)?;
        if !nrm.approx_le(&one) {
            let idx: Vec<usize> = (0..m).filter(|&i| member[i]).collect();
            if witness.as_ref().map_or(true, |w| idx < *w) {
                witness = Some(idx);
            }
        }
        if nrm > max_norm {
            max_norm = nrm;
        }
        checked += 1;
    }
    Ok(ConditionReport {
        condition: Condition::FullCollapsing,
        holds: witness.is_none(),
        witness,
        margin: max_norm,
        sampled: false,
        checked,
    })
}

/// Checks `sum x_i = o` (exactly, or within the float tolerance).
pub fn check_strong_balancing<S: Scalar>(fam: &VectorFamily<S>) -> Result<ConditionReport<S>> {
    let idx: Vec<usize> = (0..fam.len()).collect();
    let total = fam.sum(&idx);
    let nrm = fam.space.gauge(&total)?;
    let holds = if S::EXACT { total.iter().all(|v| v.is_zero()) } else { nrm.approx_zero() };
    Ok(ConditionReport {
        condition: Condition::StrongBalancing,
        holds,
        witness: None,
        margin: nrm,
        sampled: false,
        checked: 1,
    })
}

/// Dimension of the affine hull of the family (exact rank of differences).
pub fn affine_dimension<S: Scalar>(fam: &VectorFamily<S>) -> usize {
    if fam.is_empty() {
        return 0;
    }
    let diffs: Vec<Vec<S>> = fam.vectors[1..].iter().map(|v| sub(v, &fam.vectors[0])).collect();
    linalg::rank(&diffs, fam.space.coord_len())
}

/// Checks that the origin lies in the relative interior of the convex hull.
///
/// Solved exactly as: maximise `t` over convex weights `lambda_i >= t` with
/// `sum lambda_i x_i = o`. The origin is in the relative interior iff the optimum is positive.
pub fn check_weak_balancing<S: Scalar>(fam: &VectorFamily<S>) -> Result<ConditionReport<S>> {
    let m = fam.len();
    if m == 0 {
        return Err(Error::InvalidParameter("empty family".into()));
    }
    let xs: Vec<Vec<Rational>> = fam.vectors.iter().map(|v| convert(v)).collect();
    let n = fam.space.coord_len();
    // variables: t, s_1..s_m with lambda_i = t + s_i
    let mut a = Vec::with_capacity(n + 1);
    for row in 0..n {
        let mut r = Vec::with_capacity(m + 1);
        r.push(xs.iter().fold(Rational::from_i64(0), |acc, x| acc + &x[row]));
        r.extend(xs.iter().map(|x| x[row].clone()));
        a.push(r);
    }
    let mut norm_row = vec![Rational::from_i64(1); m + 1];
    norm_row[0] = Rational::from_i64(m as i64);
    a.push(norm_row);
    let mut b = vec![Rational::from_i64(0); n];
    b.push(Rational::from_i64(1));
    let mut c = vec![Rational::from_i64(0); m + 1];
    c[0] = Rational::from_i64(-1);
    let (holds, margin) = match lp::minimize_eq(&a, &b, &c) {
        LpOutcome::Optimal { value, .. } => {
            let t = -value;
            (t > Rational::from_i64(0), t)
        }
        _ => (false, Rational::from_i64(-1)),
    };
    Ok(ConditionReport {
        condition: Condition::WeakBalancing,
        holds,
        witness: None,
        margin: crate::vector::cast(&margin),
        sampled: false,
        checked: 1,
    })
}

/// Dispatches to the check for `cond`.
pub fn check_condition<S: Scalar>(
    fam: &VectorFamily<S>,
    cond: Condition,
    opts: &ScanOptions,
) -> Result<ConditionReport<S>> {
    match cond {
        Condition::KCollapsing(k) => check_k_collapsing(fam, k, opts),
        Condition::FullCollapsing => check_full_collapsing(fam),
        Condition::StrongBalancing => check_strong_balancing(fam),
        Condition::WeakBalancing => check_weak_balancing(fam),
    }
}

/// One-dimensional k-collapsing test by sorting: the `k` largest values sum to at most 1
/// and the `k` smallest to at least -1.
pub fn scalar_k_collapsing<S: Scalar>(values: &[S], k: usize) -> bool {
    if k == 0 || k > values.len() {
        return true;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("comparable scalars"));
    let low = v[..k].iter().fold(S::zero(), |acc, x| acc + x.clone());
    let high = v[v.len() - k..].iter().fold(S::zero(), |acc, x| acc + x.clone());
    high.approx_le(&S::one()) && (-S::one()).approx_le(&low)
}

/// A scalar family viewed as vectors of `l_inf^1`.
pub fn scalar_family<S: Scalar>(values: &[S]) -> VectorFamily<S> {
    VectorFamily { space: NormSpace::linf(1), vectors: values.iter().map(|v| vec![v.clone()]).collect() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalisationReport {
    pub holds: bool,
    /// Pairs `(i, j)` with `|a_i| >= 1` and `|a_j| > 2 - |a_i|`.
    pub violations: Vec<(usize, usize)>,
}

/// For a k-collapsing scalar family with `2 <= k <= m-2`: every `|a_i| >= 1` forces
/// `|a_j| <= 2 - |a_i|` for all `j != i`.
pub fn normalisation_check<S: Scalar>(values: &[S], k: usize) -> Result<NormalisationReport> {
    let m = values.len();
    if k < 2 || k + 2 > m {
        return Err(Error::PreconditionViolated(format!("need 2 <= k <= m-2, got k={k}, m={m}")));
    }
    if !scalar_k_collapsing(values, k) {
        return Err(Error::PreconditionViolated(format!("family is not {k}-collapsing")));
    }
    let two = S::from_i64(2);
    let mut violations = Vec::new();
    for (i, a) in values.iter().enumerate() {
        if a.abs() < S::one() {
            continue;
        }
        let cap = two.clone() - a.abs();
        for (j, b) in values.iter().enumerate() {
            if j != i && !b.abs().approx_le(&cap) {
                violations.push((i, j));
            }
        }
    }
    Ok(NormalisationReport { holds: violations.is_empty(), violations })
}

/// The tuple `(-2/(m-3) repeated m-2 times, (m-1)/(m-3), (2m-4)/(m-3))`, offered in the
/// literature as an (m-1)-collapsing family with two entries above 1.
///
/// It is not (m-1)-collapsing: dropping one copy of `-2/(m-3)` leaves a sum of
/// `(m+1)/(m-3) > 1`. See [`collapsing_counterexample`] for a tuple with the intended property.
pub fn counterexample_tuple(m: usize) -> Result<Vec<Rational>> {
    if m < 5 {
        return Err(Error::InvalidParameter(format!("need m >= 5, got {m}")));
    }
    let d = m as i64 - 3;
    let mut v = vec![Rational::ratio(-2, d); m - 2];
    v.push(Rational::ratio(m as i64 - 1, d));
    v.push(Rational::ratio(2 * m as i64 - 4, d));
    Ok(v)
}

/// `(-3/(m-1) repeated m-2 times, (2m-5)/(m-1), (2m-5)/(m-1))`: (m-1)-collapsing, with two
/// entries above 1 whose sum exceeds 2, so the normalisation bound fails once `k = m-1`.
pub fn collapsing_counterexample(m: usize) -> Result<Vec<Rational>> {
    if m < 5 {
        return Err(Error::InvalidParameter(format!("need m >= 5, got {m}")));
    }
    let d = m as i64 - 1;
    let mut v = vec![Rational::ratio(-3, d); m - 2];
    v.push(Rational::ratio(2 * m as i64 - 5, d));
    v.push(Rational::ratio(2 * m as i64 - 5, d));
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarPartnerReport {
    pub holds: bool,
    /// For each member of the subset, the lowest-index partner at distance at least 1.
    pub partners: Vec<(usize, Option<usize>)>,
}

/// If every `x_i` (`i` in `subset`) has norm at least 1 and the subset sums to norm at most 1,
/// each member has another member at distance at least 1.
pub fn far_partner_check<S: Scalar>(fam: &VectorFamily<S>, subset: &[usize]) -> Result<FarPartnerReport> {
    let one = S::one();
    for &i in subset {
        if i >= fam.len() {
            return Err(Error::InvalidParameter(format!("index {i} out of range")));
        }
        if !one.approx_le(&fam.space.gauge(&fam.vectors[i])?) {
            return Err(Error::PreconditionViolated(format!("vector {} has norm below 1", i + 1)));
        }
    }
    if !fam.space.gauge(&fam.sum(subset))?.approx_le(&one) {
        return Err(Error::PreconditionViolated("subset sum has norm above 1".into()));
    }
    let mut partners = Vec::with_capacity(subset.len());
    for &i in subset {
        let mut found = None;
        for &j in subset {
            if j != i && one.approx_le(&fam.space.gauge(&sub(&fam.vectors[i], &fam.vectors[j]))?) {
                found = Some(j);
                break;
            }
        }
        partners.push((i, found));
    }
    Ok(FarPartnerReport { holds: partners.iter().all(|(_, p)| p.is_some()), partners })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiameterCentroidReport<S> {
    pub diameter: S,
    pub centroid_norm: S,
    /// All norms at least 1 and diameter below `1 + 1/d`.
    pub hypothesis_holds: bool,
    /// Centroid norm above `1/d^2`.
    pub conclusion_holds: bool,
}

pub fn diameter_centroid_check<S: Scalar>(fam: &VectorFamily<S>) -> Result<DiameterCentroidReport<S>> {
    let m = fam.len();
    if m == 0 {
        return Err(Error::InvalidParameter("empty family".into()));
    }
    let d = S::from_i64(fam.space.dim as i64);
    let mut diameter = S::zero();
    for i in 0..m {
        for j in i + 1..m {
            let v = fam.space.gauge(&sub(&fam.vectors[i], &fam.vectors[j]))?;
            if v > diameter {
                diameter = v;
            }
        }
    }
    let idx: Vec<usize> = (0..m).collect();
    let centroid: Vec<S> = crate::vector::scale(&fam.sum(&idx), &(S::one() / S::from_i64(m as i64)));
    let centroid_norm = fam.space.gauge(&centroid)?;
    let norms_ok = fam.norms()?.iter().all(|n| S::one().approx_le(n));
    let hypothesis_holds = norms_ok && diameter.approx_lt(&(S::one() + S::one() / d.clone()));
    let conclusion_holds = (S::one() / (d.clone() * d)).approx_lt(&centroid_norm);
    Ok(DiameterCentroidReport { diameter, centroid_norm, hypothesis_holds, conclusion_holds })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Chosen candidate indices (0-based, ascending).
    pub indices: Vec<usize>,
    pub nodes: u64,
}

impl SearchResult {
    pub fn size(&self) -> usize {
        self.indices.len()
    }
}

/// Largest k-collapsing sub-multiset of `candidates`, by exact branch and bound.
///
/// Subsets with fewer than `k` elements are vacuously k-collapsing.
pub fn bnb_max_subfamily<S: Scalar>(candidates: &VectorFamily<S>, k: usize) -> Result<SearchResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let norms = candidates.norms()?;
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).expect("comparable").then(a.cmp(&b)));
    let mut state = Bnb { fam: candidates, k, order, chosen: Vec::new(), best: Vec::new(), nodes: 0 };
    state.search(0)?;
    let mut indices = state.best;
    indices.sort_unstable();
    Ok(SearchResult { indices, nodes: state.nodes })
}

struct Bnb<'a, S> {
    fam: &'a VectorFamily<S>,
    k: usize,
    order: Vec<usize>,
    chosen: Vec<usize>,
    best: Vec<usize>,
    nodes: u64,
}

impl<S: Scalar> Bnb<'_, S> {
    fn compatible(&self, c: usize) -> Result<bool> {
        let need = self.k - 1;
        if self.chosen.len() < need {
            return Ok(true);
        }
        let one = S::one();
        for (sub_idx, _) in RevolvingDoor::new(self.chosen.len(), need) {
            let mut idx: Vec<usize> = sub_idx.iter().map(|&p| self.chosen[p]).collect();
            idx.push(c);
            if !self.fam.space.gauge(&self.fam.sum(&idx))?.approx_le(&one) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn search(&mut self, pos: usize) -> Result<()> {
        self.nodes += 1;
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        if pos == self.order.len() || self.chosen.len() + (self.order.len() - pos) <= self.best.len() {
            return Ok(());
        }
        let c = self.order[pos];
        if self.compatible(c)? {
            self.chosen.push(c);
            self.search(pos + 1)?;
            self.chosen.pop();
        }
        self.search(pos + 1)
    }
}
