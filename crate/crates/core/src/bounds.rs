//! Upper and lower bounds on `C(k,d)` and `CB(k,d)`, their aggregation, and Table 1.
//!
//! Every finite bound keeps the raw real value, the exact rational when one is available,
//! and an integer: the floor for upper bounds, the ceiling for lower bounds.

use std::f64::consts::{E, LN_2, PI};

use num::{BigInt, FromPrimitive, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{ceil_int, floor_int, rational_to_f64, Rational, Scalar};
use crate::subsets::binomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Upper,
    Lower,
    /// Both an upper and a lower bound.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    C,
    CB,
}

/// A finite bound value.
#[derive(Debug, Clone, PartialEq)]
pub struct Finite {
    pub raw: f64,
    pub exact: Option<Rational>,
    /// Floor (upper), ceiling (lower) or the value itself (exact).
    pub int: BigInt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundValue {
    Finite(Finite),
    AsymptoticOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub name: &'static str,
    pub kind: BoundKind,
    pub quantity: Vec<Quantity>,
    /// `None` exactly when not applicable.
    pub value: Option<BoundValue>,
    pub applicable: bool,
    /// Bound for one specific space rather than for all `d`-dimensional spaces.
    pub per_space: bool,
    /// Caveat that keeps the value out of aggregation.
    pub flag: Option<&'static str>,
    pub note: String,
}

impl BoundResult {
    fn na(name: &'static str, kind: BoundKind, quantity: Vec<Quantity>, note: impl Into<String>) -> Self {
        BoundResult {
            name,
            kind,
            quantity,
            value: None,
            applicable: false,
            per_space: false,
            flag: None,
            note: note.into(),
        }
    }

    fn finite(
        name: &'static str,
        kind: BoundKind,
        quantity: Vec<Quantity>,
        v: Finite,
        note: impl Into<String>,
    ) -> Self {
        BoundResult {
            name,
            kind,
            quantity,
            value: Some(BoundValue::Finite(v)),
            applicable: true,
            per_space: false,
            flag: None,
            note: note.into(),
        }
    }

    /// The integer value when applicable and finite.
    pub fn int(&self) -> Option<&BigInt> {
        match &self.value {
            Some(BoundValue::Finite(f)) => Some(&f.int),
            _ => None,
        }
    }

    pub fn finite_value(&self) -> Option<&Finite> {
        match &self.value {
            Some(BoundValue::Finite(f)) => Some(f),
            _ => None,
        }
    }

    pub fn bounds_c(&self) -> bool {
        self.quantity.contains(&Quantity::C)
    }

    pub fn is_upper(&self) -> bool {
        matches!(self.kind, BoundKind::Upper | BoundKind::Exact)
    }

    pub fn is_lower(&self) -> bool {
        matches!(self.kind, BoundKind::Lower | BoundKind::Exact)
    }
}

/// Integers that fit into `i64` become JSON numbers, larger ones strings.
pub fn bigint_json(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(i) => serde_json::Value::from(i),
        None => serde_json::Value::String(v.to_string()),
    }
}

impl Serialize for BoundResult {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let mut st = s.serialize_struct("BoundResult", 10)?;
        st.serialize_field("name", self.name)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("quantity", &self.quantity)?;
        let (value, raw, exact) = match &self.value {
            None => (serde_json::Value::Null, None, None),
            Some(BoundValue::AsymptoticOnly) => ("asymptotic-only".into(), None, None),
            Some(BoundValue::Finite(f)) => {
                (bigint_json(&f.int), f.raw.is_finite().then_some(f.raw), f.exact.as_ref().map(|r| r.to_string()))
            }
        };
        st.serialize_field("value", &value)?;
        st.serialize_field("raw", &raw)?;
        st.serialize_field("exact", &exact)?;
        st.serialize_field("applicable", &self.applicable)?;
        st.serialize_field("per_space", &self.per_space)?;
        st.serialize_field("flag", &self.flag)?;
        st.serialize_field("note", &self.note)?;
        st.end()
    }
}

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn upper_exact(r: Rational) -> Finite {
    Finite { raw: rational_to_f64(&r), int: floor_int(&r), exact: Some(r) }
}

fn lower_exact(r: Rational) -> Finite {
    Finite { raw: rational_to_f64(&r), int: ceil_int(&r), exact: Some(r) }
}

fn exact_int(v: BigInt) -> Finite {
    Finite { raw: v.to_f64().unwrap_or(f64::INFINITY), exact: Some(Rational::from_integer(v.clone())), int: v }
}

/// `floor(exp(l))` (or ceiling when `up`) for values far beyond the binary64 range.
fn round_exp(l: f64, up: bool) -> BigInt {
    if l < 700.0 {
        let v = l.exp();
        let r = if up { v.ceil() } else { v.floor() };
        return BigInt::from_f64(r).unwrap_or_else(BigInt::zero);
    }
    let e2 = l / LN_2;
    let shift = e2.floor() as i64 - 52;
    let mant = (e2 - shift as f64).exp2();
    let m = BigInt::from_f64(if up { mant.ceil() } else { mant.floor() }).unwrap_or_else(BigInt::zero);
    m << shift as usize
}

fn log_upper(l: f64) -> Finite {
    Finite { raw: l.exp(), exact: None, int: round_exp(l, false) }
}

fn check_kd(k: usize, d: usize) -> Result<()> {
    if k < 2 || d < 2 {
        return Err(Error::InvalidParameter(format!("need k, d >= 2, got k={k}, d={d}")));
    }
    Ok(())
}

fn max_k1_2d(k: usize, d: usize) -> BigInt {
    BigInt::from((k + 1).max(2 * d))
}

// ---------------------------------------------------------------------------
// gamma_k and Table 1

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaValue {
    pub k: usize,
    pub gamma: f64,
    pub bracket: (f64, f64),
}

/// `ln f(x)` with `f(x) = (1+x)^{1/x} (1 + 1/x)`.
pub fn ln_gamma_equation(x: f64) -> f64 {
    x.ln_1p() / x + (1.0 / x).ln_1p()
}

/// The positive root of `(1+x)^{1/x}(1+1/x) = k^2`, by bisection on `(e/k^2, e/(k^2-e))`.
pub fn gamma_k(k: usize) -> Result<GammaValue> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("gamma_k needs k >= 2, got {k}")));
    }
    let k2 = (k * k) as f64;
    let target = k2.ln();
    let bracket = (E / k2, E / (k2 - E));
    let (mut lo, mut hi) = bracket;
    // f is decreasing: f(lo) > k^2 > f(hi)
    while hi - lo >= 1e-12 {
        let mid = 0.5 * (lo + hi);
        if ln_gamma_equation(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut gamma = 0.5 * (lo + hi);
    let r = gamma.round();
    if r > 0.0 && (gamma - r).abs() < 1e-9 && f64::powf(1.0 + r, 1.0 / r) * (1.0 + 1.0 / r) == k2 {
        gamma = r;
    }
    Ok(GammaValue { k, gamma, bracket })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub k: usize,
    pub gamma: f64,
    /// `k^{2 gamma_k}`, the base of the rank bound.
    pub rank_base: f64,
    /// `1 + 2/k`, the base of the Brunn-Minkowski bound.
    #[serde(serialize_with = "ser_rational")]
    pub bm_base: Rational,
    /// `1 + 1/(2(2k+1)^2)`, the base of the greedy lower bound.
    #[serde(serialize_with = "ser_rational")]
    pub greedy_base: Rational,
    /// Columns as printed: gamma rounded to 7 decimals, rank base rounded up to 4
    /// significant digits, BM base rounded up to 3 decimals, greedy base rounded down to 4.
    pub printed: [String; 4],
}

fn ser_rational<Ser: Serializer>(r: &Rational, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
    s.serialize_str(&r.to_string())
}

fn trim_decimal(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Decimal string of `n / 10^places`, `n >= 0`.
fn decimal_string(n: &BigInt, places: u32) -> String {
    let digits = n.to_string();
    if places == 0 {
        return digits;
    }
    let p = places as usize;
    let padded = format!("{:0>width$}", digits, width = p + 1);
    let (a, b) = padded.split_at(padded.len() - p);
    format!("{a}.{b}")
}

/// Exact rounding of a positive rational to `places` decimals.
pub fn round_rational(r: &Rational, places: u32, up: bool) -> String {
    let scale = Rational::from_integer(num::pow(BigInt::from(10), places as usize));
    let scaled = r * scale;
    let n = if up { ceil_int(&scaled) } else { floor_int(&scaled) };
    trim_decimal(decimal_string(&n, places))
}

/// Rounds a positive float up to `sig` significant digits.
pub fn ceil_significant(x: f64, sig: i32) -> String {
    let mag = x.log10().floor() as i32 + 1;
    let places = (sig - mag).max(0);
    let scaled = x * 10f64.powi(places);
    let near = scaled.round();
    let n = if (scaled - near).abs() < 1e-9 * scaled.max(1.0) { near } else { scaled.ceil() };
    let n = BigInt::from_f64(n).unwrap_or_else(BigInt::zero);
    trim_decimal(decimal_string(&n, places as u32))
}

fn format_gamma(g: f64) -> String {
    if g.fract() == 0.0 {
        format!("{g}")
    } else {
        format!("{g:.7}")
    }
}

pub fn table1(ks: std::ops::RangeInclusive<usize>) -> Result<Vec<Table1Row>> {
    ks.map(|k| {
        let g = gamma_k(k)?;
        let ki = k as i64;
        let rank_base = f64::powf(k as f64, 2.0 * g.gamma);
        let bm_base = int(1) + Rational::ratio(2, ki);
        let greedy_base = int(1) + Rational::ratio(1, 2 * (2 * ki + 1) * (2 * ki + 1));
        let printed = [
            format_gamma(g.gamma),
            ceil_significant(rank_base, 4),
            round_rational(&bm_base, 3, true),
            round_rational(&greedy_base, 4, false),
        ];
        Ok(Table1Row { k, gamma: g.gamma, rank_base, bm_base, greedy_base, printed })
    })
    .collect()
}

// ---------------------------------------------------------------------------
// upper bounds

/// `CB(k,d) = max{k+1, 2d}`.
pub fn ub_balanced(k: usize, d: usize) -> Result<BoundResult> {
    check_kd(k, d)?;
    Ok(BoundResult::finite(
        "balanced",
        BoundKind::Exact,
        vec![Quantity::CB],
        exact_int(max_k1_2d(k, d)),
        "strongly balanced families: max{k+1, 2d}",
    ))
}

/// `C(k,d) < 1.33 k^{2 gamma_k d + 2}`, with factor `k/sqrt(d)` instead of 1.33 when `k^2 < d`.
pub fn ub_rankthm1(k: usize, d: usize) -> Result<BoundResult> {
    check_kd(k, d)?;
    let g = gamma_k(k)?.gamma;
    let kf = k as f64;
    let expo = 2.0 * g * d as f64 + 2.0;
    let refined = k * k < d;
    let factor_ln = if refined { kf.ln() - 0.5 * (d as f64).ln() } else { 1.33f64.ln() };
    let mut v = log_upper(factor_ln + expo * kf.ln());
    if !refined && g.fract() == 0.0 {
        let e = (2 * g as usize) * d + 2;
        let r = Rational::ratio(133, 100) * Scalar::powi(&int(k as i64), e as u32);
        v = upper_exact(r);
    }
    let note = if refined { "(k/sqrt d) k^(2 gamma_k d + 2), k < sqrt d" } else { "1.33 k^(2 gamma_k d + 2)" };
    Ok(BoundResult::finite("rankthm1", BoundKind::Upper, vec![Quantity::C], v, note))
}

/// Which branch of the trace/rank bound covers `(k, d)`, decided with integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankCase {
    /// `sqrt d < k <= (d+1)/2`.
    Middle,
    /// `-2d + sqrt(6d^2+3d+1) <= k <= 2d - sqrt(d/2)`, value exactly `2d`.
    Exact,
    /// `d >= 3` and `k > 2d - sqrt(d/2)`.
    Large,
}

fn rank_upper_ok(k: usize, d: usize) -> bool {
    let (k, d) = (k as i128, d as i128);
    2 * d >= k && 2 * (2 * d - k) * (2 * d - k) >= d
}

/// Case selection; the exact case wins when it overlaps the middle one.
pub fn rankthm2_case(k: usize, d: usize) -> Option<RankCase> {
    if k < 3 || d < 2 {
        return None;
    }
    let (ki, di) = (k as i128, d as i128);
    if (ki + 2 * di).pow(2) >= 6 * di * di + 3 * di + 1 && rank_upper_ok(k, d) {
        return Some(RankCase::Exact);
    }
    if ki * ki > di && 2 * ki <= di + 1 {
        return Some(RankCase::Middle);
    }
    if d >= 3 && !rank_upper_ok(k, d) {
        return Some(RankCase::Large);
    }
    None
}

/// The same case selection with binary64 endpoints and slack `guard`.
pub fn rankthm2_case_float(k: usize, d: usize, guard: f64) -> Option<RankCase> {
    if k < 3 || d < 2 {
        return None;
    }
    let (kf, df) = (k as f64, d as f64);
    let lo = -2.0 * df + (6.0 * df * df + 3.0 * df + 1.0).sqrt();
    let hi = 2.0 * df - (df / 2.0).sqrt();
    if lo - guard <= kf && kf <= hi + guard {
        return Some(RankCase::Exact);
    }
    if df.sqrt() < kf + guard && kf <= (df + 1.0) / 2.0 + guard {
        return Some(RankCase::Middle);
    }
    if d >= 3 && kf > hi - guard {
        return Some(RankCase::Large);
    }
    None
}

/// Distance from `k` to the nearest case endpoint, in binary64.
pub fn rankthm2_endpoint_gap(k: usize, d: usize) -> f64 {
    let (kf, df) = (k as f64, d as f64);
    let lo = -2.0 * df + (6.0 * df * df + 3.0 * df + 1.0).sqrt();
    let hi = 2.0 * df - (df / 2.0).sqrt();
    [lo, hi, df.sqrt(), (df + 1.0) / 2.0].iter().map(|e| (kf - e).abs()).fold(f64::INFINITY, f64::min)
}

pub fn ub_rankthm2(k: usize, d: usize) -> Result<BoundResult> {
    check_kd(k, d)?;
    let (ki, di) = (k as i64, d as i64);
    let res = match rankthm2_case(k, d) {
        None => {
            BoundResult::na("rankthm2", BoundKind::Upper, vec![Quantity::C], "needs k >= 3 and one of the three ranges")
        }
        Some(RankCase::Exact) => BoundResult::finite(
            "rankthm2",
            BoundKind::Exact,
            vec![Quantity::C],
            exact_int(BigInt::from(2 * d)),
            "-2d + sqrt(6d^2+3d+1) <= k <= 2d - sqrt(d/2): exactly 2d",
        ),
        Some(RankCase::Middle) => BoundResult::finite(
            "rankthm2",
            BoundKind::Upper,
            vec![Quantity::C],
            upper_exact(int(2 * di * (ki - 1) * (ki - 1)) / int(ki * ki - di)),
            "sqrt d < k <= (d+1)/2: 2d(k-1)^2/(k^2-d)",
        ),
        Some(RankCase::Large) => {
            // floor((1 + sqrt(2d-3))/2) is the largest j with (2j-1)^2 <= 2d-3
            let mut j: i64 = 0;
            while (2 * (j + 1) - 1).pow(2) <= 2 * di - 3 {
                j += 1;
            }
            let raw = k as f64 + (1.0 + ((2 * d - 3) as f64).sqrt()) / 2.0;
            BoundResult::finite(
                "rankthm2",
                BoundKind::Upper,
                vec![Quantity::C],
                Finite { raw, exact: None, int: BigInt::from(ki + j) },
                "k > 2d - sqrt(d/2): k + (1 + sqrt(2d-3))/2",
            )
        }
    };
    Ok(res)
}

/// Whether `(k, d)` is in the list of pairs with `C(k,d) = max{k+1, 2d}`.
pub fn newthm_applies(k: usize, d: usize) -> bool {
    match d {
        2 => k >= 2,
        3..=5 => k >= 3,
        6 => (3..=10).contains(&k) || k >= 17,
        7 => (3..=12).contains(&k) || k >= 41,
        _ => false,
    }
}

pub fn ub_newthm(k: usize, d: usize) -> Result<BoundResult> {
    check_kd(k, d)?;
    if newthm_applies(k, d) {
        return Ok(BoundResult::finite(
            "newthm",
            BoundKind::Exact,
            vec![Quantity::C],
            exact_int(max_k1_2d(k, d)),
            "small d: exactly max{k+1, 2d}",
        ));
    }
    if (k, d) == (2, 3) {
        return Ok(BoundResult::finite(
            "newthm",
            BoundKind::Upper,
            vec![Quantity::C],
            exact_int(BigInt::from(9)),
            "C(2,3) <= 9",
        ));
    }
    Ok(BoundResult::na("newthm", BoundKind::Exact, vec![Quantity::C], "pair not covered"))
}

/// `C(k,d) <= k(1+2/k)^d + k - 1`, evaluated exactly.
pub fn ub_bmthm(k: usize, d: usize) -> Result<BoundResult> {
    check_kd(k, d)?;
    let ki = k as i64;
    let base = Rational::ratio(ki + 2, ki);
    let r = int(ki) * Scalar::powi(&base, d as u32) + int(ki - 1);
    Ok(BoundResult::finite("bmthm", BoundKind::Upper, vec![Quantity::C], upper_exact(r), "k(1+2/k)^d + k - 1"))
}

/// Per-space bound from the Banach-Mazur distance `D` to Euclidean space, given `D^2`.
pub fn ub_bmdistance(k: usize, d_sq: &Rational) -> Result<BoundResult> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need k >= 2, got {k}")));
    }
    if *d_sq < int(1) {
        return Err(Error::InvalidParameter(format!("D^2 must be at least 1, got {d_sq}")));
    }
    let ki = k as i64;
    let mut res = if *d_sq >= int(ki) {
        BoundResult::na("bmdistance", BoundKind::Upper, vec![Quantity::C], "needs k > D^2")
    } else if *d_sq <= Rational::ratio(2 * ki - 1, ki + 1) {
        BoundResult::finite(
            "bmdistance",
            BoundKind::Exact,
            vec![Quantity::C],
            exact_int(BigInt::from(k + 1)),
            "D^2 <= (2k-1)/(k+1): exactly k+1",
        )
    } else {
        let r = (int(ki * ki) - d_sq) / (int(ki) - d_sq);
        BoundResult::finite("bmdistance", BoundKind::Upper, vec![Quantity::C], upper_exact(r), "(k^2 - D^2)/(k - D^2)")
    };
    res.per_space = true;
    Ok(res)
}

/// `m <= (k^2 - lambda^2)/(k - lambda^2)` for Euclidean families, given `lambda^2`.
pub fn ub_eucl(k: usize, lambda_sq: &Rational) -> Result<BoundResult> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need k >= 2, got {k}")));
    }
    let ki = int(k as i64);
    if !lambda_sq.is_positive() || *lambda_sq >= ki {
        return Err(Error::InvalidParameter(format!("need 0 < lambda^2 < k, got {lambda_sq}")));
    }
    let r = (&ki * &ki - lambda_sq) / (&ki - lambda_sq);
    let mut res = BoundResult::finite(
        "eucl",
        BoundKind::Upper,
        vec![Quantity::C],
        upper_exact(r),
        "(k^2 - lambda^2)/(k - lambda^2)",
    );
    res.per_space = true;
    Ok(res)
}

/// `C(k,d) < max{2k^{2p}B/(k^{2p}-B), 2k-1}` with `B = C(d+p-1, p)`, when `k^{2p} > B`.
pub fn ub_hadamard(k: usize, d: usize, p: u32) -> Result<BoundResult> {
    check_kd(k, d)?;
    if p == 0 {
        return Err(Error::InvalidParameter("p must be positive".into()));
    }
    let b = binomial((d as u64 + p as u64).saturating_sub(1), p as u64);
    let k2p = num::pow(BigInt::from(k), 2 * p as usize);
    let b = BigInt::from(b);
    if k2p <= b {
        return Ok(BoundResult::na(
            "hadamard",
            BoundKind::Upper,
            vec![Quantity::C],
            format!("p={p}: needs k^(2p) > C(d+p-1,p)"),
        ));
    }
    let main = Rational::new(BigInt::from(2) * &k2p * &b, &k2p - &b);
    let alt = int(2 * k as i64 - 1);
    let r = if main > alt { main } else { alt };
    Ok(BoundResult::finite(
        "hadamard",
        BoundKind::Upper,
        vec![Quantity::C],
        upper_exact(r),
        format!("p={p}: max{{2k^(2p)B/(k^(2p)-B), 2k-1}}, B=C(d+p-1,p)"),
    ))
}

/// Smallest applicable `ub_hadamard` over `p = 1..=10`.
pub fn ub_hadamard_best(k: usize, d: usize) -> Result<BoundResult> {
    let mut best: Option<BoundResult> = None;
    for p in 1..=10 {
        let r = ub_hadamard(k, d, p)?;
        if let Some(v) = r.int() {
            if best.as_ref().and_then(|b| b.int()).map_or(true, |bv| v < bv) {
                best = Some(r);
            }
        }
    }
    Ok(best
        .unwrap_or_else(|| BoundResult::na("hadamard", BoundKind::Upper, vec![Quantity::C], "no p in 1..=10 applies")))
}

/// Asymptotic statements; never finite, never aggregated.
pub fn ub_asymptotic(k: usize, d: usize) -> Result<Vec<BoundResult>> {
    check_kd(k, d)?;
    let asym = |name, applicable: bool, note: &str| BoundResult {
        name,
        kind: BoundKind::Upper,
        quantity: vec![Quantity::C],
        value: applicable.then_some(BoundValue::AsymptoticOnly),
        applicable,
        per_space: false,
        flag: Some("asymptotic-only"),
        note: note.into(),
    };
    Ok(vec![
        asym(
            "sqrtd",
            k * k <= d,
            "((p!)^(-1/(2p)) + eps) sqrt d < k <= sqrt d gives O(d^p) for d > d_0; no constants known",
        ),
        asym("klarge", true, "k >> d^(d+2) gives exactly k+1; no threshold known"),
    ])
}

/// Stirling-type upper estimate of `C(n, k)`.
pub fn binom_stirling_upper(n: u64, k: u64) -> Result<f64> {
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("need 1 <= k < n, got n={n}, k={k}")));
    }
    let nf = n as f64;
    let eps = k as f64 / nf;
    let entropy = -eps * eps.ln() - (1.0 - eps) * (-eps).ln_1p();
    Ok((nf * entropy - 0.5 * (2.0 * PI * eps * (1.0 - eps) * nf).ln()).exp())
}

// ---------------------------------------------------------------------------
// lower bounds

/// `C_k >= CB_k >= max{k+1, 2d}`.
pub fn lb_trivial(k: usize, d: usize) -> Result<BoundResult> {
    check_kd(k, d)?;
    Ok(BoundResult::finite(
        "trivial",
        BoundKind::Lower,
        vec![Quantity::C, Quantity::CB],
        exact_int(max_k1_2d(k, d)),
        "simplex plus cross-polytope families: max{k+1, 2d}",
    ))
}

const GREEDY_EXACT_MAX_D: usize = 1024;

/// `(1 + 1/(2(2k+1)^2))^d`, valid only for sufficiently large `d`.
pub fn lb_greedy(k: usize, d: usize) -> Result<BoundResult> {
    check_kd(k, d)?;
    let ki = k as i64;
    let base = int(1) + Rational::ratio(1, 2 * (2 * ki + 1) * (2 * ki + 1));
    let v = if d <= GREEDY_EXACT_MAX_D {
        lower_exact(Scalar::powi(&base, d as u32))
    } else {
        let l = d as f64 * rational_to_f64(&(base - int(1))).ln_1p();
        Finite { raw: l.exp(), exact: None, int: round_exp(l, true) }
    };
    let mut res = BoundResult::finite("greedy", BoundKind::Lower, vec![Quantity::C], v, "(1 + 1/(2(2k+1)^2))^d");
    res.flag = Some("requires sufficiently large d");
    Ok(res)
}

/// `Some(p)` when `q = p^e` for a prime `p`.
pub fn prime_power_base(q: u64) -> Option<u64> {
    if q < 2 {
        return None;
    }
    let mut n = q;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            return (n == 1).then_some(p);
        }
        p += 1;
    }
    Some(n)
}

/// Largest prime power `q` with `q^2 - q + 1 <= d`.
pub fn q_d(d: usize) -> Option<u64> {
    let d = d as u64;
    let mut q = 2u64;
    let mut best = None;
    while q * q - q + 1 <= d {
        if prime_power_base(q).is_some() {
            best = Some(q);
        }
        q += 1;
    }
    best
}

/// `C(k,d) >= q^{c+2}` for the largest feasible `c`, where `c <= q-2` and `c(2k+1) <= q-1`.
pub fn lb_polynomial(k: usize, d: usize) -> Result<BoundResult> {
    check_kd(k, d)?;
    let Some(q) = q_d(d) else {
        return Ok(BoundResult::na(
            "polynomial",
            BoundKind::Lower,
            vec![Quantity::C],
            "no prime power q with q^2-q+1 <= d",
        ));
    };
    let c = (q.saturating_sub(2)).min((q - 1) / (2 * k as u64 + 1));
    if c == 0 {
        return Ok(BoundResult::na(
            "polynomial",
            BoundKind::Lower,
            vec![Quantity::C],
            format!("q={q}: no c >= 1 with c(2k+1) <= q-1"),
        ));
    }
    let v = num::pow(BigInt::from(q), c as usize + 2);
    Ok(BoundResult::finite(
        "polynomial",
        BoundKind::Lower,
        vec![Quantity::C],
        exact_int(v),
        format!("q={q}, c={c}: q^(c+2)"),
    ))
}

// ---------------------------------------------------------------------------
// aggregation

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundQuery {
    pub k: usize,
    pub d: usize,
    /// Squared Banach-Mazur distance to Euclidean space.
    #[serde(skip)]
    pub bm_distance_sq: Option<Rational>,
    #[serde(skip)]
    pub lambda_sq: Option<Rational>,
    pub p: Option<u32>,
}

impl BoundQuery {
    pub fn new(k: usize, d: usize) -> Self {
        BoundQuery { k, d, bm_distance_sq: None, lambda_sq: None, p: None }
    }

    pub fn validate(&self) -> Result<()> {
        check_kd(self.k, self.d)?;
        if let Some(dd) = &self.bm_distance_sq {
            if *dd < int(1) {
                return Err(Error::InvalidParameter(format!("D^2 must be at least 1, got {dd}")));
            }
        }
        if let Some(l) = &self.lambda_sq {
            if !l.is_positive() || *l >= int(self.k as i64) {
                return Err(Error::InvalidParameter(format!("need 0 < lambda^2 < k, got {l}")));
            }
        }
        Ok(())
    }
}

/// Every bound for the query, applicable or not.
pub fn all_bounds(q: &BoundQuery) -> Result<Vec<BoundResult>> {
    q.validate()?;
    let (k, d) = (q.k, q.d);
    let mut out = vec![
        ub_balanced(k, d)?,
        ub_rankthm1(k, d)?,
        ub_rankthm2(k, d)?,
        ub_newthm(k, d)?,
        ub_bmthm(k, d)?,
        match q.p {
            Some(p) => ub_hadamard(k, d, p)?,
            None => ub_hadamard_best(k, d)?,
        },
    ];
    if let Some(dd) = &q.bm_distance_sq {
        out.push(ub_bmdistance(k, dd)?);
    }
    if let Some(l) = &q.lambda_sq {
        out.push(ub_eucl(k, l)?);
    }
    out.extend(ub_asymptotic(k, d)?);
    out.push(lb_trivial(k, d)?);
    out.push(lb_greedy(k, d)?);
    out.push(lb_polynomial(k, d)?);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestBounds {
    pub k: usize,
    pub d: usize,
    pub best_lower: BigInt,
    pub lower_source: &'static str,
    pub best_upper: Option<BigInt>,
    pub upper_source: Option<&'static str>,
    pub exact: Option<BigInt>,
    /// The flagged greedy lower bound, reported but not aggregated.
    pub greedy: BigInt,
}

impl Serialize for BestBounds {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let mut st = s.serialize_struct("BestBounds", 8)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("best_lower", &bigint_json(&self.best_lower))?;
        st.serialize_field("lower_source", self.lower_source)?;
        st.serialize_field("best_upper", &self.best_upper.as_ref().map(bigint_json))?;
        st.serialize_field("upper_source", &self.upper_source)?;
        st.serialize_field("exact", &self.exact.as_ref().map(bigint_json))?;
        st.serialize_field("greedy_flagged", &bigint_json(&self.greedy))?;
        st.end()
    }
}

/// Best known bounds on `C(k,d)`. Per-space, flagged and asymptotic results are skipped.
pub fn best_bounds(k: usize, d: usize) -> Result<BestBounds> {
    let all = all_bounds(&BoundQuery::new(k, d))?;
    aggregate(k, d, &all)
}

pub fn aggregate(k: usize, d: usize, all: &[BoundResult]) -> Result<BestBounds> {
    let mut lower: Option<(BigInt, &'static str)> = None;
    let mut upper: Option<(BigInt, &'static str)> = None;
    let mut exact_hit: Option<BigInt> = None;
    let mut greedy = BigInt::zero();
    for b in all {
        let Some(v) = b.int() else { continue };
        if !b.bounds_c() || b.per_space {
            continue;
        }
        if b.flag.is_some() {
            if b.name == "greedy" {
                greedy = v.clone();
            }
            continue;
        }
        if b.is_lower() && lower.as_ref().map_or(true, |(l, _)| v > l) {
            lower = Some((v.clone(), b.name));
        }
        if b.is_upper() && upper.as_ref().map_or(true, |(u, _)| v < u) {
            upper = Some((v.clone(), b.name));
        }
        if b.kind == BoundKind::Exact {
            if let Some(e) = &exact_hit {
                if e != v {
                    return Err(Error::InvariantBreach(format!("k={k}, d={d}: exact values {e} and {v} disagree")));
                }
            }
            exact_hit = Some(v.clone());
        }
    }
    let (best_lower, lower_source) =
        lower.ok_or_else(|| Error::InvariantBreach(format!("k={k}, d={d}: no lower bound")))?;
    if let Some((u, src)) = &upper {
        if best_lower > *u {
            return Err(Error::InvariantBreach(format!(
                "k={k}, d={d}: lower bound {best_lower} ({lower_source}) exceeds upper bound {u} ({src})"
            )));
        }
    }
    let exact = match &upper {
        Some((u, _)) if *u == best_lower => Some(u.clone()),
        _ => exact_hit,
    };
    Ok(BestBounds {
        k,
        d,
        best_lower,
        lower_source,
        best_upper: upper.as_ref().map(|(u, _)| u.clone()),
        upper_source: upper.map(|(_, s)| s),
        exact,
        greedy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(b: &BoundResult) -> i64 {
        b.int().unwrap().to_i64().unwrap()
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_k(2).unwrap().gamma, 1.0);
        assert!((gamma_k(3).unwrap().gamma - 0.3541686).abs() < 1e-7);
        assert!((gamma_k(9).unwrap().gamma - 0.0341301).abs() < 1e-7);
        let g = gamma_k(5).unwrap();
        assert!((ln_gamma_equation(g.gamma) - 25f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn table_rows() {
        let t = table1(2..=9).unwrap();
        assert_eq!(t[0].printed, ["1", "4", "2", "1.02"].map(String::from));
        assert_eq!(t[2].printed, ["0.1854203", "1.673", "1.5", "1.0061"].map(String::from));
        assert_eq!(t[4].printed, ["0.0784510", "1.325", "1.334", "1.0029"].map(String::from));
    }

    #[test]
    fn rankthm2_examples() {
        assert_eq!(iv(&ub_rankthm2(4, 9).unwrap()), 23);
        let r = ub_rankthm2(6, 10).unwrap();
        assert_eq!((r.kind, iv(&r)), (BoundKind::Exact, 20));
        assert_eq!(iv(&ub_rankthm2(19, 10).unwrap()), 21);
        assert!(!ub_rankthm2(2, 10).unwrap().applicable);
    }

    #[test]
    fn rankthm2_float_cases_agree_away_from_endpoints() {
        for d in 2..=600 {
            for k in 3..=3 * d {
                if rankthm2_endpoint_gap(k, d) > 1e-6 {
                    assert_eq!(rankthm2_case(k, d), rankthm2_case_float(k, d, 1e-9), "k={k} d={d}");
                    assert_eq!(rankthm2_case(k, d), rankthm2_case_float(k, d, -1e-9), "k={k} d={d}");
                }
            }
        }
    }

    #[test]
    fn newthm_examples() {
        let r = ub_newthm(6, 4).unwrap();
        assert_eq!((r.kind, iv(&r)), (BoundKind::Exact, 8));
        assert!(!ub_newthm(11, 6).unwrap().applicable);
        let r = ub_newthm(2, 3).unwrap();
        assert_eq!((r.kind, iv(&r)), (BoundKind::Upper, 9));
    }

    #[test]
    fn bm_and_hadamard_examples() {
        assert_eq!(iv(&ub_bmthm(2, 2).unwrap()), 9);
        assert_eq!(iv(&ub_bmthm(2, 4).unwrap()), 33);
        assert_eq!(iv(&ub_bmthm(6, 4).unwrap()), 23);
        let h = ub_hadamard(4, 4, 1).unwrap();
        assert_eq!(h.finite_value().unwrap().exact, Some(Rational::ratio(32, 3)));
        assert_eq!(iv(&h), 10);
        assert_eq!(iv(&ub_hadamard(3, 8, 2).unwrap()), 129);
        assert!(!ub_hadamard(2, 8, 2).unwrap().applicable);
    }

    #[test]
    fn rankthm1_examples() {
        let r = ub_rankthm1(2, 4).unwrap();
        assert!((r.finite_value().unwrap().raw - 1361.92).abs() < 1e-9);
        assert_eq!(iv(&r), 1361);
        let r = ub_rankthm1(2, 9).unwrap();
        assert!((r.finite_value().unwrap().raw - (2.0 / 3.0) * 2f64.powi(20)).abs() < 1e-3);
    }

    #[test]
    fn per_space_examples() {
        for k in 2..8 {
            assert_eq!(iv(&ub_bmdistance(k, &int(1)).unwrap()), k as i64 + 1);
            assert_eq!(iv(&ub_eucl(k, &int(1)).unwrap()), k as i64 + 1);
        }
        assert_eq!(iv(&ub_bmdistance(5, &Rational::ratio(3, 2)).unwrap()), 6);
        let t = ub_bmdistance(3, &Rational::ratio(5, 4)).unwrap();
        assert_eq!((t.kind, iv(&t)), (BoundKind::Exact, 4));
        assert_eq!(iv(&ub_eucl(4, &int(2)).unwrap()), 7);
        assert!(ub_eucl(2, &int(2)).is_err());
    }

    #[test]
    fn stirling_examples() {
        let v = binom_stirling_upper(4, 2).unwrap();
        assert!((v - 16.0 / (2.0 * PI).sqrt()).abs() < 1e-12 && v > 6.0);
        assert!(binom_stirling_upper(10, 5).unwrap() > 252.0);
        assert!((binom_stirling_upper(2, 1).unwrap() - 4.0 / PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lower_examples() {
        assert_eq!(iv(&lb_trivial(2, 5).unwrap()), 10);
        assert_eq!(iv(&lb_trivial(9, 2).unwrap()), 10);
        assert_eq!(iv(&lb_trivial(3, 3).unwrap()), 6);
        let g = lb_greedy(2, 100).unwrap();
        assert!((g.finite_value().unwrap().raw - 1.02f64.powi(100)).abs() < 1e-9);
        assert_eq!(g.flag, Some("requires sufficiently large d"));
        assert_eq!(iv(&lb_polynomial(3, 91).unwrap()), 729);
        assert_eq!(iv(&lb_polynomial(2, 43).unwrap()), 343);
        assert!(!lb_polynomial(2, 7).unwrap().applicable);
    }

    #[test]
    fn best_examples() {
        assert_eq!(best_bounds(6, 4).unwrap().exact, Some(BigInt::from(8)));
        assert_eq!(best_bounds(2, 2).unwrap().exact, Some(BigInt::from(4)));
        assert_eq!(best_bounds(6, 10).unwrap().exact, Some(BigInt::from(20)));
    }

    #[test]
    fn asymptotic_never_finite() {
        for (k, d) in [(2, 2), (1_000_000, 2), (3, 50)] {
            for r in ub_asymptotic(k, d).unwrap() {
                assert!(r.finite_value().is_none());
            }
        }
    }

    #[test]
    fn huge_exponentials() {
        let r = ub_rankthm1(3, 5000).unwrap();
        assert!(r.int().unwrap().bits() > 1000);
        assert_eq!(prime_power_base(49), Some(7));
        assert_eq!(prime_power_base(12), None);
        assert_eq!(q_d(91), Some(9));
    }
}

#[cfg(test)]
mod grid_tests {
    use super::*;

    #[test]
    fn consistency_grid() {
        for k in 2..=40 {
            for d in 2..=40 {
                let b = best_bounds(k, d).unwrap();
                if newthm_applies(k, d) {
                    assert_eq!(b.exact, Some(max_k1_2d(k, d)), "k={k} d={d}");
                }
            }
        }
    }
}
