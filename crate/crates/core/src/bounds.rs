//! Closed-form upper bounds on the oriented chromatic number and the
//! threshold scans behind the coefficient tables.
//!
//! Every returned integer is decided with [`crate::numeric`] interval
//! arithmetic; no floating-point value ever reaches a bound.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::numeric::{decide_ceil, decide_sign, Interval, Reals};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("BadT: t = {t} is below log2(k) for k = {k}")]
    BadT { k: u64, t: u32 },
    #[error("NoThreshold: {0}")]
    NoThreshold(String),
    #[error("Overflow: {0} does not fit in 128 bits")]
    Overflow(String),
    #[error("BadParameters: {0}")]
    BadParameters(String),
    #[error("Undecided: {0}")]
    Undecided(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: BTreeMap<String, String>,
    pub value: u128,
    pub formula: String,
}

impl BoundReport {
    fn new(
        name: &str,
        inputs: &[(&str, String)],
        value: BigInt,
        formula: &str,
    ) -> Result<Self, BoundError> {
        let value = value
            .to_u128()
            .ok_or_else(|| BoundError::Overflow(format!("{name} = {value}")))?;
        Ok(BoundReport {
            name: name.to_string(),
            inputs: inputs
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            value,
            formula: formula.to_string(),
        })
    }
}

/// Accepts `a`, `a/b` and decimal notation such as `0.3`.
pub fn parse_rational(s: &str) -> Result<BigRational, BoundError> {
    let s = s.trim();
    let bad = || BoundError::BadParameters(format!("not a rational number: {s:?}"));
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = BigInt::from_str(&format!("{whole}{frac}")).map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(digits, den));
    }
    BigRational::from_str(s).map_err(|_| bad())
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn undecided(what: &str) -> BoundError {
    BoundError::Undecided(format!(
        "{what} could not be decided at the maximum precision"
    ))
}

fn pow2_int(e: u32) -> BigInt {
    BigInt::one() << e as usize
}

/// `ceil((ln 2 + eps) * k^2 * 2^k)`: the order of the comprehensive
/// tournaments used by the maximum-degree colouring.
pub fn comprehensive_target_order(k: u32, eps: &BigRational) -> Result<BigInt, BoundError> {
    let m = BigInt::from(k) * BigInt::from(k) * pow2_int(k);
    ceil_times(eps, &m)
}

/// `ceil((ln 2 + eps) * m)`.
fn ceil_times(eps: &BigRational, m: &BigInt) -> Result<BigInt, BoundError> {
    if m.is_zero() {
        return Ok(BigInt::zero());
    }
    decide_ceil(|r| r.ln2().add(&r.rational(eps)).mul_int(m)).ok_or_else(|| undecided("ceiling"))
}

/// The three situations of the maximum-degree bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxDegreeCase {
    /// Degeneracy below the maximum degree.
    DegenerateBelowMax,
    /// Connected and regular.
    ConnectedRegular,
    /// Disconnected with a regular component.
    DisconnectedRegular,
}

impl MaxDegreeCase {
    pub fn number(self) -> u8 {
        match self {
            MaxDegreeCase::DegenerateBelowMax => 1,
            MaxDegreeCase::ConnectedRegular => 2,
            MaxDegreeCase::DisconnectedRegular => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(MaxDegreeCase::DegenerateBelowMax),
            2 => Some(MaxDegreeCase::ConnectedRegular),
            3 => Some(MaxDegreeCase::DisconnectedRegular),
            _ => None,
        }
    }
}

/// Upper bound for maximum degree `k`:
/// case 1 `ceil((ln2 + eps) k^2 2^k)`, case 2 that plus two, case 3
/// `2 ceil((ln2 + eps)(k+1)^2 2^k)`.
pub fn bound_max_degree(
    k: u32,
    eps: &BigRational,
    case: MaxDegreeCase,
) -> Result<BoundReport, BoundError> {
    if k < 2 || !eps.is_positive() {
        return Err(BoundError::BadParameters(format!(
            "need k >= 2 and eps > 0, got k = {k}, eps = {eps}"
        )));
    }
    let inputs = [
        ("k", k.to_string()),
        ("eps", eps.to_string()),
        ("case", case.number().to_string()),
    ];
    match case {
        MaxDegreeCase::DegenerateBelowMax => BoundReport::new(
            "max_degree",
            &inputs,
            comprehensive_target_order(k, eps)?,
            "ceil((ln2+eps)*k^2*2^k)",
        ),
        MaxDegreeCase::ConnectedRegular => BoundReport::new(
            "max_degree",
            &inputs,
            comprehensive_target_order(k, eps)? + 2,
            "ceil((ln2+eps)*k^2*2^k)+2",
        ),
        MaxDegreeCase::DisconnectedRegular => BoundReport::new(
            "max_degree",
            &inputs,
            disconnected_target_order(k, eps)?,
            "2*ceil((ln2+eps)*(k+1)^2*2^k)",
        ),
    }
}

/// `2 ceil((ln2 + eps)(k+1)^2 2^k)`.
pub fn disconnected_target_order(k: u32, eps: &BigRational) -> Result<BigInt, BoundError> {
    let m = BigInt::from(k + 1).pow(2) * pow2_int(k);
    Ok(ceil_times(eps, &m)? * 2)
}

/// `ceil((2 a ln2 + 2) a k^2 2^(a k))` for maximum degree `k` and
/// degeneracy ratio `a = d / k`.
pub fn bound_degeneracy(k: u32, alpha: &BigRational) -> Result<BoundReport, BoundError> {
    if k < 1 || !alpha.is_positive() || alpha > &BigRational::one() {
        return Err(BoundError::BadParameters(format!(
            "need k >= 1 and 0 < alpha <= 1, got k = {k}, alpha = {alpha}"
        )));
    }
    let exponent = alpha * BigRational::from_integer(k.into());
    let k2 = BigInt::from(k).pow(2);
    let value = decide_ceil(|r| {
        let a = r.rational(alpha);
        let coeff = a.mul(&r.ln2()).shl(1).add(&r.int(2));
        coeff.mul(&a).mul_int(&k2).mul(&r.exp2(&exponent))
    })
    .ok_or_else(|| undecided("degeneracy bound"))?;
    BoundReport::new(
        "degeneracy",
        &[("k", k.to_string()), ("alpha", alpha.to_string())],
        value,
        "ceil((2*alpha*ln2+2)*alpha*k^2*2^(alpha*k))",
    )
}

/// Order of the tournament used by the degeneracy strategy: the same
/// expression as [`bound_degeneracy`] with `alpha = d / delta`.
pub fn degeneracy_target_order(delta: u32, d: u32) -> Result<BigInt, BoundError> {
    bound_degeneracy(delta, &q(d.into(), delta.into())).map(|r| BigInt::from(r.value))
}

/// Part size `ceil(33/10 * t^2 * 2^t)` of the full k-partite targets.
pub fn full_part_size(t: u32) -> BigInt {
    let x = q(33, 10) * BigRational::from_integer(BigInt::from(t).pow(2) * pow2_int(t));
    x.ceil().to_integer()
}

/// `ceil(log2 k)` for `k >= 1`.
pub fn ceil_log2(k: u64) -> u32 {
    if k <= 1 {
        0
    } else {
        64 - (k - 1).leading_zeros()
    }
}

/// `k * ceil(33/10 * t^2 * 2^t)` for `k` guide colours and `t >= log2 k`.
pub fn bound_two_dipath(k: u64, t: u32) -> Result<BoundReport, BoundError> {
    if k < 2 {
        return Err(BoundError::BadParameters(format!("need k >= 2, got {k}")));
    }
    if t < ceil_log2(k) {
        return Err(BoundError::BadT { k, t });
    }
    BoundReport::new(
        "two_dipath",
        &[("k", k.to_string()), ("t", t.to_string())],
        BigInt::from(k) * full_part_size(t),
        "k*ceil(33/10*t^2*2^t)",
    )
}

/// Earlier bounds in terms of maximum degree, degeneracy and 2-dipath
/// chromatic number.
pub fn bound_prior(delta: u32, d: u32, chi2: u32) -> Result<Vec<BoundReport>, BoundError> {
    if delta < 1 || d < 1 || chi2 < 1 {
        return Err(BoundError::BadParameters(
            "inputs must be at least 1".into(),
        ));
    }
    let delta_b = BigInt::from(delta);
    Ok(vec![
        BoundReport::new(
            "kostochka_sopena_zhu",
            &[("delta", delta.to_string())],
            BigInt::from(2) * &delta_b * &delta_b * pow2_int(delta),
            "2*delta^2*2^delta",
        )?,
        BoundReport::new(
            "aravind_subramanian",
            &[("delta", delta.to_string()), ("d", d.to_string())],
            BigInt::from(16) * &delta_b * BigInt::from(d) * pow2_int(d),
            "16*delta*d*2^d",
        )?,
        BoundReport::new(
            "macgillivray_sherk",
            &[("chi2", chi2.to_string())],
            pow2_int(chi2) - 1,
            "2^chi2-1",
        )?,
        BoundReport::new(
            "das_nandi_sen",
            &[("delta", delta.to_string())],
            (&delta_b - BigInt::one()).pow(2u32) * pow2_int(delta) + 2,
            "(delta-1)^2*2^delta+2",
        )?,
    ])
}

/// Smallest `t` satisfying the full-target existence inequality for part
/// coefficient `c`, and the matching smallest guide-colour count `2^t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FullThreshold {
    pub coefficient: String,
    pub t_min: u32,
    #[serde(serialize_with = "serialize_biguint")]
    pub k_min: BigUint,
}

fn serialize_biguint<S: serde::Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// `1 + (1 + log2 c) t + 2 t log2 t + (1 - c log2 e) t^2` as an interval.
pub fn full_threshold_expr(r: &Reals, c: &BigRational, t: u32) -> Interval {
    let tb = BigInt::from(t);
    let linear = r.int(1).add(&r.log2(c)).mul_int(&tb);
    let log_term = r
        .log2(&BigRational::from_integer(tb.clone()))
        .mul_int(&(&tb * 2));
    let quad = r
        .int(1)
        .sub(&r.rational(c).mul(&r.log2_e()))
        .mul_int(&(&tb * &tb));
    r.int(1).add(&linear).add(&log_term).add(&quad)
}

/// Smallest `t >= 1` with `1 + (1 + log2 c) t + 2 t log2 t + (1 - c log2 e) t^2 < 0`.
pub fn full_threshold(c: &BigRational) -> Result<FullThreshold, BoundError> {
    let above =
        decide_sign(|r| r.rational(c).sub(&r.ln2())).ok_or_else(|| undecided("c - ln 2"))?;
    if above != Ordering::Greater {
        return Err(BoundError::NoThreshold(format!(
            "coefficient {c} is not above 1/log2(e)"
        )));
    }
    for t in 1u32.. {
        let s = decide_sign(|r| full_threshold_expr(r, c, t))
            .ok_or_else(|| undecided("threshold sign"))?;
        if s == Ordering::Less {
            return Ok(FullThreshold {
                coefficient: c.to_string(),
                t_min: t,
                k_min: BigUint::one() << t as usize,
            });
        }
    }
    unreachable!("the quadratic term eventually dominates")
}

/// Which explicit failure bound the maximum-degree threshold scan uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdVariant {
    /// `n^k exp(1/2 + k - L k^2 - k^2 / (4 L k^2 + 2))`, `L = ln2 + eps`.
    Chained,
    /// `binom(n, k-1) 2^(k-1) exp(-mu delta^2 / 2)`.
    Binomial,
}

impl ThresholdVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdVariant::Chained => "chained",
            ThresholdVariant::Binomial => "binomial",
        }
    }
}

/// Options of the maximum-degree threshold scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThresholdScan {
    /// Required dominator count is `k + extra_dominators` (0 or 1).
    pub extra_dominators: u32,
    /// The bound must stay below one on `[k, k + window]`.
    pub window: u32,
    pub k_max: u32,
}

impl Default for ThresholdScan {
    fn default() -> Self {
        ThresholdScan {
            extra_dominators: 1,
            window: 16,
            k_max: 400,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaxDegreeThreshold {
    pub eps: String,
    pub variant: ThresholdVariant,
    pub k_min: u32,
    /// Values of `k` skipped because `delta` left `(0, 1]`.
    pub delta_out_of_range: Vec<u32>,
}

/// Outcome of one `k` in the scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Below,
    NotBelow,
    DeltaOutOfRange,
}

fn max_degree_step(
    k: u32,
    eps: &BigRational,
    variant: ThresholdVariant,
    scan: &ThresholdScan,
) -> Result<Step, BoundError> {
    let n = comprehensive_target_order(k, eps)?;
    let kb = BigInt::from(k);
    // mu = (n - k + 1) 2^(1 - k), delta = 1 - (k + extra) / mu.
    let mu = BigRational::new((&n - &kb + 1) * 2, pow2_int(k));
    if !mu.is_positive() {
        return Ok(Step::DeltaOutOfRange);
    }
    let need = BigRational::from_integer(&kb + scan.extra_dominators);
    let delta = BigRational::one() - need / &mu;
    if !delta.is_positive() || delta > BigRational::one() {
        return Ok(Step::DeltaOutOfRange);
    }
    let sign = match variant {
        ThresholdVariant::Chained => {
            let k2 = &kb * &kb;
            decide_sign(|r| {
                let l = r.ln2().add(&r.rational(eps));
                let lk2 = l.mul_int(&k2);
                let tail = r
                    .int(k2.clone())
                    .div(&lk2.mul_int(&BigInt::from(4)).add(&r.int(2)))
                    .expect("positive denominator");
                r.ln_int(n.clone())
                    .mul_int(&kb)
                    .add(&r.rational(&q(1, 2)))
                    .add(&r.int(kb.clone()))
                    .sub(&lk2)
                    .sub(&tail)
            })
        }
        ThresholdVariant::Binomial => {
            let binom = binomial(&n, k - 1);
            let exponent = &mu * &delta * &delta / BigRational::from_integer(2.into());
            decide_sign(|r| {
                r.ln_int(binom.clone())
                    .add(&r.ln2().mul_int(&BigInt::from(k - 1)))
                    .sub(&r.rational(&exponent))
            })
        }
    }
    .ok_or_else(|| undecided("failure bound"))?;
    Ok(if sign == Ordering::Less {
        Step::Below
    } else {
        Step::NotBelow
    })
}

fn binomial(n: &BigInt, r: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Smallest `k >= 2` whose failure bound is below one throughout
/// `[k, k + window]`, with `n = ceil((ln2 + eps) k^2 2^k)`.
pub fn max_degree_threshold(
    eps: &BigRational,
    variant: ThresholdVariant,
    scan: &ThresholdScan,
) -> Result<MaxDegreeThreshold, BoundError> {
    if !eps.is_positive() {
        return Err(BoundError::BadParameters(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let mut delta_out_of_range = Vec::new();
    let mut run_start: Option<u32> = None;
    for k in 2..=scan.k_max + scan.window {
        let step = max_degree_step(k, eps, variant, scan)?;
        if step == Step::DeltaOutOfRange {
            delta_out_of_range.push(k);
        }
        if step == Step::Below {
            let start = *run_start.get_or_insert(k);
            if k - start == scan.window {
                delta_out_of_range.retain(|&x| x < start);
                return Ok(MaxDegreeThreshold {
                    eps: eps.to_string(),
                    variant,
                    k_min: start,
                    delta_out_of_range,
                });
            }
        } else {
            run_start = None;
        }
    }
    Err(BoundError::NoThreshold(format!(
        "no k <= {} for eps = {eps}",
        scan.k_max
    )))
}

/// Coefficient rows of the maximum-degree table.
pub const MAX_DEGREE_ROWS: [(i64, i64, u32); 6] = [
    (1, 1, 4),
    (1, 2, 11),
    (2, 5, 15),
    (3, 10, 22),
    (11, 40, 25),
    (1, 4, 28),
];

/// Coefficient rows of the two-dipath table.
pub const FULL_ROWS: [(i64, i64, u32); 9] = [
    (33, 10, 1),
    (3, 1, 2),
    (5, 2, 2),
    (2, 1, 3),
    (3, 2, 6),
    (1, 1, 23),
    (3, 4, 193),
    (7, 10, 2310),
    (139, 200, 10135),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaxDegreeRow {
    pub eps: String,
    pub published: u32,
    pub chained: u32,
    pub binomial: u32,
}

impl MaxDegreeRow {
    /// Smallest absolute deviation of either variant from the published
    /// value.
    pub fn best_deviation(&self) -> u32 {
        self.chained
            .abs_diff(self.published)
            .min(self.binomial.abs_diff(self.published))
    }
}

pub fn max_degree_table(scan: &ThresholdScan) -> Result<Vec<MaxDegreeRow>, BoundError> {
    MAX_DEGREE_ROWS
        .iter()
        .map(|&(a, b, published)| {
            let eps = q(a, b);
            Ok(MaxDegreeRow {
                eps: eps.to_string(),
                published,
                chained: max_degree_threshold(&eps, ThresholdVariant::Chained, scan)?.k_min,
                binomial: max_degree_threshold(&eps, ThresholdVariant::Binomial, scan)?.k_min,
            })
        })
        .collect()
}

pub fn max_degree_table_csv(rows: &[MaxDegreeRow]) -> String {
    let mut out =
        String::from("coefficient,k_min_published,k_min_chained,k_min_binomial,best_deviation\n");
    for r in rows {
        let _ = writeln!(
            out,
            "ln2 + {},{},{},{},{}",
            r.eps,
            r.published,
            r.chained,
            r.binomial,
            r.best_deviation()
        );
    }
    out
}

pub fn full_table() -> Result<Vec<FullThreshold>, BoundError> {
    FULL_ROWS
        .iter()
        .map(|&(a, b, _)| full_threshold(&q(a, b)))
        .collect()
}

/// `k` as an integer for small `t`, otherwise `2^t`.
fn k_min_label(row: &FullThreshold) -> String {
    if row.t_min <= 3 {
        row.k_min.to_string()
    } else {
        format!("2^{}", row.t_min)
    }
}

pub fn full_table_csv(rows: &[FullThreshold]) -> String {
    let mut out = String::from("coefficient,k_min,t_min\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.coefficient, k_min_label(r), r.t_min);
    }
    out
}

/// Degeneracy regimes of the sparse-graph table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `d = floor(delta / 2)`.
    Linear,
    /// `d = floor(sqrt(delta))`.
    Root,
    /// `d = floor(log2 delta)`.
    Logarithmic,
    /// `d = 2`.
    Constant,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::Linear,
        Regime::Root,
        Regime::Logarithmic,
        Regime::Constant,
    ];

    pub fn degeneracy(self, delta: u32) -> u32 {
        match self {
            Regime::Linear => delta / 2,
            Regime::Root => delta.isqrt(),
            Regime::Logarithmic => delta.ilog2(),
            Regime::Constant => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::Linear => "d = delta/2",
            Regime::Root => "d = sqrt(delta)",
            Regime::Logarithmic => "d = log2(delta)",
            Regime::Constant => "d = 2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeRow {
    pub regime: Regime,
    pub delta: u32,
    pub d: u32,
    pub bound: u128,
    /// `2 delta d 2^d`, the leading term when `d` is small against `delta`.
    pub leading: u128,
}

pub const REGIME_DELTAS: [u32; 4] = [8, 16, 32, 64];

pub fn regime_table() -> Result<Vec<RegimeRow>, BoundError> {
    let mut rows = Vec::new();
    for regime in Regime::ALL {
        for delta in REGIME_DELTAS {
            let d = regime.degeneracy(delta).max(1);
            let bound = bound_degeneracy(delta, &q(d.into(), delta.into()))?.value;
            let leading = (BigInt::from(2) * delta * d * pow2_int(d))
                .to_u128()
                .ok_or_else(|| BoundError::Overflow("leading term".into()))?;
            rows.push(RegimeRow {
                regime,
                delta,
                d,
                bound,
                leading,
            });
        }
    }
    Ok(rows)
}

pub fn regime_table_csv(rows: &[RegimeRow]) -> String {
    let mut out = String::from("regime,delta,d,bound,leading_2_delta_d_2^d,ratio\n");
    for r in rows {
        let ratio = BigRational::new(r.bound.into(), r.leading.into());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.4}",
            r.regime.label(),
            r.delta,
            r.d,
            r.bound,
            r.leading,
            ratio.to_f64().unwrap_or(f64::NAN)
        );
    }
    out
}

/// Whether the two-dipath bound beats `2^k - 1` for guide-colour count
/// `k` and degeneracy parameter `t`.
pub fn two_dipath_beats_prior(k: u64, t: u32) -> Result<bool, BoundError> {
    let ours = BigInt::from(bound_two_dipath(k, t)?.value);
    let k32 = u32::try_from(k).map_err(|_| BoundError::Overflow("k".into()))?;
    Ok(ours < pow2_int(k32))
}
