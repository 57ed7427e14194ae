//! Parametrizing-triple enumeration and the per-`d` census.
//!
//! A triple `(u, v, w)` of positive integers represents the twist
//! `d = Q(u, v, w) = v F(u, vw^2)` and carries the point
//! `(uvw : 1 : v^2 w^3)` on `E_d`. The admissible region is
//!
//! ```text
//! exp(-2 c1) <= max(u, v w^2) <= exp(-2 c2) Q(u, v, w)^(1/4 + 2 alpha)
//! ```
//!
//! The enumerator walks `w -> v -> u` with the u-window solved from the
//! region inequality rather than scanning all `u` up to `X`, so total work
//! tracks the output size. Region comparisons run in logs with an exact
//! integer fallback at boundary ties (ties count as inside).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::arith::{self, PrimeTable};
use crate::curve::{self, CurveError, CurveParams, ProjectivePoint, TwistedCurve};
use crate::mathf;

/// Largest admitted census bound.
pub const X_LIMIT: u64 = 1_000_000_000_000_000_000;

/// Default canonical-height tolerance used by certified mode.
pub const CERTIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyError {
    /// alpha outside (0, 1/56).
    AlphaOutOfRange,
    /// c1 > c2 makes the region empty by fiat.
    EmptyRegion,
    NonPositiveTwist(i128),
    Overflow,
    XOutOfRange(u64),
    /// Relaxed-mode enumeration needs A >= 0 and B >= 1 for its loop bounds.
    UnsupportedRelaxedCurve,
    Curve(CurveError),
}

impl From<CurveError> for FamilyError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::Overflow => FamilyError::Overflow,
            CurveError::NonPositiveTwist(q) => FamilyError::NonPositiveTwist(q),
            other => FamilyError::Curve(other),
        }
    }
}

impl core::fmt::Display for FamilyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FamilyError::AlphaOutOfRange => write!(f, "alpha must lie in (0, 1/56)"),
            FamilyError::EmptyRegion => write!(f, "c1 must not exceed c2"),
            FamilyError::NonPositiveTwist(q) => write!(f, "Q value {q} is not positive"),
            FamilyError::Overflow => write!(f, "overflow evaluating Q; shrink X"),
            FamilyError::XOutOfRange(x) => write!(f, "X = {x} exceeds the supported range"),
            FamilyError::UnsupportedRelaxedCurve => {
                write!(f, "relaxed enumeration requires A >= 0 and B >= 1")
            }
            FamilyError::Curve(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FamilyError {}

/// Exact rational `alpha` in lowest terms, kept exact so that boundary ties
/// in the region inequality can be resolved without floats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alpha {
    num: u32,
    den: u32,
}

impl Alpha {
    /// `num/den` with `0 < num/den < 1/56`.
    pub fn new(num: u32, den: u32) -> Result<Self, FamilyError> {
        if num == 0 || den == 0 || 56 * (num as u64) >= den as u64 {
            return Err(FamilyError::AlphaOutOfRange);
        }
        let g = arith::gcd_u64(num as u64, den as u64) as u32;
        Ok(Alpha {
            num: num / g,
            den: den / g,
        })
    }

    /// Parses a plain decimal like `0.008` into the exact rational 1/125.
    pub fn parse_decimal(s: &str) -> Result<Self, FamilyError> {
        let s = s.trim();
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if frac_part.len() > 9 || int_part.len() > 9 {
            return Err(FamilyError::AlphaOutOfRange);
        }
        let digits: alloc::string::String = alloc::format!("{int_part}{frac_part}");
        let num: u64 = digits.parse().map_err(|_| FamilyError::AlphaOutOfRange)?;
        let den = 10u64.pow(frac_part.len() as u32);
        if num > u32::MAX as u64 {
            return Err(FamilyError::AlphaOutOfRange);
        }
        Alpha::new(num as u32, den as u32)
    }

    pub fn numer(&self) -> u32 {
        self.num
    }

    pub fn denom(&self) -> u32 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// True when `alpha < 1/120`, the admissible range for moment runs.
    pub fn in_moment_range(&self) -> bool {
        120 * (self.num as u64) < self.den as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionMode {
    /// The literal region inequality.
    Region,
    /// Region inequality plus per-witness canonical-height certificates.
    Certified,
    /// Only `Q >= 1` and positivity; used by oracle tests.
    Relaxed,
}

/// Region parameters: exact `alpha`, the constants `c1 <= c2`, and the mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionParams {
    pub alpha: Alpha,
    pub c1: f64,
    pub c2: f64,
    pub mode: RegionMode,
}

impl RegionParams {
    pub fn new(alpha: Alpha, c1: f64, c2: f64, mode: RegionMode) -> Result<Self, FamilyError> {
        if c1 > c2 {
            // exp(-2c1) <= exp(-2c2) iff c1 >= c2; the paper's region has
            // c1 <= c2 so that the window is nonempty for large Q.
            return Err(FamilyError::EmptyRegion);
        }
        Ok(RegionParams {
            alpha,
            c1,
            c2,
            mode,
        })
    }

    /// `beta = 1/4 + 2 alpha`, the region exponent.
    pub fn beta(&self) -> f64 {
        0.25 + 2.0 * self.alpha.as_f64()
    }

    pub fn with_mode(&self, mode: RegionMode) -> RegionParams {
        RegionParams { mode, ..*self }
    }
}

/// A parametrizing triple of positive integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Triple {
    pub u: u64,
    pub v: u64,
    pub w: u64,
}

impl Triple {
    pub fn new(u: u64, v: u64, w: u64) -> Self {
        assert!(u >= 1 && v >= 1 && w >= 1);
        Triple { u, v, w }
    }
}

/// `Q(u, v, w) = v F(u, v w^2)`, exact and overflow-checked.
pub fn q_poly(curve: &CurveParams, t: &Triple) -> Result<i128, FamilyError> {
    let z = (t.v as i128)
        .checked_mul((t.w as i128).checked_mul(t.w as i128).ok_or(FamilyError::Overflow)?)
        .ok_or(FamilyError::Overflow)?;
    let f = curve.f_binary(t.u as i128, z).ok_or(FamilyError::Overflow)?;
    (t.v as i128).checked_mul(f).ok_or(FamilyError::Overflow)
}

/// Decides `exp(-2 c1) <= max(u, vw^2) <= exp(-2 c2) Q^(1/4 + 2 alpha)`.
///
/// In relaxed mode only `Q >= 1` is required. Log comparisons carry a
/// relative guard band; ties inside the band fall back to exact integer
/// power comparison when `c2 = 0`, and count as inside otherwise.
pub fn in_region(curve: &CurveParams, t: &Triple, rp: &RegionParams) -> Result<bool, FamilyError> {
    let q = q_poly(curve, t)?;
    if q < 1 {
        return Err(FamilyError::NonPositiveTwist(q));
    }
    if matches!(rp.mode, RegionMode::Relaxed) {
        return Ok(true);
    }
    let m = (t.v as u128) * (t.w as u128) * (t.w as u128);
    let m = m.max(t.u as u128);
    Ok(lower_ok(m, rp) && upper_ok(m, q, rp))
}

/// `exp(-2 c1) <= m`; always true at the default c1 = 0 since m >= 1.
fn lower_ok(m: u128, rp: &RegionParams) -> bool {
    if rp.c1 <= 0.0 {
        m >= 1 || mathf::ln(m as f64) >= -2.0 * rp.c1
    } else {
        mathf::ln(m as f64) >= -2.0 * rp.c1
    }
}

/// `m <= exp(-2 c2) Q^beta`, ties inside.
fn upper_ok(m: u128, q: i128, rp: &RegionParams) -> bool {
    debug_assert!(q >= 1);
    let lhs = mathf::ln(m as f64);
    let rhs = -2.0 * rp.c2 + rp.beta() * mathf::ln(q as f64);
    let guard = 1e-9 * (1.0 + mathf::abs(lhs) + mathf::abs(rhs));
    if lhs <= rhs - guard {
        return true;
    }
    if lhs >= rhs + guard {
        return false;
    }
    if rp.c2 == 0.0 {
        // Exact: m <= Q^((den + 8 num) / (4 den))  <=>  m^(4 den) <= Q^(den + 8 num).
        let den = rp.alpha.denom();
        let num = rp.alpha.numer();
        let lhs = BigInt::from(m).pow(4 * den);
        let rhs = BigInt::from(q).pow(den + 8 * num);
        lhs <= rhs
    } else {
        // Non-integral threshold: treat the tie band as inside.
        true
    }
}

/// Exact re-check of the full region condition; test oracle, no fast path.
pub fn in_region_exact_zero_c(curve: &CurveParams, t: &Triple, alpha: &Alpha) -> bool {
    let q = match q_poly(curve, t) {
        Ok(q) if q >= 1 => q,
        _ => return false,
    };
    let m = (t.v as u128) * (t.w as u128) * (t.w as u128);
    let m = m.max(t.u as u128);
    let den = alpha.denom();
    let num = alpha.numer();
    BigInt::from(m).pow(4 * den) <= BigInt::from(q).pow(den + 8 * num)
}

/// Scan caps implied by the region: any admissible triple with `Q <= X`
/// satisfies `u <= v_upper`, `v w^2 <= v_upper` and `w <= w_cap`.
#[derive(Debug, Clone, Copy)]
struct ScanBounds {
    v_upper: u64,
    w_cap: u64,
}

fn scan_bounds(curve: &CurveParams, rp: &RegionParams, x: u64) -> ScanBounds {
    let beta = rp.beta();
    let alpha = rp.alpha.as_f64();
    let vu = mathf::exp(-2.0 * rp.c2) * mathf::powf(x as f64, beta);
    let v_upper = (mathf::floor(vu) as u64).saturating_add(1).min(x);
    // From max(u, vw^2) <= K v^((1+8a)/(1-24a)) with
    // K = (exp(-2 c2) c4^beta)^(4/(1-24a)), so w^2 <= K v^(32a/(1-24a)).
    let denom = 1.0 - 24.0 * alpha;
    let k = mathf::powf(
        mathf::exp(-2.0 * rp.c2) * mathf::powf(curve.c4() as f64, beta),
        4.0 / denom,
    );
    let w_from_region = mathf::sqrt(k * mathf::powf(vu, 32.0 * alpha / denom));
    let w_cap = (mathf::floor(w_from_region.min(mathf::sqrt(vu))) as u64).saturating_add(1);
    ScanBounds { v_upper, w_cap }
}

/// Smallest `u` beyond which, for fixed `(v, w)`, both `Q` is strictly
/// increasing and the upper region margin is strictly shrinking.
fn monotone_tail_start(curve: &CurveParams, z: u128, beta: f64) -> u64 {
    let a = curve.a();
    let b = curve.b();
    if a >= 0 && b >= 1 {
        return 1;
    }
    // Q' > 0 needs 3u^2 > |A| z^2; the margin needs
    // u^3 (1 - 3 beta) > |A| z^2 u (1 - beta) + |B| z^3.
    let zf = z as f64;
    let slope = mathf::sqrt(mathf::abs(a as f64) / 3.0) * zf;
    let margin = mathf::sqrt(mathf::abs(a as f64) / (1.0 - 3.0 * beta)) * zf
        + mathf::powf(mathf::abs(b as f64) / (1.0 - 3.0 * beta), 1.0 / 3.0) * zf;
    (mathf::ceil(slope.max(margin)) as u64).saturating_add(2)
}

/// All `(triple, d)` with `1 <= Q <= X` inside the region, in `(w, v, u)`
/// loop order. `shard = (index, count)` keeps only `w = index mod count`,
/// and the shards partition the unsharded stream exactly.
pub fn enumerate_triples(
    curve: &CurveParams,
    rp: &RegionParams,
    x: u64,
    shard: Option<(usize, usize)>,
) -> Result<Vec<(Triple, u64)>, FamilyError> {
    if x == 0 || x > X_LIMIT {
        return Err(FamilyError::XOutOfRange(x));
    }
    if matches!(rp.mode, RegionMode::Relaxed) {
        return enumerate_relaxed(curve, x, shard);
    }
    let bounds = scan_bounds(curve, rp, x);
    let (first_w, stride) = shard_walk(shard);
    let beta = rp.beta();
    let mut out = Vec::new();
    let mut w = first_w;
    while w <= bounds.w_cap {
        let w2 = (w as u128) * (w as u128);
        let mut v = 1u64;
        while (v as u128) * w2 <= bounds.v_upper as u128 {
            let z = (v as u128) * w2;
            let tail_from = monotone_tail_start(curve, z, beta);
            let head_end = tail_from.max(z as u64).min(bounds.v_upper);
            // Head: exact per-u checks below the monotone threshold.
            for u in 1..=head_end {
                let t = Triple::new(u, v, w);
                let q = q_poly(curve, &t)?;
                if q >= 1 && q <= x as i128 && lower_region(u, z, rp) && upper_ok(u.max(z as u64) as u128, q, rp)
                {
                    out.push((t, q as u64));
                }
            }
            // Tail: max(u, vw^2) = u, Q strictly increasing, margin strictly
            // decreasing, so admissibility is a prefix property and the scan
            // can stop at the first failure.
            let mut u = head_end + 1;
            while u <= bounds.v_upper {
                let t = Triple::new(u, v, w);
                let q = q_poly(curve, &t)?;
                if q > x as i128 {
                    break;
                }
                if q >= 1 {
                    if !upper_ok(u as u128, q, rp) {
                        break;
                    }
                    if lower_region(u, z, rp) {
                        out.push((t, q as u64));
                    }
                }
                u += 1;
            }
            v += 1;
        }
        match w.checked_add(stride) {
            Some(next) => w = next,
            None => break,
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn lower_region(u: u64, z: u128, rp: &RegionParams) -> bool {
    lower_ok((u as u128).max(z), rp)
}

fn shard_walk(shard: Option<(usize, usize)>) -> (u64, u64) {
    match shard {
        None => (1, 1),
        Some((idx, count)) => {
            assert!(count >= 1 && idx < count, "bad shard spec");
            (idx as u64 + 1, count as u64)
        }
    }
}

/// Relaxed-mode enumeration: every triple with `1 <= Q <= X`.
///
/// Loop bounds need `F >= B z^3`, hence the `A >= 0`, `B >= 1` restriction.
fn enumerate_relaxed(
    curve: &CurveParams,
    x: u64,
    shard: Option<(usize, usize)>,
) -> Result<Vec<(Triple, u64)>, FamilyError> {
    if curve.a() < 0 || curve.b() < 1 {
        return Err(FamilyError::UnsupportedRelaxedCurve);
    }
    let (first_w, stride) = shard_walk(shard);
    let b = curve.b() as i128;
    let mut out = Vec::new();
    let mut w = first_w;
    'w: loop {
        let w2 = (w as i128) * (w as i128);
        // smallest possible Q at this w is v = u = 1
        if b * w2 * w2 * w2 > x as i128 {
            break 'w;
        }
        let mut any_v = false;
        let mut v = 1i128;
        while v * b * (v * w2).pow(3) <= x as i128 {
            let z = v * w2;
            let mut u = 1u64;
            loop {
                let t = Triple::new(u, v as u64, w);
                let q = q_poly(curve, &t)?;
                if q > x as i128 {
                    break;
                }
                if q >= 1 {
                    out.push((t, q as u64));
                }
                u += 1;
            }
            let _ = z;
            any_v = true;
            v += 1;
        }
        if !any_v {
            break;
        }
        match w.checked_add(stride) {
            Some(next) => w = next,
            None => break,
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Census entry for one twist value `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRecord {
    pub d: u64,
    pub witnesses: Vec<Triple>,
    pub min_hhat: Option<f64>,
    pub certified: bool,
}

impl FamilyRecord {
    pub fn r_q(&self) -> u64 {
        self.witnesses.len() as u64
    }

    /// Commutative-monoid merge: witness lists concatenate (re-sorted),
    /// minima combine, certificates OR.
    pub fn merge(&mut self, other: FamilyRecord) {
        debug_assert_eq!(self.d, other.d);
        self.witnesses.extend(other.witnesses);
        self.witnesses.sort_unstable();
        self.min_hhat = match (self.min_hhat, other.min_hhat) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.certified |= other.certified;
    }
}

pub type Census = BTreeMap<u64, FamilyRecord>;

/// Groups the enumeration by `d`, keeping square-free `d` only. In certified
/// mode each witness point gets a canonical height and the record is
/// certified when some nontorsion witness satisfies
/// `hhat <= (1/8 + alpha) log d`.
pub fn build_census(curve: &CurveParams, rp: &RegionParams, x: u64) -> Result<Census, FamilyError> {
    let stream = enumerate_triples(curve, rp, x, None)?;
    let mut census = census_from_stream(curve, rp, stream)?;
    if matches!(rp.mode, RegionMode::Certified) {
        certify_census(curve, rp, &mut census)?;
    }
    Ok(census)
}

/// Square-free grouping of an enumeration stream (no height work).
pub fn census_from_stream(
    curve: &CurveParams,
    rp: &RegionParams,
    stream: Vec<(Triple, u64)>,
) -> Result<Census, FamilyError> {
    let _ = (curve, rp);
    let table = PrimeTable::new(10_000);
    let mut census = Census::new();
    for (t, d) in stream {
        if !arith::is_squarefree_bulk(d, &table) {
            continue;
        }
        census
            .entry(d)
            .or_insert_with(|| FamilyRecord {
                d,
                witnesses: Vec::new(),
                min_hhat: None,
                certified: false,
            })
            .witnesses
            .push(t);
    }
    for rec in census.values_mut() {
        rec.witnesses.sort_unstable();
    }
    Ok(census)
}

/// Computes per-witness canonical heights and membership certificates.
pub fn certify_census(
    curve: &CurveParams,
    rp: &RegionParams,
    census: &mut Census,
) -> Result<(), FamilyError> {
    for rec in census.values_mut() {
        let tw = TwistedCurve::new(*curve, rec.d)?;
        let threshold = (0.125 + rp.alpha.as_f64()) * mathf::ln(rec.d as f64);
        let mut min_h = f64::INFINITY;
        let mut ok = false;
        for t in &rec.witnesses {
            let (d, p) = curve::point_from_triple(curve, t.u, t.v, t.w)?;
            debug_assert_eq!(d, rec.d);
            let h = curve::canonical_height(&tw, &p, CERTIFY_TOL)?;
            min_h = min_h.min(h);
            if h <= threshold && !curve::is_torsion(&tw, &p)? {
                ok = true;
            }
        }
        rec.min_hhat = Some(min_h);
        rec.certified = ok;
    }
    Ok(())
}

pub fn census_count(census: &Census) -> u64 {
    census.len() as u64
}

/// Witness points of a census record, as curve points.
pub fn witness_point(
    curve: &CurveParams,
    rec: &FamilyRecord,
    idx: usize,
) -> Result<(TwistedCurve, ProjectivePoint), FamilyError> {
    let t = rec.witnesses[idx];
    let (d, p) = curve::point_from_triple(curve, t.u, t.v, t.w)?;
    let tw = TwistedCurve::new(*curve, d)?;
    Ok((tw, p))
}

/// One growth-law observation: census size against `X^(1/2) log X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthRow {
    pub x: u64,
    pub count: u64,
    pub ratio: f64,
}

/// Census counts over an increasing grid with normalized ratios
/// `count / (X^(1/2) log X)`, the desk-scale surrogate for the growth
/// constant.
pub fn growth_table(
    curve: &CurveParams,
    rp: &RegionParams,
    x_grid: &[u64],
) -> Result<Vec<GrowthRow>, FamilyError> {
    let mut out = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let count = census_count(&build_census(curve, rp, x)?);
        let ratio = if x >= 2 {
            count as f64 / (mathf::sqrt(x as f64) * mathf::ln(x as f64))
        } else {
            0.0
        };
        out.push(GrowthRow { x, count, ratio });
    }
    Ok(out)
}
