//! Counting statistics over the family: the second moment `R_Q^(2)`, the
//! diagonal term `m_Q` computed two independent ways, the off-diagonal
//! remainder `A_Q`, sign-restricted first moments `S_{Q,nu}`, and the
//! Cauchy-Schwarz lower bound for the sign proportions.
//!
//! The diagonal term counts ordered pairs of representations of the same `d`
//! that agree in `P^1`, i.e. `(u1 : v1 w1^2) = (u2 : v2 w2^2)`. Each such
//! pair factors uniquely through a 5-tuple `(u, v, w, x, y)` with `x, y`
//! coprime, via `((ux, vy^3, wx^2), (uy, vx^3, wy^2))`; `m_q_param`
//! enumerates those 5-tuples directly and exists purely as an independent
//! oracle for `m_q_brute`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::arith;
use crate::curve::CurveParams;
use crate::family::{self, q_poly, FamilyError, RegionMode, RegionParams, Triple};
use crate::mathf;
use crate::signs::{self, BaseCurveData, SignsError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MomentError {
    Family(FamilyError),
    Signs(SignsError),
    EmptyFamily,
}

impl From<FamilyError> for MomentError {
    fn from(e: FamilyError) -> Self {
        MomentError::Family(e)
    }
}

impl From<SignsError> for MomentError {
    fn from(e: SignsError) -> Self {
        MomentError::Signs(e)
    }
}

impl core::fmt::Display for MomentError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MomentError::Family(e) => write!(f, "{e}"),
            MomentError::Signs(e) => write!(f, "{e}"),
            MomentError::EmptyFamily => write!(f, "census is empty"),
        }
    }
}

impl core::error::Error for MomentError {}

/// `R_Q^(2)(alpha; X) = sum_{d <= X} r_Q(alpha; d)^2`, over all `d`
/// (the second moment carries no square-free restriction).
pub fn second_moment(curve: &CurveParams, rp: &RegionParams, x: u64) -> Result<u64, MomentError> {
    let counts = representation_counts(curve, rp, x)?;
    Ok(counts.values().map(|&r| r * r).sum())
}

/// Multiplicities `r_Q(alpha; d)` for all represented `d <= X`.
pub fn representation_counts(
    curve: &CurveParams,
    rp: &RegionParams,
    x: u64,
) -> Result<BTreeMap<u64, u64>, MomentError> {
    let mut counts = BTreeMap::new();
    for (_, d) in family::enumerate_triples(curve, rp, x, None)? {
        *counts.entry(d).or_insert(0u64) += 1;
    }
    Ok(counts)
}

/// All representations of a single `d`: region (or relaxed) triples with
/// `Q(u, v, w) = d`. Independent of the census enumerator: it walks
/// divisors `v | d` and solves the cubic `F(u, vw^2) = d/v` exactly.
pub fn representations_of(
    curve: &CurveParams,
    rp: &RegionParams,
    d: u64,
) -> Result<Vec<Triple>, MomentError> {
    if d == 0 {
        return Ok(Vec::new());
    }
    if matches!(rp.mode, RegionMode::Relaxed) && (curve.a() < 0 || curve.b() < 1) {
        return Err(MomentError::Family(FamilyError::UnsupportedRelaxedCurve));
    }
    let mut out = Vec::new();
    for v in arith::factorize(d).divisors() {
        let k = (d / v) as i128;
        let mut w = 1u64;
        loop {
            let z = (v as i128) * (w as i128) * (w as i128);
            if !z_admissible(curve, rp, z, k, d) {
                break;
            }
            if let Some(u) = solve_cubic_for_u(curve, z, k) {
                let t = Triple::new(u, v, w);
                debug_assert_eq!(q_poly(curve, &t).ok(), Some(d as i128));
                if family::in_region(curve, &t, rp)? {
                    out.push(t);
                }
            }
            w += 1;
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Loop cutoff in `z = v w^2` for representations of a fixed value.
///
/// Region mode: admissibility forces `z <= exp(-2 c2) d^beta` (one extra
/// unit of slack; exact membership is re-checked per triple). Relaxed mode
/// (A >= 0, B >= 1): `F(u, z) >= B z^3`, so `B z^3 <= k`.
fn z_admissible(curve: &CurveParams, rp: &RegionParams, z: i128, k: i128, d: u64) -> bool {
    if k < 1 || z < 1 {
        return false;
    }
    match rp.mode {
        RegionMode::Relaxed => (curve.b() as i128) * z * z * z <= k,
        _ => {
            let cap = mathf::exp(-2.0 * rp.c2) * mathf::powf(d as f64, rp.beta());
            (z as f64) <= cap + 1.0
        }
    }
}

/// The unique positive integer `u` with `F(u, z) = k`, if any.
///
/// Head-scans the finitely many `u` below the monotonicity threshold, then
/// binary-searches the strictly increasing tail.
fn solve_cubic_for_u(curve: &CurveParams, z: i128, k: i128) -> Option<u64> {
    let a = curve.a() as i128;
    let b = curve.b() as i128;
    let f = |u: i128| -> Option<i128> { curve.f_binary(u, z) };
    // For u >= u_t the derivative 3u^2 + A z^2 is positive.
    let u_t: i128 = if a >= 0 {
        1
    } else {
        (num_integer::Roots::sqrt(&(((-a) * z * z / 3) as u128)) as i128) + 2
    };
    for u in 1..u_t {
        if f(u) == Some(k) {
            return Some(u as u64);
        }
    }
    // Upper bound: for u >= u_hi each of the three cubic terms is dominated.
    let u_hi = {
        let s1 = num_integer::Roots::sqrt(&((3 * a.unsigned_abs()) as u128)) as i128 * z + 1;
        let s2 = num_integer::Roots::cbrt(&((3 * b.unsigned_abs()) as u128)) as i128 * z + 1;
        let s3 = num_integer::Roots::cbrt(&((3 * k.unsigned_abs()) as u128)) as i128 + 1;
        s1.max(s2).max(s3) + 1
    };
    let (mut lo, mut hi) = (u_t, u_hi.max(u_t));
    while lo <= hi {
        let mid = lo + (hi - lo) / 2;
        match f(mid) {
            Some(val) if val == k => return Some(mid as u64),
            Some(val) if val < k => lo = mid + 1,
            _ => hi = mid - 1,
        }
    }
    None
}

/// `(u1 : v1 w1^2) = (u2 : v2 w2^2)` in `P^1`, by cross-multiplication.
fn projectively_equal(t1: &Triple, t2: &Triple) -> bool {
    let z1 = (t1.v as u128) * (t1.w as u128) * (t1.w as u128);
    let z2 = (t2.v as u128) * (t2.w as u128) * (t2.w as u128);
    (t1.u as u128) * z2 == (t2.u as u128) * z1
}

/// Ordered pairs of in-region representations of `d` that are projectively
/// equal, straight from the definition.
pub fn m_q_brute(curve: &CurveParams, rp: &RegionParams, d: u64) -> Result<u64, MomentError> {
    let reps = representations_of(curve, rp, d)?;
    let mut count = 0u64;
    for t1 in &reps {
        for t2 in &reps {
            if projectively_equal(t1, t2) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// The same diagonal count through the 5-tuple parametrization
/// `((ux, vy^3, wx^2), (uy, vx^3, wy^2))` with `gcd(x, y) = 1`.
///
/// Enumerates coprime `(x, y)` through cube divisors of `t = v (xy)^3 | d`,
/// then solves `F(u, t w^2) = d / t`; the identity
/// `Q(ux, vy^3, wx^2) = v (xy)^3 F(u, v (xy)^3 w^2)` drives the divisor walk.
pub fn m_q_param(curve: &CurveParams, rp: &RegionParams, d: u64) -> Result<u64, MomentError> {
    if d == 0 {
        return Ok(0);
    }
    if matches!(rp.mode, RegionMode::Relaxed) && (curve.a() < 0 || curve.b() < 1) {
        return Err(MomentError::Family(FamilyError::UnsupportedRelaxedCurve));
    }
    let mut count = 0u64;
    for t in arith::factorize(d).divisors() {
        let k = (d / t) as i128;
        let mut s = 1u64;
        while s * s * s <= t {
            if t % (s * s * s) == 0 {
                let v = t / (s * s * s);
                for (xx, yy) in ordered_coprime_factorizations(s) {
                    let mut w = 1u64;
                    loop {
                        let z = (t as i128) * (w as i128) * (w as i128);
                        // Relaxed mode stops once F(u, z) = k is unsolvable;
                        // region mode once the larger image weight
                        // v_i w_i^2 = t w^2 max(x, y) leaves the region cap.
                        let stop = match rp.mode {
                            RegionMode::Relaxed => !z_admissible(curve, rp, z, k, d),
                            _ => match z.checked_mul(xx.max(yy) as i128) {
                                Some(worst) => !z_admissible(curve, rp, worst, k, d),
                                None => true,
                            },
                        };
                        if stop {
                            break;
                        }
                        if let Some(u) = solve_cubic_for_u(curve, z, k) {
                            let img1 = Triple::new(u * xx, v * yy * yy * yy, w * xx * xx);
                            let img2 = Triple::new(u * yy, v * xx * xx * xx, w * yy * yy);
                            debug_assert_eq!(q_poly(curve, &img1).ok(), Some(d as i128));
                            debug_assert_eq!(q_poly(curve, &img2).ok(), Some(d as i128));
                            if family::in_region(curve, &img1, rp)?
                                && family::in_region(curve, &img2, rp)?
                            {
                                count += 1;
                            }
                        }
                        w += 1;
                    }
                }
            }
            s += 1;
        }
    }
    Ok(count)
}

/// Ordered pairs `(x, y)` with `x y = s` and `gcd(x, y) = 1`.
fn ordered_coprime_factorizations(s: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for x in arith::factorize(s).divisors() {
        let y = s / x;
        if arith::gcd_u64(x, y) == 1 {
            out.push((x, y));
        }
    }
    out
}

/// Aggregated diagonal and off-diagonal sums with their normalizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalReport {
    pub m_q: u64,
    pub a_q: u64,
    /// `M_Q / (X^(1/2) log X)`
    pub m_q_ratio: f64,
    /// `A_Q / X^(1/2)`
    pub a_q_ratio: f64,
}

/// `M_Q = sum_d m_Q(d)` from the grouped enumeration, and `A_Q = R_Q^(2) - M_Q`.
pub fn diagonal_and_offdiagonal(
    curve: &CurveParams,
    rp: &RegionParams,
    x: u64,
) -> Result<DiagonalReport, MomentError> {
    let mut groups: BTreeMap<u64, Vec<Triple>> = BTreeMap::new();
    for (t, d) in family::enumerate_triples(curve, rp, x, None)? {
        groups.entry(d).or_default().push(t);
    }
    let mut rq2 = 0u64;
    let mut m_q = 0u64;
    for reps in groups.values() {
        rq2 += (reps.len() * reps.len()) as u64;
        for t1 in reps {
            for t2 in reps {
                if projectively_equal(t1, t2) {
                    m_q += 1;
                }
            }
        }
    }
    debug_assert!(rq2 >= m_q);
    let a_q = rq2 - m_q;
    let xf = x as f64;
    Ok(DiagonalReport {
        m_q,
        a_q,
        m_q_ratio: m_q as f64 / (mathf::sqrt(xf) * mathf::ln(xf.max(2.0))),
        a_q_ratio: a_q as f64 / mathf::sqrt(xf),
    })
}

/// Sign-restricted first moments over the square-free census.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMoments {
    pub s_plus: u64,
    pub s_minus: u64,
    /// Census mass on `d` with `gcd(D, N_E) > 1`, excluded from both signs.
    pub excluded: u64,
    /// `S_Q(a; alpha; X)` for unit classes `a mod 4 N_E`.
    pub class_sums: BTreeMap<u64, u64>,
}

/// Splits `sum r_Q(d)` over the census by the root number of `E_d`.
pub fn signed_first_moment(
    census: &family::Census,
    base: &BaseCurveData,
) -> Result<SignedMoments, MomentError> {
    let modulus = base.class_modulus();
    let mut out = SignedMoments {
        s_plus: 0,
        s_minus: 0,
        excluded: 0,
        class_sums: BTreeMap::new(),
    };
    for rec in census.values() {
        let r = rec.r_q();
        match signs::root_number(rec.d, base)? {
            Some(1) => out.s_plus += r,
            Some(-1) => out.s_minus += r,
            Some(_) => unreachable!("root numbers are +-1"),
            None => out.excluded += r,
        }
        let a = rec.d % modulus;
        if arith::gcd_u64(a, modulus) == 1 {
            *out.class_sums.entry(a).or_insert(0) += r;
        }
    }
    Ok(out)
}

/// Cauchy-Schwarz lower bounds for the sign proportions and the implied
/// average-analytic-rank bound `1 + Omega_plus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaBounds {
    pub bound_plus: f64,
    pub bound_minus: f64,
    /// Same bounds with the certified-count denominator.
    pub bound_plus_certified: Option<f64>,
    pub bound_minus_certified: Option<f64>,
    pub avg_rank_lower: f64,
}

/// `Omega_nu >= S_{Q,nu}^2 / (#census * R_Q^(2))`, with `#census` standing
/// in for the almost-minimal-height family it is contained in.
pub fn omega_lower_bound(
    census: &family::Census,
    rq2: u64,
    signed: &SignedMoments,
) -> Result<OmegaBounds, MomentError> {
    let count = census.len() as u64;
    if count == 0 || rq2 == 0 {
        return Err(MomentError::EmptyFamily);
    }
    let denom = (count as f64) * (rq2 as f64);
    let bound_plus = (signed.s_plus as f64) * (signed.s_plus as f64) / denom;
    let bound_minus = (signed.s_minus as f64) * (signed.s_minus as f64) / denom;
    let certified = census.values().filter(|rec| rec.certified).count() as u64;
    let certified_bounds = if certified > 0 {
        let cd = (certified as f64) * (rq2 as f64);
        Some((
            (signed.s_plus as f64) * (signed.s_plus as f64) / cd,
            (signed.s_minus as f64) * (signed.s_minus as f64) / cd,
        ))
    } else {
        None
    };
    Ok(OmegaBounds {
        bound_plus,
        bound_minus,
        bound_plus_certified: certified_bounds.map(|b| b.0),
        bound_minus_certified: certified_bounds.map(|b| b.1),
        avg_rank_lower: 1.0 + bound_plus,
    })
}

/// One row of the moments report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub x: u64,
    pub rq2: u64,
    pub m_q: u64,
    pub a_q: u64,
    pub s_plus: u64,
    pub s_minus: u64,
    pub excluded: u64,
    pub count: u64,
    pub omega_bound_plus: f64,
    pub omega_bound_minus: f64,
}

/// Full moment pipeline at one grid point.
pub fn moment_report(
    curve: &CurveParams,
    rp: &RegionParams,
    x: u64,
    base: &BaseCurveData,
) -> Result<MomentReport, MomentError> {
    let rq2 = second_moment(curve, rp, x)?;
    let diag = diagonal_and_offdiagonal(curve, rp, x)?;
    let census = family::build_census(curve, rp, x)?;
    let signed = signed_first_moment(&census, base)?;
    let omega = omega_lower_bound(&census, rq2, &signed);
    let (bp, bm) = match omega {
        Ok(o) => (o.bound_plus, o.bound_minus),
        Err(MomentError::EmptyFamily) => (0.0, 0.0),
        Err(e) => return Err(e),
    };
    Ok(MomentReport {
        x,
        rq2,
        m_q: diag.m_q,
        a_q: diag.a_q,
        s_plus: signed.s_plus,
        s_minus: signed.s_minus,
        excluded: signed.excluded,
        count: census.len() as u64,
        omega_bound_plus: bp,
        omega_bound_minus: bm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::validate_curve;
    use crate::family::Alpha;

    fn curve02() -> CurveParams {
        validate_curve(0, 2).unwrap()
    }

    fn region() -> RegionParams {
        RegionParams::new(Alpha::new(1, 125).unwrap(), 0.0, 0.0, RegionMode::Region).unwrap()
    }

    fn relaxed() -> RegionParams {
        region().with_mode(RegionMode::Relaxed)
    }

    #[test]
    fn second_moment_x100() {
        // d in {3, 34, 48, 86}, each with exactly one representation.
        assert_eq!(second_moment(&curve02(), &region(), 100).unwrap(), 4);
        assert_eq!(second_moment(&curve02(), &region(), 2).unwrap(), 0);
    }

    #[test]
    fn representations_match_enumeration_groups() {
        let c = curve02();
        for rp in [region(), relaxed()] {
            let counts = representation_counts(&c, &rp, 10_000).unwrap();
            for (&d, &r) in counts.iter().take(200) {
                let reps = representations_of(&c, &rp, d).unwrap();
                assert_eq!(reps.len() as u64, r, "d = {d}");
            }
            // A value with no representation at all.
            assert!(representations_of(&c, &rp, 7).unwrap().is_empty());
        }
    }

    #[test]
    fn m_q_at_least_r_and_brute_equals_param_small() {
        let c = curve02();
        for rp in [region(), relaxed()] {
            for d in 1..=500u64 {
                let brute = m_q_brute(&c, &rp, d).unwrap();
                let param = m_q_param(&c, &rp, d).unwrap();
                assert_eq!(brute, param, "d = {d}");
                let r = representations_of(&c, &rp, d).unwrap().len() as u64;
                assert!(brute >= r);
                if r == 1 {
                    assert_eq!(brute, 1);
                }
            }
        }
    }

    #[test]
    fn m_q_example_8200_relaxed() {
        // The pair (1,8,1), (2,1,4) arises from (u,v,w,x,y) = (1,1,1,1,2).
        let c = curve02();
        let reps = representations_of(&c, &relaxed(), 8200).unwrap();
        assert!(reps.contains(&Triple::new(1, 8, 1)));
        assert!(reps.contains(&Triple::new(2, 1, 4)));
        assert!(projectively_equal(&Triple::new(1, 8, 1), &Triple::new(2, 1, 4)));
        let brute = m_q_brute(&c, &relaxed(), 8200).unwrap();
        let param = m_q_param(&c, &relaxed(), 8200).unwrap();
        assert_eq!(brute, param);
        assert!(brute >= 4, "the off-diagonal pair counts both ways plus diagonals");
    }

    #[test]
    fn q_identity_exhaustive_small() {
        // Q(ux, vy^3, wx^2) = Q(uy, vx^3, wy^2) for all arguments <= 8.
        let c = curve02();
        for u in 1..=8u64 {
            for v in 1..=8u64 {
                for w in 1..=8u64 {
                    for x in 1..=8u64 {
                        for y in 1..=8u64 {
                            let t1 = Triple::new(u * x, v * y * y * y, w * x * x);
                            let t2 = Triple::new(u * y, v * x * x * x, w * y * y);
                            assert_eq!(
                                q_poly(&c, &t1).unwrap(),
                                q_poly(&c, &t2).unwrap(),
                                "(u,v,w,x,y) = ({u},{v},{w},{x},{y})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_x100() {
        let rep = diagonal_and_offdiagonal(&curve02(), &region(), 100).unwrap();
        assert_eq!(rep.m_q, 4);
        assert_eq!(rep.a_q, 0);
    }

    #[test]
    fn moments_monotone_in_x() {
        let c = curve02();
        let rp = region();
        let mut prev = (0u64, 0u64, 0u64);
        for x in [100u64, 1_000, 10_000, 50_000] {
            let rq2 = second_moment(&c, &rp, x).unwrap();
            let diag = diagonal_and_offdiagonal(&c, &rp, x).unwrap();
            assert!(rq2 >= prev.0 && diag.m_q >= prev.1 && diag.a_q >= prev.2);
            prev = (rq2, diag.m_q, diag.a_q);
        }
    }

    #[test]
    fn signed_moments_partition_census_mass() {
        let c = curve02();
        let rp = region();
        let base = BaseCurveData::from_config(1728, -1).unwrap();
        let census = family::build_census(&c, &rp, 100_000).unwrap();
        let signed = signed_first_moment(&census, &base).unwrap();
        let total: u64 = census.values().map(|rec| rec.r_q()).sum();
        assert_eq!(signed.s_plus + signed.s_minus + signed.excluded, total);
        assert!(signed.s_plus > 0 && signed.s_minus > 0);
        // Restricted to d coprime to 4 N_E, the class sums over defined
        // classes recover exactly the defined-sign mass.
        let modulus = base.class_modulus();
        let defined_class_total: u64 = signed
            .class_sums
            .iter()
            .filter(|(&a, _)| signs::class_sign(a, &base).unwrap().is_some())
            .map(|(_, &r)| r)
            .sum();
        let defined_mass_coprime: u64 = census
            .values()
            .filter(|rec| {
                arith::gcd_u64(rec.d % modulus, modulus) == 1
                    && signs::root_number(rec.d, &base).unwrap().is_some()
            })
            .map(|rec| rec.r_q())
            .sum();
        assert_eq!(defined_class_total, defined_mass_coprime);
        assert_eq!(defined_mass_coprime, signed.s_plus + signed.s_minus);
    }

    #[test]
    fn omega_bound_is_cauchy_schwarz_consistent() {
        let c = curve02();
        let rp = region();
        let base = BaseCurveData::from_config(1728, -1).unwrap();
        let census = family::build_census(&c, &rp, 50_000).unwrap();
        let rq2 = second_moment(&c, &rp, 50_000).unwrap();
        let signed = signed_first_moment(&census, &base).unwrap();
        let omega = omega_lower_bound(&census, rq2, &signed).unwrap();
        assert!(omega.bound_plus >= 0.0 && omega.bound_plus <= 1.0);
        assert!(omega.bound_minus >= 0.0 && omega.bound_minus <= 1.0);
        assert!(omega.avg_rank_lower >= 1.0);
        // S = 0 gives a zero bound.
        let empty = SignedMoments {
            s_plus: 0,
            s_minus: 0,
            excluded: 0,
            class_sums: BTreeMap::new(),
        };
        let o = omega_lower_bound(&census, rq2, &empty).unwrap();
        assert_eq!(o.bound_plus, 0.0);
    }

    #[test]
    fn empty_census_is_an_error_for_omega() {
        let census = family::Census::new();
        let signed = SignedMoments {
            s_plus: 0,
            s_minus: 0,
            excluded: 0,
            class_sums: BTreeMap::new(),
        };
        assert!(matches!(
            omega_lower_bound(&census, 0, &signed),
            Err(MomentError::EmptyFamily)
        ));
    }
}
