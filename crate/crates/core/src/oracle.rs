//! Validation-grade reference implementations, kept independent of the fast
//! paths they check.
//!
//! [`hhat_reference`] recomputes the canonical height from the doubling-limit
//! definition with a 768-bit fixed-point orbit run for 40+ iterations, so it
//! serves as the high-iteration oracle for the f64 engine. The finite-place
//! cancellation exponents are discrete integers; [`exact_orbit_gcds`]
//! recovers them by literal gcd extraction on the exact reduced orbit (only
//! feasible for small depths, which is exactly what pins the deeper
//! residue-tracking passes).

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::curve::{
    self, cancellation_primes, padic_cancellation_steps, CurveError, CurveParams, DuplicationForms,
    ProjectivePoint, TwistedCurve,
};
use crate::mathf;

/// Fractional bits of the fixed-point orbit.
const PREC: u64 = 768;

const LN_2: f64 = core::f64::consts::LN_2;

/// Fixed-point real: value = mantissa / 2^PREC.
#[derive(Debug, Clone)]
struct Fx(BigInt);

impl Fx {
    fn mul(&self, other: &Fx) -> Fx {
        Fx((&self.0 * &other.0) >> PREC)
    }

    fn scale_int(&self, k: i64) -> Fx {
        Fx(&self.0 * BigInt::from(k))
    }

    fn add(&self, other: &Fx) -> Fx {
        Fx(&self.0 + &other.0)
    }

    fn abs_cmp_max(&self, other: &Fx) -> Fx {
        let a = self.0.abs();
        let b = other.0.abs();
        Fx(a.max(b))
    }

    /// Divides by a positive Fx, keeping PREC fractional bits.
    fn div(&self, den: &Fx) -> Fx {
        Fx((&self.0 << PREC) / &den.0)
    }

    /// Natural log of a positive value.
    fn ln(&self) -> f64 {
        let mag = self.0.magnitude();
        debug_assert!(!mag.is_zero());
        let bits = mag.bits();
        let (top, shift) = if bits <= 53 {
            (mag.to_f64().unwrap(), 0i64)
        } else {
            (((mag) >> (bits - 53)).to_f64().unwrap(), (bits - 53) as i64)
        };
        mathf::ln(top) + (shift - PREC as i64) as f64 * LN_2
    }
}

fn ln_big_uint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 53 {
        let v = n.to_f64().unwrap_or(1.0);
        if v <= 1.0 {
            0.0
        } else {
            mathf::ln(v)
        }
    } else {
        let top = (n >> (bits - 53)).to_f64().unwrap();
        mathf::ln(top) + (bits - 53) as f64 * LN_2
    }
}

/// Evaluates the duplication pair in fixed point.
fn eval_forms_fx(forms: &DuplicationFormsView, x: &Fx, z: &Fx) -> (Fx, Fx) {
    let x2 = x.mul(x);
    let z2 = z.mul(z);
    let x4 = x2.mul(&x2);
    let z4 = z2.mul(&z2);
    let x2z2 = x2.mul(&z2);
    let xz3 = x.mul(z).mul(&z2);
    let phi = x4
        .add(&x2z2.scale_int(-2 * forms.a))
        .add(&xz3.scale_int(-8 * forms.b))
        .add(&z4.scale_int(forms.a * forms.a));
    let x3z = x2.mul(x).mul(z);
    let psi = x3z
        .scale_int(4)
        .add(&xz3.scale_int(4 * forms.a))
        .add(&z4.scale_int(4 * forms.b));
    (phi, psi)
}

struct DuplicationFormsView {
    a: i64,
    b: i64,
}

/// Canonical height recomputed from the doubling-limit definition with a
/// fixed-point orbit of `arch_steps` iterations (30+ recommended) and
/// finite-place passes twice as deep as the requested depth.
pub fn hhat_reference(
    curve: &TwistedCurve,
    p: &ProjectivePoint,
    arch_steps: u32,
) -> Result<f64, CurveError> {
    if !p.on_curve(curve) {
        return Err(CurveError::PointNotOnCurve);
    }
    if p.is_identity() {
        return Ok(0.0);
    }
    for n in [2u64, 4, 8] {
        if multiple_is_identity(curve, p, n)? {
            return Ok(0.0);
        }
    }
    let base = curve.base();
    let forms_view = DuplicationFormsView {
        a: base.a(),
        b: base.b(),
    };
    let (x0, z0) = p.x_line();
    let t0 = ln_big_uint(x0.magnitude().max(z0.magnitude()));

    // Fixed-point archimedean series.
    let bits = x0.magnitude().bits().max(z0.magnitude().bits()).max(1);
    let mut xr = Fx((&x0 << PREC) >> bits);
    let mut zr = Fx((&z0 << PREC) >> bits);
    let mut arch = 0.0f64;
    let mut scale = 0.25f64;
    for _ in 0..arch_steps {
        let norm = xr.abs_cmp_max(&zr);
        xr = xr.div(&norm);
        zr = zr.div(&norm);
        let (phi, psi) = eval_forms_fx(&forms_view, &xr, &zr);
        let m = phi.abs_cmp_max(&psi);
        arch += m.ln() * scale;
        xr = phi;
        zr = psi;
        scale *= 0.25;
    }

    // Finite places, run deeper than the production engine would.
    let forms = DuplicationForms::new(base);
    let mut finite = 0.0f64;
    for (q, r_p) in cancellation_primes(base) {
        let steps = 2 * arch_steps.min(40);
        let mut scale = 0.25f64;
        let mut s = 0.0f64;
        for m in padic_cancellation_steps(&forms, q, r_p, steps, &x0, &z0) {
            s += m as f64 * scale;
            scale *= 0.25;
        }
        finite += mathf::ln(q as f64) * s;
    }
    Ok(0.5 * (t0 + arch - finite))
}

fn multiple_is_identity(
    curve: &TwistedCurve,
    p: &ProjectivePoint,
    n: u64,
) -> Result<bool, CurveError> {
    let mut acc = p.clone();
    let mut k = 1u64;
    while k < n {
        acc = curve::add_points(curve, &acc, &acc)?;
        if acc.is_identity() {
            return Ok(true);
        }
        k *= 2;
    }
    Ok(acc.is_identity())
}

/// Literal gcd extraction along the exact reduced duplication orbit:
/// returns `g_1, ..., g_steps` with `(X', Z')_{j} = (phi, psi)(X,Z)_{j-1} / g_j`.
///
/// Coordinate sizes quadruple per step, so keep `steps` small (<= 8).
pub fn exact_orbit_gcds(curve: &CurveParams, p: &ProjectivePoint, steps: u32) -> Vec<BigUint> {
    let forms = DuplicationForms::new(curve);
    let (mut x, mut z) = p.x_line();
    let mut out = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        let (phi, psi) = forms.eval_big(&x, &z);
        let g = phi.gcd(&psi);
        debug_assert!(!g.is_zero(), "orbit hit a 2-torsion x-coordinate");
        x = phi / &g;
        z = psi / &g;
        out.push(g.magnitude().clone());
    }
    out
}
