//! Minimal directed-rounding interval arithmetic for Euler-product
//! certification.
//!
//! f64 has no portable rounding-mode control, so every operation widens the
//! result by one ulp on each side. That over-covers the true rounding error
//! of a single IEEE operation, which keeps enclosures valid while staying
//! far below the truncation-tail widths we actually report.

/// Next f64 toward -infinity (one ulp).
fn step_down(x: f64) -> f64 {
    if x.is_nan() || x == f64::NEG_INFINITY {
        return x;
    }
    if x == 0.0 {
        return -f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits - 1 } else { bits + 1 })
}

/// Next f64 toward +infinity (one ulp).
fn step_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}

/// Closed interval `[lo, hi]` guaranteed to contain the exact value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Encloses the exact rational `num/den` (`den > 0`).
    pub fn from_ratio_u128(num: u128, den: u128) -> Self {
        assert!(den > 0);
        let q = num as f64 / den as f64;
        Interval {
            lo: step_down(q),
            hi: step_up(q),
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: step_down(self.lo + other.lo),
            hi: step_up(self.hi + other.hi),
        }
    }

    /// Product of intervals with nonnegative lower endpoints.
    ///
    /// All products in this crate are of positive quantities (Euler factors,
    /// normalizing constants), so the monotone formula suffices.
    pub fn mul_nonneg(&self, other: &Interval) -> Interval {
        assert!(self.lo >= 0.0 && other.lo >= 0.0, "mul_nonneg on negatives");
        Interval {
            lo: step_down(self.lo * other.lo),
            hi: step_up(self.hi * other.hi),
        }
    }

    /// Scales by a positive constant.
    pub fn scale(&self, k: f64) -> Interval {
        assert!(k > 0.0);
        Interval {
            lo: step_down(self.lo * k),
            hi: step_up(self.hi * k),
        }
    }

    /// Divides by a positive constant.
    pub fn div_pos(&self, k: f64) -> Interval {
        assert!(k > 0.0);
        Interval {
            lo: step_down(self.lo / k),
            hi: step_up(self.hi / k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stepping_brackets_value() {
        for &x in &[1.0f64, 0.1, 1e-300, 12345.678, 3.0e300] {
            assert!(step_down(x) < x && x < step_up(x));
        }
        assert!(step_down(0.0) < 0.0 && step_up(0.0) > 0.0);
    }

    #[test]
    fn ratio_enclosure_contains_truth() {
        let iv = Interval::from_ratio_u128(1, 3);
        assert!(iv.lo < 1.0 / 3.0 + 1e-18 && iv.hi > 1.0 / 3.0 - 1e-18);
        assert!(iv.lo <= 0.3333333333333334 && iv.hi >= 0.3333333333333333);
    }

    #[test]
    fn product_of_many_factors_stays_tight() {
        let mut acc = Interval::point(1.0);
        for p in 2u128..2000 {
            let f = Interval::from_ratio_u128((p * p - 2) as u128, (p * p) as u128);
            acc = acc.mul_nonneg(&f);
        }
        assert!(acc.is_positive());
        assert!(acc.width() < 1e-12, "width {}", acc.width());
    }
}
