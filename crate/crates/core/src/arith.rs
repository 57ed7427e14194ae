//! Integer-arithmetic substrate: certified 64-bit factorization, Möbius
//! function, square-free tests, Euler `phi* = phi(n)/n`, the Kronecker symbol
//! and fundamental discriminants.
//!
//! Everything is exact. Primality testing is deterministic for 64-bit inputs
//! (fixed Miller–Rabin witness set), and the rho stage retries with fresh
//! deterministic seeds, so factorization is reproducible run to run.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Prime-exponent factorization `n = prod p_i^(e_i)` with `p_1 < p_2 < ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    /// Reconstructs the factored integer (panics on overflow; inputs are 64-bit).
    pub fn value(&self) -> u64 {
        let mut n: u64 = 1;
        for &(p, e) in &self.pairs {
            for _ in 0..e {
                n = n.checked_mul(p).expect("factorization value overflows u64");
            }
        }
        n
    }

    pub fn is_squarefree(&self) -> bool {
        self.pairs.iter().all(|&(_, e)| e == 1)
    }

    pub fn mobius(&self) -> i32 {
        if !self.is_squarefree() {
            0
        } else if self.pairs.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn distinct_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|&(p, _)| p)
    }

    /// Euler totient of the factored integer.
    pub fn phi(&self) -> u64 {
        let mut out: u64 = 1;
        for &(p, e) in &self.pairs {
            out *= p - 1;
            for _ in 1..e {
                out *= p;
            }
        }
        out
    }

    /// All positive divisors, unsorted.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.pairs {
            let prev = out.clone();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                out.extend(prev.iter().map(|d| d * pk));
            }
        }
        out
    }
}

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Deterministic Miller–Rabin for 64-bit inputs.
///
/// The witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is known to be
/// exact for all n < 3.3e24, which covers u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// SplitMix64: small deterministic generator for rho retries.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

/// Brent-cycle Pollard rho; returns a nontrivial factor of odd composite `n`.
fn pollard_rho_brent(n: u64, rng: &mut SplitMix64) -> u64 {
    debug_assert!(n > 3 && n % 2 != 0);
    loop {
        let c = rng.next_u64() % (n - 2) + 1;
        let step = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = rng.next_u64() % n;
        let mut y = x;
        let mut q = 1u64;
        let mut factor = 1u64;
        let mut xs = x;
        let m = 128u64;
        let mut r = 1u64;
        'outer: while factor == 1 {
            x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k = 0u64;
            while k < r && factor == 1 {
                xs = y;
                let lim = m.min(r - k);
                for _ in 0..lim {
                    y = step(y);
                    q = mulmod(q, x.abs_diff(y).max(1), n);
                }
                factor = gcd_u64(q, n);
                k += lim;
            }
            r *= 2;
            if r > 1 << 22 {
                break 'outer;
            }
        }
        if factor == n || factor == 1 {
            // Backtrack step by step from the last checkpoint.
            factor = 1;
            let mut z = xs;
            while factor == 1 {
                z = step(z);
                factor = gcd_u64(x.abs_diff(z).max(1), n);
                if z == xs {
                    break;
                }
            }
        }
        if factor != 1 && factor != n {
            return factor;
        }
        // Rare failure: retry with a fresh deterministic constant.
    }
}

const FACTORIZE_SEED: u64 = 0x5eed_0f_7ab1e;

/// Complete certified factorization of `n >= 1`.
///
/// Trial division by primes below 2^16 first; remaining cofactors are split by
/// deterministic Miller–Rabin plus seeded Pollard rho.
pub fn factorize(n: u64) -> Factorization {
    factorize_seeded(n, FACTORIZE_SEED)
}

/// Same as [`factorize`], with an explicit retry seed for reproducible runs.
pub fn factorize_seeded(n: u64, seed: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut pairs: Vec<(u64, u32)> = Vec::new();
    let mut rem = n;
    let push = |p: u64, e: u32, pairs: &mut Vec<(u64, u32)>| {
        pairs.push((p, e));
    };
    for p in 2u64.. {
        if p > 1 << 16 || p * p > rem {
            break;
        }
        if rem % p == 0 {
            let mut e = 0u32;
            while rem % p == 0 {
                rem /= p;
                e += 1;
            }
            push(p, e, &mut pairs);
        }
    }
    if rem > 1 {
        if rem < (1u64 << 32) || is_prime_u64(rem) {
            // below 2^32 any survivor of 2^16 trial division is prime
            push(rem, 1, &mut pairs);
        } else {
            let mut stack = vec![rem];
            let mut rng = SplitMix64::new(seed ^ n);
            let mut found: Vec<u64> = Vec::new();
            while let Some(m) = stack.pop() {
                if is_prime_u64(m) {
                    found.push(m);
                    continue;
                }
                let f = pollard_rho_brent(m, &mut rng);
                stack.push(f);
                stack.push(m / f);
            }
            found.sort_unstable();
            let mut i = 0;
            while i < found.len() {
                let p = found[i];
                let mut e = 0u32;
                while i < found.len() && found[i] == p {
                    e += 1;
                    i += 1;
                }
                push(p, e, &mut pairs);
            }
        }
    }
    pairs.sort_unstable_by_key(|&(p, _)| p);
    Factorization { pairs }
}

pub fn mobius(n: u64) -> i32 {
    factorize(n).mobius()
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).is_squarefree()
}

/// Shared read-only table of small primes (simple Eratosthenes sieve).
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Self {
        let limit = limit.max(2);
        let mut composite = vec![false; (limit + 1) as usize];
        let mut primes = Vec::new();
        for p in 2..=limit {
            if !composite[p as usize] {
                primes.push(p);
                let mut q = p * p;
                while q <= limit {
                    composite[q as usize] = true;
                    q += p;
                }
            }
        }
        PrimeTable { limit, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }
}

/// Bulk square-free test: sieve out small square divisors `p^2` with
/// `p <= table.limit()` first, then finish off the cofactor.
///
/// This is the dominant cost in census runs, so the full factorization is
/// only reached for cofactors that survive the small-prime stage.
pub fn is_squarefree_bulk(n: u64, table: &PrimeTable) -> bool {
    if n == 0 {
        return false;
    }
    let mut rem = n;
    for &p in table.primes() {
        if p * p > rem {
            break;
        }
        if rem % p == 0 {
            rem /= p;
            if rem % p == 0 {
                return false;
            }
        }
    }
    if rem == 1 {
        return true;
    }
    let lim = table.limit();
    if rem < lim.saturating_mul(lim) {
        // all prime factors of rem exceed table.limit(), so rem is prime
        return true;
    }
    // Large cofactor: square test plus full factorization.
    let r = num_integer::Roots::sqrt(&rem);
    if r * r == rem {
        return false;
    }
    factorize(rem).is_squarefree()
}

/// Exact `phi(n)/n` as a reduced rational.
pub fn phi_star(n: u64) -> BigRational {
    let f = factorize(n);
    let mut num = BigInt::from(1u32);
    let mut den = BigInt::from(1u32);
    for p in f.distinct_primes() {
        num *= BigInt::from(p - 1);
        den *= BigInt::from(p);
    }
    BigRational::new(num, den)
}

/// Kronecker symbol `(a|n)` with the standard conventions at 2, -1 and 0.
pub fn kronecker(a: i128, n: i128) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut t = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            t = -t;
        }
    }
    if n % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        while n % 2 == 0 {
            n /= 2;
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                t = -t;
            }
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n.rem_euclid(8);
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        core::mem::swap(&mut a, &mut n);
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            t = -t;
        }
        a = a.rem_euclid(n);
    }
    if n == 1 {
        t
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    NotSquarefree(u64),
}

impl core::fmt::Display for ArithError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ArithError::NotSquarefree(n) => write!(f, "{n} is not square-free"),
        }
    }
}

impl core::error::Error for ArithError {}

/// Discriminant of the quadratic field `Q(sqrt(d))` for square-free `d >= 1`.
///
/// Returns `d` when `d = 1 mod 4`, else `4d`; `d = 1` yields 1 (trivial
/// character).
pub fn fundamental_discriminant(d: u64) -> Result<i128, ArithError> {
    if !is_squarefree(d) {
        return Err(ArithError::NotSquarefree(d));
    }
    if d % 4 == 1 {
        Ok(d as i128)
    } else {
        Ok(4 * d as i128)
    }
}
