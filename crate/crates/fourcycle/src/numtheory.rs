//! Exact integer and modular arithmetic: gcd, modular inverse,
//! multiplicative order, deterministic primality, generator search, and
//! prime search in arithmetic progressions.
//!
//! All residues are kept in canonical form `[0, P-1]`. Everything here is
//! a pure function on machine integers, safe to call concurrently.

use crate::error::{Error, Result};

/// Default cap on `n` for [`dirichlet_prime`].
pub const DIRICHLET_DEFAULT_CAP: u64 = 1_000_000;

/// Greatest common divisor. Errors when both inputs are zero.
pub fn gcd(a: u64, b: u64) -> Result<u64> {
    if a == 0 && b == 0 {
        return Err(Error::InvalidInput("gcd(0, 0) is undefined".into()));
    }
    Ok(gcd_raw(a, b))
}

fn gcd_raw(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `true` iff `x mod p` is a unit of the ring of integers mod `p`.
pub fn is_unit(x: u64, p: u64) -> bool {
    p >= 2 && gcd_raw(x % p, p) == 1
}

fn require_unit(x: u64, p: u64, what: &str) -> Result<u64> {
    if p < 2 {
        return Err(Error::InvalidInput(format!("modulus {p} must be >= 2")));
    }
    let x = x % p;
    if gcd_raw(x, p) != 1 {
        return Err(Error::InvalidInput(format!(
            "{what}: {x} is not a unit mod {p}"
        )));
    }
    Ok(x)
}

/// `base^exp mod p`, with `p >= 1`.
pub fn mod_pow(base: u64, mut exp: u64, p: u64) -> u64 {
    if p == 1 {
        return 0;
    }
    let mut result: u64 = 1;
    let mut base = (base % p) as u128;
    let p = p as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            result = ((result as u128 * base) % p) as u64;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

/// Multiplicative inverse of `x` mod `p`. Errors on non-units.
pub fn mod_inverse(x: u64, p: u64) -> Result<u64> {
    let x = require_unit(x, p, "mod_inverse")?;
    // Extended Euclid on (p, x); coefficients tracked for x only.
    let (mut r0, mut r1) = (p as i128, x as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    Ok(t0.rem_euclid(p as i128) as u64)
}

/// Order of `x` in the unit group mod `p`: the least `t >= 1` with
/// `x^t = 1 (mod p)`. Errors on non-units.
pub fn mult_order(x: u64, p: u64) -> Result<u64> {
    let x = require_unit(x, p, "mult_order")?;
    let mut t = 1u64;
    let mut v = x;
    while v != 1 {
        v = ((v as u128 * x as u128) % p as u128) as u64;
        t += 1;
    }
    Ok(t)
}

/// Deterministic primality for `u64` via Miller-Rabin with a witness set
/// known exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest generator of the unit group mod a prime `p`.
pub fn find_generator(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::Unsupported(format!(
            "find_generator: {p} is not prime"
        )));
    }
    if p == 2 {
        return Ok(1);
    }
    let factors = prime_factors(p - 1);
    for z in 2..p {
        if factors.iter().all(|&q| mod_pow(z, (p - 1) / q, p) != 1) {
            return Ok(z);
        }
    }
    unreachable!("a prime modulus always has a generator")
}

/// Smallest `n >= start_n` such that `1 + half_l * n` is prime, searched
/// up to the default cap. Returns `(prime, n)`.
pub fn dirichlet_prime(half_l: u64, start_n: u64) -> Result<(u64, u64)> {
    dirichlet_prime_capped(half_l, start_n, DIRICHLET_DEFAULT_CAP)
}

/// As [`dirichlet_prime`] with an explicit cap on `n`.
pub fn dirichlet_prime_capped(half_l: u64, start_n: u64, max_n: u64) -> Result<(u64, u64)> {
    if half_l == 0 {
        return Err(Error::InvalidInput("dirichlet_prime: half_l must be >= 1".into()));
    }
    for n in start_n.max(1)..=max_n {
        let p = 1 + half_l * n;
        if is_prime(p) {
            return Ok((p, n));
        }
    }
    Err(Error::SearchExhausted(format!(
        "no prime 1 + {half_l}*n for n in [{start_n}, {max_n}]"
    )))
}
