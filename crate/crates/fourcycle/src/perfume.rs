//! Fulfillments and perfumes: the residue conditions that make the
//! circulant construction girth-6-safe, exhaustive enumeration over a
//! modulus range, deterministic perfume search for a target order, and
//! the tight-bound construction with circulant size L+1.
//!
//! A *fulfillment* to P is a unit sigma whose powers sigma^i (for
//! 1 <= i < ord) all differ from 1 by a unit. A *perfume* (P, sigma, tau)
//! adds a unit tau outside the cyclic group generated by sigma.

use crate::error::{Error, Result};
use crate::numtheory::{
    dirichlet_prime, find_generator, is_prime, is_unit, mod_pow, mult_order,
};

/// A validated perfume triple with the order of sigma cached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Perfume {
    p: u64,
    sigma: u64,
    tau: u64,
    order: u64,
}

impl Perfume {
    /// Validates the three perfume conditions, naming the failed one.
    pub fn new(p: u64, sigma: u64, tau: u64) -> Result<Perfume> {
        if p < 2 {
            return Err(Error::InvalidInput(format!("modulus {p} must be >= 2")));
        }
        let sigma = sigma % p;
        let tau = tau % p;
        if !is_fulfillment(sigma, p) {
            return Err(Error::InvalidInput(format!(
                "{sigma} is not a fulfillment to {p}"
            )));
        }
        if !is_unit(tau, p) {
            return Err(Error::InvalidInput(format!("tau = {tau} is not coprime to {p}")));
        }
        let order = mult_order(sigma, p)?;
        let mut v = sigma;
        for _ in 0..order {
            if v == tau {
                return Err(Error::InvalidInput(format!(
                    "tau = {tau} is a power of sigma = {sigma} mod {p}"
                )));
            }
            v = ((v as u128 * sigma as u128) % p as u128) as u64;
        }
        Ok(Perfume { p, sigma, tau, order })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn sigma(&self) -> u64 {
        self.sigma
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    /// Multiplicative order of sigma; half the column count of the codes
    /// built from this perfume.
    pub fn order(&self) -> u64 {
        self.order
    }
}

/// `true` iff `(x - sigma)` is a unit mod P.
pub fn is_affine_coprime(sigma: u64, x: u64, p: u64) -> bool {
    if p < 2 {
        return false;
    }
    is_unit((x % p + p - sigma % p) % p, p)
}

/// The fulfillment predicate: sigma is a unit and every proper power is
/// 1-affine coprime to P.
pub fn is_fulfillment(sigma: u64, p: u64) -> bool {
    if p < 2 || !is_unit(sigma, p) {
        return false;
    }
    let sigma = sigma % p;
    let order = mult_order(sigma, p).expect("unit checked above");
    let mut v = sigma;
    for _ in 1..order {
        if !is_affine_coprime(v, 1, p) {
            return false;
        }
        v = ((v as u128 * sigma as u128) % p as u128) as u64;
    }
    true
}

/// The full perfume predicate.
pub fn is_perfume(p: u64, sigma: u64, tau: u64) -> bool {
    Perfume::new(p, sigma, tau).is_ok()
}

/// One enumeration row: all fulfillments of a given order to a given P,
/// sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FulfillmentRow {
    pub order: u64,
    pub p: u64,
    pub sigmas: Vec<u64>,
}

/// Enumerates every fulfillment sigma < P with `ord_min <= ord_P(sigma)
/// <= ord_max` over `2 <= P <= p_max`, grouped per (order, P) and sorted.
/// Rows with no fulfillments are omitted.
pub fn enumerate_fulfillments(
    p_max: u64,
    ord_min: u64,
    ord_max: u64,
) -> Result<Vec<FulfillmentRow>> {
    if ord_min < 2 || ord_min > ord_max {
        return Err(Error::InvalidInput(format!(
            "order bounds must satisfy 2 <= ord_min <= ord_max, got [{ord_min}, {ord_max}]"
        )));
    }
    let mut rows = Vec::new();
    for order in ord_min..=ord_max {
        for p in 2..=p_max {
            let sigmas: Vec<u64> = (1..p)
                .filter(|&s| {
                    is_unit(s, p)
                        && mult_order(s, p).expect("unit") == order
                        && is_fulfillment(s, p)
                })
                .collect();
            if !sigmas.is_empty() {
                rows.push(FulfillmentRow { order, p, sigmas });
            }
        }
    }
    Ok(rows)
}

/// CSV of enumeration rows: header `order,P,sigma`, one data row per
/// fulfillment, sorted by (order, P, sigma). Extra leading lines may be
/// prepended by callers as `#` comments without disturbing the data.
pub fn fulfillment_csv(rows: &[FulfillmentRow]) -> String {
    let mut out = String::from("order,P,sigma\n");
    for row in rows {
        for s in &row.sigmas {
            out.push_str(&format!("{},{},{}\n", row.order, row.p, s));
        }
    }
    out
}

/// Deterministic perfume with `ord_P(sigma)` exactly `half_l`: smallest
/// prime P = 1 + half_l * n, smallest generator z, sigma = z^n, smallest
/// eligible tau. The degenerate target `half_l = 1` returns (3, 1, 2).
pub fn find_perfume(half_l: u64) -> Result<Perfume> {
    if half_l == 0 {
        return Err(Error::InvalidInput("find_perfume: half_l must be >= 1".into()));
    }
    if half_l == 1 {
        return Perfume::new(3, 1, 2);
    }
    let (mut p, mut n) = dirichlet_prime(half_l, 1)?;
    loop {
        // A generator z of the units mod p has order half_l * n, so z^n
        // has order exactly half_l. The leftover cosets are nonempty for
        // n >= 2, giving room for tau.
        if n >= 2 {
            let z = find_generator(p)?;
            let sigma = mod_pow(z, n, p);
            debug_assert_eq!(mult_order(sigma, p)?, half_l);
            if let Some(tau) = smallest_tau(p, sigma, half_l) {
                return Perfume::new(p, sigma, tau);
            }
        }
        (p, n) = dirichlet_prime(half_l, n + 1)?;
    }
}

fn smallest_tau(p: u64, sigma: u64, order: u64) -> Option<u64> {
    let mut powers = Vec::with_capacity(order as usize);
    let mut v = sigma;
    for _ in 0..order {
        powers.push(v);
        v = ((v as u128 * sigma as u128) % p as u128) as u64;
    }
    (1..p).find(|&t| is_unit(t, p) && !powers.contains(&t))
}

/// Perfume achieving the minimal circulant size P = L + 1 for an even
/// column count L with L + 1 prime: sigma = g^2 and tau = g for the
/// smallest generator g.
pub fn tight_bound_perfume(l: u64) -> Result<Perfume> {
    if l == 0 || l % 2 != 0 {
        return Err(Error::InvalidInput(format!("L = {l} must be even and positive")));
    }
    let p = l + 1;
    if !is_prime(p) {
        return Err(Error::Unsupported(format!("L + 1 = {p} is not prime")));
    }
    let g = find_generator(p)?;
    let sigma = mod_pow(g, 2, p);
    Perfume::new(p, sigma, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{gcd, mod_inverse};

    #[test]
    fn affine_coprime_cases() {
        assert!(is_affine_coprime(2, 1, 7));
        assert!(!is_affine_coprime(1, 1, 7));
        assert!(!is_affine_coprime(4, 1, 9));
    }

    #[test]
    fn fulfillment_cases() {
        assert!(is_fulfillment(2, 7));
        assert!(is_fulfillment(9, 10)); // P - 1 for P = 10
        assert!(!is_fulfillment(3, 7));
        for p in 2u64..60 {
            assert!(is_fulfillment(p - 1, p), "P-1 must fulfill P = {p}");
        }
    }

    #[test]
    fn enumeration_spot_rows() {
        let rows = enumerate_fulfillments(200, 3, 20).unwrap();
        let find = |o: u64, p: u64| {
            rows.iter()
                .find(|r| r.order == o && r.p == p)
                .map(|r| r.sigmas.clone())
        };
        assert_eq!(find(3, 7), Some(vec![2, 4]));
        assert_eq!(find(3, 91), Some(vec![9, 16, 74, 81]));
        assert_eq!(find(8, 17), Some(vec![2, 8, 9, 15]));
        assert_eq!(find(20, 41), Some(vec![2, 5, 8, 20, 21, 33, 36, 39]));
        assert_eq!(find(5, 11), Some(vec![3, 4, 5, 9]));
        assert!(enumerate_fulfillments(10, 1, 3).is_err());
    }

    #[test]
    fn fulfillments_pair_with_inverses() {
        // sigma a fulfillment of order t implies sigma^{-1} is too.
        for row in enumerate_fulfillments(200, 3, 6).unwrap() {
            for &s in &row.sigmas {
                let inv = mod_inverse(s, row.p).unwrap();
                assert!(
                    row.sigmas.contains(&inv),
                    "inverse {inv} of {s} missing in (ord={}, P={})",
                    row.order,
                    row.p
                );
            }
        }
    }

    #[test]
    fn perfume_cases() {
        assert!(is_perfume(7, 2, 3));
        assert!(is_perfume(101, 95, 2));
        assert!(!is_perfume(7, 2, 4)); // 4 = sigma^2
        assert!(!is_perfume(7, 2, 1)); // 1 = sigma^ord
        assert!(!is_perfume(7, 3, 2)); // 3 is not a fulfillment to 7
        assert!(!is_perfume(10, 9, 5)); // tau shares a factor with P
    }

    #[test]
    fn find_perfume_examples() {
        let p1 = find_perfume(1).unwrap();
        assert_eq!((p1.modulus(), p1.sigma(), p1.tau()), (3, 1, 2));
        assert_eq!(p1.order(), 1);

        let p3 = find_perfume(3).unwrap();
        assert_eq!(p3.modulus(), 7);
        assert!([2, 4].contains(&p3.sigma()));
        assert_eq!(p3.order(), 3);

        let p5 = find_perfume(5).unwrap();
        assert_eq!(p5.modulus(), 11);
        assert!([3, 4, 5, 9].contains(&p5.sigma()));
        assert_eq!(p5.order(), 5);

        for h in 1..=16 {
            assert_eq!(find_perfume(h).unwrap().order(), h);
        }
    }

    #[test]
    fn tight_bound_examples() {
        let p6 = tight_bound_perfume(6).unwrap();
        assert_eq!((p6.modulus(), p6.sigma(), p6.tau()), (7, 2, 3));
        let p4 = tight_bound_perfume(4).unwrap();
        assert_eq!((p4.modulus(), p4.sigma(), p4.tau()), (5, 4, 2));
        assert!(matches!(tight_bound_perfume(8), Err(Error::Unsupported(_))));
        assert!(tight_bound_perfume(7).is_err());
    }

    #[test]
    fn power_differences_are_units() {
        // For a perfume, sigma^{-a} - sigma^{-b} and tau times it are
        // units whenever a != b below the order.
        for pf in [
            Perfume::new(7, 2, 3).unwrap(),
            Perfume::new(101, 95, 2).unwrap(),
            find_perfume(6).unwrap(),
        ] {
            let p = pf.modulus();
            let inv = mod_inverse(pf.sigma(), p).unwrap();
            let pow_inv: Vec<u64> = (0..pf.order()).map(|a| mod_pow(inv, a, p)).collect();
            for a in 0..pf.order() as usize {
                for b in 0..pf.order() as usize {
                    if a == b {
                        continue;
                    }
                    let diff = (pow_inv[a] + p - pow_inv[b]) % p;
                    assert_eq!(gcd(diff, p).unwrap(), 1);
                    assert_eq!(gcd(pf.tau() * diff % p, p).unwrap(), 1);
                }
            }
        }
    }

    #[test]
    fn csv_shape() {
        let rows = enumerate_fulfillments(13, 3, 3).unwrap();
        let csv = fulfillment_csv(&rows);
        assert_eq!(csv, "order,P,sigma\n3,7,2\n3,7,4\n3,13,3\n3,13,9\n");
    }
}
