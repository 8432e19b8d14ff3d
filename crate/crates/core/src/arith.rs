//! Small exact-arithmetic helpers shared across modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Floor square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative integer");
    n.sqrt()
}

/// `Some(r)` with `r ≥ 0` and `r² = n`, when `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Distinct prime factors of |n|, ascending. Trial division; the inputs in
/// this crate are user-scale parameters, not cryptographic sizes.
pub fn distinct_prime_factors(n: &BigInt) -> Vec<BigInt> {
    let mut m = n.abs();
    let mut out = Vec::new();
    if m <= BigInt::one() {
        return out;
    }
    let two = BigInt::from(2);
    if m.is_even() {
        out.push(two.clone());
        while m.is_even() {
            m /= &two;
        }
    }
    let mut p = BigInt::from(3);
    while &p * &p <= m {
        if m.is_multiple_of(&p) {
            out.push(p.clone());
            while m.is_multiple_of(&p) {
                m /= &p;
            }
        }
        p += 2;
    }
    if m > BigInt::one() {
        out.push(m);
    }
    out
}

/// Primes whose square divides |n|.
pub fn square_prime_divisors(n: &BigInt) -> Vec<BigInt> {
    distinct_prime_factors(n)
        .into_iter()
        .filter(|p| n.is_multiple_of(&(p * p)))
        .collect()
}

/// All positive divisors of |n|, ascending. Requires n ≠ 0.
pub fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    assert!(!n.is_zero(), "divisors of zero");
    let m = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= m {
        if m.is_multiple_of(&d) {
            small.push(d.clone());
            let q = &m / &d;
            if q != d {
                large.push(q);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// gcd of three integers.
pub fn gcd3(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    a.gcd(b).gcd(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_helpers() {
        assert_eq!(exact_sqrt(&BigInt::from(49)), Some(BigInt::from(7)));
        assert_eq!(exact_sqrt(&BigInt::from(48)), None);
        assert_eq!(exact_sqrt(&BigInt::from(0)), Some(BigInt::zero()));
        assert_eq!(exact_sqrt(&BigInt::from(-4)), None);
        assert_eq!(isqrt(&BigInt::from(17)), BigInt::from(4));
    }

    #[test]
    fn factor_helpers() {
        let n = BigInt::from(360); // 2³·3²·5
        assert_eq!(
            distinct_prime_factors(&n),
            vec![BigInt::from(2), BigInt::from(3), BigInt::from(5)]
        );
        assert_eq!(
            square_prime_divisors(&n),
            vec![BigInt::from(2), BigInt::from(3)]
        );
        assert_eq!(distinct_prime_factors(&BigInt::one()), Vec::<BigInt>::new());
        assert_eq!(
            positive_divisors(&BigInt::from(-12)),
            [1, 2, 3, 4, 6, 12].map(BigInt::from).to_vec()
        );
    }
}
