//! Solutions of `p² − d·q² = rhs` inside a coordinate box.
//!
//! Non-square `d`: representatives of each solution class are found by a
//! bounded search (the class-minimal solution satisfies the classical bound
//! `|q| ≤ u·√(|rhs| / (2(t−1)))` for the fundamental unit `(t, u)` of
//! `x² − dy² = 1`), then each class is unfolded by unit multiplication in
//! both directions and clipped to the box. Square `d = e²` degenerates to
//! the factorization `(p − eq)(p + eq) = rhs` and is solved by divisor
//! enumeration.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{exact_sqrt, isqrt, positive_divisors};

use super::SeriesError;

/// Fundamental solution of `x² − d·y² = 1` for non-square `d ≥ 2`, via the
/// continued fraction expansion of `√d`.
pub(crate) fn fundamental_unit(d: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(d >= &BigInt::from(2) && exact_sqrt(d).is_none());
    let a0 = isqrt(d);
    // CF state: (√d + m) / den
    let mut m = BigInt::zero();
    let mut den = BigInt::one();
    let mut a = a0.clone();
    // convergent numerators/denominators
    let (mut h_prev, mut h) = (BigInt::one(), a0.clone());
    let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
    loop {
        if &h * &h - d * &k * &k == BigInt::one() {
            return (h, k);
        }
        m = &a * &den - &m;
        den = (d - &m * &m) / &den;
        a = (&a0 + &m) / &den;
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
    }
}

fn in_box(p: &BigInt, q: &BigInt, bound: &BigInt) -> bool {
    p.abs() <= *bound && q.abs() <= *bound
}

/// All `(p, q)` with `p² − d·q² = rhs` and `|p|, |q| ≤ bound`, sorted
/// lexicographically.
pub fn pell_solutions(
    d: &BigInt,
    rhs: &BigInt,
    bound: &BigInt,
) -> Result<Vec<(BigInt, BigInt)>, SeriesError> {
    if !d.is_positive() {
        return Err(SeriesError::NonPositiveD);
    }
    let mut out: BTreeSet<(BigInt, BigInt)> = BTreeSet::new();
    if bound.is_negative() {
        return Ok(Vec::new());
    }

    if let Some(e) = exact_sqrt(d) {
        solve_square_case(&e, rhs, bound, &mut out);
        return Ok(out.into_iter().collect());
    }

    if rhs.is_zero() {
        // √d irrational: p² = d·q² forces p = q = 0.
        return Ok(vec![(BigInt::zero(), BigInt::zero())]);
    }

    let (t, u) = fundamental_unit(d);
    // |q| bound for class representatives; the N < 0 variant (denominator
    // 2(t−1)) dominates the N > 0 one, so it is safe for both. A class whose
    // minimal |q| exceeds the box cannot meet the box, so the box bound caps
    // the scan as well.
    let n_abs = rhs.abs();
    let class_bound: BigInt = isqrt(&((&u * &u * &n_abs) / (BigInt::from(2) * (&t - 1)))) + 1;
    let q_seed_bound = class_bound.min(bound.clone());

    let mut q0 = BigInt::zero();
    while q0 <= q_seed_bound {
        let p_sq = rhs + d * &q0 * &q0;
        if let Some(p0) = exact_sqrt(&p_sq) {
            let mut seeds = vec![(p0.clone(), q0.clone())];
            if !p0.is_zero() {
                seeds.push((-&p0, q0.clone()));
            }
            if !q0.is_zero() {
                seeds.push((p0.clone(), -&q0));
                if !p0.is_zero() {
                    seeds.push((-&p0, -&q0));
                }
            }
            for seed in seeds {
                unfold_class(&seed, &t, &u, d, bound, &mut out);
            }
        }
        q0 += 1;
    }
    Ok(out.into_iter().collect())
}

/// Walks a solution class in both unit directions, collecting everything in
/// the box. Once a walk leaves the box past the turning point (`p·q > 0`
/// going up, `p·q < 0` going down), both |p| and |q| grow monotonically, so
/// it can stop.
fn unfold_class(
    seed: &(BigInt, BigInt),
    t: &BigInt,
    u: &BigInt,
    d: &BigInt,
    bound: &BigInt,
    out: &mut BTreeSet<(BigInt, BigInt)>,
) {
    for up in [true, false] {
        let (mut p, mut q) = seed.clone();
        loop {
            if in_box(&p, &q, bound) {
                out.insert((p.clone(), q.clone()));
            } else {
                let pq = &p * &q;
                let past_turn = if up {
                    pq.is_positive()
                } else {
                    pq.is_negative()
                };
                if past_turn {
                    break;
                }
            }
            let next = if up {
                (&p * t + &q * u * d, &p * u + &q * t)
            } else {
                (&p * t - &q * u * d, &q * t - &p * u)
            };
            p = next.0;
            q = next.1;
        }
    }
}

/// `d = e²`: factor `(p − eq)(p + eq) = rhs`.
fn solve_square_case(
    e: &BigInt,
    rhs: &BigInt,
    bound: &BigInt,
    out: &mut BTreeSet<(BigInt, BigInt)>,
) {
    if rhs.is_zero() {
        // p = ±e·q
        let q_max = bound / e;
        let mut q = -&q_max;
        while q <= q_max {
            let p = e * &q;
            out.insert((p.clone(), q.clone()));
            out.insert((-p, q.clone()));
            q += 1;
        }
        return;
    }
    for u_abs in positive_divisors(rhs) {
        for u in [u_abs.clone(), -&u_abs] {
            let v = rhs / &u;
            let sum = &u + &v;
            if sum.is_odd() {
                continue;
            }
            let p = sum / 2;
            let diff = &v - &u;
            let (q, rem) = diff.div_rem(&(BigInt::from(2) * e));
            if !rem.is_zero() {
                continue;
            }
            if in_box(&p, &q, bound) {
                out.insert((p, q));
            }
        }
    }
}
