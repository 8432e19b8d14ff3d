//! The rank-2 lattice model `N ∋ H` with `H·N = ℤ`.
//!
//! The pair is encoded by invariants `(a, b, c, d, μ)`: the polarization has
//! square `H² = 2abc²`, the lattice has determinant `−d`, and `μ` is a unit
//! modulo `2abc²` with `μ² ≡ d (mod 4abc²)`. Elements are pairs `(x, y)`
//! standing for `(x·H + y·δ) / 2abc²`, subject to `x ≡ μy (mod 2abc²)`;
//! squares come out as `(x² − d·y²) / 2abc²` and are always even.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{GramLattice, IntMat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PicardError {
    #[error("{field} must be a positive integer")]
    NonPositive { field: &'static str },
    #[error("a and b must be coprime")]
    AbNotCoprime,
    #[error("mu must be a unit modulo 2abc²")]
    MuNotUnit,
    #[error("mu² must be congruent to d modulo 4abc²")]
    DiscriminantCongruence,
    #[error("lattice membership violated: x ≢ μy (mod 2abc²) for ({x}, {y})")]
    CongruenceViolation { x: BigInt, y: BigInt },
    #[error("inexact division while evaluating the form; upstream invariant broken")]
    NonExactDivision,
}

/// Element of the rank-2 lattice in `(x, y)` coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NVector {
    #[serde(with = "crate::bigser")]
    pub x: BigInt,
    #[serde(with = "crate::bigser")]
    pub y: BigInt,
}

impl NVector {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        NVector {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn zero() -> Self {
        NVector::new(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn add(&self, other: &NVector) -> NVector {
        NVector::new(&self.x + &other.x, &self.y + &other.y)
    }

    pub fn sub(&self, other: &NVector) -> NVector {
        NVector::new(&self.x - &other.x, &self.y - &other.y)
    }

    pub fn scale(&self, k: &BigInt) -> NVector {
        NVector::new(&self.x * k, &self.y * k)
    }

    pub fn neg(&self) -> NVector {
        NVector::new(-&self.x, -&self.y)
    }

    /// Exact coordinatewise division; `None` on any remainder.
    pub fn div_exact(&self, k: &BigInt) -> Option<NVector> {
        assert!(!k.is_zero());
        let (qx, rx) = self.x.div_rem(k);
        let (qy, ry) = self.y.div_rem(k);
        if rx.is_zero() && ry.is_zero() {
            Some(NVector { x: qx, y: qy })
        } else {
            None
        }
    }
}

impl fmt::Debug for NVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for NVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Invariants of the marked lattice `H ∈ N`. Always validated on
/// construction; `mu` is stored reduced to `[0, 2abc²)`.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct PicardParams {
    #[serde(with = "crate::bigser")]
    a: BigInt,
    #[serde(with = "crate::bigser")]
    b: BigInt,
    #[serde(with = "crate::bigser")]
    c: BigInt,
    #[serde(with = "crate::bigser")]
    d: BigInt,
    #[serde(with = "crate::bigser")]
    mu: BigInt,
}

impl PicardParams {
    pub fn try_new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
        mu: impl Into<BigInt>,
    ) -> Result<Self, PicardError> {
        let (a, b, c, d, mu) = (a.into(), b.into(), c.into(), d.into(), mu.into());
        for (v, field) in [(&a, "a"), (&b, "b"), (&c, "c"), (&d, "d")] {
            if !v.is_positive() {
                return Err(PicardError::NonPositive { field });
            }
        }
        if !a.gcd(&b).is_one() {
            return Err(PicardError::AbNotCoprime);
        }
        let modulus = BigInt::from(2) * &a * &b * &c * &c;
        let mu = mu.mod_floor(&modulus);
        if !mu.gcd(&modulus).is_one() {
            return Err(PicardError::MuNotUnit);
        }
        let twice = &modulus * 2;
        if !(&mu * &mu - &d).mod_floor(&twice).is_zero() {
            return Err(PicardError::DiscriminantCongruence);
        }
        Ok(PicardParams { a, b, c, d, mu })
    }

    /// Construction from `(r, s, d, μ)` with `c = gcd(r, s)`.
    pub fn from_rank_and_euler(
        r: impl Into<BigInt>,
        s: impl Into<BigInt>,
        d: impl Into<BigInt>,
        mu: impl Into<BigInt>,
    ) -> Result<Self, PicardError> {
        let (r, s) = (r.into(), s.into());
        if !r.is_positive() {
            return Err(PicardError::NonPositive { field: "r" });
        }
        if !s.is_positive() {
            return Err(PicardError::NonPositive { field: "s" });
        }
        let c = r.gcd(&s);
        Self::try_new(&r / &c, &s / &c, c, d, mu)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn mu(&self) -> &BigInt {
        &self.mu
    }

    /// r = a·c
    pub fn r(&self) -> BigInt {
        &self.a * &self.c
    }

    /// s = b·c
    pub fn s(&self) -> BigInt {
        &self.b * &self.c
    }

    /// `2abc²`: both the polarization square and the coordinate modulus.
    pub fn modulus(&self) -> BigInt {
        BigInt::from(2) * &self.a * &self.b * &self.c * &self.c
    }

    /// `μ` and `2abc² − μ` describe isomorphic marked pairs; this picks the
    /// smaller representative for deterministic serialization.
    pub fn mu_normalized(&self) -> PicardParams {
        let m = self.modulus();
        let alt = &m - &self.mu;
        if alt < self.mu {
            PicardParams {
                mu: alt,
                ..self.clone()
            }
        } else {
            self.clone()
        }
    }

    /// The polarization `H = (2abc², 0)`.
    pub fn polarization(&self) -> NVector {
        NVector::new(self.modulus(), BigInt::zero())
    }

    /// The fractional generator `w = (μH + δ)/2abc² = (μ, 1)`.
    pub fn w_generator(&self) -> NVector {
        NVector::new(self.mu.clone(), BigInt::one())
    }

    pub fn check_member(&self, z: &NVector) -> Result<(), PicardError> {
        let m = self.modulus();
        if (&z.x - &self.mu * &z.y).mod_floor(&m).is_zero() {
            Ok(())
        } else {
            Err(PicardError::CongruenceViolation {
                x: z.x.clone(),
                y: z.y.clone(),
            })
        }
    }

    pub fn member(
        &self,
        x: impl Into<BigInt>,
        y: impl Into<BigInt>,
    ) -> Result<NVector, PicardError> {
        let z = NVector::new(x, y);
        self.check_member(&z)?;
        Ok(z)
    }

    /// `z² = (x² − d·y²)/2abc²`; the division is exact on members and the
    /// result is even.
    pub fn norm(&self, z: &NVector) -> Result<BigInt, PicardError> {
        self.check_member(z)?;
        let num = &z.x * &z.x - &self.d * &z.y * &z.y;
        let (q, rem) = num.div_rem(&self.modulus());
        if !rem.is_zero() {
            return Err(PicardError::NonExactDivision);
        }
        Ok(q)
    }

    /// `(x₁x₂ − d·y₁y₂)/2abc²`, the polarization of the form.
    pub fn pair(&self, z1: &NVector, z2: &NVector) -> Result<BigInt, PicardError> {
        self.check_member(z1)?;
        self.check_member(z2)?;
        let num = &z1.x * &z2.x - &self.d * &z1.y * &z2.y;
        let (q, rem) = num.div_rem(&self.modulus());
        if !rem.is_zero() {
            return Err(PicardError::NonExactDivision);
        }
        Ok(q)
    }

    /// Gram matrix in the basis `(H, w)`; its determinant is `−d`.
    pub fn gram(&self) -> GramLattice {
        let m = self.modulus();
        let wsq = (&self.mu * &self.mu - &self.d) / &m;
        let gram = IntMat::from_rows(vec![
            vec![m.clone(), self.mu.clone()],
            vec![self.mu.clone(), wsq],
        ]);
        GramLattice::new(gram).expect("picard gram is symmetric")
    }

    /// Largest `n ≥ 1` with `z/n` still a lattice member; 0 for `z = 0`.
    ///
    /// In the basis `(H, w)` the coordinates of `z = (x, y)` are
    /// `((x − μy)/2abc², y)`, so divisibility inside `N` is their gcd.
    pub fn content(&self, z: &NVector) -> Result<BigInt, PicardError> {
        self.check_member(z)?;
        if z.is_zero() {
            return Ok(BigInt::zero());
        }
        let alpha = (&z.x - &self.mu * &z.y) / self.modulus();
        Ok(alpha.gcd(&z.y))
    }
}

impl fmt::Debug for PicardParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PicardParams(a={}, b={}, c={}, d={}, mu={})",
            self.a, self.b, self.c, self.d, self.mu
        )
    }
}

impl<'de> Deserialize<'de> for PicardParams {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(with = "crate::bigser")]
            a: BigInt,
            #[serde(with = "crate::bigser")]
            b: BigInt,
            #[serde(with = "crate::bigser")]
            c: BigInt,
            #[serde(with = "crate::bigser")]
            d: BigInt,
            #[serde(with = "crate::bigser")]
            mu: BigInt,
        }
        let raw = Raw::deserialize(de)?;
        PicardParams::try_new(raw.a, raw.b, raw.c, raw.d, raw.mu)
            .map_err(|e| serde::de::Error::custom(format!("invalid picard parameters: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> PicardParams {
        PicardParams::try_new(1, 1, 2, 17, 1).unwrap()
    }

    #[test]
    fn validate_worked_example() {
        // 1² ≡ 17 (mod 16)
        assert!(PicardParams::try_new(1, 1, 2, 17, 1).is_ok());
    }

    #[test]
    fn validate_rejections() {
        assert_eq!(
            PicardParams::try_new(1, 1, 2, 17, 2).unwrap_err(),
            PicardError::MuNotUnit
        );
        assert_eq!(
            PicardParams::try_new(1, 1, 2, 3, 1).unwrap_err(),
            PicardError::DiscriminantCongruence
        );
        assert_eq!(
            PicardParams::try_new(2, 4, 1, 1, 1).unwrap_err(),
            PicardError::AbNotCoprime
        );
        assert!(matches!(
            PicardParams::try_new(1, 1, 2, 0, 1),
            Err(PicardError::NonPositive { field: "d" })
        ));
        assert!(matches!(
            PicardParams::try_new(0, 1, 2, 17, 1),
            Err(PicardError::NonPositive { field: "a" })
        ));
    }

    #[test]
    fn from_rank_and_euler_normalizes() {
        let p = PicardParams::from_rank_and_euler(2, 2, 17, 1).unwrap();
        assert_eq!(p, worked());
    }

    #[test]
    fn polarization_square() {
        let p = worked();
        let h = p.polarization();
        assert_eq!(p.norm(&h).unwrap(), p.modulus());
    }

    #[test]
    fn norm_examples() {
        let p = worked();
        let w = p.member(1, 1).unwrap();
        assert_eq!(p.norm(&w).unwrap(), BigInt::from(-2));
        let h1 = p.member(10, 2).unwrap();
        assert_eq!(p.norm(&h1).unwrap(), BigInt::from(4)); // = 2bc
    }

    #[test]
    fn pair_examples() {
        let p = worked();
        let h = p.polarization();
        // pair(H, z) = x for any member z
        for (x, y) in [(1i64, 1i64), (10, 2), (9, 1), (-7, 1)] {
            let z = p.member(x, y).unwrap();
            assert_eq!(p.pair(&h, &z).unwrap(), BigInt::from(x));
        }
        let delta_dir = p.member(BigInt::zero(), p.modulus()).unwrap();
        assert_eq!(p.pair(&h, &delta_dir).unwrap(), BigInt::zero());
        assert_eq!(p.pair(&h, &p.w_generator()).unwrap(), BigInt::one());
    }

    #[test]
    fn membership_rejected() {
        let p = worked();
        assert!(matches!(
            p.member(2, 1),
            Err(PicardError::CongruenceViolation { .. })
        ));
    }

    #[test]
    fn gram_matches_example() {
        let p = worked();
        let g = p.gram();
        assert_eq!(*g.gram(), IntMat::from_i64(&[&[8, 1], &[1, -2]]));
        assert_eq!(g.determinant(), BigInt::from(-17));
        assert!(g.is_even());
    }

    #[test]
    fn content_examples() {
        let p = worked();
        let h = p.polarization();
        assert_eq!(p.content(&h).unwrap(), BigInt::one());
        assert_eq!(p.content(&h.scale(&BigInt::from(3))).unwrap(), BigInt::from(3));
        assert_eq!(p.content(&NVector::zero()).unwrap(), BigInt::zero());
        let h1 = p.member(10, 2).unwrap();
        assert_eq!(p.content(&h1).unwrap(), BigInt::one());
    }

    #[test]
    fn mu_normalization() {
        let p = PicardParams::try_new(1, 1, 2, 17, 7).unwrap(); // 7² = 49 ≡ 17 (mod 16)
        let n = p.mu_normalized();
        assert_eq!(*n.mu(), BigInt::from(1));
        assert_eq!(*worked().mu_normalized().mu(), BigInt::from(1));
    }
}
