//! Mukai vectors `(r, c₁, s)` over the rank-2 model and the universal moves:
//! reflection, tensor twist, coprime scaling, and the Tyurin target test.
//!
//! Every move is a total function on validated inputs; precondition failures
//! are errors rather than silent coercions, so certificate replay fails
//! loudly.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::gcd3;
use crate::picard::{NVector, PicardError, PicardParams};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MukaiError {
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error("rank component r must be non-negative")]
    NegativeRank,
    #[error("zero Mukai vector")]
    ZeroVector,
    #[error("{mv} requires r ≥ 1 and s ≥ 1, got r={r}, s={s}")]
    RankOutOfRange {
        mv: &'static str,
        r: BigInt,
        s: BigInt,
    },
    #[error("{mv} requires a primitive Mukai vector")]
    NotPrimitive { mv: &'static str },
    #[error("scaling requires an isotropic Mukai vector")]
    NotIsotropic,
    #[error("scaling requires a primitive first Chern class")]
    C1NotPrimitive,
    #[error("scaling requires gcd({left}, {right}) = 1")]
    NotCoprime {
        left: &'static str,
        right: &'static str,
    },
    #[error("scaling factors must be positive")]
    NonPositiveScale,
    #[error("vectors belong to different lattice contexts")]
    ContextMismatch,
    #[error("Tyurin target needs h₁ of nonzero square")]
    TyurinNormZero,
    #[error("Tyurin target needs sign·h₁² > 0")]
    TyurinSignMismatch,
}

/// Sign selector `±1` used by the series conditions and the Tyurin move.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn apply(self, v: &BigInt) -> BigInt {
        match self {
            Sign::Plus => v.clone(),
            Sign::Minus => -v,
        }
    }

    pub fn all() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "+" | "plus" | "1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            other => Err(format!("expected '+' or '-', got {other:?}")),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_i8(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        match i8::deserialize(de)? {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(D::Error::custom(format!("sign must be 1 or -1, got {other}"))),
        }
    }
}

/// Mukai vector `(r, c₁, s)` carrying its lattice context. Operations on
/// vectors from different contexts are rejected.
#[derive(Clone, PartialEq, Eq)]
pub struct MukaiVector {
    params: PicardParams,
    r: BigInt,
    c1: NVector,
    s: BigInt,
}

impl MukaiVector {
    pub fn new(
        params: &PicardParams,
        r: impl Into<BigInt>,
        c1: NVector,
        s: impl Into<BigInt>,
    ) -> Result<Self, MukaiError> {
        let r = r.into();
        if r.is_negative() {
            return Err(MukaiError::NegativeRank);
        }
        params.check_member(&c1)?;
        Ok(MukaiVector {
            params: params.clone(),
            r,
            c1,
            s: s.into(),
        })
    }

    /// The distinguished isotropic vector `(ac, H, bc)` of the context.
    pub fn polarization_vector(params: &PicardParams) -> Self {
        MukaiVector {
            params: params.clone(),
            r: params.r(),
            c1: params.polarization(),
            s: params.s(),
        }
    }

    pub fn params(&self) -> &PicardParams {
        &self.params
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn c1(&self) -> &NVector {
        &self.c1
    }

    pub fn s(&self) -> &BigInt {
        &self.s
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.c1.is_zero() && self.s.is_zero()
    }

    /// Mukai square `c₁² − 2rs`.
    pub fn square(&self) -> BigInt {
        let c1sq = self
            .params
            .norm(&self.c1)
            .expect("c1 validated at construction");
        c1sq - BigInt::from(2) * &self.r * &self.s
    }

    pub fn is_isotropic(&self) -> bool {
        self.square().is_zero()
    }

    /// General common divisor `gcd(r, content(c₁), s)`.
    pub fn gcd_divisor(&self) -> Result<BigInt, MukaiError> {
        if self.is_zero() {
            return Err(MukaiError::ZeroVector);
        }
        let content = self.params.content(&self.c1)?;
        Ok(gcd3(&self.r, &content, &self.s))
    }

    pub fn is_primitive(&self) -> Result<bool, MukaiError> {
        Ok(self.gcd_divisor()?.is_one())
    }

    /// Reflection `(r, c₁, s) ↦ (s, c₁, r)`, defined for primitive vectors
    /// with `r, s ≥ 1`. Involutive; preserves square and divisor.
    pub fn reflect(&self) -> Result<MukaiVector, MukaiError> {
        if !self.r.is_positive() || !self.s.is_positive() {
            return Err(MukaiError::RankOutOfRange {
                mv: "reflection",
                r: self.r.clone(),
                s: self.s.clone(),
            });
        }
        if !self.is_primitive()? {
            return Err(MukaiError::NotPrimitive { mv: "reflection" });
        }
        Ok(MukaiVector {
            params: self.params.clone(),
            r: self.s.clone(),
            c1: self.c1.clone(),
            s: self.r.clone(),
        })
    }

    /// Tensor twist by a divisor class `D`:
    /// `(r, c₁, s) ↦ (r, c₁ + rD, s + r·D²/2 + D·c₁)`.
    /// Preserves the Mukai square and the general common divisor.
    pub fn tensor_twist(&self, divisor: &NVector) -> Result<MukaiVector, MukaiError> {
        self.params.check_member(divisor)?;
        let dsq = self.params.norm(divisor)?;
        debug_assert!(dsq.is_even(), "even lattice yields even squares");
        let half = &dsq / 2;
        let cross = self.params.pair(divisor, &self.c1)?;
        let c1 = self.c1.add(&divisor.scale(&self.r));
        let s = &self.s + &self.r * half + cross;
        Ok(MukaiVector {
            params: self.params.clone(),
            r: self.r.clone(),
            c1,
            s,
        })
    }

    /// Coprime scaling `(r, c₁, s) ↦ (d₁²r, d₁d₂c₁, d₂²s)` for
    /// `gcd(d₁, s) = gcd(d₂, r) = gcd(d₁, d₂) = 1`, on primitive isotropic
    /// vectors with primitive `c₁`. The image is again primitive and
    /// isotropic.
    pub fn scale(&self, d1: &BigInt, d2: &BigInt) -> Result<MukaiVector, MukaiError> {
        if !d1.is_positive() || !d2.is_positive() {
            return Err(MukaiError::NonPositiveScale);
        }
        if !self.r.is_positive() || !self.s.is_positive() {
            return Err(MukaiError::RankOutOfRange {
                mv: "scaling",
                r: self.r.clone(),
                s: self.s.clone(),
            });
        }
        if !d1.gcd(&self.s).is_one() {
            return Err(MukaiError::NotCoprime {
                left: "d1",
                right: "s",
            });
        }
        if !d2.gcd(&self.r).is_one() {
            return Err(MukaiError::NotCoprime {
                left: "d2",
                right: "r",
            });
        }
        if !d1.gcd(d2).is_one() {
            return Err(MukaiError::NotCoprime {
                left: "d1",
                right: "d2",
            });
        }
        if !self.is_isotropic() {
            return Err(MukaiError::NotIsotropic);
        }
        if !self.is_primitive()? {
            return Err(MukaiError::NotPrimitive { mv: "scaling" });
        }
        if !self.params.content(&self.c1)?.is_one() {
            return Err(MukaiError::C1NotPrimitive);
        }
        let out = MukaiVector {
            params: self.params.clone(),
            r: d1 * d1 * &self.r,
            c1: self.c1.scale(&(d1 * d2)),
            s: d2 * d2 * &self.s,
        };
        assert!(out.is_isotropic(), "scaling must preserve isotropy");
        assert!(
            out.is_primitive().expect("nonzero by construction"),
            "scaled vector must stay primitive under the coprimality hypotheses"
        );
        Ok(out)
    }

    /// Whether this vector is exactly the Tyurin target
    /// `(sign·h₁²/2, h₁, sign·1)` for the given class and sign.
    pub fn is_tyurin_target(&self, h1: &NVector, sign: Sign) -> Result<bool, MukaiError> {
        self.params.check_member(h1)?;
        let nh = self.params.norm(h1)?;
        if nh.is_zero() {
            return Err(MukaiError::TyurinNormZero);
        }
        let signed = sign.apply(&nh);
        if !signed.is_positive() {
            return Err(MukaiError::TyurinSignMismatch);
        }
        let expected_r = &signed / 2;
        let expected_s = sign.apply(&BigInt::one());
        Ok(self.r == expected_r && self.c1 == *h1 && self.s == expected_s)
    }
}

impl fmt::Debug for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:?}, {})", self.r, self.c1, self.s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> PicardParams {
        PicardParams::try_new(1, 1, 2, 17, 1).unwrap()
    }

    #[test]
    fn square_of_polarization_vector_is_zero() {
        let p = worked();
        let v = MukaiVector::polarization_vector(&p);
        assert_eq!(v.square(), BigInt::zero());
        let unit = MukaiVector::new(&p, 0, NVector::zero(), 1).unwrap();
        assert_eq!(unit.square(), BigInt::zero());
    }

    #[test]
    fn square_of_worked_target() {
        let p = worked();
        let h1 = p.member(10, 2).unwrap();
        let v = MukaiVector::new(&p, 2, h1, 1).unwrap();
        assert_eq!(v.square(), BigInt::zero()); // 4 − 2·2·1
    }

    #[test]
    fn gcd_divisor_examples() {
        let p = worked();
        let v = MukaiVector::polarization_vector(&p);
        assert_eq!(v.gcd_divisor().unwrap(), BigInt::one());

        let h = p.polarization();
        let doubled =
            MukaiVector::new(&p, 2, h.scale(&BigInt::from(2)), 2).unwrap();
        assert_eq!(doubled.gcd_divisor().unwrap(), BigInt::from(2));

        let h1 = p.member(10, 2).unwrap();
        let t = MukaiVector::new(&p, 2, h1, 1).unwrap();
        assert_eq!(t.gcd_divisor().unwrap(), BigInt::one());

        let zero = MukaiVector::new(&p, 0, NVector::zero(), 0).unwrap();
        assert_eq!(zero.gcd_divisor(), Err(MukaiError::ZeroVector));
    }

    #[test]
    fn reflect_swaps_and_involutes() {
        let p = PicardParams::try_new(2, 3, 1, 25, 5).unwrap(); // 25 ≡ 25 (mod 24·... ) check in ctor
        let v = MukaiVector::polarization_vector(&p);
        let r = v.reflect().unwrap();
        assert_eq!(*r.r(), p.s());
        assert_eq!(*r.s(), p.r());
        assert_eq!(r.c1(), v.c1());
        assert_eq!(r.reflect().unwrap(), v);

        let fixed = MukaiVector::polarization_vector(&worked());
        assert_eq!(fixed.reflect().unwrap(), fixed); // r = s

        let bad = MukaiVector::new(&worked(), 2, worked().polarization(), -1).unwrap();
        assert!(matches!(
            bad.reflect(),
            Err(MukaiError::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn twist_by_zero_is_identity() {
        let p = worked();
        let v = MukaiVector::polarization_vector(&p);
        assert_eq!(v.tensor_twist(&NVector::zero()).unwrap(), v);
    }

    #[test]
    fn twist_worked_example() {
        // (2, H, 2) twisted by w lands on (2, h₁, 1):
        // s' = 2 + 2·(w²/2) + w·H = 2 − 2 + 1, c₁' = H + 2w = (10, 2).
        let p = worked();
        let v = MukaiVector::polarization_vector(&p);
        let w = p.w_generator();
        let out = v.tensor_twist(&w).unwrap();
        assert_eq!(*out.r(), BigInt::from(2));
        assert_eq!(*out.c1(), p.member(10, 2).unwrap());
        assert_eq!(*out.s(), BigInt::one());
        assert_eq!(out.square(), v.square());
        assert_eq!(out.gcd_divisor().unwrap(), v.gcd_divisor().unwrap());
    }

    #[test]
    fn twist_rejects_non_member() {
        let p = worked();
        let v = MukaiVector::polarization_vector(&p);
        assert!(matches!(
            v.tensor_twist(&NVector::new(2, 1)),
            Err(MukaiError::Picard(PicardError::CongruenceViolation { .. }))
        ));
    }

    #[test]
    fn scale_identity_and_growth() {
        // H² = 2 model: a = b = c = 1, d = 1, μ = 1.
        let p = PicardParams::try_new(1, 1, 1, 1, 1).unwrap();
        let v = MukaiVector::polarization_vector(&p); // (1, H, 1)
        assert_eq!(v.scale(&BigInt::one(), &BigInt::one()).unwrap(), v);
        let out = v.scale(&BigInt::from(2), &BigInt::from(3)).unwrap();
        assert_eq!(*out.r(), BigInt::from(4));
        assert_eq!(*out.s(), BigInt::from(9));
        assert_eq!(*out.c1(), p.polarization().scale(&BigInt::from(6)));
        assert!(out.is_isotropic());
        assert!(out.is_primitive().unwrap());
    }

    #[test]
    fn scale_rejects_coprimality_violation() {
        let p = PicardParams::try_new(1, 1, 1, 1, 1).unwrap();
        let v = MukaiVector::polarization_vector(&p); // r = s = 1
        let two = BigInt::from(2);
        assert!(matches!(
            v.scale(&two, &two),
            Err(MukaiError::NotCoprime { left: "d1", right: "d2" })
        ));
        let w = MukaiVector::new(&p, 2, p.polarization(), 1).unwrap();
        assert!(matches!(
            w.scale(&BigInt::one(), &two),
            // (2, H, 1) has square 2−4 ≠ 0
            Err(MukaiError::NotIsotropic) | Err(MukaiError::NotCoprime { .. })
        ));
    }

    #[test]
    fn tyurin_target_shapes() {
        let p = worked();
        let h1 = p.member(10, 2).unwrap(); // h₁² = 4
        let good = MukaiVector::new(&p, 2, h1.clone(), 1).unwrap();
        assert!(good.is_tyurin_target(&h1, Sign::Plus).unwrap());
        let bad = MukaiVector::new(&p, 2, h1.clone(), -1).unwrap();
        assert!(!bad.is_tyurin_target(&h1, Sign::Plus).unwrap());

        let neg = p.member(-6, 2).unwrap(); // norm (36−68)/8 = −4
        assert_eq!(p.norm(&neg).unwrap(), BigInt::from(-4));
        let target = MukaiVector::new(&p, 2, neg.clone(), -1).unwrap();
        assert!(target.is_tyurin_target(&neg, Sign::Minus).unwrap());
        assert!(matches!(
            target.is_tyurin_target(&neg, Sign::Plus),
            Err(MukaiError::TyurinSignMismatch)
        ));
    }

    #[test]
    fn tyurin_rejects_isotropic_class() {
        let p = worked();
        let v = MukaiVector::polarization_vector(&p);
        assert!(matches!(
            v.is_tyurin_target(&p.polarization().scale(&BigInt::zero()), Sign::Plus),
            Err(MukaiError::TyurinNormZero)
        ));
    }
}
