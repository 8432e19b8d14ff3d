//! Exact integer linear algebra over lattices with symmetric bilinear forms:
//! inner products, saturated orthogonal complements, quotients by primitive
//! isotropic vectors, and marked isometry search in rank ≤ 2.

mod mat;

pub use mat::{inverse_unimodular, kernel_basis, solve_exact, smith_normal_form, IntMat, SmithForm};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("vector length {got} does not match lattice rank {rank}")]
    DimensionMismatch { rank: usize, got: usize },
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix is not square")]
    NotSquare,
    #[error("zero vector is not allowed here")]
    ZeroVector,
    #[error("vector is not isotropic")]
    NotIsotropic,
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("vector does not lie in the span of the given basis")]
    NotInSpan,
    #[error("vector is not orthogonal to the quotient sublattice")]
    NotOrthogonal,
    #[error("basis does not saturate its span")]
    BasisNotSaturated,
    #[error("isometry search supports rank <= 2, got {0}")]
    RankUnsupported(usize),
    #[error("mark lists must have equal length")]
    MarkCountMismatch,
}

/// Element of a lattice, as integer coordinates in the ambient basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LatVec(pub Vec<BigInt>);

impl LatVec {
    pub fn from_i64(coords: &[i64]) -> Self {
        LatVec(coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        LatVec(vec![BigInt::zero(); rank])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn scale(&self, k: &BigInt) -> LatVec {
        LatVec(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add(&self, other: &LatVec) -> LatVec {
        assert_eq!(self.len(), other.len());
        LatVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatVec) -> LatVec {
        assert_eq!(self.len(), other.len());
        LatVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> LatVec {
        LatVec(self.0.iter().map(|x| -x).collect())
    }

    /// gcd of the coordinates (zero for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::zero(), |acc, x| acc.gcd(x))
    }

    /// Exact coordinatewise division; `None` if some coordinate is not
    /// divisible.
    pub fn div_exact(&self, k: &BigInt) -> Option<LatVec> {
        assert!(!k.is_zero());
        let mut out = Vec::with_capacity(self.len());
        for x in &self.0 {
            let (q, r) = x.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(LatVec(out))
    }
}

impl fmt::Debug for LatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.0
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

/// Lattice presented by a symmetric Gram matrix in a fixed basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GramLattice {
    gram: IntMat,
    even: bool,
}

impl GramLattice {
    pub fn new(gram: IntMat) -> Result<Self, LatticeError> {
        if gram.rows() != gram.cols() {
            return Err(LatticeError::NotSquare);
        }
        if !gram.is_symmetric() {
            return Err(LatticeError::NotSymmetric);
        }
        let even = (0..gram.rows()).all(|i| gram[(i, i)].is_even());
        Ok(GramLattice { gram, even })
    }

    /// Rank-2 lattice with Gram [[0, s], [s, 0]].
    pub fn hyperbolic_plane(off_diag: i64) -> Self {
        GramLattice::new(IntMat::from_i64(&[&[0, off_diag], &[off_diag, 0]]))
            .expect("hyperbolic plane gram is symmetric")
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMat {
        &self.gram
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn determinant(&self) -> BigInt {
        self.gram.determinant()
    }

    fn check_dim(&self, v: &LatVec) -> Result<(), LatticeError> {
        if v.len() != self.rank() {
            return Err(LatticeError::DimensionMismatch {
                rank: self.rank(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Bilinear form: uᵀ · gram · v.
    pub fn inner(&self, u: &LatVec, v: &LatVec) -> Result<BigInt, LatticeError> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        let gv = self.gram.mul_vec(v.coords());
        Ok(u.coords().iter().zip(&gv).map(|(a, b)| a * b).sum())
    }

    pub fn norm(&self, v: &LatVec) -> Result<BigInt, LatticeError> {
        self.inner(v, v)
    }

    /// Integral basis of the saturated sublattice orthogonal to all `gens`.
    ///
    /// The complement is the kernel of the linear map x ↦ (gens·gram)·x, and
    /// kernels are saturated, so the returned basis is primitive.
    pub fn orthogonal_complement(&self, gens: &[LatVec]) -> Result<Vec<LatVec>, LatticeError> {
        for g in gens {
            self.check_dim(g)?;
        }
        let mut rows = Vec::with_capacity(gens.len());
        for g in gens {
            rows.push(self.gram.mul_vec(g.coords()));
        }
        let a = if rows.is_empty() {
            IntMat::zero(0, self.rank())
        } else {
            IntMat::from_rows(rows)
        };
        Ok(kernel_basis(&a).into_iter().map(LatVec).collect())
    }

    /// A nonzero vector is primitive when its coordinate gcd is 1.
    pub fn is_primitive(&self, v: &LatVec) -> Result<bool, LatticeError> {
        self.check_dim(v)?;
        if v.is_zero() {
            return Err(LatticeError::ZeroVector);
        }
        Ok(v.content().is_one())
    }

    /// Quotient of the sublattice spanned by `vperp_basis` by the primitive
    /// isotropic vector `v`. The induced form is well defined because `v`
    /// pairs to zero with the whole sublattice.
    pub fn quotient_by_isotropic(
        &self,
        vperp_basis: &[LatVec],
        v: &LatVec,
    ) -> Result<IsotropicQuotient, LatticeError> {
        self.check_dim(v)?;
        for b in vperp_basis {
            self.check_dim(b)?;
        }
        if !self.norm(v)?.is_zero() {
            return Err(LatticeError::NotIsotropic);
        }
        if !self.is_primitive(v)? {
            return Err(LatticeError::NotPrimitive);
        }
        for b in vperp_basis {
            if !self.inner(v, b)?.is_zero() {
                return Err(LatticeError::NotOrthogonal);
            }
        }

        let k = vperp_basis.len();
        // columns = basis vectors
        let mut bmat = IntMat::zero(self.rank(), k);
        for (j, b) in vperp_basis.iter().enumerate() {
            for i in 0..self.rank() {
                bmat[(i, j)] = b.coords()[i].clone();
            }
        }
        let coeffs = solve_exact(&bmat, v.coords()).ok_or(LatticeError::NotInSpan)?;
        let cvec = LatVec(coeffs.clone());
        if !cvec.content().is_one() {
            return Err(LatticeError::BasisNotSaturated);
        }

        // Unimodular u with u·coeffs = e₁; the inverse columns then form a
        // basis of ℤ^k whose first member is coeffs itself.
        let cmat = IntMat::from_rows(coeffs.iter().map(|c| vec![c.clone()]).collect());
        let snf = smith_normal_form(&cmat);
        let u = snf.u;
        debug_assert!(snf.d[(0, 0)].is_one());
        let w = inverse_unimodular(&u).expect("snf transform is unimodular");

        let mut reps = Vec::with_capacity(k.saturating_sub(1));
        for j in 1..k {
            let col = w.column(j);
            let mut ambient = LatVec::zero(self.rank());
            for (i, b) in vperp_basis.iter().enumerate() {
                ambient = ambient.add(&b.scale(&col[i]));
            }
            reps.push(ambient);
        }

        let mut qgram = IntMat::zero(reps.len(), reps.len());
        for i in 0..reps.len() {
            for j in 0..reps.len() {
                qgram[(i, j)] = self.inner(&reps[i], &reps[j])?;
            }
        }
        let lattice = GramLattice::new(qgram)?;

        // projection: quotient coordinates of x are rows 1..k of u·x
        let mut projection = IntMat::zero(k.saturating_sub(1), k);
        for i in 1..k {
            for j in 0..k {
                projection[(i - 1, j)] = u[(i, j)].clone();
            }
        }

        Ok(IsotropicQuotient {
            ambient: self.clone(),
            lattice,
            basis: vperp_basis.to_vec(),
            projection,
            reps,
        })
    }
}

/// Quotient lattice `v^⊥ / ℤv` together with the coordinate projection.
#[derive(Clone, Debug)]
pub struct IsotropicQuotient {
    ambient: GramLattice,
    /// The quotient with its induced bilinear form.
    pub lattice: GramLattice,
    basis: Vec<LatVec>,
    projection: IntMat,
    /// Ambient representatives of the quotient basis classes.
    pub reps: Vec<LatVec>,
}

impl IsotropicQuotient {
    /// Quotient coordinates of an ambient vector lying in the sublattice.
    pub fn project(&self, x: &LatVec) -> Result<LatVec, LatticeError> {
        if x.len() != self.ambient.rank() {
            return Err(LatticeError::DimensionMismatch {
                rank: self.ambient.rank(),
                got: x.len(),
            });
        }
        let k = self.basis.len();
        let mut bmat = IntMat::zero(self.ambient.rank(), k);
        for (j, b) in self.basis.iter().enumerate() {
            for i in 0..self.ambient.rank() {
                bmat[(i, j)] = b.coords()[i].clone();
            }
        }
        let coeffs = solve_exact(&bmat, x.coords()).ok_or(LatticeError::NotInSpan)?;
        Ok(LatVec(self.projection.mul_vec(&coeffs)))
    }
}

const ISOMETRY_STAGES: [i64; 3] = [16, 256, 10_000];

/// Default coordinate bound for the exhaustive rank-2 isometry search.
pub const DEFAULT_ISOMETRY_BOUND: i64 = 10_000;

/// Searches for a form-preserving unimodular map `l1 → l2` sending each mark
/// to plus or minus its partner (one sign per mark pair). Supports rank ≤ 2;
/// the column convention is φ(x) = M·x.
pub fn find_marked_isometry(
    l1: &GramLattice,
    marks1: &[LatVec],
    l2: &GramLattice,
    marks2: &[LatVec],
) -> Result<Option<IntMat>, LatticeError> {
    find_marked_isometry_bounded(l1, marks1, l2, marks2, DEFAULT_ISOMETRY_BOUND)
}

pub fn find_marked_isometry_bounded(
    l1: &GramLattice,
    marks1: &[LatVec],
    l2: &GramLattice,
    marks2: &[LatVec],
    bound: i64,
) -> Result<Option<IntMat>, LatticeError> {
    if l1.rank() > 2 {
        return Err(LatticeError::RankUnsupported(l1.rank()));
    }
    if l2.rank() > 2 {
        return Err(LatticeError::RankUnsupported(l2.rank()));
    }
    if marks1.len() != marks2.len() {
        return Err(LatticeError::MarkCountMismatch);
    }
    for m in marks1 {
        l1.check_dim(m)?;
    }
    for m in marks2 {
        l2.check_dim(m)?;
    }
    if l1.rank() != l2.rank() {
        return Ok(None);
    }
    if l1.determinant() != l2.determinant() {
        return Ok(None);
    }

    match l1.rank() {
        0 => Ok(Some(IntMat::identity(0))),
        1 => Ok(isometry_rank1(l1, marks1, l2, marks2)),
        2 => isometry_rank2(l1, marks1, l2, marks2, bound),
        _ => unreachable!(),
    }
}

fn marks_match(m: &IntMat, marks1: &[LatVec], marks2: &[LatVec]) -> bool {
    marks1.iter().zip(marks2).all(|(a, b)| {
        let img = LatVec(m.mul_vec(a.coords()));
        img == *b || img == b.neg()
    })
}

fn isometry_rank1(
    l1: &GramLattice,
    marks1: &[LatVec],
    l2: &GramLattice,
    marks2: &[LatVec],
) -> Option<IntMat> {
    let g1 = &l1.gram()[(0, 0)];
    let g2 = &l2.gram()[(0, 0)];
    let candidates: Vec<BigInt> = if g2.is_zero() {
        if !g1.is_zero() {
            return None;
        }
        vec![BigInt::one(), -BigInt::one()]
    } else {
        let (q, r) = g1.div_rem(g2);
        if !r.is_zero() || q.is_negative() {
            return None;
        }
        let k = crate::arith::exact_sqrt(&q)?;
        vec![k.clone(), -k]
    };
    for k in candidates {
        let m = IntMat::from_rows(vec![vec![k.clone()]]);
        if marks_match(&m, marks1, marks2) {
            return Some(m);
        }
    }
    None
}

/// Vectors of a given norm in a rank-2 lattice with |x|, |y| ≤ bound,
/// enumerated deterministically (x ascending, then the two roots in y).
fn norm_vectors(l: &GramLattice, target: &BigInt, bound: i64) -> Vec<LatVec> {
    let g11 = &l.gram()[(0, 0)];
    let g12 = &l.gram()[(0, 1)];
    let g22 = &l.gram()[(1, 1)];
    let big_bound = BigInt::from(bound);
    let mut out = Vec::new();
    let mut push = |x: &BigInt, y: BigInt| {
        if y.abs() <= big_bound {
            out.push(LatVec(vec![x.clone(), y]));
        }
    };
    for xi in -bound..=bound {
        let x = BigInt::from(xi);
        // g11 x² + 2 g12 x y + g22 y² = target, solve for y
        let lin = BigInt::from(2) * g12 * &x;
        let cst = g11 * &x * &x - target;
        if g22.is_zero() {
            if lin.is_zero() {
                if cst.is_zero() {
                    for yi in -bound..=bound {
                        push(&x, BigInt::from(yi));
                    }
                }
                continue;
            }
            let (q, r) = (-&cst).div_rem(&lin);
            if r.is_zero() {
                push(&x, q);
            }
            continue;
        }
        let disc = &lin * &lin - BigInt::from(4) * g22 * &cst;
        if disc.is_negative() {
            continue;
        }
        let Some(sq) = crate::arith::exact_sqrt(&disc) else {
            continue;
        };
        let two_a = BigInt::from(2) * g22;
        let mut roots = Vec::new();
        for s in [sq.clone(), -sq.clone()] {
            let num = -&lin + s;
            let (q, r) = num.div_rem(&two_a);
            if r.is_zero() {
                roots.push(q);
            }
        }
        roots.dedup();
        for y in roots {
            push(&x, y);
        }
    }
    out
}

fn isometry_rank2(
    l1: &GramLattice,
    marks1: &[LatVec],
    l2: &GramLattice,
    marks2: &[LatVec],
    bound: i64,
) -> Result<Option<IntMat>, LatticeError> {
    let g = l1.gram();
    let n11 = g[(0, 0)].clone();
    let n22 = g[(1, 1)].clone();
    let sum_norm = &n11 + BigInt::from(2) * &g[(0, 1)] + &n22;

    // Search basis (s₁, s₂) of l1 with s₁² ≠ 0; columns of t are its coords.
    let t = if !n11.is_zero() {
        IntMat::from_i64(&[&[1, 0], &[0, 1]])
    } else if !n22.is_zero() {
        IntMat::from_i64(&[&[0, 1], &[1, 0]])
    } else if !sum_norm.is_zero() {
        IntMat::from_i64(&[&[1, 0], &[1, 1]])
    } else {
        // Zero form. Any unimodular map preserves it; try a few canonical
        // maps against the marks.
        for cand in [
            IntMat::from_i64(&[&[1, 0], &[0, 1]]),
            IntMat::from_i64(&[&[-1, 0], &[0, -1]]),
            IntMat::from_i64(&[&[0, 1], &[1, 0]]),
            IntMat::from_i64(&[&[0, -1], &[-1, 0]]),
        ] {
            if marks_match(&cand, marks1, marks2) {
                return Ok(Some(cand));
            }
        }
        return Ok(None);
    };
    let t_inv = inverse_unimodular(&t).expect("search basis change is unimodular");
    let gs = t.transpose().mul(g).mul(&t);
    let s1_norm = gs[(0, 0)].clone();
    let s1s2 = gs[(0, 1)].clone();
    let s2_norm = gs[(1, 1)].clone();
    debug_assert!(!s1_norm.is_zero());

    let mut stages: Vec<i64> = ISOMETRY_STAGES
        .iter()
        .copied()
        .filter(|s| *s < bound)
        .collect();
    stages.push(bound);
    let mut seen_below = 0i64;
    for stage in stages {
        for u in norm_vectors(l2, &s1_norm, stage) {
            // skip candidates already covered by a smaller stage
            if u.coords().iter().all(|c| c.abs() <= BigInt::from(seen_below)) {
                continue;
            }
            let u1 = u.coords()[0].clone();
            let u2 = u.coords()[1].clone();
            let g2 = l2.gram();
            let a1 = &g2[(0, 0)] * &u1 + &g2[(0, 1)] * &u2;
            let a2 = &g2[(1, 0)] * &u1 + &g2[(1, 1)] * &u2;
            for det in [BigInt::one(), -BigInt::one()] {
                // a1 w1 + a2 w2 = s1s2 ; -u2 w1 + u1 w2 = det
                let denom = &a1 * &u1 + &a2 * &u2; // = s1_norm ≠ 0
                let w1_num = &s1s2 * &u1 - &a2 * &det;
                let w2_num = &a1 * &det + &s1s2 * &u2;
                let (w1, r1) = w1_num.div_rem(&denom);
                let (w2, r2) = w2_num.div_rem(&denom);
                if !r1.is_zero() || !r2.is_zero() {
                    continue;
                }
                let w = LatVec(vec![w1, w2]);
                if l2.norm(&w).expect("rank checked") != s2_norm {
                    continue;
                }
                // φ(s₁)=u, φ(s₂)=w; express φ on the original basis.
                let ms = IntMat::from_rows(vec![
                    vec![u.coords()[0].clone(), w.coords()[0].clone()],
                    vec![u.coords()[1].clone(), w.coords()[1].clone()],
                ]);
                let m = ms.mul(&t_inv);
                if m.transpose().mul(l2.gram()).mul(&m) != *l1.gram() {
                    continue;
                }
                if !m.determinant().abs().is_one() {
                    continue;
                }
                if marks_match(&m, marks1, marks2) {
                    return Ok(Some(m));
                }
            }
        }
        seen_below = stage;
    }
    Ok(None)
}
