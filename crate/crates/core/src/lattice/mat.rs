//! Dense integer matrices and the Smith normal form kernel.
//!
//! Everything downstream (saturation, quotients, membership, isometry
//! search) reduces to SNF of small matrices, so this is the one place where
//! divisibility logic lives. All entries are arbitrary-precision integers.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Row-major dense matrix over the integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows. Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMat) -> IntMat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = IntMat::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a * &rhs[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)].is_one()
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    /// Determinant by cofactor expansion; fine at the ranks used here (≤ 4).
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return self[(0, 0)].clone();
        }
        if n == 2 {
            return &self[(0, 0)] * &self[(1, 1)] - &self[(0, 1)] * &self[(1, 0)];
        }
        let mut det = BigInt::zero();
        for j in 0..n {
            if self[(0, j)].is_zero() {
                continue;
            }
            let mut minor = IntMat::zero(n - 1, n - 1);
            for i in 1..n {
                let mut jj = 0;
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    minor[(i - 1, jj)] = self[(i, k)].clone();
                    jj += 1;
                }
            }
            let term = &self[(0, j)] * minor.determinant();
            if j % 2 == 0 {
                det += term;
            } else {
                det -= term;
            }
        }
        det
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.rows {
            self.data.swap(k * self.cols + i, k * self.cols + j);
        }
    }

    /// row_i -= q * row_k
    fn row_sub(&mut self, i: usize, k: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = q * &self[(k, j)];
            self[(i, j)] -= t;
        }
    }

    /// col_j -= q * col_k
    fn col_sub(&mut self, j: usize, k: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let t = q * &self[(i, k)];
            self[(i, j)] -= t;
        }
    }

    /// row_dst += row_src
    fn row_add(&mut self, dst: usize, src: usize) {
        for j in 0..self.cols {
            let t = self[(src, j)].clone();
            self[(dst, j)] += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let t = -self[(i, j)].clone();
            self[(i, j)] = t;
        }
    }
}

impl Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            writeln!(
                f,
                "  [{}]",
                self.row(i)
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
        }
        write!(f, "]")
    }
}

/// Result of a Smith normal form computation: `u * m * v = d` with `u`, `v`
/// unimodular and `d` diagonal with each entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
}

impl SmithForm {
    /// Diagonal entries up to min(rows, cols), including zeros.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form over the integers with transform tracking.
///
/// Pivots are chosen as the first entry of minimal absolute value in the
/// working submatrix, which makes the outcome deterministic and guarantees
/// termination (each correction round strictly shrinks the minimum).
pub fn smith_normal_form(m: &IntMat) -> SmithForm {
    let mut a = m.clone();
    let mut u = IntMat::identity(m.rows());
    let mut v = IntMat::identity(m.cols());
    let (rows, cols) = (m.rows(), m.cols());
    let steps = rows.min(cols);

    let mut k = 0;
    while k < steps {
        // First position of minimal nonzero absolute value in [k.., k..].
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if a[(i, j)].is_zero() {
                    continue;
                }
                match pivot {
                    Some((pi, pj)) => {
                        if a[(i, j)].abs() < a[(pi, pj)].abs() {
                            pivot = Some((i, j));
                        }
                    }
                    None => pivot = Some((i, j)),
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            break; // remaining submatrix is zero
        };
        a.swap_rows(k, pi);
        u.swap_rows(k, pi);
        a.swap_cols(k, pj);
        v.swap_cols(k, pj);

        // Clear column k below the pivot, then row k to its right. Truncated
        // division leaves remainders smaller than the pivot, so a non-clean
        // pass strictly reduces the minimum and we just come around again.
        let mut clean = true;
        for i in k + 1..rows {
            if a[(i, k)].is_zero() {
                continue;
            }
            let q = &a[(i, k)] / &a[(k, k)];
            a.row_sub(i, k, &q);
            u.row_sub(i, k, &q);
            if !a[(i, k)].is_zero() {
                clean = false;
            }
        }
        for j in k + 1..cols {
            if a[(k, j)].is_zero() {
                continue;
            }
            let q = &a[(k, j)] / &a[(k, k)];
            a.col_sub(j, k, &q);
            v.col_sub(j, k, &q);
            if !a[(k, j)].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }

        // Divisibility fix-up: drag a non-divisible entry into row k.
        let mut all_divisible = true;
        'scan: for i in k + 1..rows {
            for j in k + 1..cols {
                if !(&a[(i, j)] % &a[(k, k)]).is_zero() {
                    a.row_add(k, i);
                    u.row_add(k, i);
                    all_divisible = false;
                    break 'scan;
                }
            }
        }
        if !all_divisible {
            continue;
        }

        if a[(k, k)].is_negative() {
            a.negate_row(k);
            u.negate_row(k);
        }
        k += 1;
    }

    SmithForm { u, d: a, v }
}

/// Basis of the integer kernel `{x : m·x = 0}`, as column vectors.
/// The kernel of a linear map is saturated, so the basis is primitive.
pub fn kernel_basis(m: &IntMat) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(m);
    let steps = m.rows().min(m.cols());
    let mut basis = Vec::new();
    for j in 0..m.cols() {
        let in_kernel = j >= steps || snf.d[(j, j)].is_zero();
        if in_kernel {
            basis.push(snf.v.column(j));
        }
    }
    basis
}

/// Solves `m·x = rhs` over the integers. Returns `None` when no integral
/// solution exists. Free coordinates are set to zero, making the output
/// deterministic.
pub fn solve_exact(m: &IntMat, rhs: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(m.rows(), rhs.len(), "dimension mismatch in solve");
    let snf = smith_normal_form(m);
    let c = snf.u.mul_vec(rhs);
    let steps = m.rows().min(m.cols());
    let mut y = vec![BigInt::zero(); m.cols()];
    for i in 0..m.rows() {
        if i < steps && !snf.d[(i, i)].is_zero() {
            let (q, r) = num_integer::Integer::div_rem(&c[i], &snf.d[(i, i)]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Inverse of a unimodular integer matrix; `None` when `|det| ≠ 1`.
pub fn inverse_unimodular(m: &IntMat) -> Option<IntMat> {
    if m.rows() != m.cols() {
        return None;
    }
    let snf = smith_normal_form(m);
    if !snf.d.is_identity() {
        return None;
    }
    // u·m·v = 1  =>  m⁻¹ = v·u
    Some(snf.v.mul(&snf.u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn check_snf(m: &IntMat) -> SmithForm {
        let snf = smith_normal_form(m);
        assert_eq!(snf.u.mul(m).mul(&snf.v), snf.d, "u*m*v != d");
        assert!(snf.u.determinant().abs().is_one(), "u not unimodular");
        assert!(snf.v.determinant().abs().is_one(), "v not unimodular");
        let diag = snf.diagonal();
        for i in 0..diag.len() {
            assert!(!diag[i].is_negative(), "negative diagonal entry");
            if i + 1 < diag.len() && !diag[i].is_zero() {
                assert!(
                    diag[i + 1].is_multiple_of(&diag[i]),
                    "divisibility chain broken: {:?}",
                    diag
                );
            }
            if diag[i].is_zero() && i + 1 < diag.len() {
                assert!(diag[i + 1].is_zero(), "zero before nonzero on diagonal");
            }
        }
        // off-diagonal zero
        for i in 0..snf.d.rows() {
            for j in 0..snf.d.cols() {
                if i != j {
                    assert!(snf.d[(i, j)].is_zero());
                }
            }
        }
        snf
    }

    /// Independent oracle: the k-th determinantal divisor (gcd of all k×k
    /// minors) equals d₁·…·d_k.
    fn determinantal_divisor(m: &IntMat, k: usize) -> BigInt {
        fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in 0..n {
                for mut rest in combos(n, k - 1) {
                    if rest.iter().all(|&x| x > first) {
                        let mut v = vec![first];
                        v.append(&mut rest);
                        out.push(v);
                    }
                }
            }
            out
        }
        let mut g = BigInt::zero();
        for rs in combos(m.rows(), k) {
            for cs in combos(m.cols(), k) {
                let mut sub = IntMat::zero(k, k);
                for (i, &r) in rs.iter().enumerate() {
                    for (j, &c) in cs.iter().enumerate() {
                        sub[(i, j)] = m[(r, c)].clone();
                    }
                }
                g = g.gcd(&sub.determinant());
            }
        }
        g
    }

    #[test]
    fn snf_identity() {
        let m = IntMat::identity(3);
        let snf = check_snf(&m);
        assert!(snf.d.is_identity());
    }

    #[test]
    fn snf_diag_2_3() {
        // diag(2,3) has determinantal divisors gcd(2,3) = 1 and |det| = 6,
        // so the invariant factors are (1, 6).
        let m = IntMat::from_i64(&[&[2, 0], &[0, 3]]);
        let snf = check_snf(&m);
        assert_eq!(snf.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(determinantal_divisor(&m, 1), BigInt::from(1));
        assert_eq!(determinantal_divisor(&m, 2), BigInt::from(6));
    }

    #[test]
    fn snf_zero_1x1() {
        let m = IntMat::from_i64(&[&[0]]);
        let snf = check_snf(&m);
        assert_eq!(snf.diagonal(), vec![BigInt::zero()]);
    }

    #[test]
    fn snf_rectangular_and_oracle() {
        let cases: Vec<IntMat> = vec![
            IntMat::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]),
            IntMat::from_i64(&[&[1, 2, 3], &[4, 5, 6]]),
            IntMat::from_i64(&[&[0, 0], &[0, 0]]),
            IntMat::from_i64(&[&[8, 4], &[4, 8], &[0, 12]]),
            IntMat::from_i64(&[&[-7]]),
        ];
        for m in cases {
            let snf = check_snf(&m);
            let diag = snf.diagonal();
            let mut prod = BigInt::one();
            for (k, dk) in diag.iter().enumerate() {
                prod *= dk;
                assert_eq!(
                    determinantal_divisor(&m, k + 1),
                    prod.clone(),
                    "determinantal divisor mismatch at k={} for {:?}",
                    k + 1,
                    m
                );
            }
        }
    }

    #[test]
    fn kernel_of_zero_row() {
        let m = IntMat::from_i64(&[&[0, 0, 0]]);
        let basis = kernel_basis(&m);
        assert_eq!(basis.len(), 3);
    }

    #[test]
    fn kernel_simple() {
        // kernel of [1 1 1] is rank 2; each basis vector must actually solve
        let m = IntMat::from_i64(&[&[1, 1, 1]]);
        let basis = kernel_basis(&m);
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!(m.mul_vec(b).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_exact_cases() {
        let m = IntMat::from_i64(&[&[2, 0], &[0, 3]]);
        let sol = solve_exact(&m, &[BigInt::from(4), BigInt::from(9)]).unwrap();
        assert_eq!(sol, vec![BigInt::from(2), BigInt::from(3)]);
        assert!(solve_exact(&m, &[BigInt::from(1), BigInt::from(0)]).is_none());

        let m = IntMat::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(solve_exact(&m, &[BigInt::from(1), BigInt::from(2)]).is_some());
        assert!(solve_exact(&m, &[BigInt::from(1), BigInt::from(3)]).is_none());
    }

    #[test]
    fn inverse_unimodular_roundtrip() {
        let m = IntMat::from_i64(&[&[3, 2], &[4, 3]]); // det 1
        let inv = inverse_unimodular(&m).unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
        assert!(inverse_unimodular(&IntMat::from_i64(&[&[2, 0], &[0, 1]])).is_none());
    }
}
