//! Exact dense linear algebra over the integers and rationals.
//!
//! Everything here is exact: determinants use the Bareiss fraction-free
//! algorithm, inverses are computed by rational Gauss-Jordan elimination,
//! and the Smith normal form keeps full unimodular transforms so finite
//! quotients of free abelian groups can be presented with explicit
//! generators and coordinate maps.

use crate::error::{FusionError, Result};
use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;

/// Arbitrary precision integer used throughout the crate.
pub type Int = BigInt;
/// Arbitrary precision rational used throughout the crate.
pub type Rat = BigRational;

/// Shorthand constructor for an [`Int`].
pub fn int(n: i64) -> Int {
    Int::from(n)
}

/// Shorthand constructor for a [`Rat`] from numerator and denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(int(num), int(den))
}

/// Shorthand constructor for an integral [`Rat`].
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(int(n))
}

/// Fractional part of a rational, normalized into `[0, 1)`.
pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct IMat {
    rows: usize,
    cols: usize,
    a: Vec<Int>,
}

impl IMat {
    /// Zero matrix of the given shape.
    pub fn zero(rows: usize, cols: usize) -> IMat {
        IMat {
            rows,
            cols,
            a: vec![Int::zero(); rows * cols],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> IMat {
        let mut m = IMat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Int::one();
        }
        m
    }

    /// Builds a matrix from machine-integer rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> IMat {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = IMat::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                *m.at_mut(i, j) = int(*v);
            }
        }
        m
    }

    /// Builds a matrix from big-integer rows. Panics on ragged input.
    pub fn from_int_rows(rows: Vec<Vec<Int>>) -> IMat {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = IMat::zero(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                *m.at_mut(i, j) = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Int {
        &self.a[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Int {
        &mut self.a[i * self.cols + j]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Returns the first asymmetric index pair, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.at(i, j) != self.at(j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn transpose(&self) -> IMat {
        let mut m = IMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut m = IMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.at(i, k).is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = self.at(i, k) * other.at(k, j);
                    *m.at_mut(i, j) += add;
                }
            }
        }
        m
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    /// Matrix applied to a rational vector.
    pub fn mul_rat_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| Rat::from_integer(self.at(i, j).clone()) * &v[j])
                    .sum()
            })
            .collect()
    }

    pub fn to_qmat(&self) -> QMat {
        let mut m = QMat::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(i, j) = Rat::from_integer(self.at(i, j).clone());
            }
        }
        m
    }

    /// Exact determinant by the Bareiss fraction-free algorithm.
    pub fn det(&self) -> Int {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m: Vec<Vec<Int>> = (0..n)
            .map(|i| (0..n).map(|j| self.at(i, j).clone()).collect())
            .collect();
        let mut sign = 1i64;
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = num / &prev;
                }
                m[i][k] = Int::zero();
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    /// Determinant of the leading principal `k x k` submatrix.
    pub fn leading_minor(&self, k: usize) -> Int {
        assert!(k <= self.rows && k <= self.cols);
        let mut sub = IMat::zero(k, k);
        for i in 0..k {
            for j in 0..k {
                *sub.at_mut(i, j) = self.at(i, j).clone();
            }
        }
        sub.det()
    }

    /// Inverse of a unimodular integer matrix (determinant +-1).
    /// Panics if the matrix is not unimodular.
    pub fn unimodular_inverse(&self) -> IMat {
        let inv = self
            .to_qmat()
            .inverse()
            .expect("unimodular matrix must be invertible");
        inv.to_imat()
            .expect("inverse of a unimodular matrix must be integral")
    }
}

impl fmt::Debug for IMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Dense rational matrix in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    a: Vec<Rat>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> QMat {
        QMat {
            rows,
            cols,
            a: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> QMat {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: &[Rat]) -> QMat {
        let mut m = QMat::zero(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            *m.at_mut(i, i) = e.clone();
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Rat>]) -> QMat {
        let c = cols.len();
        let r = if c == 0 { 0 } else { cols[0].len() };
        let mut m = QMat::zero(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, v) in col.iter().enumerate() {
                *m.at_mut(i, j) = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.a[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.a[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> QMat {
        let mut m = QMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut m = QMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.at(i, k).is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = self.at(i, k) * other.at(k, j);
                    *m.at_mut(i, j) += add;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|x| x.is_integer())
    }

    pub fn to_imat(&self) -> Option<IMat> {
        if !self.is_integral() {
            return None;
        }
        let mut m = IMat::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(i, j) = self.at(i, j).to_integer();
            }
        }
        Some(m)
    }

    /// Exact inverse by Gauss-Jordan elimination; `None` if singular.
    pub fn inverse(&self) -> Option<QMat> {
        assert!(self.rows == self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = QMat::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m.at(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    let tmp = m.at(pivot, j).clone();
                    *m.at_mut(pivot, j) = m.at(col, j).clone();
                    *m.at_mut(col, j) = tmp;
                    let tmp = inv.at(pivot, j).clone();
                    *inv.at_mut(pivot, j) = inv.at(col, j).clone();
                    *inv.at_mut(col, j) = tmp;
                }
            }
            let p = m.at(col, col).clone();
            for j in 0..n {
                *m.at_mut(col, j) /= &p;
                *inv.at_mut(col, j) /= &p;
            }
            for r in 0..n {
                if r == col || m.at(r, col).is_zero() {
                    continue;
                }
                let f = m.at(r, col).clone();
                for j in 0..n {
                    let sub = &f * m.at(col, j);
                    *m.at_mut(r, j) -= sub;
                    let sub = &f * inv.at(col, j);
                    *inv.at_mut(r, j) -= sub;
                }
            }
        }
        Some(inv)
    }
}

impl fmt::Debug for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Smith normal form `U * A * V = S` with unimodular `U`, `V` and `S`
/// diagonal with non-negative entries, each dividing the next.
pub struct Smith {
    pub u: IMat,
    pub s: IMat,
    pub v: IMat,
}

/// Computes the Smith normal form of an arbitrary integer matrix,
/// together with the unimodular row and column transforms.
pub fn smith(a: &IMat) -> Smith {
    let rows = a.rows();
    let cols = a.cols();
    let mut s: Vec<Vec<Int>> = (0..rows)
        .map(|i| (0..cols).map(|j| a.at(i, j).clone()).collect())
        .collect();
    let mut u = IMat::identity(rows);
    let mut v = IMat::identity(cols);

    let swap_rows = |s: &mut Vec<Vec<Int>>, u: &mut IMat, r1: usize, r2: usize| {
        s.swap(r1, r2);
        for j in 0..u.cols() {
            let tmp = u.at(r1, j).clone();
            *u.at_mut(r1, j) = u.at(r2, j).clone();
            *u.at_mut(r2, j) = tmp;
        }
    };
    let swap_cols = |s: &mut Vec<Vec<Int>>, v: &mut IMat, c1: usize, c2: usize| {
        for row in s.iter_mut() {
            row.swap(c1, c2);
        }
        for i in 0..v.rows() {
            let tmp = v.at(i, c1).clone();
            *v.at_mut(i, c1) = v.at(i, c2).clone();
            *v.at_mut(i, c2) = tmp;
        }
    };
    // row_i -= q * row_t, mirrored on U
    let add_row = |s: &mut Vec<Vec<Int>>, u: &mut IMat, i: usize, t: usize, q: &Int| {
        for j in 0..s[0].len() {
            let sub = q * &s[t][j];
            s[i][j] -= sub;
        }
        for j in 0..u.cols() {
            let sub = q * u.at(t, j);
            *u.at_mut(i, j) -= sub;
        }
    };
    // col_j -= q * col_t, mirrored on V
    let add_col = |s: &mut Vec<Vec<Int>>, v: &mut IMat, j: usize, t: usize, q: &Int| {
        for row in s.iter_mut() {
            let sub = q * &row[t];
            row[j] -= sub;
        }
        for i in 0..v.rows() {
            let sub = q * v.at(i, t);
            *v.at_mut(i, j) -= sub;
        }
    };

    let n = rows.min(cols);
    for t in 0..n {
        'outer: loop {
            // Pick the nonzero entry of smallest absolute value in the
            // trailing block as pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if s[i][j].is_zero() {
                        continue;
                    }
                    best = match best {
                        None => Some((i, j)),
                        Some((bi, bj)) => {
                            if s[i][j].abs() < s[bi][bj].abs() {
                                Some((i, j))
                            } else {
                                Some((bi, bj))
                            }
                        }
                    };
                }
            }
            let (pi, pj) = match best {
                Some(p) => p,
                None => break 'outer, // trailing block is zero
            };
            if pi != t {
                swap_rows(&mut s, &mut u, t, pi);
            }
            if pj != t {
                swap_cols(&mut s, &mut v, t, pj);
            }

            let mut clean = true;
            for i in t + 1..rows {
                if !s[i][t].is_zero() {
                    let q = &s[i][t] / &s[t][t];
                    add_row(&mut s, &mut u, i, t, &q);
                    if !s[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !s[t][j].is_zero() {
                    let q = &s[t][j] / &s[t][t];
                    add_col(&mut s, &mut v, j, t, &q);
                    if !s[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue; // remainders left; repeat with a smaller pivot
            }
            // Enforce the divisibility chain: if some trailing entry is not
            // divisible by the pivot, fold its row in and restart.
            let mut fixed = true;
            'divcheck: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&s[i][j] % &s[t][t]).is_zero() {
                        // Fold row i into row t and repeat the elimination.
                        for jj in 0..cols {
                            let add = s[i][jj].clone();
                            s[t][jj] += add;
                        }
                        for jj in 0..u.cols() {
                            let add = u.at(i, jj).clone();
                            *u.at_mut(t, jj) += add;
                        }
                        fixed = false;
                        break 'divcheck;
                    }
                }
            }
            if !fixed {
                continue;
            }
            if s[t][t].is_negative() {
                for j in 0..cols {
                    s[t][j] = -s[t][j].clone();
                }
                for j in 0..u.cols() {
                    let neg = -u.at(t, j).clone();
                    *u.at_mut(t, j) = neg;
                }
            }
            break;
        }
    }

    Smith {
        u,
        s: IMat::from_int_rows(s),
        v,
    }
}

/// Kernel of `x -> A x (mod 2)` on `F_2^cols`, returned as 0/1 basis
/// vectors lifted to the integers.
pub fn kernel_mod2(a: &IMat) -> Vec<Vec<Int>> {
    let rows = a.rows();
    let cols = a.cols();
    let mut m: Vec<Vec<u8>> = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let r: Int = a.at(i, j) % 2u8;
                    if r.is_zero() {
                        0
                    } else {
                        1
                    }
                })
                .collect()
        })
        .collect();

    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0usize;
    for col in 0..cols {
        let pivot = (rank..rows).find(|&r| m[r][col] == 1);
        if let Some(p) = pivot {
            m.swap(rank, p);
            for r in 0..rows {
                if r != rank && m[r][col] == 1 {
                    for j in 0..cols {
                        m[r][j] ^= m[rank][j];
                    }
                }
            }
            pivot_of_col[col] = Some(rank);
            rank += 1;
        }
    }

    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut vec = vec![Int::zero(); cols];
        vec[free] = Int::one();
        for col in 0..cols {
            if let Some(p) = pivot_of_col[col] {
                if m[p][free] == 1 {
                    vec[col] = Int::one();
                }
            }
        }
        basis.push(vec);
    }
    basis
}

/// Presentation of the finite quotient `A / B` of two full-rank lattices
/// `B <= A` in `Q^d`, given by basis matrices whose columns are the basis
/// vectors. Produces adapted generators with cyclic orders given by the
/// elementary divisors, plus an exact coordinate map.
pub struct Quotient {
    /// One divisor per adapted generator of `A` (may include 1s).
    all_divisors: Vec<Int>,
    /// Adapted generators in ambient coordinates (columns of `M_A U^{-1}`).
    all_gens: Vec<Vec<Rat>>,
    /// Row transform from the Smith form, applied to `A`-coordinates.
    u: IMat,
    /// Inverse of the basis matrix of `A`, for membership and coordinates.
    m_a_inv: QMat,
}

impl Quotient {
    /// Requires `M_B = M_A C` with `C` integral and nonsingular.
    pub fn new(m_a: &QMat, m_b: &QMat) -> Result<Quotient> {
        if m_a.rows() != m_a.cols() {
            return Err(FusionError::NotSquare {
                rows: m_a.rows(),
                cols: m_a.cols(),
            });
        }
        if m_b.rows() != m_a.rows() || m_b.cols() != m_b.rows() {
            return Err(FusionError::NotSquare {
                rows: m_b.rows(),
                cols: m_b.cols(),
            });
        }
        let m_a_inv = m_a
            .inverse()
            .ok_or_else(|| FusionError::PreconditionFailed("ambient basis matrix is singular".into()))?;
        let c = m_a_inv.mul(m_b);
        let c = c.to_imat().ok_or_else(|| {
            FusionError::PreconditionFailed("subgroup is not contained in the ambient lattice".into())
        })?;
        if c.det().is_zero() {
            return Err(FusionError::PreconditionFailed(
                "subgroup does not have full rank".into(),
            ));
        }
        let sm = smith(&c);
        let u_inv = sm.u.unimodular_inverse();
        let gen_mat = m_a.mul(&u_inv.to_qmat());
        let d = m_a.rows();
        let all_gens: Vec<Vec<Rat>> = (0..d).map(|j| gen_mat.column(j)).collect();
        let all_divisors: Vec<Int> = (0..d).map(|i| sm.s.at(i, i).clone()).collect();
        Ok(Quotient {
            all_divisors,
            all_gens,
            u: sm.u,
            m_a_inv,
        })
    }

    /// Order of the quotient group.
    pub fn order(&self) -> Int {
        self.all_divisors.iter().product()
    }

    /// Elementary divisors greater than 1, in the Smith chain order.
    pub fn divisors(&self) -> Vec<Int> {
        self.all_divisors
            .iter()
            .filter(|d| **d > Int::one())
            .cloned()
            .collect()
    }

    /// Ambient representatives of the generators with divisor greater
    /// than 1, aligned with [`Quotient::divisors`].
    pub fn generators(&self) -> Vec<Vec<Rat>> {
        self.all_divisors
            .iter()
            .zip(&self.all_gens)
            .filter(|(d, _)| **d > Int::one())
            .map(|(_, g)| g.clone())
            .collect()
    }

    /// Coordinates of `x` modulo `B` along the non-trivial adapted
    /// generators (entry `i` reduced mod the matching divisor), or `None`
    /// if `x` does not lie in the ambient lattice `A`.
    pub fn coords(&self, x: &[Rat]) -> Option<Vec<Int>> {
        let y = self.m_a_inv.mul_vec(x);
        if !y.iter().all(|c| c.is_integer()) {
            return None;
        }
        let y: Vec<Int> = y.iter().map(|c| c.to_integer()).collect();
        let n = self.u.mul_vec(&y);
        Some(
            self.all_divisors
                .iter()
                .zip(&n)
                .filter(|(d, _)| **d > Int::one())
                .map(|(d, c)| {
                    let r = c % d;
                    if r.is_negative() {
                        r + d
                    } else {
                        r
                    }
                })
                .collect(),
        )
    }
}
