//! Exact rational linear algebra.
//!
//! Scalars are [`Rat`] (arbitrary precision, always reduced). Vectors are plain
//! `Vec<Rat>` slices; matrices are the dense row-major [`RatMat`].

mod lp;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use lp::{max_margin_point, MarginSolution};

/// Exact rational scalar.
pub type Rat = BigRational;
/// Exact rational vector.
pub type RatVec = Vec<Rat>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_vec(entries: &[i64]) -> RatVec {
    entries.iter().map(|&e| rat(e)).collect()
}

/// Parses `"p/q"`, `"-p/q"` or a plain integer.
pub fn parse_rat(s: &str) -> Result<Rat, LinalgError> {
    let t = s.trim();
    let bad = || LinalgError::Parse(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => BigInt::from_str(t).map(Rat::from_integer).map_err(|_| bad()),
    }
}

/// Sign as `-1`, `0` or `1`.
pub fn sign(x: &Rat) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // num-rational returns None on overflow of either part; fall back to a ratio of floats
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn norm_sq(a: &[Rat]) -> Rat {
    dot(a, a)
}

pub fn sub(a: &[Rat], b: &[Rat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rat], b: &[Rat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Rat], c: &Rat) -> RatVec {
    a.iter().map(|x| x * c).collect()
}

pub fn neg(a: &[Rat]) -> RatVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Rescales `v` to coprime integer entries with its first nonzero entry positive.
/// The zero vector is returned unchanged.
pub fn primitive(v: &[Rat]) -> RatVec {
    let mut out = primitive_keep_sign(v);
    if out.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in &mut out {
            *x = -&*x;
        }
    }
    out
}

/// Rescales `v` by a positive factor to coprime integer entries.
pub fn primitive_keep_sign(v: &[Rat]) -> RatVec {
    if is_zero_vec(v) {
        return v.to_vec();
    }
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    ints.into_iter().map(|x| Rat::from_integer(x / &g)).collect()
}

/// True when `a = c·b` for some nonzero rational `c` (either sign).
pub fn proportional(a: &[Rat], b: &[Rat]) -> bool {
    primitive(a) == primitive(b)
}

/// Dense row-major rational matrix. Immutable once built.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for RatMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        f.debug_struct("RatMat").field("rows", &rows).finish()
    }
}

impl RatMat {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[RatVec]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(LinalgError::Dimension(format!(
                "ragged rows: expected {cols} columns, found {}",
                r.len()
            )));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, LinalgError> {
        let rows: Vec<RatVec> = rows.iter().map(|r| rat_vec(r)).collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rat::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<RatVec> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, other: &RatMat) -> Result<RatMat, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Rat::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                data.push(acc);
            }
        }
        Ok(RatMat { rows: self.rows, cols: other.cols, data })
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<RatVec, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// Integer matrix obtained by clearing each row's denominators, together with
    /// the product of the row multipliers.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let mut total = BigInt::one();
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let row = self.row(i);
            let mut l = BigInt::one();
            for x in row {
                l = l.lcm(x.denom());
            }
            out.push(row.iter().map(|x| x.numer() * (&l / x.denom())).collect());
            total *= l;
        }
        (out, total)
    }
}

/// Bareiss forward elimination in place, pivoting only in the first `cols`
/// columns. Returns the sign of the row permutation and the rank; `a` ends in
/// fraction-free echelon form.
fn bareiss(a: &mut [Vec<BigInt>], cols: usize) -> (i8, usize) {
    let n = a.len();
    let mut perm_sign = 1i8;
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            perm_sign = -perm_sign;
        }
        for i in r + 1..n {
            for j in c + 1..a[i].len() {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    (perm_sign, r)
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &RatMat) -> Result<Rat, LinalgError> {
    if m.rows != m.cols || m.rows == 0 {
        return Err(LinalgError::Dimension(format!(
            "determinant of a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let (mut a, mult) = m.integer_rows();
    let (s, rank) = bareiss(&mut a, n);
    if rank < n {
        return Ok(Rat::zero());
    }
    let d = &a[n - 1][n - 1] * BigInt::from(s);
    Ok(Rat::new(d, mult))
}

/// Determinant of a square integer matrix given by rows.
pub fn det_integer(mut rows: Vec<Vec<BigInt>>) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let (s, rank) = bareiss(&mut rows, n);
    if rank < n {
        return BigInt::zero();
    }
    &rows[n - 1][n - 1] * BigInt::from(s)
}

/// Unique solution of `m·x = rhs`, or `None` when `m` is singular.
pub fn solve(m: &RatMat, rhs: &[Rat]) -> Result<Option<RatVec>, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::Dimension(format!("solve with a {}x{} matrix", m.rows, m.cols)));
    }
    if rhs.len() != m.rows {
        return Err(LinalgError::Dimension(format!(
            "right-hand side of length {} for {} rows",
            rhs.len(),
            m.rows
        )));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let mut rows = m.to_rows();
    for (r, b) in rows.iter_mut().zip(rhs) {
        r.push(b.clone());
    }
    let aug = RatMat::from_rows(&rows)?;
    let (mut a, _) = aug.integer_rows();
    let (_, rank) = bareiss(&mut a, n);
    if rank < n {
        return Ok(None);
    }
    let mut x = vec![Rat::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rat::from_integer(a[i][n].clone());
        for j in i + 1..n {
            acc -= Rat::from_integer(a[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rat::from_integer(a[i][i].clone());
    }
    Ok(Some(x))
}

/// Reduced row echelon form over the rationals; returns the matrix rows and pivot columns.
pub fn rref(m: &RatMat) -> (Vec<RatVec>, Vec<usize>) {
    let mut a = m.to_rows();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..m.cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &RatMat) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let (mut a, _) = m.integer_rows();
    bareiss(&mut a, m.cols).1
}

/// Basis of the right kernel, each vector primitive (coprime integers, first
/// nonzero entry positive).
pub fn kernel_basis(m: &RatMat) -> Vec<RatVec> {
    let d = m.cols;
    let (a, pivots) = rref(m);
    let mut basis = Vec::new();
    for free in (0..d).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rat::zero(); d];
        v[free] = Rat::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -&a[r][free];
        }
        basis.push(primitive(&v));
    }
    basis
}

/// Wrapper that renders a rational vector as `(a, b, c)`.
pub struct DisplayVec<'a>(pub &'a [Rat]);

impl fmt::Display for DisplayVec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_mat(n: usize) -> impl Strategy<Value = RatMat> {
        proptest::collection::vec((-6i64..7, 1i64..4), n * n).prop_map(move |v| {
            RatMat::new(n, n, v.into_iter().map(|(a, b)| frac(a, b)).collect()).unwrap()
        })
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&RatMat::identity(3)).unwrap(), rat(1));
        let m = RatMat::from_i64(&[&[1, 1, 0], &[1, -1, 0], &[0, 0, 1]]).unwrap();
        assert_eq!(det(&m).unwrap(), rat(-2));
        let m = RatMat::from_i64(&[&[3, 1, 4, 1], &[5, 9, 2, 6], &[3, 1, 4, 1], &[5, 3, 5, 8]]).unwrap();
        assert_eq!(det(&m).unwrap(), rat(0));
        assert!(det(&RatMat::zeros(2, 3)).is_err());
    }

    #[test]
    fn det_needs_pivoting() {
        let m = RatMat::from_i64(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(det(&m).unwrap(), rat(-1));
        let m = RatMat::from_rows(&[vec![frac(1, 2), frac(1, 3)], vec![frac(1, 4), frac(1, 5)]]).unwrap();
        assert_eq!(det(&m).unwrap(), frac(1, 10) - frac(1, 12));
    }

    #[test]
    fn solve_examples() {
        let v = vec![frac(1, 2), rat(-3), rat(7)];
        assert_eq!(solve(&RatMat::identity(3), &v).unwrap(), Some(v.clone()));
        let two = RatMat::new(3, 3, RatMat::identity(3).data.iter().map(|x| x * rat(2)).collect()).unwrap();
        let half: RatVec = v.iter().map(|x| x / rat(2)).collect();
        assert_eq!(solve(&two, &v).unwrap(), Some(half));
        let sing = RatMat::from_i64(&[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(solve(&sing, &rat_vec(&[1, 1])).unwrap(), None);
        assert!(solve(&sing, &rat_vec(&[1])).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&RatMat::zeros(1, 3)).len(), 3);
        let m = RatMat::from_i64(&[&[1, 0, 0], &[0, 1, 0]]).unwrap();
        assert_eq!(kernel_basis(&m), vec![rat_vec(&[0, 0, 1])]);
        assert!(kernel_basis(&RatMat::identity(4)).is_empty());
        let m = RatMat::from_i64(&[&[2, -4, 6]]).unwrap();
        for k in kernel_basis(&m) {
            assert_eq!(dot(m.row(0), &k), rat(0));
            assert_eq!(k, primitive(&k));
        }
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rat("4/3").unwrap(), frac(4, 3));
        assert_eq!(parse_rat(" -6/4 ").unwrap(), frac(-3, 2));
        assert_eq!(parse_rat("12").unwrap(), rat(12));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("0.5").is_err());
        assert!(parse_rat("sqrt(5)").is_err());
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![frac(-2, 3), frac(4, 9), rat(0)];
        assert_eq!(primitive(&v), rat_vec(&[3, -2, 0]));
        assert_eq!(primitive_keep_sign(&v), rat_vec(&[-6, 4, 0]).iter().map(|x| x / rat(2)).collect::<Vec<_>>());
    }

    proptest! {
        #[test]
        fn det_alternates_under_row_swap(m in small_mat(4), i in 0usize..4, j in 0usize..4) {
            prop_assume!(i != j);
            let mut rows = m.to_rows();
            rows.swap(i, j);
            let swapped = RatMat::from_rows(&rows).unwrap();
            prop_assert_eq!(det(&swapped).unwrap(), -det(&m).unwrap());
        }

        #[test]
        fn det_is_multiplicative_3(a in small_mat(3), b in small_mat(3)) {
            let ab = a.mul(&b).unwrap();
            prop_assert_eq!(det(&ab).unwrap(), det(&a).unwrap() * det(&b).unwrap());
        }

        #[test]
        fn det_is_multiplicative_4(a in small_mat(4), b in small_mat(4)) {
            let ab = a.mul(&b).unwrap();
            prop_assert_eq!(det(&ab).unwrap(), det(&a).unwrap() * det(&b).unwrap());
        }

        #[test]
        fn solve_satisfies_system(m in small_mat(3), rhs in proptest::collection::vec(-9i64..10, 3)) {
            let rhs = rat_vec(&rhs);
            match solve(&m, &rhs).unwrap() {
                Some(x) => prop_assert_eq!(m.mul_vec(&x).unwrap(), rhs),
                None => prop_assert_eq!(det(&m).unwrap(), rat(0)),
            }
        }

        #[test]
        fn det_is_deterministic(m in small_mat(4)) {
            prop_assert_eq!(det(&m).unwrap(), det(&m.clone()).unwrap());
        }
    }
}
