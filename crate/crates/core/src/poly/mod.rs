//! Sparse multivariate polynomials and rational functions over ℚ.
//!
//! Terms are kept in graded lexicographic order (x₁ > … > x_d); the leading
//! term is the largest monomial. Zero coefficients are never stored.

mod monomial;
mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{Rat, RatVec};

pub use monomial::{Monomial, MAX_VARS};
pub use text::{parse_poly, variable_names};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::render(self))
    }
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Poly {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::ONE, c);
        }
        p
    }

    pub fn one(nvars: usize) -> Poly {
        Poly::constant(nvars, Rat::one())
    }

    pub fn var(nvars: usize, i: usize) -> Poly {
        assert!(i < nvars);
        let mut p = Poly::zero(nvars);
        p.terms.insert(Monomial::var(i), Rat::one());
        p
    }

    /// The homogeneous linear form Σ cᵢ xᵢ.
    pub fn linear(coeffs: &[Rat]) -> Poly {
        let mut p = Poly::zero(coeffs.len());
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                p.terms.insert(Monomial::var(i), c.clone());
            }
        }
        p
    }

    /// ‖x‖² = x₁² + … + x_d².
    pub fn norm_sq(nvars: usize) -> Poly {
        let mut p = Poly::zero(nvars);
        for i in 0..nvars {
            let m = Monomial::var(i);
            p.terms.insert(m.mul(&m), Rat::one());
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rat)>) -> Poly {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(Monomial::from_exponents(&e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms from the leading one downwards.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rat {
        self.terms.get(&Monomial::from_exponents(exps)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// The common total degree of all terms, when there is one.
    pub fn is_homogeneous(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(Monomial::degree);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars, "polynomials over different variable counts");
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, x)| (k.mul(m), x * c)).collect(),
        }
    }

    pub fn add_assign_ref(&mut self, other: &Poly) {
        self.check_vars(other);
        for (m, c) in &other.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn sub_assign_ref(&mut self, other: &Poly) {
        self.check_vars(other);
        for (m, c) in &other.terms {
            self.add_term(*m, -c);
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact value at a rational point.
    pub fn evaluate(&self, x: &[Rat]) -> Result<Rat, PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::Dimension(format!(
                "point of length {} for {} variables",
                x.len(),
                self.nvars
            )));
        }
        let maxdeg = self.degree().unwrap_or(0) as usize;
        let powers: Vec<Vec<Rat>> = x
            .iter()
            .map(|xi| {
                let mut v = Vec::with_capacity(maxdeg + 1);
                v.push(Rat::one());
                for k in 1..=maxdeg {
                    let next = &v[k - 1] * xi;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, pw) in powers.iter().enumerate() {
                let e = m.exponent(i) as usize;
                if e > 0 {
                    t *= &pw[e];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn evaluate_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = crate::linalg::to_f64(c);
                for (i, xi) in x.iter().enumerate() {
                    t *= xi.powi(m.exponent(i) as i32);
                }
                t
            })
            .sum()
    }

    /// The polynomial p(y) with y_{perm[i]} = signs[i]·x_i.
    pub fn signed_permutation(&self, perm: &[usize], signs: &[i8]) -> Poly {
        assert!(perm.len() == self.nvars && signs.len() == self.nvars);
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; self.nvars];
            let mut c = c.clone();
            for (i, (&j, &s)) in perm.iter().zip(signs).enumerate() {
                let e = m.exponent(j);
                exps[i] = e;
                if s < 0 && e % 2 == 1 {
                    c = -c;
                }
            }
            out.add_term(Monomial::from_exponents(&exps), c);
        }
        out
    }

    /// True when some signed coordinate permutation maps `self` to a nonzero
    /// scalar multiple of `other`.
    pub fn equal_up_to_signed_permutation(&self, other: &Poly) -> bool {
        use itertools::Itertools;
        let n = self.nvars;
        if n != other.nvars || self.num_terms() != other.num_terms() {
            return false;
        }
        let target = other.normalized();
        (0..n).permutations(n).any(|perm| {
            (0..1u32 << n).any(|mask| {
                let signs: Vec<i8> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
                self.signed_permutation(&perm, &signs).normalized() == target
            })
        })
    }

    /// The polynomial p(-x).
    pub fn negate_variables(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, if m.degree() % 2 == 1 { -c } else { c.clone() }))
                .collect(),
        }
    }

    /// Quotient `g` with `self = f·g`, or `None` when `f` does not divide `self`.
    ///
    /// Multivariate division by a single divisor under graded lex order; the
    /// remainder is unique, so the first term that cannot be reduced proves
    /// non-divisibility.
    pub fn exact_divide(&self, f: &Poly) -> Result<Option<Poly>, PolyError> {
        self.check_vars(f);
        let Some((lm, lc)) = f.leading_term() else {
            return Err(PolyError::Precondition("division by the zero polynomial".into()));
        };
        let (lm, lc) = (*lm, lc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading_term() {
            if !lm.divides(rm) {
                return Ok(None);
            }
            let m = lm.quotient_of(rm);
            let c = rc / &lc;
            for (fm, fc) in &f.terms {
                rem.add_term(fm.mul(&m), -(fc * &c));
            }
            quot.add_term(m, c);
        }
        Ok(Some(quot))
    }

    /// `c·self` with coprime integer coefficients and a positive leading
    /// coefficient, together with the scale `c`.
    pub fn normalize(&self) -> Result<(Poly, Rat), PolyError> {
        if self.is_zero() {
            return Err(PolyError::Precondition("normalizing the zero polynomial".into()));
        }
        let mut c = content_inverse(self.terms.values());
        if self.leading_term().expect("nonzero").1 * &c < Rat::zero() {
            c = -c;
        }
        Ok((self.scale(&c), c))
    }

    pub fn normalized(&self) -> Poly {
        self.normalize().map(|(p, _)| p).unwrap_or_else(|_| self.clone())
    }
}

/// The positive rational `c` making every coefficient integral and globally coprime.
pub(crate) fn content_inverse<'a>(coeffs: impl Iterator<Item = &'a Rat>) -> Rat {
    let mut l = BigInt::one();
    let mut g = BigInt::zero();
    let coeffs: Vec<&Rat> = coeffs.collect();
    for c in &coeffs {
        l = l.lcm(c.denom());
    }
    for c in &coeffs {
        g = g.gcd(&(c.numer() * (&l / c.denom())));
    }
    if g.is_zero() {
        return Rat::one();
    }
    Rat::new(l, g.abs())
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self.add_assign_ref(&rhs);
        self
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self.sub_assign_ref(&rhs);
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_vars(rhs);
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

/// A homogeneous linear form ⟨c, x⟩.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinForm(pub RatVec);

impl LinForm {
    pub fn to_poly(&self) -> Poly {
        Poly::linear(&self.0)
    }

    pub fn evaluate(&self, x: &[Rat]) -> Rat {
        crate::linalg::dot(&self.0, x)
    }

    pub fn is_zero(&self) -> bool {
        crate::linalg::is_zero_vec(&self.0)
    }

    /// Primitive representative, so forms equal up to nonzero scalar compare equal.
    pub fn canonical(&self) -> LinForm {
        LinForm(crate::linalg::primitive(&self.0))
    }
}

/// Quotient of two polynomials with nonzero denominator.
#[derive(Clone, Debug)]
pub struct RatFun {
    pub num: Poly,
    pub den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<RatFun, PolyError> {
        if den.is_zero() {
            return Err(PolyError::Precondition("zero denominator".into()));
        }
        Ok(RatFun { num, den }.reduced())
    }

    /// Cancels the denominator when it divides the numerator and rescales so the
    /// denominator is normalized.
    fn reduced(self) -> RatFun {
        if let Ok(Some(q)) = self.num.exact_divide(&self.den) {
            return RatFun { den: Poly::one(q.nvars()), num: q };
        }
        let (den, c) = self.den.normalize().expect("nonzero denominator");
        RatFun { num: self.num.scale(&c), den }
    }

    pub fn evaluate(&self, x: &[Rat]) -> Result<Option<Rat>, PolyError> {
        let d = self.den.evaluate(x)?;
        if d.is_zero() {
            return Ok(None);
        }
        Ok(Some(self.num.evaluate(x)? / d))
    }

    pub fn is_constant(&self) -> Option<Rat> {
        if self.den.degree() == Some(0) && self.num.degree().unwrap_or(0) == 0 {
            let d = self.den.coefficient(&vec![0; self.den.nvars()]);
            let n = self.num.coefficient(&vec![0; self.num.nvars()]);
            return Some(n / d);
        }
        None
    }
}

impl PartialEq for RatFun {
    fn eq(&self, other: &RatFun) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

/// Determinant of a square matrix of polynomials by Laplace expansion with the
/// minors memoized on column subsets.
pub fn poly_det(m: &[Vec<Poly>]) -> Result<Poly, PolyError> {
    let n = m.len();
    if n == 0 {
        return Err(PolyError::Dimension("empty matrix".into()));
    }
    if let Some(r) = m.iter().find(|r| r.len() != n) {
        return Err(PolyError::Dimension(format!("row of length {} in {n}x{n} matrix", r.len())));
    }
    if n > 20 {
        return Err(PolyError::Dimension(format!("{n}x{n} is too large for subset expansion")));
    }
    let nvars = m[0][0].nvars();
    if m.iter().flatten().any(|p| p.nvars() != nvars) {
        return Err(PolyError::Dimension("entries over different variable counts".into()));
    }
    // minors[mask] = det(rows 0..|mask|, columns in mask)
    let mut minors: Vec<Option<Poly>> = vec![None; 1 << n];
    minors[0] = Some(Poly::one(nvars));
    let mut masks: Vec<usize> = (1..1usize << n).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        let k = mask.count_ones() as usize;
        let row = &m[k - 1];
        let mut acc = Poly::zero(nvars);
        for j in 0..n {
            if mask & (1 << j) == 0 || row[j].is_zero() {
                continue;
            }
            let sub = minors[mask & !(1 << j)].as_ref().expect("smaller minors first");
            if sub.is_zero() {
                continue;
            }
            let above = (mask >> (j + 1)).count_ones();
            let t = &row[j] * sub;
            if above % 2 == 0 {
                acc.add_assign_ref(&t);
            } else {
                acc.sub_assign_ref(&t);
            }
        }
        minors[mask] = Some(acc);
    }
    Ok(minors[(1 << n) - 1].take().expect("full minor"))
}
