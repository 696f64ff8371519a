use std::cmp::Ordering;

/// Maximum number of variables a packed monomial supports.
pub const MAX_VARS: usize = 8;

/// Exponent vector packed one byte per variable, x₁ in the most significant byte.
///
/// The derived order compares total degree first and then the packed word, which
/// is exactly graded lexicographic order with x₁ > x₂ > … > x_d.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    degree: u16,
    packed: u64,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { degree: 0, packed: 0 };

    fn shift(var: usize) -> u32 {
        debug_assert!(var < MAX_VARS);
        8 * (MAX_VARS - 1 - var) as u32
    }

    pub fn from_exponents(exps: &[u32]) -> Monomial {
        assert!(exps.len() <= MAX_VARS, "at most {MAX_VARS} variables");
        let mut packed = 0u64;
        let mut degree = 0u16;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e < 256, "exponent {e} too large");
            packed |= (e as u64) << Self::shift(i);
            degree += e as u16;
        }
        Monomial { degree, packed }
    }

    pub fn var(i: usize) -> Monomial {
        Monomial { degree: 1, packed: 1u64 << Self::shift(i) }
    }

    pub fn degree(&self) -> u32 {
        self.degree as u32
    }

    pub fn exponent(&self, var: usize) -> u32 {
        ((self.packed >> Self::shift(var)) & 0xff) as u32
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        // byte-wise addition must not carry
        debug_assert!((0..MAX_VARS).all(|i| self.exponent(i) + other.exponent(i) < 256));
        Monomial { degree: self.degree + other.degree, packed: self.packed + other.packed }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        (0..MAX_VARS).all(|i| self.exponent(i) <= other.exponent(i))
    }

    /// `other / self`, assuming `self.divides(other)`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        Monomial { degree: other.degree - self.degree, packed: other.packed - self.packed }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then(self.packed.cmp(&other.packed))
    }
}

impl std::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.exponents(MAX_VARS))
    }
}
