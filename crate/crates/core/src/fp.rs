//! Arithmetic in the prime field F_p.
//!
//! Residues are stored as canonical `u64` values in `[0, p)`. [`FpScalar`] and
//! [`FpVector`] carry their [`PrimeModulus`] so that mixing moduli is caught at
//! the API boundary; the hot loops in the regression code work on raw slices
//! through the modulus helpers instead.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A prime `p`, validated at construction.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeModulus {
    p: u64,
    // Number of products (p-1)^2 that can be summed in a u64 without overflow.
    lazy_terms: u64,
}

impl fmt::Debug for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimeModulus({})", self.p)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.p)
    }
}

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let max_product = (p as u128 - 1) * (p as u128 - 1);
        let lazy_terms = (u64::MAX as u128 / max_product).min(u64::MAX as u128) as u64;
        Ok(Self { p, lazy_terms })
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(self, a: u64) -> u64 {
        a % self.p
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    pub fn reduce_i64(self, a: i64) -> u64 {
        (a as i128).rem_euclid(self.p as i128) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let (s, overflow) = a.overflowing_add(b);
        if overflow || s >= self.p {
            s.wrapping_sub(self.p)
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a.wrapping_sub(b).wrapping_add(self.p)
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        if self.p <= u32::MAX as u64 {
            (a * b) % self.p
        } else {
            ((a as u128 * b as u128) % self.p as u128) as u64
        }
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u64) -> Result<u64> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroInversion);
        }
        let (mut old_r, mut r) = (a as i128, self.p as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(old_s.rem_euclid(self.p as i128) as u64)
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `sum_d c[d] * x[d] + c[D]` on raw residues, with `c.len() == x.len() + 1`.
    #[inline]
    pub fn affine_raw(self, c: &[u64], x: &[u64]) -> u64 {
        debug_assert_eq!(c.len(), x.len() + 1);
        let (linear, constant) = c.split_at(x.len());
        self.add(self.dot_raw(linear, x), constant[0])
    }

    /// Dot product on raw residues. Products are accumulated lazily while the
    /// running sum provably fits in a `u64`.
    #[inline]
    pub fn dot_raw(self, a: &[u64], b: &[u64]) -> u64 {
        debug_assert_eq!(a.len(), b.len());
        if self.lazy_terms as usize >= a.len() {
            let s: u64 = a.iter().zip(b).map(|(&u, &v)| u * v).sum();
            s % self.p
        } else if self.lazy_terms >= 1 {
            let chunk = self.lazy_terms as usize;
            let mut acc = 0u64;
            for (ca, cb) in a.chunks(chunk).zip(b.chunks(chunk)) {
                let s: u64 = ca.iter().zip(cb).map(|(&u, &v)| u * v).sum();
                acc = self.add(acc, s % self.p);
            }
            acc
        } else {
            a.iter()
                .zip(b)
                .fold(0, |acc, (&u, &v)| self.add(acc, self.mul(u, v)))
        }
    }

    pub fn scalar(self, value: u64) -> FpScalar {
        FpScalar {
            value: self.reduce(value),
            modulus: self,
        }
    }

    pub fn zero(self) -> FpScalar {
        self.scalar(0)
    }

    pub fn one(self) -> FpScalar {
        self.scalar(1)
    }
}

/// Deterministic Miller–Rabin, exact for every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            exp >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// An element of F_p.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u64,
    modulus: PrimeModulus,
}

impl fmt::Debug for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus.p)
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl FpScalar {
    pub fn new(value: u64, modulus: PrimeModulus) -> Self {
        modulus.scalar(value)
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<Self> {
        Ok(Self {
            value: self.modulus.inv(self.value)?,
            modulus: self.modulus,
        })
    }

    fn check(self, other: Self) {
        assert_eq!(
            self.modulus.p, other.modulus.p,
            "mixing residues of different moduli"
        );
    }
}

/// Inverse of a nonzero field element.
pub fn fp_inv(a: FpScalar) -> Result<FpScalar> {
    a.inv()
}

impl Add for FpScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check(rhs);
        Self {
            value: self.modulus.add(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Sub for FpScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.check(rhs);
        Self {
            value: self.modulus.sub(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Mul for FpScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.check(rhs);
        Self {
            value: self.modulus.mul(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Neg for FpScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: self.modulus.neg(self.value),
            modulus: self.modulus,
        }
    }
}

/// A vector over F_p. Entries are canonical residues sharing one modulus.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpVector {
    modulus: PrimeModulus,
    entries: Vec<u64>,
}

impl fmt::Debug for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} (mod {})", self.entries, self.modulus.p)
    }
}

impl FpVector {
    /// Builds a vector, reducing every entry into `[0, p)`.
    pub fn new(modulus: PrimeModulus, entries: impl IntoIterator<Item = u64>) -> Self {
        Self {
            modulus,
            entries: entries.into_iter().map(|e| modulus.reduce(e)).collect(),
        }
    }

    pub fn zeros(modulus: PrimeModulus, len: usize) -> Self {
        Self {
            modulus,
            entries: vec![0; len],
        }
    }

    pub(crate) fn from_canonical(modulus: PrimeModulus, entries: Vec<u64>) -> Self {
        debug_assert!(entries.iter().all(|&e| e < modulus.p));
        Self { modulus, entries }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn get(&self, i: usize) -> FpScalar {
        FpScalar {
            value: self.entries[i],
            modulus: self.modulus,
        }
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.entries
    }

    pub fn into_inner(self) -> Vec<u64> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = FpScalar> + '_ {
        self.entries.iter().map(move |&value| FpScalar {
            value,
            modulus: self.modulus,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other, other.len())?;
        let m = self.modulus;
        Ok(Self::from_canonical(
            m,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| m.add(a, b))
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other, other.len())?;
        let m = self.modulus;
        Ok(Self::from_canonical(
            m,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| m.sub(a, b))
                .collect(),
        ))
    }

    pub fn scale(&self, k: FpScalar) -> Self {
        let m = self.modulus;
        Self::from_canonical(m, self.entries.iter().map(|&a| m.mul(a, k.value)).collect())
    }

    fn check(&self, other: &Self, expected_len: usize) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.p,
                right: other.modulus.p,
            });
        }
        if self.len() != expected_len {
            return Err(Error::LengthMismatch {
                expected: expected_len,
                found: self.len(),
            });
        }
        Ok(())
    }
}

/// The affine pairing `<c, x> = sum_{d<D} c_d x_d + c_D` for `c` of length
/// `D + 1` and `x` of length `D`.
pub fn fp_affine_eval(c: &FpVector, x: &FpVector) -> Result<FpScalar> {
    c.check(x, x.len() + 1)?;
    let m = c.modulus;
    Ok(FpScalar {
        value: m.affine_raw(&c.entries, &x.entries),
        modulus: m,
    })
}
