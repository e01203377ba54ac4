//! Truncated p-adic integers: residues modulo `p^E` with explicit precision.
//!
//! Values whose modulus `p^E` fits in a `u64` are kept in a machine word and
//! multiplied through `u128`; larger moduli fall back to [`BigUint`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fp::PrimeModulus;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Residue {
    Small(u64),
    Big(BigUint),
}

/// `p^e`, as a word when it fits.
fn power(p: PrimeModulus, e: u32) -> Residue {
    match p.get().checked_pow(e) {
        Some(m) => Residue::Small(m),
        None => Residue::Big(BigUint::from(p.get()).pow(e)),
    }
}

/// Residue modulo `p^precision`, canonical in `[0, p^precision)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZpTrunc {
    p: PrimeModulus,
    precision: u32,
    value: Residue,
}

impl fmt::Debug for ZpTrunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self, self.p, self.precision)
    }
}

impl fmt::Display for ZpTrunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Residue::Small(v) => write!(f, "{v}"),
            Residue::Big(v) => write!(f, "{v}"),
        }
    }
}

impl ZpTrunc {
    pub fn new(p: PrimeModulus, precision: u32, value: u64) -> Self {
        let value = match power(p, precision) {
            Residue::Small(m) => Residue::Small(value % m),
            Residue::Big(m) => Residue::Big(BigUint::from(value) % m),
        };
        Self {
            p,
            precision,
            value,
        }
    }

    pub fn zero(p: PrimeModulus, precision: u32) -> Self {
        Self::new(p, precision, 0)
    }

    /// Reduces an arbitrary-size integer modulo `p^precision`.
    pub fn from_biguint(p: PrimeModulus, precision: u32, value: &BigUint) -> Self {
        let value = match power(p, precision) {
            Residue::Small(m) => Residue::Small((value % m).to_u64().expect("reduced below u64 modulus")),
            Residue::Big(m) => Residue::Big(value % m),
        };
        Self {
            p,
            precision,
            value,
        }
    }

    /// Parses a decimal string that must already lie in `[0, p^precision)`.
    pub fn parse(p: PrimeModulus, precision: u32, s: &str) -> Result<Self> {
        if let (Ok(v), Residue::Small(m)) = (s.trim().parse::<u64>(), power(p, precision)) {
            if v < m {
                return Ok(Self {
                    p,
                    precision,
                    value: Residue::Small(v),
                });
            }
        }
        let v: BigUint = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("not a decimal integer: {s:?}")))?;
        if v >= Self::modulus_big(p, precision) {
            return Err(Error::InvalidParameter(format!(
                "value {s} is outside [0, {p}^{precision})"
            )));
        }
        Ok(Self::from_biguint(p, precision, &v))
    }

    pub fn modulus_big(p: PrimeModulus, precision: u32) -> BigUint {
        BigUint::from(p.get()).pow(precision)
    }

    pub fn prime(&self) -> PrimeModulus {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Residue::Small(v) => *v == 0,
            Residue::Big(v) => v.is_zero(),
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match &self.value {
            Residue::Small(v) => BigUint::from(*v),
            Residue::Big(v) => v.clone(),
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        match &self.value {
            Residue::Small(v) => Some(*v),
            Residue::Big(v) => v.to_u64(),
        }
    }

    /// The last digit, i.e. the image in F_p. Zero at precision 0.
    pub fn residue_mod_p(&self) -> u64 {
        if self.precision == 0 {
            return 0;
        }
        match &self.value {
            Residue::Small(v) => v % self.p.get(),
            Residue::Big(v) => (v % self.p.get()).to_u64().expect("residue below p"),
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch {
                left: self.p.get(),
                right: other.p.get(),
            });
        }
        if self.precision != other.precision {
            return Err(Error::PrecisionMismatch {
                left: self.precision,
                right: other.precision,
            });
        }
        Ok(())
    }

    fn with_value(&self, value: Residue) -> Self {
        Self {
            p: self.p,
            precision: self.precision,
            value,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let value = match (&self.value, &other.value, power(self.p, self.precision)) {
            (Residue::Small(a), Residue::Small(b), Residue::Small(m)) => {
                Residue::Small(((*a as u128 + *b as u128) % m as u128) as u64)
            }
            (Residue::Big(a), Residue::Big(b), Residue::Big(m)) => Residue::Big((a + b) % m),
            _ => unreachable!("representation is a function of (p, precision)"),
        };
        Ok(self.with_value(value))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let value = match (&self.value, &other.value, power(self.p, self.precision)) {
            (Residue::Small(a), Residue::Small(b), Residue::Small(m)) => {
                Residue::Small(((*a as u128 + m as u128 - *b as u128) % m as u128) as u64)
            }
            (Residue::Big(a), Residue::Big(b), Residue::Big(m)) => {
                Residue::Big((a + &m - b) % m)
            }
            _ => unreachable!("representation is a function of (p, precision)"),
        };
        Ok(self.with_value(value))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let value = match (&self.value, &other.value, power(self.p, self.precision)) {
            (Residue::Small(a), Residue::Small(b), Residue::Small(m)) => {
                Residue::Small(((*a as u128 * *b as u128) % m as u128) as u64)
            }
            (Residue::Big(a), Residue::Big(b), Residue::Big(m)) => Residue::Big((a * b) % m),
            _ => unreachable!("representation is a function of (p, precision)"),
        };
        Ok(self.with_value(value))
    }

    pub fn neg(&self) -> Self {
        Self::zero(self.p, self.precision)
            .sub(self)
            .expect("same ring")
    }

    /// `min(precision, v_p(value))`; zero has valuation equal to the precision.
    pub fn valuation(&self) -> u32 {
        let p = self.p.get();
        let mut e = 0;
        match &self.value {
            Residue::Small(v) => {
                let mut v = *v;
                if v == 0 {
                    return self.precision;
                }
                while v % p == 0 {
                    v /= p;
                    e += 1;
                }
            }
            Residue::Big(v) => {
                if v.is_zero() {
                    return self.precision;
                }
                let mut v = v.clone();
                while (&v % p).is_zero() {
                    v /= p;
                    e += 1;
                }
            }
        }
        e.min(self.precision)
    }

    /// Divides by `p`, dropping one digit of precision.
    pub fn exact_div_p(&self) -> Result<Self> {
        if self.precision == 0 {
            return Err(Error::InvalidParameter(
                "cannot divide a precision-0 residue by p".into(),
            ));
        }
        let q = match &self.value {
            Residue::Small(v) => {
                if v % self.p.get() != 0 {
                    return Err(Error::NotDivisible);
                }
                BigUint::from(v / self.p.get())
            }
            Residue::Big(v) => {
                if !(v % self.p.get()).is_zero() {
                    return Err(Error::NotDivisible);
                }
                v / self.p.get()
            }
        };
        Ok(Self::from_biguint(self.p, self.precision - 1, &q))
    }

    /// Multiplies by `p`, gaining one digit of precision. Inverse of
    /// [`exact_div_p`](Self::exact_div_p).
    pub fn mul_p_lift(&self) -> Self {
        let v = self.to_biguint() * self.p.get();
        Self::from_biguint(self.p, self.precision + 1, &v)
    }

    /// Reduction to a lower (or equal) precision.
    pub fn truncate(&self, precision: u32) -> Result<Self> {
        match precision.cmp(&self.precision) {
            Ordering::Greater => Err(Error::InvalidParameter(format!(
                "cannot raise precision from {} to {precision} by truncation",
                self.precision
            ))),
            Ordering::Equal => Ok(self.clone()),
            Ordering::Less => Ok(match &self.value {
                Residue::Small(v) => Self::new(self.p, precision, *v),
                Residue::Big(v) => Self::from_biguint(self.p, precision, v),
            }),
        }
    }
}

pub fn zp_valuation(a: &ZpTrunc) -> u32 {
    a.valuation()
}

pub fn zp_exact_div_p(a: &ZpTrunc) -> Result<ZpTrunc> {
    a.exact_div_p()
}

/// `<c, x> = sum_{d<D} c_d x_d + c_D` modulo `p^E`. All operands must share `p`
/// and `E`.
pub fn zp_affine_eval(c: &[ZpTrunc], x: &[ZpTrunc]) -> Result<ZpTrunc> {
    if c.len() != x.len() + 1 {
        return Err(Error::LengthMismatch {
            expected: x.len() + 1,
            found: c.len(),
        });
    }
    let (linear, constant) = c.split_at(x.len());
    let mut acc = constant[0].clone();
    for (cd, xd) in linear.iter().zip(x) {
        acc = acc.add(&cd.mul(xd)?)?;
    }
    Ok(acc)
}
