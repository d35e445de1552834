//! Exact scalar arithmetic over a prime field `F_p` or the rationals.
//!
//! Every operation is exact; there is no floating point anywhere in the
//! crate. Prime moduli are limited to 63 bits so that addition of two
//! reduced representatives cannot overflow a `u64`.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} out of range (need 2 <= p < 2^63)")]
    ModulusRange(u64),
    #[error("division by zero in the field")]
    DivisionByZero,
    #[error("cannot parse scalar {0:?}")]
    BadScalar(String),
    #[error("cannot parse field spec {0:?} (expected `p=<prime>` or `rational`)")]
    BadFieldSpec(String),
}

/// The coefficient field: a prime field with a 63-bit modulus, or `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldConfig {
    Prime(u64),
    Rational,
}

/// A field element. The variant must match the `FieldConfig` it is used
/// with; all arithmetic goes through `FieldConfig` methods which check this.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Fp(u64),
    Rat(BigRational),
}

impl FieldConfig {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if p < 2 || p >= (1 << 63) {
            return Err(FieldError::ModulusRange(p));
        }
        if !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(FieldConfig::Prime(p))
    }

    pub fn rational() -> Self {
        FieldConfig::Rational
    }

    /// True iff the field characteristic divides `k`. Characteristic zero
    /// divides nothing but zero.
    pub fn char_divides(&self, k: u64) -> bool {
        match self {
            FieldConfig::Prime(p) => k % p == 0,
            FieldConfig::Rational => k == 0,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldConfig::Prime(p) => *p,
            FieldConfig::Rational => 0,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldConfig::Prime(_) => Scalar::Fp(0),
            FieldConfig::Rational => Scalar::Rat(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldConfig::Prime(_) => Scalar::Fp(1),
            FieldConfig::Rational => Scalar::Rat(BigRational::one()),
        }
    }

    pub fn from_i64(&self, k: i64) -> Scalar {
        self.from_i128(k as i128)
    }

    pub fn from_u64(&self, k: u64) -> Scalar {
        match self {
            FieldConfig::Prime(p) => Scalar::Fp(k % p),
            FieldConfig::Rational => Scalar::Rat(BigRational::from(BigInt::from(k))),
        }
    }

    fn fp(&self, a: &Scalar) -> u64 {
        match (self, a) {
            (FieldConfig::Prime(_), Scalar::Fp(x)) => *x,
            _ => panic!("scalar kind does not match field"),
        }
    }

    fn rat<'a>(&self, a: &'a Scalar) -> &'a BigRational {
        match (self, a) {
            (FieldConfig::Rational, Scalar::Rat(x)) => x,
            _ => panic!("scalar kind does not match field"),
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Fp(x) => *x == 0,
            Scalar::Rat(x) => x.is_zero(),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            FieldConfig::Prime(p) => {
                let s = self.fp(a) + self.fp(b);
                Scalar::Fp(if s >= *p { s - p } else { s })
            }
            FieldConfig::Rational => Scalar::Rat(self.rat(a) + self.rat(b)),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match self {
            FieldConfig::Prime(p) => {
                let x = self.fp(a);
                Scalar::Fp(if x == 0 { 0 } else { p - x })
            }
            FieldConfig::Rational => Scalar::Rat(-self.rat(a)),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            FieldConfig::Prime(p) => {
                let prod = (self.fp(a) as u128 * self.fp(b) as u128) % *p as u128;
                Scalar::Fp(prod as u64)
            }
            FieldConfig::Rational => Scalar::Rat(self.rat(a) * self.rat(b)),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar, FieldError> {
        match self {
            FieldConfig::Prime(p) => {
                let x = self.fp(a);
                if x == 0 {
                    return Err(FieldError::DivisionByZero);
                }
                Ok(Scalar::Fp(mod_inverse(x, *p).ok_or(FieldError::DivisionByZero)?))
            }
            FieldConfig::Rational => {
                let x = self.rat(a);
                if x.is_zero() {
                    return Err(FieldError::DivisionByZero);
                }
                Ok(Scalar::Rat(x.recip()))
            }
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Scalar, mut e: u64) -> Scalar {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Parses `"-3"`, `"7"`, or (for the rationals) `"2/5"`.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar, FieldError> {
        let s = s.trim();
        match self {
            FieldConfig::Prime(_) => {
                let k: i128 = s.parse().map_err(|_| FieldError::BadScalar(s.to_string()))?;
                Ok(self.from_i128(k))
            }
            FieldConfig::Rational => {
                let r = BigRational::from_str(s)
                    .or_else(|_| BigInt::from_str(s).map(BigRational::from))
                    .map_err(|_| FieldError::BadScalar(s.to_string()))?;
                Ok(Scalar::Rat(r))
            }
        }
    }

    pub fn from_i128(&self, k: i128) -> Scalar {
        match self {
            FieldConfig::Prime(p) => {
                let r = k.rem_euclid(*p as i128);
                Scalar::Fp(r as u64)
            }
            FieldConfig::Rational => Scalar::Rat(BigRational::from(BigInt::from(k))),
        }
    }

    pub fn format_scalar(&self, a: &Scalar) -> String {
        match a {
            Scalar::Fp(x) => x.to_string(),
            Scalar::Rat(x) => {
                if x.denom().is_one() {
                    x.numer().to_string()
                } else {
                    format!("{}/{}", x.numer(), x.denom())
                }
            }
        }
    }

    /// All field elements, in order. Only available for prime fields; the
    /// enumeration oracles depend on this.
    pub fn elements(&self) -> Option<impl Iterator<Item = Scalar>> {
        match self {
            FieldConfig::Prime(p) => Some((0..*p).map(Scalar::Fp)),
            FieldConfig::Rational => None,
        }
    }

    pub fn order(&self) -> Option<u64> {
        match self {
            FieldConfig::Prime(p) => Some(*p),
            FieldConfig::Rational => None,
        }
    }

    /// True when the scalar is negative in a signed sense. Prime-field
    /// representatives are never negative.
    pub fn is_negative(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Fp(_) => false,
            Scalar::Rat(x) => x.is_negative(),
        }
    }
}

impl fmt::Display for FieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldConfig::Prime(p) => write!(f, "p={p}"),
            FieldConfig::Rational => write!(f, "rational"),
        }
    }
}

impl FromStr for FieldConfig {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, FieldError> {
        let s = s.trim();
        if s == "rational" {
            return Ok(FieldConfig::Rational);
        }
        if let Some(rest) = s.strip_prefix("p=") {
            let p: u64 = rest.parse().map_err(|_| FieldError::BadFieldSpec(s.to_string()))?;
            return FieldConfig::prime(p);
        }
        Err(FieldError::BadFieldSpec(s.to_string()))
    }
}

fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    // extended Euclid on (a, p)
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(p as i128) as u64)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(101));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(91)); // 7 * 13
        assert!(FieldConfig::prime(4).is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = FieldConfig::prime(5).unwrap();
        let three = f.from_i64(3);
        let two = f.from_i64(2);
        assert_eq!(f.add(&three, &two), f.zero());
        assert_eq!(f.mul(&three, &two), f.one());
        assert_eq!(f.from_i64(-1), f.from_i64(4));
        let inv = f.inv(&three).unwrap();
        assert_eq!(f.mul(&three, &inv), f.one());
    }

    #[test]
    fn rational_arithmetic() {
        let f = FieldConfig::rational();
        let half = f.parse_scalar("1/2").unwrap();
        let sum = f.add(&half, &half);
        assert_eq!(sum, f.one());
        assert_eq!(f.format_scalar(&half), "1/2");
        assert_eq!(f.format_scalar(&sum), "1");
    }

    #[test]
    fn char_divides() {
        let f = FieldConfig::prime(3).unwrap();
        assert!(f.char_divides(6));
        assert!(!f.char_divides(4));
        assert!(!FieldConfig::rational().char_divides(6));
    }
}
