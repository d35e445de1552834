//! Sparse multivariate polynomials with exact coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors under a graded
//! lexicographic order, so the representation is canonical: no zero
//! coefficients are ever stored and equal polynomials compare equal
//! structurally. The degree of the zero polynomial is a distinguished
//! "minus infinity" value so that degree bounds hold vacuously for it.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldConfig, FieldError, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("variable index {index} out of range 1..={nvars}")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("evaluation point has {got} coordinates, expected {expected}")]
    BadPointArity { got: usize, expected: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The ambient polynomial ring: a coefficient field and a variable count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ring {
    pub field: FieldConfig,
    pub nvars: usize,
}

impl Ring {
    pub fn new(field: FieldConfig, nvars: usize) -> Self {
        Ring { field, nvars }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[x1..x{}]", self.field, self.nvars)
    }
}

/// An exponent vector; its length always equals the ring's variable count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponents(pub Vec<u32>);

impl Exponents {
    pub fn zero(nvars: usize) -> Self {
        Exponents(vec![0; nvars])
    }

    pub fn unit(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Exponents(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn add(&self, other: &Exponents) -> Exponents {
        Exponents(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

// Graded order: total degree first, then lexicographic on the vector.
impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total degree with a `-inf` sentinel for the zero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    NegInf,
    Fin(u32),
}

impl Degree {
    /// `deg <= bound`, vacuously true for the zero polynomial.
    pub fn at_most(&self, bound: u32) -> bool {
        match self {
            Degree::NegInf => true,
            Degree::Fin(d) => *d <= bound,
        }
    }

    pub fn at_least(&self, bound: u32) -> bool {
        match self {
            Degree::NegInf => false,
            Degree::Fin(d) => *d >= bound,
        }
    }

    pub fn finite(&self) -> Option<u32> {
        match self {
            Degree::NegInf => None,
            Degree::Fin(d) => Some(*d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => write!(f, "-inf"),
            Degree::Fin(d) => write!(f, "{d}"),
        }
    }
}

/// A sparse multivariate polynomial in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    ring: Ring,
    terms: BTreeMap<Exponents, Scalar>,
}

impl SparsePoly {
    pub fn zero(ring: Ring) -> Self {
        SparsePoly { ring, terms: BTreeMap::new() }
    }

    pub fn constant(ring: Ring, c: Scalar) -> Self {
        let mut p = SparsePoly::zero(ring);
        if !ring.field.is_zero(&c) {
            p.terms.insert(Exponents::zero(ring.nvars), c);
        }
        p
    }

    pub fn one(ring: Ring) -> Self {
        SparsePoly::constant(ring, ring.field.one())
    }

    pub fn from_int(ring: Ring, k: i64) -> Self {
        SparsePoly::constant(ring, ring.field.from_i64(k))
    }

    /// The variable `x_i`, 1-based.
    pub fn var(ring: Ring, i: usize) -> Result<Self, PolyError> {
        if i == 0 || i > ring.nvars {
            return Err(PolyError::VariableOutOfRange { index: i, nvars: ring.nvars });
        }
        let mut p = SparsePoly::zero(ring);
        p.terms.insert(Exponents::unit(ring.nvars, i - 1), ring.field.one());
        Ok(p)
    }

    pub fn monomial(ring: Ring, exps: Exponents, coeff: Scalar) -> Self {
        assert_eq!(exps.0.len(), ring.nvars, "exponent vector length mismatch");
        let mut p = SparsePoly::zero(ring);
        if !ring.field.is_zero(&coeff) {
            p.terms.insert(exps, coeff);
        }
        p
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Scalar)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> Degree {
        match self.terms.keys().next_back() {
            None => Degree::NegInf,
            Some(e) => Degree::Fin(e.total_degree()),
        }
    }

    fn check_ring(&self, other: &SparsePoly) {
        assert_eq!(
            self.ring, other.ring,
            "ring mismatch: {} vs {}",
            self.ring, other.ring
        );
    }

    pub fn same_ring(&self, other: &SparsePoly) -> bool {
        self.ring == other.ring
    }

    fn insert_term(&mut self, e: Exponents, c: Scalar) {
        if self.ring.field.is_zero(&c) {
            return;
        }
        match self.terms.remove(&e) {
            None => {
                self.terms.insert(e, c);
            }
            Some(old) => {
                let sum = self.ring.field.add(&old, &c);
                if !self.ring.field.is_zero(&sum) {
                    self.terms.insert(e, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        self.check_ring(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SparsePoly {
        let f = self.ring.field;
        SparsePoly {
            ring: self.ring,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), f.neg(c))).collect(),
        }
    }

    pub fn scale(&self, k: &Scalar) -> SparsePoly {
        let f = self.ring.field;
        if f.is_zero(k) {
            return SparsePoly::zero(self.ring);
        }
        SparsePoly {
            ring: self.ring,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), f.mul(c, k))).collect(),
        }
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        self.check_ring(other);
        let f = self.ring.field;
        let mut out = SparsePoly::zero(self.ring);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.insert_term(ea.add(eb), f.mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut acc = SparsePoly::one(self.ring);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal partial derivative with respect to `x_i`, 1-based.
    pub fn partial_derivative(&self, i: usize) -> Result<SparsePoly, PolyError> {
        if i == 0 || i > self.ring.nvars {
            return Err(PolyError::VariableOutOfRange { index: i, nvars: self.ring.nvars });
        }
        let f = self.ring.field;
        let mut out = SparsePoly::zero(self.ring);
        for (e, c) in &self.terms {
            let k = e.0[i - 1];
            if k == 0 {
                continue;
            }
            let mut exps = e.0.clone();
            exps[i - 1] -= 1;
            out.insert_term(Exponents(exps), f.mul(c, &f.from_u64(k as u64)));
        }
        Ok(out)
    }

    /// Sum of exactly the degree-`d` terms.
    pub fn homogeneous_component(&self, d: u32) -> SparsePoly {
        SparsePoly {
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.total_degree() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.total_degree());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms
            .get(&Exponents::zero(self.ring.nvars))
            .cloned()
            .unwrap_or_else(|| self.ring.field.zero())
    }

    /// Splits `p` as `(c, q)` with `p = q + c` and `q(0) = 0`.
    pub fn split_constant(&self) -> (Scalar, SparsePoly) {
        let c = self.constant_term();
        let mut q = self.clone();
        q.terms.remove(&Exponents::zero(self.ring.nvars));
        (c, q)
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar, PolyError> {
        if point.len() != self.ring.nvars {
            return Err(PolyError::BadPointArity { got: point.len(), expected: self.ring.nvars });
        }
        let f = self.ring.field;
        let mut acc = f.zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                if k > 0 {
                    term = f.mul(&term, &f.pow(x, k as u64));
                }
            }
            acc = f.add(&acc, &term);
        }
        Ok(acc)
    }

    /// Fast probabilistic equality hint via random evaluation. A `true`
    /// answer may be wrong with small probability; verification paths must
    /// use exact `==` instead.
    pub fn probably_equal(&self, other: &SparsePoly, rng: &mut impl rand::Rng, trials: usize) -> bool {
        if !self.same_ring(other) {
            return false;
        }
        let f = self.ring.field;
        for _ in 0..trials {
            let point: Vec<Scalar> = (0..self.ring.nvars)
                .map(|_| match f {
                    FieldConfig::Prime(p) => Scalar::Fp(rng.gen_range(0..p)),
                    FieldConfig::Rational => f.from_i64(rng.gen_range(-1000..1000)),
                })
                .collect();
            if self.evaluate(&point).unwrap() != other.evaluate(&point).unwrap() {
                return false;
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Text format: `3*x1^2*x3 + 2*x2 + 5`
// ---------------------------------------------------------------------------

impl SparsePoly {
    pub fn parse(ring: Ring, input: &str) -> Result<SparsePoly, PolyError> {
        Parser { ring, bytes: input.as_bytes(), pos: 0 }.parse_poly()
    }

    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let f = self.ring.field;
        let mut out = String::new();
        // descending graded order reads naturally
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let (sign, mag) = if f.is_negative(c) {
                ("-", f.neg(c))
            } else {
                ("+", c.clone())
            };
            if i == 0 {
                if sign == "-" {
                    out.push_str("-");
                }
            } else {
                out.push_str(if sign == "-" { " - " } else { " + " });
            }
            let mut parts: Vec<String> = Vec::new();
            let coeff_str = f.format_scalar(&mag);
            if e.is_constant() || coeff_str != "1" {
                parts.push(coeff_str);
            }
            for (v, &k) in e.0.iter().enumerate() {
                if k == 1 {
                    parts.push(format!("x{}", v + 1));
                } else if k > 1 {
                    parts.push(format!("x{}^{}", v + 1, k));
                }
            }
            out.push_str(&parts.join("*"));
        }
        out
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

struct Parser<'a> {
    ring: Ring,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn parse_poly(&mut self) -> Result<SparsePoly, PolyError> {
        let mut acc = SparsePoly::zero(self.ring);
        let mut negate = false;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                negate = true;
            }
            Some(b'+') => {
                self.pos += 1;
            }
            _ => {}
        }
        loop {
            let term = self.parse_term()?;
            acc = if negate { acc.sub(&term) } else { acc.add(&term) };
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    negate = false;
                }
                Some(b'-') => {
                    self.pos += 1;
                    negate = true;
                }
                Some(c) => return self.err(format!("unexpected character {:?}", c as char)),
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<SparsePoly, PolyError> {
        let mut acc = self.parse_factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.parse_factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<SparsePoly, PolyError> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let idx = self.parse_uint("variable index")?;
                let v = SparsePoly::var(self.ring, idx as usize)?;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let e = self.parse_uint("exponent")?;
                    Ok(v.pow(e as u32))
                } else {
                    Ok(v)
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.parse_uint("coefficient")? as i128;
                if self.peek() == Some(b'/') {
                    if self.ring.field != FieldConfig::Rational {
                        return self.err("rational coefficient in a prime-field polynomial");
                    }
                    self.pos += 1;
                    let den = self.parse_uint("denominator")?;
                    if den == 0 {
                        return self.err("zero denominator");
                    }
                    let f = self.ring.field;
                    let c = f
                        .div(&f.from_i128(num), &f.from_u64(den))
                        .map_err(PolyError::Field)?;
                    return Ok(SparsePoly::constant(self.ring, c));
                }
                Ok(SparsePoly::constant(self.ring, self.ring.field.from_i128(num)))
            }
            Some(c) => self.err(format!("expected variable or number, got {:?}", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn parse_uint(&mut self, what: &str) -> Result<u64, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(format!("expected {what}"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| PolyError::Parse { pos: start, msg: format!("{what} out of range") })
    }
}

// ---------------------------------------------------------------------------
// JSON form: list of {exponents, coeff} with decimal-string coefficients
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDto {
    pub exponents: Vec<u32>,
    pub coeff: String,
}

impl SparsePoly {
    pub fn to_terms(&self) -> Vec<TermDto> {
        self.terms
            .iter()
            .map(|(e, c)| TermDto {
                exponents: e.0.clone(),
                coeff: self.ring.field.format_scalar(c),
            })
            .collect()
    }

    pub fn from_terms(ring: Ring, terms: &[TermDto]) -> Result<SparsePoly, PolyError> {
        let mut p = SparsePoly::zero(ring);
        for t in terms {
            if t.exponents.len() != ring.nvars {
                return Err(PolyError::BadPointArity { got: t.exponents.len(), expected: ring.nvars });
            }
            let c = ring.field.parse_scalar(&t.coeff)?;
            p.insert_term(Exponents(t.exponents.clone()), c);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn ring(nvars: usize) -> Ring {
        Ring::new(FieldConfig::prime(101).unwrap(), nvars)
    }

    fn p(r: Ring, s: &str) -> SparsePoly {
        SparsePoly::parse(r, s).unwrap()
    }

    #[test]
    fn add_cancellation() {
        let r = ring(2);
        let x1 = p(r, "x1");
        assert!(x1.add(&x1.neg()).is_zero());
        assert_eq!(p(r, "x1 + 1").add(&p(r, "x2")), p(r, "x1 + x2 + 1"));
    }

    #[test]
    fn add_modulus_wrap() {
        let r = Ring::new(FieldConfig::prime(5).unwrap(), 1);
        let a = p(r, "3*x1^2");
        let b = p(r, "2*x1^2");
        assert!(a.add(&b).is_zero());
    }

    #[test]
    fn mul_basic() {
        let r = ring(2);
        assert_eq!(p(r, "x1+1").mul(&p(r, "x1-1")), p(r, "x1^2 - 1"));
        assert!(p(r, "x1+x2").mul(&SparsePoly::zero(r)).is_zero());
    }

    #[test]
    fn mul_affine_expansion() {
        // (x+a)(y+b) = xy + bx + ay + ab
        let r = ring(2);
        let lhs = p(r, "x1 + 3").mul(&p(r, "x2 + 7"));
        assert_eq!(lhs, p(r, "x1*x2 + 7*x1 + 3*x2 + 21"));
    }

    #[test]
    fn derivative_basic() {
        let r = ring(1);
        let xn = p(r, "x1^5");
        assert_eq!(xn.partial_derivative(1).unwrap(), p(r, "5*x1^4"));
        let r3 = Ring::new(FieldConfig::prime(3).unwrap(), 1);
        assert!(p(r3, "x1^3").partial_derivative(1).unwrap().is_zero());
        assert!(xn.partial_derivative(2).is_err());
    }

    #[test]
    fn derivative_of_esym32_by_term_oracle() {
        // expand x1x2 + x1x3 + x2x3 and differentiate term by term
        let r = ring(3);
        let esym = p(r, "x1*x2 + x1*x3 + x2*x3");
        assert_eq!(esym.partial_derivative(1).unwrap(), p(r, "x2 + x3"));
    }

    #[test]
    fn homogeneous_components() {
        let r = ring(2);
        assert_eq!(p(r, "x1 + 5").homogeneous_component(0), p(r, "5"));
        assert_eq!(p(r, "x1^2 + x1 + 1").homogeneous_component(2), p(r, "x1^2"));
        // Hom_1((x+1)(y+2)) = 2x + y, via the expansion oracle
        let prod = p(r, "x1 + 1").mul(&p(r, "x2 + 2"));
        assert_eq!(prod.homogeneous_component(1), p(r, "2*x1 + x2"));
    }

    #[test]
    fn split_constant_cases() {
        let r = ring(1);
        let (c, q) = p(r, "x1 + 7").split_constant();
        assert_eq!(c, r.field.from_i64(7));
        assert_eq!(q, p(r, "x1"));
        let (c0, q0) = SparsePoly::zero(r).split_constant();
        assert!(r.field.is_zero(&c0) && q0.is_zero());
        // (x+1)(x+2) -> (2, x^2 + 3x), via the expansion oracle
        let prod = p(r, "x1+1").mul(&p(r, "x1+2"));
        let (c2, q2) = prod.split_constant();
        assert_eq!(c2, r.field.from_i64(2));
        assert_eq!(q2, p(r, "x1^2 + 3*x1"));
        assert_eq!(q2.add(&SparsePoly::constant(r, c2)), prod);
    }

    #[test]
    fn evaluate_cases() {
        let r = ring(2);
        let q = p(r, "x1^2 + x2");
        let z = r.field.zero();
        assert_eq!(q.evaluate(&[z.clone(), z.clone()]).unwrap(), r.field.zero());
        assert!(q.evaluate(&[z]).is_err());
        // sum of cubes at (1,1,1) over F_7
        let r7 = Ring::new(FieldConfig::prime(7).unwrap(), 3);
        let s = p(r7, "x1^3 + x2^3 + x3^3");
        let one = r7.field.one();
        assert_eq!(
            s.evaluate(&[one.clone(), one.clone(), one]).unwrap(),
            r7.field.from_i64(3)
        );
    }

    #[test]
    fn zero_degree_is_neg_inf() {
        let r = ring(2);
        let z = SparsePoly::zero(r);
        assert_eq!(z.total_degree(), Degree::NegInf);
        assert!(z.total_degree().at_most(0));
        assert!(z.total_degree() < Degree::Fin(0));
    }

    #[test]
    fn text_roundtrip_and_json() {
        let r = ring(3);
        let q = p(r, "3*x1^2*x3 + 2*x2 + 5");
        assert_eq!(SparsePoly::parse(r, &q.to_text()).unwrap(), q);
        let terms = q.to_terms();
        assert_eq!(SparsePoly::from_terms(r, &terms).unwrap(), q);
        // parse errors carry a position
        match SparsePoly::parse(r, "x1 + @") {
            Err(PolyError::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn probabilistic_equality_hint() {
        let r = ring(2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let a = p(r, "x1^2 - 1");
        let b = p(r, "x1+1").mul(&p(r, "x1-1"));
        assert!(a.probably_equal(&b, &mut rng, 8));
        assert!(!a.probably_equal(&p(r, "x1^2"), &mut rng, 8));
    }

    // random polynomial for property tests
    fn arb_poly(r: Ring, max_deg: u32) -> impl Strategy<Value = SparsePoly> {
        prop::collection::vec(
            (
                prop::collection::vec(0..=max_deg, r.nvars),
                0i64..101,
            ),
            0..6,
        )
        .prop_map(move |terms| {
            let mut acc = SparsePoly::zero(r);
            for (exps, c) in terms {
                acc = acc.add(&SparsePoly::monomial(
                    r,
                    Exponents(exps),
                    r.field.from_i64(c),
                ));
            }
            acc
        })
    }

    proptest! {
        #[test]
        fn ring_axioms((a, b, c) in (arb_poly(ring(3), 3), arb_poly(ring(3), 3), arb_poly(ring(3), 3))) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn derivative_linear_and_product_rule((a, b) in (arb_poly(ring(3), 3), arb_poly(ring(3), 3))) {
            for i in 1..=3usize {
                let da = a.partial_derivative(i).unwrap();
                let db = b.partial_derivative(i).unwrap();
                prop_assert_eq!(a.add(&b).partial_derivative(i).unwrap(), da.add(&db));
                prop_assert_eq!(
                    a.mul(&b).partial_derivative(i).unwrap(),
                    da.mul(&b).add(&a.mul(&db))
                );
            }
        }

        #[test]
        fn split_constant_reconstructs(a in arb_poly(ring(3), 3)) {
            let (c, q) = a.split_constant();
            prop_assert_eq!(q.add(&SparsePoly::constant(a.ring(), c)), a.clone());
            let origin = vec![a.ring().field.zero(); 3];
            prop_assert!(a.ring().field.is_zero(&q.evaluate(&origin).unwrap()));
        }
    }
}
