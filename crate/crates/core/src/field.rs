//! Prime fields GF(p) and extension fields GF(p^m).
//!
//! Extension-field elements are stored as the integer `Σ c_i p^i` of their
//! coefficient vector, so the ground field GF(p) is exactly the values
//! `0..p`. Multiplication goes through discrete-log tables that are built
//! eagerly when the field is constructed.

use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Fields larger than this are refused; every table is sized by it.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

/// Common arithmetic surface shared by GF(p^m) and GI(q).
#[allow(clippy::wrong_self_convention)]
pub trait FiniteField: Send + Sync {
    type Elem: Copy + Eq + Hash + fmt::Debug + Send + Sync;

    fn characteristic(&self) -> u32;
    /// Number of elements.
    fn size(&self) -> u64;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Option<Self::Elem>;

    /// Embeds a ground-field value `0..p`.
    fn from_ground(&self, v: u32) -> Self::Elem;
    /// Returns the ground-field value if `a` lies in GF(p).
    fn to_ground(&self, a: Self::Elem) -> Option<u32>;

    /// Dense integer index in `0..size`, used for transcoding and tables.
    fn index(&self, a: Self::Elem) -> u32;
    fn from_index(&self, i: u32) -> Option<Self::Elem>;

    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        self.add(a, self.neg(b))
    }

    fn pow(&self, a: Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn frobenius(&self, a: Self::Elem) -> Self::Elem {
        self.pow(a, self.characteristic() as u64)
    }

    /// Smallest `n >= 1` with `a^n = 1`, by direct powering.
    fn order_of(&self, a: Self::Elem) -> Result<u64> {
        if a == self.zero() {
            return Err(Error::ZeroElement);
        }
        let one = self.one();
        let mut x = a;
        let mut n = 1;
        while x != one {
            x = self.mul(x, a);
            n += 1;
        }
        Ok(n)
    }

    fn elements(&self) -> Vec<Self::Elem> {
        (0..self.size() as u32)
            .map(|i| self.from_index(i).expect("index in range"))
            .collect()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo the prime `p` (Fermat).
pub(crate) fn inv_mod(a: u32, p: u32) -> Option<u32> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    let mut acc = 1u64;
    let mut base = a as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    Some(acc as u32)
}

/// GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NonPrimeModulus(p as u64));
        }
        if p as u64 > MAX_FIELD_SIZE {
            return Err(Error::FieldTooLarge(p as u64));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.p - b % self.p) % self.p
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        (self.p - a % self.p) % self.p
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        inv_mod(a, self.p)
    }
}

/// An element of an [`ExtensionField`], as the integer encoding of its
/// coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElement(pub u32);

impl ExtElement {
    pub const ZERO: Self = ExtElement(0);
    pub const ONE: Self = ExtElement(1);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Raise `a` to the exponent; `b` is ignored.
    Pow(u64),
    /// Inverse of `a`; `b` is ignored.
    Inv,
}

/// GF(p^m) generated by a primitive polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionField {
    ground: PrimeField,
    m: u32,
    /// Monic polynomial, lowest degree first, length `m + 1`.
    poly: Vec<u32>,
    size: u32,
    /// `exp[k] = α^k` for `k` in `0..2(size-1)`, doubled to skip a reduction.
    exp: Vec<u32>,
    /// `log[e]` for nonzero `e`; `log[0]` is unused.
    log: Vec<u32>,
}

impl ExtensionField {
    /// Builds GF(p^m) from `poly` (lowest degree first, monic, degree `m`).
    pub fn new(p: u32, m: u32, poly: &[u32]) -> Result<Self> {
        let ground = PrimeField::new(p)?;
        if m == 0 {
            return Err(Error::InvalidPolynomial("degree must be at least 1".into()));
        }
        if poly.len() != m as usize + 1 {
            return Err(Error::InvalidPolynomial(format!(
                "expected {} coefficients for degree {m}, got {}",
                m + 1,
                poly.len()
            )));
        }
        if let Some(&c) = poly.iter().find(|&&c| c >= p) {
            return Err(Error::InvalidPolynomial(format!(
                "coefficient {c} is outside [0, {p})"
            )));
        }
        if poly[m as usize] != 1 {
            return Err(Error::InvalidPolynomial("polynomial must be monic".into()));
        }
        let size = (p as u64)
            .checked_pow(m)
            .filter(|&s| s <= MAX_FIELD_SIZE)
            .ok_or(Error::FieldTooLarge(p as u64))?;
        let group = size - 1;
        let size = size as u32;

        // Walk the powers of x; primitive iff the walk first returns to 1
        // after exactly p^m - 1 steps.
        let mut exp = Vec::with_capacity(group as usize);
        let mut digits = vec![0u32; m as usize];
        digits[0] = 1;
        let mut order = 0u64;
        for step in 1..=group {
            exp.push(encode(&digits, p));
            times_x(&mut digits, poly, &ground);
            if digits[0] == 1 && digits[1..].iter().all(|&c| c == 0) {
                order = step;
                break;
            }
        }
        if order != group {
            return Err(Error::NonPrimitivePolynomial { order, expected: group });
        }

        let mut log = vec![0u32; size as usize];
        for (k, &e) in exp.iter().enumerate() {
            log[e as usize] = k as u32;
        }
        let doubled: Vec<u32> = exp.iter().chain(exp.iter()).copied().collect();
        Ok(Self { ground, m, poly: poly.to_vec(), size, exp: doubled, log })
    }

    /// Shipped primitive polynomials: x^4 + x + 1 for GF(16) and
    /// x^3 + x + 1 for GF(8).
    pub fn default_poly(p: u32, m: u32) -> Option<Vec<u32>> {
        match (p, m) {
            (2, 4) => Some(vec![1, 1, 0, 0, 1]),
            (2, 3) => Some(vec![1, 1, 0, 1]),
            _ => None,
        }
    }

    pub fn with_default_poly(p: u32, m: u32) -> Result<Self> {
        let poly = Self::default_poly(p, m).ok_or_else(|| {
            Error::InvalidPolynomial(format!("no default polynomial for GF({p}^{m})"))
        })?;
        Self::new(p, m, &poly)
    }

    pub fn p(&self) -> u32 {
        self.ground.modulus()
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn poly(&self) -> &[u32] {
        &self.poly
    }

    pub fn ground(&self) -> PrimeField {
        self.ground
    }

    /// Multiplicative group order `p^m - 1`.
    pub fn group_order(&self) -> u64 {
        self.size as u64 - 1
    }

    /// The residue class of x.
    pub fn alpha(&self) -> ExtElement {
        ExtElement(self.exp[1 % self.exp.len()])
    }

    /// `α^k`.
    pub fn alpha_pow(&self, k: u64) -> ExtElement {
        ExtElement(self.exp[(k % self.group_order()) as usize])
    }

    /// Discrete log to base α, `None` for zero.
    pub fn log(&self, e: ExtElement) -> Option<u32> {
        (e.0 != 0).then(|| self.log[e.0 as usize])
    }

    pub fn contains(&self, e: ExtElement) -> bool {
        e.0 < self.size
    }

    /// Coefficients `c_0..c_{m-1}`, lowest degree first.
    pub fn coeffs(&self, e: ExtElement) -> Vec<u32> {
        let p = self.p();
        let mut v = e.0;
        (0..self.m)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<ExtElement> {
        if coeffs.len() != self.m as usize || coeffs.iter().any(|&c| c >= self.p()) {
            return Err(Error::FieldMismatch);
        }
        Ok(ExtElement(encode(coeffs, self.p())))
    }

    /// Validated arithmetic on two elements of this field.
    pub fn arith(&self, a: ExtElement, b: ExtElement, op: ArithOp) -> Result<ExtElement> {
        if !self.contains(a) || !self.contains(b) {
            return Err(Error::FieldMismatch);
        }
        Ok(match op {
            ArithOp::Add => FiniteField::add(self, a, b),
            ArithOp::Sub => FiniteField::sub(self, a, b),
            ArithOp::Mul => FiniteField::mul(self, a, b),
            ArithOp::Div => {
                let inv = FiniteField::inv(self, b).ok_or(Error::DivisionByZero)?;
                FiniteField::mul(self, a, inv)
            }
            ArithOp::Pow(e) => FiniteField::pow(self, a, e),
            ArithOp::Inv => FiniteField::inv(self, a).ok_or(Error::DivisionByZero)?,
        })
    }

    /// Multiplicative order from the discrete log: `(p^m - 1) / gcd(log e, p^m - 1)`.
    pub fn element_order(&self, e: ExtElement) -> Result<u64> {
        if !self.contains(e) {
            return Err(Error::FieldMismatch);
        }
        let k = self.log(e).ok_or(Error::ZeroElement)? as u64;
        let n = self.group_order();
        Ok(n / gcd(k, n))
    }

    /// `0` or `α^k` in superscript power notation.
    pub fn power_label(&self, e: ExtElement) -> String {
        match self.log(e) {
            None => "0".to_owned(),
            Some(k) => format!("α{}", superscript(k as u64)),
        }
    }

    /// Coefficient vector, highest degree first (e.g. `0011` for α + 1).
    pub fn vector_label(&self, e: ExtElement) -> String {
        self.coeffs(e).iter().rev().map(|c| c.to_string()).collect()
    }
}

fn encode(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// In-place `digits <- digits * x mod poly`.
fn times_x(digits: &mut [u32], poly: &[u32], f: &PrimeField) {
    let m = digits.len();
    let carry = digits[m - 1];
    for i in (1..m).rev() {
        digits[i] = digits[i - 1];
    }
    digits[0] = 0;
    // x^m = -(poly_0 + ... + poly_{m-1} x^{m-1})
    for (i, d) in digits.iter_mut().enumerate() {
        *d = f.sub(*d, f.mul(carry, poly[i]));
    }
}

impl FiniteField for ExtensionField {
    type Elem = ExtElement;

    fn characteristic(&self) -> u32 {
        self.p()
    }

    fn size(&self) -> u64 {
        self.size as u64
    }

    fn zero(&self) -> ExtElement {
        ExtElement::ZERO
    }

    fn one(&self) -> ExtElement {
        ExtElement::ONE
    }

    fn add(&self, a: ExtElement, b: ExtElement) -> ExtElement {
        let p = self.p();
        if p == 2 {
            return ExtElement(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut place = 1;
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        ExtElement(out)
    }

    fn neg(&self, a: ExtElement) -> ExtElement {
        let p = self.p();
        if p == 2 {
            return a;
        }
        let mut x = a.0;
        let mut out = 0;
        let mut place = 1;
        while x > 0 {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        ExtElement(out)
    }

    fn mul(&self, a: ExtElement, b: ExtElement) -> ExtElement {
        if a.0 == 0 || b.0 == 0 {
            return ExtElement::ZERO;
        }
        let k = self.log[a.0 as usize] + self.log[b.0 as usize];
        ExtElement(self.exp[k as usize])
    }

    fn inv(&self, a: ExtElement) -> Option<ExtElement> {
        if a.0 == 0 {
            return None;
        }
        let n = self.group_order() as u32;
        let k = (n - self.log[a.0 as usize]) % n;
        Some(ExtElement(self.exp[k as usize]))
    }

    fn pow(&self, a: ExtElement, e: u64) -> ExtElement {
        if e == 0 {
            return ExtElement::ONE;
        }
        match self.log(a) {
            None => ExtElement::ZERO,
            Some(k) => self.alpha_pow(k as u64 * (e % self.group_order())),
        }
    }

    fn from_ground(&self, v: u32) -> ExtElement {
        ExtElement(v % self.p())
    }

    fn to_ground(&self, a: ExtElement) -> Option<u32> {
        (a.0 < self.p()).then_some(a.0)
    }

    fn index(&self, a: ExtElement) -> u32 {
        a.0
    }

    fn from_index(&self, i: u32) -> Option<ExtElement> {
        (i < self.size).then_some(ExtElement(i))
    }
}

pub(crate) fn superscript(n: u64) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .bytes()
        .map(|b| DIGITS[(b - b'0') as usize])
        .collect()
}

/// Parses `α³`, `a3`, `α^3` or `0` style labels back to an exponent
/// (`None` means the zero element). `symbol` is the base letter's spelling
/// as accepted (e.g. `["α", "a"]`).
pub(crate) fn parse_power_label(label: &str, bases: &[&str]) -> Option<Option<u64>> {
    let label = label.trim();
    if label == "0" {
        return Some(None);
    }
    let rest = bases.iter().find_map(|b| label.strip_prefix(b))?;
    let rest = rest.strip_prefix('^').unwrap_or(rest);
    if rest.is_empty() {
        return Some(Some(1));
    }
    let digits: String = rest
        .chars()
        .map(|c| match c {
            '⁰' => Some('0'),
            '¹' => Some('1'),
            '²' => Some('2'),
            '³' => Some('3'),
            '⁴' => Some('4'),
            '⁵' => Some('5'),
            '⁶' => Some('6'),
            '⁷' => Some('7'),
            '⁸' => Some('8'),
            '⁹' => Some('9'),
            c if c.is_ascii_digit() => Some(c),
            _ => None,
        })
        .collect::<Option<String>>()?;
    digits.parse().ok().map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf16() -> ExtensionField {
        ExtensionField::with_default_poly(2, 4).unwrap()
    }

    #[test]
    fn gf16_alpha_has_order_15() {
        let f = gf16();
        assert_eq!(f.group_order(), 15);
        assert_eq!(f.element_order(f.alpha()).unwrap(), 15);
        assert_eq!(f.order_of(f.alpha()).unwrap(), 15);
    }

    #[test]
    fn alpha4_is_alpha_plus_one() {
        let f = gf16();
        let a4 = f.arith(f.alpha(), f.alpha(), ArithOp::Pow(4)).unwrap();
        assert_eq!(a4, f.from_coeffs(&[1, 1, 0, 0]).unwrap());
        assert_eq!(f.vector_label(a4), "0011");
    }

    #[test]
    fn alpha15_by_repeated_multiplication() {
        let f = gf16();
        let mut x = ExtElement::ONE;
        for _ in 0..15 {
            x = f.arith(x, f.alpha(), ArithOp::Mul).unwrap();
        }
        assert_eq!(x, ExtElement::ONE);
    }

    #[test]
    fn alpha_times_alpha14() {
        let f = gf16();
        let a14 = f.alpha_pow(14);
        assert_eq!(f.arith(f.alpha(), a14, ArithOp::Mul).unwrap(), ExtElement::ONE);
        assert_eq!(f.arith(f.alpha(), ExtElement::ONE, ArithOp::Inv).unwrap(), a14);
    }

    #[test]
    fn prime_field_degenerate_case() {
        let f = ExtensionField::new(3, 1, &[1, 1]).unwrap();
        assert_eq!(f.alpha(), ExtElement(2));
        assert_eq!(f.element_order(f.alpha()).unwrap(), 2);
    }

    #[test]
    fn reducible_polynomial_is_rejected() {
        let err = ExtensionField::new(2, 4, &[1, 0, 1, 0, 1]).unwrap_err();
        assert!(matches!(err, Error::NonPrimitivePolynomial { expected: 15, .. }));
        // irreducible but not primitive: x^4 + x^3 + x^2 + x + 1, ord(x) = 5
        let err = ExtensionField::new(2, 4, &[1, 1, 1, 1, 1]).unwrap_err();
        assert_eq!(err, Error::NonPrimitivePolynomial { order: 5, expected: 15 });
    }

    #[test]
    fn construction_errors() {
        assert_eq!(ExtensionField::new(4, 2, &[1, 1, 1]).unwrap_err(), Error::NonPrimeModulus(4));
        assert!(matches!(
            ExtensionField::new(2, 4, &[1, 1, 0, 0, 0]),
            Err(Error::InvalidPolynomial(_))
        ));
        assert!(matches!(ExtensionField::new(2, 3, &[1, 1, 1]), Err(Error::InvalidPolynomial(_))));
        assert!(matches!(ExtensionField::new(3, 1, &[5, 1]), Err(Error::InvalidPolynomial(_))));
    }

    #[test]
    fn element_order_examples() {
        let f = gf16();
        assert_eq!(f.element_order(ExtElement::ONE).unwrap(), 1);
        assert_eq!(f.element_order(f.alpha_pow(5)).unwrap(), 3);
        assert_eq!(f.order_of(f.alpha_pow(5)).unwrap(), 3);
        assert_eq!(f.element_order(ExtElement::ZERO), Err(Error::ZeroElement));
    }

    #[test]
    fn arith_errors() {
        let f = gf16();
        assert_eq!(
            f.arith(f.alpha(), ExtElement::ZERO, ArithOp::Div),
            Err(Error::DivisionByZero)
        );
        assert_eq!(f.arith(ExtElement(16), f.alpha(), ArithOp::Add), Err(Error::FieldMismatch));
    }

    #[test]
    fn odd_characteristic_add_and_neg() {
        // GF(9) = GF(3)[x]/(x^2 + 2x + 2)
        let f = ExtensionField::new(3, 2, &[2, 2, 1]).unwrap();
        assert_eq!(f.group_order(), 8);
        for a in f.elements() {
            assert_eq!(f.add(a, f.neg(a)), ExtElement::ZERO);
            assert_eq!(f.sub(a, a), ExtElement::ZERO);
        }
        assert_eq!(f.to_ground(ExtElement(2)), Some(2));
        assert_eq!(f.to_ground(ExtElement(3)), None);
    }

    #[test]
    fn labels_round_trip() {
        let f = gf16();
        assert_eq!(f.power_label(f.alpha_pow(3)), "α³");
        assert_eq!(f.power_label(ExtElement::ZERO), "0");
        assert_eq!(parse_power_label("α¹²", &["α", "a"]), Some(Some(12)));
        assert_eq!(parse_power_label("a^3", &["α", "a"]), Some(Some(3)));
        assert_eq!(parse_power_label("α", &["α", "a"]), Some(Some(1)));
        assert_eq!(parse_power_label("0", &["α"]), Some(None));
        assert_eq!(parse_power_label("b2", &["α"]), None);
    }
}
