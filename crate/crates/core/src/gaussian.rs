//! Gaussian integers GI(q): pairs `a + jb` over GF(q) with `j² = -1`.
//!
//! The structure is a field exactly when -1 is a quadratic non-residue in
//! GF(q); construction checks that by enumerating the squares.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{is_prime, superscript, FiniteField, PrimeField, MAX_FIELD_SIZE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianInt {
    pub re: u32,
    pub im: u32,
}

impl GaussianInt {
    pub const ZERO: Self = GaussianInt { re: 0, im: 0 };
    pub const ONE: Self = GaussianInt { re: 1, im: 0 };
    pub const J: Self = GaussianInt { re: 0, im: 1 };

    pub const fn new(re: u32, im: u32) -> Self {
        Self { re, im }
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, 1) => write!(f, "j"),
            (0, im) => write!(f, "{im}j"),
            (re, 1) => write!(f, "{re} + j"),
            (re, im) => write!(f, "{re} + {im}j"),
        }
    }
}

/// GI(q) over a prime q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianField {
    base: PrimeField,
    /// Discrete-log tables, filled once a generator is known.
    generator: GaussianInt,
    exp: Vec<GaussianInt>,
    log: Vec<u32>,
}

impl GaussianField {
    /// Validates and builds GI(q).
    pub fn new(q: u32) -> Result<Self> {
        if q.is_multiple_of(2) && q > 0 && q.is_power_of_two() {
            return Err(Error::EvenCharacteristic);
        }
        if !is_prime(q as u64) {
            if is_odd_prime_power(q) {
                return Err(Error::UnsupportedPrimePower(q));
            }
            return Err(Error::NonPrimeModulus(q as u64));
        }
        if (q as u64) * (q as u64) > MAX_FIELD_SIZE {
            return Err(Error::FieldTooLarge(q as u64 * q as u64));
        }
        let base = PrimeField::new(q)?;
        let minus_one = q - 1;
        if (0..q).any(|x| base.mul(x, x) == minus_one) {
            return Err(Error::MinusOneIsResidue(q));
        }
        let mut field = Self { base, generator: GaussianInt::ONE, exp: Vec::new(), log: Vec::new() };
        let g = field.find_generator();
        field.build_tables(g);
        Ok(field)
    }

    pub fn q(&self) -> u32 {
        self.base.modulus()
    }

    pub fn base(&self) -> PrimeField {
        self.base
    }

    /// `q² - 1`.
    pub fn group_order(&self) -> u64 {
        let q = self.q() as u64;
        q * q - 1
    }

    pub fn element(&self, re: u32, im: u32) -> Result<GaussianInt> {
        let x = GaussianInt::new(re, im);
        if self.contains(x) {
            Ok(x)
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn contains(&self, x: GaussianInt) -> bool {
        x.re < self.q() && x.im < self.q()
    }

    pub fn conj(&self, x: GaussianInt) -> GaussianInt {
        GaussianInt::new(x.re, self.base.neg(x.im))
    }

    /// `re² + im²`, nonzero for nonzero `x` because -1 is a non-residue.
    pub fn norm(&self, x: GaussianInt) -> u32 {
        let f = self.base;
        f.add(f.mul(x.re, x.re), f.mul(x.im, x.im))
    }

    pub fn try_add(&self, x: GaussianInt, y: GaussianInt) -> Result<GaussianInt> {
        self.check(&[x, y])?;
        Ok(self.add(x, y))
    }

    pub fn try_mul(&self, x: GaussianInt, y: GaussianInt) -> Result<GaussianInt> {
        self.check(&[x, y])?;
        Ok(self.mul(x, y))
    }

    /// Inverse as conjugate over norm.
    pub fn try_inv(&self, x: GaussianInt) -> Result<GaussianInt> {
        self.check(&[x])?;
        self.inv(x).ok_or(Error::DivisionByZero)
    }

    pub fn try_order(&self, x: GaussianInt) -> Result<u64> {
        self.check(&[x])?;
        self.order_of(x)
    }

    fn check(&self, xs: &[GaussianInt]) -> Result<()> {
        if xs.iter().all(|&x| self.contains(x)) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// First element, in index order, whose order is `q² - 1`.
    pub fn find_generator(&self) -> GaussianInt {
        let n = self.group_order();
        (1..self.size() as u32)
            .map(|i| self.from_index(i).expect("in range"))
            .find(|&x| self.order_of(x).expect("nonzero") == n)
            .expect("the multiplicative group of a finite field is cyclic")
    }

    pub fn generator(&self) -> GaussianInt {
        self.generator
    }

    fn build_tables(&mut self, g: GaussianInt) {
        let n = self.group_order() as usize;
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![0u32; self.size() as usize];
        let mut x = GaussianInt::ONE;
        for k in 0..n {
            exp.push(x);
            log[self.index(x) as usize] = k as u32;
            x = self.mul(x, g);
        }
        self.generator = g;
        self.exp = exp;
        self.log = log;
    }

    /// `ξ^k` for the table generator ξ.
    pub fn generator_pow(&self, k: u64) -> GaussianInt {
        self.exp[(k % self.group_order()) as usize]
    }

    pub fn log(&self, x: GaussianInt) -> Option<u32> {
        (x != GaussianInt::ZERO).then(|| self.log[self.index(x) as usize])
    }

    /// `0` or `ξ^k` in superscript power notation.
    pub fn power_label(&self, x: GaussianInt) -> String {
        match self.log(x) {
            None => "0".to_owned(),
            Some(k) => format!("ξ{}", superscript(k as u64)),
        }
    }

    /// q-ary code `re im` as in the symbol tables (e.g. `12` for 1 + 2j).
    pub fn digit_label(&self, x: GaussianInt) -> String {
        format!("{}{}", x.re, x.im)
    }
}

fn is_odd_prime_power(q: u32) -> bool {
    if q < 3 || q.is_multiple_of(2) {
        return false;
    }
    let p = (3..=q).find(|d| q.is_multiple_of(*d)).expect("q >= 3");
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
    }
    r == 1
}

impl FiniteField for GaussianField {
    type Elem = GaussianInt;

    fn characteristic(&self) -> u32 {
        self.q()
    }

    fn size(&self) -> u64 {
        self.group_order() + 1
    }

    fn zero(&self) -> GaussianInt {
        GaussianInt::ZERO
    }

    fn one(&self) -> GaussianInt {
        GaussianInt::ONE
    }

    fn add(&self, x: GaussianInt, y: GaussianInt) -> GaussianInt {
        GaussianInt::new(self.base.add(x.re, y.re), self.base.add(x.im, y.im))
    }

    fn neg(&self, x: GaussianInt) -> GaussianInt {
        GaussianInt::new(self.base.neg(x.re), self.base.neg(x.im))
    }

    fn mul(&self, x: GaussianInt, y: GaussianInt) -> GaussianInt {
        let f = self.base;
        GaussianInt::new(
            f.sub(f.mul(x.re, y.re), f.mul(x.im, y.im)),
            f.add(f.mul(x.re, y.im), f.mul(y.re, x.im)),
        )
    }

    fn inv(&self, x: GaussianInt) -> Option<GaussianInt> {
        let n_inv = self.base.inv(self.norm(x))?;
        let c = self.conj(x);
        Some(GaussianInt::new(self.base.mul(c.re, n_inv), self.base.mul(c.im, n_inv)))
    }

    fn from_ground(&self, v: u32) -> GaussianInt {
        GaussianInt::new(v % self.q(), 0)
    }

    fn to_ground(&self, x: GaussianInt) -> Option<u32> {
        (x.im == 0).then_some(x.re)
    }

    fn index(&self, x: GaussianInt) -> u32 {
        x.re + self.q() * x.im
    }

    fn from_index(&self, i: u32) -> Option<GaussianInt> {
        let q = self.q();
        (i < q * q).then(|| GaussianInt::new(i % q, i / q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gi3() -> GaussianField {
        GaussianField::new(3).unwrap()
    }

    const fn g(re: u32, im: u32) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    #[test]
    fn addition_examples() {
        let f = gi3();
        assert_eq!(f.try_add(g(1, 1), g(2, 2)).unwrap(), GaussianInt::ZERO);
        assert_eq!(f.try_add(g(1, 2), g(2, 1)).unwrap(), GaussianInt::ZERO);
        assert_eq!(f.try_add(g(2, 1), GaussianInt::ZERO).unwrap(), g(2, 1));
    }

    #[test]
    fn multiplication_examples() {
        let f = gi3();
        assert_eq!(f.try_mul(g(1, 1), g(1, 1)).unwrap(), g(0, 2));
        assert_eq!(f.try_mul(g(0, 2), g(0, 2)).unwrap(), g(2, 0));
        assert_eq!(f.try_mul(g(1, 2), GaussianInt::ONE).unwrap(), g(1, 2));
    }

    #[test]
    fn inverse_examples() {
        let f = gi3();
        assert_eq!(f.try_inv(g(1, 1)).unwrap(), g(2, 1));
        assert_eq!(f.try_inv(GaussianInt::ONE).unwrap(), GaussianInt::ONE);
        assert_eq!(f.try_inv(g(2, 0)).unwrap(), g(2, 0));
        assert_eq!(f.try_inv(GaussianInt::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn validity() {
        assert!(GaussianField::new(3).is_ok());
        assert!(GaussianField::new(7).is_ok());
        assert_eq!(GaussianField::new(5).unwrap_err(), Error::MinusOneIsResidue(5));
        assert_eq!(GaussianField::new(2).unwrap_err(), Error::EvenCharacteristic);
        assert_eq!(GaussianField::new(8).unwrap_err(), Error::EvenCharacteristic);
        assert_eq!(GaussianField::new(9).unwrap_err(), Error::UnsupportedPrimePower(9));
        assert_eq!(GaussianField::new(15).unwrap_err(), Error::NonPrimeModulus(15));
    }

    #[test]
    fn orders_and_generator() {
        let f = gi3();
        assert_eq!(f.try_order(g(1, 1)).unwrap(), 8);
        assert_eq!(f.try_order(GaussianInt::ONE).unwrap(), 1);
        assert_eq!(f.try_order(GaussianInt::ZERO), Err(Error::ZeroElement));
        assert_eq!(f.find_generator(), g(1, 1));
        assert_eq!(f.generator(), g(1, 1));
    }

    #[test]
    fn display_and_labels() {
        let f = gi3();
        assert_eq!(g(1, 2).to_string(), "1 + 2j");
        assert_eq!(g(0, 1).to_string(), "j");
        assert_eq!(g(2, 0).to_string(), "2");
        assert_eq!(g(2, 1).to_string(), "2 + j");
        assert_eq!(f.power_label(g(0, 1)), "ξ⁶");
        assert_eq!(f.digit_label(g(1, 2)), "12");
    }
}
