//! Finite-field Fourier (FFFT) and Hartley (FFHT) transforms.
//!
//! Both are naive O(N²) kernel sums over exact field arithmetic. The FFFT
//! of length N uses an element α of order N in GF(p^m):
//! `V_k = Σ_i v_i α^{ik}`. The FFHT uses an element ζ of order N in GI(q)
//! and the kernel `cas(i) = cos(i) + sin(i)` with
//! `cos(i) = (ζ^i + ζ^{-i}) / 2` and `sin(i) = (ζ^i - ζ^{-i}) / 2j`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{ExtElement, ExtensionField, FiniteField};
use crate::gaussian::{GaussianField, GaussianInt};

/// A length-N invertible transform over a finite field.
#[allow(clippy::len_without_is_empty)]
pub trait GaloisTransform: Send + Sync {
    type Field: FiniteField;

    fn field(&self) -> &Self::Field;

    /// Block length N.
    fn len(&self) -> usize;

    /// Transform of an arbitrary field-valued vector of length N.
    fn forward(&self, v: &[<Self::Field as FiniteField>::Elem]) -> Result<Vec<<Self::Field as FiniteField>::Elem>>;

    fn inverse(&self, spectrum: &[<Self::Field as FiniteField>::Elem]) -> Result<Vec<<Self::Field as FiniteField>::Elem>>;

    /// Transform of a ground-field signal given as values `0..p`.
    fn forward_ground(&self, v: &[u32]) -> Result<Vec<<Self::Field as FiniteField>::Elem>> {
        let f = self.field();
        let p = f.characteristic();
        if let Some(&bad) = v.iter().find(|&&x| x >= p) {
            return Err(Error::NotGroundElement(bad));
        }
        let embedded: Vec<_> = v.iter().map(|&x| f.from_ground(x)).collect();
        self.forward(&embedded)
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

/// `N^{-1}` in the ground field, embedded.
fn inverse_length<F: FiniteField>(f: &F, n: usize) -> Result<F::Elem> {
    let p = f.characteristic();
    let r = (n % p as usize) as u32;
    let r = f.from_ground(r);
    f.inv(r).ok_or(Error::NonInvertibleLength { n, p })
}

/// FFFT over GF(p^m).
#[derive(Debug, Clone)]
pub struct FourierTransform {
    field: Arc<ExtensionField>,
    kernel: ExtElement,
    /// `kernel^j` for `j` in `0..n`.
    powers: Vec<ExtElement>,
    n_inv: ExtElement,
}

impl FourierTransform {
    /// Length-`n` transform with kernel `α^{(p^m - 1)/n}`.
    pub fn new(field: Arc<ExtensionField>, n: usize) -> Result<Self> {
        let group = field.group_order();
        if n == 0 || !group.is_multiple_of(n as u64) {
            return Err(Error::LengthNotDivisor { n, group });
        }
        let kernel = field.alpha_pow(group / n as u64);
        Self::with_kernel(field, kernel)
    }

    /// Transform whose length is the multiplicative order of `kernel`.
    pub fn with_kernel(field: Arc<ExtensionField>, kernel: ExtElement) -> Result<Self> {
        let n = field.element_order(kernel)? as usize;
        let powers = (0..n as u64).map(|j| field.pow(kernel, j)).collect();
        let n_inv = inverse_length(field.as_ref(), n)?;
        Ok(Self { field, kernel, powers, n_inv })
    }

    pub fn kernel(&self) -> ExtElement {
        self.kernel
    }

    pub fn field_arc(&self) -> &Arc<ExtensionField> {
        &self.field
    }
}

impl GaloisTransform for FourierTransform {
    type Field = ExtensionField;

    fn field(&self) -> &ExtensionField {
        &self.field
    }

    fn len(&self) -> usize {
        self.powers.len()
    }

    fn forward(&self, v: &[ExtElement]) -> Result<Vec<ExtElement>> {
        let n = self.len();
        check_len(n, v.len())?;
        let f = self.field.as_ref();
        Ok((0..n)
            .map(|k| {
                v.iter().enumerate().fold(ExtElement::ZERO, |acc, (i, &x)| {
                    f.add(acc, f.mul(x, self.powers[i * k % n]))
                })
            })
            .collect())
    }

    fn inverse(&self, spectrum: &[ExtElement]) -> Result<Vec<ExtElement>> {
        let n = self.len();
        check_len(n, spectrum.len())?;
        let f = self.field.as_ref();
        Ok((0..n)
            .map(|i| {
                let s = spectrum.iter().enumerate().fold(ExtElement::ZERO, |acc, (k, &x)| {
                    f.add(acc, f.mul(x, self.powers[(n - i * k % n) % n]))
                });
                f.mul(self.n_inv, s)
            })
            .collect())
    }
}

/// The FFHT kernel: ζ and its cas table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CasKernel {
    zeta: GaussianInt,
    cas: Vec<GaussianInt>,
}

impl CasKernel {
    pub fn new(field: &GaussianField, zeta: GaussianInt) -> Result<Self> {
        let n = field.try_order(zeta)?;
        let two_inv = field.inv(field.from_ground(2)).ok_or(Error::EvenCharacteristic)?;
        let two_j_inv = field
            .inv(field.mul(field.from_ground(2), GaussianInt::J))
            .ok_or(Error::EvenCharacteristic)?;
        let cas = (0..n)
            .map(|i| {
                let fwd = field.pow(zeta, i);
                let back = field.pow(zeta, (n - i) % n);
                let cos = field.mul(field.add(fwd, back), two_inv);
                let sin = field.mul(field.sub(fwd, back), two_j_inv);
                field.add(cos, sin)
            })
            .collect();
        Ok(Self { zeta, cas })
    }

    pub fn zeta(&self) -> GaussianInt {
        self.zeta
    }

    pub fn len(&self) -> usize {
        self.cas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cas.is_empty()
    }

    /// `cas(i)`, periodic in N.
    pub fn cas(&self, i: usize) -> GaussianInt {
        self.cas[i % self.cas.len()]
    }

    /// Row-major N×N matrix `[cas(ik)]`.
    pub fn matrix(&self) -> Vec<GaussianInt> {
        let n = self.len();
        (0..n * n).map(|idx| self.cas((idx / n) * (idx % n))).collect()
    }
}

#[derive(Debug, Clone)]
enum HartleyInverse {
    /// `(1/N) · cas-transform`, verified at construction.
    SelfInverse(GaussianInt),
    Matrix(Vec<GaussianInt>),
}

/// FFHT over GI(q).
#[derive(Debug, Clone)]
pub struct HartleyTransform {
    field: Arc<GaussianField>,
    kernel: CasKernel,
    inverse: HartleyInverse,
}

impl HartleyTransform {
    /// Length-`n` transform with `ζ = ξ^{(q² - 1)/n}` for the field generator ξ.
    pub fn new(field: Arc<GaussianField>, n: usize) -> Result<Self> {
        let group = field.group_order();
        if n == 0 || !group.is_multiple_of(n as u64) {
            return Err(Error::LengthNotDivisor { n, group });
        }
        let zeta = field.generator_pow(group / n as u64);
        Self::with_kernel(field, zeta)
    }

    pub fn with_kernel(field: Arc<GaussianField>, zeta: GaussianInt) -> Result<Self> {
        let kernel = CasKernel::new(&field, zeta)?;
        let n = kernel.len();
        let m = kernel.matrix();
        let f = field.as_ref();

        let squared = mat_mul(f, &m, &m, n);
        let n_ground = f.from_ground((n % f.q() as usize) as u32);
        let self_inverse = squared.iter().enumerate().all(|(idx, &x)| {
            let expect = if idx / n == idx % n { n_ground } else { GaussianInt::ZERO };
            x == expect
        });
        let inverse = match (self_inverse, inverse_length(f, n)) {
            (true, Ok(n_inv)) => HartleyInverse::SelfInverse(n_inv),
            _ => HartleyInverse::Matrix(invert_matrix(f, &m, n).ok_or(Error::SingularKernelMatrix)?),
        };
        Ok(Self { field, kernel, inverse })
    }

    pub fn kernel(&self) -> &CasKernel {
        &self.kernel
    }

    pub fn field_arc(&self) -> &Arc<GaussianField> {
        &self.field
    }

    /// True when the inverse is `(1/N)` times the forward transform.
    pub fn is_self_inverse(&self) -> bool {
        matches!(self.inverse, HartleyInverse::SelfInverse(_))
    }
}

impl GaloisTransform for HartleyTransform {
    type Field = GaussianField;

    fn field(&self) -> &GaussianField {
        &self.field
    }

    fn len(&self) -> usize {
        self.kernel.len()
    }

    fn forward(&self, v: &[GaussianInt]) -> Result<Vec<GaussianInt>> {
        let n = self.len();
        check_len(n, v.len())?;
        let f = self.field.as_ref();
        Ok((0..n)
            .map(|k| {
                v.iter().enumerate().fold(GaussianInt::ZERO, |acc, (i, &x)| {
                    f.add(acc, f.mul(x, self.kernel.cas(i * k)))
                })
            })
            .collect())
    }

    fn inverse(&self, spectrum: &[GaussianInt]) -> Result<Vec<GaussianInt>> {
        let n = self.len();
        check_len(n, spectrum.len())?;
        let f = self.field.as_ref();
        match &self.inverse {
            HartleyInverse::SelfInverse(n_inv) => {
                let v = self.forward(spectrum)?;
                Ok(v.into_iter().map(|x| f.mul(*n_inv, x)).collect())
            }
            HartleyInverse::Matrix(inv) => Ok((0..n)
                .map(|i| {
                    (0..n).fold(GaussianInt::ZERO, |acc, k| f.add(acc, f.mul(inv[i * n + k], spectrum[k])))
                })
                .collect()),
        }
    }
}

fn mat_mul<F: FiniteField>(f: &F, a: &[F::Elem], b: &[F::Elem], n: usize) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).fold(f.zero(), |acc, k| f.add(acc, f.mul(a[i * n + k], b[k * n + j])));
        }
    }
    out
}

/// Gauss-Jordan inverse of a row-major N×N matrix; `None` when singular.
pub(crate) fn invert_matrix<F: FiniteField>(f: &F, m: &[F::Elem], n: usize) -> Option<Vec<F::Elem>> {
    let mut a = m.to_vec();
    let mut inv: Vec<F::Elem> =
        (0..n * n).map(|idx| if idx / n == idx % n { f.one() } else { f.zero() }).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r * n + col] != f.zero())?;
        if pivot != col {
            for j in 0..n {
                a.swap(pivot * n + j, col * n + j);
                inv.swap(pivot * n + j, col * n + j);
            }
        }
        let scale = f.inv(a[col * n + col])?;
        for j in 0..n {
            a[col * n + j] = f.mul(a[col * n + j], scale);
            inv[col * n + j] = f.mul(inv[col * n + j], scale);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r * n + col];
            if factor == f.zero() {
                continue;
            }
            for j in 0..n {
                a[r * n + j] = f.sub(a[r * n + j], f.mul(factor, a[col * n + j]));
                inv[r * n + j] = f.sub(inv[r * n + j], f.mul(factor, inv[col * n + j]));
            }
        }
    }
    Some(inv)
}

/// First index `k` where `spectrum[c·k mod N] != spectrum[k]^p`, if any.
pub fn conjugacy_violation<F: FiniteField>(f: &F, spectrum: &[F::Elem], multiplier: usize) -> Option<usize> {
    let n = spectrum.len();
    (0..n).find(|&k| spectrum[multiplier * k % n] != f.frobenius(spectrum[k]))
}

/// Finds the index multiplier `c` for which every ground-field spectrum
/// satisfies `S_{c·k mod N} = S_k^p`, trying `p` first and then `-p`.
///
/// The transforms are GF(p)-linear and the Frobenius map is additive and
/// fixes GF(p), so checking the spectra of the N unit impulses is exhaustive.
pub fn conjugacy_multiplier<T: GaloisTransform>(t: &T) -> Option<usize> {
    let n = t.len();
    let p = t.field().characteristic() as usize % n;
    let basis: Vec<_> = (0..n)
        .map(|i| {
            let mut delta = vec![0u32; n];
            delta[i] = 1;
            t.forward_ground(&delta).expect("impulse is a valid ground signal")
        })
        .collect();
    [p, (n - p) % n]
        .into_iter()
        .find(|&c| basis.iter().all(|s| conjugacy_violation(t.field(), s, c).is_none()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf16_fft() -> FourierTransform {
        FourierTransform::new(Arc::new(ExtensionField::with_default_poly(2, 4).unwrap()), 15).unwrap()
    }

    fn gi3_fht() -> HartleyTransform {
        HartleyTransform::new(Arc::new(GaussianField::new(3).unwrap()), 8).unwrap()
    }

    #[test]
    fn all_ones_has_impulse_spectrum() {
        let t = gf16_fft();
        let v = t.forward_ground(&[1; 15]).unwrap();
        assert_eq!(v[0], ExtElement::ONE);
        assert!(v[1..].iter().all(|&x| x == ExtElement::ZERO));
        assert_eq!(t.inverse(&v).unwrap(), vec![ExtElement::ONE; 15]);
    }

    #[test]
    fn impulse_has_constant_spectrum() {
        let t = gf16_fft();
        let mut delta = [0u32; 15];
        delta[0] = 1;
        assert_eq!(t.forward_ground(&delta).unwrap(), vec![ExtElement::ONE; 15]);
        assert_eq!(t.forward_ground(&[0; 15]).unwrap(), vec![ExtElement::ZERO; 15]);
        assert_eq!(t.inverse(&[ExtElement::ZERO; 15]).unwrap(), vec![ExtElement::ZERO; 15]);
    }

    #[test]
    fn fourier_errors() {
        let t = gf16_fft();
        assert_eq!(
            t.forward_ground(&[0; 14]).unwrap_err(),
            Error::LengthMismatch { expected: 15, got: 14 }
        );
        assert_eq!(t.forward_ground(&[2; 15]).unwrap_err(), Error::NotGroundElement(2));
        let f = Arc::new(ExtensionField::with_default_poly(2, 4).unwrap());
        assert!(matches!(FourierTransform::new(f, 7), Err(Error::LengthNotDivisor { .. })));
    }

    #[test]
    fn shorter_fourier_kernel() {
        let f = Arc::new(ExtensionField::with_default_poly(2, 4).unwrap());
        let t = FourierTransform::new(f.clone(), 5).unwrap();
        assert_eq!(t.kernel(), f.alpha_pow(3));
        let v = [1, 0, 1, 1, 0];
        let s = t.forward_ground(&v).unwrap();
        let back: Vec<_> = t.inverse(&s).unwrap().iter().map(|&x| f.to_ground(x).unwrap()).collect();
        assert_eq!(back, v);
    }

    #[test]
    fn cas_table_for_gi3() {
        let t = gi3_fht();
        let k = t.kernel();
        assert_eq!(k.zeta(), GaussianInt::new(1, 1));
        assert_eq!(k.cas(0), GaussianInt::ONE);
        assert_eq!(k.cas(1), GaussianInt::ZERO);
        assert_eq!(k.cas(9), k.cas(1));
    }

    #[test]
    fn hartley_impulse() {
        let t = gi3_fht();
        let mut delta = [0u32; 8];
        delta[0] = 1;
        assert_eq!(t.forward_ground(&delta).unwrap(), vec![GaussianInt::ONE; 8]);
        assert_eq!(t.forward_ground(&[0; 8]).unwrap(), vec![GaussianInt::ZERO; 8]);
        assert_eq!(t.inverse(&[GaussianInt::ZERO; 8]).unwrap(), vec![GaussianInt::ZERO; 8]);
    }

    #[test]
    fn fourier_conjugacy_uses_p() {
        assert_eq!(conjugacy_multiplier(&gf16_fft()), Some(2));
    }

    #[test]
    fn hartley_conjugacy_uses_minus_p() {
        // j^p = -j in GI(3), so cas(i)^p = cas(-p·i).
        assert_eq!(conjugacy_multiplier(&gi3_fht()), Some(5));
    }
}
