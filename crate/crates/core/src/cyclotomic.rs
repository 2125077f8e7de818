//! Cyclotomic cosets, spectrum compression, the compactness factor and its
//! capacity bound, link-budget figures, and the valid-spectrum block code.

use std::collections::HashSet;
use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field::{gcd, ExtElement, ExtensionField, FiniteField};
use crate::transforms::{FourierTransform, GaloisTransform};

/// Partition of `0..N` into orbits of `k ↦ c·k mod N`.
///
/// For the FFFT `c = p`; other transforms may use a different multiplier,
/// but the value rule along an orbit is always `S_{c·k} = S_k^p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetPartition {
    n: usize,
    characteristic: u32,
    multiplier: usize,
    /// Each orbit starts at its leader and follows `k ↦ c·k`; sorted by leader.
    cosets: Vec<Vec<usize>>,
}

impl CosetPartition {
    /// Cyclotomic cosets of `p` modulo `n`.
    pub fn new(n: usize, p: u32) -> Result<Self> {
        Self::with_multiplier(n, p, p as usize)
    }

    pub fn with_multiplier(n: usize, characteristic: u32, multiplier: usize) -> Result<Self> {
        if n == 0 || gcd(n as u64, multiplier as u64) != 1 {
            return Err(Error::NonCoprimeLength { n, p: multiplier as u32 });
        }
        let c = multiplier % n;
        let mut seen = vec![false; n];
        let mut cosets = Vec::new();
        for leader in 0..n {
            if seen[leader] {
                continue;
            }
            let mut orbit = vec![leader];
            seen[leader] = true;
            let mut k = c * leader % n;
            while k != leader {
                seen[k] = true;
                orbit.push(k);
                k = c * k % n;
            }
            cosets.push(orbit);
        }
        Ok(Self { n, characteristic, multiplier: c, cosets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn multiplier(&self) -> usize {
        self.multiplier
    }

    pub fn cosets(&self) -> &[Vec<usize>] {
        &self.cosets
    }

    pub fn leaders(&self) -> Vec<usize> {
        self.cosets.iter().map(|c| c[0]).collect()
    }

    /// Number of cosets ν.
    pub fn nu(&self) -> usize {
        self.cosets.len()
    }

    /// Compactness factor `N / ν`, exact.
    pub fn gamma_cc(&self) -> Ratio<u64> {
        Ratio::new(self.n as u64, self.nu() as u64)
    }

    /// Reads the leader values. `strict` additionally checks the conjugacy
    /// rule along every orbit.
    pub fn compress<F: FiniteField>(&self, f: &F, spectrum: &[F::Elem], strict: bool) -> Result<Vec<F::Elem>> {
        if spectrum.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: spectrum.len() });
        }
        if strict {
            for orbit in &self.cosets {
                for &k in orbit {
                    let next = self.multiplier * k % self.n;
                    if spectrum[next] != f.frobenius(spectrum[k]) {
                        return Err(Error::InvalidSpectrum(next));
                    }
                }
            }
        }
        Ok(self.cosets.iter().map(|c| spectrum[c[0]]).collect())
    }

    /// Regenerates a full spectrum from leader values by walking each orbit
    /// with `S_{c·k} = S_k^p`.
    pub fn expand<F: FiniteField>(&self, f: &F, leaders: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if leaders.len() != self.nu() {
            return Err(Error::LengthMismatch { expected: self.nu(), got: leaders.len() });
        }
        let mut out = vec![f.zero(); self.n];
        for (orbit, &lead) in self.cosets.iter().zip(leaders) {
            let mut x = lead;
            for &k in orbit {
                out[k] = x;
                x = f.frobenius(x);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for CosetPartition {
    /// One `C<leader> = (a, b, ...)` line per coset, then ν and γ_cc.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for orbit in &self.cosets {
            let members: Vec<String> = orbit.iter().map(|k| k.to_string()).collect();
            writeln!(f, "C{} = ({})", orbit[0], members.join(", "))?;
        }
        writeln!(f, "nu = {}", self.nu())?;
        write!(f, "gamma_cc = {}/{} = {}", self.n, self.nu(), self.gamma_cc())
    }
}

/// Leader values plus the partition that regenerates the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedSpectrum<E> {
    pub leader_values: Vec<E>,
    pub partition: CosetPartition,
}

pub fn compress<F: FiniteField>(
    f: &F,
    spectrum: &[F::Elem],
    partition: &CosetPartition,
    strict: bool,
) -> Result<CompressedSpectrum<F::Elem>> {
    Ok(CompressedSpectrum {
        leader_values: partition.compress(f, spectrum, strict)?,
        partition: partition.clone(),
    })
}

pub fn expand<F: FiniteField>(f: &F, c: &CompressedSpectrum<F::Elem>) -> Result<Vec<F::Elem>> {
    c.partition.expand(f, &c.leader_values)
}

/// `log_p(1 + snr)`, the largest compactness factor the channel can carry.
pub fn shannon_bound(snr: f64, p: u32) -> Result<f64> {
    if snr.is_nan() || snr < 0.0 {
        return Err(Error::NegativeSnr(snr));
    }
    Ok((1.0 + snr).log2() / (p as f64).log2())
}

/// Smallest linear SNR at which `gamma` meets the bound: `p^gamma - 1`.
pub fn min_snr(gamma: Ratio<u64>, p: u32) -> f64 {
    (p as f64).powf(ratio_f64(gamma)) - 1.0
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub(crate) fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// `N log2(p) / 2T`.
    pub rate_bits_per_s: f64,
    /// `N / (2T γ_cc)`.
    pub bandwidth_hz: f64,
}

impl LinkBudget {
    /// Channel capacity `W log2(1 + snr)`.
    pub fn capacity(&self, snr: f64) -> f64 {
        self.bandwidth_hz * (1.0 + snr).log2()
    }
}

pub fn link_budget(n_users: usize, p: u32, symbol_duration: f64, gamma: Ratio<u64>) -> Result<LinkBudget> {
    if symbol_duration.is_nan() || symbol_duration <= 0.0 {
        return Err(Error::NonPositiveDuration(symbol_duration));
    }
    let half_baud = n_users as f64 / (2.0 * symbol_duration);
    Ok(LinkBudget {
        rate_bits_per_s: half_baud * (p as f64).log2(),
        bandwidth_hz: half_baud / ratio_f64(gamma),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub gamma_cc: Ratio<u64>,
    pub snr: f64,
    pub gamma_max: f64,
    pub satisfied: bool,
    pub min_snr: f64,
    pub min_snr_db: f64,
    pub rate_bits_per_s: f64,
    pub bandwidth_hz: f64,
}

/// Relative slack for the bound comparison at the exact boundary.
const BOUND_RTOL: f64 = 1e-12;

pub fn check_bound(
    gamma: Ratio<u64>,
    snr: f64,
    p: u32,
    n_users: usize,
    symbol_duration: f64,
) -> Result<BoundReport> {
    let gamma_max = shannon_bound(snr, p)?;
    let budget = link_budget(n_users, p, symbol_duration, gamma)?;
    let g = ratio_f64(gamma);
    let min = min_snr(gamma, p);
    Ok(BoundReport {
        gamma_cc: gamma,
        snr,
        gamma_max,
        satisfied: g <= gamma_max * (1.0 + BOUND_RTOL),
        min_snr: min,
        min_snr_db: to_db(min),
        rate_bits_per_s: budget.rate_bits_per_s,
        bandwidth_hz: budget.bandwidth_hz,
    })
}

/// Largest block length accepted for exhaustive enumeration.
pub const MAX_ENUMERATION_LEN: usize = 16;

/// All FFFT spectra of binary signals of length `n`, indexed by the input
/// bit pattern (bit `i` of the index is `v_i`).
pub fn enumerate_valid_spectra(field: &ExtensionField, n: usize) -> Result<Vec<Vec<ExtElement>>> {
    if field.p() != 2 {
        return Err(Error::NotBinary(field.p()));
    }
    if n > MAX_ENUMERATION_LEN {
        return Err(Error::EnumerationTooLarge(n));
    }
    let t = FourierTransform::new(std::sync::Arc::new(field.clone()), n)?;
    (0u32..1 << n)
        .map(|bits| {
            let v: Vec<u32> = (0..n).map(|i| bits >> i & 1).collect();
            t.forward_ground(&v)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralCodeReport {
    pub n: usize,
    pub size: usize,
    pub linear: bool,
    pub min_distance: usize,
    /// A nonzero codeword of minimum weight.
    pub witness: Vec<ExtElement>,
}

pub fn hamming_weight(word: &[ExtElement]) -> usize {
    word.iter().filter(|&&x| x != ExtElement::ZERO).count()
}

/// Size, GF(2)-linearity and minimum Hamming distance of an enumerated set.
///
/// Linearity is checked as closure under adding each generator spectrum
/// (the spectra of the unit impulses) together with a rank check: a set that
/// contains zero, is closed under the generators, and has `2^rank` elements
/// is exactly their span. The minimum distance of a linear code is then its
/// minimum nonzero weight.
pub fn spectral_code_analysis(field: &ExtensionField, spectra: &[Vec<ExtElement>]) -> SpectralCodeReport {
    let n = spectra.first().map_or(0, Vec::len);
    let set: HashSet<&[ExtElement]> = spectra.iter().map(Vec::as_slice).collect();
    let size = set.len();
    let zero = vec![ExtElement::ZERO; n];

    let generators: Vec<&Vec<ExtElement>> =
        (0..n).filter_map(|i| spectra.get(1 << i)).collect();
    let closed = set.contains(zero.as_slice())
        && generators.iter().all(|g| {
            spectra.iter().all(|s| {
                let sum: Vec<ExtElement> = s.iter().zip(g.iter()).map(|(&a, &b)| field.add(a, b)).collect();
                set.contains(sum.as_slice())
            })
        });
    let rank = binary_rank(field, &generators);
    let linear = closed && rank < usize::BITS as usize && size == 1 << rank;

    let witness = spectra
        .iter()
        .filter(|s| hamming_weight(s) > 0)
        .min_by_key(|s| hamming_weight(s))
        .cloned()
        .unwrap_or_default();
    SpectralCodeReport { n, size, linear, min_distance: hamming_weight(&witness), witness }
}

/// GF(2) rank of spectra flattened to their coefficient bits.
fn binary_rank(field: &ExtensionField, rows: &[&Vec<ExtElement>]) -> usize {
    let m = field.degree() as usize;
    let mut basis: Vec<u128> = Vec::new();
    for row in rows {
        let mut x = row.iter().fold(0u128, |acc, e| acc << m | e.0 as u128);
        for b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ExtensionField;
    use std::sync::Arc;

    #[test]
    fn cosets_of_2_mod_15() {
        let c = CosetPartition::new(15, 2).unwrap();
        assert_eq!(
            c.cosets(),
            &[vec![0], vec![1, 2, 4, 8], vec![3, 6, 12, 9], vec![5, 10], vec![7, 14, 13, 11]]
        );
        assert_eq!(c.nu(), 5);
        assert_eq!(c.leaders(), vec![0, 1, 3, 5, 7]);
        assert_eq!(c.gamma_cc(), Ratio::from_integer(3));
    }

    #[test]
    fn cosets_small_cases() {
        let c = CosetPartition::new(1, 7).unwrap();
        assert_eq!(c.cosets(), &[vec![0]]);
        assert_eq!(c.gamma_cc(), Ratio::from_integer(1));
        let c = CosetPartition::new(8, 3).unwrap();
        assert_eq!(c.cosets(), &[vec![0], vec![1, 3], vec![2, 6], vec![4], vec![5, 7]]);
        assert_eq!(c.gamma_cc(), Ratio::new(8, 5));
        assert_eq!(CosetPartition::new(15, 3).unwrap_err(), Error::NonCoprimeLength { n: 15, p: 3 });
    }

    #[test]
    fn display_format() {
        let c = CosetPartition::new(15, 2).unwrap();
        assert_eq!(
            c.to_string(),
            "C0 = (0)\nC1 = (1, 2, 4, 8)\nC3 = (3, 6, 12, 9)\nC5 = (5, 10)\nC7 = (7, 14, 13, 11)\nnu = 5\ngamma_cc = 15/5 = 3"
        );
        assert!(CosetPartition::new(8, 3).unwrap().to_string().ends_with("gamma_cc = 8/5 = 8/5"));
    }

    #[test]
    fn compress_reads_leaders() {
        let f = Arc::new(ExtensionField::with_default_poly(2, 4).unwrap());
        let t = FourierTransform::new(f.clone(), 15).unwrap();
        let part = CosetPartition::new(15, 2).unwrap();
        let v = [1, 0, 1, 1, 0, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0];
        let s = t.forward_ground(&v).unwrap();
        let c = compress(f.as_ref(), &s, &part, true).unwrap();
        assert_eq!(c.leader_values, vec![s[0], s[1], s[3], s[5], s[7]]);
        assert_eq!(expand(f.as_ref(), &c).unwrap(), s);
    }

    #[test]
    fn expand_all_ones_leaders() {
        let f = ExtensionField::with_default_poly(2, 4).unwrap();
        let part = CosetPartition::new(15, 2).unwrap();
        let mut leaders = vec![ExtElement::ZERO; 5];
        leaders[0] = ExtElement::ONE;
        let mut expect = vec![ExtElement::ZERO; 15];
        expect[0] = ExtElement::ONE;
        assert_eq!(part.expand(&f, &leaders).unwrap(), expect);
    }

    #[test]
    fn corrupted_leader_fills_its_coset() {
        let f = ExtensionField::with_default_poly(2, 4).unwrap();
        let part = CosetPartition::new(15, 2).unwrap();
        let mut leaders = vec![ExtElement::ZERO; 5];
        leaders[1] = f.alpha_pow(1);
        let full = part.expand(&f, &leaders).unwrap();
        assert_eq!(full[1], f.alpha_pow(1));
        assert_eq!(full[2], f.alpha_pow(2));
        assert_eq!(full[4], f.alpha_pow(4));
        assert_eq!(full[8], f.alpha_pow(8));
        let touched: Vec<usize> = (0..15).filter(|&k| full[k] != ExtElement::ZERO).collect();
        assert_eq!(touched, vec![1, 2, 4, 8]);
    }

    #[test]
    fn compress_errors() {
        let f = ExtensionField::with_default_poly(2, 4).unwrap();
        let part = CosetPartition::new(15, 2).unwrap();
        assert!(matches!(
            part.compress(&f, &[ExtElement::ZERO; 14], false),
            Err(Error::LengthMismatch { expected: 15, got: 14 })
        ));
        let mut bad = vec![ExtElement::ZERO; 15];
        bad[1] = f.alpha();
        assert_eq!(part.compress(&f, &bad, true).unwrap_err(), Error::InvalidSpectrum(2));
        assert!(part.compress(&f, &bad, false).is_ok());
        assert!(matches!(part.expand(&f, &[ExtElement::ZERO; 4]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn shannon_bound_examples() {
        assert_eq!(shannon_bound(7.0, 2).unwrap(), 3.0);
        assert_eq!(shannon_bound(0.0, 2).unwrap(), 0.0);
        assert_eq!(shannon_bound(-1.0, 2).unwrap_err(), Error::NegativeSnr(-1.0));
        assert_eq!(min_snr(Ratio::from_integer(3), 2), 7.0);
        assert!((to_db(7.0) - 8.45).abs() < 0.005);
    }

    #[test]
    fn bound_report_boundary() {
        let g = Ratio::from_integer(3);
        assert!(check_bound(g, 7.0, 2, 15, 1.0).unwrap().satisfied);
        assert!(!check_bound(g, 6.99, 2, 15, 1.0).unwrap().satisfied);
    }

    #[test]
    fn link_budget_examples() {
        let b = link_budget(15, 2, 1.0, Ratio::from_integer(3)).unwrap();
        assert_eq!(b.rate_bits_per_s, 7.5);
        assert_eq!(b.bandwidth_hz, 2.5);
        assert!(b.rate_bits_per_s <= b.capacity(7.0));
        assert!(b.rate_bits_per_s > b.capacity(6.9));
        let b1 = link_budget(15, 2, 1.0, Ratio::from_integer(1)).unwrap();
        assert_eq!(b1.bandwidth_hz, 7.5);
        assert_eq!(link_budget(15, 2, 0.0, Ratio::from_integer(1)).unwrap_err(), Error::NonPositiveDuration(0.0));
    }

    #[test]
    fn trivial_code() {
        let f = ExtensionField::new(2, 1, &[1, 1]).unwrap();
        let spectra = enumerate_valid_spectra(&f, 1).unwrap();
        assert_eq!(spectra, vec![vec![ExtElement::ZERO], vec![ExtElement::ONE]]);
        let r = spectral_code_analysis(&f, &spectra);
        assert_eq!((r.size, r.linear, r.min_distance), (2, true, 1));
    }

    #[test]
    fn enumeration_errors() {
        let f = ExtensionField::with_default_poly(2, 4).unwrap();
        assert_eq!(enumerate_valid_spectra(&f, 17).unwrap_err(), Error::EnumerationTooLarge(17));
        let f3 = ExtensionField::new(3, 2, &[2, 2, 1]).unwrap();
        assert_eq!(enumerate_valid_spectra(&f3, 8).unwrap_err(), Error::NotBinary(3));
    }
}
