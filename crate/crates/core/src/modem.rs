//! Gray-labelled constellations, the AWGN channel, hard-decision
//! demodulation and closed-form single-user symbol error rates.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modulation {
    Bpsk,
    Qpsk,
    Psk8,
    Qam16,
    Qam32,
    Qam64,
}

impl Modulation {
    pub const ALL: [Modulation; 6] =
        [Self::Bpsk, Self::Qpsk, Self::Psk8, Self::Qam16, Self::Qam32, Self::Qam64];

    pub fn size(&self) -> usize {
        match self {
            Self::Bpsk => 2,
            Self::Qpsk => 4,
            Self::Psk8 => 8,
            Self::Qam16 => 16,
            Self::Qam32 => 32,
            Self::Qam64 => 64,
        }
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.size().trailing_zeros() as usize
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Bpsk => "bpsk",
            Self::Qpsk => "qpsk",
            Self::Psk8 => "8psk",
            Self::Qam16 => "16qam",
            Self::Qam32 => "32qam",
            Self::Qam64 => "64qam",
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Ok(match norm.as_str() {
            "bpsk" | "2psk" => Self::Bpsk,
            "qpsk" | "4psk" => Self::Qpsk,
            "8psk" | "psk8" => Self::Psk8,
            "16qam" | "qam16" => Self::Qam16,
            "32qam" | "qam32" => Self::Qam32,
            "64qam" | "qam64" => Self::Qam64,
            _ => return Err(Error::UnknownModulation(s.to_owned())),
        })
    }
}

fn gray(k: usize) -> usize {
    k ^ (k >> 1)
}

/// A unit-average-energy point set with one label per point.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    modulation: Modulation,
    points: Vec<Complex64>,
    labels: Vec<usize>,
    /// `by_label[label]` is the point index.
    by_label: Vec<usize>,
}

impl Constellation {
    pub fn new(modulation: Modulation) -> Self {
        let m = modulation.size();
        let (points, labels): (Vec<Complex64>, Vec<usize>) = match modulation {
            Modulation::Bpsk => (vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)], vec![0, 1]),
            Modulation::Qpsk => (0..4)
                .map(|l| {
                    let i = 1.0 - 2.0 * (l >> 1) as f64;
                    let q = 1.0 - 2.0 * (l & 1) as f64;
                    (Complex64::new(i, q), l)
                })
                .unzip(),
            Modulation::Psk8 => (0..8).map(|k| (Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 8.0), gray(k))).unzip(),
            Modulation::Qam16 | Modulation::Qam64 => {
                let levels = (m as f64).sqrt() as usize;
                let k = levels.trailing_zeros();
                let amp = |a: usize| (2 * a) as f64 - (levels - 1) as f64;
                (0..m)
                    .map(|idx| {
                        let (a, b) = (idx / levels, idx % levels);
                        (Complex64::new(amp(a), amp(b)), gray(a) << k | gray(b))
                    })
                    .unzip()
            }
            Modulation::Qam32 => cross32(),
        };
        let energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / m as f64;
        let scale = energy.sqrt().recip();
        let points = points.into_iter().map(|p| p * scale).collect();
        let mut by_label = vec![0; m];
        for (i, &l) in labels.iter().enumerate() {
            by_label[l] = i;
        }
        Self { modulation, points, labels, by_label }
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.modulation.bits_per_symbol()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Maps bits to points, MSB of each label first. The input is
    /// zero-padded to a whole number of symbols.
    pub fn modulate(&self, bits: &[u8]) -> Modulated {
        let k = self.bits_per_symbol();
        let pad = (k - bits.len() % k) % k;
        let indices: Vec<usize> = (0..(bits.len() + pad) / k)
            .map(|s| {
                let label = (0..k).fold(0, |acc, j| acc << 1 | *bits.get(s * k + j).unwrap_or(&0) as usize);
                self.by_label[label]
            })
            .collect();
        let samples = indices.iter().map(|&i| self.points[i]).collect();
        Modulated { samples, indices, pad }
    }

    /// Index of the nearest point; ties go to the lowest index.
    pub fn decide(&self, sample: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (sample - p).norm_sqr();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    pub fn demodulate(&self, samples: &[Complex64]) -> Vec<u8> {
        let k = self.bits_per_symbol();
        let mut out = Vec::with_capacity(samples.len() * k);
        for &s in samples {
            let label = self.labels[self.decide(s)];
            out.extend((0..k).rev().map(|j| (label >> j & 1) as u8));
        }
        out
    }

    /// Smallest distance between two distinct points.
    pub fn min_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                d = d.min((a - b).norm());
            }
        }
        d
    }

    /// Average number of neighbours at the minimum distance.
    pub fn mean_nearest_neighbours(&self) -> f64 {
        let d = self.min_distance();
        let count: usize = self
            .points
            .iter()
            .map(|a| self.points.iter().filter(|b| ((*a - **b).norm() - d).abs() < 1e-9).count())
            .sum();
        count as f64 / self.size() as f64
    }

    /// Closed-form symbol error rate at `esn0` (linear Es/N0).
    ///
    /// BPSK, QPSK and the square QAMs are exact; 8-PSK uses
    /// `2Q(√(2·Es/N0)·sin(π/M))`. Cross 32-QAM treats each point's decision
    /// region as a product of per-axis intervals, counting lattice neighbours
    /// on each axis; only the folded corners deviate from that.
    pub fn theoretical_ser(&self, esn0: f64) -> f64 {
        let esn0 = esn0.max(0.0);
        match self.modulation {
            Modulation::Bpsk => q_function((2.0 * esn0).sqrt()),
            Modulation::Qpsk => {
                let q = q_function(esn0.sqrt());
                2.0 * q - q * q
            }
            Modulation::Psk8 => 2.0 * q_function((2.0 * esn0).sqrt() * (PI / 8.0).sin()),
            Modulation::Qam16 | Modulation::Qam64 => {
                let m = self.size() as f64;
                let pl = 2.0 * (1.0 - m.sqrt().recip()) * q_function((3.0 * esn0 / (m - 1.0)).sqrt());
                2.0 * pl - pl * pl
            }
            Modulation::Qam32 => {
                let d = self.min_distance();
                let q = q_function(d * (esn0 / 2.0).sqrt());
                let has = |z: Complex64| self.points.iter().any(|p| (p - z).norm() < 1e-9);
                let correct: f64 = self
                    .points
                    .iter()
                    .map(|&p| {
                        let nx = has(p + d) as u32 + has(p - d) as u32;
                        let ny = has(p + Complex64::new(0.0, d)) as u32 + has(p - Complex64::new(0.0, d)) as u32;
                        (1.0 - nx as f64 * q) * (1.0 - ny as f64 * q)
                    })
                    .sum();
                1.0 - correct / self.size() as f64
            }
        }
    }
}

/// 32-point cross: an 8×4 Gray rectangle whose outer columns are folded
/// onto the top and bottom rows. Not Gray at the fold.
fn cross32() -> (Vec<Complex64>, Vec<usize>) {
    (0..32)
        .map(|idx| {
            let (col, row) = (idx / 4, idx % 4);
            let x = (2 * col) as f64 - 7.0;
            let y = (2 * row) as f64 - 3.0;
            let (x, y) = if x.abs() > 6.0 { (x.signum() * y.abs(), y.signum() * 5.0) } else { (x, y) };
            (Complex64::new(x, y), gray(col) << 2 | gray(row))
        })
        .unzip()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Modulated {
    pub samples: Vec<Complex64>,
    /// Point index of each sample.
    pub indices: Vec<usize>,
    /// Zero bits appended to fill the last symbol.
    pub pad: usize,
}

/// Adds zero-mean complex Gaussian noise with variance `n0/2` per dimension.
pub fn awgn<R: Rng + ?Sized>(samples: &mut [Complex64], n0: f64, rng: &mut R) {
    if n0 <= 0.0 {
        return;
    }
    let sigma = (n0 / 2.0).sqrt();
    for s in samples {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *s += Complex64::new(re * sigma, im * sigma);
    }
}

/// Symbol errors among `symbols` uniformly drawn points sent at linear `esn0`.
pub fn count_symbol_errors<R: Rng + ?Sized>(c: &Constellation, esn0: f64, symbols: u64, rng: &mut R) -> u64 {
    let n0 = 1.0 / esn0;
    let sigma = (n0 / 2.0).sqrt();
    let mut errors = 0;
    for _ in 0..symbols {
        let i = rng.random_range(0..c.size());
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let y = c.points()[i] + Complex64::new(re * sigma, im * sigma);
        errors += (c.decide(y) != i) as u64;
    }
    errors
}

/// Gaussian tail probability `Q(x) = erfc(x/√2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Uncoded BPSK bit error rate at linear Eb/N0.
pub fn bpsk_ber(ebn0: f64) -> f64 {
    q_function((2.0 * ebn0).sqrt())
}
