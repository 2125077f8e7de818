//! Seeded Monte Carlo BER/SER/FER estimation over AWGN.
//!
//! Frames are grouped into fixed-size chunks. Chunk `c` of a point draws from
//! `ChaCha8Rng` seeded by `(master_seed, point)` on stream `c`, so the set of
//! simulated frames never depends on how many threads run them. Chunks are
//! merged in index order and the point stops at the first chunk boundary
//! where both thresholds hold.

use std::fmt::Write as _;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cyclotomic::from_db;
use crate::error::{Error, Result};
use crate::link::{GdmaLink, LinkConfig, Mode};
use crate::modem::{awgn, Modulation};

/// Stop thresholds for one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_bits: u64,
    pub min_errors: u64,
    /// Hard cap; reaching it before `min_errors` sets `budget_exhausted`.
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { min_bits: 1_000_000, min_errors: 200, max_bits: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    /// Base link; `modes` and `modulations` override its mode and modulation
    /// in [`sweep`].
    pub link: LinkConfig,
    pub modes: Vec<Mode>,
    pub modulations: Vec<Modulation>,
    pub ebn0_points_db: Vec<f64>,
    pub stop: StopRule,
    pub master_seed: u64,
    pub workers: usize,
}

impl SimulationSpec {
    pub fn new(link: LinkConfig, ebn0_points_db: Vec<f64>) -> Self {
        Self {
            modes: vec![link.mode],
            modulations: vec![link.modulation],
            link,
            ebn0_points_db,
            stop: StopRule::default(),
            master_seed: 1,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.into()));
        if self.stop.min_bits < 1000 {
            return bad("min_bits must be at least 1000");
        }
        if self.stop.max_bits < self.stop.min_bits {
            return bad("max_bits must be at least min_bits");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        if self.ebn0_points_db.is_empty() {
            return bad("no Eb/N0 points");
        }
        if self.ebn0_points_db.iter().any(|x| x.is_nan() || *x == f64::NEG_INFINITY) {
            return bad("Eb/N0 points must be numbers");
        }
        if self.ebn0_points_db.windows(2).any(|w| w[0] >= w[1]) {
            return bad("Eb/N0 points must be strictly increasing");
        }
        if self.modes.is_empty() || self.modulations.is_empty() {
            return bad("modes and modulations must be non-empty");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub mode: Mode,
    pub modulation: Modulation,
    pub transform: &'static str,
    pub n_users: usize,
    pub ebn0_db: f64,
    /// User payload bits; each ground symbol counts `ceil(log2 p)` bits.
    pub bits_observed: u64,
    pub bit_errors: u64,
    pub ber: f64,
    /// Modulation symbols on the channel.
    pub symbols_observed: u64,
    pub symbol_errors: u64,
    pub ser: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub budget_exhausted: bool,
    pub per_user_bit_errors: Vec<u64>,
    /// Received codeword prefixes that matched no word.
    pub undecodable: u64,
    /// Demultiplexed components that fell outside GF(p).
    pub out_of_subfield: u64,
}

/// 95% Wilson score interval.
pub fn confidence_interval(errors: u64, trials: u64) -> (f64, f64) {
    const Z: f64 = 1.959_963_984_540_054;
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if errors == 0 { 0.0 } else { (centre - half).clamp(0.0, p) };
    let high = if errors >= trials { 1.0 } else { (centre + half).clamp(p, 1.0) };
    (low, high)
}

const CHUNK_BITS: u64 = 4096;

#[derive(Debug, Clone, Default)]
struct Counts {
    bits: u64,
    bit_errors: u64,
    symbols: u64,
    symbol_errors: u64,
    frames: u64,
    frame_errors: u64,
    per_user: Vec<u64>,
    undecodable: u64,
    out_of_subfield: u64,
}

impl Counts {
    fn merge(&mut self, o: &Counts) {
        self.bits += o.bits;
        self.bit_errors += o.bit_errors;
        self.symbols += o.symbols;
        self.symbol_errors += o.symbol_errors;
        self.frames += o.frames;
        self.frame_errors += o.frame_errors;
        self.undecodable += o.undecodable;
        self.out_of_subfield += o.out_of_subfield;
        if self.per_user.len() < o.per_user.len() {
            self.per_user.resize(o.per_user.len(), 0);
        }
        for (a, b) in self.per_user.iter_mut().zip(&o.per_user) {
            *a += b;
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn point_key(seed: u64, cfg: &LinkConfig, ebn0_db: f64) -> u64 {
    let tag = (cfg.mode as u64) << 8 | cfg.modulation as u64;
    splitmix(splitmix(splitmix(seed) ^ ebn0_db.to_bits()) ^ tag)
}

fn label_bits(p: u32) -> u32 {
    32 - (p - 1).leading_zeros()
}

fn simulate_chunk(link: &GdmaLink, ebn0: f64, key: u64, chunk: u64, frames: u64) -> Result<Counts> {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(chunk);
    let n = link.n_users();
    let p = link.characteristic();
    let lb = label_bits(p);
    let cons = link.constellation();
    let mut c = Counts { per_user: vec![0; n], ..Counts::default() };
    let mut users = vec![0u32; n];
    for _ in 0..frames {
        for u in users.iter_mut() {
            *u = rng.random_range(0..p);
        }
        let tx = link.mux(&users)?;
        let mut m = cons.modulate(&tx.bits);
        let n0 = link.noise_density(ebn0, m.samples.len());
        if n0 > 0.0 {
            awgn(&mut m.samples, n0, &mut rng);
        }
        let k = cons.bits_per_symbol();
        let mut rx_bits = Vec::with_capacity(m.samples.len() * k);
        for (s, &sent) in m.samples.iter().zip(&m.indices) {
            let d = cons.decide(*s);
            if d != sent {
                c.symbol_errors += 1;
            }
            let label = cons.labels()[d];
            rx_bits.extend((0..k).rev().map(|j| (label >> j & 1) as u8));
        }
        c.symbols += m.samples.len() as u64;
        let rx = link.demux(&rx_bits)?;
        c.undecodable += rx.undecodable as u64;
        c.out_of_subfield += rx.out_of_subfield as u64;
        let mut wrong = false;
        for (i, (a, b)) in users.iter().zip(&rx.users).enumerate() {
            let e = (a ^ b).count_ones() as u64;
            c.per_user[i] += e;
            c.bit_errors += e;
            wrong |= a != b;
        }
        c.bits += n as u64 * lb as u64;
        c.frames += 1;
        c.frame_errors += wrong as u64;
    }
    Ok(c)
}

fn run_link(link: &GdmaLink, ebn0_db: f64, stop: &StopRule, seed: u64, workers: usize) -> Result<BerRecord> {
    let cfg = link.config();
    let ebn0 = if ebn0_db == f64::INFINITY { f64::INFINITY } else { from_db(ebn0_db) };
    let noiseless = ebn0.is_infinite();
    let key = point_key(seed, cfg, ebn0_db);
    let frame_bits = link.n_users() as u64 * label_bits(link.characteristic()) as u64;
    let chunk_frames = CHUNK_BITS.div_ceil(frame_bits).max(1);
    let batch = (workers * 4) as u64;
    let mut total = Counts { per_user: vec![0; link.n_users()], ..Counts::default() };
    let mut next = 0u64;
    let mut exhausted = false;
    'outer: loop {
        let results: Vec<Result<Counts>> = (next..next + batch)
            .into_par_iter()
            .map(|c| simulate_chunk(link, ebn0, key, c, chunk_frames))
            .collect();
        next += batch;
        for r in results {
            total.merge(&r?);
            let enough_bits = total.bits >= stop.min_bits;
            if enough_bits && (noiseless || total.bit_errors >= stop.min_errors) {
                break 'outer;
            }
            if total.bits >= stop.max_bits {
                exhausted = true;
                break 'outer;
            }
        }
    }
    let ber = total.bit_errors as f64 / total.bits as f64;
    let (ci_low, ci_high) = confidence_interval(total.bit_errors, total.bits);
    Ok(BerRecord {
        mode: cfg.mode,
        modulation: cfg.modulation,
        transform: cfg.transform.kind(),
        n_users: link.n_users(),
        ebn0_db,
        bits_observed: total.bits,
        bit_errors: total.bit_errors,
        ber,
        symbols_observed: total.symbols,
        symbol_errors: total.symbol_errors,
        ser: total.symbol_errors as f64 / total.symbols as f64,
        frames: total.frames,
        frame_errors: total.frame_errors,
        fer: total.frame_errors as f64 / total.frames as f64,
        ci_low,
        ci_high,
        seed,
        budget_exhausted: exhausted,
        per_user_bit_errors: total.per_user,
        undecodable: total.undecodable,
        out_of_subfield: total.out_of_subfield,
    })
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidSpec(format!("thread pool: {e}")))
}

/// One point with the spec's base link (its own mode and modulation).
pub fn run_point(spec: &SimulationSpec, ebn0_db: f64) -> Result<BerRecord> {
    spec.validate()?;
    let link = GdmaLink::new(spec.link.clone())?;
    pool(spec.workers)?.install(|| run_link(&link, ebn0_db, &spec.stop, spec.master_seed, spec.workers))
}

/// Every (mode, modulation, point) combination, in that nesting order.
pub fn sweep(spec: &SimulationSpec) -> Result<Vec<BerRecord>> {
    spec.validate()?;
    let pool = pool(spec.workers)?;
    let mut out = Vec::new();
    for &mode in &spec.modes {
        for &modulation in &spec.modulations {
            let link = GdmaLink::new(LinkConfig { mode, modulation, ..spec.link.clone() })?;
            for &x in &spec.ebn0_points_db {
                out.push(pool.install(|| run_link(&link, x, &spec.stop, spec.master_seed, spec.workers))?);
            }
        }
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "mode,modulation,transform,n_users,ebn0_db,bits_observed,bit_errors,ber,\
symbols_observed,symbol_errors,ser,frames,frame_errors,fer,ci_low,ci_high,seed";

pub fn to_csv(records: &[BerRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{:.5e},{},{},{:.5e},{},{},{:.5e},{:.5e},{:.5e},{}",
            r.mode,
            r.modulation,
            r.transform,
            r.n_users,
            r.ebn0_db,
            r.bits_observed,
            r.bit_errors,
            r.ber,
            r.symbols_observed,
            r.symbol_errors,
            r.ser,
            r.frames,
            r.frame_errors,
            r.fer,
            r.ci_low,
            r.ci_high,
            r.seed
        );
    }
    s
}

pub fn write_csv<W: io::Write>(records: &[BerRecord], mut w: W) -> io::Result<()> {
    w.write_all(to_csv(records).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(link: LinkConfig, points: Vec<f64>) -> SimulationSpec {
        let mut s = SimulationSpec::new(link, points);
        s.stop = StopRule { min_bits: 1000, min_errors: 10, max_bits: 20_000 };
        s
    }

    #[test]
    fn wilson_edges() {
        assert_eq!(confidence_interval(0, 1_000_000).0, 0.0);
        assert_eq!(confidence_interval(7, 7).1, 1.0);
        let (lo, hi) = confidence_interval(500, 1_000_000);
        assert!(lo < 5e-4 && 5e-4 < hi);
    }

    #[test]
    fn spec_validation() {
        let mut s = quick(LinkConfig::single_user(Modulation::Bpsk), vec![0.0, 1.0]);
        assert!(s.validate().is_ok());
        s.ebn0_points_db = vec![1.0, 1.0];
        assert!(s.validate().is_err());
        s.ebn0_points_db = vec![1.0];
        s.stop.min_bits = 999;
        assert!(s.validate().is_err());
    }

    #[test]
    fn noiseless_point() {
        let s = quick(LinkConfig::gf16(Mode::Cc, Modulation::Qpsk), vec![f64::INFINITY]);
        let r = run_point(&s, f64::INFINITY).unwrap();
        assert_eq!(r.bit_errors, 0);
        assert!(r.bits_observed >= 1000);
        assert!(!r.budget_exhausted);
        assert_eq!(r.bits_observed, r.frames * 15);
    }

    #[test]
    fn budget_flag() {
        let mut s = quick(LinkConfig::single_user(Modulation::Bpsk), vec![12.0]);
        s.stop.min_errors = 1_000;
        let r = run_point(&s, 12.0).unwrap();
        assert!(r.budget_exhausted);
        assert!(r.bits_observed >= 20_000);
    }

    #[test]
    fn sweep_cardinality_and_csv() {
        let mut s = quick(LinkConfig::gf16(Mode::Fs, Modulation::Bpsk), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        s.modes = vec![Mode::Fs, Mode::Cc];
        let recs = sweep(&s).unwrap();
        assert_eq!(recs.len(), 10);
        let csv = to_csv(&recs);
        assert_eq!(csv.lines().count(), 11);
        assert!(csv.starts_with("mode,modulation,transform,n_users,ebn0_db,"));
        let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(first.len(), 17);
        assert_eq!(&first[..5], &["fs", "bpsk", "ffft", "15", "0"]);
        for r in &recs {
            assert!(r.ci_low <= r.ber && r.ber <= r.ci_high);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut s = quick(LinkConfig::gi3(Mode::Cc, Modulation::Qpsk), vec![3.0]);
        let a = run_point(&s, 3.0).unwrap();
        s.workers = 4;
        assert_eq!(a, run_point(&s, 3.0).unwrap());
    }
}
