//! The N-user GDMA frame pipeline.
//!
//! mux: transform → (CC: keep coset leaders) → transcode to bits.
//! demux: parse bits → (CC: expand by conjugacy) → inverse transform →
//! ground-field decisions. Modulation and the channel live in
//! [`crate::modem`]; this module only fixes how many channel symbols a frame
//! uses and how much noise a given Eb/N0 means.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::cyclotomic::CosetPartition;
use crate::error::{Error, Result};
use crate::field::{ExtElement, ExtensionField, FiniteField};
use crate::gaussian::{GaussianField, GaussianInt};
use crate::modem::{Constellation, Modulation};
use crate::transcoder::{BuiltinCode, OpportunisticCode};
use crate::transforms::{conjugacy_multiplier, FourierTransform, GaloisTransform, HartleyTransform};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransformSpec {
    /// FFFT over GF(p^m); `poly` defaults to the shipped primitive polynomial.
    Fourier { p: u32, m: u32, poly: Option<Vec<u32>> },
    /// FFHT over GI(q).
    Hartley { q: u32 },
}

impl TransformSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Fourier { .. } => "ffft",
            Self::Hartley { .. } => "ffht",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Full spectrum: all N components are sent.
    Fs,
    /// Cyclotomic compression: only the ν coset leaders are sent.
    Cc,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fs => "fs",
            Self::Cc => "cc",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fs" | "full" => Ok(Self::Fs),
            "cc" | "compressed" => Ok(Self::Cc),
            _ => Err(Error::ConfigInvalid(format!("unknown mode {s:?}"))),
        }
    }
}

/// What "Eb" refers to when converting Eb/N0 to a noise density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyConvention {
    /// Energy per transcoded bit carried by the modulation, `Es = Eb·log2 M`.
    #[default]
    ChannelBit,
    /// Energy per user payload bit: a frame of `N·log2 p` payload bits gets
    /// `N·log2(p)·Eb`, spread over however many channel symbols it needs.
    PayloadBit,
}

impl FromStr for EnergyConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "channel-bit" | "channel" => Ok(Self::ChannelBit),
            "payload-bit" | "payload" => Ok(Self::PayloadBit),
            _ => Err(Error::ConfigInvalid(format!("unknown energy convention {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub transform: TransformSpec,
    pub n_users: usize,
    pub mode: Mode,
    /// `None` picks direct(2,m) for GF(2^m), A′ for GF(7) and B for GI(3).
    pub code: Option<BuiltinCode>,
    pub modulation: Modulation,
    pub symbol_duration: f64,
    pub energy: EnergyConvention,
}

impl LinkConfig {
    /// 15 users over GF(16), x⁴ + x + 1.
    pub fn gf16(mode: Mode, modulation: Modulation) -> Self {
        Self {
            transform: TransformSpec::Fourier { p: 2, m: 4, poly: None },
            n_users: 15,
            mode,
            code: None,
            modulation,
            symbol_duration: 1.0,
            energy: EnergyConvention::default(),
        }
    }

    /// 8 users over GI(3) with the FFHT.
    pub fn gi3(mode: Mode, modulation: Modulation) -> Self {
        Self { transform: TransformSpec::Hartley { q: 3 }, n_users: 8, ..Self::gf16(mode, modulation) }
    }

    /// One binary user and no spreading (GF(2), N = 1): plain modulation.
    pub fn single_user(modulation: Modulation) -> Self {
        Self {
            transform: TransformSpec::Fourier { p: 2, m: 1, poly: Some(vec![1, 1]) },
            n_users: 1,
            ..Self::gf16(Mode::Fs, modulation)
        }
    }
}

/// Field-specific rendering for traces.
pub trait Notation: FiniteField {
    fn power(&self, e: Self::Elem) -> String;
    fn vector(&self, e: Self::Elem) -> String;
}

impl Notation for ExtensionField {
    fn power(&self, e: ExtElement) -> String {
        self.power_label(e)
    }

    fn vector(&self, e: ExtElement) -> String {
        self.vector_label(e)
    }
}

impl Notation for GaussianField {
    fn power(&self, e: GaussianInt) -> String {
        self.power_label(e)
    }

    fn vector(&self, e: GaussianInt) -> String {
        e.to_string()
    }
}

/// Transform plus optional partition, working on dense symbol indices.
trait Engine: Send + Sync + fmt::Debug {
    fn n(&self) -> usize;
    fn p(&self) -> u32;
    fn field_size(&self) -> u64;
    fn partition(&self) -> Option<&CosetPartition>;
    fn spectrum(&self, users: &[u32]) -> Result<Vec<u32>>;
    fn compress(&self, spectrum: &[u32]) -> Result<Vec<u32>>;
    fn expand(&self, leaders: &[u32]) -> Result<Vec<u32>>;
    /// Inverse transform; `None` marks a component outside GF(p).
    fn invert(&self, spectrum: &[u32]) -> Result<Vec<Option<u32>>>;
    fn power(&self, idx: u32) -> String;
    fn vector(&self, idx: u32) -> String;
}

#[derive(Debug)]
struct Pipeline<T: GaloisTransform> {
    transform: T,
    /// Conjugacy partition; present whenever a conjugacy rule was verified.
    partition: Option<CosetPartition>,
}

impl<T> Pipeline<T>
where
    T: GaloisTransform + fmt::Debug,
    T::Field: Notation,
{
    fn new(transform: T) -> Result<Self> {
        let partition = match conjugacy_multiplier(&transform) {
            Some(c) => Some(CosetPartition::with_multiplier(
                transform.len(),
                transform.field().characteristic(),
                c,
            )?),
            None => None,
        };
        Ok(Self { transform, partition })
    }

    fn elems(&self, idx: &[u32]) -> Result<Vec<<T::Field as FiniteField>::Elem>> {
        let f = self.transform.field();
        idx.iter().map(|&i| f.from_index(i).ok_or(Error::UnknownSymbol(i))).collect()
    }

    fn indices(&self, e: &[<T::Field as FiniteField>::Elem]) -> Vec<u32> {
        let f = self.transform.field();
        e.iter().map(|&x| f.index(x)).collect()
    }
}

impl<T> Engine for Pipeline<T>
where
    T: GaloisTransform + fmt::Debug,
    T::Field: Notation,
{
    fn n(&self) -> usize {
        self.transform.len()
    }

    fn p(&self) -> u32 {
        self.transform.field().characteristic()
    }

    fn field_size(&self) -> u64 {
        self.transform.field().size()
    }

    fn partition(&self) -> Option<&CosetPartition> {
        self.partition.as_ref()
    }

    fn spectrum(&self, users: &[u32]) -> Result<Vec<u32>> {
        Ok(self.indices(&self.transform.forward_ground(users)?))
    }

    fn compress(&self, spectrum: &[u32]) -> Result<Vec<u32>> {
        let part = self.partition.as_ref().ok_or(Error::CompressionUnavailable)?;
        let s = self.elems(spectrum)?;
        Ok(self.indices(&part.compress(self.transform.field(), &s, false)?))
    }

    fn expand(&self, leaders: &[u32]) -> Result<Vec<u32>> {
        let part = self.partition.as_ref().ok_or(Error::CompressionUnavailable)?;
        let l = self.elems(leaders)?;
        Ok(self.indices(&part.expand(self.transform.field(), &l)?))
    }

    fn invert(&self, spectrum: &[u32]) -> Result<Vec<Option<u32>>> {
        let f = self.transform.field();
        let v = self.transform.inverse(&self.elems(spectrum)?)?;
        Ok(v.into_iter().map(|x| f.to_ground(x)).collect())
    }

    fn power(&self, idx: u32) -> String {
        let f = self.transform.field();
        f.from_index(idx).map_or_else(|| "?".into(), |e| f.power(e))
    }

    fn vector(&self, idx: u32) -> String {
        let f = self.transform.field();
        f.from_index(idx).map_or_else(|| "?".into(), |e| f.vector(e))
    }
}

/// A configured link: immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct GdmaLink {
    config: LinkConfig,
    engine: Arc<dyn Engine>,
    code: Arc<OpportunisticCode>,
    constellation: Arc<Constellation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuxFrame {
    /// Full spectrum as field indices.
    pub spectrum: Vec<u32>,
    /// Galois symbols actually sent (N for FS, ν for CC).
    pub sent: Vec<u32>,
    pub bits: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemuxFrame {
    pub received: Vec<u32>,
    pub spectrum: Vec<u32>,
    /// Raw inverse-transform components; `None` is outside GF(p).
    pub raw: Vec<Option<u32>>,
    pub users: Vec<u32>,
    pub undecodable: usize,
    pub out_of_subfield: usize,
}

impl GdmaLink {
    pub fn new(config: LinkConfig) -> Result<Self> {
        if config.symbol_duration.is_nan() || config.symbol_duration <= 0.0 {
            return Err(Error::NonPositiveDuration(config.symbol_duration));
        }
        let engine: Arc<dyn Engine> = match &config.transform {
            TransformSpec::Fourier { p, m, poly } => {
                let field = match poly {
                    Some(poly) => ExtensionField::new(*p, *m, poly)?,
                    None => ExtensionField::with_default_poly(*p, *m)?,
                };
                let t = FourierTransform::new(Arc::new(field), config.n_users)?;
                Arc::new(Pipeline::new(t)?)
            }
            TransformSpec::Hartley { q } => {
                let t = HartleyTransform::new(Arc::new(GaussianField::new(*q)?), config.n_users)?;
                Arc::new(Pipeline::new(t)?)
            }
        };
        if config.mode == Mode::Cc && engine.partition().is_none() {
            return Err(Error::CompressionUnavailable);
        }
        let code_name = match (&config.code, &config.transform) {
            (Some(c), _) => c.clone(),
            (None, TransformSpec::Fourier { p: 2, m, .. }) => BuiltinCode::Direct { p: 2, m: *m },
            (None, TransformSpec::Fourier { p: 7, m: 1, .. }) => BuiltinCode::APrime,
            (None, TransformSpec::Hartley { q: 3 }) => BuiltinCode::B,
            (None, t) => {
                return Err(Error::ConfigInvalid(format!("no default transcoder for {t:?}; set one explicitly")))
            }
        };
        let code = code_name.build()?;
        if code.alphabet_size() as u64 != engine.field_size() {
            return Err(Error::ConfigInvalid(format!(
                "code {} has {} symbols but the spectrum field has {}",
                code.name(),
                code.alphabet_size(),
                engine.field_size()
            )));
        }
        if !code.is_instantaneous() {
            return Err(Error::NonInstantaneousCode(code.name().to_owned()));
        }
        let constellation = Constellation::new(config.modulation);
        Ok(Self { config, engine, code: Arc::new(code), constellation: Arc::new(constellation) })
    }

    pub fn config(&self) -> &LinkConfig {
        &self.config
    }

    pub fn n_users(&self) -> usize {
        self.engine.n()
    }

    pub fn characteristic(&self) -> u32 {
        self.engine.p()
    }

    pub fn code(&self) -> &OpportunisticCode {
        &self.code
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn partition(&self) -> Option<&CosetPartition> {
        self.engine.partition()
    }

    /// Galois symbols per frame: N (FS) or ν (CC).
    pub fn symbols_per_frame(&self) -> usize {
        match self.config.mode {
            Mode::Fs => self.engine.n(),
            Mode::Cc => self.engine.partition().map_or(self.engine.n(), CosetPartition::nu),
        }
    }

    /// Payload bits per frame, `N·log2 p`.
    pub fn payload_bits(&self) -> f64 {
        self.engine.n() as f64 * (self.engine.p() as f64).log2()
    }

    /// Noise density for linear `ebn0` given the frame's channel-symbol count.
    /// Constellations have unit average energy.
    pub fn noise_density(&self, ebn0: f64, channel_symbols: usize) -> f64 {
        if ebn0.is_infinite() {
            return 0.0;
        }
        match self.config.energy {
            EnergyConvention::ChannelBit => 1.0 / (self.constellation.bits_per_symbol() as f64 * ebn0),
            EnergyConvention::PayloadBit => channel_symbols as f64 / (self.payload_bits() * ebn0),
        }
    }

    /// Es/N0 seen by the modulation for linear `ebn0`, using the mean
    /// channel-symbol count under uniform source bits for payload accounting.
    pub fn esn0(&self, ebn0: f64) -> f64 {
        match self.config.energy {
            EnergyConvention::ChannelBit => self.constellation.bits_per_symbol() as f64 * ebn0,
            EnergyConvention::PayloadBit => {
                let r = self.code.average_rate(Default::default()).map_or(self.code.max_word_len() as f64, |r| r.r_f64());
                let symbols = self.symbols_per_frame() as f64 * r / self.constellation.bits_per_symbol() as f64;
                self.payload_bits() * ebn0 / symbols
            }
        }
    }

    pub fn mux(&self, users: &[u32]) -> Result<MuxFrame> {
        let spectrum = self.engine.spectrum(users)?;
        let sent = match self.config.mode {
            Mode::Fs => spectrum.clone(),
            Mode::Cc => self.engine.compress(&spectrum)?,
        };
        let bits = self.code.decode_symbols(&sent)?;
        Ok(MuxFrame { spectrum, sent, bits })
    }

    pub fn demux(&self, bits: &[u8]) -> Result<DemuxFrame> {
        let count = self.symbols_per_frame();
        if bits.len() < count * self.code.min_word_len() {
            return Err(Error::FrameLengthMismatch { got: bits.len(), symbols: count });
        }
        let read = self.code.read_symbols(bits, count, 0)?;
        let spectrum = match self.config.mode {
            Mode::Fs => read.symbols.clone(),
            Mode::Cc => self.engine.expand(&read.symbols)?,
        };
        let raw = self.engine.invert(&spectrum)?;
        let out_of_subfield = raw.iter().filter(|x| x.is_none()).count();
        let users = raw.iter().map(|x| x.unwrap_or(0)).collect();
        Ok(DemuxFrame { received: read.symbols, spectrum, raw, users, undecodable: read.undecodable, out_of_subfield })
    }

    /// Runs one frame with the listed channel bits flipped.
    pub fn trace(&self, users: &[u32], flips: &[usize]) -> Result<FrameTrace> {
        let tx = self.mux(users)?;
        let mut rx_bits = tx.bits.clone();
        for &i in flips {
            let b = rx_bits.get_mut(i).ok_or(Error::ConfigInvalid(format!("flip index {i} beyond frame")))?;
            *b ^= 1;
        }
        let rx = self.demux(&rx_bits)?;
        Ok(FrameTrace { link: self.clone(), users_in: users.to_vec(), tx, rx_bits, rx })
    }

    pub fn power_label(&self, idx: u32) -> String {
        self.engine.power(idx)
    }

    pub fn vector_label(&self, idx: u32) -> String {
        self.engine.vector(idx)
    }
}

/// Every stage of one frame.
#[derive(Debug, Clone)]
pub struct FrameTrace {
    link: GdmaLink,
    pub users_in: Vec<u32>,
    pub tx: MuxFrame,
    pub rx_bits: Vec<u8>,
    pub rx: DemuxFrame,
}

impl FrameTrace {
    pub fn users_match(&self) -> bool {
        self.users_in == self.rx.users
    }

    pub fn channel_bit_errors(&self) -> usize {
        self.tx.bits.iter().zip(&self.rx_bits).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for FrameTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = &self.link;
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        let powers = |v: &[u32]| v.iter().map(|&i| l.power_label(i)).collect::<Vec<_>>().join(" ");
        let vectors = |v: &[u32]| v.iter().map(|&i| l.vector_label(i)).collect::<Vec<_>>().join(" ");
        let cfg = l.config();
        writeln!(
            f,
            "link: {} N={} mode={} code={} modulation={}",
            cfg.transform.kind(),
            l.n_users(),
            cfg.mode,
            l.code().name(),
            cfg.modulation
        )?;
        writeln!(f, "users in:        {}", join(&self.users_in))?;
        writeln!(f, "spectrum:        {}", powers(&self.tx.spectrum))?;
        writeln!(f, "spectrum (vec):  {}", vectors(&self.tx.spectrum))?;
        if let (Mode::Cc, Some(part)) = (cfg.mode, l.partition()) {
            let leaders: Vec<String> = part.leaders().iter().map(|k| format!("V{k}")).collect();
            writeln!(f, "leaders:         {}", leaders.join(" "))?;
        }
        writeln!(f, "sent symbols:    {}", powers(&self.tx.sent))?;
        writeln!(f, "tx bits ({:>3}):   {}", self.tx.bits.len(), l.code().render_marked(&self.tx.sent).unwrap_or_default())?;
        writeln!(f, "rx bits ({:>3}):   {}", self.rx_bits.len(), crate::transcoder::bit_string(&self.rx_bits))?;
        writeln!(f, "channel errors:  {}", self.channel_bit_errors())?;
        writeln!(f, "rx symbols:      {}", powers(&self.rx.received))?;
        writeln!(f, "rx spectrum:     {}", powers(&self.rx.spectrum))?;
        let raw: Vec<String> = self.rx.raw.iter().map(|x| x.map_or("*".into(), |v| v.to_string())).collect();
        writeln!(f, "inverse:         {}", raw.join(" "))?;
        writeln!(f, "users out:       {}", join(&self.rx.users))?;
        write!(
            f,
            "undecodable={} out_of_subfield={} match={}",
            self.rx.undecodable,
            self.rx.out_of_subfield,
            self.users_match()
        )
    }
}

/// Union bound on the frame error rate, `min(1, h·N·P_E,1)`.
pub fn frame_error_bound(n_users: usize, h: f64, pe1: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&pe1) {
        return Err(Error::InvalidProbability(pe1));
    }
    Ok((h * n_users as f64 * pe1).min(1.0))
}
