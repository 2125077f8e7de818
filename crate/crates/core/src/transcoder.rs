//! Binary-to-p-ary transcoding through the opportunistic secondary channel.
//!
//! An alphabet of `2^s + W` symbols is served by a prefix code in which
//! `2^s - W` symbols get `s`-bit words and the remaining ones get an extra
//! opportunistic bit. Symbols are identified by the dense field index of
//! their alphabet ([`FiniteField::index`]).

use std::fmt::Write as _;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field::{ExtensionField, FiniteField};
use crate::gaussian::GaussianField;

/// Where a long word carries its opportunistic bit when rendered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpportunisticBit {
    Leading,
    Trailing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltinCode {
    /// GF(7), opportunistic bit first (not prefix-free).
    A,
    /// GF(7), opportunistic bit last.
    APrime,
    /// GI(3).
    B,
    /// Fixed-length vector map for GF(2^m).
    Direct { p: u32, m: u32 },
}

impl BuiltinCode {
    pub fn parse(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        match lower.as_str() {
            "a" => Ok(Self::A),
            "a'" | "a′" | "ap" | "a_prime" | "aprime" => Ok(Self::APrime),
            "b" => Ok(Self::B),
            _ => {
                let rest = lower
                    .strip_prefix("direct")
                    .ok_or_else(|| Error::UnknownCode(name.to_owned()))?;
                let parts: Vec<&str> = rest.trim_matches(|c| c == '(' || c == ')' || c == ':').split([',', ':']).collect();
                match parts.as_slice() {
                    [p, m] => Ok(Self::Direct {
                        p: p.trim().parse().map_err(|_| Error::UnknownCode(name.to_owned()))?,
                        m: m.trim().parse().map_err(|_| Error::UnknownCode(name.to_owned()))?,
                    }),
                    _ => Err(Error::UnknownCode(name.to_owned())),
                }
            }
        }
    }

    pub fn build(&self) -> Result<OpportunisticCode> {
        match *self {
            Self::A => power_table_code("A", &gf7(), CODE_A, OpportunisticBit::Leading),
            Self::APrime => power_table_code("A'", &gf7(), CODE_A_PRIME, OpportunisticBit::Trailing),
            Self::B => {
                let f = GaussianField::new(3)?;
                let mut words = vec![Vec::new(); 9];
                let mut labels = vec![String::new(); 9];
                for &(exp, word) in CODE_B {
                    let x = exp.map_or(f.zero(), |k| f.generator_pow(k));
                    words[f.index(x) as usize] = bits_of(word);
                    labels[f.index(x) as usize] = f.power_label(x);
                }
                OpportunisticCode::new("B", words, labels, OpportunisticBit::Trailing)
            }
            Self::Direct { p, m } => {
                let size = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
                if p != 2 || m == 0 || m > 16 {
                    return Err(Error::NotPowerOfTwo(size));
                }
                let f = ExtensionField::with_default_poly(p, m).ok();
                let words = (0..size as u32)
                    .map(|i| (0..m).rev().map(|b| (i >> b & 1) as u8).collect())
                    .collect();
                let labels = (0..size as u32)
                    .map(|i| match &f {
                        Some(f) => f.power_label(crate::field::ExtElement(i)),
                        None => i.to_string(),
                    })
                    .collect();
                OpportunisticCode::new(&format!("direct({p},{m})"), words, labels, OpportunisticBit::Trailing)
            }
        }
    }
}

/// GF(7) with α = 3.
pub fn gf7() -> ExtensionField {
    ExtensionField::new(7, 1, &[4, 1]).expect("x + 4 is primitive over GF(7)")
}

// (exponent of the generator, or None for zero; word)
const CODE_A: &[(Option<u64>, &str)] = &[
    (None, "000"),
    (Some(0), "001"),
    (Some(1), "11"),
    (Some(2), "010"),
    (Some(3), "110"),
    (Some(4), "100"),
    (Some(5), "101"),
];

const CODE_A_PRIME: &[(Option<u64>, &str)] = &[
    (None, "000"),
    (Some(0), "010"),
    (Some(1), "11"),
    (Some(2), "100"),
    (Some(3), "101"),
    (Some(4), "001"),
    (Some(5), "011"),
];

// ξ⁵ is listed as 1000 in the source table, which has 100 (ξ¹) as a
// prefix; 0001 completes the 000 branch next to 0000.
const CODE_B: &[(Option<u64>, &str)] = &[
    (None, "0000"),
    (Some(0), "011"),
    (Some(1), "100"),
    (Some(2), "010"),
    (Some(3), "101"),
    (Some(4), "110"),
    (Some(5), "0001"),
    (Some(6), "001"),
    (Some(7), "111"),
];

fn power_table_code(
    name: &str,
    f: &ExtensionField,
    table: &[(Option<u64>, &str)],
    opp: OpportunisticBit,
) -> Result<OpportunisticCode> {
    let size = f.size() as usize;
    let mut words = vec![Vec::new(); size];
    let mut labels = vec![String::new(); size];
    for &(exp, word) in table {
        let x = exp.map_or(f.zero(), |k| f.alpha_pow(k));
        words[x.0 as usize] = bits_of(word);
        labels[x.0 as usize] = f.power_label(x);
    }
    OpportunisticCode::new(name, words, labels, opp)
}

pub fn bits_of(s: &str) -> Vec<u8> {
    s.bytes().filter(|b| *b == b'0' || *b == b'1').map(|b| b - b'0').collect()
}

pub fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
}

const NO_CHILD: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Branch([u32; 2]),
    Leaf(u32),
}

/// A table between Galois symbols and binary words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpportunisticCode {
    name: String,
    words: Vec<Vec<u8>>,
    labels: Vec<String>,
    s: u32,
    w: u64,
    instantaneous: bool,
    opportunistic: OpportunisticBit,
    /// Binary trie over the words; only meaningful when instantaneous.
    trie: Vec<Node>,
}

impl OpportunisticCode {
    /// `words[i]` and `labels[i]` belong to the symbol with index `i`.
    pub fn new(name: &str, words: Vec<Vec<u8>>, labels: Vec<String>, opportunistic: OpportunisticBit) -> Result<Self> {
        let n = words.len();
        if n < 2 || labels.len() != n {
            return Err(Error::InvalidCode(format!("{name}: need at least two symbols with labels")));
        }
        if words.iter().any(|w| w.is_empty() || w.len() > 63 || w.iter().any(|&b| b > 1)) {
            return Err(Error::InvalidCode(format!("{name}: words must be 1..=63 bits")));
        }
        for i in 0..n {
            for j in i + 1..n {
                if words[i] == words[j] {
                    return Err(Error::InvalidCode(format!("{name}: duplicate word {}", bit_string(&words[i]))));
                }
            }
        }
        let instantaneous = (0..n).all(|i| (0..n).all(|j| i == j || !words[j].starts_with(&words[i])));
        let s = 63 - (n as u64).leading_zeros();
        let w = n as u64 - (1 << s);

        let mut trie = vec![Node::Branch([NO_CHILD; 2])];
        if instantaneous {
            for (sym, word) in words.iter().enumerate() {
                let mut at = 0usize;
                for (depth, &b) in word.iter().enumerate() {
                    let Node::Branch(children) = trie[at] else { unreachable!("prefix-free") };
                    let next = children[b as usize];
                    at = if next == NO_CHILD {
                        let idx = trie.len();
                        trie.push(if depth + 1 == word.len() { Node::Leaf(sym as u32) } else { Node::Branch([NO_CHILD; 2]) });
                        if let Node::Branch(c) = &mut trie[at] {
                            c[b as usize] = idx as u32;
                        }
                        idx
                    } else {
                        next as usize
                    };
                }
            }
        }
        Ok(Self { name: name.to_owned(), words, labels, s, w, instantaneous, opportunistic, trie })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet_size(&self) -> usize {
        self.words.len()
    }

    /// Bits of the basic constellation: `2^s <= size < 2^(s+1)`.
    pub fn s(&self) -> u32 {
        self.s
    }

    /// Points appended to the basic constellation.
    pub fn w(&self) -> u64 {
        self.w
    }

    pub fn is_instantaneous(&self) -> bool {
        self.instantaneous
    }

    pub fn word(&self, symbol: u32) -> Result<&[u8]> {
        self.words.get(symbol as usize).map(Vec::as_slice).ok_or(Error::UnknownSymbol(symbol))
    }

    pub fn label(&self, symbol: u32) -> Option<&str> {
        self.labels.get(symbol as usize).map(String::as_str)
    }

    pub fn symbol_for_label(&self, label: &str) -> Option<u32> {
        let label = label.trim();
        self.labels.iter().position(|l| l == label).map(|i| i as u32)
    }

    pub fn min_word_len(&self) -> usize {
        self.words.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_word_len(&self) -> usize {
        self.words.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `Σ 2^{-len(word)}`, exact.
    pub fn kraft_sum(&self) -> Ratio<u64> {
        let max = self.max_word_len() as u32;
        let num: u64 = self.words.iter().map(|w| 1u64 << (max - w.len() as u32)).sum();
        Ratio::new(num, 1u64 << max)
    }

    pub fn is_complete(&self) -> bool {
        self.kraft_sum() == Ratio::from_integer(1)
    }

    /// Parses a bit stream into symbols, greedily from the left. A trailing
    /// fragment is zero-padded to the next word boundary; the pad length is
    /// reported.
    pub fn encode_bits(&self, bits: &[u8]) -> Result<Transcoded> {
        if !self.instantaneous {
            return Err(Error::NonInstantaneousCode(self.name.clone()));
        }
        let mut symbols = Vec::new();
        let mut at = 0usize;
        let mut pos = 0usize;
        let mut pad = 0usize;
        while pos < bits.len() || at != 0 {
            let b = if pos < bits.len() { bits[pos] } else { pad += 1; 0 };
            let Node::Branch(children) = self.trie[at] else { unreachable!() };
            let next = children[(b & 1) as usize];
            if next == NO_CHILD {
                return Err(Error::UnparseableBits(pos));
            }
            pos += 1;
            match self.trie[next as usize] {
                Node::Leaf(sym) => {
                    symbols.push(sym);
                    at = 0;
                }
                Node::Branch(_) => at = next as usize,
            }
        }
        Ok(Transcoded { symbols, pad })
    }

    /// Concatenates the words of `symbols`.
    pub fn decode_symbols(&self, symbols: &[u32]) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for &s in symbols {
            out.extend_from_slice(self.word(s)?);
        }
        Ok(out)
    }

    /// Reads exactly `count` symbols from a possibly corrupted stream. When
    /// the stream runs out or hits an unused branch, `fallback` is emitted
    /// and counted as undecodable.
    pub fn read_symbols(&self, bits: &[u8], count: usize, fallback: u32) -> Result<SymbolRead> {
        if !self.instantaneous {
            return Err(Error::NonInstantaneousCode(self.name.clone()));
        }
        let mut symbols = Vec::with_capacity(count);
        let mut undecodable = 0;
        let mut pos = 0;
        while symbols.len() < count {
            let mut at = 0usize;
            let sym = loop {
                let Some(&b) = bits.get(pos) else { break None };
                pos += 1;
                let Node::Branch(children) = self.trie[at] else { unreachable!() };
                let next = children[(b & 1) as usize];
                if next == NO_CHILD {
                    break None;
                }
                match self.trie[next as usize] {
                    Node::Leaf(sym) => break Some(sym),
                    Node::Branch(_) => at = next as usize,
                }
            };
            match sym {
                Some(s) => symbols.push(s),
                None => {
                    symbols.push(fallback);
                    undecodable += 1;
                }
            }
        }
        Ok(SymbolRead { symbols, consumed: pos.min(bits.len()), undecodable })
    }

    /// Power-notation symbols separated by spaces.
    pub fn render_symbols(&self, symbols: &[u32]) -> String {
        symbols
            .iter()
            .map(|&s| self.label(s).unwrap_or("?"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Words separated by spaces with opportunistic bits in brackets.
    pub fn render_marked(&self, symbols: &[u32]) -> Result<String> {
        let mut out = String::new();
        for (i, &sym) in symbols.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let w = self.word(sym)?;
            let opp = w.len() > self.s as usize && self.w > 0;
            for (j, &b) in w.iter().enumerate() {
                let marked = opp
                    && match self.opportunistic {
                        OpportunisticBit::Leading => j == 0,
                        OpportunisticBit::Trailing => j + 1 == w.len(),
                    };
                if marked {
                    let _ = write!(out, "[{b}]");
                } else {
                    let _ = write!(out, "{b}");
                }
            }
        }
        Ok(out)
    }

    pub fn average_rate(&self, weighting: Weighting) -> Result<RateReport> {
        if !self.instantaneous {
            return Err(Error::NonInstantaneousCode(self.name.clone()));
        }
        if !self.is_complete() {
            return Err(Error::IncompleteCode(self.name.clone()));
        }
        let n = self.words.len() as u64;
        let s = self.s as usize;
        let one = Ratio::from_integer(1u64);
        let (p_dir, p_opp, r) = match weighting {
            Weighting::NominalSplit => {
                let p_dir = Ratio::new(1u64 << s, n);
                let p_opp = Ratio::new(self.w, n);
                (p_dir, p_opp, p_dir * s as u64 + p_opp * (s as u64 + 1))
            }
            Weighting::UniformBits | Weighting::UniformSymbols => {
                let prob = |w: &Vec<u8>| match weighting {
                    Weighting::UniformBits => Ratio::new(1, 1u64 << w.len()),
                    _ => Ratio::new(1, n),
                };
                let mut p_dir = Ratio::from_integer(0);
                let mut r = Ratio::from_integer(0);
                for w in &self.words {
                    let pw = prob(w);
                    if w.len() <= s {
                        p_dir += pw;
                    }
                    r += pw * w.len() as u64;
                }
                (p_dir, one - p_dir, r)
            }
        };
        Ok(RateReport { p_dir, p_opp, r, weighting })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcoded {
    pub symbols: Vec<u32>,
    /// Zero bits appended to finish the last word.
    pub pad: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolRead {
    pub symbols: Vec<u32>,
    pub consumed: usize,
    pub undecodable: usize,
}

/// How the direct/opportunistic channel probabilities are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Each word occurs with probability `2^{-len}` (i.i.d. fair source bits).
    #[default]
    UniformBits,
    /// Each symbol equally likely; classes weighted by word counts.
    UniformSymbols,
    /// `P_dir = 2^s / size`, `P_opp = W / size`, lengths `s` and `s + 1`.
    NominalSplit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateReport {
    pub p_dir: Ratio<u64>,
    pub p_opp: Ratio<u64>,
    /// Average information bits per Galois symbol.
    pub r: Ratio<u64>,
    pub weighting: Weighting,
}

impl RateReport {
    pub fn r_f64(&self) -> f64 {
        crate::cyclotomic::ratio_f64(self.r)
    }
}

/// `h = r / log2 M`, modulation symbols per Galois symbol.
pub fn h_param(r: f64, constellation_size: u64) -> Result<f64> {
    if constellation_size < 2 || !constellation_size.is_power_of_two() {
        return Err(Error::InvalidConstellationSize(constellation_size));
    }
    Ok(r / constellation_size.trailing_zeros() as f64)
}

/// `hN`, modulation symbols per frame.
pub fn frame_symbols(h: f64, n: usize) -> f64 {
    h * n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(code: &OpportunisticCode, label: &str) -> u32 {
        code.symbol_for_label(label).unwrap()
    }

    #[test]
    fn a_prime_table_entries() {
        let c = BuiltinCode::APrime.build().unwrap();
        assert_eq!(c.word(sym(&c, "α¹")).unwrap(), &[1, 1]);
        assert_eq!(c.word(sym(&c, "α³")).unwrap(), &[1, 0, 1]);
        assert_eq!(c.word(sym(&c, "α⁵")).unwrap(), &[0, 1, 1]);
        assert_eq!((c.s(), c.w()), (2, 3));
        assert!(c.is_instantaneous());
    }

    #[test]
    fn b_table_entries() {
        let c = BuiltinCode::B.build().unwrap();
        assert_eq!(c.word(sym(&c, "ξ¹")).unwrap(), &[1, 0, 0]);
        assert_eq!(c.word(sym(&c, "ξ⁴")).unwrap(), &[1, 1, 0]);
        assert_eq!(c.word(sym(&c, "0")).unwrap(), &[0, 0, 0, 0]);
        assert_eq!(c.word(sym(&c, "ξ⁵")).unwrap(), &[0, 0, 0, 1]);
        assert_eq!((c.s(), c.w()), (3, 1));
        assert!(c.is_instantaneous());
    }

    #[test]
    fn code_a_is_not_instantaneous() {
        let c = BuiltinCode::A.build().unwrap();
        assert!(!c.is_instantaneous());
        assert!(c.is_complete());
        assert!(matches!(c.encode_bits(&[1, 1]), Err(Error::NonInstantaneousCode(_))));
        assert!(matches!(c.average_rate(Weighting::UniformBits), Err(Error::NonInstantaneousCode(_))));
        // symbols -> bits is plain concatenation and still works
        assert_eq!(c.decode_symbols(&[sym(&c, "α¹")]).unwrap(), vec![1, 1]);
    }

    #[test]
    fn direct_code() {
        let c = BuiltinCode::Direct { p: 2, m: 4 }.build().unwrap();
        assert_eq!(c.word(0).unwrap(), &[0, 0, 0, 0]);
        assert_eq!(c.word(0b1011).unwrap(), &[1, 0, 1, 1]);
        assert_eq!(c.average_rate(Weighting::UniformBits).unwrap().r, Ratio::from_integer(4));
        assert_eq!(BuiltinCode::Direct { p: 3, m: 2 }.build().unwrap_err(), Error::NotPowerOfTwo(9));
    }

    #[test]
    fn example_stream() {
        let c = BuiltinCode::APrime.build().unwrap();
        let out = c.encode_bits(&bits_of("1011001101111")).unwrap();
        assert_eq!(c.render_symbols(&out.symbols), "α³ α² α¹ α⁵ α¹");
        assert_eq!(out.pad, 0);
        assert_eq!(bit_string(&c.decode_symbols(&out.symbols).unwrap()), "1011001101111");
        assert_eq!(c.render_marked(&out.symbols).unwrap(), "10[1] 10[0] 11 01[1] 11");
    }

    #[test]
    fn empty_and_repeated() {
        let c = BuiltinCode::APrime.build().unwrap();
        assert_eq!(c.encode_bits(&[]).unwrap(), Transcoded { symbols: vec![], pad: 0 });
        assert!(c.decode_symbols(&[]).unwrap().is_empty());
        let out = c.encode_bits(&bits_of("111111")).unwrap();
        assert_eq!(c.render_symbols(&out.symbols), "α¹ α¹ α¹");
    }

    #[test]
    fn trailing_fragment_is_padded() {
        let c = BuiltinCode::APrime.build().unwrap();
        let out = c.encode_bits(&bits_of("1")).unwrap();
        // "1" + "0" -> "10" is not a word, "100" is α²
        assert_eq!(out.pad, 2);
        assert_eq!(c.render_symbols(&out.symbols), "α²");
    }

    #[test]
    fn unknown_symbol() {
        let c = BuiltinCode::B.build().unwrap();
        assert_eq!(c.decode_symbols(&[9]).unwrap_err(), Error::UnknownSymbol(9));
    }

    #[test]
    fn rates() {
        let b = BuiltinCode::B.build().unwrap();
        let r = b.average_rate(Weighting::UniformBits).unwrap();
        assert_eq!(r.p_dir, Ratio::new(7, 8));
        assert_eq!(r.p_opp, Ratio::new(1, 8));
        assert_eq!(r.r_f64(), 3.125);
        assert_eq!(b.average_rate(Weighting::NominalSplit).unwrap().r, Ratio::new(28, 9));
        assert_eq!(b.average_rate(Weighting::UniformSymbols).unwrap().r, Ratio::new(29, 9));
        let ap = BuiltinCode::APrime.build().unwrap();
        assert_eq!(ap.average_rate(Weighting::UniformBits).unwrap().r, Ratio::new(11, 4));
    }

    #[test]
    fn kraft_sums() {
        assert_eq!(BuiltinCode::APrime.build().unwrap().kraft_sum(), Ratio::from_integer(1));
        assert_eq!(BuiltinCode::B.build().unwrap().kraft_sum(), Ratio::from_integer(1));
    }

    #[test]
    fn incomplete_code_rate_is_refused() {
        let c = OpportunisticCode::new(
            "short",
            vec![bits_of("0"), bits_of("10")],
            vec!["x".into(), "y".into()],
            OpportunisticBit::Trailing,
        )
        .unwrap();
        assert!(matches!(c.average_rate(Weighting::UniformBits), Err(Error::IncompleteCode(_))));
        assert_eq!(c.encode_bits(&bits_of("11")).unwrap_err(), Error::UnparseableBits(1));
    }

    #[test]
    fn h_values() {
        assert_eq!(format!("{:.3}", h_param(3.125, 4).unwrap()), "1.562");
        assert_eq!(format!("{:.3}", h_param(3.125, 64).unwrap()), "0.521");
        assert_eq!(h_param(4.0, 16).unwrap(), 1.0);
        assert_eq!(h_param(3.0, 6).unwrap_err(), Error::InvalidConstellationSize(6));
        assert_eq!(frame_symbols(3.125, 8), 25.0);
    }

    #[test]
    fn read_symbols_falls_back() {
        let c = BuiltinCode::B.build().unwrap();
        let r = c.read_symbols(&bits_of("0111"), 3, 0).unwrap();
        assert_eq!(r.symbols[0], sym(&c, "ξ⁰"));
        assert_eq!(r.undecodable, 2);
    }

    #[test]
    fn parse_names() {
        assert_eq!(BuiltinCode::parse("A'").unwrap(), BuiltinCode::APrime);
        assert_eq!(BuiltinCode::parse("direct(2,4)").unwrap(), BuiltinCode::Direct { p: 2, m: 4 });
        assert_eq!(BuiltinCode::parse("direct:2:3").unwrap(), BuiltinCode::Direct { p: 2, m: 3 });
        assert!(BuiltinCode::parse("Z").is_err());
    }
}
