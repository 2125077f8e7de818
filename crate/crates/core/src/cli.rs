//! Command-line front end. [`dispatch`] does all the work and returns the
//! exit code with captured output; the binary only prints it.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::ber::{self, SimulationSpec, StopRule};
use crate::cyclotomic::{check_bound, enumerate_valid_spectra, from_db, spectral_code_analysis, to_db, CosetPartition};
use crate::error::Error;
use crate::field::{is_prime, parse_power_label, superscript, ExtElement, ExtensionField, FiniteField};
use crate::gaussian::GaussianField;
use crate::link::{EnergyConvention, GdmaLink, LinkConfig, Mode, TransformSpec};
use crate::modem::{count_symbol_errors, Constellation, Modulation};
use crate::transcoder::{bit_string, bits_of, h_param, BuiltinCode, Weighting};
use crate::transforms::{FourierTransform, GaloisTransform, HartleyTransform};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "gdma", version, about = "Galois-Division Multiple Access lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Field element tables.
    Field {
        #[command(subcommand)]
        what: FieldCmd,
    },
    /// Cyclotomic cosets of k -> p·k mod n.
    Cosets {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u32,
    },
    /// Forward transform of a ground-field vector.
    Transform {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: Option<usize>,
        /// Ground symbols, comma or space separated.
        #[arg(long)]
        input: String,
    },
    /// Binary <-> Galois symbol transcoding.
    Transcode {
        #[command(subcommand)]
        dir: TranscodeCmd,
    },
    /// One traced frame through the link.
    Frame {
        #[command(flatten)]
        link: LinkArgs,
        /// Ground symbols, one per user.
        #[arg(long)]
        users: String,
        /// Channel bit positions to flip.
        #[arg(long, default_value = "")]
        flip: String,
    },
    /// Shannon bound on the compactness factor.
    Bound {
        /// Compactness factor as a ratio (15/5) or integer; defaults to the
        /// cosets of (n, p).
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, conflicts_with = "snr_db")]
        snr: Option<f64>,
        #[arg(long)]
        snr_db: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Modulation symbols per Galois symbol.
    Hparam {
        #[arg(long)]
        code: String,
        #[arg(long)]
        modulation: String,
        #[arg(long, default_value = "uniform-bits")]
        weighting: String,
    },
    /// Exhaustive analysis of the binary FFFT spectral code.
    CodeAnalysis {
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Modulation checks.
    Modem {
        #[command(subcommand)]
        what: ModemCmd,
    },
    /// Monte Carlo sweep driven by a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum FieldCmd {
    Table {
        #[command(flatten)]
        field: FieldArgs,
    },
}

#[derive(Subcommand, Debug)]
enum TranscodeCmd {
    Encode {
        #[arg(long)]
        code: String,
        #[arg(long)]
        bits: String,
    },
    Decode {
        #[arg(long)]
        code: String,
        /// Power labels (α³, ξ⁵, 0) or field indices.
        #[arg(long)]
        symbols: String,
    },
}

#[derive(Subcommand, Debug)]
enum ModemCmd {
    /// CSV of theoretical vs simulated SER.
    Selftest {
        #[arg(long, default_value = "all")]
        modulation: String,
        #[arg(long, default_value = "0,4,8,12")]
        esn0_db: String,
        #[arg(long, default_value_t = 100_000)]
        symbols: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Use GI(q) instead of GF(p^m).
    #[arg(long)]
    gaussian: bool,
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long, default_value_t = 4)]
    m: u32,
    /// Coefficients low to high, e.g. 1,1,0,0,1.
    #[arg(long)]
    poly: Option<String>,
    #[arg(long, default_value_t = 3)]
    q: u32,
}

#[derive(Args, Debug)]
struct LinkArgs {
    #[arg(long, default_value = "ffft")]
    transform: String,
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long, default_value_t = 4)]
    m: u32,
    #[arg(long)]
    poly: Option<String>,
    #[arg(long, default_value_t = 3)]
    q: u32,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "fs")]
    mode: String,
    #[arg(long)]
    code: Option<String>,
    #[arg(long, default_value = "bpsk")]
    modulation: String,
}

enum Fail {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Runtime(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Fail>;

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(Fail::Usage(msg.into()))
}

pub fn dispatch<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match run(cli.command) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(Fail::Usage(m)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {m}\n\nUsage: gdma <COMMAND> [OPTIONS]; see gdma --help\n"),
        },
        Err(Fail::Runtime(m)) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {m}\n") },
    }
}

fn run(cmd: Command) -> Res<String> {
    match cmd {
        Command::Field { what: FieldCmd::Table { field } } => field_table(&field),
        Command::Cosets { n, p } => cosets(n, p),
        Command::Transform { field, n, input } => transform(&field, n, &input),
        Command::Transcode { dir } => transcode(dir),
        Command::Frame { link, users, flip } => frame(&link, &users, &flip),
        Command::Bound { gamma, n, p, snr, snr_db, t } => bound(gamma.as_deref(), n, p, snr, snr_db, t),
        Command::Hparam { code, modulation, weighting } => hparam(&code, &modulation, &weighting),
        Command::CodeAnalysis { p, m, n } => code_analysis(p, m, n),
        Command::Modem { what: ModemCmd::Selftest { modulation, esn0_db, symbols, seed } } => {
            selftest(&modulation, &esn0_db, symbols, seed)
        }
        Command::Simulate { config, seed, workers, out } => simulate(&config, seed, workers, out),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Res<Vec<T>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().or_else(|_| usage(format!("bad {what} entry {t:?}"))))
        .collect()
}

fn require_prime(p: u32) -> Res<()> {
    if !is_prime(p as u64) {
        return usage(format!("p must be prime, got {p}"));
    }
    Ok(())
}

fn ext_field(p: u32, m: u32, poly: Option<&str>) -> Res<ExtensionField> {
    require_prime(p)?;
    if m == 0 {
        return usage("m must be at least 1");
    }
    Ok(match poly {
        Some(s) => ExtensionField::new(p, m, &parse_list::<u32>(s, "polynomial")?)?,
        None => ExtensionField::with_default_poly(p, m)?,
    })
}

fn poly_string(coeffs: &[u32]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| {
            let c = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            match i {
                0 => c,
                1 => format!("{c}x"),
                _ => format!("{c}x{}", superscript(i as u64)),
            }
        })
        .collect();
    terms.join(" + ")
}

fn field_table(a: &FieldArgs) -> Res<String> {
    let mut s = String::new();
    if a.gaussian {
        let f = GaussianField::new(a.q)?;
        let _ = writeln!(s, "GI({}), generator {}", a.q, f.generator());
        let _ = writeln!(s, "{:<6}{:<10}digits", "power", "element");
        let _ = writeln!(s, "{:<6}{:<10}{}", "0", "0", f.digit_label(crate::gaussian::GaussianInt::ZERO));
        for k in 0..f.group_order() {
            let e = f.generator_pow(k);
            let _ = writeln!(s, "{:<6}{:<10}{}", f.power_label(e), e.to_string(), f.digit_label(e));
        }
    } else {
        let f = ext_field(a.p, a.m, a.poly.as_deref())?;
        let _ = writeln!(s, "GF({}), p(x) = {}", f.size(), poly_string(f.poly()));
        let _ = writeln!(s, "{:<6}{:<8}{:<7}order", "power", "vector", "index");
        let _ = writeln!(s, "{:<6}{:<8}{:<7}-", "0", f.vector_label(ExtElement::ZERO), 0);
        for k in 0..f.group_order() {
            let e = f.alpha_pow(k);
            let ord = f.element_order(e)?;
            let _ = writeln!(s, "{:<6}{:<8}{:<7}{}", f.power_label(e), f.vector_label(e), e.0, ord);
        }
    }
    Ok(s)
}

fn cosets(n: usize, p: u32) -> Res<String> {
    require_prime(p)?;
    if n == 0 {
        return usage("n must be at least 1");
    }
    Ok(format!("{}\n", CosetPartition::new(n, p)?))
}

fn transform(a: &FieldArgs, n: Option<usize>, input: &str) -> Res<String> {
    let v: Vec<u32> = parse_list(input, "input")?;
    let n = n.unwrap_or(v.len());
    let mut s = String::new();
    let _ = writeln!(s, "{:<4}{:<7}vector", "k", "power");
    if a.gaussian {
        let f = Arc::new(GaussianField::new(a.q)?);
        let t = HartleyTransform::new(f.clone(), n)?;
        for (k, e) in t.forward_ground(&v)?.into_iter().enumerate() {
            let _ = writeln!(s, "{:<4}{:<7}{}", k, f.power_label(e), e);
        }
    } else {
        let f = Arc::new(ext_field(a.p, a.m, a.poly.as_deref())?);
        let t = FourierTransform::new(f.clone(), n)?;
        for (k, e) in t.forward_ground(&v)?.into_iter().enumerate() {
            let _ = writeln!(s, "{:<4}{:<7}{}", k, f.power_label(e), f.vector_label(e));
        }
    }
    Ok(s)
}

fn code_by_name(name: &str) -> Res<BuiltinCode> {
    BuiltinCode::parse(name).or_else(|e| usage(e.to_string()))
}

fn transcode(dir: TranscodeCmd) -> Res<String> {
    match dir {
        TranscodeCmd::Encode { code, bits } => {
            let c = code_by_name(&code)?.build()?;
            if bits.chars().any(|ch| ch != '0' && ch != '1' && !ch.is_whitespace()) {
                return usage("bits must be 0/1 characters");
            }
            let b = bits_of(&bits);
            let t = c.encode_bits(&b)?;
            Ok(format!(
                "symbols: {}\nmarked:  {}\npad:     {}\n",
                c.render_symbols(&t.symbols),
                c.render_marked(&t.symbols)?,
                t.pad
            ))
        }
        TranscodeCmd::Decode { code, symbols } => {
            let c = code_by_name(&code)?.build()?;
            let syms = symbols
                .split(|ch: char| ch == ',' || ch.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    let spelled = match parse_power_label(t, &["α", "ξ", "a", "xi"]) {
                        Some(Some(e)) => ["α", "ξ"]
                            .iter()
                            .find_map(|b| c.symbol_for_label(&format!("{b}{}", superscript(e)))),
                        Some(None) => c.symbol_for_label("0"),
                        None => None,
                    };
                    match c.symbol_for_label(t).or(spelled) {
                        Some(x) => Ok(x),
                        None => t.parse::<u32>().or_else(|_| usage(format!("unknown symbol {t:?}"))),
                    }
                })
                .collect::<Res<Vec<u32>>>()?;
            let bits = c.decode_symbols(&syms)?;
            Ok(format!("bits:    {}\nmarked:  {}\n", bit_string(&bits), c.render_marked(&syms)?))
        }
    }
}

fn link_config(a: &LinkArgs) -> Res<LinkConfig> {
    let modulation: Modulation = a.modulation.parse().or_else(|e: Error| usage(e.to_string()))?;
    let mode: Mode = a.mode.parse().or_else(|e: Error| usage(e.to_string()))?;
    let code = a.code.as_deref().map(code_by_name).transpose()?;
    let (transform, group) = match a.transform.to_ascii_lowercase().as_str() {
        "ffft" | "fourier" => {
            require_prime(a.p)?;
            let poly = a.poly.as_deref().map(|s| parse_list(s, "polynomial")).transpose()?;
            ((TransformSpec::Fourier { p: a.p, m: a.m, poly }), (a.p as usize).pow(a.m) - 1)
        }
        "ffht" | "hartley" => ((TransformSpec::Hartley { q: a.q }), (a.q as usize).pow(2) - 1),
        t => return usage(format!("unknown transform {t:?}")),
    };
    Ok(LinkConfig {
        transform,
        n_users: a.n.unwrap_or(group),
        mode,
        code,
        modulation,
        symbol_duration: 1.0,
        energy: EnergyConvention::default(),
    })
}

fn frame(a: &LinkArgs, users: &str, flip: &str) -> Res<String> {
    let cfg = link_config(a)?;
    let users: Vec<u32> = parse_list(users, "user")?;
    let flips: Vec<usize> = parse_list(flip, "flip")?;
    let link = GdmaLink::new(cfg)?;
    Ok(format!("{}\n", link.trace(&users, &flips)?))
}

fn parse_ratio(s: &str) -> Res<Ratio<u64>> {
    let bad = || Fail::Usage(format!("gamma must be a ratio like 15/5, got {s:?}"));
    let r = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b == 0 {
                return Err(bad());
            }
            Ratio::new(a, b)
        }
        None => Ratio::from_integer(s.trim().parse().map_err(|_| bad())?),
    };
    Ok(r)
}

fn bound(gamma: Option<&str>, n: usize, p: u32, snr: Option<f64>, snr_db: Option<f64>, t: f64) -> Res<String> {
    require_prime(p)?;
    let gamma = match gamma {
        Some(g) => parse_ratio(g)?,
        None => CosetPartition::new(n, p)?.gamma_cc(),
    };
    let snr = match (snr, snr_db) {
        (Some(x), _) => x,
        (None, Some(db)) => from_db(db),
        (None, None) => return usage("one of --snr or --snr-db is required"),
    };
    let r = check_bound(gamma, snr, p, n, t)?;
    let g = *r.gamma_cc.numer() as f64 / *r.gamma_cc.denom() as f64;
    let mut s = String::new();
    let _ = writeln!(s, "gamma_cc = {g}");
    let _ = writeln!(s, "snr = {} ({:.2} dB)", r.snr, to_db(r.snr));
    let _ = writeln!(s, "gamma_max = log_{p}(1 + snr) = {:.4}", r.gamma_max);
    let _ = writeln!(s, "satisfied = {}", if r.satisfied { "yes" } else { "no" });
    let _ = writeln!(s, "min_snr = {:.4} ({:.2} dB)", r.min_snr, r.min_snr_db);
    let _ = writeln!(s, "rate = {} bits/s", r.rate_bits_per_s);
    let _ = writeln!(s, "bandwidth = {} Hz", r.bandwidth_hz);
    Ok(s)
}

fn weighting(s: &str) -> Res<Weighting> {
    match s.to_ascii_lowercase().as_str() {
        "uniform-bits" | "bits" => Ok(Weighting::UniformBits),
        "uniform-symbols" | "symbols" => Ok(Weighting::UniformSymbols),
        "nominal" | "nominal-split" => Ok(Weighting::NominalSplit),
        _ => usage(format!("unknown weighting {s:?}")),
    }
}

fn hparam(code: &str, modulation: &str, w: &str) -> Res<String> {
    let c = code_by_name(code)?.build()?;
    let m: Modulation = modulation.parse().or_else(|e: Error| usage(e.to_string()))?;
    let r = c.average_rate(weighting(w)?)?;
    Ok(format!("{:.3}\n", h_param(r.r_f64(), m.size() as u64)?))
}

fn code_analysis(p: u32, m: u32, n: Option<usize>) -> Res<String> {
    let f = ext_field(p, m, None)?;
    let n = n.unwrap_or(f.group_order() as usize);
    let spectra = enumerate_valid_spectra(&f, n)?;
    let r = spectral_code_analysis(&f, &spectra);
    let witness: Vec<String> = r.witness.iter().map(|&e| f.power_label(e)).collect();
    Ok(format!(
        "N = {}\nsize = {}\nlinear = {}\nmin_distance = {}\nwitness = ({})\n",
        r.n,
        r.size,
        if r.linear { "yes" } else { "no" },
        r.min_distance,
        witness.join(", ")
    ))
}

fn selftest(modulation: &str, esn0_db: &str, symbols: u64, seed: u64) -> Res<String> {
    let mods: Vec<Modulation> = if modulation.eq_ignore_ascii_case("all") {
        Modulation::ALL.to_vec()
    } else {
        modulation
            .split(',')
            .map(|m| m.parse().or_else(|e: Error| usage(e.to_string())))
            .collect::<Res<_>>()?
    };
    let points: Vec<f64> = parse_list(esn0_db, "Es/N0")?;
    if symbols == 0 {
        return usage("symbols must be positive");
    }
    let mut s = String::from("modulation,esn0_db,symbols,symbol_errors,simulated_ser,theoretical_ser\n");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for m in mods {
        let c = Constellation::new(m);
        for &db in &points {
            let esn0 = from_db(db);
            let e = count_symbol_errors(&c, esn0, symbols, &mut rng);
            let _ = writeln!(
                s,
                "{m},{db},{symbols},{e},{:.5e},{:.5e}",
                e as f64 / symbols as f64,
                c.theoretical_ser(esn0)
            );
        }
    }
    Ok(s)
}

/// Keys accepted in a `simulate` config file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub transform: String,
    pub p: Option<u32>,
    pub m: Option<u32>,
    pub poly: Option<Vec<u32>>,
    pub q: Option<u32>,
    pub n_users: Option<usize>,
    #[serde(default = "default_modes")]
    pub modes: Vec<String>,
    #[serde(default = "default_modulations")]
    pub modulations: Vec<String>,
    pub code: Option<String>,
    pub symbol_duration: Option<f64>,
    pub energy: Option<String>,
    pub ebn0_points_db: Vec<f64>,
    pub min_bits: Option<u64>,
    pub min_errors: Option<u64>,
    pub max_bits: Option<u64>,
    pub master_seed: Option<u64>,
    pub workers: Option<usize>,
}

fn default_modes() -> Vec<String> {
    vec!["fs".into()]
}

fn default_modulations() -> Vec<String> {
    vec!["bpsk".into()]
}

impl SimulateConfig {
    pub fn into_spec(self) -> crate::Result<SimulationSpec> {
        let cfg_err = |m: String| Error::ConfigInvalid(m);
        let (transform, group) = match self.transform.to_ascii_lowercase().as_str() {
            "ffft" => {
                let (p, m) = (self.p.unwrap_or(2), self.m.unwrap_or(4));
                if self.q.is_some() {
                    return Err(cfg_err("q applies to ffht only".into()));
                }
                (TransformSpec::Fourier { p, m, poly: self.poly }, (p as usize).pow(m) - 1)
            }
            "ffht" => {
                if self.p.is_some() || self.m.is_some() || self.poly.is_some() {
                    return Err(cfg_err("p, m and poly apply to ffft only".into()));
                }
                let q = self.q.unwrap_or(3);
                (TransformSpec::Hartley { q }, (q as usize).pow(2) - 1)
            }
            t => return Err(cfg_err(format!("unknown transform {t:?}"))),
        };
        let modes = self.modes.iter().map(|m| m.parse()).collect::<crate::Result<Vec<Mode>>>()?;
        let modulations =
            self.modulations.iter().map(|m| m.parse()).collect::<crate::Result<Vec<Modulation>>>()?;
        let link = LinkConfig {
            transform,
            n_users: self.n_users.unwrap_or(group),
            mode: *modes.first().ok_or_else(|| cfg_err("modes is empty".into()))?,
            code: self.code.as_deref().map(BuiltinCode::parse).transpose()?,
            modulation: *modulations.first().ok_or_else(|| cfg_err("modulations is empty".into()))?,
            symbol_duration: self.symbol_duration.unwrap_or(1.0),
            energy: self.energy.as_deref().map(str::parse).transpose()?.unwrap_or_default(),
        };
        let d = StopRule::default();
        let spec = SimulationSpec {
            link,
            modes,
            modulations,
            ebn0_points_db: self.ebn0_points_db,
            stop: StopRule {
                min_bits: self.min_bits.unwrap_or(d.min_bits),
                min_errors: self.min_errors.unwrap_or(d.min_errors),
                max_bits: self.max_bits.unwrap_or(d.max_bits),
            },
            master_seed: self.master_seed.unwrap_or(1),
            workers: self.workers.unwrap_or(1),
        };
        spec.validate()?;
        GdmaLink::new(spec.link.clone())?;
        Ok(spec)
    }
}

fn simulate(path: &std::path::Path, seed: Option<u64>, workers: Option<usize>, out: Option<PathBuf>) -> Res<String> {
    let text = std::fs::read_to_string(path).map_err(|e| Fail::Runtime(format!("{}: {e}", path.display())))?;
    let cfg: SimulateConfig = toml::from_str(&text).or_else(|e| usage(format!("{}: {e}", path.display())))?;
    let mut spec = cfg.into_spec().or_else(|e| usage(e.to_string()))?;
    if let Some(s) = seed {
        spec.master_seed = s;
    }
    if let Some(w) = workers {
        if w == 0 {
            return usage("workers must be at least 1");
        }
        spec.workers = w;
    }
    let csv = ber::to_csv(&ber::sweep(&spec)?);
    match out {
        Some(p) => {
            std::fs::write(&p, csv).map_err(|e| Fail::Runtime(format!("{}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}
