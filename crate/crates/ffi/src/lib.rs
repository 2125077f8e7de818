//! C ABI over `gdma-core`.
//!
//! Every fallible call returns a [`GdmaStatus`]; on failure the message is
//! available from [`gdma_last_error`] on the same thread. Objects are opaque
//! handles created by `*_new` and released by the matching `*_free`.
//! Field elements are passed as their index (`Σ c_i p^i`).

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gdma::ber::{self, SimulationSpec, StopRule};
use gdma::cyclotomic::{shannon_bound, CosetPartition};
use gdma::field::{ExtensionField, FiniteField};
use gdma::link::{self, EnergyConvention, GdmaLink as Link, LinkConfig, Mode, TransformSpec};
use gdma::modem::Modulation;
use gdma::transcoder::{h_param, BuiltinCode, Weighting};
use gdma::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdmaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidField = 3,
    InvalidTransform = 4,
    InvalidCode = 5,
    InvalidLink = 6,
    InvalidFrame = 7,
    InvalidSimulation = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdmaTransformKind {
    Fourier = 0,
    Hartley = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdmaMode {
    Full = 0,
    Compressed = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdmaModulation {
    Bpsk = 0,
    Qpsk = 1,
    Psk8 = 2,
    Qam16 = 3,
    Qam32 = 4,
    Qam64 = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdmaEnergy {
    ChannelBit = 0,
    PayloadBit = 1,
}

/// Link parameters. `p`, `m` apply to the Fourier transform (default
/// polynomial), `q` to the Hartley transform. `n_users` of 0 means the full
/// group order. The transcoder is the default for the field.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GdmaLinkConfig {
    pub transform: GdmaTransformKind,
    pub p: u32,
    pub m: u32,
    pub q: u32,
    pub n_users: usize,
    pub mode: GdmaMode,
    pub modulation: GdmaModulation,
    pub energy: GdmaEnergy,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GdmaBerRecord {
    pub ebn0_db: f64,
    pub bits_observed: u64,
    pub bit_errors: u64,
    pub ber: f64,
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
}

/// GF(p^m) with table arithmetic.
pub struct GdmaField(ExtensionField);

/// A configured multiplexing link.
pub struct GdmaLink(Link);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(GdmaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        use Error::*;
        let status = match e {
            NonPrimeModulus(_) | InvalidPolynomial(_) | NonPrimitivePolynomial { .. } | FieldTooLarge(_)
            | DivisionByZero | ZeroElement | FieldMismatch | MinusOneIsResidue(_) | EvenCharacteristic
            | UnsupportedPrimePower(_) => GdmaStatus::InvalidField,
            LengthMismatch { .. } | LengthNotDivisor { .. } | NotGroundElement(_) | NonInvertibleLength { .. }
            | SingularKernelMatrix | NonCoprimeLength { .. } | InvalidSpectrum(_) | CompressionUnavailable => {
                GdmaStatus::InvalidTransform
            }
            UnknownCode(_) | NotPowerOfTwo(_) | NonInstantaneousCode(_) | IncompleteCode(_) | UnparseableBits(_)
            | UnknownSymbol(_) | InvalidCode(_) => GdmaStatus::InvalidCode,
            ConfigInvalid(_) => GdmaStatus::InvalidLink,
            FrameLengthMismatch { .. } => GdmaStatus::InvalidFrame,
            InvalidSpec(_) => GdmaStatus::InvalidSimulation,
            _ => GdmaStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null() -> Fail {
    Fail(GdmaStatus::NullPointer, "null pointer argument".into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GdmaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GdmaStatus::Ok,
        Ok(Err(Fail(s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("internal panic");
            GdmaStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Message of the last failed call on this thread; empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gdma_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn gdma_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds GF(p^m). `poly` holds m+1 coefficients low to high; pass null to
/// use the shipped polynomial.
#[no_mangle]
pub unsafe extern "C" fn gdma_field_new(
    p: u32,
    m: u32,
    poly: *const u32,
    poly_len: usize,
    field: *mut *mut GdmaField,
) -> GdmaStatus {
    guard(|| {
        let slot = out(field)?;
        let f = if poly.is_null() {
            ExtensionField::with_default_poly(p, m)?
        } else {
            ExtensionField::new(p, m, slice(poly, poly_len)?)?
        };
        *slot = Box::into_raw(Box::new(GdmaField(f)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gdma_field_free(field: *mut GdmaField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of elements, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gdma_field_size(field: *const GdmaField) -> u64 {
    field.as_ref().map_or(0, |f| f.0.size())
}

unsafe fn with_elems(
    field: *const GdmaField,
    a: u32,
    b: u32,
    f: impl FnOnce(&ExtensionField, gdma::field::ExtElement, gdma::field::ExtElement) -> Result<u32, Fail>,
    result: *mut u32,
) -> GdmaStatus {
    guard(|| {
        let fld = &field.as_ref().ok_or_else(null)?.0;
        let slot = out(result)?;
        let x = fld.from_index(a).ok_or(Error::FieldMismatch)?;
        let y = fld.from_index(b).ok_or(Error::FieldMismatch)?;
        *slot = f(fld, x, y)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gdma_field_add(field: *const GdmaField, a: u32, b: u32, result: *mut u32) -> GdmaStatus {
    with_elems(field, a, b, |f, x, y| Ok(f.index(f.add(x, y))), result)
}

#[no_mangle]
pub unsafe extern "C" fn gdma_field_mul(field: *const GdmaField, a: u32, b: u32, result: *mut u32) -> GdmaStatus {
    with_elems(field, a, b, |f, x, y| Ok(f.index(f.mul(x, y))), result)
}

#[no_mangle]
pub unsafe extern "C" fn gdma_field_div(field: *const GdmaField, a: u32, b: u32, result: *mut u32) -> GdmaStatus {
    with_elems(
        field,
        a,
        b,
        |f, x, y| Ok(f.index(f.mul(x, f.inv(y).ok_or(Error::DivisionByZero)?))),
        result,
    )
}

#[no_mangle]
pub unsafe extern "C" fn gdma_field_pow(field: *const GdmaField, a: u32, e: u64, result: *mut u32) -> GdmaStatus {
    with_elems(field, a, 0, |f, x, _| Ok(f.index(f.pow(x, e))), result)
}

/// Multiplicative order of a nonzero element.
#[no_mangle]
pub unsafe extern "C" fn gdma_field_order(field: *const GdmaField, a: u32, order: *mut u64) -> GdmaStatus {
    guard(|| {
        let fld = &field.as_ref().ok_or_else(null)?.0;
        let slot = out(order)?;
        *slot = fld.element_order(fld.from_index(a).ok_or(Error::FieldMismatch)?)?;
        Ok(())
    })
}

/// Number of cyclotomic cosets of `k -> p·k mod n` and `γ_cc = n/ν` as a
/// reduced fraction.
#[no_mangle]
pub unsafe extern "C" fn gdma_gamma_cc(n: usize, p: u32, nu: *mut usize, numer: *mut u64, denom: *mut u64) -> GdmaStatus {
    guard(|| {
        let (nu, numer, denom) = (out(nu)?, out(numer)?, out(denom)?);
        let part = CosetPartition::new(n, p)?;
        let g = part.gamma_cc();
        *nu = part.nu();
        *numer = *g.numer();
        *denom = *g.denom();
        Ok(())
    })
}

/// `log_p(1 + snr)` for linear `snr`.
#[no_mangle]
pub unsafe extern "C" fn gdma_shannon_bound(snr: f64, p: u32, gamma_max: *mut f64) -> GdmaStatus {
    guard(|| {
        *out(gamma_max)? = shannon_bound(snr, p)?;
        Ok(())
    })
}

/// h for a built-in code name ("A'", "B", "direct(2,4)") under uniform bits.
#[no_mangle]
pub unsafe extern "C" fn gdma_h_param(code: *const c_char, modulation: GdmaModulation, h: *mut f64) -> GdmaStatus {
    guard(|| {
        let slot = out(h)?;
        if code.is_null() {
            return Err(null());
        }
        let name = CStr::from_ptr(code)
            .to_str()
            .map_err(|_| Fail(GdmaStatus::InvalidArgument, "code name is not UTF-8".into()))?;
        let r = BuiltinCode::parse(name)?.build()?.average_rate(Weighting::UniformBits)?;
        *slot = h_param(r.r_f64(), modulation_of(modulation).size() as u64)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gdma_frame_error_bound(n_users: usize, h: f64, pe1: f64, bound: *mut f64) -> GdmaStatus {
    guard(|| {
        *out(bound)? = link::frame_error_bound(n_users, h, pe1)?;
        Ok(())
    })
}

/// 95% Wilson score interval.
#[no_mangle]
pub unsafe extern "C" fn gdma_confidence_interval(errors: u64, trials: u64, low: *mut f64, high: *mut f64) -> GdmaStatus {
    guard(|| {
        let (lo, hi) = (out(low)?, out(high)?);
        if trials == 0 || errors > trials {
            return Err(Fail(GdmaStatus::InvalidArgument, "need 0 <= errors <= trials, trials >= 1".into()));
        }
        (*lo, *hi) = ber::confidence_interval(errors, trials);
        Ok(())
    })
}

fn modulation_of(m: GdmaModulation) -> Modulation {
    match m {
        GdmaModulation::Bpsk => Modulation::Bpsk,
        GdmaModulation::Qpsk => Modulation::Qpsk,
        GdmaModulation::Psk8 => Modulation::Psk8,
        GdmaModulation::Qam16 => Modulation::Qam16,
        GdmaModulation::Qam32 => Modulation::Qam32,
        GdmaModulation::Qam64 => Modulation::Qam64,
    }
}

fn link_config(c: &GdmaLinkConfig) -> LinkConfig {
    let (transform, group) = match c.transform {
        GdmaTransformKind::Fourier => {
            (TransformSpec::Fourier { p: c.p, m: c.m, poly: None }, (c.p as usize).saturating_pow(c.m).saturating_sub(1))
        }
        GdmaTransformKind::Hartley => (TransformSpec::Hartley { q: c.q }, (c.q as usize).saturating_pow(2).saturating_sub(1)),
    };
    LinkConfig {
        transform,
        n_users: if c.n_users == 0 { group } else { c.n_users },
        mode: match c.mode {
            GdmaMode::Full => Mode::Fs,
            GdmaMode::Compressed => Mode::Cc,
        },
        code: None,
        modulation: modulation_of(c.modulation),
        symbol_duration: 1.0,
        energy: match c.energy {
            GdmaEnergy::ChannelBit => EnergyConvention::ChannelBit,
            GdmaEnergy::PayloadBit => EnergyConvention::PayloadBit,
        },
    }
}

#[no_mangle]
pub unsafe extern "C" fn gdma_link_new(config: *const GdmaLinkConfig, link: *mut *mut GdmaLink) -> GdmaStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(null)?;
        let slot = out(link)?;
        let l = Link::new(link_config(cfg))?;
        *slot = Box::into_raw(Box::new(GdmaLink(l)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gdma_link_free(link: *mut GdmaLink) {
    if !link.is_null() {
        drop(Box::from_raw(link));
    }
}

/// Users per frame, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gdma_link_n_users(link: *const GdmaLink) -> usize {
    link.as_ref().map_or(0, |l| l.0.n_users())
}

/// Upper bound on the bits a frame can occupy.
#[no_mangle]
pub unsafe extern "C" fn gdma_link_max_frame_bits(link: *const GdmaLink) -> usize {
    link.as_ref().map_or(0, |l| l.0.symbols_per_frame() * l.0.code().max_word_len())
}

/// Multiplexes one ground symbol per user into frame bits (one byte per
/// bit). `written` receives the frame length; if `capacity` is too small the
/// call fails with `BUFFER_TOO_SMALL` and `written` holds the needed size.
#[no_mangle]
pub unsafe extern "C" fn gdma_link_mux(
    link: *const GdmaLink,
    users: *const u32,
    n_users: usize,
    bits: *mut u8,
    capacity: usize,
    written: *mut usize,
) -> GdmaStatus {
    guard(|| {
        let l = &link.as_ref().ok_or_else(null)?.0;
        let written = out(written)?;
        let frame = l.mux(slice(users, n_users)?)?;
        *written = frame.bits.len();
        if capacity < frame.bits.len() {
            return Err(Fail(GdmaStatus::BufferTooSmall, format!("frame needs {} bits", frame.bits.len())));
        }
        slice_mut(bits, frame.bits.len())?.copy_from_slice(&frame.bits);
        Ok(())
    })
}

/// Recovers the users from frame bits. `undecodable` and `out_of_subfield`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn gdma_link_demux(
    link: *const GdmaLink,
    bits: *const u8,
    n_bits: usize,
    users: *mut u32,
    n_users: usize,
    undecodable: *mut usize,
    out_of_subfield: *mut usize,
) -> GdmaStatus {
    guard(|| {
        let l = &link.as_ref().ok_or_else(null)?.0;
        if n_users != l.n_users() {
            return Err(Error::LengthMismatch { expected: l.n_users(), got: n_users }.into());
        }
        let bits = slice(bits, n_bits)?;
        if bits.iter().any(|&b| b > 1) {
            return Err(Fail(GdmaStatus::InvalidFrame, "bits must be 0 or 1".into()));
        }
        let rx = l.demux(bits)?;
        slice_mut(users, n_users)?.copy_from_slice(&rx.users);
        if let Some(u) = undecodable.as_mut() {
            *u = rx.undecodable;
        }
        if let Some(o) = out_of_subfield.as_mut() {
            *o = rx.out_of_subfield;
        }
        Ok(())
    })
}

/// Runs one Monte Carlo point of the configured link.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn gdma_run_point(
    config: *const GdmaLinkConfig,
    ebn0_db: f64,
    min_bits: u64,
    min_errors: u64,
    max_bits: u64,
    seed: u64,
    workers: usize,
    record: *mut GdmaBerRecord,
) -> GdmaStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(null)?;
        let slot = out(record)?;
        let mut spec = SimulationSpec::new(link_config(cfg), vec![ebn0_db]);
        spec.stop = StopRule { min_bits, min_errors, max_bits };
        spec.master_seed = seed;
        spec.workers = workers;
        let r = ber::run_point(&spec, ebn0_db)?;
        *slot = GdmaBerRecord {
            ebn0_db: r.ebn0_db,
            bits_observed: r.bits_observed,
            bit_errors: r.bit_errors,
            ber: r.ber,
            symbols_observed: r.symbols_observed,
            symbol_errors: r.symbol_errors,
            ser: r.ser,
            frames: r.frames,
            frame_errors: r.frame_errors,
            fer: r.fer,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            seed: r.seed,
            budget_exhausted: r.budget_exhausted,
        };
        Ok(())
    })
}
