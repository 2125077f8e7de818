use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrimeModulus(u64),
    #[error("invalid field polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("polynomial is not primitive: ord(x) = {order}, expected {expected}")]
    NonPrimitivePolynomial { order: u64, expected: u64 },
    #[error("field of {0} elements is too large for table arithmetic")]
    FieldTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("the zero element has no multiplicative order")]
    ZeroElement,
    #[error("element does not belong to this field")]
    FieldMismatch,
    #[error("-1 is a quadratic residue in GF({0}); GI({0}) is not a field")]
    MinusOneIsResidue(u32),
    #[error("characteristic 2 is not allowed here")]
    EvenCharacteristic,
    #[error("GF({0}) base fields with a composite prime power are not supported")]
    UnsupportedPrimePower(u32),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{n} does not divide the multiplicative group order {group}")]
    LengthNotDivisor { n: usize, group: u64 },
    #[error("value {0} is not in the ground field")]
    NotGroundElement(u32),
    #[error("block length {n} is not invertible modulo {p}")]
    NonInvertibleLength { n: usize, p: u32 },
    #[error("kernel matrix is singular")]
    SingularKernelMatrix,
    #[error("gcd({n}, {p}) != 1")]
    NonCoprimeLength { n: usize, p: u32 },
    #[error("spectrum violates the conjugacy constraint at index {0}")]
    InvalidSpectrum(usize),
    #[error("FFHT spectra of this kernel have no verified conjugacy rule; compression is disabled")]
    CompressionUnavailable,
    #[error("SNR must be non-negative, got {0}")]
    NegativeSnr(f64),
    #[error("symbol duration must be positive, got {0}")]
    NonPositiveDuration(f64),
    #[error("enumeration of 2^{0} inputs is too large")]
    EnumerationTooLarge(usize),
    #[error("spectral code analysis requires a binary ground field, got p = {0}")]
    NotBinary(u32),
    #[error("unknown code {0:?}")]
    UnknownCode(String),
    #[error("direct code requires a power-of-two alphabet, got {0}")]
    NotPowerOfTwo(u64),
    #[error("code {0} is not instantaneous; streaming parse is refused")]
    NonInstantaneousCode(String),
    #[error("code {0} is incomplete (Kraft sum != 1)")]
    IncompleteCode(String),
    #[error("bit string cannot be parsed at offset {0}")]
    UnparseableBits(usize),
    #[error("symbol {0} is not in the code alphabet")]
    UnknownSymbol(u32),
    #[error("invalid code table: {0}")]
    InvalidCode(String),
    #[error("constellation size must be a power of two >= 2, got {0}")]
    InvalidConstellationSize(u64),
    #[error("unknown modulation {0:?}")]
    UnknownModulation(String),
    #[error("probability out of range: {0}")]
    InvalidProbability(f64),
    #[error("invalid link configuration: {0}")]
    ConfigInvalid(String),
    #[error("frame of {got} bits cannot hold {symbols} symbols")]
    FrameLengthMismatch { got: usize, symbols: usize },
    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),
}
