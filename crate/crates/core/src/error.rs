use thiserror::Error;

/// Errors raised by the ring, algebra, group and representation layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("modulus polynomial is reducible modulo {p}")]
    ReducibleModulus { p: u64 },
    #[error("no built-in irreducible polynomial for residue degree {0}; supply one")]
    NoBuiltinModulus(u32),
    #[error("ring axioms violated: {0}")]
    RingAxiom(String),
    #[error("ring is not local: {0}")]
    NotLocal(String),
    #[error("not finite at degree cap {cap}: {detail}")]
    NotFiniteAtCap { cap: u32, detail: String },
    #[error("element is not a unit")]
    NotUnit,
    #[error("divisor is a zero-divisor")]
    ZeroDivisor,
    #[error("dividend is not divisible by the divisor")]
    NotDivisible,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("ideal is the whole ring")]
    UnitIdeal,
    #[error("enumeration cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },
    #[error("coefficient swell: {bits} bits exceeds cap of {cap} bits")]
    CoefficientSwell { bits: u64, cap: u64 },
    #[error("invalid group table: {0}")]
    GroupAxiom(String),
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("not p-integral: {0}")]
    NotIntegral(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable identifier used in CLI error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "not_prime",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::ReducibleModulus { .. } => "reducible_modulus",
            Error::NoBuiltinModulus(_) => "no_builtin_modulus",
            Error::RingAxiom(_) => "ring_axiom",
            Error::NotLocal(_) => "not_local",
            Error::NotFiniteAtCap { .. } => "not_finite_at_cap",
            Error::NotUnit => "not_unit",
            Error::ZeroDivisor => "zero_divisor",
            Error::NotDivisible => "not_divisible",
            Error::PrecisionExhausted(_) => "precision_exhausted",
            Error::UnitIdeal => "unit_ideal",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::CoefficientSwell { .. } => "coefficient_swell",
            Error::GroupAxiom(_) => "group_axiom",
            Error::NotHomomorphism(_) => "not_homomorphism",
            Error::SingularMatrix => "singular_matrix",
            Error::Hypothesis(_) => "hypothesis",
            Error::NotIntegral(_) => "not_integral",
            Error::Unsupported(_) => "unsupported",
            Error::Parse { .. } => "parse",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
