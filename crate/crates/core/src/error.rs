use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("argument must be nonzero")]
    Zero,
    #[error("{0} is not a negative discriminant (must be < 0 and ≡ 0, 1 mod 4)")]
    InvalidDiscriminant(i64),
    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },
    #[error("division by an enclosure containing zero")]
    DivisionByZero,
    #[error("logarithm of an enclosure that is not strictly positive")]
    NonPositiveLog,
    #[error("square root of an enclosure with a negative endpoint")]
    NegativeSqrt,
    #[error("unsupported exponent {0}")]
    UnsupportedExponent(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("request for {requested} table entries exceeds the configured cap of {cap}")]
    MemoryCap { requested: u64, cap: u64 },
    #[error("denominator is not provably positive: {0}")]
    NotProvablyPositive(&'static str),
    #[error("invalid scan configuration: {0}")]
    InvalidScanConfig(String),
    #[error("scan reports overlap or disagree: {0}")]
    ReportMerge(String),
}
