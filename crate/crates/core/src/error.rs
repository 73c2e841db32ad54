use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u32),
    #[error("element index {0} is outside the field")]
    ElementOutOfRange(u32),
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("operands belong to different field towers")]
    MixedTowers,
    #[error("subfield degree {sub} does not divide extension degree {degree}")]
    NotASubfield { sub: u32, degree: u32 },
    #[error("element is not in the base subfield F_{order}")]
    NotInSubfield { order: u32 },
    #[error("vectors are not a basis: rank {rank} < {expected}")]
    NotABasis { rank: usize, expected: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("ragged vector input")]
    Ragged,
    #[error("repeated evaluation point")]
    RepeatedPoint,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("inexact division: nonzero remainder")]
    InexactDivision,
    #[error("polynomial is not linearized over the base subfield")]
    NotLinearized,
    #[error("message degree {degree} exceeds k - 1 = {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("invalid code parameters: {0}")]
    InvalidCode(String),
    #[error("need {needed} helpers, got {got}")]
    InsufficientHelpers { needed: usize, got: usize },
    #[error("helper index {0} is invalid")]
    InvalidHelper(usize),
    #[error("word is not a codeword")]
    NotACodeword,
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("plan does not match code: {0}")]
    PlanMismatch(String),
    #[error("cut-set bound undefined: d - floor(kr/n) + 1 = {0} <= 0")]
    BoundUndefined(i64),
    #[error("hypotheses violated: {}", .0.join("; "))]
    Hypotheses(Vec<String>),
    #[error("no admissible subspace: best max degree {best_degree:?} exceeds bound {bound} after {tried} candidates")]
    NoAdmissibleSubspace {
        best_degree: Option<usize>,
        bound: usize,
        tried: usize,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
