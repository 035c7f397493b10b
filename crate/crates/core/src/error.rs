use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty permutation")]
    EmptyPermutation,
    #[error("token {index}: cannot parse {token:?} as a non-negative integer")]
    BadToken { index: usize, token: String },
    #[error("index {index}: image {value} is out of range for n = {n}")]
    ImageOutOfRange { index: usize, value: usize, n: usize },
    #[error("index {index}: duplicate image {value}")]
    DuplicateImage { index: usize, value: usize },

    #[error("malformed set text: {0}")]
    BadSet(String),
    #[error("element {value} is out of range for modulus {n}")]
    ElementOutOfRange { value: usize, n: usize },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("interval of length {len} does not fit in Z_{n}")]
    BadInterval { len: usize, n: usize },
    #[error("interval is empty or the whole of Z_n; its classification is undefined")]
    DegenerateInterval,
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: usize, right: usize },

    #[error("multiplier {k} is zero modulo {n}")]
    ZeroMultiplier { k: i64, n: usize },
    #[error("index set has {got} elements, pattern needs {expected}")]
    IndexSetSize { got: usize, expected: usize },
    #[error("index set must be strictly increasing and inside [0, {n})")]
    BadIndexSet { n: usize },
    #[error("pattern order {m} exceeds host size {n}")]
    PatternTooLong { m: usize, n: usize },
    #[error("order {m} outside the supported range {min}..={max}")]
    OrderOutOfRange { m: usize, min: usize, max: usize },
    #[error("power iteration did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("size {base}^{exp} overflows")]
    SizeOverflow { base: usize, exp: u32 },
    #[error("factor sizes must all be at least 2 (got {0})")]
    FactorTooSmall(usize),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("search cap {cap} exceeded")]
    SearchCapExceeded { cap: usize },
    #[error("exhaustive search over S_{n} is refused without a node budget (n > {limit})")]
    SearchRefused { n: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
