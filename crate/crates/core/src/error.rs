use thiserror::Error;

/// Errors produced anywhere in the codec, simulator or file loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system description: {0}")]
    InvalidSpec(String),
    #[error("invalid source model: {0}")]
    InvalidSource(String),
    #[error("decoder index {index} out of range (J = {count})")]
    DecoderOutOfRange { index: usize, count: usize },
    #[error("symbol {symbol} outside alphabet of size {size}")]
    SymbolOutOfAlphabet { symbol: usize, size: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid block parameters: {0}")]
    InvalidBlock(String),
    #[error("malformed probability mass function: {0}")]
    InvalidPmf(String),
    #[error("invalid block code: {0}")]
    InvalidCode(String),
    #[error("code table parse error at line {line}: {message}")]
    CodeParse { line: usize, message: String },
    #[error("literal enumeration needs {count} codes, above the limit {limit}")]
    CountExceedsLimit { count: u128, limit: u128 },
    #[error("catalog slot for block length {0} is empty or missing")]
    EmptyCatalogSlot(usize),
    #[error("invalid codec configuration: {0}")]
    InvalidConfig(String),
    #[error("sequence length {0} too short (need n >= 4)")]
    SequenceTooShort(usize),
    #[error("bitstream truncated: need {needed} bits, have {available}")]
    TruncatedBitstream { needed: usize, available: usize },
    #[error("code index {index} outside catalog slot of size {count}")]
    IndexOutOfCatalog { index: usize, count: usize },
    #[error("malformed bitstream header: {0}")]
    MalformedHeader(String),
    #[error("unknown scenario: {0}")]
    UnknownScenario(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
