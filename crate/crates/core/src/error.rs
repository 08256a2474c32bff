use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("map parameter r = {0} outside [1, 4]")]
    InvalidMapParameter(u32),

    #[error("invalid EWMA weights ({old_w}, {new_w}, {denom}): need old + new = denom, all positive")]
    InvalidWeights { old_w: u32, new_w: u32, denom: u32 },

    #[error("value {0} outside the 16-bit sample range")]
    SampleOutOfRange(i64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("framing error: unpaired trailing byte at offset {offset}")]
    Framing { offset: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid range: lo ({lo}) must be below hi ({hi})")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("{0} is undefined for degenerate (constant or too short) input")]
    Undefined(&'static str),

    #[error("only {effective} effective bins after merging sparse tails, need at least 4")]
    InsufficientBins { effective: usize },
}
