use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("support touches the origin; the dyadic sum is not finite")]
    SupportTouchesZero,

    #[error("empty support")]
    EmptySupport,

    #[error("phase undefined on support cell [{lo}, {hi})")]
    PhaseUndefined { lo: String, hi: String },

    #[error("support escapes S_{n}: piece [{lo}, {hi})")]
    SupportEscapes { n: u32, lo: String, hi: String },

    #[error("input is not a verified wavelet: {0}")]
    NotAWavelet(String),

    #[error("dyadic sum near the origin is not constant on {side} side; dimension function has no finite step form")]
    NonConstantNearOrigin { side: &'static str },

    #[error("grid step {step} cannot resolve the smallest support piece of length {piece}")]
    GridTooCoarse { step: f64, piece: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
