use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter violates a domain invariant; `name` is the offending field.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("invalid {axis} range: min {min} must be finite and below max {max}")]
    InvalidRange { axis: &'static str, min: f64, max: f64 },

    #[error("invalid {axis} point count {count}: {reason}")]
    InvalidCount { axis: &'static str, count: usize, reason: &'static str },

    /// The spectral amplitude cancels on the whole grid; the state is empty.
    #[error("null kernel: Frobenius norm {norm:e} is below threshold {threshold:e}")]
    NullKernel { norm: f64, threshold: f64 },

    #[error("decomposition failed: {0}")]
    Decomposition(&'static str),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("numerical sanity check failed: eigenvalue {index} is {value:e}")]
    NumericalSanity { index: usize, value: f64 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid sweep axis: {0}")]
    InvalidAxis(String),

    #[error("entropy map has no finite cells")]
    EmptyMap,
}

impl Error {
    pub fn is_null_kernel(&self) -> bool {
        matches!(self, Error::NullKernel { .. })
    }
}
