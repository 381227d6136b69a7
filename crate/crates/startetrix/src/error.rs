use std::fmt;

/// Errors reported by mosaic construction, transform execution, and the
/// rate harness.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Mosaic width or height is odd; every pixel must belong to a 2x2
    /// macropixel.
    OddDimensions { width: usize, height: usize },
    /// Bit depth outside the supported 8..=16 range.
    BitDepthRange { bits: u32 },
    /// A sample does not fit the declared bit depth, or a quad holds
    /// non-integer values where integers are required.
    SampleRange { value: f64, bit_depth: u32 },
    /// Two planes (or a plane and a weight field) disagree on size.
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// Subbands and transform spec disagree (mode, dimensions, stage count).
    SpecMismatch(String),
    /// A parameter is out of its valid range (gamma, epsilon, quantizer step).
    InvalidParam(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OddDimensions { width, height } => {
                write!(f, "dimensions must be even, got {width}x{height}")
            }
            Self::BitDepthRange { bits } => {
                write!(f, "bit depth {bits} outside supported range 8..=16")
            }
            Self::SampleRange { value, bit_depth } => {
                write!(f, "sample {value} does not fit {bit_depth}-bit unsigned range")
            }
            Self::DimensionMismatch { expected, got } => write!(
                f,
                "dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Self::SpecMismatch(msg) => write!(f, "spec mismatch: {msg}"),
            Self::InvalidParam(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
