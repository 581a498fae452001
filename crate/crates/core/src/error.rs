use core::fmt;

use crate::image::Level;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Width, height or maxval is zero.
    ZeroDimension,
    DimensionMismatch { expected: usize, actual: usize },
    PixelOutOfRange { index: usize, value: u32, maxval: u16 },
    EmptyHistogram,
    TooManyPixels(u64),
    CountsOutOfRange { len: usize, maxval: u16 },
    EmptyInterval { lo: Level, hi: Level },
    UniformCluster,
    TooManyClusters { k: usize, g: usize },
    ZeroClusters,
    InvalidAtoms,
    InvalidDigit { position: usize, digit: u8 },
    DigitAfterUniform { position: usize },
    LengthMismatch { level: Level, expected: usize, actual: usize },
    ReplayResidue,
    MissingLevel(Level),
    NotAntichain,
    IncompleteCover(Level),
    UnknownNode(usize),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroDimension => write!(f, "width, height and maxval must be positive"),
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "expected {expected} pixels, got {actual}")
            }
            Error::PixelOutOfRange { index, value, maxval } => {
                write!(f, "pixel {index} has value {value} above maxval {maxval}")
            }
            Error::EmptyHistogram => write!(f, "histogram has no pixels"),
            Error::TooManyPixels(n) => write!(f, "{n} pixels exceed the supported 2^40"),
            Error::CountsOutOfRange { len, maxval } => {
                write!(f, "{len} counts do not fit levels 0..={maxval}")
            }
            Error::EmptyInterval { lo, hi } => write!(f, "no occupied level in [{lo}, {hi}]"),
            Error::UniformCluster => write!(f, "uniform cluster cannot be split"),
            Error::TooManyClusters { k, g } => {
                write!(f, "{k} clusters requested but only {g} occupied levels")
            }
            Error::ZeroClusters => write!(f, "cluster count must be positive"),
            Error::InvalidAtoms => write!(f, "atoms must be non-empty, ordered and disjoint"),
            Error::InvalidDigit { position, digit } => {
                write!(f, "digit {digit} at position {position} is not in {{0,1,2}}")
            }
            Error::DigitAfterUniform { position } => {
                write!(f, "digit at position {position} follows a 1 but is not 1")
            }
            Error::LengthMismatch { level, expected, actual } => {
                write!(f, "code of level {level} has {actual} digits, table depth is {expected}")
            }
            Error::ReplayResidue => write!(f, "value does not reduce to zero in the given depth"),
            Error::MissingLevel(l) => write!(f, "level {l} is not covered"),
            Error::NotAntichain => write!(f, "cut contains a node and one of its ancestors"),
            Error::IncompleteCover(l) => write!(f, "level {l} has no ancestor in the cut"),
            Error::UnknownNode(id) => write!(f, "node {id} does not exist"),
        }
    }
}

impl core::error::Error for Error {}
