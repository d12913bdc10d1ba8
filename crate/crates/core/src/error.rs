use alloc::string::String;
use core::fmt;

use crate::spectral::GenericityKind;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch { expected: usize, found: usize },
    EmptyAlgebra,
    NonCommutative { i: usize, j: usize, k: usize, asymmetry: f64 },
    NonFinite,
    IndexOutOfRange { index: usize, dim: usize },
    NotUnital,
    NotIdempotent { residual: f64 },
    DimensionTooLarge { dim: usize, max: usize },
    InvalidConfig(String),
    NotGeneric(GenericityKind),
    NearZeroDenominator { value: f64 },
    DegreeTooHigh { degree: usize, max: usize },
    DivisionRemainder { remainder: f64 },
    UnpairedIdempotent { index: usize },
    NotDimension4 { dim: usize },
    SingularInnerProduct,
    FormNotAssociative { violation: f64 },
    NotSymmetric { asymmetry: f64 },
    ZeroForm,
    ComplexForm,
    AllStartsNegative,
    HalfNotInSpectrum { distance: f64 },
    InconsistencyWithCorollary(String),
    InvalidParameter(String),
    ChartDegenerate,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::EmptyAlgebra => write!(f, "algebra dimension must be positive"),
            Error::NonCommutative { i, j, k, asymmetry } => write!(
                f,
                "structure constants not commutative at ({i},{j},{k}): |c[i][j][k]-c[j][i][k]| = {asymmetry:e}"
            ),
            Error::NonFinite => write!(f, "non-finite entry"),
            Error::IndexOutOfRange { index, dim } => {
                write!(f, "index {index} out of range for dimension {dim}")
            }
            Error::NotUnital => write!(f, "algebra has no unit"),
            Error::NotIdempotent { residual } => {
                write!(f, "element is not idempotent (residual {residual:e})")
            }
            Error::DimensionTooLarge { dim, max } => {
                write!(f, "dimension {dim} exceeds solver limit {max}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid solver configuration: {msg}"),
            Error::NotGeneric(kind) => write!(f, "algebra is not certified generic ({kind})"),
            Error::NearZeroDenominator { value } => write!(
                f,
                "characteristic polynomial nearly vanishes at 1/2 ({value:e}) in a generic set"
            ),
            Error::DegreeTooHigh { degree, max } => {
                write!(f, "polynomial degree {degree} exceeds {max}")
            }
            Error::DivisionRemainder { remainder } => {
                write!(f, "synthetic division left remainder {remainder:e}")
            }
            Error::UnpairedIdempotent { index } => {
                write!(f, "idempotent {index} has no conjugate in the set")
            }
            Error::NotDimension4 { dim } => write!(f, "identity requires dimension 4, got {dim}"),
            Error::SingularInnerProduct => write!(f, "bilinear form is singular"),
            Error::FormNotAssociative { violation } => {
                write!(f, "bilinear form is not associative (violation {violation:e})")
            }
            Error::NotSymmetric { asymmetry } => {
                write!(f, "tensor is not symmetric (asymmetry {asymmetry:e})")
            }
            Error::ZeroForm => write!(f, "cubic form vanishes identically"),
            Error::ComplexForm => write!(f, "extremal search needs a real cubic form"),
            Error::AllStartsNegative => write!(f, "no start reached a positive objective value"),
            Error::HalfNotInSpectrum { distance } => {
                write!(f, "1/2 is not in the spectrum (nearest eigenvalue at distance {distance:e})")
            }
            Error::InconsistencyWithCorollary(msg) => write!(f, "theory inconsistency: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::ChartDegenerate => write!(f, "affine chart degenerate after retries"),
        }
    }
}

impl core::error::Error for Error {}
