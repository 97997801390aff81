use thiserror::Error;

/// Errors raised by the library.
///
/// Validation failures (bad shapes, wrong degrees, malformed input) are kept
/// apart from numerical-boundary failures (an eigenvalue sitting on a cut or on
/// a spectral split boundary); the CLI maps them to different exit codes.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("length d = {0} must be odd for this construction")]
    EvenLength(usize),
    #[error("dims has {got} entries, expected d+1 = {expected}")]
    DimsLength { expected: usize, got: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("dualized determinant elements cannot be fused")]
    Dualized,
    #[error("line element of the wrong kind: {0}")]
    LineKind(String),
    #[error("differential does not square to zero at degree {degree} (residual {residual:e})")]
    NotComplex { degree: usize, residual: f64 },
    #[error("chirality operator is not an involution at degree {degree} (residual {residual:e})")]
    NotInvolution { degree: usize, residual: f64 },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("complex is not acyclic (betti numbers {0:?})")]
    NotAcyclic(Vec<usize>),
    #[error("frames belong to different complexes: {0}")]
    FrameMismatch(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("eigenvalue modulus {modulus:e} lies on the split boundary lambda = {lambda:e}")]
    SplitBoundary { modulus: f64, lambda: f64 },
    #[error("eigenvalue {re:e}{im:+e}i lies on the cut of angle {theta}")]
    OnCut { re: f64, im: f64, theta: f64 },
    #[error("angle {theta} is not admissible: {reason}")]
    BranchAmbiguity { theta: f64, reason: String },
    #[error("series did not converge: {0}")]
    NoConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures caused by spectrum sitting on a cut or a boundary,
    /// as opposed to malformed input.
    pub fn is_numerical_boundary(&self) -> bool {
        matches!(
            self,
            Error::SplitBoundary { .. } | Error::OnCut { .. } | Error::BranchAmbiguity { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
