use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("invalid rational literal `{0}`")]
    Rational(String),
    #[error("invalid decimal literal `{0}`")]
    Decimal(String),
    #[error("invalid polynomial json: {0}")]
    Json(String),
    #[error("invalid matrix dump: {0}")]
    MatrixDump(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("map `{0}` is not orthogonal")]
    NonOrthogonalMap(String),
    #[error("polynomial has no degree-4 homogeneous part")]
    NoQuarticPart,
    #[error("unknown case preset {0} (expected 1..=5)")]
    UnknownCase(u8),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("candidate set does not contain the identity")]
    MissingIdentity,
    #[error("invariant subset is not closed: {0} * {1} is missing")]
    NotClosed(String, String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("term x^{0} y^{1} exceeds the padding policy (total degree <= 4)")]
    DegreeTooHigh(u32, u32),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigError {
    #[error("matrix is not hermitian")]
    NotHermitian,
    #[error("eigensolver failed to converge: {0}")]
    ConvergenceFailure(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResonanceError {
    #[error("no theta-stationary complex eigenvalue with Im E <= 0 (best stability {best:.3e})")]
    NoStationaryPoint { best: f64 },
    #[error("invalid theta grid: {0}")]
    InvalidThetaGrid(String),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Eig(#[from] EigError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RpmError {
    #[error("need Riccati coefficients up to index {needed}, have {available}")]
    InsufficientCoefficients { needed: usize, available: usize },
    #[error("Newton iteration for D = {dim} did not converge")]
    NewtonDivergence { dim: usize },
    #[error("invalid RPM setup: {0}")]
    InvalidSetup(String),
}

/// Crate-level error used by front ends that chain several stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Eig(#[from] EigError),
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
    #[error(transparent)]
    Rpm(#[from] RpmError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable variant name, e.g. `"NewtonDivergence"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::Poly(e) => match e {
                PolyError::NonOrthogonalMap(_) => "NonOrthogonalMap",
                PolyError::NoQuarticPart => "NoQuarticPart",
                PolyError::UnknownCase(_) => "UnknownCase",
            },
            Error::Symmetry(e) => match e {
                SymmetryError::MissingIdentity => "MissingIdentity",
                SymmetryError::NotClosed(..) => "NotClosed",
            },
            Error::Basis(e) | Error::Resonance(ResonanceError::Basis(e)) => basis_name(e),
            Error::Eig(e) | Error::Resonance(ResonanceError::Eig(e)) => eig_name(e),
            Error::Resonance(e) => match e {
                ResonanceError::NoStationaryPoint { .. } => "NoStationaryPoint",
                _ => "InvalidThetaGrid",
            },
            Error::Rpm(e) => match e {
                RpmError::InsufficientCoefficients { .. } => "InsufficientCoefficients",
                RpmError::NewtonDivergence { .. } => "NewtonDivergence",
                RpmError::InvalidSetup(_) => "InvalidSetup",
            },
            Error::Io(_) => "IoError",
        }
    }
}

fn basis_name(e: &BasisError) -> &'static str {
    match e {
        BasisError::DegreeTooHigh(..) => "DegreeTooHigh",
        BasisError::InvalidBasis(_) => "InvalidBasis",
    }
}

fn eig_name(e: &EigError) -> &'static str {
    match e {
        EigError::NotHermitian => "NotHermitian",
        EigError::ConvergenceFailure(_) => "ConvergenceFailure",
    }
}
