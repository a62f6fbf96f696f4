use thiserror::Error;

use crate::C64;

/// Errors raised by the certificate and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KappaError {
    #[error("evaluation point {0} is within tolerance of a pole")]
    PoleHit(C64),
    #[error("pole {0} lies within tolerance of the unit circle")]
    BoundaryPole(C64),
    #[error("pole {0} lies inside the unit disk")]
    InteriorPole(C64),
    #[error("numerator fails the Schur-class test (sup estimate {sup})")]
    NotGeneralizedSchur { sup: f64 },
    #[error("1 - S(z) vanishes numerically at {0}")]
    DegenerateValue(C64),
    #[error("interpolation points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("point {0} is not strictly inside the domain")]
    PointOnBoundary(C64),
    #[error("sample {0} is within tolerance of a pole")]
    SamplePole(C64),
    #[error("spectral radius {0} is not below 1")]
    SpectralRadiusTooLarge(f64),
    #[error("iteration stalled with residual {0}")]
    NonConvergence(f64),
    #[error("tail bound {tail} exceeds tolerance at truncation {order}")]
    TruncationInsufficient { order: usize, tail: f64 },
    #[error("model space requires a Blaschke product of positive degree")]
    DegreeZero,
    #[error("pole {0} is too close to the closed unit disk")]
    PoleNearDisk(C64),
    #[error("denominator q(T) is numerically singular")]
    SingularDenominator,
    #[error("operator does not commute with the compressed shift (residual {0})")]
    NotInCommutant(f64),
    #[error("negative-squares count changed under refinement ({coarse} -> {fine})")]
    TruncationUnstable { coarse: usize, fine: usize },
    #[error("no clean singular-value gap (ratio {0})")]
    NoCleanGap(f64),
    #[error("evaluation point {0} coincides with a basis node")]
    NodeCoincidence(f64),
    #[error("evaluation point {0} is too close to the real line")]
    EvaluationTooCloseToLine(C64),
    #[error("assembly routes disagree by {0}")]
    AssemblyMismatch(f64),
    #[error("data are infeasible: certificate has {0} negative squares")]
    Infeasible(usize),
    #[error("node value of modulus {0} exceeds 1 while the Pick matrix is numerically PSD")]
    DegenerateNode(f64),
    #[error("model space has repeated zeros; use the Nudel'man form with a Jordan-type operator")]
    RepeatedZeros,
    #[error("matrix is not Hermitian (defect {0})")]
    NotHermitian(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, KappaError>;
