//! Error type shared by every module of the engine.

use thiserror::Error;

/// Everything that can go wrong while building operators or running the
/// decision pipeline. Inputs are validated at construction, so downstream
/// arithmetic can assume well-formed operands.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum QdtError {
    #[error("matrix data has {got} entries, expected {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, got: usize },

    #[error("matrix entry ({row},{col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right} in {context}")]
    DimensionMismatch {
        left: usize,
        right: usize,
        context: &'static str,
    },

    #[error("product dimension {dimension} exceeds the desk-scale guard {max}")]
    DimensionGuardExceeded { dimension: usize, max: usize },

    #[error("matrix is not Hermitian within tolerance {tol}")]
    NotHermitian { tol: f64 },

    #[error("operator is not positive semidefinite: smallest eigenvalue {min_eigenvalue}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("operator trace {trace} is not 1 within tolerance {tol}")]
    TraceNotOne { trace: f64, tol: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    EigenNotConverged { sweeps: usize },

    #[error("basis labels must be distinct and match the dimension")]
    InvalidBasisLabels,

    #[error("basis index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },

    #[error("amplitudes have squared norm {norm_sq}, expected 1 within {tol}")]
    UnnormalizedAmplitudes { norm_sq: f64, tol: f64 },

    #[error("cannot normalize a zero amplitude vector")]
    ZeroAmplitudes,

    #[error("events must be distinct")]
    DuplicateEvents,

    #[error("event list does not exhaust the basis of the space")]
    NonExhaustiveEvents,

    #[error("prospect lattice needs at least two prospects, got {got}")]
    LatticeTooSmall { got: usize },

    #[error("prospects in a lattice must share one uncertainty profile")]
    MixedUncertainty,

    #[error("lattice probabilities are degenerate: {sum_name} = {sum}")]
    DegenerateLattice { sum_name: &'static str, sum: f64 },

    #[error("interference imaginary residual {residual} exceeds {tol}")]
    ImaginaryResidual { residual: f64, tol: f64 },

    #[error("probability decomposition inconsistent: |p - (f + q)| = {residual}")]
    DecompositionInconsistent { residual: f64 },

    #[error("interference gate violated: |q| = {q_abs} where it must vanish (tol {tol})")]
    GateViolated { q_abs: f64, tol: f64 },

    #[error("lottery '{label}': {reason}")]
    InvalidLottery { label: String, reason: String },

    #[error("invalid utility function: {reason}")]
    InvalidUtility { reason: String },

    #[error("expected utility of '{label}' is negative ({value}); gains-domain pipeline only")]
    NegativeExpectedUtility { label: String, value: f64 },

    #[error("all expected utilities are zero; utility factors undefined")]
    ZeroExpectedUtilities,

    #[error("attraction ranking is ambiguous between '{first}' and '{second}'")]
    AmbiguousAttraction { first: String, second: String },

    #[error("attraction threshold must be finite and nonnegative, got {theta}")]
    InvalidThreshold { theta: f64 },

    #[error("ranking must be a permutation of 0..{expected}")]
    InvalidRanking { expected: usize },

    #[error("utility factors must sum to 1, got {sum}")]
    UnnormalizedFactors { sum: f64 },

    #[error("empirical frequencies: {reason}")]
    InvalidEmpirical { reason: String },

    #[error("invalid attraction distribution: {reason}")]
    InvalidDistribution { reason: String },

    #[error("zero-sum projection did not settle after {iterations} iterations")]
    ProjectionNotConverged { iterations: usize },
}

pub type Result<T> = std::result::Result<T, QdtError>;
