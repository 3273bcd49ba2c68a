//! Events as projectors, states of mind as density operators.
//!
//! An elementary event is a basis projector `|n><n|`; its probability under
//! a statistical operator `rho` is `Tr(rho |n><n|)`. An uncertain union
//! superposes basis vectors with amplitudes, and its probability splits
//! into a classical part (what a diagonal `rho` would give) plus an
//! interference term carried by the off-diagonal matrix elements.

use crate::error::{QdtError, Result};
use crate::linalg::{CMatrix, HilbertSpace, DEFAULT_TOL};
use num_complex::Complex64;

/// Residual bound for quantities that must come out real: imaginary parts
/// above this are treated as corruption, not rounding.
pub const IMAG_RESIDUAL_TOL: f64 = 1e-10;

/// One basis outcome `|n>` of a space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryEvent {
    space: HilbertSpace,
    index: usize,
}

impl ElementaryEvent {
    pub fn new(space: HilbertSpace, index: usize) -> Result<Self> {
        if index >= space.dimension() {
            return Err(QdtError::IndexOutOfRange {
                index,
                dimension: space.dimension(),
            });
        }
        Ok(Self { space, index })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn label(&self) -> &str {
        self.space.label(self.index)
    }
}

/// Density operator: Hermitian, positive semidefinite, unit trace, all
/// verified at construction within `tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticalOperator {
    matrix: CMatrix,
    space: HilbertSpace,
}

impl StatisticalOperator {
    pub fn new(matrix: CMatrix, space: HilbertSpace, tol: f64) -> Result<Self> {
        if matrix.rows() != space.dimension() {
            return Err(QdtError::DimensionMismatch {
                left: matrix.rows(),
                right: space.dimension(),
                context: "statistical operator vs space",
            });
        }
        if !matrix.is_hermitian(tol)? {
            return Err(QdtError::NotHermitian { tol });
        }
        let trace = matrix.trace()?;
        if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
            return Err(QdtError::TraceNotOne {
                trace: trace.re,
                tol,
            });
        }
        if !matrix.is_positive_semidefinite(tol)? {
            let min = crate::linalg::hermitian_eigenvalues(&matrix)?[0];
            return Err(QdtError::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        Ok(Self { matrix, space })
    }

    /// Wraps a matrix with a synthesized numeric-label space.
    pub fn from_matrix(matrix: CMatrix, tol: f64) -> Result<Self> {
        let space = HilbertSpace::with_dimension(matrix.rows())?;
        Self::new(matrix, space, tol)
    }

    /// Pure state `|psi><psi|` from a column vector (normalized within
    /// [`DEFAULT_TOL`], then renormalized exactly).
    pub fn pure(state: &CMatrix, space: HilbertSpace) -> Result<Self> {
        let norm_sq: f64 = state.data().iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > DEFAULT_TOL {
            return Err(QdtError::UnnormalizedAmplitudes {
                norm_sq,
                tol: DEFAULT_TOL,
            });
        }
        let projector = state.outer(state)?.scale(1.0 / norm_sq);
        Self::new(projector, space, DEFAULT_TOL)
    }

    pub fn maximally_mixed(space: HilbertSpace) -> Self {
        let d = space.dimension();
        Self {
            matrix: CMatrix::identity(d).scale(1.0 / d as f64),
            space,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }
}

/// Uncertain union of basis events: amplitudes over the whole basis with
/// unit squared norm (zeros mark absent modes).
#[derive(Debug, Clone, PartialEq)]
pub struct UncertainUnion {
    space: HilbertSpace,
    amplitudes: Vec<Complex64>,
}

impl UncertainUnion {
    pub fn new(space: HilbertSpace, amplitudes: Vec<Complex64>, tol: f64) -> Result<Self> {
        if amplitudes.len() != space.dimension() {
            return Err(QdtError::DimensionMismatch {
                left: amplitudes.len(),
                right: space.dimension(),
                context: "amplitudes vs space",
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol {
            return Err(QdtError::UnnormalizedAmplitudes { norm_sq, tol });
        }
        Ok(Self { space, amplitudes })
    }

    /// Rescales raw amplitudes to unit norm for the caller.
    pub fn normalized(space: HilbertSpace, raw: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = raw.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(QdtError::ZeroAmplitudes);
        }
        let scale = norm_sq.sqrt().recip();
        let amplitudes = raw.into_iter().map(|z| z * scale).collect();
        Ok(Self { space, amplitudes })
    }

    /// Union concentrated on a single basis mode.
    pub fn single_mode(space: HilbertSpace, index: usize) -> Result<Self> {
        if index >= space.dimension() {
            return Err(QdtError::IndexOutOfRange {
                index,
                dimension: space.dimension(),
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); space.dimension()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { space, amplitudes })
    }

    /// Equal-amplitude union over every basis mode.
    pub fn symmetric(space: HilbertSpace) -> Self {
        let d = space.dimension();
        let amp = Complex64::new((d as f64).sqrt().recip(), 0.0);
        Self {
            space,
            amplitudes: vec![amp; d],
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Number of modes with nonzero amplitude.
    pub fn mode_count(&self) -> usize {
        self.amplitudes
            .iter()
            .filter(|z| z.norm_sqr() > 0.0)
            .count()
    }

    /// The union as a column vector.
    pub fn state_vector(&self) -> CMatrix {
        CMatrix::column(self.amplitudes.clone()).expect("validated amplitudes")
    }
}

/// Probability of an uncertain union split into its classical part and the
/// interference carried by off-diagonal elements of the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventProbability {
    pub total: f64,
    pub classical_part: f64,
    pub interference: f64,
}

/// Projector `|n><n|` of an elementary event.
pub fn projector_of(event: &ElementaryEvent) -> CMatrix {
    let d = event.space().dimension();
    let e = CMatrix::basis_column(d, event.index()).expect("validated index");
    e.outer(&e).expect("column vectors")
}

/// `Tr(rho |n><n|)`: probability of one elementary event.
pub fn event_probability(rho: &StatisticalOperator, event: &ElementaryEvent) -> Result<f64> {
    require_same_dimension(rho, event.space(), "event probability")?;
    let p = rho.matrix().trace_product(&projector_of(event))?;
    Ok(p.re)
}

/// Probability of a union of distinct elementary events (additive: the
/// projectors are orthogonal).
pub fn union_probability(rho: &StatisticalOperator, events: &[ElementaryEvent]) -> Result<f64> {
    for (i, e) in events.iter().enumerate() {
        if events[..i].iter().any(|prev| prev.index() == e.index()) {
            return Err(QdtError::DuplicateEvents);
        }
    }
    let mut total = 0.0;
    for e in events {
        total += event_probability(rho, e)?;
    }
    Ok(total)
}

/// Rank-one operator `|A><A|` of an uncertain union.
pub fn uncertain_operator(union: &UncertainUnion) -> CMatrix {
    let v = union.state_vector();
    v.outer(&v).expect("column vectors")
}

/// Probability of an uncertain union, split as classical + interference.
///
/// The interference sum is real up to rounding because conjugate index
/// pairs cancel; an imaginary residual above [`IMAG_RESIDUAL_TOL`] is
/// reported as an error rather than silently dropped.
pub fn uncertain_probability(
    rho: &StatisticalOperator,
    union: &UncertainUnion,
) -> Result<EventProbability> {
    require_same_dimension(rho, union.space(), "uncertain union probability")?;
    let total = rho.matrix().trace_product(&uncertain_operator(union))?;

    let amplitudes = union.amplitudes();
    let mut classical = 0.0;
    let mut interference = Complex64::new(0.0, 0.0);
    for m in 0..amplitudes.len() {
        for n in 0..amplitudes.len() {
            let weight = amplitudes[m].conj() * amplitudes[n];
            let element = rho.matrix().get(m, n);
            if m == n {
                classical += weight.re * element.re;
            } else {
                interference += weight * element;
            }
        }
    }
    if interference.im.abs() > IMAG_RESIDUAL_TOL {
        return Err(QdtError::ImaginaryResidual {
            residual: interference.im.abs(),
            tol: IMAG_RESIDUAL_TOL,
        });
    }
    Ok(EventProbability {
        total: total.re,
        classical_part: classical,
        interference: interference.re,
    })
}

fn require_same_dimension(
    rho: &StatisticalOperator,
    space: &HilbertSpace,
    context: &'static str,
) -> Result<()> {
    if rho.dimension() != space.dimension() {
        return Err(QdtError::DimensionMismatch {
            left: rho.dimension(),
            right: space.dimension(),
            context,
        });
    }
    Ok(())
}
