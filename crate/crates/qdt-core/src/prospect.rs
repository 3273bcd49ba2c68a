//! Composite prospects: a choice outcome entangled with background
//! uncertainty.
//!
//! A prospect pairs one outcome `|n>` of the decision factor `A` with an
//! uncertain union `|B> = sum_a b_a |a>` over the background factor `B`.
//! Its state `|pi_n> = sum_a b_a |n a>` lives in the product space and its
//! rank-one operator has expectation
//!
//! ```text
//! p(pi_n) = f(pi_n) + q(pi_n)
//! f = sum_a |b_a|^2 <n a|rho|n a>          (diagonal, classical)
//! q = sum_{a != b} conj(b_a) b_b <n a|rho|n b>   (interference)
//! ```
//!
//! The prospect operators of a lattice generally do not resolve unity
//! (that is what [`povm_deviation`] measures), so observable probabilities
//! come from [`lattice_probabilities`] with `normalize = true`, which
//! rescales `p` and `f` to unit sums; the interference then satisfies the
//! alternation condition `sum q = 0` by construction.

use crate::error::{QdtError, Result};
use crate::event::{ElementaryEvent, StatisticalOperator, UncertainUnion, IMAG_RESIDUAL_TOL};
use crate::linalg::{CMatrix, HilbertSpace, DEFAULT_TOL, MAX_PRODUCT_DIMENSION};
use num_complex::Complex64;

/// Product of a decision space `A` and a background space `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeSpace {
    space_a: HilbertSpace,
    space_b: HilbertSpace,
    product: HilbertSpace,
}

impl CompositeSpace {
    pub fn new(space_a: HilbertSpace, space_b: HilbertSpace) -> Result<Self> {
        let dimension = space_a.dimension() * space_b.dimension();
        if dimension > MAX_PRODUCT_DIMENSION {
            return Err(QdtError::DimensionGuardExceeded {
                dimension,
                max: MAX_PRODUCT_DIMENSION,
            });
        }
        let mut labels = Vec::with_capacity(dimension);
        for la in space_a.basis_labels() {
            for lb in space_b.basis_labels() {
                labels.push(format!("{la}\u{2297}{lb}"));
            }
        }
        let product = HilbertSpace::new(labels)?;
        Ok(Self {
            space_a,
            space_b,
            product,
        })
    }

    pub fn space_a(&self) -> &HilbertSpace {
        &self.space_a
    }

    pub fn space_b(&self) -> &HilbertSpace {
        &self.space_b
    }

    pub fn dim_a(&self) -> usize {
        self.space_a.dimension()
    }

    pub fn dim_b(&self) -> usize {
        self.space_b.dimension()
    }

    pub fn product_dimension(&self) -> usize {
        self.product.dimension()
    }

    pub fn product_space(&self) -> &HilbertSpace {
        &self.product
    }

    /// Row/column index of `|n a>` in the product basis.
    pub fn composite_index(&self, outcome: usize, mode: usize) -> usize {
        debug_assert!(outcome < self.dim_a() && mode < self.dim_b());
        outcome * self.dim_b() + mode
    }
}

/// One decision outcome tied to the shared background uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct Prospect {
    space: CompositeSpace,
    outcome: ElementaryEvent,
    uncertainty: UncertainUnion,
}

impl Prospect {
    pub fn new(
        space: CompositeSpace,
        outcome_index: usize,
        uncertainty: UncertainUnion,
    ) -> Result<Self> {
        if uncertainty.space().dimension() != space.dim_b() {
            return Err(QdtError::DimensionMismatch {
                left: uncertainty.space().dimension(),
                right: space.dim_b(),
                context: "uncertainty vs background factor",
            });
        }
        let outcome = ElementaryEvent::new(space.space_a().clone(), outcome_index)?;
        Ok(Self {
            space,
            outcome,
            uncertainty,
        })
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn outcome(&self) -> &ElementaryEvent {
        &self.outcome
    }

    pub fn uncertainty(&self) -> &UncertainUnion {
        &self.uncertainty
    }
}

/// Rank-one operator `|pi_n><pi_n|` of a prospect.
#[derive(Debug, Clone, PartialEq)]
pub struct ProspectOperator {
    matrix: CMatrix,
    source: Prospect,
}

impl ProspectOperator {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn source(&self) -> &Prospect {
        &self.source
    }
}

/// Ordered set of prospects over one composite space sharing one
/// background uncertainty, with distinct outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProspectLattice {
    space: CompositeSpace,
    prospects: Vec<Prospect>,
}

impl ProspectLattice {
    pub fn new(prospects: Vec<Prospect>) -> Result<Self> {
        if prospects.len() < 2 {
            return Err(QdtError::LatticeTooSmall {
                got: prospects.len(),
            });
        }
        let space = prospects[0].space().clone();
        let shared = prospects[0].uncertainty().clone();
        for p in &prospects[1..] {
            if p.space() != &space {
                return Err(QdtError::DimensionMismatch {
                    left: p.space().product_dimension(),
                    right: space.product_dimension(),
                    context: "prospects over different composite spaces",
                });
            }
            if p.uncertainty() != &shared {
                return Err(QdtError::MixedUncertainty);
            }
        }
        for (i, p) in prospects.iter().enumerate() {
            if prospects[..i]
                .iter()
                .any(|prev| prev.outcome().index() == p.outcome().index())
            {
                return Err(QdtError::DuplicateEvents);
            }
        }
        Ok(Self { space, prospects })
    }

    /// Lattice with one prospect per basis outcome of the decision factor.
    pub fn exhaustive(space: &CompositeSpace, uncertainty: &UncertainUnion) -> Result<Self> {
        let prospects = (0..space.dim_a())
            .map(|n| Prospect::new(space.clone(), n, uncertainty.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(prospects)
    }

    pub fn prospects(&self) -> &[Prospect] {
        &self.prospects
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.prospects.len()
    }

    fn is_exhaustive(&self) -> bool {
        self.size() == self.space.dim_a()
    }
}

/// Prospect probability split into the classical utility factor and the
/// interference (attraction) factor, `probability = utility_factor +
/// attraction_factor` within rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityDecomposition {
    pub probability: f64,
    pub utility_factor: f64,
    pub attraction_factor: f64,
}

impl ProbabilityDecomposition {
    fn checked(probability: f64, utility_factor: f64, attraction_factor: f64) -> Result<Self> {
        let residual = (probability - (utility_factor + attraction_factor)).abs();
        if residual > DEFAULT_TOL {
            return Err(QdtError::DecompositionInconsistent { residual });
        }
        Ok(Self {
            probability,
            utility_factor,
            attraction_factor,
        })
    }
}

/// Classical limit of a decomposition: the utility factor alone, which is
/// what survives when the off-diagonal elements of the state are dropped.
pub fn decohere(decomposition: &ProbabilityDecomposition) -> f64 {
    decomposition.utility_factor
}

/// Prospect state `|pi_n> = sum_a b_a |n a>` as a product-space column.
pub fn prospect_state(prospect: &Prospect) -> CMatrix {
    let space = prospect.space();
    let mut entries = vec![Complex64::new(0.0, 0.0); space.product_dimension()];
    let n = prospect.outcome().index();
    for (mode, amp) in prospect.uncertainty().amplitudes().iter().enumerate() {
        entries[space.composite_index(n, mode)] = *amp;
    }
    CMatrix::column(entries).expect("validated amplitudes")
}

/// Rank-one prospect operator `|pi_n><pi_n|`.
pub fn prospect_operator(prospect: &Prospect) -> ProspectOperator {
    let v = prospect_state(prospect);
    ProspectOperator {
        matrix: v.outer(&v).expect("column vectors"),
        source: prospect.clone(),
    }
}

/// Hilbert-Schmidt distance between the lattice's operator sum and the
/// identity: how far the prospect family is from a resolution of unity.
/// Zero exactly when the background factor is one-dimensional.
pub fn povm_deviation(lattice: &ProspectLattice) -> Result<f64> {
    if !lattice.is_exhaustive() {
        return Err(QdtError::NonExhaustiveEvents);
    }
    let d = lattice.space().product_dimension();
    let mut sum = CMatrix::zeros(d, d);
    for p in lattice.prospects() {
        sum = sum.add(prospect_operator(p).matrix())?;
    }
    sum.hs_distance(&CMatrix::identity(d))
}

/// `Tr(rho (P_a (x) P_b))`: joint probability of elementary outcomes in
/// both factors.
pub fn joint_probability(
    rho: &StatisticalOperator,
    outcome_a: &ElementaryEvent,
    outcome_b: &ElementaryEvent,
) -> Result<f64> {
    let dim_a = outcome_a.space().dimension();
    let dim_b = outcome_b.space().dimension();
    if rho.dimension() != dim_a * dim_b {
        return Err(QdtError::DimensionMismatch {
            left: rho.dimension(),
            right: dim_a * dim_b,
            context: "state vs joint outcome factorization",
        });
    }
    let projector = crate::event::projector_of(outcome_a)
        .tensor(&crate::event::projector_of(outcome_b))?;
    Ok(rho.matrix().trace_product(&projector)?.re)
}

/// Checks that summing joint probabilities over an exhaustive set of
/// background outcomes reproduces the bare marginal `Tr(rho (P_n (x) 1))`.
/// Returns `(summed, direct)` for the caller to compare.
pub fn marginal_additivity_check(
    rho: &StatisticalOperator,
    outcome_a: &ElementaryEvent,
    outcomes_b: &[ElementaryEvent],
) -> Result<(f64, f64)> {
    let Some(first) = outcomes_b.first() else {
        return Err(QdtError::NonExhaustiveEvents);
    };
    let dim_b = first.space().dimension();
    let mut seen = vec![false; dim_b];
    for b in outcomes_b {
        if b.space().dimension() != dim_b || seen[b.index()] {
            return Err(QdtError::DuplicateEvents);
        }
        seen[b.index()] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(QdtError::NonExhaustiveEvents);
    }

    let mut summed = 0.0;
    for b in outcomes_b {
        summed += joint_probability(rho, outcome_a, b)?;
    }
    let marginal_projector =
        crate::event::projector_of(outcome_a).tensor(&CMatrix::identity(dim_b))?;
    let direct = rho.matrix().trace_product(&marginal_projector)?.re;
    Ok((summed, direct))
}

/// Raw decomposition of one prospect's probability.
///
/// `probability` is the operator expectation `Tr(rho |pi_n><pi_n|)`; the
/// utility factor sums the diagonal contributions, the attraction factor
/// the off-diagonal ones, and the two routes must agree within 1e-10.
/// The interference sum must be real within [`IMAG_RESIDUAL_TOL`]; a
/// larger imaginary residual is an error, never silently dropped.
pub fn prospect_probability(
    rho: &StatisticalOperator,
    prospect: &Prospect,
) -> Result<ProbabilityDecomposition> {
    let space = prospect.space();
    if rho.dimension() != space.product_dimension() {
        return Err(QdtError::DimensionMismatch {
            left: rho.dimension(),
            right: space.product_dimension(),
            context: "state vs prospect space",
        });
    }
    let probability = rho
        .matrix()
        .trace_product(prospect_operator(prospect).matrix())?
        .re;

    let n = prospect.outcome().index();
    let amplitudes = prospect.uncertainty().amplitudes();
    let mut utility_factor = 0.0;
    for (mode, amp) in amplitudes.iter().enumerate() {
        let weight = amp.norm_sqr();
        if weight == 0.0 {
            continue;
        }
        let mode_event = ElementaryEvent::new(space.space_b().clone(), mode)?;
        utility_factor += weight * joint_probability(rho, prospect.outcome(), &mode_event)?;
    }

    let mut interference = Complex64::new(0.0, 0.0);
    for (mode_m, amp_m) in amplitudes.iter().enumerate() {
        for (mode_n, amp_n) in amplitudes.iter().enumerate() {
            if mode_m == mode_n {
                continue;
            }
            let element = rho
                .matrix()
                .get(space.composite_index(n, mode_m), space.composite_index(n, mode_n));
            interference += amp_m.conj() * amp_n * element;
        }
    }
    if interference.im.abs() > IMAG_RESIDUAL_TOL {
        return Err(QdtError::ImaginaryResidual {
            residual: interference.im.abs(),
            tol: IMAG_RESIDUAL_TOL,
        });
    }
    ProbabilityDecomposition::checked(probability, utility_factor, interference.re)
}

/// Decompositions for every prospect of a lattice.
///
/// With `normalize = false` the raw operator expectations are returned;
/// their total is generally below one because the prospect family is not
/// a resolution of unity. With `normalize = true` the probabilities and
/// utility factors are rescaled to unit sums and the attraction factors
/// recomputed as their difference, which enforces the alternation
/// condition `sum q = 0` exactly.
pub fn lattice_probabilities(
    rho: &StatisticalOperator,
    lattice: &ProspectLattice,
    normalize: bool,
) -> Result<Vec<ProbabilityDecomposition>> {
    let raw = lattice
        .prospects()
        .iter()
        .map(|p| prospect_probability(rho, p))
        .collect::<Result<Vec<_>>>()?;
    if !normalize {
        return Ok(raw);
    }

    let sum_p: f64 = raw.iter().map(|d| d.probability).sum();
    let sum_f: f64 = raw.iter().map(|d| d.utility_factor).sum();
    if sum_p <= 0.0 {
        return Err(QdtError::DegenerateLattice {
            sum_name: "total probability",
            sum: sum_p,
        });
    }
    if sum_f <= 0.0 {
        return Err(QdtError::DegenerateLattice {
            sum_name: "total utility factor",
            sum: sum_f,
        });
    }

    raw.iter()
        .map(|d| {
            let p = clamp_unit(d.probability / sum_p)?;
            let f = clamp_unit(d.utility_factor / sum_f)?;
            ProbabilityDecomposition::checked(p, f, p - f)
        })
        .collect()
}

/// Clamps rounding dust at the ends of `[0, 1]`; anything further out is
/// a genuine inconsistency.
fn clamp_unit(x: f64) -> Result<f64> {
    if x < 0.0 {
        if x >= -DEFAULT_TOL {
            return Ok(0.0);
        }
    } else if x > 1.0 {
        if x <= 1.0 + DEFAULT_TOL {
            return Ok(1.0);
        }
    } else {
        return Ok(x);
    }
    Err(QdtError::DecompositionInconsistent {
        residual: if x < 0.0 { -x } else { x - 1.0 },
    })
}
