//! Numerical engine for quantum decision theory.
//!
//! Decision alternatives are projectors on a finite Hilbert space, the
//! decision maker's state of mind is a density operator, and composite
//! prospects (a choice entangled with background uncertainty) become
//! rank-one operators whose expectation splits into a classical utility
//! factor plus an interference (attraction) term. On top of that sit the
//! lottery-choice pipeline with the quarter-law attraction correction and
//! a Monte Carlo validator for the quarter law itself.
//!
//! Everything is deterministic: no ambient randomness, explicit seeds
//! everywhere, dense desk-scale linear algebra with explicit tolerances.

pub mod entanglement;
pub mod error;
pub mod event;
pub mod linalg;
pub mod lottery;
pub mod prospect;
pub mod quarter_law;

pub use entanglement::{
    correlated_probe_state, is_product_state, prospect_entanglement_gate, separability_test,
    EntanglementGate, ObservableAlgebra, SeparabilityReport, CLASSIFICATION_TOL,
};
pub use error::QdtError;
pub use event::{
    event_probability, projector_of, uncertain_operator, uncertain_probability,
    union_probability, ElementaryEvent, EventProbability, StatisticalOperator, UncertainUnion,
};
pub use linalg::{CMatrix, HilbertSpace, Subsystem, DEFAULT_TOL, MAX_PRODUCT_DIMENSION};
pub use lottery::{
    attraction_ranking, compare_to_empirical, expected_utility, predict_lotteries,
    quarter_law_predict, utility_factors, BeliefState, DeviationReport, DeviationRow, Lottery,
    LotteryPrediction, PredictionReport, UtilityFunction,
};
pub use prospect::{
    decohere, joint_probability, lattice_probabilities, marginal_additivity_check,
    povm_deviation, prospect_operator, prospect_probability, prospect_state, CompositeSpace,
    ProbabilityDecomposition, Prospect, ProspectLattice, ProspectOperator,
};
pub use quarter_law::{
    estimate_aggregate, sample_lattice_q, AttractionDistribution, MagnitudeDistribution, McResult,
};
