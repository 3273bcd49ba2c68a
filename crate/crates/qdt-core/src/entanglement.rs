//! Separability classification for operators and states on a composite
//! space, and the interference-vanishing gate that ties the two together.
//!
//! The commuting observable algebras of the two factors are generated by
//! their basis projectors, so the separable span they generate consists of
//! exactly the matrices that are diagonal in the product basis. An
//! operator's distance from that span is the Hilbert-Schmidt norm of its
//! off-diagonal part; a state is a product when it equals the tensor
//! product of its partial traces.

use crate::error::{QdtError, Result};
use crate::event::{StatisticalOperator, UncertainUnion};
use crate::linalg::{CMatrix, HilbertSpace};
use crate::prospect::{lattice_probabilities, Prospect, ProspectLattice};

/// Default tolerance for calling something separable / product.
pub const CLASSIFICATION_TOL: f64 = 1e-8;

/// Commuting algebra of one factor: the basis projectors `|n><n|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableAlgebra {
    space: HilbertSpace,
    generators: Vec<CMatrix>,
}

impl ObservableAlgebra {
    /// The algebra generated by the basis projectors of a space.
    pub fn for_space(space: HilbertSpace) -> Self {
        let d = space.dimension();
        let generators = (0..d)
            .map(|i| {
                let e = CMatrix::basis_column(d, i).expect("index in range");
                e.outer(&e).expect("column vectors")
            })
            .collect();
        Self { space, generators }
    }

    /// Wraps caller-supplied generators, verifying they are rank-one
    /// orthogonal projectors resolving the identity within `tol`.
    pub fn new(space: HilbertSpace, generators: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let d = space.dimension();
        if generators.len() != d {
            return Err(QdtError::DimensionMismatch {
                left: generators.len(),
                right: d,
                context: "generator count vs dimension",
            });
        }
        let mut sum = CMatrix::zeros(d, d);
        for (i, g) in generators.iter().enumerate() {
            if !g.is_hermitian(tol)? {
                return Err(QdtError::NotHermitian { tol });
            }
            if !g.matmul(g)?.approx_eq(g, tol) || (g.trace()?.re - 1.0).abs() > tol {
                return Err(QdtError::DecompositionInconsistent {
                    residual: (g.trace()?.re - 1.0).abs(),
                });
            }
            for other in &generators[..i] {
                let overlap = g.matmul(other)?.hs_norm();
                if overlap > tol {
                    return Err(QdtError::DuplicateEvents);
                }
            }
            sum = sum.add(g)?;
        }
        if !sum.approx_eq(&CMatrix::identity(d), tol) {
            return Err(QdtError::NonExhaustiveEvents);
        }
        Ok(Self { space, generators })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }
}

/// Outcome of a separability or product-form test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparabilityReport {
    pub residual: f64,
    pub separable: bool,
    pub tolerance: f64,
}

/// Distance of an operator on `A (x) B` from the span of the factor
/// algebras' products, i.e. the Hilbert-Schmidt norm of everything off
/// the product-basis diagonal.
pub fn separability_test(
    operator: &CMatrix,
    dims: (usize, usize),
    tol: f64,
) -> Result<SeparabilityReport> {
    let (dim_a, dim_b) = dims;
    if !operator.is_square() {
        return Err(QdtError::NotSquare {
            rows: operator.rows(),
            cols: operator.cols(),
        });
    }
    if operator.rows() != dim_a * dim_b {
        return Err(QdtError::DimensionMismatch {
            left: operator.rows(),
            right: dim_a * dim_b,
            context: "operator vs factorization",
        });
    }
    let mut off_sq = 0.0;
    for i in 0..operator.rows() {
        for j in 0..operator.cols() {
            if i != j {
                off_sq += operator.get(i, j).norm_sqr();
            }
        }
    }
    let residual = off_sq.sqrt();
    Ok(SeparabilityReport {
        residual,
        separable: residual <= tol,
        tolerance: tol,
    })
}

/// Whether a state factorizes as the tensor product of its partial traces,
/// reported through the Hilbert-Schmidt residual `||rho - rho_A (x) rho_B||`.
pub fn is_product_state(
    rho: &StatisticalOperator,
    dims: (usize, usize),
    tol: f64,
) -> Result<SeparabilityReport> {
    let (dim_a, dim_b) = dims;
    if rho.dimension() != dim_a * dim_b {
        return Err(QdtError::DimensionMismatch {
            left: rho.dimension(),
            right: dim_a * dim_b,
            context: "state vs factorization",
        });
    }
    let rho_a = rho.matrix().partial_trace(dims, crate::linalg::Subsystem::B)?;
    let rho_b = rho.matrix().partial_trace(dims, crate::linalg::Subsystem::A)?;
    let residual = rho.matrix().hs_distance(&rho_a.tensor(&rho_b)?)?;
    Ok(SeparabilityReport {
        residual,
        separable: residual <= tol,
        tolerance: tol,
    })
}

/// Joint classification of a prospect and a state, with the structural
/// prediction for the interference term.
///
/// `q_must_vanish` holds when the prospect operator is separable (single
/// background mode) or the state is a product: in either case the
/// normalized lattice interference of the prospect must be zero. The gate
/// verifies that claim on the exhaustive lattice before returning and
/// reports a violation as an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntanglementGate {
    pub operator_entangled: bool,
    pub state_product: bool,
    pub q_must_vanish: bool,
}

pub fn prospect_entanglement_gate(
    rho: &StatisticalOperator,
    prospect: &Prospect,
    tol: f64,
) -> Result<EntanglementGate> {
    let space = prospect.space();
    let dims = (space.dim_a(), space.dim_b());
    let operator = crate::prospect::prospect_operator(prospect);
    let operator_entangled = !separability_test(operator.matrix(), dims, tol)?.separable;
    let state_product = is_product_state(rho, dims, tol)?.separable;
    let q_must_vanish = !operator_entangled || state_product;

    if q_must_vanish {
        let lattice = ProspectLattice::exhaustive(space, prospect.uncertainty())?;
        let decompositions = lattice_probabilities(rho, &lattice, true)?;
        let q_abs = decompositions[prospect.outcome().index()]
            .attraction_factor
            .abs();
        if q_abs > tol {
            return Err(QdtError::GateViolated { q_abs, tol });
        }
    }
    Ok(EntanglementGate {
        operator_entangled,
        state_product,
        q_must_vanish,
    })
}

/// A mixed, classically correlated, non-product state useful as the
/// canonical `q_must_vanish = false` probe: the `n = 0` block keeps the
/// background coherence `|+><+|` while the `n = 1` block does not.
pub fn correlated_probe_state(space: &crate::prospect::CompositeSpace) -> Result<StatisticalOperator> {
    if space.dim_a() != 2 || space.dim_b() != 2 {
        return Err(QdtError::DimensionMismatch {
            left: space.product_dimension(),
            right: 4,
            context: "correlated probe is a two-qubit construction",
        });
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = UncertainUnion::new(
        space.space_b().clone(),
        vec![h.into(), h.into()],
        crate::linalg::DEFAULT_TOL,
    )?;
    let p0 = CMatrix::basis_column(2, 0)?;
    let block0 = p0
        .outer(&p0)?
        .tensor(&crate::event::uncertain_operator(&plus))?;
    let p1 = CMatrix::basis_column(2, 1)?;
    let e0 = CMatrix::basis_column(2, 0)?;
    let block1 = p1.outer(&p1)?.tensor(&e0.outer(&e0)?)?;
    let matrix = block0.scale(0.5).add(&block1.scale(0.5))?;
    StatisticalOperator::new(
        matrix,
        space.product_space().clone(),
        crate::linalg::DEFAULT_TOL,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOL;
    use crate::prospect::CompositeSpace;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_by_two() -> CompositeSpace {
        CompositeSpace::new(
            HilbertSpace::with_dimension(2).unwrap(),
            HilbertSpace::with_dimension(2).unwrap(),
        )
        .unwrap()
    }

    fn random_density(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .unwrap();
        let gg = g.matmul(&g.adjoint()).unwrap();
        let t = gg.trace().unwrap().re;
        gg.scale(1.0 / t)
    }

    #[test]
    fn basis_algebra_passes_its_own_validation() {
        let space = HilbertSpace::with_dimension(3).unwrap();
        let algebra = ObservableAlgebra::for_space(space.clone());
        let revalidated =
            ObservableAlgebra::new(space, algebra.generators().to_vec(), 1e-12).unwrap();
        assert_eq!(revalidated.generators().len(), 3);
    }

    #[test]
    fn algebra_rejects_non_projector_generators() {
        let space = HilbertSpace::with_dimension(2).unwrap();
        let halves = vec![
            CMatrix::identity(2).scale(0.5),
            CMatrix::identity(2).scale(0.5),
        ];
        assert!(ObservableAlgebra::new(space, halves, 1e-10).is_err());
    }

    #[test]
    fn diagonal_product_sums_are_exactly_separable() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (da, db) = (rng.random_range(2..=3), rng.random_range(2..=3));
            let mut m = CMatrix::zeros(da * db, da * db);
            for _ in 0..3 {
                let diag_a = CMatrix::from_fn(da, da, |i, j| {
                    if i == j {
                        c(rng.random_range(-1.0..1.0), 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                })
                .unwrap();
                let diag_b = CMatrix::from_fn(db, db, |i, j| {
                    if i == j {
                        c(rng.random_range(-1.0..1.0), 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                })
                .unwrap();
                m = m.add(&diag_a.tensor(&diag_b).unwrap()).unwrap();
            }
            let report = separability_test(&m, (da, db), CLASSIFICATION_TOL).unwrap();
            assert_eq!(report.residual, 0.0);
            assert!(report.separable);
        }
    }

    #[test]
    fn two_mode_prospect_operator_residual_is_the_cross_block_norm() {
        let space = two_by_two();
        let union = UncertainUnion::symmetric(space.space_b().clone());
        let p = crate::prospect::Prospect::new(space, 0, union).unwrap();
        let op = crate::prospect::prospect_operator(&p);
        let report = separability_test(op.matrix(), (2, 2), CLASSIFICATION_TOL).unwrap();
        assert!((report.residual - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(!report.separable);
    }

    #[test]
    fn bell_state_is_far_from_product_form() {
        let space = two_by_two();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CMatrix::column(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap();
        let rho =
            StatisticalOperator::pure(&bell, space.product_space().clone()).unwrap();
        let report = is_product_state(&rho, (2, 2), CLASSIFICATION_TOL).unwrap();
        assert!((report.residual - 3.0_f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(!report.separable);
    }

    #[test]
    fn product_states_classify_as_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho_a = random_density(2, &mut rng);
        let rho_b = random_density(3, &mut rng);
        let rho = StatisticalOperator::from_matrix(
            rho_a.tensor(&rho_b).unwrap(),
            DEFAULT_TOL,
        )
        .unwrap();
        let report = is_product_state(&rho, (2, 3), CLASSIFICATION_TOL).unwrap();
        assert!(report.residual < 1e-12);
        assert!(report.separable);
    }

    #[test]
    fn gate_clears_product_states_with_entangled_prospects() {
        let space = two_by_two();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rho = StatisticalOperator::from_matrix(
            random_density(2, &mut rng)
                .tensor(&random_density(2, &mut rng))
                .unwrap(),
            DEFAULT_TOL,
        )
        .unwrap();
        let union = UncertainUnion::symmetric(space.space_b().clone());
        let p = crate::prospect::Prospect::new(space, 0, union).unwrap();
        let gate = prospect_entanglement_gate(&rho, &p, CLASSIFICATION_TOL).unwrap();
        assert!(gate.operator_entangled);
        assert!(gate.state_product);
        assert!(gate.q_must_vanish);
    }

    #[test]
    fn gate_clears_single_mode_prospects_under_any_state() {
        let space = two_by_two();
        let probe = correlated_probe_state(&space).unwrap();
        let union = UncertainUnion::single_mode(space.space_b().clone(), 0).unwrap();
        let p = crate::prospect::Prospect::new(space, 0, union).unwrap();
        let gate = prospect_entanglement_gate(&probe, &p, CLASSIFICATION_TOL).unwrap();
        assert!(!gate.operator_entangled);
        assert!(gate.q_must_vanish);
    }

    #[test]
    fn gate_releases_correlated_states_and_interference_shows_up() {
        let space = two_by_two();
        let probe = correlated_probe_state(&space).unwrap();
        let union = UncertainUnion::symmetric(space.space_b().clone());
        let p = crate::prospect::Prospect::new(space.clone(), 0, union.clone()).unwrap();
        let gate = prospect_entanglement_gate(&probe, &p, CLASSIFICATION_TOL).unwrap();
        assert!(gate.operator_entangled);
        assert!(!gate.state_product);
        assert!(!gate.q_must_vanish);

        let raw = crate::prospect::prospect_probability(&probe, &p).unwrap();
        assert!((raw.attraction_factor - 0.25).abs() < 1e-12);

        let lattice = ProspectLattice::exhaustive(&space, &union).unwrap();
        let ds = lattice_probabilities(&probe, &lattice, true).unwrap();
        assert!(ds[0].attraction_factor.abs() > 1e-3);
    }

    #[test]
    fn separability_test_checks_the_factorization_shape() {
        let m = CMatrix::identity(6);
        assert!(separability_test(&m, (2, 2), 1e-8).is_err());
        assert!(separability_test(&m, (2, 3), 1e-8).is_ok());
    }
}
