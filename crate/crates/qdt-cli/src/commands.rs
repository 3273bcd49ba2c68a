//! Subcommand implementations. Errors split into two exit classes: bad
//! input (config syntax, domain-invalid values) and failed computation
//! or violated invariants.

use num_complex::Complex64;

use qdt_core::{
    estimate_aggregate, is_product_state, lattice_probabilities, povm_deviation,
    predict_lotteries, prospect_entanglement_gate, prospect_operator, prospect_probability,
    separability_test, CMatrix, CompositeSpace, HilbertSpace, ProspectLattice, QdtError,
    StatisticalOperator, UncertainUnion, CLASSIFICATION_TOL, DEFAULT_TOL,
};

use crate::config::{ConfigError, ExperimentConfig, QuantumConfig, StateSpec};
use crate::report::{ReportDocument, Row, Section, Value};

#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub theta: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Input(#[from] ConfigError),

    #[error("{0}")]
    Computation(#[from] QdtError),

    #[error("report failed its own consistency checks: {keys}")]
    Inconsistent { keys: String },
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Input(_) => 2,
            RunError::Computation(_) | RunError::Inconsistent { .. } => 1,
        }
    }
}

fn input(error: impl Into<ConfigError>) -> RunError {
    RunError::Input(error.into())
}

fn semantic(message: impl Into<String>) -> RunError {
    RunError::Input(ConfigError::Semantic(message.into()))
}

fn real(v: f64) -> Value {
    Value::Real(v)
}

fn text(v: impl Into<String>) -> Value {
    Value::Text(v.into())
}

pub fn run_predict(
    config: &ExperimentConfig,
    overrides: &Overrides,
) -> Result<ReportDocument, RunError> {
    let tol = overrides.tol.unwrap_or(DEFAULT_TOL);
    let lotteries = config.lotteries()?;
    if lotteries.len() < 2 {
        return Err(semantic("predict needs at least two [[lottery]] tables"));
    }
    let utility = config.utility()?;
    let theta = config.theta(overrides.theta);
    let prediction = predict_lotteries(&lotteries, &utility, theta, config.ranking_override())?;

    let mut doc = ReportDocument::new("predict", tol);
    doc.theta = Some(theta);

    let section = doc.section("prediction");
    for p in &prediction.predictions {
        section.rows.push(Row::Info {
            key: "lottery".to_string(),
            fields: vec![
                ("label", text(&p.label)),
                ("expected_utility", real(p.expected_utility)),
                ("f", real(p.utility_factor)),
                ("q", real(p.attraction_factor)),
                ("p", real(p.probability)),
            ],
        });
    }
    let order = prediction
        .ranking
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",");
    section.rows.push(Row::Info {
        key: "ranking".to_string(),
        fields: vec![("order", text(order))],
    });

    let f_sum: f64 = prediction.predictions.iter().map(|p| p.utility_factor).sum();
    let p_sum: f64 = prediction.predictions.iter().map(|p| p.probability).sum();
    let q_sum: f64 = prediction
        .predictions
        .iter()
        .map(|p| p.attraction_factor)
        .sum();
    let additivity = prediction
        .predictions
        .iter()
        .map(|p| (p.probability - (p.utility_factor + p.attraction_factor)).abs())
        .fold(0.0, f64::max);
    let consistency = doc.section("consistency");
    push_residual_check(consistency, "sum_f", (f_sum - 1.0).abs(), tol);
    push_residual_check(consistency, "sum_p", (p_sum - 1.0).abs(), tol);
    push_residual_check(consistency, "sum_q", q_sum.abs(), tol);
    push_residual_check(consistency, "additivity", additivity, tol);

    if !config.empirical.is_empty() {
        let deviation = qdt_core::compare_to_empirical(&prediction, &config.empirical())
            .map_err(input)?;
        let section = doc.section("empirical");
        for row in &deviation.rows {
            section.rows.push(Row::Info {
                key: "lottery".to_string(),
                fields: vec![
                    ("label", text(&row.label)),
                    ("predicted", real(row.predicted)),
                    ("observed", real(row.observed)),
                    ("deviation", real(row.deviation)),
                ],
            });
        }
        section.rows.push(Row::Info {
            key: "summary".to_string(),
            fields: vec![("max_abs_deviation", real(deviation.max_abs_deviation))],
        });
    }

    if let Some(quantum) = &config.quantum {
        if quantum.dim_a != lotteries.len() {
            return Err(semantic(format!(
                "quantum dim_a = {} must match the {} lotteries",
                quantum.dim_a,
                lotteries.len()
            )));
        }
        let setup = quantum_setup(quantum, config.belief_amplitudes(), tol)?;
        append_quantum_sections(&mut doc, &setup, tol)?;
    }

    if !doc.all_checks_pass() {
        return Err(RunError::Inconsistent {
            keys: doc.failed_checks().join(", "),
        });
    }
    Ok(doc)
}

pub fn run_validate(
    config: &ExperimentConfig,
    overrides: &Overrides,
) -> Result<ReportDocument, RunError> {
    let tol = overrides.tol.unwrap_or(DEFAULT_TOL);
    let quantum = config
        .quantum
        .as_ref()
        .ok_or_else(|| semantic("validate needs a [quantum] section"))?;
    let setup = quantum_setup(quantum, config.belief_amplitudes(), tol)?;

    let mut doc = ReportDocument::new("validate", tol);
    append_quantum_sections(&mut doc, &setup, tol)?;
    Ok(doc)
}

pub fn run_quarterlaw(
    config: &ExperimentConfig,
    overrides: &Overrides,
) -> Result<ReportDocument, RunError> {
    let tol = overrides.tol.unwrap_or(DEFAULT_TOL);
    let section = config
        .quarterlaw
        .as_ref()
        .ok_or_else(|| semantic("quarterlaw needs a [quarterlaw] section"))?;
    if section.samples == 0 {
        return Err(semantic("quarterlaw needs samples >= 1"));
    }
    let dist = section.distribution()?;
    let seed = overrides.seed.or(section.seed).unwrap_or(42);
    let result = estimate_aggregate(&dist, section.samples, seed)?;

    let mut doc = ReportDocument::new("quarterlaw", tol);
    doc.seed = Some(seed);
    let mc = doc.section("montecarlo");
    mc.rows.push(Row::Info {
        key: "estimate".to_string(),
        fields: vec![
            ("family", text(section.family_name())),
            ("lattice_size", Value::Int(section.lattice_size as u64)),
            ("samples", Value::Int(result.sample_count)),
            ("aggregate_abs_q", real(result.aggregate_abs_q)),
            ("standard_error", real(result.standard_error)),
        ],
    });

    let gate = doc.section("quarter_law");
    let deviation = (result.aggregate_abs_q - 0.25).abs();
    if section.family_name() == "uniform" {
        let margin = 3.0 * result.standard_error + 0.005;
        gate.rows.push(Row::Check {
            key: "uniform_gate".to_string(),
            passed: deviation <= margin,
            fields: vec![("deviation", real(deviation)), ("margin", real(margin))],
        });
    } else {
        gate.rows.push(Row::Info {
            key: "deviation_from_quarter".to_string(),
            fields: vec![("deviation", real(deviation))],
        });
    }
    Ok(doc)
}

struct QuantumSetup {
    space: CompositeSpace,
    state: StatisticalOperator,
    union: UncertainUnion,
    lattice: ProspectLattice,
}

fn quantum_setup(
    quantum: &QuantumConfig,
    amplitudes: Option<Vec<Complex64>>,
    tol: f64,
) -> Result<QuantumSetup, RunError> {
    let space_a = HilbertSpace::with_dimension(quantum.dim_a).map_err(input)?;
    let space_b = HilbertSpace::with_dimension(quantum.dim_b).map_err(input)?;
    let space = CompositeSpace::new(space_a, space_b).map_err(input)?;
    let union = match amplitudes {
        Some(amps) => {
            UncertainUnion::new(space.space_b().clone(), amps, tol).map_err(input)?
        }
        None => UncertainUnion::symmetric(space.space_b().clone()),
    };
    let state = build_state(quantum, &space, tol)?;
    let lattice = ProspectLattice::exhaustive(&space, &union).map_err(input)?;
    Ok(QuantumSetup {
        space,
        state,
        union,
        lattice,
    })
}

fn build_state(
    quantum: &QuantumConfig,
    space: &CompositeSpace,
    tol: f64,
) -> Result<StatisticalOperator, RunError> {
    match &quantum.state {
        StateSpec::Preset(name) => preset_state(name, space),
        StateSpec::Matrix(rows) => {
            let d = space.product_dimension();
            if rows.len() != d || rows.iter().any(|row| row.len() != d) {
                return Err(semantic(format!("state matrix must be {d}x{d}")));
            }
            let matrix = CMatrix::from_fn(d, d, |i, j| {
                Complex64::new(rows[i][j][0], rows[i][j][1])
            })
            .map_err(input)?;
            StatisticalOperator::new(matrix, space.product_space().clone(), tol).map_err(input)
        }
    }
}

/// Named strategic states.
///
/// `maximally_mixed` is the fully ignorant prior. `product` is a coherent
/// choice-factor state tensored with a diagonal (incoherent) background,
/// so its interference vanishes. `coherent_background` keeps the choice
/// factor pinned to outcome 0 while the background modes superpose, which
/// makes the raw interference of that outcome visibly nonzero while the
/// state stays a product.
fn preset_state(name: &str, space: &CompositeSpace) -> Result<StatisticalOperator, RunError> {
    let (dim_a, dim_b) = (space.dim_a(), space.dim_b());
    match name {
        "maximally_mixed" => Ok(StatisticalOperator::maximally_mixed(
            space.product_space().clone(),
        )),
        "product" => {
            let plus = UncertainUnion::symmetric(space.space_a().clone()).state_vector();
            let coherent = plus.outer(&plus).map_err(input)?;
            let rho_a = coherent
                .scale(0.6)
                .add(&CMatrix::identity(dim_a).scale(0.4 / dim_a as f64))
                .map_err(input)?;
            let weight_sum = (dim_b * (dim_b + 1) / 2) as f64;
            let rho_b = CMatrix::from_fn(dim_b, dim_b, |i, j| {
                if i == j {
                    Complex64::new((i + 1) as f64 / weight_sum, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .map_err(input)?;
            let rho = rho_a.tensor(&rho_b).map_err(input)?;
            StatisticalOperator::new(rho, space.product_space().clone(), DEFAULT_TOL)
                .map_err(input)
        }
        "coherent_background" => {
            let mut entries = vec![Complex64::new(0.0, 0.0); space.product_dimension()];
            let amp = 1.0 / (dim_b as f64).sqrt();
            for mode in 0..dim_b {
                entries[space.composite_index(0, mode)] = Complex64::new(amp, 0.0);
            }
            let psi = CMatrix::column(entries).map_err(input)?;
            StatisticalOperator::pure(&psi, space.product_space().clone()).map_err(input)
        }
        "correlated_probe" => {
            qdt_core::correlated_probe_state(space).map_err(input)
        }
        other => Err(semantic(format!(
            "unknown state preset '{other}'; valid presets: maximally_mixed, product, \
             coherent_background, correlated_probe"
        ))),
    }
}

fn push_residual_check(section: &mut Section, key: &str, residual: f64, tol: f64) {
    section.rows.push(Row::Check {
        key: key.to_string(),
        passed: residual <= tol,
        fields: vec![("residual", real(residual))],
    });
}

/// The invariant battery shared by `validate` and the quantum part of
/// `predict`: POVM gap, raw and normalized decompositions, separability
/// classification, and the interference-vanishing gate.
fn append_quantum_sections(
    doc: &mut ReportDocument,
    setup: &QuantumSetup,
    tol: f64,
) -> Result<(), RunError> {
    let (dim_a, dim_b) = (setup.space.dim_a(), setup.space.dim_b());

    let measured = povm_deviation(&setup.lattice)?;
    let analytic = (dim_a as f64 * (dim_b as f64 - 1.0)).sqrt();
    let operator = doc.section("operator");
    operator.rows.push(Row::Info {
        key: "povm".to_string(),
        fields: vec![("measured", real(measured)), ("analytic", real(analytic))],
    });
    push_residual_check(operator, "povm_gap", (measured - analytic).abs(), tol);

    let raw_section = doc.section("raw");
    let mut additivity = 0.0_f64;
    for (index, prospect) in setup.lattice.prospects().iter().enumerate() {
        let d = prospect_probability(&setup.state, prospect)?;
        additivity = additivity
            .max((d.probability - (d.utility_factor + d.attraction_factor)).abs());
        raw_section.rows.push(Row::Info {
            key: "prospect".to_string(),
            fields: vec![
                ("index", Value::Int(index as u64)),
                ("p", real(d.probability)),
                ("f", real(d.utility_factor)),
                ("q", real(d.attraction_factor)),
            ],
        });
    }
    push_residual_check(raw_section, "additivity", additivity, tol);

    let normalized = lattice_probabilities(&setup.state, &setup.lattice, true)?;
    let section = doc.section("normalized");
    for (index, d) in normalized.iter().enumerate() {
        section.rows.push(Row::Info {
            key: "prospect".to_string(),
            fields: vec![
                ("index", Value::Int(index as u64)),
                ("p", real(d.probability)),
                ("f", real(d.utility_factor)),
                ("q", real(d.attraction_factor)),
            ],
        });
    }
    let p_sum: f64 = normalized.iter().map(|d| d.probability).sum();
    let f_sum: f64 = normalized.iter().map(|d| d.utility_factor).sum();
    let q_sum: f64 = normalized.iter().map(|d| d.attraction_factor).sum();
    push_residual_check(section, "sum_p", (p_sum - 1.0).abs(), tol);
    push_residual_check(section, "sum_f", (f_sum - 1.0).abs(), tol);
    push_residual_check(section, "alternation", q_sum.abs(), tol);

    let amplitude_quartic: f64 = setup
        .union
        .amplitudes()
        .iter()
        .map(|a| a.norm_sqr() * a.norm_sqr())
        .sum();
    let analytic_residual = (1.0 - amplitude_quartic).max(0.0).sqrt();
    let expect_entangled = setup.union.mode_count() >= 2;
    let separability = doc.section("separability");
    for (index, prospect) in setup.lattice.prospects().iter().enumerate() {
        let operator = prospect_operator(prospect);
        let report = separability_test(
            operator.matrix(),
            (dim_a, dim_b),
            CLASSIFICATION_TOL,
        )?;
        separability.rows.push(Row::Check {
            key: "operator_class".to_string(),
            passed: report.separable != expect_entangled
                && (report.residual - analytic_residual).abs() <= tol,
            fields: vec![
                ("index", Value::Int(index as u64)),
                ("residual", real(report.residual)),
                ("analytic", real(analytic_residual)),
                ("entangled", Value::Flag(!report.separable)),
            ],
        });
    }
    let state_report = is_product_state(&setup.state, (dim_a, dim_b), CLASSIFICATION_TOL)?;
    separability.rows.push(Row::Info {
        key: "state".to_string(),
        fields: vec![
            ("residual", real(state_report.residual)),
            ("product", Value::Flag(state_report.separable)),
        ],
    });

    let gate_section = doc.section("gate");
    for (index, prospect) in setup.lattice.prospects().iter().enumerate() {
        match prospect_entanglement_gate(&setup.state, prospect, CLASSIFICATION_TOL) {
            Ok(gate) => gate_section.rows.push(Row::Check {
                key: "prospect".to_string(),
                passed: true,
                fields: vec![
                    ("index", Value::Int(index as u64)),
                    ("operator_entangled", Value::Flag(gate.operator_entangled)),
                    ("state_product", Value::Flag(gate.state_product)),
                    ("q_must_vanish", Value::Flag(gate.q_must_vanish)),
                ],
            }),
            Err(QdtError::GateViolated { q_abs, tol }) => {
                gate_section.rows.push(Row::Check {
                    key: "prospect".to_string(),
                    passed: false,
                    fields: vec![
                        ("index", Value::Int(index as u64)),
                        ("q_abs", real(q_abs)),
                        ("gate_tol", real(tol)),
                    ],
                });
            }
            Err(other) => return Err(other.into()),
        }
    }
    Ok(())
}
