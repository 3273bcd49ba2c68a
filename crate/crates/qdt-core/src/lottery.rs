//! Choice prediction for sets of lotteries: expected utilities give the
//! classical utility factors, an attraction heuristic ranks the lotteries,
//! and the quarter law turns the ranking into interference corrections.
//!
//! The pipeline works in the gains domain. Utility factors are the
//! normalized expected utilities `f_n = U_n / sum U`, attraction factors
//! are `+-1/4` for a binary choice (linearly spaced and rescaled for
//! larger sets), and the predicted choice probability is `p = f + q`
//! clamped back onto the probability simplex.

use num_complex::Complex64;

use crate::error::{QdtError, Result};
use crate::event::UncertainUnion;
use crate::linalg::{HilbertSpace, DEFAULT_TOL};
use crate::prospect::ProbabilityDecomposition;

const MAX_REBALANCE_ITERATIONS: usize = 100;

/// A finite lottery: outcomes as `(payoff, probability)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Lottery {
    label: String,
    outcomes: Vec<(f64, f64)>,
}

impl Lottery {
    pub fn new(label: impl Into<String>, outcomes: Vec<(f64, f64)>) -> Result<Self> {
        let label = label.into();
        let invalid = |reason: &str| QdtError::InvalidLottery {
            label: label.clone(),
            reason: reason.to_string(),
        };
        if outcomes.is_empty() {
            return Err(invalid("needs at least one outcome"));
        }
        let mut total = 0.0;
        for &(payoff, probability) in &outcomes {
            if !payoff.is_finite() {
                return Err(invalid("payoffs must be finite"));
            }
            if !probability.is_finite() || !(0.0..=1.0).contains(&probability) {
                return Err(invalid("outcome probabilities must lie in [0, 1]"));
            }
            total += probability;
        }
        if (total - 1.0).abs() > DEFAULT_TOL {
            return Err(invalid("outcome probabilities must sum to 1"));
        }
        Ok(Self { label, outcomes })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn outcomes(&self) -> &[(f64, f64)] {
        &self.outcomes
    }

    /// Largest probability attached to a strictly positive payoff.
    pub fn certainty_of_gain(&self) -> f64 {
        self.outcomes
            .iter()
            .filter(|(payoff, _)| *payoff > 0.0)
            .map(|(_, probability)| *probability)
            .fold(0.0, f64::max)
    }

    /// Largest strictly positive payoff on offer.
    pub fn best_gain(&self) -> f64 {
        self.outcomes
            .iter()
            .map(|(payoff, _)| *payoff)
            .filter(|payoff| *payoff > 0.0)
            .fold(0.0, f64::max)
    }
}

/// Gains-domain utility of money.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UtilityFunction {
    Linear { scale: f64 },
    Power { scale: f64, exponent: f64 },
}

impl UtilityFunction {
    pub fn linear(scale: f64) -> Result<Self> {
        let u = Self::Linear { scale };
        u.validate()?;
        Ok(u)
    }

    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        let u = Self::Power { scale, exponent };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Linear { scale } => {
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(QdtError::InvalidUtility {
                        reason: format!("scale must be a positive finite number, got {scale}"),
                    });
                }
            }
            Self::Power { scale, exponent } => {
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(QdtError::InvalidUtility {
                        reason: format!("scale must be a positive finite number, got {scale}"),
                    });
                }
                if !(exponent.is_finite() && exponent > 0.0 && exponent <= 1.0) {
                    return Err(QdtError::InvalidUtility {
                        reason: format!("exponent must lie in (0, 1], got {exponent}"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, payoff: f64) -> f64 {
        match *self {
            Self::Linear { scale } => scale * payoff,
            Self::Power { scale, exponent } => scale * payoff.powf(exponent),
        }
    }
}

/// Two-mode belief/disbelief amplitudes over a binary background factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeliefState {
    amplitudes: [Complex64; 2],
}

impl BeliefState {
    /// Equal-weight belief, the uninformative default.
    pub fn symmetric() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        }
    }

    pub fn new(belief: Complex64, disbelief: Complex64) -> Result<Self> {
        let norm_sq = belief.norm_sqr() + disbelief.norm_sqr();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > DEFAULT_TOL {
            return Err(QdtError::UnnormalizedAmplitudes {
                norm_sq,
                tol: DEFAULT_TOL,
            });
        }
        Ok(Self {
            amplitudes: [belief, disbelief],
        })
    }

    pub fn amplitudes(&self) -> &[Complex64; 2] {
        &self.amplitudes
    }

    pub fn to_union(&self, space: HilbertSpace) -> Result<UncertainUnion> {
        if space.dimension() != 2 {
            return Err(QdtError::DimensionMismatch {
                left: space.dimension(),
                right: 2,
                context: "belief state needs a two-mode background",
            });
        }
        UncertainUnion::new(space, self.amplitudes.to_vec(), DEFAULT_TOL)
    }
}

/// Per-lottery outcome of the prediction pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct LotteryPrediction {
    pub label: String,
    pub expected_utility: f64,
    pub utility_factor: f64,
    pub attraction_factor: f64,
    pub probability: f64,
}

/// Full prediction: one row per lottery plus the ranking that produced
/// the attraction factors (most attractive first).
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    pub predictions: Vec<LotteryPrediction>,
    pub ranking: Vec<usize>,
}

impl PredictionReport {
    fn new(predictions: Vec<LotteryPrediction>, ranking: Vec<usize>) -> Result<Self> {
        let f_sum: f64 = predictions.iter().map(|p| p.utility_factor).sum();
        let p_sum: f64 = predictions.iter().map(|p| p.probability).sum();
        let q_sum: f64 = predictions.iter().map(|p| p.attraction_factor).sum();
        if (f_sum - 1.0).abs() > DEFAULT_TOL
            || (p_sum - 1.0).abs() > DEFAULT_TOL
            || q_sum.abs() > DEFAULT_TOL
        {
            return Err(QdtError::DecompositionInconsistent {
                residual: (p_sum - 1.0).abs().max(q_sum.abs()),
            });
        }
        Ok(Self {
            predictions,
            ranking,
        })
    }
}

/// Predicted-minus-observed comparison for one lottery.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow {
    pub label: String,
    pub predicted: f64,
    pub observed: f64,
    pub deviation: f64,
}

/// Comparison of a prediction against empirical choice frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub rows: Vec<DeviationRow>,
    pub max_abs_deviation: f64,
}

/// Expected utility of a lottery, `sum u(payoff) * probability`.
pub fn expected_utility(lottery: &Lottery, utility: &UtilityFunction) -> f64 {
    lottery
        .outcomes()
        .iter()
        .map(|&(payoff, probability)| utility.evaluate(payoff) * probability)
        .sum()
}

/// Normalized expected utilities over at least two lotteries. Every
/// lottery must have a finite, nonnegative expected utility and at least
/// one must be positive.
pub fn utility_factors(lotteries: &[Lottery], utility: &UtilityFunction) -> Result<Vec<f64>> {
    if lotteries.len() < 2 {
        return Err(QdtError::LatticeTooSmall {
            got: lotteries.len(),
        });
    }
    utility.validate()?;
    let mut values = Vec::with_capacity(lotteries.len());
    for lottery in lotteries {
        let value = expected_utility(lottery, utility);
        if !value.is_finite() {
            return Err(QdtError::InvalidLottery {
                label: lottery.label().to_string(),
                reason: "expected utility is not finite; power utility needs nonnegative payoffs"
                    .to_string(),
            });
        }
        if value < 0.0 {
            return Err(QdtError::NegativeExpectedUtility {
                label: lottery.label().to_string(),
                value,
            });
        }
        values.push(value);
    }
    let sum: f64 = values.iter().sum();
    if sum <= 0.0 {
        return Err(QdtError::ZeroExpectedUtilities);
    }
    Ok(values.into_iter().map(|value| value / sum).collect())
}

fn attraction_order(a: &Lottery, b: &Lottery, theta: f64) -> std::cmp::Ordering {
    let (ca, cb) = (a.certainty_of_gain(), b.certainty_of_gain());
    if (ca - cb).abs() > theta {
        return ca.partial_cmp(&cb).expect("probabilities are finite");
    }
    a.best_gain()
        .partial_cmp(&b.best_gain())
        .expect("payoffs are finite")
}

/// Ranks lotteries by attractiveness, most attractive first.
///
/// A lottery dominates when its chance of winning something is larger by
/// more than `theta`; within that margin the larger maximum gain wins.
/// Lotteries this heuristic cannot split produce an error rather than an
/// arbitrary order.
pub fn attraction_ranking(lotteries: &[Lottery], theta: f64) -> Result<Vec<usize>> {
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(QdtError::InvalidThreshold { theta });
    }
    let mut ranking: Vec<usize> = (0..lotteries.len()).collect();
    ranking.sort_by(|&i, &j| attraction_order(&lotteries[i], &lotteries[j], theta).reverse());
    for pair in ranking.windows(2) {
        let (a, b) = (&lotteries[pair[0]], &lotteries[pair[1]]);
        if attraction_order(a, b, theta) == std::cmp::Ordering::Equal {
            return Err(QdtError::AmbiguousAttraction {
                first: a.label().to_string(),
                second: b.label().to_string(),
            });
        }
    }
    Ok(ranking)
}

fn validate_permutation(ranking: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if ranking.len() != n {
        return Err(QdtError::InvalidRanking { expected: n });
    }
    for &index in ranking {
        if index >= n || seen[index] {
            return Err(QdtError::InvalidRanking { expected: n });
        }
        seen[index] = true;
    }
    Ok(())
}

/// Attraction offsets by rank position: linearly spaced from +1 to -1 and
/// rescaled so the mean magnitude is 1, then multiplied by the quarter-law
/// amplitude. For two lotteries this is exactly `(+1/4, -1/4)`.
fn attraction_offsets(n: usize) -> Vec<f64> {
    let spread: Vec<f64> = (0..n)
        .map(|k| 1.0 - 2.0 * k as f64 / (n as f64 - 1.0))
        .collect();
    let mean_abs = spread.iter().map(|c| c.abs()).sum::<f64>() / n as f64;
    spread.into_iter().map(|c| 0.25 * c / mean_abs).collect()
}

fn clamp_rebalance(mut p: Vec<f64>) -> Result<Vec<f64>> {
    for _ in 0..MAX_REBALANCE_ITERATIONS {
        let mut fixed_mass = 0.0;
        let mut free_mass = 0.0;
        let mut any_free = false;
        for value in &mut p {
            if *value <= 0.0 {
                *value = 0.0;
            } else if *value >= 1.0 {
                *value = 1.0;
                fixed_mass += 1.0;
            } else {
                free_mass += *value;
                any_free = true;
            }
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() <= 1e-12 {
            return Ok(p);
        }
        let need = 1.0 - fixed_mass;
        if !any_free || need < 0.0 {
            break;
        }
        let scale = need / free_mass;
        for value in &mut p {
            if *value > 0.0 && *value < 1.0 {
                *value *= scale;
            }
        }
    }
    Err(QdtError::ProjectionNotConverged {
        iterations: MAX_REBALANCE_ITERATIONS,
    })
}

/// Applies the quarter law to utility factors under a ranking (most
/// attractive first): `p = f + q` with the attraction offsets of
/// [`attraction_offsets`], clamped to the probability simplex with the
/// overflow redistributed proportionally, and `q` recomputed as `p - f`.
pub fn quarter_law_predict(
    utility_factors: &[f64],
    ranking: &[usize],
) -> Result<Vec<ProbabilityDecomposition>> {
    let n = utility_factors.len();
    if n < 2 {
        return Err(QdtError::LatticeTooSmall { got: n });
    }
    let sum: f64 = utility_factors.iter().sum();
    if (sum - 1.0).abs() > DEFAULT_TOL
        || utility_factors
            .iter()
            .any(|f| !f.is_finite() || *f < -DEFAULT_TOL)
    {
        return Err(QdtError::UnnormalizedFactors { sum });
    }
    validate_permutation(ranking, n)?;

    let offsets = attraction_offsets(n);
    let mut raw = utility_factors.to_vec();
    for (position, &lottery) in ranking.iter().enumerate() {
        raw[lottery] += offsets[position];
    }
    let p = clamp_rebalance(raw)?;
    Ok(p
        .into_iter()
        .zip(utility_factors)
        .map(|(probability, &f)| ProbabilityDecomposition {
            probability,
            utility_factor: f,
            attraction_factor: probability - f,
        })
        .collect())
}

/// Runs the whole pipeline: expected utilities, utility factors, the
/// attraction ranking (or a caller-supplied override), and the quarter
/// law.
pub fn predict_lotteries(
    lotteries: &[Lottery],
    utility: &UtilityFunction,
    theta: f64,
    ranking_override: Option<&[usize]>,
) -> Result<PredictionReport> {
    let factors = utility_factors(lotteries, utility)?;
    let ranking = match ranking_override {
        Some(ranking) => {
            validate_permutation(ranking, lotteries.len())?;
            ranking.to_vec()
        }
        None => attraction_ranking(lotteries, theta)?,
    };
    let decompositions = quarter_law_predict(&factors, &ranking)?;
    let predictions = lotteries
        .iter()
        .zip(&decompositions)
        .map(|(lottery, d)| LotteryPrediction {
            label: lottery.label().to_string(),
            expected_utility: expected_utility(lottery, utility),
            utility_factor: d.utility_factor,
            attraction_factor: d.attraction_factor,
            probability: d.probability,
        })
        .collect();
    PredictionReport::new(predictions, ranking)
}

/// Matches a prediction against empirical choice frequencies by label.
pub fn compare_to_empirical(
    report: &PredictionReport,
    empirical: &[(String, f64)],
) -> Result<DeviationReport> {
    if empirical.len() != report.predictions.len() {
        return Err(QdtError::InvalidEmpirical {
            reason: format!(
                "expected {} frequencies, got {}",
                report.predictions.len(),
                empirical.len()
            ),
        });
    }
    let mut total = 0.0;
    for (label, frequency) in empirical {
        if !frequency.is_finite() || !(0.0..=1.0).contains(frequency) {
            return Err(QdtError::InvalidEmpirical {
                reason: format!("frequency of '{label}' must lie in [0, 1]"),
            });
        }
        total += frequency;
    }
    if (total - 1.0).abs() > DEFAULT_TOL {
        return Err(QdtError::InvalidEmpirical {
            reason: format!("frequencies must sum to 1, got {total}"),
        });
    }
    let mut rows = Vec::with_capacity(report.predictions.len());
    let mut max_abs_deviation = 0.0_f64;
    for prediction in &report.predictions {
        let observed = empirical
            .iter()
            .find(|(label, _)| label == &prediction.label)
            .map(|(_, frequency)| *frequency)
            .ok_or_else(|| QdtError::InvalidEmpirical {
                reason: format!("no frequency for lottery '{}'", prediction.label),
            })?;
        let deviation = (prediction.probability - observed).abs();
        max_abs_deviation = max_abs_deviation.max(deviation);
        rows.push(DeviationRow {
            label: prediction.label.clone(),
            predicted: prediction.probability,
            observed,
            deviation,
        });
    }
    Ok(DeviationReport {
        rows,
        max_abs_deviation,
    })
}
