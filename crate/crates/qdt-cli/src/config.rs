//! Experiment configuration: a versioned TOML schema that round-trips.
//!
//! The full key reference lives in `fixtures/SCHEMA.md`. Parsing is
//! strict: unknown keys, a wrong schema id, or values that violate a
//! domain invariant are input errors, reported with the offending field.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use qdt_core::{
    AttractionDistribution, Lottery, MagnitudeDistribution, QdtError, UtilityFunction,
};

pub const SCHEMA_ID: &str = "qdt-experiment/1";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("config syntax: {0}")]
    Syntax(#[from] toml::de::Error),

    #[error("config schema is '{got}', this tool reads '{SCHEMA_ID}'")]
    SchemaId { got: String },

    #[error("config: {0}")]
    Domain(#[from] QdtError),

    #[error("config: {0}")]
    Semantic(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    #[serde(default, rename = "lottery", skip_serializing_if = "Vec::is_empty")]
    pub lotteries: Vec<LotteryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility: Option<UtilityConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attraction: Option<AttractionConfig>,
    #[serde(default, rename = "empirical", skip_serializing_if = "Vec::is_empty")]
    pub empirical: Vec<EmpiricalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum: Option<QuantumConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quarterlaw: Option<QuarterLawConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LotteryConfig {
    pub label: String,
    /// `(payoff, probability)` pairs.
    pub outcomes: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum UtilityConfig {
    Linear {
        #[serde(default = "default_scale")]
        scale: f64,
    },
    Power {
        #[serde(default = "default_scale")]
        scale: f64,
        exponent: f64,
    },
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttractionConfig {
    /// Certainty threshold for the ranking heuristic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Explicit ranking override, most attractive first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmpiricalConfig {
    pub label: String,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumConfig {
    pub dim_a: usize,
    pub dim_b: usize,
    pub state: StateSpec,
    /// Background amplitudes as `[re, im]` pairs; symmetric when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub belief_amplitudes: Option<Vec<[f64; 2]>>,
}

/// Either a named preset or an explicit density matrix of `[re, im]`
/// entries, row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Preset(String),
    Matrix(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuarterLawConfig {
    pub family: FamilyConfig,
    pub lattice_size: usize,
    pub samples: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    Uniform { lo: f64, hi: f64 },
    Beta { alpha: f64, beta: f64 },
    TruncatedGaussian { mean: f64, sd: f64 },
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text)?;
        if config.schema != SCHEMA_ID {
            return Err(ConfigError::SchemaId { got: config.schema });
        }
        Ok(config)
    }

    pub fn lotteries(&self) -> Result<Vec<Lottery>, ConfigError> {
        self.lotteries
            .iter()
            .map(|l| Ok(Lottery::new(l.label.clone(), l.outcomes.clone())?))
            .collect()
    }

    pub fn utility(&self) -> Result<UtilityFunction, ConfigError> {
        let utility = match self.utility {
            None => UtilityFunction::linear(1.0)?,
            Some(UtilityConfig::Linear { scale }) => UtilityFunction::linear(scale)?,
            Some(UtilityConfig::Power { scale, exponent }) => {
                UtilityFunction::power(scale, exponent)?
            }
        };
        Ok(utility)
    }

    /// Effective certainty threshold: flag beats config beats 0.1.
    pub fn theta(&self, flag: Option<f64>) -> f64 {
        flag.or_else(|| self.attraction.as_ref().and_then(|a| a.theta))
            .unwrap_or(0.1)
    }

    pub fn ranking_override(&self) -> Option<&[usize]> {
        self.attraction
            .as_ref()
            .and_then(|a| a.ranking.as_deref())
    }

    pub fn empirical(&self) -> Vec<(String, f64)> {
        self.empirical
            .iter()
            .map(|e| (e.label.clone(), e.frequency))
            .collect()
    }

    pub fn belief_amplitudes(&self) -> Option<Vec<Complex64>> {
        self.quantum.as_ref()?.belief_amplitudes.as_ref().map(|raw| {
            raw.iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect()
        })
    }
}

impl QuarterLawConfig {
    pub fn distribution(&self) -> Result<AttractionDistribution, ConfigError> {
        let magnitudes = match self.family {
            FamilyConfig::Uniform { lo, hi } => MagnitudeDistribution::uniform(lo, hi)?,
            FamilyConfig::Beta { alpha, beta } => MagnitudeDistribution::beta(alpha, beta)?,
            FamilyConfig::TruncatedGaussian { mean, sd } => {
                MagnitudeDistribution::truncated_gaussian(mean, sd)?
            }
        };
        Ok(AttractionDistribution::new(magnitudes, self.lattice_size)?)
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            FamilyConfig::Uniform { .. } => "uniform",
            FamilyConfig::Beta { .. } => "beta",
            FamilyConfig::TruncatedGaussian { .. } => "truncated_gaussian",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
# comments are part of the schema contract
schema = "qdt-experiment/1"

[utility]
kind = "linear"
scale = 1.0

[attraction]
theta = 0.1

[[lottery]]
label = "risky"
outcomes = [[6.0, 0.45], [0.0, 0.55]]

[[lottery]]
label = "safe"
outcomes = [[3.0, 0.9], [0.0, 0.1]]

[[empirical]]
label = "risky"
frequency = 0.14

[[empirical]]
label = "safe"
frequency = 0.86

[quantum]
dim_a = 2
dim_b = 2
state = "product"
belief_amplitudes = [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]]

[quarterlaw]
lattice_size = 2
samples = 1000

[quarterlaw.family]
kind = "uniform"
lo = 0.0
hi = 0.5
"#;

    #[test]
    fn sample_round_trips_field_for_field() {
        let parsed = ExperimentConfig::parse(SAMPLE).unwrap();
        let serialized = toml::to_string(&parsed).unwrap();
        let reparsed = ExperimentConfig::parse(&serialized).unwrap();
        assert_eq!(parsed, reparsed);
    }

    #[test]
    fn schema_id_is_checked() {
        let err = ExperimentConfig::parse("schema = \"other/9\"");
        assert!(matches!(err, Err(ConfigError::SchemaId { .. })));
    }

    #[test]
    fn empty_document_is_rejected() {
        assert!(matches!(
            ExperimentConfig::parse(""),
            Err(ConfigError::Syntax(_))
        ));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::parse("schema = \"qdt-experiment/1\"\nbogus = 1\n");
        assert!(matches!(err, Err(ConfigError::Syntax(_))));
    }

    #[test]
    fn bad_probability_sums_name_the_lottery() {
        let text = r#"
schema = "qdt-experiment/1"
[[lottery]]
label = "broken"
outcomes = [[6.0, 0.45], [0.0, 0.53]]
"#;
        let config = ExperimentConfig::parse(text).unwrap();
        let err = config.lotteries().unwrap_err();
        assert!(err.to_string().contains("broken"));
    }

    #[test]
    fn matrix_states_parse_as_explicit_entries() {
        let text = r#"
schema = "qdt-experiment/1"
[quantum]
dim_a = 1
dim_b = 2
state = [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]
"#;
        let config = ExperimentConfig::parse(text).unwrap();
        match &config.quantum.as_ref().unwrap().state {
            StateSpec::Matrix(rows) => {
                assert_eq!(rows.len(), 2);
                assert_eq!(rows[0][0], [0.5, 0.0]);
            }
            StateSpec::Preset(_) => panic!("expected a matrix"),
        }
    }

    #[test]
    fn theta_prefers_the_flag_over_the_config() {
        let config = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(config.theta(None), 0.1);
        assert_eq!(config.theta(Some(0.3)), 0.3);
        let bare = ExperimentConfig::parse("schema = \"qdt-experiment/1\"").unwrap();
        assert_eq!(bare.theta(None), 0.1);
    }
}
