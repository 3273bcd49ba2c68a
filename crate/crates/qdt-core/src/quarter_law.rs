//! Monte Carlo study of aggregate attraction factors.
//!
//! Attraction factors on a lattice are unknown case by case, but families
//! of noninformative priors share one robust aggregate: the mean absolute
//! attraction settles at 1/4. This module samples lattice-sized attraction
//! vectors (zero-sum, entries in `[-1, 1]`, magnitudes from a configurable
//! prior) and estimates that aggregate with a standard error.
//!
//! Sampling is deterministic and order-independent: sample `i` of a run
//! with master seed `s` draws from its own counter-mode stream `(s, i)`,
//! so partial runs, reruns, and different batch sizes all see the same
//! underlying sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Normal};

use crate::error::{QdtError, Result};

const MAX_PROJECTION_ITERATIONS: usize = 100;
const MAX_REJECTIONS: usize = 10_000;

/// Prior for the magnitude of a single attraction factor. All three
/// families are calibrated so their mean magnitude is (or can be set to)
/// 1/4: `uniform(0, 1/2)`, `beta(1, 3)`, and a gaussian centered near 1/4
/// truncated to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MagnitudeDistribution {
    Uniform { lo: f64, hi: f64 },
    Beta { alpha: f64, beta: f64 },
    TruncatedGaussian { mean: f64, sd: f64 },
}

impl MagnitudeDistribution {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(QdtError::InvalidDistribution {
                reason: format!("uniform bounds must satisfy 0 <= lo <= hi <= 1, got [{lo}, {hi}]"),
            });
        }
        Ok(Self::Uniform { lo, hi })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && alpha > 0.0 && beta > 0.0) {
            return Err(QdtError::InvalidDistribution {
                reason: format!("beta shape parameters must be positive, got ({alpha}, {beta})"),
            });
        }
        Beta::new(alpha, beta).map_err(|e| QdtError::InvalidDistribution {
            reason: e.to_string(),
        })?;
        Ok(Self::Beta { alpha, beta })
    }

    pub fn truncated_gaussian(mean: f64, sd: f64) -> Result<Self> {
        if !(mean.is_finite() && sd.is_finite() && sd > 0.0) {
            return Err(QdtError::InvalidDistribution {
                reason: format!("gaussian needs a finite mean and positive sd, got ({mean}, {sd})"),
            });
        }
        Ok(Self::TruncatedGaussian { mean, sd })
    }

    fn draw(&self, rng: &mut impl Rng) -> Result<f64> {
        match *self {
            Self::Uniform { lo, hi } => {
                if hi > lo {
                    Ok(rng.random_range(lo..=hi))
                } else {
                    Ok(lo)
                }
            }
            Self::Beta { alpha, beta } => {
                let dist = Beta::new(alpha, beta).expect("validated at construction");
                Ok(dist.sample(rng))
            }
            Self::TruncatedGaussian { mean, sd } => {
                let dist = Normal::new(mean, sd).expect("validated at construction");
                for _ in 0..MAX_REJECTIONS {
                    let x = dist.sample(rng);
                    if (0.0..=1.0).contains(&x) {
                        return Ok(x);
                    }
                }
                Err(QdtError::InvalidDistribution {
                    reason: "truncated gaussian keeps rejecting; move its mass toward [0, 1]"
                        .to_string(),
                })
            }
        }
    }
}

/// Prior over whole attraction vectors: a magnitude family plus the
/// lattice size the vectors live on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractionDistribution {
    magnitudes: MagnitudeDistribution,
    lattice_size: usize,
}

impl AttractionDistribution {
    pub fn new(magnitudes: MagnitudeDistribution, lattice_size: usize) -> Result<Self> {
        if lattice_size < 2 {
            return Err(QdtError::LatticeTooSmall { got: lattice_size });
        }
        Ok(Self {
            magnitudes,
            lattice_size,
        })
    }

    pub fn magnitudes(&self) -> &MagnitudeDistribution {
        &self.magnitudes
    }

    pub fn lattice_size(&self) -> usize {
        self.lattice_size
    }
}

/// Monte Carlo estimate of the aggregate mean absolute attraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub sample_count: u64,
    pub aggregate_abs_q: f64,
    pub standard_error: f64,
    pub seed: u64,
}

fn sample_with_rng(dist: &AttractionDistribution, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let n = dist.lattice_size;
    if n == 2 {
        let magnitude = dist.magnitudes.draw(rng)?;
        let signed = if rng.random_bool(0.5) {
            magnitude
        } else {
            -magnitude
        };
        return Ok(vec![signed, -signed]);
    }
    let mut q = Vec::with_capacity(n);
    for _ in 0..n {
        let magnitude = dist.magnitudes.draw(rng)?;
        q.push(if rng.random_bool(0.5) {
            magnitude
        } else {
            -magnitude
        });
    }
    for _ in 0..MAX_PROJECTION_ITERATIONS {
        let mean = q.iter().sum::<f64>() / n as f64;
        for value in &mut q {
            *value -= mean;
        }
        let mut clamped = false;
        for value in &mut q {
            if *value > 1.0 {
                *value = 1.0;
                clamped = true;
            } else if *value < -1.0 {
                *value = -1.0;
                clamped = true;
            }
        }
        if !clamped {
            return Ok(q);
        }
    }
    Err(QdtError::ProjectionNotConverged {
        iterations: MAX_PROJECTION_ITERATIONS,
    })
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws one zero-sum attraction vector. For a binary lattice the two
/// entries are an exact `(+m, -m)` pair; for larger lattices signed
/// magnitudes are projected onto the zero-sum hyperplane and clamped back
/// into `[-1, 1]` until both constraints hold.
pub fn sample_lattice_q(dist: &AttractionDistribution, seed: u64) -> Result<Vec<f64>> {
    sample_with_rng(dist, &mut stream_rng(seed, 0))
}

/// Estimates the aggregate `mean_j mean_i |q_i|` over `samples` draws,
/// with the standard error of that mean. Sample `i` uses stream `i` of
/// the master seed, so the estimate is reproducible bit for bit.
pub fn estimate_aggregate(
    dist: &AttractionDistribution,
    samples: u64,
    seed: u64,
) -> Result<McResult> {
    if samples == 0 {
        return Err(QdtError::InvalidDistribution {
            reason: "need at least one sample".to_string(),
        });
    }
    let n = dist.lattice_size as f64;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..samples {
        let q = sample_with_rng(dist, &mut stream_rng(seed, i))?;
        let y = q.iter().map(|v| v.abs()).sum::<f64>() / n;
        let delta = y - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (y - mean);
    }
    let variance = if samples > 1 {
        m2 / (samples - 1) as f64
    } else {
        0.0
    };
    Ok(McResult {
        sample_count: samples,
        aggregate_abs_q: mean,
        standard_error: (variance / samples as f64).sqrt(),
        seed,
    })
}
