//! Rate-distortion of a Gaussian source with fading variance, and the ergodic
//! side-information rate.

use serde::{Deserialize, Serialize};

use crate::capacity::mc::{MonteCarloEstimate, Moments, SamplingConfig};
use crate::error::{contract, Error, Result};
use crate::math::SeededRng;

fn check_inputs(variances: &[f64], budget: f64) -> Result<()> {
    contract!(!variances.is_empty(), "variance sample set is empty");
    contract!(
        variances.iter().all(|v| v.is_finite() && *v >= 0.0),
        "variance samples must be finite and nonnegative"
    );
    contract!(
        budget > 0.0 && budget.is_finite(),
        "distortion budget must be positive, got {budget}"
    );
    Ok(())
}

/// Water level `λ` of the reverse-waterfilling solution, or `None` when the
/// budget covers every component (`λ ≥ max σ²`, zero rate).
pub fn water_level(variances: &[f64], budget: f64) -> Result<Option<f64>> {
    check_inputs(variances, budget)?;
    let n = variances.len() as f64;
    let mut sorted = variances.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    if total / n <= budget {
        return Ok(None);
    }
    // With the k smallest components fully described (D = σ²), the rest share
    // level λ: (S_k + (n − k) λ) / n = budget.
    let mut prefix = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        let k = k as f64;
        let level = budget + (k * budget - prefix) / (n - k);
        if level <= v {
            return Ok(Some(level));
        }
        prefix += v;
    }
    unreachable!("average variance exceeds the budget, so some level binds")
}

/// Minimum over `D_σ` with `E[D_σ] ≤ D` of `E[log₂(σ²/D_σ)]⁺`, over the
/// empirical distribution of `variances`.
pub fn rd_reverse_waterfill(variances: &[f64], budget: f64) -> Result<f64> {
    let Some(level) = water_level(variances, budget)? else {
        return Ok(0.0);
    };
    let n = variances.len() as f64;
    let mut active: Vec<f64> = variances.iter().copied().filter(|&v| v > level).collect();
    active.sort_by(f64::total_cmp);
    // Weight runs of equal variances by their share so a single level is exact.
    Ok(active
        .chunk_by(|a, b| a == b)
        .map(|run| run.len() as f64 / n * (run[0] / level).log2())
        .sum())
}

/// `E[log₂(1 + σ²/D)]`: equal distortion everywhere, no optimisation.
pub fn rd_suboptimal(variances: &[f64], budget: f64) -> Result<f64> {
    check_inputs(variances, budget)?;
    let sum: f64 = variances.iter().map(|v| (v / budget).ln_1p()).sum();
    Ok(sum / std::f64::consts::LN_2 / variances.len() as f64)
}

/// Distribution of the random side-information gain `A` in `Y = A X + U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GainDistribution {
    Constant { value: f64 },
    Normal { mean: f64, std: f64 },
    Uniform { low: f64, high: f64 },
    /// Rayleigh amplitude with `E[A²] = 2 scale²`.
    Rayleigh { scale: f64 },
}

impl GainDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GainDistribution::Constant { value } => {
                contract!(value.is_finite(), "gain must be finite")
            }
            GainDistribution::Normal { mean, std } => {
                contract!(mean.is_finite() && std >= 0.0 && std.is_finite(), "invalid normal gain")
            }
            GainDistribution::Uniform { low, high } => {
                contract!(low.is_finite() && high.is_finite() && low <= high, "invalid uniform gain")
            }
            GainDistribution::Rayleigh { scale } => {
                contract!(scale >= 0.0 && scale.is_finite(), "invalid Rayleigh gain")
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut SeededRng) -> f64 {
        match *self {
            GainDistribution::Constant { value } => value,
            GainDistribution::Normal { mean, std } => mean + std * rng.normal(),
            GainDistribution::Uniform { low, high } => low + (high - low) * rng.uniform(),
            GainDistribution::Rayleigh { scale } => {
                scale * (-2.0 * (1.0 - rng.uniform()).ln()).sqrt()
            }
        }
    }
}

/// `σ²_{X|Y} = σ_X² σ_U² / (a² σ_X² + σ_U²)`.
pub fn conditional_variance(signal_var: f64, noise_var: f64, gain: f64) -> f64 {
    signal_var * noise_var / (gain * gain * signal_var + noise_var)
}

/// `E_A[log₂(σ²_{X|Y}/D)]` for `Y = A X + U`, valid only while
/// `0 ≤ D ≤ σ²_{X|Y}` holds for every sampled gain.
pub fn ergodic_wyner_rate(
    signal_var: f64,
    noise_var: f64,
    distortion: f64,
    gain: &GainDistribution,
    mc: &SamplingConfig,
) -> Result<MonteCarloEstimate> {
    mc.validate()?;
    gain.validate()?;
    contract!(signal_var > 0.0 && signal_var.is_finite(), "source variance must be positive");
    contract!(noise_var > 0.0 && noise_var.is_finite(), "side-information noise variance must be positive");
    contract!(distortion > 0.0 && distortion.is_finite(), "distortion must be positive");

    let parts = mc.map_chunks(|k, len| -> Result<Moments> {
        let mut rng = SeededRng::new(mc.seed, k);
        let mut m = Moments::default();
        for _ in 0..len {
            let a = gain.sample(&mut rng);
            let cond = conditional_variance(signal_var, noise_var, a);
            if cond < distortion {
                return Err(Error::Domain(format!(
                    "distortion {distortion} exceeds the conditional variance {cond} at gain {a}; \
                     the rate is defined only for 0 <= D <= sigma^2_(X|Y)"
                )));
            }
            m.push((cond / distortion).log2());
        }
        Ok(m)
    });
    let mut total = Moments::default();
    for p in parts {
        total.merge(&p?);
    }
    Ok(MonteCarloEstimate::from_moments(&total, mc.seed))
}
