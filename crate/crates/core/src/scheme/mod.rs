//! Signal-level simulation of the three-phase transmission over `n` blocks.
//!
//! Phase 1 (2) sends interleaved user-1 (user-2) symbols. With delayed
//! channel state the transmitter then rebuilds what each receiver overheard,
//! quantizes the sum `s₂₁ + s₁₂` and delivers it to both receivers in
//! phase 3. Delivery is modeled error-free; the phase-3 length only enters
//! the rate accounting.

mod csit;
mod dump;
mod grid;
mod stats;
mod transcript;

use serde::{Deserialize, Serialize};

use crate::capacity::MonteCarloEstimate;
use crate::error::{contract, Result};

pub use csit::{audit_causality, CsiRead, DelayedCsi, Receiver, SymbolTime};
pub use dump::{write_dump, DUMP_MAGIC, MAX_DUMP_BYTES};
pub use grid::{deinterleave, interleave, Grid};
pub use stats::{correlation, lag1_autocorrelation, mean_power};
pub use transcript::{
    achieved_rate_pair, deinterleave_and_reconstruct, mi_accounting, noise_statistics,
    phase3_budget, reference_rates, run_phase_3, run_phases_1_2, AchievedRate, DataPhase,
    MiReport, NoiseStats, Phase3, Reconstruction, ReferenceRates, SchemeTranscript,
};

/// Largest supported block count; the transcript holds `O(n²)` symbols.
pub const MAX_BLOCKS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub n: usize,
    pub power: f64,
    pub distortion: f64,
    /// Back-off of the message rate below `C₂ₓ₂(D)`.
    pub epsilon: f64,
    /// Margin below `C₂ₓ₁` used when sizing phase 3.
    pub delta: f64,
    pub seed: u64,
    /// Samples behind the reference `C₂ₓ₁`, `C₂ₓ₂(D)` and `R_Q(D)` estimates.
    pub reference_samples: u64,
}

impl SchemeConfig {
    pub fn new(n: usize, power: f64) -> Self {
        SchemeConfig {
            n,
            power,
            distortion: 4.0,
            epsilon: 0.0,
            delta: 1e-3,
            seed: crate::capacity::DEFAULT_SEED,
            reference_samples: crate::capacity::DEFAULT_SAMPLES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        contract!(
            (1..=MAX_BLOCKS).contains(&self.n),
            "block count must be in 1..={MAX_BLOCKS}, got {}",
            self.n
        );
        contract!(self.power > 0.0 && self.power.is_finite(), "power must be positive, got {}", self.power);
        contract!(
            self.distortion > 0.0 && self.distortion.is_finite(),
            "distortion must be positive, got {}",
            self.distortion
        );
        contract!(self.epsilon >= 0.0, "epsilon must be non-negative, got {}", self.epsilon);
        contract!(self.delta > 0.0, "delta must be positive, got {}", self.delta);
        contract!(self.reference_samples >= 1, "reference sample count must be at least 1");
        Ok(())
    }
}

/// Report of a complete run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub config: SchemeConfig,
    pub phase3_budget: u64,
    pub noise_var_user1: f64,
    pub noise_var_user2: f64,
    pub residual_autocorr: f64,
    pub mi_user1: MonteCarloEstimate,
    pub mi_user2: MonteCarloEstimate,
    pub achieved_rate_pair: AchievedRate,
    /// `C₂ₓ₂(D) − ε`.
    pub message_rate: f64,
    pub reference: ReferenceRates,
    pub quantization_noise_var: f64,
    pub residual_signal_corr: f64,
    pub direct_residual_corr: f64,
    pub quantization_input_corr: f64,
    pub causality_audit: bool,
    pub interleaver_round_trip: bool,
}

/// Relative tolerance on the residual noise variance `1 + D`.
pub const NOISE_VAR_TOL: f64 = 0.05;
/// Bound on every empirical correlation in the report.
pub const CORR_BOUND: f64 = 0.02;

impl SchemeSummary {
    pub fn from_transcript(tr: &SchemeTranscript) -> Result<SchemeSummary> {
        let p3 = tr
            .phase3
            .as_ref()
            .ok_or_else(|| crate::Error::Contract("phase 3 has not run".into()))?;
        let stats = noise_statistics(tr)?;
        let mi = mi_accounting(tr)?;
        let r = &p3.reference;
        let round_trip = [&tr.phase1, &tr.phase2]
            .iter()
            .all(|ph| deinterleave(&ph.transmit).is_ok_and(|u| u == ph.codewords));
        Ok(SchemeSummary {
            config: tr.config,
            phase3_budget: p3.budget,
            noise_var_user1: stats.noise_var_user1,
            noise_var_user2: stats.noise_var_user2,
            residual_autocorr: stats.residual_autocorr,
            mi_user1: mi.user1,
            mi_user2: mi.user2,
            achieved_rate_pair: achieved_rate_pair(r.c22d.value, r.rq.value, r.c21.value),
            message_rate: r.c22d.value - tr.config.epsilon,
            reference: *r,
            quantization_noise_var: stats.quantization_noise_var,
            residual_signal_corr: stats.residual_signal_corr,
            direct_residual_corr: stats.direct_residual_corr,
            quantization_input_corr: stats.quantization_input_corr,
            causality_audit: tr.audit_causality().is_ok(),
            interleaver_round_trip: round_trip,
        })
    }

    /// Statistical checks that must hold for a healthy run; each failure is
    /// described in the returned list.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut failures = Vec::new();
        let target = 1.0 + self.config.distortion;
        for (user, var) in [(1, self.noise_var_user1), (2, self.noise_var_user2)] {
            if (var / target - 1.0).abs() > NOISE_VAR_TOL {
                failures.push(format!(
                    "user {user} residual noise variance {var} is not within 5% of {target}"
                ));
            }
        }
        for (name, rho) in [
            ("residual lag-1 autocorrelation", self.residual_autocorr),
            ("residual-signal correlation", self.residual_signal_corr),
            ("direct-residual noise correlation", self.direct_residual_corr),
        ] {
            if rho.abs() >= CORR_BOUND {
                failures.push(format!("{name} {rho} is not below {CORR_BOUND}"));
            }
        }
        let c22d = &self.reference.c22d;
        for (user, mi) in [(1, &self.mi_user1), (2, &self.mi_user2)] {
            let tol = 3.0 * mi.combined_stderr(c22d);
            if (mi.value - c22d.value).abs() > tol {
                failures.push(format!(
                    "user {user} mutual information {} differs from C22(D) = {} by more than {tol}",
                    mi.value, c22d.value
                ));
            }
        }
        if !self.causality_audit {
            failures.push("delayed-CSI causality audit failed".into());
        }
        if !self.interleaver_round_trip {
            failures.push("interleaver round trip failed".into());
        }
        failures
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("summary serializes")
    }
}

/// Runs all phases and the reconstruction.
pub fn run_scheme(cfg: &SchemeConfig) -> Result<SchemeTranscript> {
    let tr = run_phases_1_2(cfg)?;
    let tr = run_phase_3(tr)?;
    deinterleave_and_reconstruct(tr)
}
