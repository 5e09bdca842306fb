//! Capacity-region toolkit for the two-user MISO broadcast channel with
//! delayed channel state at the transmitter.
//!
//! * [`math`]: complex arithmetic, small log-det terms, seeded sampling.
//! * [`capacity`]: ergodic rate estimators, quadrature reference,
//!   rate-distortion and power sweeps.
//! * [`quantizer`]: subtractive-dither lattice quantizer.
//! * [`regions`]: outer bound, achievable region, erosion and gap sweeps.
//! * [`scheme`]: signal-level simulation of the three-phase transmission.

pub mod capacity;
pub mod error;
pub mod format;
pub mod math;
pub mod quantizer;
pub mod regions;
pub mod scheme;

pub use capacity::{
    c21, c21_oracle, c22d, ergodic_wyner_rate, rd_reverse_waterfill, rd_suboptimal, rq, sweep,
    EstimatorTag, GainDistribution, MonteCarloEstimate, PowerGrid, SamplingConfig,
};
pub use error::{Error, Result};
pub use math::{logdet_capacity_term, sample_cn01, CMat, CVec2, Complex, SeededRng};
pub use quantizer::{step_for_distortion, DitheredQuantizer, QuantizedBlock};
pub use regions::{
    achievable_region, corner_points, gap_sweep, is_subset, outer_region, per_user_gap, Corners,
    GapReport, HalfPlane, RatePair, RateRegion,
};
pub use scheme::{SchemeConfig, SchemeSummary, SchemeTranscript};
