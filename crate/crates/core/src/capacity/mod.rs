//! Monte Carlo estimators for the ergodic rates, their quadrature reference,
//! and the rate-distortion helpers.

pub mod estimators;
pub mod mc;
pub mod oracle;
pub mod rd;
pub mod sweep;

pub use estimators::{c21, c21_on, c22d, c22d_on, rq, rq_on};
pub use mc::{
    ChannelBank, ChannelDraw, MonteCarloEstimate, Moments, PairedMoments, SamplingConfig, CHUNK_LEN,
    DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_WORKERS,
};
pub use oracle::c21_oracle;
pub use rd::{ergodic_wyner_rate, rd_reverse_waterfill, rd_suboptimal, GainDistribution};
pub use sweep::{
    ratio_json, ratio_sweep, ratio_sweep_on, sweep, sweep_on, write_ratio_csv, EstimatorTag, PowerGrid,
    RatioRow, SweepRow, SweepTable, RATIO_CSV_HEADER,
};
