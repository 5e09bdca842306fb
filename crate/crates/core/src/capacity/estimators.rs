//! Ergodic rate expectations over i.i.d. Rayleigh fading.

use std::f64::consts::LN_2;

use crate::capacity::mc::{ChannelBank, ChannelDraw, MonteCarloEstimate, SamplingConfig};
use crate::error::{contract, Result};

/// `log₂(1 + (P/2)‖g‖²)`: one draw of the 2×1 no-CSIT rate.
pub fn c21_integrand(d: &ChannelDraw, power: f64) -> f64 {
    (0.5 * power * d.first).ln_1p() / LN_2
}

/// Log-det rate of the 2×2 channel whose second receive antenna sees noise
/// variance `1 + D`.
pub fn c22d_integrand(d: &ChannelDraw, power: f64, distortion: f64) -> f64 {
    d.gram().logdet(power, &[1.0, 1.0 + distortion])
}

/// `log₂(1 + (P/2D)(‖g‖² + ‖h‖²))`: per-sample rate needed to describe the
/// phase-3 sum at squared-error distortion `D`.
pub fn rq_integrand(d: &ChannelDraw, power: f64, distortion: f64) -> f64 {
    (0.5 * power / distortion * (d.first + d.second)).ln_1p() / LN_2
}

pub(crate) fn check_power(power: f64) -> Result<()> {
    contract!(
        power >= 0.0 && power.is_finite(),
        "transmit power must be finite and nonnegative, got {power}"
    );
    Ok(())
}

pub fn c21_on(bank: &ChannelBank, power: f64) -> Result<MonteCarloEstimate> {
    check_power(power)?;
    Ok(bank.estimate(|d| c21_integrand(d, power)))
}

pub fn c22d_on(bank: &ChannelBank, power: f64, distortion: f64) -> Result<MonteCarloEstimate> {
    check_power(power)?;
    contract!(
        distortion >= 0.0 && distortion.is_finite(),
        "distortion must be finite and nonnegative, got {distortion}"
    );
    Ok(bank.estimate(|d| c22d_integrand(d, power, distortion)))
}

pub fn rq_on(bank: &ChannelBank, power: f64, distortion: f64) -> Result<MonteCarloEstimate> {
    check_power(power)?;
    contract!(
        distortion > 0.0 && distortion.is_finite(),
        "quantization distortion must be positive, got {distortion}"
    );
    Ok(bank.estimate(|d| rq_integrand(d, power, distortion)))
}

/// Ergodic capacity of the 2-transmit, 1-receive antenna channel without CSIT.
pub fn c21(power: f64, mc: &SamplingConfig) -> Result<MonteCarloEstimate> {
    check_power(power)?;
    c21_on(&ChannelBank::draw(mc)?, power)
}

/// Ergodic capacity of the 2×2 channel with noise variances `[1, 1 + D]`.
pub fn c22d(power: f64, distortion: f64, mc: &SamplingConfig) -> Result<MonteCarloEstimate> {
    check_power(power)?;
    c22d_on(&ChannelBank::draw(mc)?, power, distortion)
}

/// Quantization rate `R_Q(D)`.
pub fn rq(power: f64, distortion: f64, mc: &SamplingConfig) -> Result<MonteCarloEstimate> {
    check_power(power)?;
    rq_on(&ChannelBank::draw(mc)?, power, distortion)
}
