//! Per-user gap between the outer bound and the achievable region over a
//! power sweep.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::capacity::{c21_on, c22d_on, ChannelBank, MonteCarloEstimate, PowerGrid, SamplingConfig};
use crate::error::{Error, Result};
use crate::format::{json_num, sig};
use crate::regions::{achievable_region, outer_region, per_user_gap};

/// Per-user gap certified for `D = 4`, in bits/s/Hz.
pub const THEOREM_GAP_BITS: f64 = 1.81;

/// Smallest distortion for which the achievable region is guaranteed valid.
pub const CERTIFIED_DISTORTION: f64 = 4.0;

/// Per-user gap for given `C₂ₓ₁` and `C₂ₓ₂(D)` values.
pub fn gap_at(c21: f64, c22d: f64) -> Result<f64> {
    let outer = outer_region(c21)?;
    let inner = achievable_region(c21, c22d)?;
    per_user_gap(&outer, &inner)
}

/// Half the spread of `f` over `x ± h`, falling back to a one-sided
/// difference when one side leaves the valid domain.
fn sensitivity<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> f64 {
    if h == 0.0 {
        return 0.0;
    }
    match (f(x + h), f(x - h)) {
        (Ok(up), Ok(down)) => 0.5 * (up - down),
        (Ok(up), Err(_)) => f(x).map(|mid| up - mid).unwrap_or(0.0),
        (Err(_), Ok(down)) => f(x).map(|mid| mid - down).unwrap_or(0.0),
        (Err(_), Err(_)) => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub power: f64,
    pub c21: MonteCarloEstimate,
    pub c22d: MonteCarloEstimate,
    pub tau: f64,
    pub tau_stderr: f64,
}

impl GapRecord {
    /// `τ ≤ bound + k·stderr`.
    pub fn within(&self, bound: f64, k: f64) -> bool {
        self.tau <= bound + k * self.tau_stderr
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub distortion: f64,
    pub grid: PowerGrid,
    pub records: Vec<GapRecord>,
}

pub fn gap_sweep(distortion: f64, grid: &PowerGrid, mc: &SamplingConfig) -> Result<GapReport> {
    gap_sweep_with(distortion, grid, mc, false)
}

/// As [`gap_sweep`]; `allow_any_distortion` lifts the `D ≥ 4` requirement.
pub fn gap_sweep_with(
    distortion: f64,
    grid: &PowerGrid,
    mc: &SamplingConfig,
    allow_any_distortion: bool,
) -> Result<GapReport> {
    if !(distortion >= CERTIFIED_DISTORTION || allow_any_distortion && distortion >= 0.0) {
        return Err(Error::Contract(format!(
            "gap sweep needs D >= {CERTIFIED_DISTORTION} (got {distortion}); pass the override to explore other values"
        )));
    }
    let bank = ChannelBank::draw(mc)?;
    let mut records = Vec::with_capacity(grid.len());
    for &power in grid.points() {
        let c21 = c21_on(&bank, power)?;
        let c22d = c22d_on(&bank, power, distortion)?;
        let tau = gap_at(c21.value, c22d.value)
            .map_err(|e| Error::Domain(format!("gap evaluation failed at P = {power}: {e}")))?;
        let d1 = sensitivity(|x| gap_at(x, c22d.value), c21.value, c21.stderr);
        let d2 = sensitivity(|x| gap_at(c21.value, x), c22d.value, c22d.stderr);
        records.push(GapRecord {
            power,
            c21,
            c22d,
            tau,
            tau_stderr: d1.hypot(d2),
        });
    }
    Ok(GapReport {
        distortion,
        grid: grid.clone(),
        records,
    })
}

impl GapReport {
    /// `max` is 1 on the row with the largest gap and 0 elsewhere.
    pub const CSV_HEADER: &'static str = "P,c21,c21_stderr,c22d,c22d_stderr,tau,tau_stderr,max";

    /// Record with the largest gap (the first one on ties).
    pub fn max_record(&self) -> Option<&GapRecord> {
        self.max_index().map(|i| &self.records[i])
    }

    pub fn max_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, r) in self.records.iter().enumerate() {
            if best.is_none_or(|b| r.tau > self.records[b].tau) {
                best = Some(i);
            }
        }
        best
    }

    /// Records violating `τ ≤ bound + k·stderr`.
    pub fn violations(&self, bound: f64, k: f64) -> Vec<&GapRecord> {
        self.records.iter().filter(|r| !r.within(bound, k)).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        let max = self.max_index();
        for (i, r) in self.records.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                sig(r.power),
                sig(r.c21.value),
                sig(r.c21.stderr),
                sig(r.c22d.value),
                sig(r.c22d.stderr),
                sig(r.tau),
                sig(r.tau_stderr),
                u8::from(max == Some(i))
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let max = self.max_index();
        Value::Array(
            self.records
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    json!({
                        "P": json_num(r.power),
                        "c21": json_num(r.c21.value),
                        "c21_stderr": json_num(r.c21.stderr),
                        "c22d": json_num(r.c22d.value),
                        "c22d_stderr": json_num(r.c22d.stderr),
                        "tau": json_num(r.tau),
                        "tau_stderr": json_num(r.tau_stderr),
                        "max": max == Some(i),
                    })
                })
                .collect(),
        )
    }
}
