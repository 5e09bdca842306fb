//! Power sweeps with common random numbers and their CSV/JSON tables.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::capacity::estimators::{c21_integrand, c22d_on, c21_on, rq_integrand, rq_on};
use crate::capacity::mc::{ChannelBank, MonteCarloEstimate, SamplingConfig};
use crate::error::{contract, Error, Result};
use crate::format::{json_num, sig};

/// Ordered transmit powers (linear scale).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerGrid {
    points: Vec<f64>,
}

impl PowerGrid {
    pub const DEFAULT_LOW: f64 = 1e-2;
    pub const DEFAULT_HIGH: f64 = 1e4;
    pub const DEFAULT_POINTS: usize = 50;

    /// Any strictly increasing list of finite, nonnegative powers.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        contract!(!points.is_empty(), "power grid is empty");
        contract!(
            points.iter().all(|p| p.is_finite() && *p >= 0.0),
            "powers must be finite and nonnegative"
        );
        contract!(
            points.windows(2).all(|w| w[0] < w[1]),
            "power grid must be strictly increasing"
        );
        Ok(PowerGrid { points })
    }

    pub fn log_spaced(low: f64, high: f64, count: usize) -> Result<Self> {
        contract!(low > 0.0 && high > low, "log grid needs 0 < low < high");
        contract!(count >= 2, "log grid needs at least two points");
        let (a, b) = (low.log10(), high.log10());
        let step = (b - a) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| 10f64.powf(a + step * i as f64)).collect();
        points[0] = low;
        points[count - 1] = high;
        PowerGrid::new(points)
    }

    pub fn single(power: f64) -> Result<Self> {
        PowerGrid::new(vec![power])
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for PowerGrid {
    /// 50 log-spaced points over `[10⁻², 10⁴]`.
    fn default() -> Self {
        PowerGrid::log_spaced(Self::DEFAULT_LOW, Self::DEFAULT_HIGH, Self::DEFAULT_POINTS)
            .expect("default grid is valid")
    }
}

impl FromStr for PowerGrid {
    type Err = Error;

    /// `low:high:count` (log-spaced) or a comma-separated list of powers.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |e: &dyn fmt::Display| Error::Usage(format!("invalid power grid '{s}': {e}"));
        if let [low, high, count] = s.split(':').collect::<Vec<_>>()[..] {
            let low: f64 = low.trim().parse().map_err(|e| bad(&e))?;
            let high: f64 = high.trim().parse().map_err(|e| bad(&e))?;
            let count: usize = count.trim().parse().map_err(|e| bad(&e))?;
            return PowerGrid::log_spaced(low, high, count).map_err(|e| bad(&e));
        }
        let points = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| bad(&e))?;
        PowerGrid::new(points).map_err(|e| bad(&e))
    }
}

/// Which ergodic quantity a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "quantity", rename_all = "snake_case")]
pub enum EstimatorTag {
    C21,
    C22d { distortion: f64 },
    Rq { distortion: f64 },
}

impl EstimatorTag {
    pub fn parse(name: &str, distortion: f64) -> Result<Self> {
        match name {
            "c21" => Ok(EstimatorTag::C21),
            "c22d" => Ok(EstimatorTag::C22d { distortion }),
            "rq" => Ok(EstimatorTag::Rq { distortion }),
            other => Err(Error::Usage(format!(
                "unknown estimator '{other}' (expected c21, c22d or rq)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorTag::C21 => "c21",
            EstimatorTag::C22d { .. } => "c22d",
            EstimatorTag::Rq { .. } => "rq",
        }
    }

    pub fn evaluate(&self, bank: &ChannelBank, power: f64) -> Result<MonteCarloEstimate> {
        match *self {
            EstimatorTag::C21 => c21_on(bank, power),
            EstimatorTag::C22d { distortion } => c22d_on(bank, power, distortion),
            EstimatorTag::Rq { distortion } => rq_on(bank, power, distortion),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub power: f64,
    pub estimate: MonteCarloEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub quantity: EstimatorTag,
    pub rows: Vec<SweepRow>,
}

/// Evaluates `quantity` at every grid point on one shared set of channel draws.
pub fn sweep(quantity: EstimatorTag, grid: &PowerGrid, mc: &SamplingConfig) -> Result<SweepTable> {
    let bank = ChannelBank::draw(mc)?;
    sweep_on(quantity, grid, &bank)
}

pub fn sweep_on(quantity: EstimatorTag, grid: &PowerGrid, bank: &ChannelBank) -> Result<SweepTable> {
    let rows = grid
        .points()
        .iter()
        .map(|&power| {
            Ok(SweepRow {
                power,
                estimate: quantity.evaluate(bank, power)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { quantity, rows })
}

impl SweepTable {
    pub const CSV_HEADER: &'static str = "P,value,stderr,samples,seed";

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            let e = &r.estimate;
            writeln!(w, "{},{},{},{},{}", sig(r.power), sig(e.value), sig(e.stderr), e.samples, e.seed)?;
        }
        Ok(())
    }

    /// JSON array of row objects mirroring the CSV columns.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    json!({
                        "P": json_num(r.power),
                        "value": json_num(r.estimate.value),
                        "stderr": json_num(r.estimate.stderr),
                        "samples": r.estimate.samples,
                        "seed": r.estimate.seed,
                    })
                })
                .collect(),
        )
    }
}

/// `R_Q(D)` against `C₂ₓ₁` at one power, estimated on paired draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub power: f64,
    pub rq: MonteCarloEstimate,
    pub c21: MonteCarloEstimate,
    pub ratio: f64,
    /// Delta-method standard error of `ratio` from the paired samples.
    pub ratio_stderr: f64,
}

impl RatioRow {
    /// `ratio ≤ 1 + k·stderr`.
    pub fn within_unit_bound(&self, k: f64) -> bool {
        self.ratio <= 1.0 + k * self.ratio_stderr
    }
}

pub fn ratio_sweep(distortion: f64, grid: &PowerGrid, mc: &SamplingConfig) -> Result<Vec<RatioRow>> {
    let bank = ChannelBank::draw(mc)?;
    ratio_sweep_on(distortion, grid, &bank)
}

pub fn ratio_sweep_on(distortion: f64, grid: &PowerGrid, bank: &ChannelBank) -> Result<Vec<RatioRow>> {
    contract!(
        distortion > 0.0 && distortion.is_finite(),
        "quantization distortion must be positive, got {distortion}"
    );
    let seed = bank.config().seed;
    grid.points()
        .iter()
        .map(|&power| {
            crate::capacity::estimators::check_power(power)?;
            let m = bank.estimate_paired(|d| {
                (rq_integrand(d, power, distortion), c21_integrand(d, power))
            });
            let (ratio, ratio_stderr) = m.ratio();
            Ok(RatioRow {
                power,
                rq: MonteCarloEstimate::from_moments(&m.a, seed),
                c21: MonteCarloEstimate::from_moments(&m.b, seed),
                ratio,
                ratio_stderr,
            })
        })
        .collect()
}

pub const RATIO_CSV_HEADER: &str = "P,rq,rq_stderr,c21,c21_stderr,ratio,ratio_stderr";

pub fn write_ratio_csv<W: Write>(rows: &[RatioRow], mut w: W) -> Result<()> {
    writeln!(w, "{RATIO_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            sig(r.power),
            sig(r.rq.value),
            sig(r.rq.stderr),
            sig(r.c21.value),
            sig(r.c21.stderr),
            sig(r.ratio),
            sig(r.ratio_stderr)
        )?;
    }
    Ok(())
}

pub fn ratio_json(rows: &[RatioRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "P": json_num(r.power),
                    "rq": json_num(r.rq.value),
                    "rq_stderr": json_num(r.rq.stderr),
                    "c21": json_num(r.c21.value),
                    "c21_stderr": json_num(r.c21.stderr),
                    "ratio": json_num(r.ratio),
                    "ratio_stderr": json_num(r.ratio_stderr),
                })
            })
            .collect(),
    )
}
