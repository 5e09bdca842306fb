//! The three-phase transmission, one stage at a time.

use serde::{Deserialize, Serialize};

use crate::capacity::{c21_on, c22d_on, rq_on, ChannelBank, MonteCarloEstimate, Moments, SamplingConfig};
use crate::error::{contract, Error, Result};
use crate::math::{logdet_capacity_term, CMat, CVec2, Complex, SeededRng};
use crate::quantizer::{DitheredQuantizer, QuantizedBlock};
use crate::scheme::csit::{audit_causality, CsiRead, DelayedCsi, Receiver, SymbolTime};
use crate::scheme::grid::{deinterleave, interleave, Grid};
use crate::scheme::stats::{correlation, lag1_autocorrelation, mean_power};
use crate::scheme::SchemeConfig;

// Scheme streams sit far above the chunk streams of the reference estimators.
const STREAM_BASE: u64 = 1 << 62;

fn stream(seed: u64, id: u64) -> SeededRng {
    SeededRng::new(seed, STREAM_BASE + id)
}

fn cn_grid(n: usize, rng: &mut SeededRng) -> Grid<Complex> {
    Grid::from_fn(n, n, |_, _| rng.cn01())
}

fn cvec_grid(n: usize, rng: &mut SeededRng, scale: f64) -> Grid<CVec2> {
    Grid::from_fn(n, n, |_, _| rng.cvec2().scale(scale))
}

/// Everything generated during one data phase (phase `j` carries user `j`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataPhase {
    /// Codewords in message order: `[message][position]`.
    pub codewords: Grid<CVec2>,
    /// Interleaved transmit symbols: `[block][time]`.
    pub transmit: Grid<CVec2>,
    /// Channel rows towards receiver one (`h`) and two (`g`).
    pub rx1_channel: Grid<CVec2>,
    pub rx2_channel: Grid<CVec2>,
    pub rx1_noise: Grid<Complex>,
    pub rx2_noise: Grid<Complex>,
    pub rx1_obs: Grid<Complex>,
    pub rx2_obs: Grid<Complex>,
}

impl DataPhase {
    fn simulate(cfg: &SchemeConfig, user: u64) -> Result<DataPhase> {
        let n = cfg.n;
        let amplitude = (0.5 * cfg.power).sqrt();
        let codewords = cvec_grid(n, &mut stream(cfg.seed, 10 * user), amplitude);
        let transmit = interleave(&codewords)?;
        let rx1_channel = cvec_grid(n, &mut stream(cfg.seed, 10 * user + 1), 1.0);
        let rx2_channel = cvec_grid(n, &mut stream(cfg.seed, 10 * user + 2), 1.0);
        let rx1_noise = cn_grid(n, &mut stream(cfg.seed, 10 * user + 3));
        let rx2_noise = cn_grid(n, &mut stream(cfg.seed, 10 * user + 4));
        let observe = |h: &Grid<CVec2>, z: &Grid<Complex>| {
            Grid::from_fn(n, n, |b, t| h.get(b, t).apply(transmit.get(b, t)) + z.get(b, t))
        };
        let rx1_obs = observe(&rx1_channel, &rx1_noise);
        let rx2_obs = observe(&rx2_channel, &rx2_noise);
        Ok(DataPhase {
            codewords,
            transmit,
            rx1_channel,
            rx2_channel,
            rx1_noise,
            rx2_noise,
            rx1_obs,
            rx2_obs,
        })
    }
}

/// Reference ergodic rates used for phase-3 accounting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRates {
    pub c21: MonteCarloEstimate,
    pub c22d: MonteCarloEstimate,
    pub rq: MonteCarloEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase3 {
    pub reference: ReferenceRates,
    /// Phase-3 channel uses charged per block.
    pub budget: u64,
    /// `s₂₁ + s₁₂` per block, in transmit order.
    pub sum: Grid<Complex>,
    /// Lattice indices, one block per communication block.
    #[serde(skip)]
    pub indices: Vec<QuantizedBlock>,
    pub step: f64,
    /// Reconstruction both receivers obtain after decoding phase 3.
    pub delivered: Grid<Complex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    /// `ỹ₂₁` at receiver one and `ỹ₁₂` at receiver two, transmit order.
    pub rx1_overheard: Grid<Complex>,
    pub rx2_overheard: Grid<Complex>,
    /// `ỹ − s` after de-interleaving: `[message][block]`.
    pub rx1_residual: Grid<Complex>,
    pub rx2_residual: Grid<Complex>,
}

/// Full record of an `n`-block run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeTranscript {
    pub config: SchemeConfig,
    pub phase1: DataPhase,
    pub phase2: DataPhase,
    /// `s₂₁ = g·x₁` (phase 1 at receiver two) and `s₁₂ = h·x₂` (phase 2 at
    /// receiver one), as rebuilt by the transmitter from delayed CSI.
    pub s21: Grid<Complex>,
    pub s12: Grid<Complex>,
    pub csi_log: Vec<CsiRead>,
    pub phase3: Option<Phase3>,
    pub reconstruction: Option<Reconstruction>,
}

/// Phases 1 and 2 of every block, then the transmitter's delayed-CSI
/// reconstruction of the overheard signals.
pub fn run_phases_1_2(cfg: &SchemeConfig) -> Result<SchemeTranscript> {
    cfg.validate()?;
    let n = cfg.n;
    let phase1 = DataPhase::simulate(cfg, 1)?;
    let phase2 = DataPhase::simulate(cfg, 2)?;

    let mut csi = DelayedCsi::new(
        [&phase1.rx1_channel, &phase2.rx1_channel],
        [&phase1.rx2_channel, &phase2.rx2_channel],
    );
    let mut s21 = Vec::with_capacity(n * n);
    let mut s12 = Vec::with_capacity(n * n);
    for b in 0..n {
        // The overheard sums of block b are formed when phase 3 of b begins.
        let now = SymbolTime::new(b, 3, 0);
        for t in 0..n {
            let g = csi.read(now, SymbolTime::new(b, 1, t), Receiver::Two)?;
            s21.push(g.apply(phase1.transmit.get(b, t)));
        }
        for t in 0..n {
            let h = csi.read(now, SymbolTime::new(b, 2, t), Receiver::One)?;
            s12.push(h.apply(phase2.transmit.get(b, t)));
        }
    }
    let csi_log = csi.into_log();
    Ok(SchemeTranscript {
        config: *cfg,
        s21: Grid::from_vec(n, n, s21)?,
        s12: Grid::from_vec(n, n, s12)?,
        phase1,
        phase2,
        csi_log,
        phase3: None,
        reconstruction: None,
    })
}

/// `⌈n·R_Q / (C₂ₓ₁ − δ)⌉` channel uses for phase 3 of one block.
pub fn phase3_budget(n: usize, rq: f64, c21: f64, delta: f64) -> Result<u64> {
    let capacity = c21 - delta;
    if rq >= capacity {
        return Err(Error::Domain(format!(
            "quantization rate R_Q(D) = {rq} is not below C21 - delta = {capacity}; \
             phase 3 needs R_Q(D) < C21 - delta (choose a larger D, e.g. D = 4)"
        )));
    }
    Ok((n as f64 * rq / capacity).ceil() as u64)
}

pub fn reference_rates(cfg: &SchemeConfig) -> Result<ReferenceRates> {
    let bank = ChannelBank::draw(&SamplingConfig::new(cfg.reference_samples, cfg.seed))?;
    Ok(ReferenceRates {
        c21: c21_on(&bank, cfg.power)?,
        c22d: c22d_on(&bank, cfg.power, cfg.distortion)?,
        rq: rq_on(&bank, cfg.power, cfg.distortion)?,
    })
}

/// Quantizes `s₂₁ + s₁₂` block by block and delivers the reconstruction to
/// both receivers.
pub fn run_phase_3(mut tr: SchemeTranscript) -> Result<SchemeTranscript> {
    contract!(tr.phase3.is_none(), "phase 3 already ran");
    let cfg = tr.config;
    let n = cfg.n;
    let reference = reference_rates(&cfg)?;
    let budget = phase3_budget(n, reference.rq.value, reference.c21.value, cfg.delta)?;

    let sum = tr.s21.zip_map(&tr.s12, |a, b| a + b);
    let mut encoder = DitheredQuantizer::for_distortion(cfg.distortion, cfg.seed)?;
    let mut rx1 = DitheredQuantizer::for_distortion(cfg.distortion, cfg.seed)?;
    let mut rx2 = DitheredQuantizer::for_distortion(cfg.distortion, cfg.seed)?;
    let mut indices = Vec::with_capacity(n);
    let mut delivered = Vec::with_capacity(n * n);
    for b in 0..n {
        let (block, recon) = encoder.quantize(sum.row(b))?;
        let at_rx1 = rx1.dequantize(&block)?;
        let at_rx2 = rx2.dequantize(&block)?;
        contract!(
            at_rx1 == recon && at_rx2 == recon,
            "receiver reconstruction differs from the encoder's in block {b}"
        );
        delivered.extend(recon);
        indices.push(block);
    }
    tr.phase3 = Some(Phase3 {
        reference,
        budget,
        sum,
        indices,
        step: encoder.step(),
        delivered: Grid::from_vec(n, n, delivered)?,
    });
    Ok(tr)
}

/// Each receiver subtracts its own earlier observation from the delivered
/// sum and undoes the interleaving.
pub fn deinterleave_and_reconstruct(mut tr: SchemeTranscript) -> Result<SchemeTranscript> {
    let p3 = tr
        .phase3
        .as_ref()
        .ok_or_else(|| Error::Contract("phase 3 has not run".into()))?;
    contract!(tr.reconstruction.is_none(), "reconstruction already ran");
    // Receiver one holds y₁₂ from phase 2, receiver two holds y₂₁ from phase 1.
    let rx1_overheard = p3.delivered.zip_map(&tr.phase2.rx1_obs, |s, y| s - y);
    let rx2_overheard = p3.delivered.zip_map(&tr.phase1.rx2_obs, |s, y| s - y);
    let rx1_residual = deinterleave(&rx1_overheard.zip_map(&tr.s21, |y, s| y - s))?;
    let rx2_residual = deinterleave(&rx2_overheard.zip_map(&tr.s12, |y, s| y - s))?;
    tr.reconstruction = Some(Reconstruction {
        rx1_overheard,
        rx2_overheard,
        rx1_residual,
        rx2_residual,
    });
    Ok(tr)
}

/// Per-user average of the 2×2 log-det rate seen through the direct row
/// (noise 1) and the reconstructed overheard row (noise `1 + D`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiReport {
    pub user1: MonteCarloEstimate,
    pub user2: MonteCarloEstimate,
}

pub fn mi_accounting(tr: &SchemeTranscript) -> Result<MiReport> {
    contract!(tr.reconstruction.is_some(), "reconstruction has not run");
    let cfg = &tr.config;
    let noise = [1.0, 1.0 + cfg.distortion];
    let average = |direct: &Grid<CVec2>, overheard: &Grid<CVec2>| -> Result<MonteCarloEstimate> {
        let mut m = Moments::default();
        for (d, o) in direct.as_slice().iter().zip(overheard.as_slice()) {
            m.push(logdet_capacity_term(&CMat::pair(*d, *o), cfg.power, &noise)?);
        }
        Ok(MonteCarloEstimate::from_moments(&m, cfg.seed))
    };
    Ok(MiReport {
        user1: average(&tr.phase1.rx1_channel, &tr.phase1.rx2_channel)?,
        user2: average(&tr.phase2.rx2_channel, &tr.phase2.rx1_channel)?,
    })
}

/// Symmetric rate pair `C₂ₓ₂(D) / (2 + R_Q/C₂ₓ₁)` and, when
/// `R_Q ≤ C₂ₓ₁`, the guaranteed floor `C₂ₓ₂(D)/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AchievedRate {
    pub r1: f64,
    pub r2: f64,
    pub floor: Option<f64>,
}

pub fn achieved_rate_pair(c22d: f64, rq: f64, c21: f64) -> AchievedRate {
    let load = rq / c21;
    let r = c22d / (2.0 + load);
    AchievedRate {
        r1: r,
        r2: r,
        floor: (load <= 1.0).then_some(c22d / 3.0),
    }
}

/// Empirical checks on a reconstructed transcript.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseStats {
    pub noise_var_user1: f64,
    pub noise_var_user2: f64,
    pub quantization_noise_var: f64,
    /// Largest pooled lag-1 autocorrelation of the de-interleaved residuals.
    pub residual_autocorr: f64,
    /// Largest correlation of a residual with its overheard signal or with a
    /// transmit antenna stream of the same user.
    pub residual_signal_corr: f64,
    /// Largest correlation between a receiver's direct-observation noise and
    /// its residual.
    pub direct_residual_corr: f64,
    /// Correlation of the quantization error with the quantizer input.
    pub quantization_input_corr: f64,
}

pub fn noise_statistics(tr: &SchemeTranscript) -> Result<NoiseStats> {
    let p3 = tr
        .phase3
        .as_ref()
        .ok_or_else(|| Error::Contract("phase 3 has not run".into()))?;
    let rec = tr
        .reconstruction
        .as_ref()
        .ok_or_else(|| Error::Contract("reconstruction has not run".into()))?;
    let quant_err = p3.delivered.zip_map(&p3.sum, |y, s| y - s);

    // Residuals back in transmit order line up with the transmit-side grids.
    let res1 = interleave(&rec.rx1_residual)?;
    let res2 = interleave(&rec.rx2_residual)?;
    let antenna = |g: &Grid<CVec2>, i: usize| g.map(|v| v.0[i]);
    let signal_corr = [
        correlation(res1.as_slice(), tr.s21.as_slice()),
        correlation(res1.as_slice(), antenna(&tr.phase1.transmit, 0).as_slice()),
        correlation(res1.as_slice(), antenna(&tr.phase1.transmit, 1).as_slice()),
        correlation(res2.as_slice(), tr.s12.as_slice()),
        correlation(res2.as_slice(), antenna(&tr.phase2.transmit, 0).as_slice()),
        correlation(res2.as_slice(), antenna(&tr.phase2.transmit, 1).as_slice()),
    ];
    let n = tr.config.n;
    let rows = |g: &Grid<Complex>| (0..n).map(|r| g.row(r).to_vec()).collect::<Vec<_>>();
    let (r1_rows, r2_rows) = (rows(&rec.rx1_residual), rows(&rec.rx2_residual));
    Ok(NoiseStats {
        noise_var_user1: mean_power(rec.rx1_residual.as_slice()),
        noise_var_user2: mean_power(rec.rx2_residual.as_slice()),
        quantization_noise_var: mean_power(quant_err.as_slice()),
        residual_autocorr: lag1_autocorrelation(r1_rows.iter().map(|r| r.as_slice()))
            .max(lag1_autocorrelation(r2_rows.iter().map(|r| r.as_slice()))),
        residual_signal_corr: signal_corr.into_iter().fold(0.0, f64::max),
        direct_residual_corr: correlation(res1.as_slice(), tr.phase1.rx1_noise.as_slice())
            .max(correlation(res2.as_slice(), tr.phase2.rx2_noise.as_slice())),
        quantization_input_corr: correlation(quant_err.as_slice(), p3.sum.as_slice()),
    })
}

impl SchemeTranscript {
    pub fn audit_causality(&self) -> Result<()> {
        audit_causality(&self.csi_log)
    }
}
