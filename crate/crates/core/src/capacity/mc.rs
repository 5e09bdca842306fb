//! Chunked, seeded Monte Carlo machinery.
//!
//! Samples are generated in fixed-size chunks; chunk `k` of a run with master
//! seed `s` always comes from stream `(s, k)`. Workers process whole chunks
//! and partial moments are merged in chunk order, so an estimate depends only
//! on `(seed, samples)`, never on the worker count. Extending `samples` keeps
//! the earlier chunks untouched, which makes the first `N` draws a common
//! prefix of any longer run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::math::{Gram, SeededRng};

/// Samples per chunk (and per derived rng stream).
pub const CHUNK_LEN: u64 = 1 << 14;

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0xC517;
pub const DEFAULT_WORKERS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            workers: DEFAULT_WORKERS,
        }
    }
}

impl SamplingConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        SamplingConfig {
            samples,
            seed,
            workers: DEFAULT_WORKERS,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        contract!(self.samples >= 1, "at least one Monte Carlo sample is required");
        contract!(self.workers >= 1, "worker count must be at least 1");
        Ok(())
    }

    fn chunks(&self) -> Vec<(u64, usize)> {
        let full = self.samples / CHUNK_LEN;
        let rest = self.samples % CHUNK_LEN;
        let mut out: Vec<(u64, usize)> = (0..full).map(|k| (k, CHUNK_LEN as usize)).collect();
        if rest > 0 {
            out.push((full, rest as usize));
        }
        out
    }

    /// Runs `f` over every chunk, returning results in chunk order.
    pub(crate) fn map_chunks<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, usize) -> T + Sync + Send,
    {
        let chunks = self.chunks();
        if self.workers <= 1 {
            return chunks.into_iter().map(|(k, len)| f(k, len)).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .expect("thread pool");
        pool.install(|| chunks.into_par_iter().map(|(k, len)| f(k, len)).collect())
    }
}

/// Result of an ergodic expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MonteCarloEstimate {
    pub fn from_moments(m: &Moments, seed: u64) -> Self {
        MonteCarloEstimate {
            value: m.mean(),
            stderr: m.stderr(),
            samples: m.count(),
            seed,
        }
    }

    /// Combined standard error of the difference of two independent estimates.
    pub fn combined_stderr(&self, other: &MonteCarloEstimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

/// Streaming mean and second central moment (Welford, merged with Chan's
/// pairwise rule).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * (other.n as f64 / n as f64);
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n as f64);
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Joint moments of paired samples `(a_i, b_i)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairedMoments {
    pub a: Moments,
    pub b: Moments,
    /// Sum of co-deviations `Σ (a_i − ā)(b_i − b̄)`.
    co: f64,
}

impl PairedMoments {
    pub fn push(&mut self, a: f64, b: f64) {
        let n = self.a.n + 1;
        let da = a - self.a.mean;
        self.a.push(a);
        self.b.push(b);
        // Uses the pre-update deviation of `a` and post-update of `b`.
        self.co += da * (b - self.b.mean);
        debug_assert_eq!(self.a.n, n);
    }

    pub fn merge(&mut self, other: &PairedMoments) {
        if other.a.n == 0 {
            return;
        }
        if self.a.n == 0 {
            *self = *other;
            return;
        }
        let (n1, n2) = (self.a.n as f64, other.a.n as f64);
        let da = other.a.mean - self.a.mean;
        let db = other.b.mean - self.b.mean;
        self.co += other.co + da * db * n1 * n2 / (n1 + n2);
        self.a.merge(&other.a);
        self.b.merge(&other.b);
    }

    pub fn covariance(&self) -> f64 {
        if self.a.n < 2 {
            0.0
        } else {
            self.co / (self.a.n - 1) as f64
        }
    }

    /// `ā / b̄` with its delta-method standard error.
    pub fn ratio(&self) -> (f64, f64) {
        let (ma, mb) = (self.a.mean(), self.b.mean());
        if mb == 0.0 {
            return (f64::NAN, f64::NAN);
        }
        let r = ma / mb;
        let var = self.a.variance() - 2.0 * r * self.covariance() + r * r * self.b.variance();
        let se = (var.max(0.0) / self.a.n as f64).sqrt() / mb.abs();
        (r, se)
    }
}

/// One fading draw: two independent `CN(0, I₂)` channel rows, summarised by
/// their Gram entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    /// `‖first‖²`
    pub first: f64,
    /// `‖second‖²`
    pub second: f64,
    /// `det` of the 2×2 Gram matrix of the two rows.
    pub det: f64,
}

impl ChannelDraw {
    pub fn gram(&self) -> Gram {
        Gram::Pair {
            norm1: self.first,
            norm2: self.second,
            det: self.det,
        }
    }
}

fn draw_chunk(seed: u64, chunk: u64, len: usize) -> Vec<ChannelDraw> {
    let mut rng = SeededRng::new(seed, chunk);
    (0..len)
        .map(|_| {
            let r1 = rng.cvec2();
            let r2 = rng.cvec2();
            match Gram::pair(&r1, &r2) {
                Gram::Pair { norm1, norm2, det } => ChannelDraw {
                    first: norm1,
                    second: norm2,
                    det,
                },
                Gram::Single { .. } => unreachable!(),
            }
        })
        .collect()
}

/// Channel realisations shared by every estimator of a sweep (common random
/// numbers).
#[derive(Debug, Clone)]
pub struct ChannelBank {
    config: SamplingConfig,
    chunks: Vec<Vec<ChannelDraw>>,
}

impl ChannelBank {
    pub fn draw(config: &SamplingConfig) -> Result<Self> {
        config.validate()?;
        let seed = config.seed;
        let chunks = config.map_chunks(|k, len| draw_chunk(seed, k, len));
        Ok(ChannelBank {
            config: *config,
            chunks,
        })
    }

    pub fn config(&self) -> &SamplingConfig {
        &self.config
    }

    pub fn len(&self) -> u64 {
        self.config.samples
    }

    pub fn is_empty(&self) -> bool {
        self.config.samples == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &ChannelDraw> {
        self.chunks.iter().flatten()
    }

    fn map_chunks<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&[ChannelDraw]) -> T + Sync + Send,
    {
        if self.config.workers <= 1 {
            return self.chunks.iter().map(|c| f(c)).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.workers)
            .build()
            .expect("thread pool");
        pool.install(|| self.chunks.par_iter().map(|c| f(c)).collect())
    }

    /// Sample mean of `integrand` over the bank.
    pub fn estimate<F>(&self, integrand: F) -> MonteCarloEstimate
    where
        F: Fn(&ChannelDraw) -> f64 + Sync + Send,
    {
        let parts = self.map_chunks(|c| c.iter().map(&integrand).collect::<Moments>());
        let mut total = Moments::default();
        for p in &parts {
            total.merge(p);
        }
        MonteCarloEstimate::from_moments(&total, self.config.seed)
    }

    /// Joint moments of two integrands evaluated on the same draws.
    pub fn estimate_paired<F>(&self, integrand: F) -> PairedMoments
    where
        F: Fn(&ChannelDraw) -> (f64, f64) + Sync + Send,
    {
        let parts = self.map_chunks(|c| {
            let mut m = PairedMoments::default();
            for d in c {
                let (a, b) = integrand(d);
                m.push(a, b);
            }
            m
        });
        let mut total = PairedMoments::default();
        for p in &parts {
            total.merge(p);
        }
        total
    }
}
