//! Complex scalars, two-antenna vectors, small channel matrices and the
//! seeded sampling every estimator draws from.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

pub type Complex = num_complex::Complex64;

/// A pair of complex entries: one channel row or one transmit symbol across
/// the two antennas.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CVec2(pub [Complex; 2]);

impl CVec2 {
    pub const fn new(a: Complex, b: Complex) -> Self {
        CVec2([a, b])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    /// `Σ self[i] · x[i]`, the noiseless output of a channel row applied to a
    /// transmit vector (no conjugation).
    pub fn apply(&self, x: &CVec2) -> Complex {
        self.0[0] * x.0[0] + self.0[1] * x.0[1]
    }

    /// Hermitian inner product `Σ self[i] · conj(other[i])`.
    pub fn inner(&self, other: &CVec2) -> Complex {
        self.0[0] * other.0[0].conj() + self.0[1] * other.0[1].conj()
    }

    pub fn scale(&self, k: f64) -> CVec2 {
        CVec2([self.0[0] * k, self.0[1] * k])
    }
}

/// An `r × 2` transfer matrix with `r ∈ {1, 2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: Vec<CVec2>,
}

impl CMat {
    pub fn new(rows: Vec<CVec2>) -> Result<Self> {
        contract!(
            (1..=2).contains(&rows.len()),
            "transfer matrix must have 1 or 2 rows, got {}",
            rows.len()
        );
        Ok(CMat { rows })
    }

    pub fn single(row: CVec2) -> Self {
        CMat { rows: vec![row] }
    }

    pub fn pair(first: CVec2, second: CVec2) -> Self {
        CMat {
            rows: vec![first, second],
        }
    }

    pub fn rows(&self) -> &[CVec2] {
        &self.rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Second-order summary of the rows: enough to evaluate any log-det term
    /// with a diagonal noise covariance.
    pub fn gram(&self) -> Gram {
        match self.rows.as_slice() {
            [r] => Gram::Single { norm: r.norm_sqr() },
            [r1, r2] => Gram::pair(r1, r2),
            _ => unreachable!("row count checked at construction"),
        }
    }
}

/// The Gram matrix `H H†` of an `r × 2` channel, stored as the entries the
/// closed-form determinant needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gram {
    Single {
        norm: f64,
    },
    Pair {
        norm1: f64,
        norm2: f64,
        /// `det(H H†) = ‖r₁‖²‖r₂‖² − |⟨r₁, r₂⟩|²`, clamped at zero.
        det: f64,
    },
}

impl Gram {
    pub fn pair(r1: &CVec2, r2: &CVec2) -> Gram {
        let norm1 = r1.norm_sqr();
        let norm2 = r2.norm_sqr();
        let det = (norm1 * norm2 - r1.inner(r2).norm_sqr()).max(0.0);
        Gram::Pair { norm1, norm2, det }
    }

    pub fn nrows(&self) -> usize {
        match self {
            Gram::Single { .. } => 1,
            Gram::Pair { .. } => 2,
        }
    }

    /// `log₂ det(I + (P/2) Σ^{-1/2} H H† Σ^{-1/2})` with `Σ = diag(noise_vars)`.
    ///
    /// For two rows the determinant is `1 + c·tr M + c²·det M`, `c = P/2`.
    pub fn logdet(&self, power: f64, noise_vars: &[f64]) -> f64 {
        let c = 0.5 * power;
        match (*self, noise_vars) {
            (Gram::Single { norm }, [s]) => (c * norm / s).ln_1p() / std::f64::consts::LN_2,
            (Gram::Pair { norm1, norm2, det }, [s1, s2]) => {
                let trace = norm1 / s1 + norm2 / s2;
                let x = c * trace + c * c * det / (s1 * s2);
                x.ln_1p() / std::f64::consts::LN_2
            }
            _ => panic!("noise variance count does not match the row count"),
        }
    }
}

/// `log₂ det(I_r + (P/2) Σ^{-1/2} H H† Σ^{-1/2})` in bits, `Σ = diag(noise_vars)`.
pub fn logdet_capacity_term(h: &CMat, power: f64, noise_vars: &[f64]) -> Result<f64> {
    contract!(
        h.nrows() == noise_vars.len(),
        "H has {} rows but {} noise variances were given",
        h.nrows(),
        noise_vars.len()
    );
    contract!(
        power >= 0.0 && power.is_finite(),
        "power must be finite and nonnegative, got {power}"
    );
    contract!(
        noise_vars.iter().all(|&s| s > 0.0 && s.is_finite()),
        "noise variances must be positive, got {noise_vars:?}"
    );
    Ok(h.gram().logdet(power, noise_vars))
}

/// Reproducible random source identified by a master seed and a stream index.
///
/// Backed by ChaCha12 with the stream index mapped onto the cipher's stream
/// counter, so distinct streams of one seed never overlap.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha12Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SeededRng {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Standard real normal via Box–Muller (one of the pair is discarded).
    pub fn normal(&mut self) -> f64 {
        let z = self.cn01();
        z.re * std::f64::consts::SQRT_2
    }

    pub fn cn01(&mut self) -> Complex {
        sample_cn01(self)
    }

    pub fn cvec2(&mut self) -> CVec2 {
        CVec2([self.cn01(), self.cn01()])
    }
}

/// Circularly symmetric `CN(0, 1)`: each part has variance 1/2.
///
/// Box–Muller on `(0, 1]` so the logarithm never sees zero.
pub fn sample_cn01(rng: &mut SeededRng) -> Complex {
    let u1 = 1.0 - rng.uniform();
    let u2 = rng.uniform();
    let r = (-u1.ln()).sqrt();
    let (s, c) = (TAU * u2).sin_cos();
    Complex::new(r * c, r * s)
}
