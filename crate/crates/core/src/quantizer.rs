//! Subtractive-dither scalar lattice quantizer.
//!
//! Each real dimension uses the lattice `step·ℤ` and a fresh dither
//! `u ~ U[−step/2, step/2)`. The reconstruction is `step·round((x+u)/step) − u`,
//! whose error is uniform on the cell and independent of `x`. Encoder and
//! decoder built from the same `(step, seed)` draw identical dither sequences,
//! so the decoder rebuilds the encoder's reconstruction from the indices
//! alone, provided both sides agree on the stream position.

use std::io::{Read, Write};

use crate::error::{contract, Error, Result};
use crate::math::{Complex, SeededRng};

const DITHER_STREAM: u64 = 0x5155_414e;

/// Lattice step giving total squared error `distortion` per complex sample
/// (`distortion / 2 = step² / 12` in each real dimension).
pub fn step_for_distortion(distortion: f64) -> f64 {
    (6.0 * distortion).sqrt()
}

/// One scalar dithered quantization: `(index, reconstruction)`.
pub fn lattice_point(x: f64, dither: f64, step: f64) -> (i64, f64) {
    let index = ((x + dither) / step).round();
    (index as i64, step * index - dither)
}

/// Lattice indices produced by one `quantize` call, tagged with the dither
/// stream position of their first sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedBlock {
    pub start: u64,
    pub indices: Vec<[i64; 2]>,
}

#[derive(Debug, Clone)]
pub struct DitheredQuantizer {
    step: f64,
    seed: u64,
    rng: SeededRng,
    position: u64,
}

impl DitheredQuantizer {
    pub fn new(step: f64, dither_seed: u64) -> Result<Self> {
        contract!(step > 0.0 && step.is_finite(), "lattice step must be positive, got {step}");
        Ok(DitheredQuantizer {
            step,
            seed: dither_seed,
            rng: SeededRng::new(dither_seed, DITHER_STREAM),
            position: 0,
        })
    }

    pub fn for_distortion(distortion: f64, dither_seed: u64) -> Result<Self> {
        contract!(
            distortion > 0.0 && distortion.is_finite(),
            "distortion must be positive, got {distortion}"
        );
        DitheredQuantizer::new(step_for_distortion(distortion), dither_seed)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of complex samples consumed from the dither stream so far.
    pub fn position(&self) -> u64 {
        self.position
    }

    fn next_dither(&mut self) -> (f64, f64) {
        self.position += 1;
        let re = (self.rng.uniform() - 0.5) * self.step;
        let im = (self.rng.uniform() - 0.5) * self.step;
        (re, im)
    }

    pub fn quantize(&mut self, x: &[Complex]) -> Result<(QuantizedBlock, Vec<Complex>)> {
        contract!(
            x.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            "quantizer input contains non-finite samples"
        );
        let start = self.position;
        let mut indices = Vec::with_capacity(x.len());
        let mut recon = Vec::with_capacity(x.len());
        for z in x {
            let (ur, ui) = self.next_dither();
            let (kr, vr) = lattice_point(z.re, ur, self.step);
            let (ki, vi) = lattice_point(z.im, ui, self.step);
            indices.push([kr, ki]);
            recon.push(Complex::new(vr, vi));
        }
        Ok((QuantizedBlock { start, indices }, recon))
    }

    /// Decoder side: `step·index − u` with the locally regenerated dither.
    pub fn dequantize(&mut self, block: &QuantizedBlock) -> Result<Vec<Complex>> {
        contract!(
            block.start == self.position,
            "dither stream out of step: block starts at sample {} but decoder is at {}",
            block.start,
            self.position
        );
        Ok(block
            .indices
            .iter()
            .map(|&[kr, ki]| {
                let (ur, ui) = self.next_dither();
                Complex::new(self.step * kr as f64 - ur, self.step * ki as f64 - ui)
            })
            .collect())
    }
}

/// Magic bytes opening a serialized index stream.
pub const INDEX_MAGIC: [u8; 4] = *b"DQIX";

/// Writes a 16-byte header (magic, step as `f64`, pair count as `u32`, all
/// little-endian) followed by the index pairs as little-endian `i32`.
pub fn write_indices<W: Write>(mut w: W, step: f64, indices: &[[i64; 2]]) -> Result<()> {
    let count = u32::try_from(indices.len())
        .map_err(|_| Error::Contract("too many index pairs for a u32 count".into()))?;
    w.write_all(&INDEX_MAGIC)?;
    w.write_all(&step.to_le_bytes())?;
    w.write_all(&count.to_le_bytes())?;
    for pair in indices {
        for &k in pair {
            let k = i32::try_from(k)
                .map_err(|_| Error::Contract(format!("lattice index {k} does not fit in i32")))?;
            w.write_all(&k.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_indices<R: Read>(mut r: R) -> Result<(f64, Vec<[i64; 2]>)> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    contract!(header[..4] == INDEX_MAGIC, "not a lattice index stream");
    let step = f64::from_le_bytes(header[4..12].try_into().expect("8 bytes"));
    let count = u32::from_le_bytes(header[12..16].try_into().expect("4 bytes")) as usize;
    let mut out = Vec::with_capacity(count);
    let mut word = [0u8; 4];
    for _ in 0..count {
        let mut pair = [0i64; 2];
        for k in &mut pair {
            r.read_exact(&mut word)?;
            *k = i32::from_le_bytes(word) as i64;
        }
        out.push(pair);
    }
    Ok((step, out))
}
