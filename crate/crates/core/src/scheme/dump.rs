//! Optional binary dump of a transcript.
//!
//! Layout: magic `b"MBCT"`, `n` as `u32`, the phase-3 lattice index stream
//! in the quantizer's format, then the complex grids `s₂₁`, `s₁₂`,
//! delivered sum, and both residual grids as little-endian `f64` pairs
//! (`re`, `im`), each `n²` entries in row order.

use std::io::Write;

use crate::error::{contract, Error, Result};
use crate::math::Complex;
use crate::quantizer::write_indices;
use crate::scheme::SchemeTranscript;

pub const DUMP_MAGIC: [u8; 4] = *b"MBCT";
/// Dumps above this size are refused.
pub const MAX_DUMP_BYTES: u64 = 16 << 20;

fn dump_size(n: u64) -> u64 {
    8 + 16 + 8 * n * n + 5 * 16 * n * n
}

pub fn write_dump<W: Write>(mut w: W, tr: &SchemeTranscript) -> Result<u64> {
    let p3 = tr
        .phase3
        .as_ref()
        .ok_or_else(|| Error::Contract("phase 3 has not run".into()))?;
    let rec = tr
        .reconstruction
        .as_ref()
        .ok_or_else(|| Error::Contract("reconstruction has not run".into()))?;
    let n = tr.config.n as u64;
    let size = dump_size(n);
    contract!(size <= MAX_DUMP_BYTES, "transcript dump of {size} bytes exceeds the {MAX_DUMP_BYTES}-byte cap");

    w.write_all(&DUMP_MAGIC)?;
    w.write_all(&(n as u32).to_le_bytes())?;
    let indices: Vec<[i64; 2]> = p3.indices.iter().flat_map(|b| b.indices.iter().copied()).collect();
    write_indices(&mut w, p3.step, &indices)?;
    let grids: [&[Complex]; 5] = [
        tr.s21.as_slice(),
        tr.s12.as_slice(),
        p3.delivered.as_slice(),
        rec.rx1_residual.as_slice(),
        rec.rx2_residual.as_slice(),
    ];
    for grid in grids {
        for z in grid {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantizer::read_indices;
    use crate::scheme::{run_scheme, SchemeConfig};

    #[test]
    fn dump_layout() {
        let cfg = SchemeConfig {
            reference_samples: 5_000,
            ..SchemeConfig::new(4, 10.0)
        };
        let tr = run_scheme(&cfg).unwrap();
        let mut buf = Vec::new();
        let size = write_dump(&mut buf, &tr).unwrap();
        assert_eq!(buf.len() as u64, size);
        assert_eq!(&buf[..4], b"MBCT");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 4);
        let (step, idx) = read_indices(&buf[8..]).unwrap();
        assert_eq!(idx.len(), 16);
        assert!((step - 24f64.sqrt()).abs() < 1e-15);
        let first = 8 + 16 + 8 * 16;
        let re = f64::from_le_bytes(buf[first..first + 8].try_into().unwrap());
        assert_eq!(re, tr.s21.as_slice()[0].re);
    }

    #[test]
    fn oversized_dump_refused() {
        assert!(dump_size(512) > MAX_DUMP_BYTES);
        assert!(dump_size(256) <= MAX_DUMP_BYTES);
    }
}
