//! Delayed channel-state access with an audit trail.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::CVec2;
use crate::scheme::grid::Grid;

/// Position of a channel use: ordered by block, then phase, then index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymbolTime {
    pub block: u32,
    pub phase: u8,
    pub index: u32,
}

impl SymbolTime {
    pub fn new(block: usize, phase: u8, index: usize) -> Self {
        SymbolTime {
            block: block as u32,
            phase,
            index: index as u32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Receiver {
    One,
    Two,
}

/// One transmitter-side lookup of a channel coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsiRead {
    pub symbol: SymbolTime,
    pub read_at: SymbolTime,
    pub receiver: Receiver,
}

/// Channel rows of the data phases, handed to the transmitter only once the
/// corresponding symbol interval is over.
pub struct DelayedCsi<'a> {
    /// `[phase 1, phase 2]` rows towards receiver one.
    rx1: [&'a Grid<CVec2>; 2],
    rx2: [&'a Grid<CVec2>; 2],
    log: Vec<CsiRead>,
}

impl<'a> DelayedCsi<'a> {
    pub fn new(rx1: [&'a Grid<CVec2>; 2], rx2: [&'a Grid<CVec2>; 2]) -> Self {
        DelayedCsi {
            rx1,
            rx2,
            log: Vec::new(),
        }
    }

    pub fn read(&mut self, now: SymbolTime, symbol: SymbolTime, receiver: Receiver) -> Result<CVec2> {
        if symbol >= now || !(1..=2).contains(&symbol.phase) {
            return Err(Error::Contract(format!(
                "transmitter asked at {now:?} for the channel of {symbol:?}, which is not yet in the past"
            )));
        }
        self.log.push(CsiRead {
            symbol,
            read_at: now,
            receiver,
        });
        let grids = match receiver {
            Receiver::One => &self.rx1,
            Receiver::Two => &self.rx2,
        };
        Ok(*grids[symbol.phase as usize - 1].get(symbol.block as usize, symbol.index as usize))
    }

    pub fn into_log(self) -> Vec<CsiRead> {
        self.log
    }
}

/// Checks every logged read happened strictly after its symbol interval.
pub fn audit_causality(log: &[CsiRead]) -> Result<()> {
    match log.iter().find(|r| r.read_at <= r.symbol) {
        Some(r) => Err(Error::Contract(format!(
            "causality violated: channel of {:?} read at {:?}",
            r.symbol, r.read_at
        ))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_block_phase_index() {
        assert!(SymbolTime::new(0, 2, 9) < SymbolTime::new(0, 3, 0));
        assert!(SymbolTime::new(0, 3, 5) < SymbolTime::new(1, 1, 0));
    }

    #[test]
    fn future_reads_are_refused() {
        let g = Grid::from_fn(2, 2, |_, _| CVec2::default());
        let mut csi = DelayedCsi::new([&g, &g], [&g, &g]);
        let now = SymbolTime::new(0, 1, 1);
        assert!(csi.read(now, SymbolTime::new(0, 1, 0), Receiver::One).is_ok());
        assert!(csi.read(now, SymbolTime::new(0, 1, 1), Receiver::Two).is_err());
        assert!(csi.read(now, SymbolTime::new(1, 1, 0), Receiver::Two).is_err());
        let log = csi.into_log();
        assert_eq!(log.len(), 1);
        assert!(audit_causality(&log).is_ok());
        let bad = CsiRead {
            symbol: SymbolTime::new(0, 2, 0),
            read_at: SymbolTime::new(0, 1, 0),
            receiver: Receiver::One,
        };
        assert!(audit_causality(&[bad]).is_err());
    }
}
