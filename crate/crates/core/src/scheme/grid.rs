use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

/// Row-major 2-D array; `[b][t]` is block (or message) `b`, time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Grid { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        contract!(data.len() == rows * cols, "grid data has {} entries, expected {rows}×{cols}", data.len());
        Ok(Grid { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn zip_map<U: Clone, V: Clone>(&self, other: &Grid<U>, mut f: impl FnMut(&T, &U) -> V) -> Grid<V> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "grid shapes differ");
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn transpose(&self) -> Grid<T> {
        Grid::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }
}

/// Transmit-order grid from codeword-order grid: `x[b][t] = u[t][b]`.
///
/// Time `t` of block `b` carries symbol `b` of message `t`, so the symbols sent
/// within one block all come from different messages.
pub fn interleave<T: Clone>(u: &Grid<T>) -> Result<Grid<T>> {
    contract!(
        u.rows() == u.cols(),
        "interleaver needs a square grid, got {}×{}",
        u.rows(),
        u.cols()
    );
    Ok(u.transpose())
}

/// Inverse of [`interleave`] (the mapping is an involution).
pub fn deinterleave<T: Clone>(x: &Grid<T>) -> Result<Grid<T>> {
    interleave(x)
}
