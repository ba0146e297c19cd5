//! Communication bounds for the divisibility function and an exact solver
//! for two-party deterministic complexity of small matrices.
//!
//! Protocol convention: at each node one party splits its remaining inputs
//! into two nonempty parts and announces which part holds its input (one
//! bit). Leaves must be monochromatic. `D` is the minimum worst-case depth.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::bounds::div_tensor_mr_exact;
use crate::constructions::DivTensorSpec;
use crate::error::{Error, Result};
use crate::ratlinalg::{int, RatMatrix, Rational};
use crate::tensor::{advance, MAX_DENSE_ENTRIES};

pub const MAX_DCC_SIDE: usize = 16;

/// Exact deterministic communication complexity of `m` (any entry values;
/// leaves must be constant).
pub fn dcc_exact_2party(m: &RatMatrix) -> Result<usize> {
    let (r, c) = m.shape();
    if r > MAX_DCC_SIDE || c > MAX_DCC_SIDE {
        return Err(Error::capacity(format!(
            "exact protocol search is limited to {MAX_DCC_SIDE}×{MAX_DCC_SIDE}, got {r}×{c}"
        )));
    }
    // relabel values as small integers
    let mut labels: HashMap<&Rational, u8> = HashMap::new();
    let cells: Vec<u8> = m
        .entries()
        .iter()
        .map(|v| {
            let next = labels.len() as u8;
            *labels.entry(v).or_insert(next)
        })
        .collect();
    let mut solver = Dcc {
        cells,
        cols: c,
        labels: labels.len() as u32,
        memo: HashMap::new(),
    };
    let rows = (1u32 << r) - 1;
    let cols = (1u32 << c) - 1;
    Ok(solver.solve(rows, cols) as usize)
}

struct Dcc {
    cells: Vec<u8>,
    cols: usize,
    labels: u32,
    memo: HashMap<(u32, u32), u32>,
}

/// `⌈log₂ k⌉` for `k ≥ 1`.
fn ceil_log2(k: u32) -> u32 {
    32 - (k - 1).leading_zeros()
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |&i| mask >> i & 1 == 1)
}

impl Dcc {
    fn at(&self, i: usize, j: usize) -> u8 {
        self.cells[i * self.cols + j]
    }

    fn monochromatic(&self, rows: u32, cols: u32) -> bool {
        let i0 = rows.trailing_zeros() as usize;
        let j0 = cols.trailing_zeros() as usize;
        let v = self.at(i0, j0);
        bits(rows).all(|i| bits(cols).all(|j| self.at(i, j) == v))
    }

    /// Drops rows (resp. columns) identical to an earlier one on the rectangle.
    fn canonical(&self, rows: u32, cols: u32) -> (u32, u32) {
        let mut keep_r = 0u32;
        let mut seen = HashSet::new();
        for i in bits(rows) {
            let sig: Vec<u8> = bits(cols).map(|j| self.at(i, j)).collect();
            if seen.insert(sig) {
                keep_r |= 1 << i;
            }
        }
        let mut keep_c = 0u32;
        let mut seen = HashSet::new();
        for j in bits(cols) {
            let sig: Vec<u8> = bits(keep_r).map(|i| self.at(i, j)).collect();
            if seen.insert(sig) {
                keep_c |= 1 << j;
            }
        }
        (keep_r, keep_c)
    }

    fn solve(&mut self, rows: u32, cols: u32) -> u32 {
        if self.monochromatic(rows, cols) {
            return 0;
        }
        let (rows, cols) = self.canonical(rows, cols);
        if let Some(&v) = self.memo.get(&(rows, cols)) {
            return v;
        }
        // one side announces its class outright, the other answers
        let mut best =
            ceil_log2(rows.count_ones()).min(ceil_log2(cols.count_ones())) + ceil_log2(self.labels);
        for (side, mask) in [(0, rows), (1, cols)] {
            if mask.count_ones() < 2 {
                continue;
            }
            let low = mask & mask.wrapping_neg();
            let rest = mask & !low;
            // parts containing the lowest element, excluding the whole set
            let mut sub = rest;
            loop {
                let part = sub | low;
                if part != mask {
                    let other = mask & !part;
                    let (a, b) = if side == 0 {
                        ((part, cols), (other, cols))
                    } else {
                        ((rows, part), (rows, other))
                    };
                    let da = self.solve(a.0, a.1);
                    if da + 1 < best {
                        let db = self.solve(b.0, b.1);
                        best = best.min(1 + da.max(db));
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        self.memo.insert((rows, cols), best);
        best
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommCrossCheck {
    /// `mr` of the communication tensor from the singleton-box argument.
    #[serde(rename = "mrExact")]
    pub mr_exact: usize,
    /// Exact rank of the mode-0 unfolding (a lower bound on tensor rank).
    #[serde(rename = "flatteningRank")]
    pub flattening_rank: usize,
    /// `log₂ mrExact == logMrExact` and `flatteningRank ≤ d·N`.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommBoundReport {
    pub nbits: u32,
    pub d: u64,
    #[serde(rename = "logMrExact")]
    pub log_mr_exact: f64,
    #[serde(rename = "logRkUpper")]
    pub log_rk_upper: f64,
    #[serde(rename = "trivialProtocolCost")]
    pub trivial_protocol_cost: u64,
    #[serde(rename = "separationRatio")]
    pub separation_ratio: f64,
    #[serde(rename = "crossCheck", skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CommCrossCheck>,
}

pub fn comm_report(nbits: u32, d: u64) -> Result<CommBoundReport> {
    if nbits == 0 || nbits > 32 {
        return Err(Error::validation(format!(
            "nbits must be in 1..=32, got {nbits}"
        )));
    }
    if d < 2 {
        return Err(Error::validation(format!(
            "need at least 2 players, got {d}"
        )));
    }
    let log_mr_exact = (d - 1) as f64 * nbits as f64;
    let log_rk_upper = (d as f64).log2() + nbits as f64;
    let cross_check = small_volume(nbits, d)
        .then(|| cross_check(nbits, d as usize))
        .transpose()?;
    Ok(CommBoundReport {
        nbits,
        d,
        log_mr_exact,
        log_rk_upper,
        trivial_protocol_cost: (d - 1) * nbits as u64 + 1,
        separation_ratio: log_mr_exact / log_rk_upper,
        cross_check,
    })
}

fn small_volume(nbits: u32, d: u64) -> bool {
    (nbits as u64)
        .checked_mul(d)
        .is_some_and(|b| b <= MAX_DENSE_ENTRIES.trailing_zeros() as u64)
}

fn cross_check(nbits: u32, d: usize) -> Result<CommCrossCheck> {
    let spec = DivTensorSpec::from_bits(nbits, d)?;
    let n = spec.base();
    let mr_exact = div_tensor_mr_exact(&spec)?;
    // mode-0 unfolding with duplicate columns removed (rank unchanged)
    let rest = vec![n; d - 1];
    let mut idx_rest = vec![0usize; d - 1];
    let mut columns: HashSet<Vec<bool>> = HashSet::new();
    let mut cell = vec![0usize; d];
    for _ in 0..n.pow(d as u32 - 1) {
        cell[1..].copy_from_slice(&idx_rest);
        let col: Vec<bool> = (0..n)
            .map(|i| {
                cell[0] = i;
                spec.is_one(&cell)
            })
            .collect();
        columns.insert(col);
        advance(&mut idx_rest, &rest);
    }
    let mut cols: Vec<Vec<bool>> = columns.into_iter().collect();
    cols.sort();
    let m = RatMatrix::from_fn(n, cols.len(), |i, j| int(cols[j][i] as i64));
    let flattening_rank = m.rank();
    let consistent =
        (mr_exact as f64).log2() == (d - 1) as f64 * nbits as f64 && flattening_rank <= d * n;
    Ok(CommCrossCheck {
        mr_exact,
        flattening_rank,
        consistent,
    })
}

/// Reports for each `d`, in order.
pub fn comm_table(nbits: u32, ds: &[u64]) -> Result<Vec<CommBoundReport>> {
    ds.iter().map(|&d| comm_report(nbits, d)).collect()
}

/// Default table: 2..=16, then powers of two and of ten up to `10^6`.
pub fn default_d_values() -> Vec<u64> {
    let mut ds: Vec<u64> = (2..=16).collect();
    ds.extend((5..=19).map(|p| 1u64 << p));
    ds.extend([100, 1_000, 10_000, 100_000, 1_000_000]);
    ds.sort_unstable();
    ds.dedup();
    ds
}

/// Smallest tabulated `d` with `logMrExact > logRkUpper^c`.
pub fn power_threshold_crossing(table: &[CommBoundReport], c: f64) -> Option<u64> {
    table
        .iter()
        .find(|r| r.log_mr_exact > r.log_rk_upper.powf(c))
        .map(|r| r.d)
}
