//! Minimum box covers of patterns with at most 64 cells.
//!
//! Iterative deepening over the cover size. At each node we branch on the
//! uncovered cell contained in the fewest maximal boxes, prune with a greedy
//! fooling set (uncovered cells no two of which share a box) and remember
//! failed `(covered, depth)` states.

use std::collections::HashSet;

use serde::Serialize;

use super::boxes::{for_each_product, maximal_boxes, IndexSets};
use super::SupportPattern;
use crate::error::{Error, Result};

pub const MAX_EXACT_CELLS: usize = 64;
pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000;

/// Cartesian product of per-mode index sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct IndexBox {
    pub sets: IndexSets,
}

impl IndexBox {
    pub fn volume(&self) -> usize {
        self.sets.iter().map(Vec::len).product()
    }

    pub fn contains(&self, cell: &[usize]) -> bool {
        self.sets
            .iter()
            .zip(cell)
            .all(|(s, c)| s.binary_search(c).is_ok())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct BoxCover {
    pub boxes: Vec<IndexBox>,
}

impl BoxCover {
    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Every box lies inside the support and together they cover it.
    pub fn is_valid_for(&self, pattern: &SupportPattern) -> bool {
        let mut inside = true;
        for b in &self.boxes {
            for_each_product(&b.sets, &mut |t| inside &= pattern.contains(t));
        }
        inside
            && pattern
                .cells()
                .iter()
                .all(|c| self.boxes.iter().any(|b| b.contains(c)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverOutcome {
    /// Minimum cover found.
    Exact(BoxCover),
    /// No cover with at most `limit` boxes exists.
    ExceedsLimit { limit: usize },
    /// Node budget ran out; `lower` is still certified and `upper` is a
    /// (possibly non-minimal) cover.
    Budget { lower: usize, upper: BoxCover },
}

impl CoverOutcome {
    /// Certified lower bound on the cover number.
    pub fn lower(&self) -> usize {
        match self {
            CoverOutcome::Exact(c) => c.len(),
            CoverOutcome::ExceedsLimit { limit } => limit + 1,
            CoverOutcome::Budget { lower, .. } => *lower,
        }
    }

    pub fn cover(&self) -> Option<&BoxCover> {
        match self {
            CoverOutcome::Exact(c) => Some(c),
            CoverOutcome::Budget { upper, .. } => Some(upper),
            CoverOutcome::ExceedsLimit { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CoverOutcome::Exact(_))
    }
}

/// Minimum cover with at most `limit` boxes, default node budget.
pub fn box_cover_exact(p: &SupportPattern, limit: usize) -> Result<CoverOutcome> {
    box_cover_with_budget(p, limit, DEFAULT_NODE_BUDGET)
}

pub fn box_cover_with_budget(
    p: &SupportPattern,
    limit: usize,
    budget: u64,
) -> Result<CoverOutcome> {
    let cells = p.cells();
    if cells.len() > MAX_EXACT_CELLS {
        return Err(Error::capacity(format!(
            "exact box cover supports at most {MAX_EXACT_CELLS} cells, pattern has {}",
            cells.len()
        )));
    }
    if cells.is_empty() {
        return Ok(CoverOutcome::Exact(BoxCover::default()));
    }
    let boxes: Vec<IndexBox> = maximal_boxes(cells)
        .into_iter()
        .map(|sets| IndexBox { sets })
        .collect();
    let masks: Vec<u64> = boxes
        .iter()
        .map(|b| {
            cells
                .iter()
                .enumerate()
                .filter(|(_, c)| b.contains(c))
                .fold(0u64, |m, (k, _)| m | 1 << k)
        })
        .collect();
    let full = if cells.len() == 64 {
        u64::MAX
    } else {
        (1u64 << cells.len()) - 1
    };
    let mut search = Search::new(&masks, full, budget);
    let start = search.fooling_bound(0).max(1);
    for depth in start..=limit {
        let mut chosen = Vec::new();
        match search.dfs(0, depth, &mut chosen) {
            Some(true) => {
                let mut picked: Vec<IndexBox> = chosen.iter().map(|&k| boxes[k].clone()).collect();
                picked.sort();
                return Ok(CoverOutcome::Exact(BoxCover { boxes: picked }));
            }
            Some(false) => {}
            None => {
                let upper = greedy_from_masks(&masks, full)
                    .into_iter()
                    .map(|k| boxes[k].clone())
                    .collect();
                return Ok(CoverOutcome::Budget {
                    lower: depth,
                    upper: BoxCover { boxes: upper },
                });
            }
        }
    }
    Ok(CoverOutcome::ExceedsLimit { limit })
}

struct Search<'a> {
    masks: &'a [u64],
    full: u64,
    /// boxes containing each cell
    by_cell: Vec<Vec<usize>>,
    failed: HashSet<(u64, usize)>,
    nodes: u64,
    budget: u64,
}

impl<'a> Search<'a> {
    fn new(masks: &'a [u64], full: u64, budget: u64) -> Self {
        let cells = full.count_ones() as usize;
        let mut by_cell = vec![Vec::new(); cells];
        for (k, &m) in masks.iter().enumerate() {
            for (c, list) in by_cell.iter_mut().enumerate() {
                if m >> c & 1 == 1 {
                    list.push(k);
                }
            }
        }
        Search {
            masks,
            full,
            by_cell,
            failed: HashSet::new(),
            nodes: 0,
            budget,
        }
    }

    /// Size of a greedy set of uncovered cells pairwise sharing no box.
    fn fooling_bound(&self, covered: u64) -> usize {
        let mut open = self.full & !covered;
        let mut count = 0;
        while open != 0 {
            let c = self.pick_cell(open);
            count += 1;
            for &k in &self.by_cell[c] {
                open &= !self.masks[k];
            }
            open &= !(1u64 << c);
        }
        count
    }

    /// Cell of `open` in the fewest boxes; ties to the lowest index.
    fn pick_cell(&self, open: u64) -> usize {
        let mut best = usize::MAX;
        let mut best_count = usize::MAX;
        let mut rest = open;
        while rest != 0 {
            let c = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let n = self.by_cell[c].len();
            if n < best_count {
                best = c;
                best_count = n;
            }
        }
        best
    }

    /// `Some(found)` or `None` when the budget is exhausted.
    fn dfs(&mut self, covered: u64, left: usize, chosen: &mut Vec<usize>) -> Option<bool> {
        if covered == self.full {
            return Some(true);
        }
        if left == 0 || self.failed.contains(&(covered, left)) {
            return Some(false);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if self.fooling_bound(covered) > left {
            self.failed.insert((covered, left));
            return Some(false);
        }
        let c = self.pick_cell(self.full & !covered);
        let mut options: Vec<usize> = self.by_cell[c].clone();
        // most new cells first, then lowest box index
        options.sort_by_key(|&k| {
            (
                std::cmp::Reverse((self.masks[k] & !covered).count_ones()),
                k,
            )
        });
        for k in options {
            chosen.push(k);
            match self.dfs(covered | self.masks[k], left - 1, chosen)? {
                true => return Some(true),
                false => {
                    chosen.pop();
                }
            }
        }
        self.failed.insert((covered, left));
        Some(false)
    }
}

fn greedy_from_masks(masks: &[u64], full: u64) -> Vec<usize> {
    let mut covered = 0u64;
    let mut picked = Vec::new();
    while covered != full {
        let (k, _) = masks
            .iter()
            .enumerate()
            .map(|(k, &m)| (k, (m & !covered).count_ones()))
            .max_by_key(|&(k, gain)| (gain, std::cmp::Reverse(k)))
            .expect("maximal boxes cover the support");
        covered |= masks[k];
        picked.push(k);
    }
    picked
}

/// Greedy cover of an arbitrary-size pattern. Each step grows a box from the
/// first uncovered cell, adding per-mode indices while the box stays inside
/// the support. An upper bound on the cover number only.
pub fn greedy_cover(p: &SupportPattern) -> BoxCover {
    let cells = p.cells();
    let mut covered = vec![false; cells.len()];
    let mut boxes = Vec::new();
    while let Some(seed) = covered.iter().position(|&c| !c) {
        let mut sets: IndexSets = cells[seed].iter().map(|&i| vec![i]).collect();
        loop {
            let mut grew = false;
            for mode in 0..sets.len() {
                for v in 0..p.dims()[mode] {
                    if sets[mode].binary_search(&v).is_ok() {
                        continue;
                    }
                    let mut trial = sets.clone();
                    let pos = trial[mode].binary_search(&v).unwrap_err();
                    trial[mode].insert(pos, v);
                    let mut inside = true;
                    for_each_product(&trial, &mut |t| inside &= p.contains(t));
                    if inside {
                        sets = trial;
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let b = IndexBox { sets };
        for (k, c) in cells.iter().enumerate() {
            if b.contains(c) {
                covered[k] = true;
            }
        }
        boxes.push(b);
    }
    BoxCover { boxes }
}
