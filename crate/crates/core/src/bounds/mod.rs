//! Certified bounds on monotone rank.
//!
//! Every nonnegative rank-one term is supported on a box inside the support
//! of the target, and the terms cannot cancel, so the box-cover number of the
//! support is a lower bound. The exact rank (max over mode unfoldings for
//! tensors) is another.

mod boxes;
mod cover;

pub use boxes::IndexSets;
pub use cover::{
    box_cover_exact, box_cover_with_budget, greedy_cover, BoxCover, CoverOutcome, IndexBox,
    DEFAULT_NODE_BUDGET, MAX_EXACT_CELLS,
};

use std::collections::HashSet;

use log::debug;
use nalgebra::DMatrix;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::constructions::DivTensorSpec;
use crate::error::{Error, Result};
use crate::numkit::{nmf_search, NmfOptions, NonnegFactorization};
use crate::ratlinalg::{RatMatrix, Rational};
use crate::tensor::{advance, DenseTensor};

/// Nonzero cells of a matrix or tensor, in row-major order.
#[derive(Clone, Debug)]
pub struct SupportPattern {
    dims: Vec<usize>,
    cells: Vec<Vec<usize>>,
    set: HashSet<Vec<usize>>,
}

impl PartialEq for SupportPattern {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.cells == other.cells
    }
}

impl SupportPattern {
    pub fn new(dims: Vec<usize>, mut cells: Vec<Vec<usize>>) -> Result<Self> {
        for c in &cells {
            if c.len() != dims.len() {
                return Err(Error::dimension(format!(
                    "cell {c:?} does not match dims {dims:?}"
                )));
            }
            if let Some((&i, &d)) = c.iter().zip(&dims).find(|(&i, &d)| i >= d) {
                return Err(Error::Index { index: i, len: d });
            }
        }
        cells.sort();
        cells.dedup();
        let set = cells.iter().cloned().collect();
        Ok(SupportPattern { dims, cells, set })
    }

    pub fn all_ones(dims: Vec<usize>) -> Self {
        let mut cells = Vec::new();
        let total: usize = dims.iter().product();
        let mut idx = vec![0; dims.len()];
        for _ in 0..total {
            cells.push(idx.clone());
            advance(&mut idx, &dims);
        }
        SupportPattern::new(dims, cells).expect("cells within dims")
    }

    pub fn diagonal(n: usize) -> Self {
        SupportPattern::new(vec![n, n], (0..n).map(|i| vec![i, i]).collect())
            .expect("cells within dims")
    }

    pub fn of_matrix(m: &RatMatrix) -> Self {
        let cells = (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
            .filter(|&(i, j)| !m.get(i, j).is_zero())
            .map(|(i, j)| vec![i, j])
            .collect();
        SupportPattern::new(vec![m.rows(), m.cols()], cells).expect("cells within dims")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: &[usize]) -> bool {
        self.set.contains(cell)
    }

    /// The pattern restricted to the given per-mode index lists, re-indexed
    /// by position in those lists.
    pub fn restrict(&self, keep: &[Vec<usize>]) -> Result<SupportPattern> {
        if keep.len() != self.dims.len() {
            return Err(Error::dimension("one index list per mode is required"));
        }
        let pos: Vec<Vec<Option<usize>>> = keep
            .iter()
            .zip(&self.dims)
            .map(|(list, &d)| {
                let mut p = vec![None; d];
                for (k, &i) in list.iter().enumerate() {
                    if i < d {
                        p[i] = Some(k);
                    }
                }
                p
            })
            .collect();
        let cells = self
            .cells
            .iter()
            .filter_map(|c| c.iter().enumerate().map(|(m, &i)| pos[m][i]).collect())
            .collect();
        SupportPattern::new(keep.iter().map(Vec::len).collect(), cells)
    }
}

pub fn support_pattern<T: Zero>(t: &DenseTensor<T>) -> SupportPattern {
    let cells = t
        .indexed()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, _)| i)
        .collect();
    SupportPattern::new(t.dims().to_vec(), cells).expect("cells within dims")
}

/// Largest leading sub-pattern (per-mode index prefixes, grown round-robin)
/// with at most [`MAX_EXACT_CELLS`] cells. Covers restrict to covers, so its
/// cover number bounds the full one from below.
pub fn restricted_subpattern(p: &SupportPattern) -> SupportPattern {
    let mut sizes = vec![1usize; p.dims().len()];
    let count = |sizes: &[usize]| {
        p.cells()
            .iter()
            .filter(|c| c.iter().zip(sizes).all(|(&i, &s)| i < s))
            .count()
    };
    loop {
        let mut grew = false;
        for m in 0..sizes.len() {
            if sizes[m] < p.dims()[m] {
                sizes[m] += 1;
                if count(&sizes) <= MAX_EXACT_CELLS {
                    grew = true;
                } else {
                    sizes[m] -= 1;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let keep: Vec<Vec<usize>> = sizes.iter().map(|&s| (0..s).collect()).collect();
    p.restrict(&keep).expect("prefix lists match the modes")
}

/// Certified lower bound on the cover number, exact when the pattern is small.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverBound {
    pub lower: usize,
    /// The value is the cover number itself, not just a bound.
    pub exact: bool,
    /// The bound comes from a leading sub-pattern.
    pub restricted: bool,
    pub cover: Option<BoxCover>,
}

pub fn cover_lower_bound(p: &SupportPattern, budget: u64) -> CoverBound {
    let (target, restricted) = if p.len() > MAX_EXACT_CELLS {
        (restricted_subpattern(p), true)
    } else {
        (p.clone(), false)
    };
    let outcome = box_cover_with_budget(&target, MAX_EXACT_CELLS, budget)
        .expect("pattern within the exact-search cap");
    CoverBound {
        lower: outcome.lower(),
        exact: outcome.is_exact() && !restricted,
        restricted,
        cover: if restricted {
            None
        } else {
            outcome.cover().cloned()
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LowerWitness {
    Rank,
    Boxcover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpperStatus {
    /// Matches the certified lower bound.
    Exact,
    /// Float witness verified at tolerance.
    HeuristicCertified,
    /// Dimension or support-size bound.
    Trivial,
}

#[derive(Clone, Debug, Serialize)]
pub struct MrBoundReport {
    pub lower: usize,
    #[serde(rename = "lowerWitness")]
    pub lower_witness: LowerWitness,
    pub upper: usize,
    #[serde(rename = "upperStatus")]
    pub upper_status: UpperStatus,
    #[serde(rename = "rankLower")]
    pub rank_lower: usize,
    #[serde(rename = "coverLower")]
    pub cover_lower: usize,
    #[serde(rename = "coverExact")]
    pub cover_exact: bool,
    #[serde(rename = "coverRestricted")]
    pub cover_restricted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boxes: Option<BoxCover>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factorization: Option<NonnegFactorization<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsOptions {
    pub node_budget: u64,
    /// Search for float witnesses below the trivial bound (matrices only).
    pub nmf: Option<NmfOptions>,
    pub seed: u64,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        BoundsOptions {
            node_budget: DEFAULT_NODE_BUDGET,
            nmf: None,
            seed: 0,
        }
    }
}

/// Max over mode unfoldings of the exact rank.
pub fn flattening_rank(t: &DenseTensor<Rational>) -> usize {
    if t.order() == 2 {
        return t.unfold_rat(0).rank();
    }
    (0..t.order())
        .map(|m| t.unfold_rat(m).rank())
        .max()
        .unwrap_or(0)
}

pub fn mr_bounds(t: &DenseTensor<Rational>, opts: &BoundsOptions) -> Result<MrBoundReport> {
    if t.data().iter().any(Signed::is_negative) {
        return Err(Error::validation("monotone rank needs nonnegative entries"));
    }
    let pattern = support_pattern(t);
    let rank_lower = flattening_rank(t);
    let cover = cover_lower_bound(&pattern, opts.node_budget);
    let (lower, lower_witness) = if cover.lower > rank_lower {
        (cover.lower, LowerWitness::Boxcover)
    } else {
        (rank_lower, LowerWitness::Rank)
    };

    let volume = t.len();
    let trivial = t
        .dims()
        .iter()
        .map(|&d| volume / d)
        .min()
        .unwrap_or(0)
        .min(pattern.len());
    let mut upper = trivial;
    let mut upper_status = UpperStatus::Trivial;
    let mut factorization = None;

    if let (Some(nmf), 2) = (&opts.nmf, t.order()) {
        let (r, c) = (t.dims()[0], t.dims()[1]);
        let m = DMatrix::from_fn(r, c, |i, j| t.get(&[i, j]).to_f64().unwrap_or(f64::NAN));
        for rank in lower.max(1)..trivial {
            let out = nmf_search(&m, rank, nmf, opts.seed)?;
            debug!("nmf r = {rank}: relative error {:.3e}", out.relative_error);
            if out.success {
                upper = rank;
                upper_status = UpperStatus::HeuristicCertified;
                factorization = Some(out.factorization);
                break;
            }
        }
    }
    if lower == upper && upper_status == UpperStatus::Trivial {
        upper_status = UpperStatus::Exact;
    }
    Ok(MrBoundReport {
        lower,
        lower_witness,
        upper,
        upper_status,
        rank_lower,
        cover_lower: cover.lower,
        cover_exact: cover.exact,
        cover_restricted: cover.restricted,
        boxes: cover.cover,
        factorization,
    })
}

pub fn mr_bounds_matrix(m: &RatMatrix, opts: &BoundsOptions) -> Result<MrBoundReport> {
    mr_bounds(&DenseTensor::from_matrix(m), opts)
}

const MAX_DIV_SUPPORT: usize = 1 << 24;

/// No two support cells of the divisibility tensor differ in exactly one
/// coordinate, checked cell by cell. Hence every support-contained box is a
/// single cell.
pub fn singleton_box_predicate(spec: &DivTensorSpec) -> Result<bool> {
    let (n, d) = (spec.base(), spec.order());
    let support = support_size(spec)?;
    let mut prefix = vec![0usize; d - 1];
    for _ in 0..support {
        // the unique completing last index
        let s: usize = prefix.iter().map(|&i| i + 1).sum();
        let last = (n - (s + 1) % n) % n;
        let mut cell = prefix.clone();
        cell.push(last);
        debug_assert!(spec.is_one(&cell));
        for mode in 0..d {
            let orig = cell[mode];
            for v in (0..n).filter(|&v| v != orig) {
                cell[mode] = v;
                if spec.is_one(&cell) {
                    return Ok(false);
                }
            }
            cell[mode] = orig;
        }
        advance(&mut prefix, &vec![n; d - 1]);
    }
    Ok(true)
}

fn support_size(spec: &DivTensorSpec) -> Result<usize> {
    let mut total = 1usize;
    for _ in 1..spec.order() {
        total = total
            .checked_mul(spec.base())
            .filter(|&t| t <= MAX_DIV_SUPPORT)
            .ok_or_else(|| Error::capacity("divisibility support too large to check"))?;
    }
    Ok(total)
}

/// `mr = base^{order−1}`, certified by [`singleton_box_predicate`].
pub fn div_tensor_mr_exact(spec: &DivTensorSpec) -> Result<usize> {
    if !singleton_box_predicate(spec)? {
        return Err(Error::validation("singleton-box predicate failed"));
    }
    support_size(spec)
}
