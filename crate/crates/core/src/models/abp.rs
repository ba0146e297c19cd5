//! ABP complexity profile of f via Nisan's characterization: `B(f)` is the
//! sum of the flattening ranks and each `mr(M_k(f))` bounds the monotone
//! level size from below.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{cover_lower_bound, SupportPattern, DEFAULT_NODE_BUDGET};
use crate::constructions::{edm_block_extract, flatten_mk, subsidiary_s, FunctionFSpec};
use crate::error::Result;
use crate::tensor::checked_volume;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelProfile {
    pub k: usize,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    /// `min(3 + 4|d/2 − k|, rows, cols)`.
    #[serde(rename = "rankBound")]
    pub rank_bound: usize,
    /// Side length of the extracted distance block.
    #[serde(rename = "blockSize")]
    pub block_size: usize,
    #[serde(rename = "blockCoverLower")]
    pub block_cover_lower: usize,
    #[serde(rename = "blockCoverExact")]
    pub block_cover_exact: bool,
    /// `max(rank, block cover bound)`.
    #[serde(rename = "mrLower")]
    pub mr_lower: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbpProfile {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "perLevel")]
    pub per_level: Vec<LevelProfile>,
    #[serde(rename = "totalB")]
    pub total_b: usize,
    #[serde(rename = "totalBPlusLower")]
    pub total_b_plus_lower: usize,
    /// `rk(M_{d/2±k}) ≤ 3 + 4k` at every level.
    #[serde(rename = "rankBoundsHold")]
    pub rank_bounds_hold: bool,
    /// `rk(M_{d/2+k}) = rk(M_{d/2−k})` at every k.
    pub mirrored: bool,
    /// `rk(M_{d/2−1}) ≤ rk(M_{d/2}) + rk(S)`; vacuous for d = 2.
    pub observation1: bool,
}

impl AbpProfile {
    pub fn ratio(&self) -> f64 {
        self.total_b_plus_lower as f64 / self.total_b as f64
    }
}

pub fn abp_profile(n: usize, d: usize) -> Result<AbpProfile> {
    abp_profile_with_budget(n, d, DEFAULT_NODE_BUDGET)
}

pub fn abp_profile_with_budget(n: usize, d: usize, budget: u64) -> Result<AbpProfile> {
    let spec = FunctionFSpec::new(n, d)?;
    checked_volume(&vec![n; d])?;
    let h = d / 2;

    // distance blocks depend only on |d/2 − k|
    let blocks: Vec<(usize, usize, bool)> = (0..=h)
        .into_par_iter()
        .map(|j| -> Result<(usize, usize, bool)> {
            let block = if j == 0 {
                flatten_mk(&spec, h)?
            } else {
                edm_block_extract(&spec, j)?
            };
            let cover = cover_lower_bound(&SupportPattern::of_matrix(&block), budget);
            Ok((block.rows(), cover.lower, cover.exact))
        })
        .collect::<Result<_>>()?;

    let per_level: Vec<LevelProfile> = (0..=d)
        .into_par_iter()
        .map(|k| -> Result<LevelProfile> {
            let m = flatten_mk(&spec, k)?;
            let rank = m.rank();
            let j = k.abs_diff(h);
            let (block_size, block_cover_lower, block_cover_exact) = blocks[j];
            Ok(LevelProfile {
                k,
                rows: m.rows(),
                cols: m.cols(),
                rank,
                rank_bound: (3 + 4 * j).min(m.rows()).min(m.cols()),
                block_size,
                block_cover_lower,
                block_cover_exact,
                mr_lower: rank.max(block_cover_lower),
            })
        })
        .collect::<Result<_>>()?;

    let rank_bounds_hold = per_level.iter().all(|l| l.rank <= l.rank_bound);
    let mirrored = (0..=h).all(|j| per_level[h + j].rank == per_level[h - j].rank);
    let observation1 = if d >= 4 {
        let s = subsidiary_s(&spec)?;
        per_level[h - 1].rank <= per_level[h].rank + s.rank()
    } else {
        true
    };
    Ok(AbpProfile {
        n,
        d,
        total_b: per_level.iter().map(|l| l.rank).sum(),
        total_b_plus_lower: per_level.iter().map(|l| l.mr_lower).sum(),
        per_level,
        rank_bounds_hold,
        mirrored,
        observation1,
    })
}
