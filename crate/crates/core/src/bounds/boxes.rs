//! Maximal support-contained boxes of a small pattern.
//!
//! A box of an order-d pattern splits as (prefix box, last-mode set). For a
//! maximal box the last-mode set `B` is a closed intent of the relation
//! between (d−1)-prefixes and last indices, and the prefix box is a maximal
//! box of the extent of `B`. So we enumerate the concepts of that relation
//! with Close-by-One and recurse on extents.

use std::collections::BTreeMap;

/// Per-mode sorted index sets.
pub type IndexSets = Vec<Vec<usize>>;

/// All maximal boxes of the cell set (every cell has length `order`).
/// Output order is deterministic: sorted by per-mode index lists.
pub(crate) fn maximal_boxes(cells: &[Vec<usize>]) -> Vec<IndexSets> {
    if cells.is_empty() {
        return Vec::new();
    }
    let mut out = recurse(cells);
    out.sort();
    out
}

fn recurse(cells: &[Vec<usize>]) -> Vec<IndexSets> {
    let order = cells[0].len();
    if order == 1 {
        let mut set: Vec<usize> = cells.iter().map(|c| c[0]).collect();
        set.sort_unstable();
        set.dedup();
        return vec![vec![set]];
    }
    // relation: distinct prefixes (objects) × distinct last indices (attributes)
    let mut prefixes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for c in cells {
        prefixes
            .entry(c[..order - 1].to_vec())
            .or_default()
            .push(c[order - 1]);
    }
    let mut lasts: Vec<usize> = cells.iter().map(|c| c[order - 1]).collect();
    lasts.sort_unstable();
    lasts.dedup();
    let objects: Vec<Vec<usize>> = prefixes.keys().cloned().collect();
    let rows: Vec<Vec<bool>> = prefixes
        .values()
        .map(|ls| lasts.iter().map(|l| ls.contains(l)).collect())
        .collect();

    let mut boxes = Vec::new();
    let all_objects: Vec<bool> = vec![true; objects.len()];
    let top = intent(&rows, &all_objects, lasts.len());
    close_by_one(&rows, all_objects, top, 0, &mut |extent, intent_set| {
        if !extent.iter().any(|&b| b) || !intent_set.iter().any(|&b| b) {
            return;
        }
        let sub: Vec<Vec<usize>> = objects
            .iter()
            .zip(extent)
            .filter(|(_, &keep)| keep)
            .map(|(o, _)| o.clone())
            .collect();
        let b: Vec<usize> = lasts
            .iter()
            .zip(intent_set)
            .filter(|(_, &keep)| keep)
            .map(|(&l, _)| l)
            .collect();
        for prefix_box in recurse(&sub) {
            // keep only boxes whose common last set is exactly B
            let mut common: Option<Vec<bool>> = None;
            for_each_product(&prefix_box, &mut |tuple| {
                let row = &prefixes[tuple];
                let mask: Vec<bool> = lasts.iter().map(|l| row.contains(l)).collect();
                common = Some(match common.take() {
                    None => mask,
                    Some(c) => c.iter().zip(&mask).map(|(a, b)| *a && *b).collect(),
                });
            });
            if common.as_deref() == Some(intent_set) {
                let mut full = prefix_box;
                full.push(b.clone());
                boxes.push(full);
            }
        }
    });
    boxes
}

fn intent(rows: &[Vec<bool>], extent: &[bool], m: usize) -> Vec<bool> {
    let mut out = vec![true; m];
    for (row, _) in rows.iter().zip(extent).filter(|(_, &e)| e) {
        for (o, &r) in out.iter_mut().zip(row) {
            *o &= r;
        }
    }
    out
}

fn close_by_one(
    rows: &[Vec<bool>],
    extent: Vec<bool>,
    intent_set: Vec<bool>,
    start: usize,
    visit: &mut dyn FnMut(&[bool], &[bool]),
) {
    visit(&extent, &intent_set);
    let m = intent_set.len();
    for j in start..m {
        if intent_set[j] {
            continue;
        }
        let next_extent: Vec<bool> = extent
            .iter()
            .zip(rows)
            .map(|(&e, row)| e && row[j])
            .collect();
        let next_intent = intent(rows, &next_extent, m);
        // canonicity: no new attribute below j
        if (0..j).all(|a| next_intent[a] == intent_set[a]) {
            close_by_one(rows, next_extent, next_intent, j + 1, visit);
        }
    }
}

/// Calls `f` on every tuple of the Cartesian product of `sets`.
pub(crate) fn for_each_product(sets: &[Vec<usize>], f: &mut dyn FnMut(&[usize])) {
    if sets.iter().any(|s| s.is_empty()) {
        return;
    }
    let mut pos = vec![0usize; sets.len()];
    let mut tuple: Vec<usize> = sets.iter().map(|s| s[0]).collect();
    loop {
        f(&tuple);
        let mut k = sets.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            pos[k] += 1;
            if pos[k] < sets[k].len() {
                tuple[k] = sets[k][pos[k]];
                break;
            }
            pos[k] = 0;
            tuple[k] = sets[k][0];
        }
    }
}
