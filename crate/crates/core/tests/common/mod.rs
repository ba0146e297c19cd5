//! Independent oracles shared by the integration tests. None of these call
//! into the library's algorithms; they are slow, obvious reimplementations.
#![allow(dead_code)]

use std::collections::HashMap;

use monorank::ratlinalg::{RatMatrix, Rational};
use num_traits::{One, Zero};

pub fn rows_of(m: &RatMatrix) -> Vec<Vec<Rational>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// Textbook Gauss–Jordan rank with division.
pub fn gauss_rank(mut a: Vec<Vec<Rational>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][c].clone();
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &pivot;
                let pivot_row = a[rank].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Laplace expansion along the first row.
pub fn laplace_det(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    if n == 0 {
        return Rational::one();
    }
    let mut total = Rational::zero();
    for j in 0..n {
        if a[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rational>> = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = &a[0][j] * laplace_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// All tuples of `[1..n]^len` in lexicographic order mapped to their 1-based
/// position.
pub fn lex_positions(n: usize, len: usize) -> HashMap<Vec<usize>, usize> {
    let mut out = HashMap::new();
    let mut tuple = vec![1usize; len];
    let total = n.pow(len as u32);
    for pos in 1..=total {
        out.insert(tuple.clone(), pos);
        for k in (0..len).rev() {
            if tuple[k] < n {
                tuple[k] += 1;
                break;
            }
            tuple[k] = 1;
        }
    }
    out
}

/// `M_k(f)` built straight from the coefficient definition: the row holds
/// the first `k` variable choices, the column the rest, and the entry is
/// `(g(first half) − g(second half))²`.
pub fn flattening_oracle(n: usize, d: usize, k: usize) -> Vec<Vec<i64>> {
    let pos = lex_positions(n, d / 2);
    let digits = |mut v: usize, len: usize| {
        let mut out = vec![0usize; len];
        for slot in out.iter_mut().rev() {
            *slot = v % n + 1;
            v /= n;
        }
        out
    };
    let rows = n.pow(k as u32);
    let cols = n.pow((d - k) as u32);
    (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| {
                    let mut full = digits(r, k);
                    full.extend(digits(c, d - k));
                    let a = pos[&full[..d / 2]] as i64;
                    let b = pos[&full[d / 2..]] as i64;
                    (a - b) * (a - b)
                })
                .collect()
        })
        .collect()
}

/// All combinatorial rectangles inside the ones of a 0/1 matrix.
fn all_rectangles(m: &[Vec<bool>]) -> Vec<(u32, u32)> {
    let (r, c) = (m.len(), m[0].len());
    let mut out = Vec::new();
    for rs in 1u32..1 << r {
        for cs in 1u32..1 << c {
            let inside =
                (0..r).all(|i| rs >> i & 1 == 0 || (0..c).all(|j| cs >> j & 1 == 0 || m[i][j]));
            if inside {
                out.push((rs, cs));
            }
        }
    }
    out
}

/// Boolean rank by trying every combination of `k` rectangles, `k` rising.
pub fn brute_boolean_rank(m: &[Vec<bool>]) -> usize {
    let (r, c) = (m.len(), m[0].len());
    let ones: Vec<(usize, usize)> = (0..r)
        .flat_map(|i| (0..c).map(move |j| (i, j)))
        .filter(|&(i, j)| m[i][j])
        .collect();
    if ones.is_empty() {
        return 0;
    }
    let rects = all_rectangles(m);
    let covered = |chosen: &[usize]| {
        ones.iter().all(|&(i, j)| {
            chosen
                .iter()
                .any(|&t| rects[t].0 >> i & 1 == 1 && rects[t].1 >> j & 1 == 1)
        })
    };
    fn combos(
        n: usize,
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for t in start..n {
            cur.push(t);
            if combos(n, k, t + 1, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    for k in 1..=ones.len() {
        if combos(rects.len(), k, 0, &mut Vec::new(), &mut |ch| covered(ch)) {
            return k;
        }
    }
    unreachable!("singletons always cover")
}

/// Protocol-tree depth by plain recursion over every split, no memo.
pub fn brute_dcc(m: &[Vec<u8>]) -> usize {
    fn go(m: &[Vec<u8>], rows: &[usize], cols: &[usize]) -> usize {
        let v = m[rows[0]][cols[0]];
        if rows.iter().all(|&i| cols.iter().all(|&j| m[i][j] == v)) {
            return 0;
        }
        let mut best = usize::MAX;
        for (side, set) in [(0, rows), (1, cols)] {
            let n = set.len();
            for mask in 1u32..(1 << n) - 1 {
                let a: Vec<usize> = (0..n)
                    .filter(|&t| mask >> t & 1 == 1)
                    .map(|t| set[t])
                    .collect();
                let b: Vec<usize> = (0..n)
                    .filter(|&t| mask >> t & 1 == 0)
                    .map(|t| set[t])
                    .collect();
                let cost = if side == 0 {
                    go(m, &a, cols).max(go(m, &b, cols))
                } else {
                    go(m, rows, &a).max(go(m, rows, &b))
                };
                best = best.min(1 + cost);
            }
        }
        best
    }
    let rows: Vec<usize> = (0..m.len()).collect();
    let cols: Vec<usize> = (0..m[0].len()).collect();
    go(m, &rows, &cols)
}

/// Smallest `k` with `C(k, ⌊k/2⌋) ≥ n`: the cover number of the
/// complement of an `n × n` identity.
pub fn sperner_cover(n: usize) -> usize {
    let binom = |k: u64, r: u64| (1..=r).fold(1u64, |acc, i| acc * (k + 1 - i) / i);
    (1..).find(|&k| binom(k, k / 2) >= n as u64).unwrap() as usize
}

/// 1-based index sum divisible by `n`.
pub fn divisible(idx: &[usize], n: usize) -> bool {
    idx.iter().map(|&i| i + 1).sum::<usize>() % n == 0
}
