//! Unconstrained CP decomposition by alternating least squares.
//!
//! Used for tensor-rank heuristics only: a small residual at rank `r` is
//! evidence (not proof) that the real tensor rank is at most `r`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::{advance, DenseTensor};

const MAX_ORDER: usize = 6;
const MAX_DIM: usize = 16;
const RESTARTS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct CpDecomposition {
    /// `terms[t][mode]` is the mode-`mode` vector of term `t`.
    pub terms: Vec<Vec<Vec<f64>>>,
    /// Frobenius norm of `T − Σ terms`.
    pub residual: f64,
}

/// Best of several seeded ALS runs at rank `r`.
pub fn cp_als(t: &DenseTensor<f64>, r: usize, iters: usize, seed: u64) -> Result<CpDecomposition> {
    let d = t.order();
    if d < 3 {
        return Err(Error::validation(
            "CP-ALS needs a tensor of order at least 3",
        ));
    }
    if d > MAX_ORDER || t.dims().iter().any(|&n| n > MAX_DIM) {
        return Err(Error::capacity(format!(
            "CP-ALS is limited to order ≤ {MAX_ORDER} and dims ≤ {MAX_DIM}, got {:?}",
            t.dims()
        )));
    }
    if r == 0 {
        return Err(Error::validation("rank must be at least 1"));
    }
    let mut best: Option<CpDecomposition> = None;
    for k in 0..RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let cand = single_run(t, r, iters, &mut rng);
        if best.as_ref().is_none_or(|b| cand.residual < b.residual) {
            best = Some(cand);
        }
        if best.as_ref().is_some_and(|b| b.residual < 1e-12) {
            break;
        }
    }
    Ok(best.expect("at least one restart"))
}

fn single_run(
    t: &DenseTensor<f64>,
    r: usize,
    iters: usize,
    rng: &mut ChaCha8Rng,
) -> CpDecomposition {
    let dims = t.dims().to_vec();
    let d = dims.len();
    let mut factors: Vec<DMatrix<f64>> = dims
        .iter()
        .map(|&n| DMatrix::from_fn(n, r, |_, _| rng.random_range(-1.0..1.0)))
        .collect();
    let norm = t.data().iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut last = f64::INFINITY;

    for _ in 0..iters {
        for mode in 0..d {
            let mut gram = DMatrix::from_element(r, r, 1.0);
            for (k, f) in factors.iter().enumerate() {
                if k != mode {
                    gram.component_mul_assign(&(f.transpose() * f));
                }
            }
            let g = mttkrp(t, &factors, mode);
            let Some(pinv) = gram
                .clone()
                .pseudo_inverse(1e-13 * gram.amax().max(1e-300))
                .ok()
            else {
                continue;
            };
            factors[mode] = g * pinv;
        }
        let res = residual(t, &factors);
        if res <= 1e-13 * norm.max(1.0) || (last - res).abs() <= 1e-15 * norm.max(1.0) {
            last = res;
            break;
        }
        last = res;
    }
    let residual = if last.is_finite() {
        last
    } else {
        residual(t, &factors)
    };
    let terms = (0..r)
        .map(|c| {
            factors
                .iter()
                .map(|f| f.column(c).iter().copied().collect())
                .collect()
        })
        .collect();
    CpDecomposition { terms, residual }
}

/// `T_(mode) · (⊙_{k≠mode} A_k)` computed entrywise.
fn mttkrp(t: &DenseTensor<f64>, factors: &[DMatrix<f64>], mode: usize) -> DMatrix<f64> {
    let dims = t.dims();
    let r = factors[0].ncols();
    let mut out = DMatrix::zeros(dims[mode], r);
    let mut idx = vec![0; dims.len()];
    let mut prod = vec![0.0; r];
    for &v in t.data() {
        if v != 0.0 {
            prod.iter_mut().for_each(|p| *p = v);
            for (k, f) in factors.iter().enumerate() {
                if k != mode {
                    for (c, p) in prod.iter_mut().enumerate() {
                        *p *= f[(idx[k], c)];
                    }
                }
            }
            for (c, p) in prod.iter().enumerate() {
                out[(idx[mode], c)] += p;
            }
        }
        advance(&mut idx, dims);
    }
    out
}

fn residual(t: &DenseTensor<f64>, factors: &[DMatrix<f64>]) -> f64 {
    let dims = t.dims();
    let r = factors[0].ncols();
    let mut idx = vec![0; dims.len()];
    let mut sum = 0.0;
    for &v in t.data() {
        let mut approx = 0.0;
        for c in 0..r {
            let mut p = 1.0;
            for (k, f) in factors.iter().enumerate() {
                p *= f[(idx[k], c)];
            }
            approx += p;
        }
        sum += (v - approx).powi(2);
        advance(&mut idx, dims);
    }
    sum.sqrt()
}
