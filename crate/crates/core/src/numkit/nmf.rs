//! Seeded search for nonnegative matrix factorizations `M ≈ W·H`.
//!
//! Each restart seeds every term on a random maximal box of the support of
//! `M` (a nonnegative rank-one term can only live on such a box), runs
//! multiplicative updates, then polishes with a projected Levenberg–Marquardt
//! step on all factor entries. Restarts run in fixed-size batches; the search
//! stops after the first batch containing a success, and the winner is the
//! lowest error with ties broken by restart index.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::factorization::NonnegFactorization;
use crate::error::{Error, Result};

/// Floor added to multiplicative-update denominators.
pub const MU_EPSILON: f64 = 1e-12;
/// Default relative reconstruction tolerance (max-norm over max |M|).
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
/// Above this many unknowns the polish uses HALS sweeps instead of LM.
const LM_MAX_PARAMS: usize = 1200;

#[derive(Clone, Debug, PartialEq)]
pub struct NmfOptions {
    pub restarts: usize,
    /// Restarts evaluated together before checking for success.
    pub batch: usize,
    pub mu_iters: usize,
    pub polish_iters: usize,
    /// Relative max-norm tolerance.
    pub tolerance: f64,
}

impl Default for NmfOptions {
    fn default() -> Self {
        NmfOptions {
            restarts: 32,
            batch: 4,
            mu_iters: 300,
            polish_iters: 400,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NmfOutcome {
    /// Best factorization found (in the units of the input matrix).
    pub factorization: NonnegFactorization<f64>,
    /// `max |W·H − M| / max |M|`.
    pub relative_error: f64,
    pub success: bool,
    /// Index of the winning restart.
    pub restart: usize,
    pub restarts_run: usize,
}

/// Searches for an `r`-term nonnegative factorization of `m`.
///
/// Failure (`success == false`) after exhausting the budget says nothing
/// about the monotone rank of `m`.
pub fn nmf_search(m: &DMatrix<f64>, r: usize, opts: &NmfOptions, seed: u64) -> Result<NmfOutcome> {
    if r == 0 {
        return Err(Error::validation("rank must be at least 1"));
    }
    if m.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::validation(
            "matrix has negative or non-finite entries",
        ));
    }
    let scale = m.amax();
    if scale == 0.0 {
        let w = DMatrix::zeros(m.nrows(), r);
        let h = DMatrix::zeros(r, m.ncols());
        return Ok(NmfOutcome {
            factorization: NonnegFactorization::from_matrices(&w, &h),
            relative_error: 0.0,
            success: true,
            restart: 0,
            restarts_run: 0,
        });
    }
    let target = m / scale;
    let batch = opts.batch.max(1);
    let mut best: Option<(f64, usize, DMatrix<f64>, DMatrix<f64>)> = None;
    let mut run = 0;
    while run < opts.restarts.max(1) {
        let end = (run + batch).min(opts.restarts.max(1));
        let results: Vec<_> = (run..end)
            .into_par_iter()
            .map(|k| {
                let (w, h) = single_restart(&target, r, opts, seed, k);
                (relative_error(&target, &w, &h), k, w, h)
            })
            .collect();
        for cand in results {
            let better = match &best {
                None => true,
                Some((e, k, _, _)) => cand.0 < *e || (cand.0 == *e && cand.1 < *k),
            };
            if better {
                best = Some(cand);
            }
        }
        run = end;
        if best.as_ref().is_some_and(|b| b.0 <= opts.tolerance) {
            break;
        }
    }
    let (err, restart, w, mut h) = best.expect("at least one restart");
    h *= scale;
    let (w, h) = balance(w, h);
    Ok(NmfOutcome {
        factorization: NonnegFactorization::from_matrices(&w, &h),
        relative_error: err,
        success: err <= opts.tolerance,
        restart,
        restarts_run: run,
    })
}

pub fn relative_error(target: &DMatrix<f64>, w: &DMatrix<f64>, h: &DMatrix<f64>) -> f64 {
    let scale = target.amax();
    let diff = w * h - target;
    if scale == 0.0 {
        diff.amax()
    } else {
        diff.amax() / scale
    }
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn single_restart(
    m: &DMatrix<f64>,
    r: usize,
    opts: &NmfOptions,
    seed: u64,
    restart: usize,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut rng = restart_rng(seed, restart);
    let (mut w, mut h) = box_seeded_init(m, r, &mut rng);
    multiplicative_updates(m, &mut w, &mut h, opts.mu_iters);
    let params = (m.nrows() + m.ncols()) * r;
    if params <= LM_MAX_PARAMS {
        projected_lm(m, &mut w, &mut h, opts.polish_iters);
    } else {
        hals(m, &mut w, &mut h, opts.polish_iters * 10);
    }
    (w, h)
}

/// Random maximal support box: rows `R`, columns `C` with `R × C ⊆ supp(M)`.
fn random_box(m: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> (Vec<bool>, Vec<bool>) {
    let (nr, nc) = m.shape();
    let support = |i: usize, j: usize| m[(i, j)] > 0.0;
    for _ in 0..32 {
        let p: f64 = rng.random_range(0.15..0.85);
        let rows: Vec<bool> = (0..nr).map(|_| rng.random_bool(p)).collect();
        if !rows.iter().any(|&b| b) {
            continue;
        }
        let cols: Vec<bool> = (0..nc)
            .map(|j| (0..nr).all(|i| !rows[i] || support(i, j)))
            .collect();
        if !cols.iter().any(|&b| b) {
            continue;
        }
        let rows = (0..nr)
            .map(|i| (0..nc).all(|j| !cols[j] || support(i, j)))
            .collect();
        return (rows, cols);
    }
    // fall back to the closure of a single support cell
    let cells: Vec<(usize, usize)> = (0..nr)
        .flat_map(|i| (0..nc).map(move |j| (i, j)))
        .filter(|&(i, j)| support(i, j))
        .collect();
    let (i0, _) = cells[rng.random_range(0..cells.len())];
    let cols: Vec<bool> = (0..nc).map(|j| support(i0, j)).collect();
    let rows = (0..nr)
        .map(|i| (0..nc).all(|j| !cols[j] || support(i, j)))
        .collect();
    (rows, cols)
}

fn box_seeded_init(
    m: &DMatrix<f64>,
    r: usize,
    rng: &mut ChaCha8Rng,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let (nr, nc) = m.shape();
    let mut w = DMatrix::zeros(nr, r);
    let mut h = DMatrix::zeros(r, nc);
    for t in 0..r {
        let (rows, cols) = random_box(m, rng);
        for i in 0..nr {
            if rows[i] {
                w[(i, t)] = rng.random_range(0.1..1.1);
            }
        }
        for j in 0..nc {
            if cols[j] {
                h[(t, j)] = rng.random_range(0.1..1.1);
            }
        }
    }
    // match the overall scale of M
    let approx: DMatrix<f64> = &w * &h;
    let ratio = (m.sum() / approx.sum().max(f64::MIN_POSITIVE)).sqrt();
    (w * ratio, h * ratio)
}

/// Lee–Seung updates with an additive floor on the denominators.
pub fn multiplicative_updates(
    m: &DMatrix<f64>,
    w: &mut DMatrix<f64>,
    h: &mut DMatrix<f64>,
    iters: usize,
) {
    for _ in 0..iters {
        let num = w.transpose() * m;
        let den = (w.transpose() * &*w) * &*h;
        h.zip_zip_apply(&num, &den, |x, n, d| *x *= n / (d + MU_EPSILON));
        let num = m * h.transpose();
        let den = &*w * (&*h * h.transpose());
        w.zip_zip_apply(&num, &den, |x, n, d| *x *= n / (d + MU_EPSILON));
    }
}

/// Hierarchical ALS sweeps (one column of `W` / row of `H` at a time).
pub fn hals(m: &DMatrix<f64>, w: &mut DMatrix<f64>, h: &mut DMatrix<f64>, iters: usize) {
    let r = w.ncols();
    for _ in 0..iters {
        let wtm = w.transpose() * m;
        let wtw = w.transpose() * &*w;
        for k in 0..r {
            let d = wtw[(k, k)].max(1e-15);
            let update = (wtm.row(k) - wtw.row(k) * &*h) / d;
            for j in 0..h.ncols() {
                h[(k, j)] = (h[(k, j)] + update[j]).max(0.0);
            }
        }
        let mht = m * h.transpose();
        let hht = &*h * h.transpose();
        for k in 0..r {
            let d = hht[(k, k)].max(1e-15);
            let update = (mht.column(k) - &*w * hht.column(k)) / d;
            for i in 0..w.nrows() {
                w[(i, k)] = (w[(i, k)] + update[i]).max(0.0);
            }
        }
    }
}

/// Projected Levenberg–Marquardt on `½‖W·H − M‖²_F` over all entries of
/// `W` and `H`, with variables pinned at zero while their gradient pushes
/// outward.
pub fn projected_lm(m: &DMatrix<f64>, w: &mut DMatrix<f64>, h: &mut DMatrix<f64>, iters: usize) {
    let (nr, nc) = m.shape();
    let r = w.ncols();
    let nw = nr * r;
    let p = nw + r * nc;
    let mut mu = 1e-3;
    let mut resid = &*w * &*h - m;
    let mut cost = resid.norm_squared();
    let mut stall = 0;

    for _ in 0..iters {
        if cost < 1e-30 {
            break;
        }
        // gradient Jᵀf
        let gw = &resid * h.transpose();
        let gh = w.transpose() * &resid;
        let mut grad = Vec::with_capacity(p);
        grad.extend(
            (0..nr)
                .flat_map(|i| (0..r).map(move |t| (i, t)))
                .map(|(i, t)| gw[(i, t)]),
        );
        grad.extend(
            (0..r)
                .flat_map(|t| (0..nc).map(move |j| (t, j)))
                .map(|(t, j)| gh[(t, j)]),
        );
        let value = |k: usize| -> f64 {
            if k < nw {
                w[(k / r, k % r)]
            } else {
                let k = k - nw;
                h[(k / nc, k % nc)]
            }
        };
        let free: Vec<usize> = (0..p)
            .filter(|&k| !(value(k) <= 0.0 && grad[k] > 0.0))
            .collect();
        let mut pos = vec![usize::MAX; p];
        for (a, &k) in free.iter().enumerate() {
            pos[k] = a;
        }

        // Gauss–Newton normal matrix JᵀJ restricted to free variables
        let nf = free.len();
        let mut jtj = DMatrix::<f64>::zeros(nf, nf);
        let hht = &*h * h.transpose();
        let wtw = w.transpose() * &*w;
        for i in 0..nr {
            for t in 0..r {
                let a = pos[i * r + t];
                if a == usize::MAX {
                    continue;
                }
                for t2 in 0..r {
                    let b = pos[i * r + t2];
                    if b != usize::MAX {
                        jtj[(a, b)] += hht[(t, t2)];
                    }
                }
                // cross block: ∂f_ij/∂W_it · ∂f_ij/∂H_t2j = H_tj · W_it2
                for j in 0..nc {
                    let htj = h[(t, j)];
                    if htj == 0.0 {
                        continue;
                    }
                    for t2 in 0..r {
                        let b = pos[nw + t2 * nc + j];
                        if b != usize::MAX {
                            let v = htj * w[(i, t2)];
                            jtj[(a, b)] += v;
                            jtj[(b, a)] += v;
                        }
                    }
                }
            }
        }
        for j in 0..nc {
            for t in 0..r {
                let a = pos[nw + t * nc + j];
                if a == usize::MAX {
                    continue;
                }
                for t2 in 0..r {
                    let b = pos[nw + t2 * nc + j];
                    if b != usize::MAX {
                        jtj[(a, b)] += wtw[(t, t2)];
                    }
                }
            }
        }
        let g_free = nalgebra::DVector::from_iterator(nf, free.iter().map(|&k| grad[k]));

        let mut accepted = false;
        while mu < 1e12 {
            let mut lhs = jtj.clone();
            for a in 0..nf {
                lhs[(a, a)] += mu * (jtj[(a, a)] + 1e-12);
            }
            let Some(chol) = lhs.cholesky() else {
                mu *= 4.0;
                continue;
            };
            let step = chol.solve(&(-&g_free));
            let mut w_new = w.clone();
            let mut h_new = h.clone();
            for (a, &k) in free.iter().enumerate() {
                if k < nw {
                    let slot = &mut w_new[(k / r, k % r)];
                    *slot = (*slot + step[a]).max(0.0);
                } else {
                    let k = k - nw;
                    let slot = &mut h_new[(k / nc, k % nc)];
                    *slot = (*slot + step[a]).max(0.0);
                }
            }
            let resid_new = &w_new * &h_new - m;
            let cost_new = resid_new.norm_squared();
            if cost_new < cost {
                let gain = (cost - cost_new) / cost;
                *w = w_new;
                *h = h_new;
                resid = resid_new;
                cost = cost_new;
                mu = (mu / 3.0).max(1e-15);
                accepted = true;
                stall = if gain < 1e-9 { stall + 1 } else { 0 };
                break;
            }
            mu *= 4.0;
        }
        if !accepted || stall >= 10 {
            break;
        }
    }
}

/// Rescales each term so its two factors have equal max-norm.
fn balance(mut w: DMatrix<f64>, mut h: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    for t in 0..w.ncols() {
        let a = w.column(t).amax();
        let b = h.row(t).amax();
        if a > 0.0 && b > 0.0 {
            let s = (b / a).sqrt();
            w.column_mut(t).scale_mut(s);
            h.row_mut(t).scale_mut(1.0 / s);
        }
    }
    (w, h)
}
