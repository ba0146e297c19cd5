//! Hidden-variable simulation of a joint distribution: shared `Z` with
//! weight `w_z`, then `X` and `Y` drawn independently given `Z`.

use log::warn;
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{verify_nonneg_factorization, ComplexVector, NonnegFactorization, Scalar};
use crate::tensor::DenseTensor;

/// Tolerance for accepting float factorizations.
pub const FLOAT_MODEL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Serialize")]
pub struct HiddenVariableModel<T = f64> {
    /// `Prob{Z = z}`.
    pub weights: Vec<T>,
    #[serde(rename = "condX")]
    pub cond_x: Vec<Vec<T>>,
    #[serde(rename = "condY")]
    pub cond_y: Vec<Vec<T>>,
}

impl<T: Scalar> HiddenVariableModel<T> {
    /// `|Ω|`.
    pub fn omega_size(&self) -> usize {
        self.weights.len()
    }

    pub fn log2_omega(&self) -> f64 {
        (self.omega_size() as f64).log2()
    }

    /// `Σ_z w_z · condX_z ⊗ condY_z`.
    pub fn joint(&self) -> DenseTensor<T> {
        let nx = self.cond_x.first().map_or(0, Vec::len);
        let ny = self.cond_y.first().map_or(0, Vec::len);
        DenseTensor::from_fn(vec![nx.max(1), ny.max(1)], |i| {
            let mut acc = T::zero();
            for z in 0..self.weights.len() {
                let v = self.weights[z].clone()
                    * self.cond_x[z][i[0]].clone()
                    * self.cond_y[z][i[1]].clone();
                acc = acc + v;
            }
            acc
        })
        .expect("model dims are small")
    }

    pub fn to_f64(&self) -> HiddenVariableModel<f64> {
        let conv = |v: &Vec<Vec<T>>| -> Vec<Vec<f64>> {
            v.iter()
                .map(|row| row.iter().map(Scalar::to_f64).collect())
                .collect()
        };
        HiddenVariableModel {
            weights: self.weights.iter().map(Scalar::to_f64).collect(),
            cond_x: conv(&self.cond_x),
            cond_y: conv(&self.cond_y),
        }
    }
}

/// Normalizes each term `x ⊗ y` into `(Σx·Σy) · (x/Σx) ⊗ (y/Σy)`.
///
/// Rational factorizations must verify exactly, float ones within
/// [`FLOAT_MODEL_TOLERANCE`]. Terms of zero mass are dropped.
pub fn hv_model_from_factorization<T: Scalar>(
    p: &DenseTensor<T>,
    f: &NonnegFactorization<T>,
) -> Result<HiddenVariableModel<T>> {
    if p.order() != 2 {
        return Err(Error::dimension("joint distribution must be a matrix"));
    }
    let tol = if T::is_exact() {
        0.0
    } else {
        FLOAT_MODEL_TOLERANCE
    };
    let check = verify_nonneg_factorization(p, f, tol)?;
    if !check.pass {
        return Err(Error::validation(format!(
            "factorization does not verify ({}, max error {:e})",
            check.failure.map_or("unknown".into(), |c| c.to_string()),
            check.max_abs_error
        )));
    }
    let mut model = HiddenVariableModel {
        weights: Vec::new(),
        cond_x: Vec::new(),
        cond_y: Vec::new(),
    };
    let sum = |v: &[T]| v.iter().fold(T::zero(), |a, b| a + b.clone());
    for (z, term) in f.terms.iter().enumerate() {
        let (sx, sy) = (sum(&term[0]), sum(&term[1]));
        if sx.is_zero() || sy.is_zero() {
            warn!("dropping zero-mass term {z}");
            continue;
        }
        model.weights.push(sx.clone() * sy.clone());
        model
            .cond_x
            .push(term[0].iter().map(|v| v.clone() / sx.clone()).collect());
        model
            .cond_y
            .push(term[1].iter().map(|v| v.clone() / sy.clone()).collect());
    }
    Ok(model)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleReport {
    pub trials: u64,
    /// Empirical joint frequencies, row-major.
    pub empirical: Vec<Vec<f64>>,
    /// Total-variation distance to the model's exact joint.
    pub tv: f64,
}

/// Draws `Z`, then `X` and `Y` independently given `Z`, `trials` times.
pub fn hv_sample(model: &HiddenVariableModel<f64>, trials: u64, seed: u64) -> Result<SampleReport> {
    if model.weights.is_empty() {
        return Err(Error::validation("model has no hidden values"));
    }
    let dist = |w: &[f64]| {
        WeightedIndex::new(w).map_err(|e| Error::validation(format!("bad distribution: {e}")))
    };
    let z_dist = dist(&model.weights)?;
    let x_dists = model
        .cond_x
        .iter()
        .map(|c| dist(c))
        .collect::<Result<Vec<_>>>()?;
    let y_dists = model
        .cond_y
        .iter()
        .map(|c| dist(c))
        .collect::<Result<Vec<_>>>()?;
    let nx = model.cond_x[0].len();
    let ny = model.cond_y[0].len();
    let mut counts = vec![0u64; nx * ny];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let z = z_dist.sample(&mut rng);
        let x = x_dists[z].sample(&mut rng);
        let y = y_dists[z].sample(&mut rng);
        counts[x * ny + y] += 1;
    }
    let denom = trials.max(1) as f64;
    let exact = model.joint();
    let empirical: Vec<Vec<f64>> = counts
        .chunks(ny)
        .map(|row| row.iter().map(|&c| c as f64 / denom).collect())
        .collect();
    let tv = 0.5
        * empirical
            .iter()
            .flatten()
            .zip(exact.data())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>();
    Ok(SampleReport {
        trials,
        empirical,
        tv,
    })
}

/// 3σ multinomial threshold: `½ Σ 3·√(p(1−p)/trials)`.
pub fn tv_threshold(p: &[f64], trials: u64) -> f64 {
    let t = trials.max(1) as f64;
    0.5 * p
        .iter()
        .map(|&q| 3.0 * (q * (1.0 - q) / t).sqrt())
        .sum::<f64>()
}

/// `P′_xy = ½|u0(x)v0(y) + u1(x)v1(y)|²` as an N×N row-major tensor.
pub fn quantum_distribution(
    u0: &ComplexVector,
    u1: &ComplexVector,
    v0: &ComplexVector,
    v1: &ComplexVector,
) -> Result<DenseTensor<f64>> {
    let n = u0.len();
    if [u1.len(), v0.len(), v1.len()].iter().any(|&l| l != n) || n == 0 {
        return Err(Error::dimension("vectors must share one nonzero length"));
    }
    DenseTensor::from_fn(vec![n, n], |i| {
        let amp: Complex64 = u0[i[0]] * v0[i[1]] + u1[i[0]] * v1[i[1]];
        0.5 * amp.norm_sqr()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::{frac, int, Rational};
    use nalgebra::DVector;
    use rand::Rng;

    fn swap_half() -> (DenseTensor<Rational>, NonnegFactorization<Rational>) {
        let p = DenseTensor::new(vec![2, 2], vec![int(0), frac(1, 2), frac(1, 2), int(0)]).unwrap();
        let f = NonnegFactorization::new(
            vec![2, 2],
            vec![
                vec![vec![int(1), int(0)], vec![int(0), frac(1, 2)]],
                vec![vec![int(0), frac(1, 2)], vec![int(1), int(0)]],
            ],
        )
        .unwrap();
        (p, f)
    }

    #[test]
    fn two_term_model_has_half_weights() {
        let (p, f) = swap_half();
        let m = hv_model_from_factorization(&p, &f).unwrap();
        assert_eq!(m.weights, vec![frac(1, 2), frac(1, 2)]);
        assert_eq!(m.joint(), p);
    }

    #[test]
    fn product_distribution_needs_one_value() {
        let px = [frac(1, 4), frac(3, 4)];
        let qy = [frac(1, 3), frac(2, 3)];
        let p = DenseTensor::from_fn(vec![2, 2], |i| &px[i[0]] * &qy[i[1]]).unwrap();
        let f = NonnegFactorization::new(vec![2, 2], vec![vec![px.to_vec(), qy.to_vec()]]).unwrap();
        let m = hv_model_from_factorization(&p, &f).unwrap();
        assert_eq!(m.omega_size(), 1);
        assert_eq!(m.joint(), p);
    }

    #[test]
    fn rejects_unverified_factorization() {
        let (p, mut f) = swap_half();
        f.terms[0][1][1] = frac(1, 3);
        assert!(matches!(
            hv_model_from_factorization(&p, &f),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn deterministic_model_samples_exactly() {
        let m = HiddenVariableModel {
            weights: vec![1.0],
            cond_x: vec![vec![0.0, 1.0]],
            cond_y: vec![vec![1.0, 0.0]],
        };
        let r = hv_sample(&m, 1000, 3).unwrap();
        assert_eq!(r.tv, 0.0);
        assert_eq!(r.empirical, vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn swap_model_sampling_within_threshold() {
        let (p, f) = swap_half();
        let m = hv_model_from_factorization(&p, &f).unwrap().to_f64();
        let r = hv_sample(&m, 100_000, 17).unwrap();
        let thr = tv_threshold(&[0.0, 0.5, 0.5, 0.0], 100_000);
        assert!(thr <= 0.02);
        assert!(r.tv <= thr, "tv {} > {}", r.tv, thr);
        let again = hv_sample(&m, 100_000, 17).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn quantum_distribution_cases() {
        let e = |k: usize, n: usize| {
            let mut v = DVector::<Complex64>::zeros(n);
            v[k] = Complex64::new(1.0, 0.0);
            v
        };
        let p = quantum_distribution(&e(0, 3), &e(1, 3), &e(0, 3), &e(1, 3)).unwrap();
        assert_eq!(p.data(), &[0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0]);
        assert!(quantum_distribution(&e(0, 3), &e(1, 2), &e(0, 3), &e(1, 3)).is_err());
    }

    #[test]
    fn random_orthonormal_pairs_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 3, 5, 8] {
            let mut rand_vec = || {
                DVector::from_fn(n, |_, _| {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                })
            };
            let a = rand_vec();
            let b = rand_vec();
            let u0 = &a / Complex64::new(a.norm(), 0.0);
            let b = &b - &u0 * u0.dotc(&b);
            let u1 = &b / Complex64::new(b.norm(), 0.0);
            let v0 = u0.conjugate();
            let v1 = -u1.conjugate();
            let p = quantum_distribution(&u0, &u1, &v0, &v1).unwrap();
            let total: f64 = p.data().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "n = {n}: {total}");
        }
    }
}
