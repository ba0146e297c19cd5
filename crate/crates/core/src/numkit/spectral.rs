//! Spectral decomposition of real antisymmetric rank-2 matrices.
//!
//! `C` is antisymmetric, so `iC` is Hermitian with eigenvalues `±μ` and
//! `N − 2` zeros. We diagonalize `iC` with cyclic complex Jacobi rotations
//! and read off `C = λ u0 u0* − λ u1 u1*` with `λ = iμ`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratlinalg::{RatMatrix, Rational};

pub type ComplexVector = DVector<Complex64>;

/// Jacobi stops once the off-diagonal Frobenius norm is below this
/// fraction of the total norm.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralPair {
    /// `|λ|`; the nonzero eigenvalues of `C` are `±iμ`.
    #[serde(rename = "lambdaMagnitude")]
    pub lambda_magnitude: f64,
    /// Eigenvector of `C` for `+iμ`.
    #[serde(skip)]
    pub u0: ComplexVector,
    /// Eigenvector of `C` for `−iμ`.
    #[serde(skip)]
    pub u1: ComplexVector,
}

impl SpectralPair {
    /// `λ u0 u0* − λ u1 u1*`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let lambda = Complex64::new(0.0, self.lambda_magnitude);
        let n = self.u0.len();
        DMatrix::from_fn(n, n, |x, y| {
            lambda * (self.u0[x] * self.u0[y].conj() - self.u1[x] * self.u1[y].conj())
        })
    }
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues ascending and the
/// unitary whose columns are the matching eigenvectors.
pub fn hermitian_jacobi(mut a: DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square input required");
    let mut v = DMatrix::<Complex64>::identity(n, n);
    let total = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = JACOBI_TOLERANCE * total.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

fn off_diagonal_norm(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[p][q]` with `G = diag(1, e^{−iφ})·R(θ)` acting on the `(p, q)` plane.
fn rotate(a: &mut DMatrix<Complex64>, v: &mut DMatrix<Complex64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -conj_phase * s;
    let g_qq = conj_phase * c;

    let n = a.nrows();
    // A ← A·G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A ← G^H·A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::zero();
    a[(q, p)] = Complex64::zero();
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V ← V·G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Spectral pair of an exact antisymmetric rank-2 matrix.
pub fn antisym_spectral(c: &RatMatrix) -> Result<SpectralPair> {
    antisym_spectral_scaled(c, &Rational::from_integer(1.into()))
}

/// Spectral pair of `√scale_sq · C` for an exact antisymmetric rank-2 `C`.
///
/// The scale may be irrational; only its square is carried exactly.
pub fn antisym_spectral_scaled(c: &RatMatrix, scale_sq: &Rational) -> Result<SpectralPair> {
    if !c.is_antisymmetric() {
        return Err(Error::validation("matrix is not antisymmetric"));
    }
    if *scale_sq <= Rational::zero() {
        return Err(Error::validation("scale must be positive"));
    }
    let rank = c.rank();
    if rank != 2 {
        return Err(Error::UnsupportedRank {
            expected: 2,
            found: rank,
        });
    }
    let s = scale_sq.to_f64().unwrap_or(f64::NAN).sqrt();
    let n = c.rows();
    let vals = c.to_f64_entries();
    // iC is Hermitian: (iC)_xy = i c_xy
    let h = DMatrix::from_fn(n, n, |x, y| Complex64::new(0.0, s * vals[x * n + y]));
    let (eig, vecs) = hermitian_jacobi(h);
    // iC u = −μ u  ⇔  C u = iμ u
    let mu = (eig[n - 1] - eig[0]) / 2.0;
    Ok(SpectralPair {
        lambda_magnitude: mu,
        u0: vecs.column(0).into_owned(),
        u1: vecs.column(n - 1).into_owned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::{frac, int};

    fn max_dev(pair: &SpectralPair, c: &RatMatrix, scale: f64) -> f64 {
        let rec = pair.reconstruct();
        let vals = c.to_f64_entries();
        let n = c.rows();
        let mut worst = 0.0f64;
        for x in 0..n {
            for y in 0..n {
                let target = Complex64::new(scale * vals[x * n + y], 0.0);
                worst = worst.max((rec[(x, y)] - target).norm());
            }
        }
        worst
    }

    #[test]
    fn rotation_generator_has_unit_magnitude() {
        let c = RatMatrix::from_int_rows(&[[0, 1], [-1, 0]]);
        let pair = antisym_spectral(&c).unwrap();
        assert!((pair.lambda_magnitude - 1.0).abs() < 1e-12);
        assert!(max_dev(&pair, &c, 1.0) < 1e-12);
    }

    #[test]
    fn scaled_generator_gives_root_half() {
        let c = RatMatrix::from_int_rows(&[[0, 1], [-1, 0]]);
        let pair = antisym_spectral_scaled(&c, &frac(1, 2)).unwrap();
        assert!((pair.lambda_magnitude - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn difference_matrix_magnitude_is_root_twenty() {
        let c = RatMatrix::from_fn(4, 4, |x, y| int(y as i64 - x as i64));
        let pair = antisym_spectral(&c).unwrap();
        assert!((pair.lambda_magnitude - 20f64.sqrt()).abs() < 1e-9);
        assert!(max_dev(&pair, &c, 1.0) < 1e-9);
        assert!((pair.u0.norm() - 1.0).abs() < 1e-9);
        assert!((pair.u1.norm() - 1.0).abs() < 1e-9);
        assert!(pair.u0.dotc(&pair.u1).norm() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let sym = RatMatrix::from_int_rows(&[[0, 1], [1, 0]]);
        assert!(matches!(antisym_spectral(&sym), Err(Error::Validation(_))));
        let rank4 =
            RatMatrix::from_int_rows(&[[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]);
        assert!(matches!(
            antisym_spectral(&rank4),
            Err(Error::UnsupportedRank {
                expected: 2,
                found: 4
            })
        ));
    }

    #[test]
    fn jacobi_diagonalizes_general_hermitian() {
        let h = DMatrix::from_row_slice(
            3,
            3,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(0.0, -0.5),
                Complex64::new(1.0, -1.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.3, 0.0),
                Complex64::new(0.0, 0.5),
                Complex64::new(0.3, 0.0),
                Complex64::new(0.5, 0.0),
            ],
        );
        let (vals, vecs) = hermitian_jacobi(h.clone());
        let recon = &vecs
            * DMatrix::from_diagonal(&DVector::from_iterator(
                3,
                vals.iter().map(|&x| Complex64::new(x, 0.0)),
            ))
            * vecs.adjoint();
        assert!((recon - h).norm() < 1e-10);
        let trace: f64 = vals.iter().sum();
        assert!((trace - 1.5).abs() < 1e-10);
    }
}
