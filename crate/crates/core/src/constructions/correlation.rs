//! Correlation objects for the maximally entangled qubit pair:
//! `C_xy = c_y − c_x`, `P = C ∘ C̄` and the vectors `u0, u1, v0, v1`.
//!
//! `c_x = s·b_x` with `s` irrational in general, so `C` is kept as the exact
//! difference matrix of `b` together with `s²`. Everything in `P` is exact
//! because only squared differences appear.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::numkit::{antisym_spectral_scaled, ComplexVector, SpectralPair};
use crate::ratlinalg::{frac, int, RatMatrix, Rational};

/// Distinct generators `b_0..b_{N−1}` and the squared scale `s²` with
/// `s²·Σ_{x<y}(b_y − b_x)² = 1/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationSpec {
    base: Vec<Rational>,
    scale_sq: Rational,
}

impl CorrelationSpec {
    /// Default generators `b_x = x + 1`.
    pub fn new(size: usize) -> Result<Self> {
        Self::with_values((1..=size as i64).map(int).collect())
    }

    /// Generators with the normalizing scale computed exactly.
    pub fn with_values(base: Vec<Rational>) -> Result<Self> {
        let total = Self::check_base(&base)?;
        let scale_sq = Rational::one() / (int(2) * total);
        Ok(CorrelationSpec { base, scale_sq })
    }

    /// Generators with a caller-supplied `s²`, rejected unless normalized.
    pub fn with_scale(base: Vec<Rational>, scale_sq: Rational) -> Result<Self> {
        let total = Self::check_base(&base)?;
        if &scale_sq * total != frac(1, 2) {
            return Err(Error::validation(
                "normalization violated: s²·Σ(b_y − b_x)² must equal 1/2",
            ));
        }
        Ok(CorrelationSpec { base, scale_sq })
    }

    fn check_base(base: &[Rational]) -> Result<Rational> {
        let n = base.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::validation(format!(
                "size must be a power of two ≥ 2, got {n}"
            )));
        }
        let mut seen = HashSet::new();
        if !base.iter().all(|b| seen.insert(b.clone())) {
            return Err(Error::validation("generators must be distinct"));
        }
        let mut total = Rational::zero();
        for x in 0..n {
            for y in x + 1..n {
                let d = &base[y] - &base[x];
                total += &d * &d;
            }
        }
        Ok(total)
    }

    pub fn size(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[Rational] {
        &self.base
    }

    pub fn scale_sq(&self) -> &Rational {
        &self.scale_sq
    }
}

#[derive(Clone, Debug)]
pub struct CorrelationObjects {
    /// `b_y − b_x`; the actual `C` is `s` times this.
    pub difference: RatMatrix,
    pub scale_sq: Rational,
    /// `P = s²·(D ∘ D)`.
    pub p: RatMatrix,
    pub spectral: SpectralPair,
    pub u0: ComplexVector,
    pub u1: ComplexVector,
    pub v0: ComplexVector,
    pub v1: ComplexVector,
    /// `max |P − ½|u0(x)v0(y) + u1(x)v1(y)|²|`.
    pub max_deviation: f64,
}

pub fn correlation_objects(spec: &CorrelationSpec) -> Result<CorrelationObjects> {
    let b = &spec.base;
    let n = b.len();
    let difference = RatMatrix::from_fn(n, n, |x, y| &b[y] - &b[x]);
    let p = difference.hadamard(&difference)?.scale(&spec.scale_sq);
    if p.sum() != Rational::one() {
        return Err(Error::validation("normalization violated: ΣP ≠ 1"));
    }
    let spectral = antisym_spectral_scaled(&difference, &spec.scale_sq)?;
    let u0 = spectral.u0.clone();
    let u1 = spectral.u1.clone();
    let v0 = u0.conjugate();
    let v1 = -u1.conjugate();
    let numeric = crate::models::quantum_distribution(&u0, &u1, &v0, &v1)?;
    let exact = p.to_f64_entries();
    let max_deviation = numeric
        .data()
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(CorrelationObjects {
        difference,
        scale_sq: spec.scale_sq.clone(),
        p,
        spectral,
        u0,
        u1,
        v0,
        v1,
        max_deviation,
    })
}

impl CorrelationObjects {
    /// `s` as a float.
    pub fn scale(&self) -> f64 {
        self.scale_sq.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct UnitaryCompletion {
    pub orthonormal: bool,
    pub extendable: bool,
    /// Max `|⟨q_i, q_j⟩ − δ_ij|` over the completed basis (or the input pair
    /// when it is not orthonormal).
    pub defect: f64,
}

const ORTHO_TOL: f64 = 1e-9;

/// Checks that `u0, u1` are orthonormal and extends them to a full basis by
/// Gram–Schmidt against the standard basis.
pub fn complete_unitary_columns(u0: &ComplexVector, u1: &ComplexVector) -> UnitaryCompletion {
    let n = u0.len();
    let pair_defect = (u0.norm() - 1.0)
        .abs()
        .max((u1.norm() - 1.0).abs())
        .max(u0.dotc(u1).norm());
    if u1.len() != n || pair_defect > ORTHO_TOL {
        return UnitaryCompletion {
            orthonormal: false,
            extendable: false,
            defect: if u1.len() == n {
                pair_defect
            } else {
                f64::INFINITY
            },
        };
    }
    let mut basis: Vec<ComplexVector> = vec![u0.clone(), u1.clone()];
    for k in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = DVector::<Complex64>::zeros(n);
        v[k] = Complex64::one();
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for q in &basis {
                let c = q.dotc(&v);
                v -= q * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / Complex64::new(norm, 0.0));
        }
    }
    let q = DMatrix::from_columns(&basis);
    let gram = q.adjoint() * &q;
    let mut defect = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    UnitaryCompletion {
        orthonormal: true,
        extendable: basis.len() == n && defect <= ORTHO_TOL,
        defect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_outcomes() {
        let obj = correlation_objects(&CorrelationSpec::new(2).unwrap()).unwrap();
        assert_eq!(
            obj.p,
            RatMatrix::new(2, 2, vec![int(0), frac(1, 2), frac(1, 2), int(0)]).unwrap()
        );
        assert!(obj.max_deviation < 1e-12);
        assert!((obj.spectral.lambda_magnitude - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn four_outcomes_over_forty() {
        let obj = correlation_objects(&CorrelationSpec::new(4).unwrap()).unwrap();
        assert_eq!(obj.scale_sq, frac(1, 40));
        let expected = RatMatrix::from_fn(4, 4, |x, y| {
            let d = y as i64 - x as i64;
            frac(d * d, 40)
        });
        assert_eq!(obj.p, expected);
        assert_eq!(obj.p.sum(), int(1));
    }

    #[test]
    fn deviation_is_small_up_to_sixteen() {
        for n in [4, 8, 16] {
            let obj = correlation_objects(&CorrelationSpec::new(n).unwrap()).unwrap();
            assert!(obj.max_deviation <= 1e-9, "N = {n}: {}", obj.max_deviation);
            assert!(obj.p.is_symmetric() && obj.p.is_nonnegative());
            assert_eq!(obj.difference.rank(), 2);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(CorrelationSpec::new(3).is_err());
        assert!(CorrelationSpec::with_values(vec![int(1), int(1)]).is_err());
        assert!(CorrelationSpec::with_scale(vec![int(0), int(1)], frac(1, 2)).is_ok());
        assert!(matches!(
            CorrelationSpec::with_scale(vec![int(0), int(1)], frac(1, 3)),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn completion_cases() {
        let e = |k: usize| {
            let mut v = DVector::<Complex64>::zeros(4);
            v[k] = Complex64::one();
            v
        };
        let rep = complete_unitary_columns(&e(0), &e(1));
        assert!(rep.orthonormal && rep.extendable);
        assert_eq!(rep.defect, 0.0);
        let rep = complete_unitary_columns(&e(2), &e(2));
        assert!(!rep.orthonormal && !rep.extendable);

        let obj = correlation_objects(&CorrelationSpec::new(8).unwrap()).unwrap();
        let rep = complete_unitary_columns(&obj.u0, &obj.u1);
        assert!(rep.extendable, "defect {}", rep.defect);
    }
}
