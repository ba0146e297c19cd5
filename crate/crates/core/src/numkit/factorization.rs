use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use nalgebra::DMatrix;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ratlinalg::Rational;
use crate::tensor::{checked_volume, DenseTensor};

/// Entry type of a factorization: `f64` for numeric witnesses, [`Rational`]
/// for exact ones.
pub trait Scalar:
    Clone
    + PartialOrd
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + fmt::Debug
{
    fn to_f64(&self) -> f64;

    fn is_exact() -> bool;
}

impl Scalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for Rational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        true
    }
}

/// Sum of `r` rank-one terms, each a d-tuple of vectors (one per mode).
#[derive(Clone, Debug, PartialEq)]
pub struct NonnegFactorization<T = f64> {
    pub dims: Vec<usize>,
    pub terms: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> NonnegFactorization<T> {
    /// Checks that every term has one vector per mode of the right length.
    /// Nonnegativity is *not* enforced here; see [`verify_nonneg_factorization`].
    pub fn new(dims: Vec<usize>, terms: Vec<Vec<Vec<T>>>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::validation("factorization order must be at least 2"));
        }
        for (i, term) in terms.iter().enumerate() {
            if term.len() != dims.len() {
                return Err(Error::dimension(format!(
                    "term {i} has {} factors, expected {}",
                    term.len(),
                    dims.len()
                )));
            }
            for (mode, (v, &d)) in term.iter().zip(&dims).enumerate() {
                if v.len() != d {
                    return Err(Error::dimension(format!(
                        "term {i} mode {mode} has length {}, expected {d}",
                        v.len()
                    )));
                }
            }
        }
        Ok(NonnegFactorization { dims, terms })
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Number of rank-one terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        let zero = T::zero();
        self.terms.iter().flatten().flatten().all(|v| *v >= zero)
    }

    /// Dense sum of all terms.
    pub fn reconstruct(&self) -> Result<DenseTensor<T>> {
        checked_volume(&self.dims)?;
        DenseTensor::from_fn(self.dims.clone(), |idx| {
            let mut acc = T::zero();
            for term in &self.terms {
                let mut prod = term[0][idx[0]].clone();
                for mode in 1..idx.len() {
                    if prod.is_zero() {
                        break;
                    }
                    prod = prod * term[mode][idx[mode]].clone();
                }
                if !prod.is_zero() {
                    acc = acc + prod;
                }
            }
            acc
        })
    }
}

impl NonnegFactorization<f64> {
    /// Matrix factorization `W·H` as terms `(W[:,t], H[t,:])`.
    pub fn from_matrices(w: &DMatrix<f64>, h: &DMatrix<f64>) -> Self {
        let terms = (0..w.ncols())
            .map(|t| {
                vec![
                    w.column(t).iter().copied().collect(),
                    h.row(t).iter().copied().collect(),
                ]
            })
            .collect();
        NonnegFactorization {
            dims: vec![w.nrows(), h.ncols()],
            terms,
        }
    }
}

/// `{"order", "dims", "terms"}` with decimal floats.
impl Serialize for NonnegFactorization<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("NonnegFactorization", 3)?;
        st.serialize_field("order", &self.order())?;
        st.serialize_field("dims", &self.dims)?;
        st.serialize_field("terms", &self.terms)?;
        st.end()
    }
}

/// Reason a factorization check failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckFailure {
    Negativity,
    Tolerance,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckFailure::Negativity => "negativity",
            CheckFailure::Tolerance => "tolerance",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationCheck {
    #[serde(rename = "maxAbsError")]
    pub max_abs_error: f64,
    /// Reconstruction equals the target exactly (only meaningful for rationals).
    pub exact: bool,
    pub pass: bool,
    pub failure: Option<CheckFailure>,
}

/// Reconstructs `f` and compares it entrywise with `target`.
///
/// Passes iff every factor entry is nonnegative and the maximum absolute
/// deviation is at most `tol`. With `tol == 0` the comparison is exact.
pub fn verify_nonneg_factorization<T: Scalar>(
    target: &DenseTensor<T>,
    f: &NonnegFactorization<T>,
    tol: f64,
) -> Result<FactorizationCheck> {
    if target.dims() != f.dims.as_slice() {
        return Err(Error::dimension(format!(
            "target dims {:?} vs factorization dims {:?}",
            target.dims(),
            f.dims
        )));
    }
    let recon = f.reconstruct()?;
    let mut max_err = 0.0f64;
    let mut exact = true;
    for (a, b) in target.data().iter().zip(recon.data()) {
        let diff = if a >= b {
            a.clone() - b.clone()
        } else {
            b.clone() - a.clone()
        };
        if !diff.is_zero() {
            exact = false;
            max_err = max_err.max(diff.to_f64());
        }
    }
    let failure = if !f.is_nonnegative() {
        Some(CheckFailure::Negativity)
    } else if !(exact || (tol > 0.0 && max_err <= tol)) {
        Some(CheckFailure::Tolerance)
    } else {
        None
    };
    Ok(FactorizationCheck {
        max_abs_error: max_err,
        exact,
        pass: failure.is_none(),
        failure,
    })
}
