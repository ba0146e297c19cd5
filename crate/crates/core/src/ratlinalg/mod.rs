//! Exact matrix algebra over arbitrary-precision rationals.
//!
//! Every rank claim in the workbench goes through this module. Values are
//! kept in canonical form (`num_rational` reduces after every operation) and
//! elimination is fraction-free, so results are reproducible bit for bit.

mod charpoly;
mod elim;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use charpoly::PolyCoeffs;

/// Canonical arbitrary-precision rational (denominator > 0, reduced).
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued [`Rational`].
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Shorthand for `num / den`, reduced. Panics if `den == 0`.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dimension(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(RatMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from nested integer rows. Panics on ragged input.
    pub fn from_int_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        assert!(r > 0 && c > 0, "empty matrix");
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&v| int(v)));
        }
        RatMatrix {
            rows: r,
            cols: c,
            entries,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        RatMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Rational::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        self.map(|v| v * k)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|v| !v.is_negative())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..=i).all(|j| *self.get(i, j) == -self.get(j, i).clone()))
    }

    pub fn sum(&self) -> Rational {
        self.entries.iter().fold(Rational::zero(), |acc, v| acc + v)
    }

    /// Entries converted to `f64`, row-major.
    pub fn to_f64_entries(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|v| v.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn to_dmatrix(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.to_f64_entries())
    }

    /// Exact rank over the rationals, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        elim::rank(self)
    }

    /// Exact determinant. Fails on non-square input.
    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::dimension(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(elim::det(self))
    }

    /// Characteristic polynomial `det(λI − M)`, exact.
    pub fn char_poly(&self) -> Result<PolyCoeffs> {
        if !self.is_square() {
            return Err(Error::dimension(format!(
                "characteristic polynomial of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(charpoly::faddeev_leverrier(self))
    }

    /// Entrywise product `[A ∘ B]_ij = A_ij B_ij`.
    pub fn hadamard(&self, other: &RatMatrix) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::dimension(format!(
                "hadamard of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Kronecker product, shape `(rA·rB) × (cA·cB)`.
    pub fn kronecker(&self, other: &RatMatrix) -> Self {
        let (br, bc) = other.shape();
        Self::from_fn(self.rows * br, self.cols * bc, |i, j| {
            self.get(i / br, j / bc) * other.get(i % br, j % bc)
        })
    }

    /// Rows and columns selected in the given order.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Result<Self> {
        if row_idx.is_empty() || col_idx.is_empty() {
            return Err(Error::validation("submatrix index lists must be nonempty"));
        }
        if let Some(&index) = row_idx.iter().find(|&&i| i >= self.rows) {
            return Err(Error::Index {
                index,
                len: self.rows,
            });
        }
        if let Some(&index) = col_idx.iter().find(|&&j| j >= self.cols) {
            return Err(Error::Index {
                index,
                len: self.cols,
            });
        }
        Ok(Self::from_fn(row_idx.len(), col_idx.len(), |i, j| {
            self.get(row_idx[i], col_idx[j]).clone()
        }))
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
