use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{RatMatrix, Rational};

/// Coefficients `e_0..e_N` of a monic polynomial `Σ e_k λ^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyCoeffs {
    coeffs: Vec<Rational>,
}

impl PolyCoeffs {
    /// Panics unless the leading coefficient is one.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(
            coeffs.last().is_some_and(One::is_one),
            "polynomial must be monic"
        );
        PolyCoeffs { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `λ^k`; zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }
}

impl fmt::Display for PolyCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let show_mag = !mag.is_one() || k == 0;
            if show_mag {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "λ")?,
                _ => write!(f, "λ^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Faddeev–LeVerrier recursion over the rationals:
/// `M_k = A·M_{k−1} + e_{N−k+1} I`, `e_{N−k} = −tr(A·M_k)/k`.
pub(super) fn faddeev_leverrier(a: &RatMatrix) -> PolyCoeffs {
    let n = a.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m = RatMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A·M_{k−1} + e_{n−k+1} I
        let mut next = matmul(a, &m);
        let shift = &coeffs[n - k + 1];
        for i in 0..n {
            next.entries[i * n + i] += shift;
        }
        let am = matmul(a, &next);
        let trace = (0..n).fold(Rational::zero(), |acc, i| acc + am.get(i, i));
        coeffs[n - k] = -trace / Rational::from_integer(k.into());
        m = next;
    }
    PolyCoeffs { coeffs }
}

fn matmul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.rows();
    let mut out = RatMatrix::zeros(n, b.cols());
    for i in 0..n {
        for l in 0..a.cols() {
            let x = a.get(i, l);
            if x.is_zero() {
                continue;
            }
            for j in 0..b.cols() {
                let y = b.get(l, j);
                if !y.is_zero() {
                    out.entries[i * b.cols() + j] += x * y;
                }
            }
        }
    }
    out
}
