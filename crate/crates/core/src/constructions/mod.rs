//! Generators for the explicit objects: distance matrices, the degree-d
//! polynomial f with its flattenings, the subsidiary matrices S and S1, the
//! divisibility tensor and the correlation objects.
//!
//! Multi-indices passed to [`g_index`] are 1-based to match the usual
//! `[n] = {1..n}` convention; matrix rows and columns are 0-based.

mod correlation;

pub use correlation::{
    complete_unitary_columns, correlation_objects, CorrelationObjects, CorrelationSpec,
    UnitaryCompletion,
};

use std::collections::HashSet;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ratlinalg::{int, RatMatrix, Rational};
use crate::tensor::{checked_volume, DenseTensor};

/// Distinct values `a_1..a_n` defining `M_ij = (a_j − a_i)²`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdmSpec {
    values: Vec<Rational>,
}

impl EdmSpec {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("at least one value is required"));
        }
        let mut seen = HashSet::new();
        for v in &values {
            if !seen.insert(v.clone()) {
                return Err(Error::validation(format!("duplicate value {v}")));
            }
        }
        Ok(EdmSpec { values })
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| int(v)).collect())
    }

    /// `a_i = i` for `i = 1..n`.
    pub fn arithmetic(n: usize) -> Result<Self> {
        Self::new((1..=n as i64).map(int).collect())
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn edm(spec: &EdmSpec) -> RatMatrix {
    let a = &spec.values;
    RatMatrix::from_fn(a.len(), a.len(), |i, j| {
        let d = &a[j] - &a[i];
        &d * &d
    })
}

/// Parameters of `f = Σ c_{i1…id} x_{i1}⋯x_{id}` with
/// `c = (g(i_1..i_{d/2}) − g(i_{d/2+1}..i_d))²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FunctionFSpec {
    n: usize,
    d: usize,
}

impl FunctionFSpec {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::validation(format!(
                "need at least 2 variables, got {n}"
            )));
        }
        if d < 2 || !d.is_multiple_of(2) {
            return Err(Error::validation(format!(
                "degree must be even and ≥ 2, got {d}"
            )));
        }
        Ok(FunctionFSpec { n, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn half(&self) -> usize {
        self.d / 2
    }

    /// `n^{d/2}`, the number of values of g.
    pub fn g_range(&self) -> usize {
        self.n.pow(self.half() as u32)
    }

    /// Coefficient at 0-based multi-index `idx` (length d).
    pub fn coefficient(&self, idx: &[usize]) -> u64 {
        let h = self.half();
        let g = |part: &[usize]| {
            part.iter()
                .fold(0u64, |acc, &i| acc * self.n as u64 + i as u64)
        };
        let diff = g(&idx[..h]).abs_diff(g(&idx[h..]));
        diff * diff
    }
}

/// `g(i_1..i_{d/2}) = Σ (i_k − 1) n^{d/2−k} + 1` on 1-based indices.
pub fn g_index(i: &[usize], n: usize, d: usize) -> Result<usize> {
    if !d.is_multiple_of(2) || i.len() != d / 2 {
        return Err(Error::validation(format!(
            "expected {} indices for d = {d}, got {}",
            d / 2,
            i.len()
        )));
    }
    let mut acc = 0usize;
    for &ik in i {
        if ik < 1 || ik > n {
            return Err(Error::validation(format!("index {ik} outside [1, {n}]")));
        }
        acc = acc * n + (ik - 1);
    }
    Ok(acc + 1)
}

/// Inverse of [`g_index`]: the 1-based tuple with the given g value.
pub fn g_inverse(value: usize, n: usize, d: usize) -> Result<Vec<usize>> {
    let h = d / 2;
    let range = n.pow(h as u32);
    if !d.is_multiple_of(2) || value < 1 || value > range {
        return Err(Error::validation(format!(
            "g value {value} outside [1, {range}]"
        )));
    }
    let mut rest = value - 1;
    let mut out = vec![0; h];
    for slot in out.iter_mut().rev() {
        *slot = rest % n + 1;
        rest /= n;
    }
    Ok(out)
}

/// `M_k(f)`: rows are k-prefixes and columns (d−k)-suffixes, both in
/// ascending lexicographic (g) order.
pub fn flatten_mk(spec: &FunctionFSpec, k: usize) -> Result<RatMatrix> {
    let (n, d) = (spec.n, spec.d);
    if k > d {
        return Err(Error::validation(format!("level {k} outside 0..={d}")));
    }
    checked_volume(&vec![n; d])?;
    let rows = n.pow(k as u32);
    let cols = n.pow((d - k) as u32);
    let half = spec.g_range();
    Ok(RatMatrix::from_fn(rows, cols, |r, c| {
        // full lexicographic index splits at d/2 into the two g values
        let full = r * cols + c;
        let diff = (full / half).abs_diff(full % half) as i64;
        int(diff * diff)
    }))
}

fn check_subsidiary(spec: &FunctionFSpec) -> Result<()> {
    if spec.d < 4 {
        return Err(Error::validation("subsidiary matrices need d ≥ 4"));
    }
    Ok(())
}

/// `S1[b][j−1] = b·n + j` for `j = 1..n−1`, shape `n^{d/2−1} × (n−1)`.
pub fn subsidiary_s1(spec: &FunctionFSpec) -> Result<RatMatrix> {
    check_subsidiary(spec)?;
    let n = spec.n;
    let rows = n.pow(spec.half() as u32 - 1);
    Ok(RatMatrix::from_fn(rows, n - 1, |b, j| {
        int((b * n + j + 1) as i64)
    }))
}

/// `S = S1 ∘ S1`.
pub fn subsidiary_s(spec: &FunctionFSpec) -> Result<RatMatrix> {
    Ok(subsidiary_s1(spec)?.map(|v| v * v))
}

/// Column indices of `M_{d/2−k}` that carry the distance block: the middle
/// `k` indices are all 1 and the second half runs over multiples of `n^k`.
pub fn edm_block_columns(spec: &FunctionFSpec, k: usize) -> Result<Vec<usize>> {
    let h = spec.half();
    if k < 1 || k > h {
        return Err(Error::validation(format!(
            "block level {k} outside 1..={h}"
        )));
    }
    let step = spec.n.pow(k as u32);
    let count = spec.n.pow((h - k) as u32);
    Ok((0..count).map(|j| j * step).collect())
}

/// The `n^{d/2−k}`-square submatrix of `M_{d/2−k}` with entries
/// `((j − i)·n^k)²`.
pub fn edm_block_extract(spec: &FunctionFSpec, k: usize) -> Result<RatMatrix> {
    let cols = edm_block_columns(spec, k)?;
    let step = spec.n.pow(k as u32) as i64;
    let size = cols.len();
    Ok(RatMatrix::from_fn(size, size, |i, j| {
        let v = (j as i64 - i as i64) * step;
        int(v * v)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DivTensorSpec {
    base: usize,
    order: usize,
}

impl DivTensorSpec {
    pub fn new(base: usize, order: usize) -> Result<Self> {
        if base < 2 || order < 2 {
            return Err(Error::validation(format!(
                "divisibility tensor needs base ≥ 2 and order ≥ 2, got ({base}, {order})"
            )));
        }
        Ok(DivTensorSpec { base, order })
    }

    /// `N = 2^nbits` players' inputs, as in the communication setting.
    pub fn from_bits(nbits: u32, order: usize) -> Result<Self> {
        if nbits == 0 || nbits >= usize::BITS {
            return Err(Error::validation(format!("nbits {nbits} out of range")));
        }
        Self::new(1usize << nbits, order)
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![self.base; self.order]
    }

    /// 0-based multi-index predicate: `Σ (i_j + 1) ≡ 0 (mod base)`.
    pub fn is_one(&self, idx: &[usize]) -> bool {
        let sum: usize = idx.iter().map(|&i| i % self.base + 1).sum();
        sum.is_multiple_of(self.base)
    }
}

/// 0/1 tensor with a one wherever the 1-based index sum is divisible by the base.
pub fn divisibility_tensor(spec: &DivTensorSpec) -> Result<DenseTensor<Rational>> {
    checked_volume(&spec.dims())?;
    DenseTensor::from_fn(spec.dims(), |idx| {
        if spec.is_one(idx) {
            int(1)
        } else {
            Rational::zero()
        }
    })
}
