//! Dense order-d arrays, row-major (last index fastest).

use crate::error::{Error, Result};
use crate::ratlinalg::{RatMatrix, Rational};

/// Largest number of entries any dense object may hold.
pub const MAX_DENSE_ENTRIES: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<T> {
    dims: Vec<usize>,
    data: Vec<T>,
}

/// Product of `dims`, or a capacity error if it exceeds [`MAX_DENSE_ENTRIES`].
pub fn checked_volume(dims: &[usize]) -> Result<usize> {
    let mut total: usize = 1;
    for &d in dims {
        total = total
            .checked_mul(d)
            .filter(|&t| t <= MAX_DENSE_ENTRIES)
            .ok_or_else(|| {
                Error::capacity(format!(
                    "dims {dims:?} exceed the dense limit of {MAX_DENSE_ENTRIES} entries"
                ))
            })?;
    }
    Ok(total)
}

impl<T> DenseTensor<T> {
    pub fn new(dims: Vec<usize>, data: Vec<T>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::dimension(format!("invalid tensor dims {dims:?}")));
        }
        let volume = checked_volume(&dims)?;
        if volume != data.len() {
            return Err(Error::dimension(format!(
                "dims {dims:?} need {volume} entries, got {}",
                data.len()
            )));
        }
        Ok(DenseTensor { dims, data })
    }

    /// Fills every multi-index in row-major order.
    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::dimension(format!("invalid tensor dims {dims:?}")));
        }
        let volume = checked_volume(&dims)?;
        let mut data = Vec::with_capacity(volume);
        let mut idx = vec![0; dims.len()];
        for _ in 0..volume {
            data.push(f(&idx));
            advance(&mut idx, &dims);
        }
        Ok(DenseTensor { dims, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        idx.iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        &self.data[self.offset(idx)]
    }

    /// Multi-index of a flat offset.
    pub fn index_of(&self, mut offset: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for (slot, &d) in idx.iter_mut().zip(&self.dims).rev() {
            *slot = offset % d;
            offset /= d;
        }
        idx
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> DenseTensor<U> {
        DenseTensor {
            dims: self.dims.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Iterates `(multi-index, value)` pairs in row-major order.
    pub fn indexed(&self) -> impl Iterator<Item = (Vec<usize>, &T)> + '_ {
        self.data
            .iter()
            .enumerate()
            .map(|(k, v)| (self.index_of(k), v))
    }
}

impl<T: Clone> DenseTensor<T> {
    /// Mode-`mode` unfolding: rows indexed by that mode, columns by the
    /// remaining modes in their natural (row-major) order.
    pub fn unfold(&self, mode: usize) -> (usize, usize, Vec<T>) {
        let rows = self.dims[mode];
        let cols = self.data.len() / rows;
        let mut out = Vec::with_capacity(self.data.len());
        let mut rest = self.dims.clone();
        rest.remove(mode);
        for r in 0..rows {
            let mut idx_rest = vec![0; rest.len()];
            for _ in 0..cols {
                let mut idx = idx_rest.clone();
                idx.insert(mode, r);
                out.push(self.get(&idx).clone());
                advance(&mut idx_rest, &rest);
            }
        }
        (rows, cols, out)
    }

    /// Matrix with the first `k` modes as rows and the rest as columns.
    pub fn split_at(&self, k: usize) -> (usize, usize, Vec<T>) {
        let rows: usize = self.dims[..k].iter().product();
        let cols = self.data.len() / rows;
        (rows, cols, self.data.clone())
    }
}

impl DenseTensor<Rational> {
    pub fn unfold_rat(&self, mode: usize) -> RatMatrix {
        let (r, c, data) = self.unfold(mode);
        RatMatrix::new(r, c, data).expect("unfolding shape is consistent")
    }

    pub fn to_f64(&self) -> DenseTensor<f64> {
        use num_traits::ToPrimitive;
        self.map(|v| v.to_f64().unwrap_or(f64::NAN))
    }

    pub fn from_matrix(m: &RatMatrix) -> Self {
        DenseTensor {
            dims: vec![m.rows(), m.cols()],
            data: m.entries().to_vec(),
        }
    }
}

/// Row-major odometer increment.
pub(crate) fn advance(idx: &mut [usize], dims: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dims[k] {
            return;
        }
        idx[k] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_round_trip() {
        let t = DenseTensor::from_fn(vec![2, 3, 4], |i| i[0] * 100 + i[1] * 10 + i[2]).unwrap();
        for (k, v) in t.data().iter().enumerate() {
            let idx = t.index_of(k);
            assert_eq!(t.offset(&idx), k);
            assert_eq!(*v, idx[0] * 100 + idx[1] * 10 + idx[2]);
        }
    }

    #[test]
    fn unfolding_mode_one() {
        let t = DenseTensor::from_fn(vec![2, 3, 2], |i| i[0] * 100 + i[1] * 10 + i[2]).unwrap();
        let (r, c, data) = t.unfold(1);
        assert_eq!((r, c), (3, 4));
        assert_eq!(&data[..4], &[0, 1, 100, 101]);
        assert_eq!(&data[4..8], &[10, 11, 110, 111]);
    }

    #[test]
    fn capacity_guard() {
        assert!(matches!(
            DenseTensor::from_fn(vec![1 << 11, 1 << 10], |_| 0u8),
            Err(Error::Capacity(_))
        ));
        assert!(DenseTensor::new(vec![2, 2], vec![0u8; 3]).is_err());
    }
}
