use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::NumericMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sample Pearson coefficient. `None` when either input has zero variance.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<Option<T>> {
    if x.len() != y.len() {
        return Err(Error::Shape {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Size(format!("pearson needs at least 2 points, got {}", x.len())));
    }
    let n = T::from_count(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Ok(None);
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(Some(r.max(-T::one()).min(T::one())))
}

/// Symmetric matrix of pairwise Pearson coefficients; `None` marks pairs
/// involving a constant feature (including its diagonal cell).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix<T> {
    n: usize,
    values: Vec<Option<T>>,
}

impl<T: Scalar> CorrelationMatrix<T> {
    /// Builds from the strict upper triangle in row order; `diag[i]` says
    /// whether feature `i` has nonzero variance.
    pub fn from_upper(n: usize, upper: &[Option<T>], diag: &[bool]) -> Result<Self> {
        if upper.len() != n * n.saturating_sub(1) / 2 || diag.len() != n {
            return Err(Error::Shape {
                expected: n * n.saturating_sub(1) / 2,
                actual: upper.len(),
            });
        }
        let mut values = vec![None; n * n];
        let mut it = upper.iter();
        for i in 0..n {
            values[i * n + i] = diag[i].then(T::one);
            for j in (i + 1)..n {
                let v = *it.next().expect("length checked");
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Ok(CorrelationMatrix { n, values })
    }

    pub fn n_features(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        self.values[i * self.n + j]
    }

    /// `|r|`, with undefined cells read as 0.
    pub fn abs(&self, i: usize, j: usize) -> T {
        self.get(i, j).map_or(T::zero(), T::abs)
    }
}

pub fn correlation_matrix<T: Scalar>(data: &NumericMatrix<T>) -> Result<CorrelationMatrix<T>> {
    if data.n_records() < 2 {
        return Err(Error::Size(format!(
            "correlation needs at least 2 records, got {}",
            data.n_records()
        )));
    }
    let m = data.n_features();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| ((i + 1)..m).map(move |j| (i, j))).collect();
    let upper = pairs
        .par_iter()
        .map(|&(i, j)| pearson(&data.columns[i], &data.columns[j]))
        .collect::<Result<Vec<_>>>()?;
    let diag = data
        .columns
        .par_iter()
        .map(|c| pearson(c, c).map(|r| r.is_some()))
        .collect::<Result<Vec<_>>>()?;
    CorrelationMatrix::from_upper(m, &upper, &diag)
}
