use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::scalar::Scalar;

/// Column-major real matrix with its label array.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericMatrix<T> {
    pub columns: Vec<Vec<T>>,
    pub labels: Vec<usize>,
}

impl<T: Scalar> NumericMatrix<T> {
    pub fn n_records(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    /// Min-max normalized copy plus the scaler that produced it.
    pub fn normalized(&self) -> (NumericMatrix<T>, MinMaxScaler<T>) {
        let scaler = MinMaxScaler::fit(&self.columns);
        (
            NumericMatrix {
                columns: scaler.transform(&self.columns),
                labels: self.labels.clone(),
            },
            scaler,
        )
    }
}

/// Continuous values copied; categorical codes coerced to reals.
pub fn numeric_encode<T: Scalar>(data: &Dataset<T>) -> NumericMatrix<T> {
    let n = data.n_records();
    NumericMatrix {
        columns: data
            .columns()
            .iter()
            .map(|col| (0..n).map(|r| col.real(r)).collect())
            .collect(),
        labels: data.labels().to_vec(),
    }
}

/// Affine map of each feature onto `[0, 1]` over the fitted range.
/// Constant features map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler<T> {
    pub mins: Vec<T>,
    pub maxs: Vec<T>,
}

impl<T: Scalar> MinMaxScaler<T> {
    pub fn fit(columns: &[Vec<T>]) -> Self {
        let (mins, maxs) = columns
            .iter()
            .map(|c| {
                c.iter()
                    .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)))
            })
            .unzip();
        MinMaxScaler { mins, maxs }
    }

    pub fn scale(&self, feature: usize, x: T) -> T {
        let (lo, hi) = (self.mins[feature], self.maxs[feature]);
        if hi > lo {
            (x - lo) / (hi - lo)
        } else {
            T::zero()
        }
    }

    pub fn transform(&self, columns: &[Vec<T>]) -> Vec<Vec<T>> {
        columns
            .iter()
            .enumerate()
            .map(|(f, c)| c.iter().map(|&x| self.scale(f, x)).collect())
            .collect()
    }
}
