use serde::{Deserialize, Serialize};

use super::{Column, Dataset, FeatureMeta, UNSEEN_CODE};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BinStrategy {
    #[default]
    #[serde(alias = "width")]
    EqualWidth,
    #[serde(alias = "freq")]
    EqualFrequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BinningSpec {
    pub n_bins: usize,
    pub strategy: BinStrategy,
}

impl Default for BinningSpec {
    fn default() -> Self {
        BinningSpec {
            n_bins: 10,
            strategy: BinStrategy::EqualWidth,
        }
    }
}

/// Interior bin edges per continuous feature. A value `x` falls in bin
/// `#{edges < x}`, so out-of-range values clamp to the extreme bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedBinning<T> {
    pub spec: BinningSpec,
    pub features: Vec<FeatureMeta>,
    /// `None` for categorical features.
    pub edges: Vec<Option<Vec<T>>>,
    /// Continuous features that collapsed to a single bin.
    pub degenerate: Vec<usize>,
}

impl<T: Scalar> FittedBinning<T> {
    pub fn bin(&self, feature: usize, x: T) -> u32 {
        match &self.edges[feature] {
            Some(edges) => edges.partition_point(|&e| e < x) as u32,
            None => panic!("feature {feature} is categorical"),
        }
    }

    pub fn n_effective_bins(&self, feature: usize) -> Option<usize> {
        self.edges[feature].as_ref().map(|e| e.len() + 1)
    }
}

/// Every feature as a small-integer code array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscretizedView {
    pub codes: Vec<Vec<u32>>,
    /// Number of distinct codes a feature can take (codes are `< cardinality`,
    /// except [`UNSEEN_CODE`] on recoded categorical data).
    pub cardinalities: Vec<usize>,
}

impl DiscretizedView {
    pub fn n_features(&self) -> usize {
        self.codes.len()
    }

    pub fn n_records(&self) -> usize {
        self.codes.first().map_or(0, Vec::len)
    }

    pub fn feature(&self, f: usize) -> &[u32] {
        &self.codes[f]
    }
}

pub fn fit_binning<T: Scalar>(data: &Dataset<T>, spec: BinningSpec) -> Result<FittedBinning<T>> {
    if spec.n_bins < 2 {
        return Err(Error::Config(format!("n_bins must be at least 2, got {}", spec.n_bins)));
    }
    let mut edges = Vec::with_capacity(data.n_features());
    let mut degenerate = Vec::new();
    for (f, col) in data.columns().iter().enumerate() {
        match col {
            Column::Categorical { .. } => edges.push(None),
            Column::Continuous(values) => {
                let e = match spec.strategy {
                    BinStrategy::EqualWidth => equal_width_edges(values, spec.n_bins),
                    BinStrategy::EqualFrequency => equal_frequency_edges(values, spec.n_bins),
                };
                if e.is_empty() {
                    degenerate.push(f);
                }
                edges.push(Some(e));
            }
        }
    }
    Ok(FittedBinning {
        spec,
        features: data.schema().features().to_vec(),
        edges,
        degenerate,
    })
}

fn min_max<T: Scalar>(values: &[T]) -> Option<(T, T)> {
    let first = *values.first()?;
    Some(values.iter().fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v))))
}

fn equal_width_edges<T: Scalar>(values: &[T], n_bins: usize) -> Vec<T> {
    let Some((lo, hi)) = min_max(values) else {
        return Vec::new();
    };
    if lo == hi {
        return Vec::new();
    }
    let width = (hi - lo) / T::from_count(n_bins);
    let raw = (1..n_bins).map(|i| lo + width * T::from_count(i));
    strictly_increasing_below(raw, hi)
}

/// Edge `i` is the lower empirical `i / n_bins` quantile: the smallest sample
/// value whose empirical CDF reaches `i / n_bins`.
fn equal_frequency_edges<T: Scalar>(values: &[T], n_bins: usize) -> Vec<T> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len();
    let hi = sorted[n - 1];
    let raw = (1..n_bins).map(|i| sorted[(i * n).div_ceil(n_bins) - 1]);
    strictly_increasing_below(raw, hi)
}

fn strictly_increasing_below<T: Scalar>(raw: impl Iterator<Item = T>, hi: T) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for e in raw {
        if e < hi && out.last().is_none_or(|&last| e > last) {
            out.push(e);
        }
    }
    out
}

pub fn apply_binning<T: Scalar>(data: &Dataset<T>, fitted: &FittedBinning<T>) -> Result<DiscretizedView> {
    apply_binning_columns(data.columns(), data.schema().features(), fitted)
}

pub fn apply_binning_columns<T: Scalar>(
    columns: &[Column<T>],
    features: &[FeatureMeta],
    fitted: &FittedBinning<T>,
) -> Result<DiscretizedView> {
    if features.len() != fitted.features.len()
        || features
            .iter()
            .zip(&fitted.features)
            .any(|(a, b)| a.name != b.name || a.kind != b.kind)
    {
        return Err(Error::Schema("binning was fitted on a different schema".into()));
    }
    let mut codes = Vec::with_capacity(columns.len());
    let mut cardinalities = Vec::with_capacity(columns.len());
    for (f, col) in columns.iter().enumerate() {
        match (col, &fitted.edges[f]) {
            (Column::Categorical { codes: c, table }, None) => {
                codes.push(c.clone());
                cardinalities.push(table.len());
            }
            (Column::Continuous(values), Some(edges)) => {
                codes.push(values.iter().map(|&x| edges.partition_point(|&e| e < x) as u32).collect());
                cardinalities.push(edges.len() + 1);
            }
            _ => {
                return Err(Error::Schema(format!(
                    "feature {} kind differs from fitted {:?}",
                    f, fitted.features[f].kind
                )))
            }
        }
    }
    debug_assert!(codes
        .iter()
        .zip(&cardinalities)
        .all(|(c, &k)| c.iter().all(|&x| x == UNSEEN_CODE || (x as usize) < k.max(1))));
    Ok(DiscretizedView { codes, cardinalities })
}
