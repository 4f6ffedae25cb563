use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed;

/// Stratified assignment of records to `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl FoldPlan {
    /// Builds a plan from class labels alone.
    ///
    /// Each class is shuffled, the classes are concatenated in class order and
    /// position `p` of the concatenation goes to fold `p mod k`. Contiguous class
    /// blocks give per-fold class counts within one of `count / k`, and the
    /// round-robin over the whole sequence keeps fold sizes within one.
    pub fn from_labels(labels: &[usize], n_classes: usize, k: usize, seed_value: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::Size(format!("fold count must be at least 2, got {k}")));
        }
        if k > labels.len() {
            return Err(Error::Size(format!("{k} folds for {} records", labels.len())));
        }
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
        for (i, &c) in labels.iter().enumerate() {
            by_class[c].push(i);
        }
        let mut warnings = Vec::new();
        let mut assignment = vec![0; labels.len()];
        let mut position = 0usize;
        for (class, mut members) in by_class.into_iter().enumerate() {
            if !members.is_empty() && members.len() < k {
                warnings.push(format!(
                    "class {class} has {} records for {k} folds; spread best-effort",
                    members.len()
                ));
            }
            let mut rng = seed::rng(seed_value, seed::STREAM_FOLDS, class as u64);
            members.shuffle(&mut rng);
            for r in members {
                assignment[r] = position % k;
                position += 1;
            }
        }
        Ok(FoldPlan {
            k,
            assignment,
            seed: seed_value,
            warnings,
        })
    }

    pub fn n_records(&self) -> usize {
        self.assignment.len()
    }

    /// Held-out record indices of `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == fold).collect()
    }

    /// Training record indices for `fold`, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] != fold).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }

    /// `counts[fold][class]`.
    pub fn class_counts(&self, labels: &[usize], n_classes: usize) -> Vec<Vec<usize>> {
        let mut counts = vec![vec![0; n_classes]; self.k];
        for (&f, &c) in self.assignment.iter().zip(labels) {
            counts[f][c] += 1;
        }
        counts
    }
}

pub fn make_fold_plan<T: Scalar>(data: &Dataset<T>, k: usize, seed_value: u64) -> Result<FoldPlan> {
    FoldPlan::from_labels(data.labels(), data.n_classes(), k, seed_value)
}
