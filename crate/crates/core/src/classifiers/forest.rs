use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cart::{grow_tree, FeatureSampler};
use super::tree::{Features, Tree};
use super::TreeConfig;
use crate::dataset::Column;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Defaults to `floor(sqrt(n_features))`.
    pub n_features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            n_features_per_split: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel<T> {
    pub trees: Vec<Tree<T>>,
    /// Seed each tree's bootstrap and feature draws came from.
    pub tree_seeds: Vec<u64>,
    pub n_features_per_split: usize,
    pub bootstrap: bool,
    pub n_classes: usize,
}

fn bootstrap_rows<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

pub fn train_forest<T: Scalar>(
    columns: &[Column<T>],
    labels: &[usize],
    n_classes: usize,
    tree: &TreeConfig,
    config: &ForestConfig,
) -> Result<ForestModel<T>> {
    if config.n_trees == 0 {
        return Err(Error::Config("n_trees must be at least 1".into()));
    }
    if labels.is_empty() {
        return Err(Error::Size("forest needs at least one record".into()));
    }
    let m = columns.len();
    let mtry = config
        .n_features_per_split
        .unwrap_or_else(|| ((m as f64).sqrt().floor() as usize).max(1))
        .clamp(1, m.max(1));
    let n = labels.len();
    let tree_seeds: Vec<u64> = (0..config.n_trees as u64)
        .map(|t| seed::derive(config.seed, seed::STREAM_FOREST, t))
        .collect();
    let trees = tree_seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let rows = if config.bootstrap {
                bootstrap_rows(&mut rng, n)
            } else {
                (0..n).collect()
            };
            let sampler = (mtry < m).then_some(FeatureSampler { rng: &mut rng, mtry });
            grow_tree(columns, labels, rows, n_classes, tree, sampler)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestModel {
        trees,
        tree_seeds,
        n_features_per_split: mtry,
        bootstrap: config.bootstrap,
        n_classes,
    })
}

impl<T: Scalar> ForestModel<T> {
    /// Vote fractions per class.
    pub fn scores<F: Features<T> + ?Sized>(&self, data: &F, row: usize) -> Vec<T> {
        let mut votes = vec![0usize; self.n_classes];
        for t in &self.trees {
            votes[t.predict(data, row)] += 1;
        }
        let total = T::from_count(self.trees.len());
        votes.into_iter().map(|v| T::from_count(v) / total).collect()
    }

    /// Majority vote, ties to the lower class index.
    pub fn predict<F: Features<T> + ?Sized>(&self, data: &F, row: usize) -> (usize, Vec<T>) {
        let scores = self.scores(data, row);
        let mut best = 0;
        for (k, s) in scores.iter().enumerate() {
            if *s > scores[best] {
                best = k;
            }
        }
        (best, scores)
    }

    /// Out-of-bag error on the training data the forest was grown on.
    /// Records never left out of any bootstrap are skipped.
    pub fn oob_error(&self, columns: &[Column<T>], labels: &[usize]) -> Option<f64> {
        if !self.bootstrap {
            return None;
        }
        let n = labels.len();
        let mut votes = vec![vec![0usize; self.n_classes]; n];
        for (tree, &s) in self.trees.iter().zip(&self.tree_seeds) {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut in_bag = vec![false; n];
            for r in bootstrap_rows(&mut rng, n) {
                in_bag[r] = true;
            }
            for r in (0..n).filter(|&r| !in_bag[r]) {
                votes[r][tree.predict(columns, r)] += 1;
            }
        }
        let (mut wrong, mut counted) = (0usize, 0usize);
        for (r, v) in votes.iter().enumerate() {
            if v.iter().all(|&c| c == 0) {
                continue;
            }
            let mut best = 0;
            for k in 0..v.len() {
                if v[k] > v[best] {
                    best = k;
                }
            }
            counted += 1;
            wrong += usize::from(best != labels[r]);
        }
        (counted > 0).then(|| wrong as f64 / counted as f64)
    }
}
