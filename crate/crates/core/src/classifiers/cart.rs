use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;

use super::criteria::weighted_gini;
use super::tree::{class_counts, is_pure, make_leaf, Node, Tree};
use super::TreeConfig;
use crate::dataset::Column;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitRule<T> {
    /// `x <= threshold` goes left.
    Threshold(T),
    /// `code == c` goes left.
    Code(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split<T> {
    pub feature: usize,
    pub rule: SplitRule<T>,
    /// Weighted child Gini.
    pub score: T,
    /// Position of the candidate within its feature's scan order.
    order: usize,
}

impl<T: Scalar> Split<T> {
    /// Lower score wins; ties go to the lower feature, then the earlier candidate.
    fn beats(&self, other: &Split<T>) -> bool {
        match self.score.partial_cmp(&other.score).expect("finite gini") {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => (self.feature, self.order) < (other.feature, other.order),
        }
    }
}

/// Samples `mtry` candidate features per node.
pub(crate) struct FeatureSampler<'r, R> {
    pub rng: &'r mut R,
    pub mtry: usize,
}

/// Binary Gini tree. Continuous features split at midpoints between
/// consecutive distinct values; categorical features split one code vs rest.
pub fn train_cart<T: Scalar>(columns: &[Column<T>], labels: &[usize], n_classes: usize, config: &TreeConfig) -> Result<Tree<T>> {
    let rows: Vec<usize> = (0..labels.len()).collect();
    grow_tree::<T, rand_chacha::ChaCha8Rng>(columns, labels, rows, n_classes, config, None)
}

/// Best split over every feature for the full record set (the root split of
/// an unrestricted tree), or `None` when no split is admissible.
pub fn best_root_split<T: Scalar>(columns: &[Column<T>], labels: &[usize], n_classes: usize, config: &TreeConfig) -> Option<Split<T>> {
    let rows: Vec<usize> = (0..labels.len()).collect();
    let mut best: Option<Split<T>> = None;
    for f in 0..columns.len() {
        if let Some(c) = best_split_for(columns, labels, n_classes, config, &rows, f) {
            if best.as_ref().is_none_or(|b| c.beats(b)) {
                best = Some(c);
            }
        }
    }
    best
}

pub(crate) fn grow_tree<T: Scalar, R: Rng>(
    columns: &[Column<T>],
    labels: &[usize],
    rows: Vec<usize>,
    n_classes: usize,
    config: &TreeConfig,
    sampler: Option<FeatureSampler<'_, R>>,
) -> Result<Tree<T>> {
    if rows.is_empty() {
        return Err(Error::Size("CART needs at least one record".into()));
    }
    if let Some(c) = columns.iter().find(|c| c.len() != labels.len()) {
        return Err(Error::Shape {
            expected: labels.len(),
            actual: c.len(),
        });
    }
    let mut b = CartBuilder {
        columns,
        labels,
        n_classes,
        config,
        sampler,
        nodes: Vec::new(),
        order: (0..columns.len()).collect(),
    };
    b.grow(rows, 0);
    Ok(Tree {
        nodes: b.nodes,
        n_classes,
    })
}

struct CartBuilder<'a, 'r, T, R> {
    columns: &'a [Column<T>],
    labels: &'a [usize],
    n_classes: usize,
    config: &'a TreeConfig,
    sampler: Option<FeatureSampler<'r, R>>,
    nodes: Vec<Node<T>>,
    order: Vec<usize>,
}

impl<T: Scalar, R: Rng> CartBuilder<'_, '_, T, R> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let at = self.nodes.len();
        let counts = class_counts(self.labels, &rows, self.n_classes);
        self.nodes.push(make_leaf(&counts));
        let depth_capped = self.config.max_depth.is_some_and(|d| depth >= d);
        if is_pure(&counts) || depth_capped || rows.len() < 2 * self.config.min_samples_leaf {
            return at;
        }
        let Some(split) = self.choose_split(&rows) else {
            return at;
        };
        let column = &self.columns[split.feature];
        let goes_left = |r: usize| match split.rule {
            SplitRule::Threshold(t) => column.real(r) <= t,
            SplitRule::Code(c) => match column {
                Column::Categorical { codes, .. } => codes[r] == c,
                Column::Continuous(_) => unreachable!("code split on a continuous feature"),
            },
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| goes_left(r));
        let (nl, nr, n) = (left_rows.len(), right_rows.len(), rows.len());

        let mut other_codes: Vec<u32> = Vec::new();
        if let (SplitRule::Code(c), Column::Categorical { codes, .. }) = (split.rule, column) {
            other_codes = right_rows.iter().map(|&r| codes[r]).filter(|&x| x != c).collect();
            other_codes.sort_unstable();
            other_codes.dedup();
        }
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        self.nodes[at] = match split.rule {
            SplitRule::Threshold(threshold) => Node::Threshold {
                feature: split.feature,
                threshold,
                left,
                right,
                n,
            },
            SplitRule::Code(c) => {
                let mut branches = vec![(c, left)];
                branches.extend(other_codes.into_iter().map(|x| (x, right)));
                branches.sort_unstable_by_key(|b| b.0);
                Node::Branch {
                    feature: split.feature,
                    branches,
                    default: if nl >= nr { left } else { right },
                    n,
                }
            }
        };
        at
    }

    fn choose_split(&mut self, rows: &[usize]) -> Option<Split<T>> {
        let mut best: Option<Split<T>> = None;
        match self.sampler.as_mut() {
            None => {
                for f in 0..self.columns.len() {
                    consider(&mut best, best_split_for(self.columns, self.labels, self.n_classes, self.config, rows, f));
                }
            }
            Some(s) => {
                self.order.shuffle(s.rng);
                for (evaluated, &f) in self.order.iter().enumerate() {
                    if evaluated >= s.mtry && best.is_some() {
                        break;
                    }
                    consider(&mut best, best_split_for(self.columns, self.labels, self.n_classes, self.config, rows, f));
                }
            }
        }
        best
    }
}

fn consider<T: Scalar>(best: &mut Option<Split<T>>, cand: Option<Split<T>>) {
    if let Some(c) = cand {
        if best.as_ref().is_none_or(|b| c.beats(b)) {
            *best = Some(c);
        }
    }
}

/// Best split of `rows` on one feature, honoring `min_samples_leaf`.
pub(crate) fn best_split_for<T: Scalar>(
    columns: &[Column<T>],
    labels: &[usize],
    n_classes: usize,
    config: &TreeConfig,
    rows: &[usize],
    feature: usize,
) -> Option<Split<T>> {
    let min_leaf = config.min_samples_leaf.max(1);
    let n = rows.len();
    let total = class_counts(labels, rows, n_classes);
    let mut best: Option<Split<T>> = None;
    match &columns[feature] {
        Column::Continuous(values) => {
            let mut pairs: Vec<(T, usize)> = rows.iter().map(|&r| (values[r], labels[r])).collect();
            pairs.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values").then(a.1.cmp(&b.1)));
            let mut left = vec![0usize; n_classes];
            let mut right = total.clone();
            for i in 0..n - 1 {
                left[pairs[i].1] += 1;
                right[pairs[i].1] -= 1;
                let (a, b) = (pairs[i].0, pairs[i + 1].0);
                if a == b || i + 1 < min_leaf || n - i - 1 < min_leaf {
                    continue;
                }
                let mut mid = (a + b) / (T::one() + T::one());
                if mid >= b {
                    mid = a;
                }
                let cand = Split {
                    feature,
                    rule: SplitRule::Threshold(mid),
                    score: weighted_gini(&left, &right),
                    order: i,
                };
                if best.as_ref().is_none_or(|b| cand.beats(b)) {
                    best = Some(cand);
                }
            }
        }
        Column::Categorical { codes, table } => {
            let mut per_code = vec![vec![0usize; n_classes]; table.len()];
            for &r in rows {
                per_code[codes[r] as usize][labels[r]] += 1;
            }
            for (code, left) in per_code.iter().enumerate() {
                let nl: usize = left.iter().sum();
                if nl < min_leaf || n - nl < min_leaf {
                    continue;
                }
                let right: Vec<usize> = total.iter().zip(left).map(|(t, l)| t - l).collect();
                let cand = Split {
                    feature,
                    rule: SplitRule::Code(code as u32),
                    score: weighted_gini(left, &right),
                    order: code,
                };
                if best.as_ref().is_none_or(|b| cand.beats(b)) {
                    best = Some(cand);
                }
            }
        }
    }
    best
}
