use std::collections::BTreeMap;

use super::criteria::info_gain;
use super::tree::{class_counts, is_pure, make_leaf, Node, Tree};
use super::TreeConfig;
use crate::dataset::DiscretizedView;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Multiway entropy tree over discrete codes. Each feature is used at most once
/// per root-to-leaf path; gain ties go to the lower feature index.
pub fn train_id3<T: Scalar>(
    view: &DiscretizedView,
    labels: &[usize],
    n_classes: usize,
    config: &TreeConfig,
) -> Result<Tree<T>> {
    if labels.is_empty() {
        return Err(Error::Size("ID3 needs at least one record".into()));
    }
    if view.n_features() > 0 && view.n_records() != labels.len() {
        return Err(Error::Shape {
            expected: labels.len(),
            actual: view.n_records(),
        });
    }
    let mut builder = Id3Builder::<T> {
        view,
        labels,
        n_classes,
        config,
        nodes: Vec::new(),
    };
    let rows: Vec<usize> = (0..labels.len()).collect();
    let mut used = vec![false; view.n_features()];
    builder.grow(rows, 0, &mut used)?;
    Ok(Tree {
        nodes: builder.nodes,
        n_classes,
    })
}

struct Id3Builder<'a, T> {
    view: &'a DiscretizedView,
    labels: &'a [usize],
    n_classes: usize,
    config: &'a TreeConfig,
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> Id3Builder<'_, T> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize, used: &mut [bool]) -> Result<usize> {
        let at = self.nodes.len();
        let counts = class_counts(self.labels, &rows, self.n_classes);
        self.nodes.push(make_leaf(&counts));
        let depth_capped = self.config.max_depth.is_some_and(|d| depth >= d);
        if is_pure(&counts) || depth_capped || rows.len() < 2 * self.config.min_samples_leaf {
            return Ok(at);
        }

        let mut best: Option<(usize, T, BTreeMap<u32, Vec<usize>>)> = None;
        for f in (0..self.view.n_features()).filter(|&f| !used[f]) {
            let codes = self.view.feature(f);
            let mut parts: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for &r in &rows {
                parts.entry(codes[r]).or_default().push(r);
            }
            if parts.len() < 2 || parts.values().any(|p| p.len() < self.config.min_samples_leaf) {
                continue;
            }
            let children: Vec<Vec<usize>> = parts
                .values()
                .map(|p| class_counts(self.labels, p, self.n_classes))
                .collect();
            let gain: T = info_gain(&counts, &children)?;
            if best.as_ref().is_none_or(|(_, g, _)| gain > *g) {
                best = Some((f, gain, parts));
            }
        }
        let Some((feature, _, parts)) = best else {
            return Ok(at);
        };

        used[feature] = true;
        let mut branches = Vec::with_capacity(parts.len());
        let mut heaviest = (0usize, 0usize);
        for (code, part) in parts {
            let size = part.len();
            let child = self.grow(part, depth + 1, used)?;
            if size > heaviest.0 {
                heaviest = (size, child);
            }
            branches.push((code, child));
        }
        used[feature] = false;
        self.nodes[at] = Node::Branch {
            feature,
            branches,
            default: heaviest.1,
            n: rows.len(),
        };
        Ok(at)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view(codes: Vec<Vec<u32>>) -> DiscretizedView {
        let cardinalities = codes.iter().map(|c| c.iter().max().map_or(1, |&m| m as usize + 1)).collect();
        DiscretizedView { codes, cardinalities }
    }

    fn training_error(tree: &Tree<f64>, v: &DiscretizedView, labels: &[usize]) -> usize {
        (0..labels.len()).filter(|&r| tree.predict(v, r) != labels[r]).count()
    }

    #[test]
    fn single_class_gives_single_leaf() {
        let v = view(vec![vec![0, 1, 2, 0]]);
        let t: Tree<f64> = train_id3(&v, &[1, 1, 1, 1], 2, &TreeConfig::default()).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict(&v, 2), 1);
    }

    #[test]
    fn label_copy_gives_depth_one_tree() {
        let labels = vec![0, 1, 2, 1, 0, 2];
        let v = view(vec![vec![1, 0, 1, 0, 1, 1], labels.iter().map(|&l| l as u32).collect()]);
        let t: Tree<f64> = train_id3(&v, &labels, 3, &TreeConfig::default()).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(training_error(&t, &v, &labels), 0);
        assert!(matches!(t.nodes[0], Node::Branch { feature: 1, .. }));
    }

    #[test]
    fn xor_needs_zero_gain_split() {
        let labels = vec![0, 1, 1, 0];
        let v = view(vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]]);
        let t: Tree<f64> = train_id3(&v, &labels, 2, &TreeConfig::default()).unwrap();
        assert_eq!(training_error(&t, &v, &labels), 0);
        assert_eq!(t.depth(), 2);
    }

    #[test]
    fn max_depth_respected() {
        let labels = vec![0, 1, 1, 0];
        let v = view(vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]]);
        let cfg = TreeConfig {
            max_depth: Some(1),
            ..TreeConfig::default()
        };
        let t: Tree<f64> = train_id3(&v, &labels, 2, &cfg).unwrap();
        assert!(t.depth() <= 1);
    }

    #[test]
    fn empty_is_size_error() {
        let v = view(vec![vec![]]);
        assert!(matches!(train_id3::<f64>(&v, &[], 2, &TreeConfig::default()), Err(Error::Size(_))));
    }

    /// Best training error over every tree of depth <= 2 (root feature, then
    /// any feature per root branch, majority leaves).
    fn best_depth2_error(v: &DiscretizedView, labels: &[usize], n_classes: usize) -> usize {
        let n = labels.len();
        let all: Vec<usize> = (0..n).collect();
        let leaf_err = |rows: &[usize]| {
            let c = class_counts(labels, rows, n_classes);
            rows.len() - c.iter().max().copied().unwrap_or(0)
        };
        let split_rows = |rows: &[usize], f: usize| {
            let mut m: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for &r in rows {
                m.entry(v.codes[f][r]).or_default().push(r);
            }
            m
        };
        let mut best = leaf_err(&all);
        for root in 0..v.n_features() {
            let mut total = 0;
            for part in split_rows(&all, root).values() {
                let mut b = leaf_err(part);
                for g in 0..v.n_features() {
                    let e: usize = split_rows(part, g).values().map(|p| leaf_err(p)).sum();
                    b = b.min(e);
                }
                total += b;
            }
            best = best.min(total);
        }
        best
    }

    #[test]
    fn never_worse_than_best_depth2_tree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let codes: Vec<Vec<u32>> = (0..4).map(|_| (0..20).map(|_| rng.gen_range(0..3)).collect()).collect();
            let labels: Vec<usize> = (0..20).map(|r| ((codes[0][r] + codes[2][r]) % 2) as usize ^ usize::from(rng.gen_bool(0.1))).collect();
            let v = DiscretizedView {
                codes,
                cardinalities: vec![3; 4],
            };
            let t: Tree<f64> = train_id3(&v, &labels, 2, &TreeConfig::default()).unwrap();
            assert!(training_error(&t, &v, &labels) <= best_depth2_error(&v, &labels, 2));
        }
    }
}
