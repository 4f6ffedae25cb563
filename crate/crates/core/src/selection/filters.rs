use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::correlation::CorrelationMatrix;
use super::info::{mutual_information, DiscreteDistribution};
use crate::dataset::DiscretizedView;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundancyDrop<T> {
    pub feature: usize,
    /// Earlier kept feature whose correlation exceeded the threshold.
    pub cause: usize,
    pub abs_r: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundancyOutcome<T> {
    pub kept: Vec<usize>,
    pub dropped: Vec<RedundancyDrop<T>>,
}

/// Greedy sweep in ascending feature order: feature `j` is dropped when some
/// already-kept `i < j` has `|r[i][j]| > threshold`. The first such `i` is
/// recorded as the cause. Undefined correlations count as 0.
pub fn redundancy_filter<T: Scalar>(cm: &CorrelationMatrix<T>, threshold: T) -> RedundancyOutcome<T> {
    let mut kept: Vec<usize> = Vec::new();
    let mut dropped = Vec::new();
    for j in 0..cm.n_features() {
        match kept.iter().copied().find(|&i| cm.abs(i, j) > threshold) {
            Some(cause) => dropped.push(RedundancyDrop {
                feature: j,
                cause,
                abs_r: cm.abs(cause, j),
            }),
            None => kept.push(j),
        }
    }
    RedundancyOutcome { kept, dropped }
}

fn label_codes(labels: &[usize]) -> Vec<u32> {
    labels.iter().map(|&c| c as u32).collect()
}

/// MI between the discretized feature and the class label.
pub fn mi_with_label<T: Scalar>(view: &DiscretizedView, feature: usize, labels: &[usize], n_classes: usize) -> Result<T> {
    if feature >= view.n_features() {
        return Err(Error::Schema(format!("feature index {feature} out of range")));
    }
    let d = DiscreteDistribution::from_codes(
        view.feature(feature),
        view.cardinalities[feature],
        &label_codes(labels),
        n_classes,
    )?;
    mutual_information(&d)
}

/// MI between two discretized features.
pub fn mi_between<T: Scalar>(view: &DiscretizedView, a: usize, b: usize) -> Result<T> {
    let d = DiscreteDistribution::from_codes(view.feature(a), view.cardinalities[a], view.feature(b), view.cardinalities[b])?;
    mutual_information(&d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceOutcome<T> {
    pub kept: Vec<usize>,
    /// `(feature, MI)` for every dropped candidate.
    pub dropped: Vec<(usize, T)>,
    /// `(feature, MI)` for every candidate, in candidate order.
    pub mi: Vec<(usize, T)>,
}

/// Keeps a candidate iff `MI(feature; label) >= threshold`.
pub fn relevance_filter<T: Scalar>(
    view: &DiscretizedView,
    candidates: &[usize],
    labels: &[usize],
    n_classes: usize,
    threshold: T,
) -> Result<RelevanceOutcome<T>> {
    let mi = candidates
        .par_iter()
        .map(|&f| mi_with_label::<T>(view, f, labels, n_classes).map(|v| (f, v)))
        .collect::<Result<Vec<_>>>()?;
    let (kept, dropped): (Vec<_>, Vec<_>) = mi.iter().partition(|(_, v)| *v >= threshold);
    Ok(RelevanceOutcome {
        kept: kept.into_iter().map(|(f, _)| f).collect(),
        dropped,
        mi,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankPair<T> {
    /// Candidates by MI with the label, descending (ties: lower index first).
    pub ranking: Vec<(usize, T)>,
    pub top: (usize, T),
    /// Candidate sharing the least information with `top`, and that MI.
    pub partner: (usize, T),
}

pub fn mi_rank_pair<T: Scalar>(
    view: &DiscretizedView,
    candidates: &[usize],
    labels: &[usize],
    n_classes: usize,
) -> Result<RankPair<T>> {
    if candidates.len() < 2 {
        return Err(Error::Size(format!(
            "ranking needs at least 2 candidates, got {}",
            candidates.len()
        )));
    }
    let mut ranking = candidates
        .par_iter()
        .map(|&f| mi_with_label::<T>(view, f, labels, n_classes).map(|v| (f, v)))
        .collect::<Result<Vec<_>>>()?;
    ranking.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite MI").then(a.0.cmp(&b.0)));
    let top = ranking[0];
    let mut others = ranking[1..]
        .par_iter()
        .map(|&(f, _)| mi_between::<T>(view, top.0, f).map(|v| (f, v)))
        .collect::<Result<Vec<_>>>()?;
    others.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite MI").then(a.0.cmp(&b.0)));
    Ok(RankPair {
        ranking,
        top,
        partner: others[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm_from(n: usize, entries: &[((usize, usize), f64)]) -> CorrelationMatrix<f64> {
        let mut upper = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = entries.iter().find(|(p, _)| *p == (i, j)).map_or(0.0, |e| e.1);
                upper.push(Some(v));
            }
        }
        CorrelationMatrix::from_upper(n, &upper, &vec![true; n]).unwrap()
    }

    #[test]
    fn no_redundancy_keeps_all() {
        let cm = cm_from(3, &[((0, 1), 0.2), ((0, 2), -0.3), ((1, 2), 0.49)]);
        let out = redundancy_filter(&cm, 0.5);
        assert_eq!(out.kept, vec![0, 1, 2]);
        assert!(out.dropped.is_empty());
    }

    #[test]
    fn single_pair_drops_later_feature() {
        let cm = cm_from(2, &[((0, 1), -0.9)]);
        let out = redundancy_filter(&cm, 0.5);
        assert_eq!(out.kept, vec![0]);
        assert_eq!(out.dropped, vec![RedundancyDrop { feature: 1, cause: 0, abs_r: 0.9 }]);
    }

    /// Brute force over all subsets: the kept set must be independent in the
    /// |r| > t graph, and maximal, and be the lexicographically first such set.
    fn lex_first_maximal(cm: &CorrelationMatrix<f64>, t: f64) -> Vec<usize> {
        let n = cm.n_features();
        let independent = |s: &[usize]| s.iter().all(|&i| s.iter().all(|&j| i == j || cm.abs(i, j) <= t));
        let mut best: Option<Vec<usize>> = None;
        for mask in 0u32..(1 << n) {
            let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if !independent(&s) {
                continue;
            }
            let maximal = (0..n).filter(|i| !s.contains(i)).all(|i| {
                let mut t2 = s.clone();
                t2.push(i);
                !independent(&t2)
            });
            if !maximal {
                continue;
            }
            // prefer the set whose membership vector is lexicographically largest
            let key: Vec<bool> = (0..n).map(|i| s.contains(&i)).collect();
            let better = best
                .as_ref()
                .is_none_or(|b| key > (0..n).map(|i| b.contains(&i)).collect::<Vec<_>>());
            if better {
                best = Some(s);
            }
        }
        best.unwrap()
    }

    #[test]
    fn chain_keeps_ends() {
        let cm = cm_from(3, &[((0, 1), 0.8), ((1, 2), 0.8), ((0, 2), 0.1)]);
        let out = redundancy_filter(&cm, 0.5);
        assert_eq!(out.kept, vec![0, 2]);
        assert_eq!(out.dropped.len(), 1);
        assert_eq!(out.dropped[0].feature, 1);
        assert_eq!(lex_first_maximal(&cm, 0.5), vec![0, 2]);
    }

    #[test]
    fn greedy_matches_brute_force_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(2..8);
            let mut entries = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    entries.push(((i, j), rng.gen_range(-1.0..1.0)));
                }
            }
            let cm = cm_from(n, &entries);
            assert_eq!(redundancy_filter(&cm, 0.5).kept, lex_first_maximal(&cm, 0.5));
        }
    }

    #[test]
    fn undefined_correlation_never_drops() {
        let cm = CorrelationMatrix::<f64>::from_upper(2, &[None], &[true, false]).unwrap();
        assert_eq!(redundancy_filter(&cm, 0.01).kept, vec![0, 1]);
    }

    fn view(codes: Vec<Vec<u32>>) -> DiscretizedView {
        let cardinalities = codes.iter().map(|c| c.iter().max().map_or(1, |&m| m as usize + 1)).collect();
        DiscretizedView { codes, cardinalities }
    }

    #[test]
    fn relevance_examples() {
        let labels = vec![0, 1, 0, 1, 1, 0];
        let v = view(vec![vec![0; 6], labels.iter().map(|&l| l as u32).collect()]);
        let all = relevance_filter::<f64>(&v, &[0, 1], &labels, 2, 0.0).unwrap();
        assert_eq!(all.kept, vec![0, 1]);
        let out = relevance_filter::<f64>(&v, &[0, 1], &labels, 2, 0.001).unwrap();
        assert_eq!(out.kept, vec![1]);
        assert_eq!(out.dropped, vec![(0, 0.0)]);
        let h = mi_with_label::<f64>(&v, 1, &labels, 2).unwrap();
        assert!((h - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_pair_two_candidates() {
        let labels = vec![0, 0, 1, 1];
        let v = view(vec![vec![0, 1, 0, 1], vec![0, 0, 1, 1]]);
        let rp = mi_rank_pair::<f64>(&v, &[0, 1], &labels, 2).unwrap();
        assert_eq!(rp.top.0, 1);
        assert_eq!(rp.partner.0, 0);
        assert!(mi_rank_pair::<f64>(&v, &[0], &labels, 2).is_err());
    }

    #[test]
    fn rank_pair_skips_duplicate_of_top() {
        let labels = vec![0, 0, 0, 1, 1, 1, 0, 1];
        let l: Vec<u32> = labels.iter().map(|&x| x as u32).collect();
        let noisy = vec![0, 1, 0, 1, 1, 0, 0, 0];
        let v = view(vec![l.clone(), l, noisy]);
        let rp = mi_rank_pair::<f64>(&v, &[0, 1, 2], &labels, 2).unwrap();
        assert_eq!(rp.top.0, 0);
        assert_eq!(rp.partner.0, 2);
    }
}
