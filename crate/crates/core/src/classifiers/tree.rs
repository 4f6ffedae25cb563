use serde::{Deserialize, Serialize};

use crate::dataset::{Column, DiscretizedView};
use crate::scalar::Scalar;

/// Read access to one record's features, by column.
pub trait Features<T> {
    fn real(&self, feature: usize, row: usize) -> T;
    fn code(&self, feature: usize, row: usize) -> u32;
}

impl<T: Scalar> Features<T> for [Column<T>] {
    fn real(&self, feature: usize, row: usize) -> T {
        self[feature].real(row)
    }

    fn code(&self, feature: usize, row: usize) -> u32 {
        match &self[feature] {
            Column::Categorical { codes, .. } => codes[row],
            Column::Continuous(_) => panic!("feature {feature} is continuous"),
        }
    }
}

impl<T: Scalar> Features<T> for Vec<Column<T>> {
    fn real(&self, feature: usize, row: usize) -> T {
        self.as_slice().real(feature, row)
    }

    fn code(&self, feature: usize, row: usize) -> u32 {
        self.as_slice().code(feature, row)
    }
}

impl<T: Scalar> Features<T> for DiscretizedView {
    fn real(&self, feature: usize, row: usize) -> T {
        T::from_u32(self.codes[feature][row]).unwrap_or_else(T::nan)
    }

    fn code(&self, feature: usize, row: usize) -> u32 {
        self.codes[feature][row]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node<T> {
    Leaf {
        class: usize,
        probs: Vec<T>,
        n: usize,
    },
    /// `x <= threshold` goes left.
    Threshold {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
        n: usize,
    },
    /// Code-keyed children; codes not listed go to `default`.
    Branch {
        feature: usize,
        branches: Vec<(u32, usize)>,
        default: usize,
        n: usize,
    },
}

/// Decision tree stored as an arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree<T> {
    pub nodes: Vec<Node<T>>,
    pub n_classes: usize,
}

impl<T: Scalar> Tree<T> {
    pub fn leaf_for<F: Features<T> + ?Sized>(&self, data: &F, row: usize) -> (usize, &[T]) {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { class, probs, .. } => return (*class, probs),
                Node::Threshold {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    at = if data.real(*feature, row) <= *threshold { *left } else { *right };
                }
                Node::Branch {
                    feature,
                    branches,
                    default,
                    ..
                } => {
                    let code = data.code(*feature, row);
                    at = branches
                        .iter()
                        .find(|(c, _)| *c == code)
                        .map_or(*default, |&(_, child)| child);
                }
            }
        }
    }

    pub fn predict<F: Features<T> + ?Sized>(&self, data: &F, row: usize) -> usize {
        self.leaf_for(data, row).0
    }

    pub fn depth(&self) -> usize {
        fn go<T>(nodes: &[Node<T>], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Threshold { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
                Node::Branch { branches, default, .. } => {
                    1 + branches
                        .iter()
                        .map(|&(_, c)| go(nodes, c))
                        .chain(std::iter::once(go(nodes, *default)))
                        .max()
                        .unwrap_or(0)
                }
            }
        }
        go(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

pub(crate) fn class_counts(labels: &[usize], rows: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_classes];
    for &r in rows {
        counts[labels[r]] += 1;
    }
    counts
}

/// Majority class (ties to the lower index) and count fractions.
pub(crate) fn make_leaf<T: Scalar>(counts: &[usize]) -> Node<T> {
    let n: usize = counts.iter().sum();
    let mut class = 0;
    for (k, &c) in counts.iter().enumerate() {
        if c > counts[class] {
            class = k;
        }
    }
    let nt = T::from_count(n.max(1));
    Node::Leaf {
        class,
        probs: counts.iter().map(|&c| T::from_count(c) / nt).collect(),
        n,
    }
}

pub(crate) fn is_pure(counts: &[usize]) -> bool {
    counts.iter().filter(|&&c| c > 0).count() <= 1
}
