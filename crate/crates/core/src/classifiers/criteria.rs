use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::selection::entropy;

/// Gini impurity `1 - Σ (c/n)²`.
pub fn gini<T: Scalar>(counts: &[usize]) -> Result<T> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::Size("gini of an empty node".into()));
    }
    Ok(gini_unchecked(counts, total))
}

pub(crate) fn gini_unchecked<T: Scalar>(counts: &[usize], total: usize) -> T {
    let n = T::from_count(total);
    let sq: T = counts
        .iter()
        .map(|&c| {
            let p = T::from_count(c) / n;
            p * p
        })
        .sum();
    T::one() - sq
}

/// Size-weighted child impurity of a binary split.
pub fn weighted_gini<T: Scalar>(left: &[usize], right: &[usize]) -> T {
    let nl: usize = left.iter().sum();
    let nr: usize = right.iter().sum();
    let n = T::from_count(nl + nr);
    let gl = if nl > 0 { gini_unchecked::<T>(left, nl) } else { T::zero() };
    let gr = if nr > 0 { gini_unchecked::<T>(right, nr) } else { T::zero() };
    (T::from_count(nl) * gl + T::from_count(nr) * gr) / n
}

fn as_u64(counts: &[usize]) -> Vec<u64> {
    counts.iter().map(|&c| c as u64).collect()
}

/// `H(parent) - Σ (n_child / n_parent) H(child)`, clamped at 0.
pub fn info_gain<T: Scalar>(parent: &[usize], children: &[Vec<usize>]) -> Result<T> {
    let n: usize = parent.iter().sum();
    if n == 0 {
        return Err(Error::Size("information gain of an empty node".into()));
    }
    for (k, &p) in parent.iter().enumerate() {
        let s: usize = children.iter().map(|c| c.get(k).copied().unwrap_or(0)).sum();
        if s != p {
            return Err(Error::Consistency(format!(
                "children hold {s} records of class {k}, parent holds {p}"
            )));
        }
    }
    if children.iter().any(|c| c.len() > parent.len()) {
        return Err(Error::Consistency("child has more classes than its parent".into()));
    }
    let mut weighted = T::zero();
    let nt = T::from_count(n);
    for child in children {
        let nc: usize = child.iter().sum();
        if nc == 0 {
            continue;
        }
        let h: T = entropy(&as_u64(child))?;
        weighted = weighted + T::from_count(nc) / nt * h;
    }
    let h_parent: T = entropy(&as_u64(parent))?;
    Ok((h_parent - weighted).max(T::zero()))
}
