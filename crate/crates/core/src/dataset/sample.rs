use rand::seq::SliceRandom;

use super::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed;

/// Per-class quotas summing to `n`, by largest remainder (ties to the lower class).
pub(crate) fn proportional_quotas(class_counts: &[usize], n: usize) -> Vec<usize> {
    let total: usize = class_counts.iter().sum();
    let total = total.max(1) as u128;
    let mut quotas: Vec<usize> = class_counts
        .iter()
        .map(|&c| (n as u128 * c as u128 / total) as usize)
        .collect();
    let mut leftover = n - quotas.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..class_counts.len()).collect();
    order.sort_by_key(|&c| std::cmp::Reverse(n as u128 * class_counts[c] as u128 % total));
    for c in order {
        if leftover == 0 {
            break;
        }
        if quotas[c] < class_counts[c] {
            quotas[c] += 1;
            leftover -= 1;
        }
    }
    quotas
}

/// Indices (ascending) of a class-proportional sample of size `n`.
pub fn stratified_sample_indices(labels: &[usize], n_classes: usize, n: usize, seed_value: u64) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::EmptyInput("sample size is zero".into()));
    }
    if n > labels.len() {
        return Err(Error::Size(format!(
            "sample size {n} exceeds {} records",
            labels.len()
        )));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in labels.iter().enumerate() {
        by_class[c].push(i);
    }
    let counts: Vec<usize> = by_class.iter().map(Vec::len).collect();
    let quotas = proportional_quotas(&counts, n);
    let mut picked = Vec::with_capacity(n);
    for (class, mut members) in by_class.into_iter().enumerate() {
        let mut rng = seed::rng(seed_value, seed::STREAM_SAMPLE, class as u64);
        members.shuffle(&mut rng);
        picked.extend_from_slice(&members[..quotas[class]]);
    }
    picked.sort_unstable();
    Ok(picked)
}

pub fn stratified_sample<T: Scalar>(data: &Dataset<T>, n: usize, seed_value: u64) -> Result<Dataset<T>> {
    let rows = stratified_sample_indices(data.labels(), data.n_classes(), n, seed_value)?;
    Ok(data.subset(&rows))
}
