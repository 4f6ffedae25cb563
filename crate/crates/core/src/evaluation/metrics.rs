use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Binary confusion counts relative to a declared positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn add(&mut self, other: &ConfusionMatrix) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.tn += other.tn;
        self.fn_ += other.fn_;
    }

    fn record(&mut self, predicted_positive: bool, actually_positive: bool) {
        match (predicted_positive, actually_positive) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Shape { expected: b, actual: a });
    }
    if a == 0 {
        return Err(Error::EmptyInput("no records to score".into()));
    }
    Ok(())
}

/// Counts with `positive` as the positive class and every other class negative.
pub fn confusion(predictions: &[usize], truth: &[usize], positive: usize) -> Result<ConfusionMatrix> {
    confusion_by(predictions, truth, |c| c == positive)
}

/// Counts with every non-normal class (index > 0) positive.
pub fn attack_confusion(predictions: &[usize], truth: &[usize]) -> Result<ConfusionMatrix> {
    confusion_by(predictions, truth, |c| c != 0)
}

fn confusion_by(predictions: &[usize], truth: &[usize], positive: impl Fn(usize) -> bool) -> Result<ConfusionMatrix> {
    check_lengths(predictions.len(), truth.len())?;
    let mut cm = ConfusionMatrix::default();
    for (&p, &t) in predictions.iter().zip(truth) {
        cm.record(positive(p), positive(t));
    }
    Ok(cm)
}

/// A ratio that may be undefined; undefined ratios carry value 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub value: f64,
    pub defined: bool,
}

impl Rate {
    pub fn ratio(num: u64, den: u64) -> Rate {
        if den == 0 {
            Rate::UNDEFINED
        } else {
            Rate {
                value: num as f64 / den as f64,
                defined: true,
            }
        }
    }

    pub const UNDEFINED: Rate = Rate {
        value: 0.0,
        defined: false,
    };
}

pub fn precision(cm: &ConfusionMatrix) -> Rate {
    Rate::ratio(cm.tp, cm.tp + cm.fp)
}

pub fn recall(cm: &ConfusionMatrix) -> Rate {
    Rate::ratio(cm.tp, cm.tp + cm.fn_)
}

pub fn accuracy(cm: &ConfusionMatrix) -> Rate {
    Rate::ratio(cm.tp + cm.tn, cm.total())
}

/// `TP / (TP + FP + TN + FN)`: the formula as literally printed in the
/// source write-up, which omits true negatives. Kept only for audit runs.
pub fn literal_accuracy(cm: &ConfusionMatrix) -> Rate {
    Rate::ratio(cm.tp, cm.total())
}

/// Fraction of actual positives flagged.
pub fn detection_rate(cm: &ConfusionMatrix) -> Rate {
    recall(cm)
}

/// Fraction of actual negatives flagged.
pub fn false_alarm_rate(cm: &ConfusionMatrix) -> Rate {
    Rate::ratio(cm.fp, cm.fp + cm.tn)
}

/// Mann–Whitney AUC: the fraction of (positive, negative) pairs in which the
/// positive record scores higher, ties counting one half. Computed from
/// mid-ranks in `O(n log n)`.
pub fn auc<T: Scalar>(scores: &[T], truth: &[usize], positive: usize) -> Result<Rate> {
    auc_by(scores, truth, |c| c == positive)
}

/// AUC with every non-normal class positive.
pub fn attack_auc<T: Scalar>(scores: &[T], truth: &[usize]) -> Result<Rate> {
    auc_by(scores, truth, |c| c != 0)
}

fn auc_by<T: Scalar>(scores: &[T], truth: &[usize], positive: impl Fn(usize) -> bool) -> Result<Rate> {
    check_lengths(scores.len(), truth.len())?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Consistency("NaN score".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal));
    let mut n_pos = 0u64;
    // Sum of doubled mid-ranks of the positives, kept integral.
    let mut rank2_sum = 0u64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1..=j+1; doubled mid-rank is (i+1)+(j+1).
        let mid2 = (i + j + 2) as u64;
        for &r in &order[i..=j] {
            if positive(truth[r]) {
                n_pos += 1;
                rank2_sum += mid2;
            }
        }
        i = j + 1;
    }
    let n_neg = scores.len() as u64 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Ok(Rate::UNDEFINED);
    }
    // 2U = rank2_sum - n_pos(n_pos+1)
    let u2 = rank2_sum - n_pos * (n_pos + 1);
    Ok(Rate {
        value: u2 as f64 / (2 * n_pos * n_neg) as f64,
        defined: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyRule {
    /// `(TP + TN) / total`.
    #[default]
    Standard,
    /// `TP / total`, see [`literal_accuracy`].
    Literal,
}

/// Metric suite for one evaluation. Rates are fractions in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub error_rate: f64,
    pub detection_rate: f64,
    pub false_alarm_rate: f64,
    pub auc: f64,
    pub build_seconds: f64,
    pub accuracy_rule: AccuracyRule,
    /// Metrics whose denominator was zero; their value is reported as 0.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undefined: Vec<String>,
}

impl MetricsReport {
    pub fn new(cm: ConfusionMatrix, auc: Rate, build_seconds: f64, rule: AccuracyRule) -> Self {
        let acc = match rule {
            AccuracyRule::Standard => accuracy(&cm),
            AccuracyRule::Literal => literal_accuracy(&cm),
        };
        let rates = [
            ("accuracy", acc),
            ("precision", precision(&cm)),
            ("recall", recall(&cm)),
            ("detection_rate", detection_rate(&cm)),
            ("false_alarm_rate", false_alarm_rate(&cm)),
            ("auc", auc),
        ];
        let undefined = rates
            .iter()
            .filter(|(_, r)| !r.defined)
            .map(|(name, _)| name.to_string())
            .collect();
        MetricsReport {
            confusion: cm,
            accuracy: acc.value,
            precision: rates[1].1.value,
            recall: rates[2].1.value,
            error_rate: if acc.defined { 1.0 - acc.value } else { 0.0 },
            detection_rate: rates[3].1.value,
            false_alarm_rate: rates[4].1.value,
            auc: auc.value,
            build_seconds,
            accuracy_rule: rule,
            undefined,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = 1;
    const N: usize = 0;

    #[test]
    fn confusion_hand_cases() {
        let cm = confusion(&[P, P, N, N], &[P, N, P, N], P).unwrap();
        assert_eq!((cm.tp, cm.fp, cm.fn_, cm.tn), (1, 1, 1, 1));

        let cm = confusion(&[P; 5], &[N; 5], P).unwrap();
        assert_eq!((cm.tp, cm.tn, cm.fn_, cm.fp), (0, 0, 0, 5));

        let cm = confusion(&[P, N, P], &[P, N, P], P).unwrap();
        assert_eq!((cm.fp, cm.fn_), (0, 0));
    }

    #[test]
    fn confusion_length_mismatch() {
        assert!(matches!(confusion(&[P], &[P, N], P), Err(Error::Shape { .. })));
        assert!(matches!(confusion(&[], &[], P), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn ratio_examples() {
        let cm = ConfusionMatrix { tp: 5, fp: 0, tn: 5, fn_: 0 };
        assert_eq!(precision(&cm).value, 1.0);
        assert_eq!(recall(&cm).value, 1.0);
        assert_eq!(accuracy(&cm).value, 1.0);

        let cm = ConfusionMatrix { tp: 3, fp: 1, tn: 0, fn_: 0 };
        assert_eq!(precision(&cm).value, 0.75);

        let cm = ConfusionMatrix { tp: 0, fp: 0, tn: 4, fn_: 2 };
        assert_eq!(precision(&cm), Rate::UNDEFINED);
        assert_eq!(false_alarm_rate(&cm).value, 0.0);

        let cm = ConfusionMatrix { tp: 96, fp: 3, tn: 897, fn_: 4 };
        assert_eq!(detection_rate(&cm).value, 0.96);
        assert!((false_alarm_rate(&cm).value - 0.003_333_333_333_333_333).abs() < 1e-15);
        assert_eq!(detection_rate(&ConfusionMatrix { tp: 7, fn_: 0, ..cm }).value, 1.0);
    }

    #[test]
    fn literal_accuracy_omits_true_negatives() {
        let cm = ConfusionMatrix { tp: 2, fp: 1, tn: 6, fn_: 1 };
        assert_eq!(accuracy(&cm).value, 0.8);
        assert_eq!(literal_accuracy(&cm).value, 0.2);
        let r = MetricsReport::new(cm, Rate::UNDEFINED, 0.0, AccuracyRule::Literal);
        assert_eq!(r.accuracy, 0.2);
        assert!((r.accuracy + r.error_rate - 1.0).abs() < 1e-12);
        assert_eq!(r.undefined, vec!["auc".to_string()]);
    }

    #[test]
    fn auc_examples() {
        let v = auc(&[0.9f64, 0.8, 0.3, 0.2], &[P, N, P, N], P).unwrap();
        assert_eq!(v.value, 0.75);
        let v = auc(&[0.9f64, 0.8, 0.3, 0.2], &[P, P, N, N], P).unwrap();
        assert_eq!(v.value, 1.0);
        let v = auc(&[0.4f64; 6], &[P, N, P, N, N, N], P).unwrap();
        assert_eq!(v.value, 0.5);
        let v = auc(&[0.1f64, 0.2], &[N, N], P).unwrap();
        assert!(!v.defined);
    }
}
