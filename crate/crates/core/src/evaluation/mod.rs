//! Confusion counts, rate metrics, AUC, and stratified cross-validation.

mod cv;
mod metrics;

pub use cv::{
    compare_runs, cross_validate, cross_validate_with, fold_model, Comparison, ComparisonRow, CvResult, FoldResult, CSV_COLUMNS,
};
pub use metrics::{
    accuracy, attack_auc, attack_confusion, auc, confusion, detection_rate, false_alarm_rate, literal_accuracy, precision, recall,
    AccuracyRule, ConfusionMatrix, MetricsReport, Rate,
};
