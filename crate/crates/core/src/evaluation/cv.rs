use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{attack_auc, attack_confusion, AccuracyRule, ConfusionMatrix, MetricsReport, Rate};
use crate::classifiers::{train_model, ClassifierKind, TrainConfig, TrainedModel};
use crate::dataset::{Dataset, FoldPlan};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::selection::SelectionReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub classifier: ClassifierKind,
    pub features: Vec<String>,
    /// Aggregation rule for `aggregate`; always `"micro"`: rates are recomputed
    /// from the summed confusion matrix, AUC and build time are fold means.
    pub averaging: String,
    pub folds: Vec<FoldResult>,
    pub aggregate: MetricsReport,
    pub plan: FoldPlan,
    pub config: TrainConfig,
}

/// Effective training config for a run: the selection's kept features, if any,
/// override the config's own feature list.
fn effective_config<T: Scalar>(data: &Dataset<T>, selection: Option<&SelectionReport<T>>, config: &TrainConfig) -> Result<TrainConfig> {
    let mut config = config.clone();
    if let Some(report) = selection {
        if report.n_features != data.n_features() {
            return Err(Error::Consistency(format!(
                "selection was run on {} features, data has {}",
                report.n_features,
                data.n_features()
            )));
        }
        for name in &report.kept {
            if data.schema().position(name).is_none() {
                return Err(Error::Schema(format!("selected feature {name:?} not in data")));
            }
        }
        config.features = Some(report.kept.clone());
    }
    config.validate()?;
    Ok(config)
}

fn check_plan<T: Scalar>(data: &Dataset<T>, plan: &FoldPlan) -> Result<()> {
    if plan.n_records() != data.n_records() {
        return Err(Error::Consistency(format!(
            "fold plan covers {} records, data has {}",
            plan.n_records(),
            data.n_records()
        )));
    }
    if plan.assignment.iter().any(|&f| f >= plan.k) {
        return Err(Error::Consistency("fold plan assigns a record past k".into()));
    }
    Ok(())
}

/// Trains the model for one fold on that fold's training records only.
pub fn fold_model<T: Scalar>(
    data: &Dataset<T>,
    selection: Option<&SelectionReport<T>>,
    config: &TrainConfig,
    plan: &FoldPlan,
    fold: usize,
) -> Result<TrainedModel<T>> {
    check_plan(data, plan)?;
    let config = effective_config(data, selection, config)?;
    train_model(&data.subset(&plan.train_indices(fold)), &config)
}

fn run_fold<T: Scalar>(data: &Dataset<T>, config: &TrainConfig, plan: &FoldPlan, fold: usize, rule: AccuracyRule) -> Result<(FoldResult, Rate)> {
    let train = data.subset(&plan.train_indices(fold));
    let test = data.subset(&plan.test_indices(fold));
    let start = Instant::now();
    let model = train_model(&train, config)?;
    let build_seconds = start.elapsed().as_secs_f64();
    let predictions = model.predict(&test)?;
    let predicted: Vec<usize> = predictions.iter().map(|p| p.class).collect();
    let scores: Vec<T> = predictions.iter().map(|p| p.attack_score()).collect();
    let cm = attack_confusion(&predicted, test.labels())?;
    let auc = attack_auc(&scores, test.labels())?;
    Ok((
        FoldResult {
            fold,
            n_train: train.n_records(),
            n_test: test.n_records(),
            metrics: MetricsReport::new(cm, auc, build_seconds, rule),
        },
        auc,
    ))
}

pub fn cross_validate<T: Scalar>(
    data: &Dataset<T>,
    selection: Option<&SelectionReport<T>>,
    config: &TrainConfig,
    plan: &FoldPlan,
) -> Result<CvResult> {
    cross_validate_with(data, selection, config, plan, AccuracyRule::Standard)
}

/// Stratified k-fold evaluation. Folds run concurrently; results are kept
/// in fold order so nothing depends on scheduling.
pub fn cross_validate_with<T: Scalar>(
    data: &Dataset<T>,
    selection: Option<&SelectionReport<T>>,
    config: &TrainConfig,
    plan: &FoldPlan,
    rule: AccuracyRule,
) -> Result<CvResult> {
    check_plan(data, plan)?;
    let config = effective_config(data, selection, config)?;
    let outcomes: Vec<Result<(FoldResult, Rate)>> = (0..plan.k)
        .into_par_iter()
        .map(|fold| run_fold(data, &config, plan, fold, rule))
        .collect();
    let mut folds = Vec::with_capacity(plan.k);
    let mut aucs = Vec::with_capacity(plan.k);
    for outcome in outcomes {
        let (fold, auc) = outcome?;
        folds.push(fold);
        aucs.push(auc);
    }

    let mut total = ConfusionMatrix::default();
    for f in &folds {
        total.add(&f.metrics.confusion);
    }
    let defined: Vec<f64> = aucs.iter().filter(|a| a.defined).map(|a| a.value).collect();
    let mean_auc = if defined.is_empty() {
        Rate::UNDEFINED
    } else {
        Rate {
            value: defined.iter().sum::<f64>() / defined.len() as f64,
            defined: true,
        }
    };
    let mean_build = folds.iter().map(|f| f.metrics.build_seconds).sum::<f64>() / folds.len() as f64;
    let features = match &config.features {
        Some(names) => names.clone(),
        None => data.schema().features().iter().map(|f| f.name.clone()).collect(),
    };
    Ok(CvResult {
        classifier: config.kind,
        features,
        averaging: "micro".into(),
        aggregate: MetricsReport::new(total, mean_auc, mean_build, rule),
        folds,
        plan: plan.clone(),
        config,
    })
}

pub const CSV_COLUMNS: [&str; 9] = [
    "fold",
    "accuracy",
    "precision",
    "recall",
    "error",
    "dr",
    "far",
    "auc",
    "build_seconds",
];

fn csv_row(out: &mut String, label: &str, m: &MetricsReport) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{}",
        label, m.accuracy, m.precision, m.recall, m.error_rate, m.detection_rate, m.false_alarm_rate, m.auc, m.build_seconds
    );
}

impl CvResult {
    /// One row per fold and a final `aggregate` row.
    pub fn to_csv(&self) -> String {
        let mut out = CSV_COLUMNS.join(",");
        out.push('\n');
        for f in &self.folds {
            csv_row(&mut out, &f.fold.to_string(), &f.metrics);
        }
        csv_row(&mut out, "aggregate", &self.aggregate);
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn render_text(&self) -> String {
        let a = &self.aggregate;
        let cm = &a.confusion;
        let mut out = String::new();
        let _ = writeln!(out, "classifier   {}", self.classifier);
        let _ = writeln!(out, "features     {}", self.features.len());
        let _ = writeln!(out, "folds        {} (seed {})", self.plan.k, self.plan.seed);
        let _ = writeln!(out, "averaging    micro (rates from summed confusion; auc, build time = fold means)");
        let _ = writeln!(out, "confusion    tp={} fp={} tn={} fn={}", cm.tp, cm.fp, cm.tn, cm.fn_);
        for (name, v) in [
            ("accuracy", a.accuracy),
            ("precision", a.precision),
            ("recall", a.recall),
            ("error", a.error_rate),
            ("dr", a.detection_rate),
            ("far", a.false_alarm_rate),
            ("auc", a.auc),
        ] {
            let _ = writeln!(out, "{name:<12} {:.4}%", v * 100.0);
        }
        let _ = writeln!(out, "build        {:.3}s mean per fold", a.build_seconds);
        if !a.undefined.is_empty() {
            let _ = writeln!(out, "undefined    {}", a.undefined.join(", "));
        }
        for w in &self.plan.warnings {
            let _ = writeln!(out, "warning      {w}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub classifier: ClassifierKind,
    pub features_without: usize,
    pub features_with: usize,
    pub accuracy_without: f64,
    pub accuracy_with: f64,
    /// `accuracy_with - accuracy_without`.
    pub delta: f64,
    pub far_without: f64,
    pub far_with: f64,
    pub auc_without: f64,
    pub auc_with: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
}

/// Pairs runs with and without feature selection, classifier by classifier.
pub fn compare_runs(with_selection: &[CvResult], without_selection: &[CvResult]) -> Result<Comparison> {
    if with_selection.len() != without_selection.len() {
        return Err(Error::Consistency(format!(
            "{} runs with selection vs {} without",
            with_selection.len(),
            without_selection.len()
        )));
    }
    let mut rows = Vec::with_capacity(with_selection.len());
    for (w, wo) in with_selection.iter().zip(without_selection) {
        if w.plan != wo.plan {
            return Err(Error::Consistency("runs use different fold plans".into()));
        }
        let mut a = w.config.clone();
        let mut b = wo.config.clone();
        a.features = None;
        b.features = None;
        if a != b {
            return Err(Error::Consistency(format!(
                "{} vs {}: configs differ beyond the feature set",
                w.classifier, wo.classifier
            )));
        }
        rows.push(ComparisonRow {
            classifier: w.classifier,
            features_without: wo.features.len(),
            features_with: w.features.len(),
            accuracy_without: wo.aggregate.accuracy,
            accuracy_with: w.aggregate.accuracy,
            delta: w.aggregate.accuracy - wo.aggregate.accuracy,
            far_without: wo.aggregate.false_alarm_rate,
            far_with: w.aggregate.false_alarm_rate,
            auc_without: wo.aggregate.auc,
            auc_with: w.aggregate.auc,
        });
    }
    Ok(Comparison { rows })
}

impl Comparison {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "classifier,features_without,features_with,accuracy_without,accuracy_with,delta,far_without,far_with,auc_without,auc_with\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.classifier,
                r.features_without,
                r.features_with,
                r.accuracy_without,
                r.accuracy_with,
                r.delta,
                r.far_without,
                r.far_with,
                r.auc_without,
                r.auc_with
            );
        }
        out
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "{:<14} {:>10} {:>10} {:>9}\n",
            "classifier", "without %", "with %", "delta pp"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<14} {:>10.2} {:>10.2} {:>+9.2}",
                r.classifier.name(),
                r.accuracy_without * 100.0,
                r.accuracy_with * 100.0,
                r.delta * 100.0
            );
        }
        out
    }
}
