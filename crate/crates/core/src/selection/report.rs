use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::correlation::correlation_matrix;
use super::filters::{mi_rank_pair, redundancy_filter, relevance_filter};
use crate::dataset::{apply_binning, fit_binning, numeric_encode, BinningSpec, Dataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Stage 1 drops a feature when `|r|` with an earlier kept feature exceeds this.
    pub corr_threshold: f64,
    /// Stage 2 drops a feature when its MI with the label is below this.
    pub mi_threshold: f64,
    pub binning: BinningSpec,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            corr_threshold: 0.5,
            mi_threshold: 0.001,
            binning: BinningSpec::default(),
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.corr_threshold > 0.0 && self.corr_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "correlation threshold must be in (0, 1], got {}",
                self.corr_threshold
            )));
        }
        if !(self.mi_threshold >= 0.0 && self.mi_threshold.is_finite()) {
            return Err(Error::Config(format!(
                "MI threshold must be finite and >= 0, got {}",
                self.mi_threshold
            )));
        }
        if self.binning.n_bins < 2 {
            return Err(Error::Config("bins must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationDrop<T> {
    pub feature: String,
    pub index: usize,
    pub correlated_with: String,
    pub correlated_index: usize,
    pub abs_r: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore<T> {
    pub feature: String,
    pub index: usize,
    pub mi: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic<T> {
    pub ranking: Vec<FeatureScore<T>>,
    pub top: FeatureScore<T>,
    /// Here `mi` is the information shared with `top`.
    pub partner: FeatureScore<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport<T> {
    pub config: SelectionConfig,
    pub n_features: usize,
    pub stage1_dropped: Vec<CorrelationDrop<T>>,
    pub stage1_kept: Vec<String>,
    /// MI with the class label for every stage-1 survivor.
    pub mi_with_label: Vec<FeatureScore<T>>,
    pub stage2_dropped: Vec<FeatureScore<T>>,
    pub kept: Vec<String>,
    pub kept_indices: Vec<usize>,
    pub degenerate_bins: Vec<String>,
    pub diagnostic: Option<Diagnostic<T>>,
}

/// Correlation filter over all features, then MI filter over the survivors.
/// The rank-and-pair step runs over the stage-1 survivors and is reported
/// without affecting the kept set.
pub fn run_selection<T: Scalar>(data: &Dataset<T>, config: &SelectionConfig) -> Result<SelectionReport<T>> {
    config.validate()?;
    let names: Vec<String> = data.schema().features().iter().map(|f| f.name.clone()).collect();
    let encoded = numeric_encode(data);
    let cm = correlation_matrix(&encoded)?;
    let stage1 = redundancy_filter(&cm, T::lit(config.corr_threshold));

    let fitted = fit_binning(data, config.binning)?;
    let view = apply_binning(data, &fitted)?;
    let stage2 = relevance_filter(&view, &stage1.kept, data.labels(), data.n_classes(), T::lit(config.mi_threshold))?;

    let score = |(index, mi): (usize, T)| FeatureScore {
        feature: names[index].clone(),
        index,
        mi,
    };
    let diagnostic = if stage1.kept.len() >= 2 {
        let rp = mi_rank_pair(&view, &stage1.kept, data.labels(), data.n_classes())?;
        Some(Diagnostic {
            ranking: rp.ranking.into_iter().map(score).collect(),
            top: score(rp.top),
            partner: score(rp.partner),
        })
    } else {
        None
    };

    Ok(SelectionReport {
        config: *config,
        n_features: data.n_features(),
        stage1_dropped: stage1
            .dropped
            .iter()
            .map(|d| CorrelationDrop {
                feature: names[d.feature].clone(),
                index: d.feature,
                correlated_with: names[d.cause].clone(),
                correlated_index: d.cause,
                abs_r: d.abs_r,
            })
            .collect(),
        stage1_kept: stage1.kept.iter().map(|&i| names[i].clone()).collect(),
        mi_with_label: stage2.mi.iter().copied().map(score).collect(),
        stage2_dropped: stage2.dropped.iter().copied().map(score).collect(),
        kept: stage2.kept.iter().map(|&i| names[i].clone()).collect(),
        kept_indices: stage2.kept.clone(),
        degenerate_bins: fitted.degenerate.iter().map(|&i| names[i].clone()).collect(),
        diagnostic,
    })
}

impl<T: Scalar> SelectionReport<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// `41 → 27 → 21`-style funnel line.
    pub fn summary_line(&self) -> String {
        format!(
            "features: {} → {} (stage 1 dropped {}) → {} (stage 2 dropped {})",
            self.n_features,
            self.stage1_kept.len(),
            self.stage1_dropped.len(),
            self.kept.len(),
            self.stage2_dropped.len()
        )
    }

    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "correlation threshold {}  MI threshold {}  bins {} ({:?})",
            self.config.corr_threshold, self.config.mi_threshold, self.config.binning.n_bins, self.config.binning.strategy
        );
        let _ = writeln!(s, "{}", self.summary_line());
        let _ = writeln!(s, "\nstage 1 (redundant):");
        let _ = writeln!(s, "  {:<30} {:<30} {:>8}", "feature", "correlated with", "|r|");
        for d in &self.stage1_dropped {
            let _ = writeln!(s, "  {:<30} {:<30} {:>8.4}", d.feature, d.correlated_with, d.abs_r.to_f64_lossy());
        }
        let _ = writeln!(s, "\nstage 2 (irrelevant):");
        let _ = writeln!(s, "  {:<30} {:>12}", "feature", "MI (bits)");
        for d in &self.stage2_dropped {
            let _ = writeln!(s, "  {:<30} {:>12.6}", d.feature, d.mi.to_f64_lossy());
        }
        let _ = writeln!(s, "\nkept: {}", self.kept.join(", "));
        if let Some(diag) = &self.diagnostic {
            let _ = writeln!(
                s,
                "top by MI: {} ({:.4} bits); least shared with it: {} ({:.4} bits)",
                diag.top.feature,
                diag.top.mi.to_f64_lossy(),
                diag.partner.feature,
                diag.partner.mi.to_f64_lossy()
            );
        }
        s
    }
}
