//! ID3, CART, random forest and MLP behind one train / predict surface.

mod cart;
mod criteria;
mod forest;
mod id3;
mod mlp;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{apply_binning, fit_binning, BinningSpec, Column, Dataset, FeatureMeta, FittedBinning};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use cart::{best_root_split, train_cart, Split, SplitRule};
pub use criteria::{gini, info_gain, weighted_gini};
pub use forest::{train_forest, ForestConfig, ForestModel};
pub use id3::train_id3;
pub use mlp::{train_mlp, train_mlp_encoded, InputEncoder, InputEncoding, MlpConfig, MlpGradients, MlpModel};
pub use tree::{Features, Node, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Id3,
    Cart,
    RandomForest,
    Mlp,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [
        ClassifierKind::Cart,
        ClassifierKind::Mlp,
        ClassifierKind::Id3,
        ClassifierKind::RandomForest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Id3 => "id3",
            ClassifierKind::Cart => "cart",
            ClassifierKind::RandomForest => "random_forest",
            ClassifierKind::Mlp => "mlp",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "id3" => Ok(ClassifierKind::Id3),
            "cart" => Ok(ClassifierKind::Cart),
            "random_forest" | "rf" => Ok(ClassifierKind::RandomForest),
            "mlp" | "nn" => Ok(ClassifierKind::Mlp),
            other => Err(Error::Config(format!("unknown classifier {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeConfig {
    /// `None` grows until the other stopping rules apply.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: None,
            min_samples_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub kind: ClassifierKind,
    #[serde(default)]
    pub tree: TreeConfig,
    #[serde(default)]
    pub forest: ForestConfig,
    #[serde(default)]
    pub mlp: MlpConfig,
    /// Discretization ID3 trains on.
    #[serde(default)]
    pub binning: BinningSpec,
    /// Restrict training to these features, by name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<String>>,
}

impl TrainConfig {
    pub fn new(kind: ClassifierKind) -> Self {
        TrainConfig {
            kind,
            tree: TreeConfig::default(),
            forest: ForestConfig::default(),
            mlp: MlpConfig::default(),
            binning: BinningSpec::default(),
            features: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tree.min_samples_leaf == 0 {
            return Err(Error::Config("min_samples_leaf must be positive".into()));
        }
        if self.tree.max_depth == Some(0) {
            return Err(Error::Config("max_depth must be positive".into()));
        }
        if self.forest.n_trees == 0 || self.forest.n_features_per_split == Some(0) {
            return Err(Error::Config("forest counts must be positive".into()));
        }
        if self.binning.n_bins < 2 {
            return Err(Error::Config("bins must be at least 2".into()));
        }
        self.mlp.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound(deserialize = "T: Scalar"))]
pub enum ModelBody<T> {
    Id3 { binning: FittedBinning<T>, tree: Tree<T> },
    Cart { tree: Tree<T> },
    RandomForest { forest: ForestModel<T> },
    Mlp { network: MlpModel<T> },
}

/// A trained classifier plus everything needed to predict on raw records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct TrainedModel<T> {
    pub config: TrainConfig,
    pub features: Vec<FeatureMeta>,
    pub code_tables: Vec<Option<Vec<String>>>,
    pub classes: Vec<String>,
    pub model: ModelBody<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<T> {
    pub class: usize,
    /// Per-class scores summing to 1.
    pub scores: Vec<T>,
}

impl<T: Scalar> Prediction<T> {
    /// Score mass on every non-normal class.
    pub fn attack_score(&self) -> T {
        self.scores.iter().skip(1).copied().sum()
    }
}

pub fn train_model<T: Scalar>(data: &Dataset<T>, config: &TrainConfig) -> Result<TrainedModel<T>> {
    config.validate()?;
    let data = match &config.features {
        Some(names) => data.select_features_by_name(names)?,
        None => data.clone(),
    };
    if data.n_records() == 0 {
        return Err(Error::Size("cannot train on zero records".into()));
    }
    let labels = data.labels();
    let k = data.n_classes();
    let model = match config.kind {
        ClassifierKind::Id3 => {
            let binning = fit_binning(&data, config.binning)?;
            let view = apply_binning(&data, &binning)?;
            let tree = train_id3(&view, labels, k, &config.tree)?;
            ModelBody::Id3 { binning, tree }
        }
        ClassifierKind::Cart => ModelBody::Cart {
            tree: train_cart(data.columns(), labels, k, &config.tree)?,
        },
        ClassifierKind::RandomForest => ModelBody::RandomForest {
            forest: train_forest(data.columns(), labels, k, &config.tree, &config.forest)?,
        },
        ClassifierKind::Mlp => ModelBody::Mlp {
            network: train_mlp(data.columns(), labels, k, &config.mlp)?,
        },
    };
    Ok(TrainedModel {
        config: config.clone(),
        features: data.schema().features().to_vec(),
        code_tables: data.code_tables(),
        classes: data.classes().to_vec(),
        model,
    })
}

impl<T: Scalar> TrainedModel<T> {
    pub fn kind(&self) -> ClassifierKind {
        self.config.kind
    }

    /// Aligns `data` with the training schema: picks the model's features by
    /// name and re-expresses categorical codes in the training code tables.
    fn aligned_columns(&self, data: &Dataset<T>) -> Result<Vec<Column<T>>> {
        let names: Vec<String> = self.features.iter().map(|f| f.name.clone()).collect();
        let picked = data.select_features_by_name(&names)?;
        for (want, have) in self.features.iter().zip(picked.schema().features()) {
            if want.kind != have.kind {
                return Err(Error::Schema(format!(
                    "feature {:?} is {:?} in the model but {:?} in the data",
                    want.name, want.kind, have.kind
                )));
            }
        }
        picked.recode_to(&self.code_tables)
    }

    pub fn predict(&self, data: &Dataset<T>) -> Result<Vec<Prediction<T>>> {
        let columns = self.aligned_columns(data)?;
        let n = data.n_records();
        let out = match &self.model {
            ModelBody::Id3 { binning, tree } => {
                let view = crate::dataset::binning_view(&columns, &self.features, binning)?;
                (0..n)
                    .map(|r| {
                        let (class, probs) = tree.leaf_for(&view, r);
                        Prediction {
                            class,
                            scores: probs.to_vec(),
                        }
                    })
                    .collect()
            }
            ModelBody::Cart { tree } => (0..n)
                .map(|r| {
                    let (class, probs) = tree.leaf_for(&columns, r);
                    Prediction {
                        class,
                        scores: probs.to_vec(),
                    }
                })
                .collect(),
            ModelBody::RandomForest { forest } => (0..n)
                .map(|r| {
                    let (class, scores) = forest.predict(&columns, r);
                    Prediction { class, scores }
                })
                .collect(),
            ModelBody::Mlp { network } => (0..n)
                .map(|r| {
                    let (class, scores) = network.predict_columns(&columns, r);
                    Prediction { class, scores }
                })
                .collect(),
        };
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
