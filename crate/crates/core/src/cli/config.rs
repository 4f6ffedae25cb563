use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CommonArgs, ModelArgs, SelectionArgs};
use crate::classifiers::{ClassifierKind, ForestConfig, MlpConfig, TreeConfig};
use crate::dataset::{BinStrategy, LabelMode};
use crate::error::{Error, Result};

pub const CONFIG_ENV: &str = "NETGAUNTLET_CONFIG";

/// One classifier or all four.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierChoice {
    One(ClassifierKind),
    All,
}

impl ClassifierChoice {
    pub fn kinds(self) -> Vec<ClassifierKind> {
        match self {
            ClassifierChoice::One(k) => vec![k],
            ClassifierChoice::All => ClassifierKind::ALL.to_vec(),
        }
    }

    pub fn single(self) -> Result<ClassifierKind> {
        match self {
            ClassifierChoice::One(k) => Ok(k),
            ClassifierChoice::All => Err(Error::Config("this command trains one classifier, not `all`".into())),
        }
    }
}

impl FromStr for ClassifierChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            Ok(ClassifierChoice::All)
        } else {
            s.parse().map(ClassifierChoice::One)
        }
    }
}

impl Serialize for ClassifierChoice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ClassifierChoice::One(k) => s.serialize_str(k.name()),
            ClassifierChoice::All => s.serialize_str("all"),
        }
    }
}

impl<'de> Deserialize<'de> for ClassifierChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Effective settings of a run. Built from defaults, then the TOML config
/// file, then command-line flags, each layer overriding the previous one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub schema: String,
    pub label_mode: LabelMode,
    pub attack_map: Option<PathBuf>,
    pub header: bool,
    pub sample: Option<usize>,
    pub corr_threshold: f64,
    pub mi_threshold: f64,
    pub bins: usize,
    pub bin_strategy: BinStrategy,
    pub classifier: ClassifierChoice,
    pub compare: bool,
    pub k: usize,
    pub seed: u64,
    /// Output directory. Not echoed: it names where outputs go, not what they contain.
    #[serde(skip_serializing)]
    pub out: PathBuf,
    pub paper_literal_accuracy: bool,
    pub tree: TreeConfig,
    pub forest: ForestConfig,
    pub mlp: MlpConfig,
    #[serde(skip)]
    pub(crate) label_mode_set: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data: None,
            schema: "kdd99".into(),
            label_mode: LabelMode::Binary,
            attack_map: None,
            header: false,
            sample: None,
            corr_threshold: 0.5,
            mi_threshold: 0.001,
            bins: 10,
            bin_strategy: BinStrategy::EqualWidth,
            classifier: ClassifierChoice::All,
            compare: false,
            k: 10,
            seed: 20_160_901,
            out: PathBuf::from("out"),
            paper_literal_accuracy: false,
            tree: TreeConfig::default(),
            forest: ForestConfig::default(),
            mlp: MlpConfig::default(),
            label_mode_set: false,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))?;
        config.label_mode_set = toml::from_str::<toml::Table>(text)
            .map(|t| t.contains_key("label_mode"))
            .unwrap_or(false);
        Ok(config)
    }

    /// Defaults overlaid with the config file named by `path` or by
    /// `$NETGAUNTLET_CONFIG`, if either is set.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let env = std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
        match path.map(Path::to_path_buf).or(env) {
            Some(p) => {
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| Error::Config(format!("cannot read config {}: {e}", p.display())))?;
                RunConfig::from_toml(&text)
            }
            None => Ok(RunConfig::default()),
        }
    }

    pub(crate) fn apply_common(&mut self, a: &CommonArgs) -> Result<()> {
        if let Some(d) = &a.data {
            self.data = Some(d.clone());
        }
        if let Some(s) = &a.schema {
            self.schema = s.clone();
        }
        if let Some(m) = &a.label_mode {
            self.label_mode = match m.as_str() {
                "binary" => LabelMode::Binary,
                "category5" => LabelMode::Category5,
                other => return Err(Error::Config(format!("unknown label mode {other:?}"))),
            };
            self.label_mode_set = true;
        }
        if let Some(p) = &a.attack_map {
            self.attack_map = Some(p.clone());
        }
        self.header |= a.header;
        if a.sample.is_some() {
            self.sample = a.sample;
        }
        if let Some(s) = a.seed {
            self.seed = s;
        }
        if let Some(o) = &a.out {
            self.out = o.clone();
        }
        if a.jobs == Some(0) {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn apply_selection(&mut self, a: &SelectionArgs) -> Result<()> {
        if let Some(r) = a.corr_threshold {
            self.corr_threshold = r;
        }
        if let Some(r) = a.mi_threshold {
            self.mi_threshold = r;
        }
        if let Some(b) = a.bins {
            self.bins = b;
        }
        if let Some(s) = &a.bin_strategy {
            self.bin_strategy = match s.as_str() {
                "width" => BinStrategy::EqualWidth,
                "freq" => BinStrategy::EqualFrequency,
                other => return Err(Error::Config(format!("unknown bin strategy {other:?}"))),
            };
        }
        Ok(())
    }

    pub(crate) fn apply_model(&mut self, a: &ModelArgs) {
        if a.max_depth.is_some() {
            self.tree.max_depth = a.max_depth;
        }
        if let Some(v) = a.min_samples_leaf {
            self.tree.min_samples_leaf = v;
        }
        if let Some(v) = a.trees {
            self.forest.n_trees = v;
        }
        if a.mtry.is_some() {
            self.forest.n_features_per_split = a.mtry;
        }
        if let Some(v) = a.hidden {
            self.mlp.hidden = v;
        }
        if let Some(v) = a.epochs {
            self.mlp.epochs = v;
        }
        if let Some(v) = a.learning_rate {
            self.mlp.learning_rate = v;
        }
        if let Some(v) = a.batch_size {
            self.mlp.batch_size = v;
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.selection_config().validate()?;
        if self.k < 2 {
            return Err(Error::Config(format!("k must be at least 2, got {}", self.k)));
        }
        if self.sample == Some(0) {
            return Err(Error::Config("--sample must be positive".into()));
        }
        for kind in ClassifierKind::ALL {
            self.train_config(kind).validate()?;
        }
        Ok(())
    }

    /// The config as written into output files.
    pub fn echo(&self) -> RunConfig {
        let mut c = self.clone();
        c.forest.seed = self.seed;
        c.mlp.seed = self.seed;
        c
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("run config serializes")
    }
}
