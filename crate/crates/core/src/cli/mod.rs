//! `netgauntlet` command line: `select`, `train`, `predict`, `evaluate`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 training
//! divergence, 5 model/data schema mismatch.

mod config;
mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::classifiers::{ClassifierKind, TrainConfig, TrainedModel};
use crate::dataset::{self, kdd99, stratified_sample, Dataset, LabelMode, LabelScheme, LoadOptions, Schema};
use crate::error::{Error, Result};
use crate::evaluation::{compare_runs, cross_validate_with, AccuracyRule, CvResult};
use crate::selection::{run_selection, SelectionReport};

pub use config::{ClassifierChoice, RunConfig};
use output::{csv_with_echo, Outputs};

#[derive(Debug, Parser)]
#[command(name = "netgauntlet", version, about = "Filter feature selection and classifier evaluation for connection records")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the correlation and mutual-information filters and report survivors.
    Select(SelectArgs),
    /// Train one classifier and write it as JSON.
    Train(TrainArgs),
    /// Predict with a saved model.
    Predict(PredictArgs),
    /// Stratified k-fold evaluation, optionally with and without selection.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Connection records, one per line, label last.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// `kdd99` or a schema file of `name:kind` lines.
    #[arg(long)]
    pub schema: Option<String>,
    #[arg(long, value_parser = ["binary", "category5"])]
    pub label_mode: Option<String>,
    /// `attack category` lines replacing the built-in category map.
    #[arg(long)]
    pub attack_map: Option<PathBuf>,
    /// The data file starts with a header line.
    #[arg(long)]
    pub header: bool,
    /// Draw a stratified sample of this many records first.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML run config; defaults to $NETGAUNTLET_CONFIG.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct SelectionArgs {
    #[arg(long)]
    pub corr_threshold: Option<f64>,
    #[arg(long)]
    pub mi_threshold: Option<f64>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, value_parser = ["width", "freq"])]
    pub bin_strategy: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub min_samples_leaf: Option<usize>,
    #[arg(long)]
    pub trees: Option<usize>,
    /// Features tried per forest split.
    #[arg(long)]
    pub mtry: Option<usize>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[arg(long)]
    pub classifier: Option<String>,
    /// Train on the features surviving selection instead of all of them.
    #[arg(long)]
    pub select: bool,
    /// Output model path; defaults to `<out>/<classifier>.model.json`.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[arg(long)]
    pub classifier: Option<String>,
    /// Also evaluate on all features and write the side-by-side table.
    #[arg(long)]
    pub compare: bool,
    #[arg(long)]
    pub k: Option<usize>,
    /// Report accuracy as TP / total instead of (TP + TN) / total.
    #[arg(long)]
    pub paper_literal_accuracy: bool,
}

/// Parses `std::env::args`, runs, reports errors on stderr, returns the exit status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("netgauntlet: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let common = match &cli.command {
        Command::Select(a) => &a.common,
        Command::Train(a) => &a.common,
        Command::Predict(a) => &a.common,
        Command::Evaluate(a) => &a.common,
    };
    let mut config = RunConfig::load(common.config.as_deref())?;
    config.apply_common(common)?;
    match &cli.command {
        Command::Select(a) => config.apply_selection(&a.selection)?,
        Command::Train(a) => {
            config.apply_selection(&a.selection)?;
            config.apply_model(&a.model_args);
            if let Some(c) = &a.classifier {
                config.classifier = c.parse()?;
            }
        }
        Command::Predict(_) => {}
        Command::Evaluate(a) => {
            config.apply_selection(&a.selection)?;
            config.apply_model(&a.model_args);
            if let Some(c) = &a.classifier {
                config.classifier = c.parse()?;
            }
            if let Some(k) = a.k {
                config.k = k;
            }
            config.compare |= a.compare;
            config.paper_literal_accuracy |= a.paper_literal_accuracy;
        }
    }
    config.validate()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Select(_) => cmd_select(&config),
        Command::Train(a) => cmd_train(&config, a.select, a.model.as_deref()),
        Command::Predict(a) => cmd_predict(&config, &a.model),
        Command::Evaluate(_) => cmd_evaluate(&config),
    })
}

fn load_schema(selector: &str) -> Result<Schema> {
    if selector == "kdd99" {
        Ok(kdd99::schema())
    } else {
        Schema::load(Path::new(selector))
    }
}

fn label_scheme(config: &RunConfig) -> Result<LabelScheme> {
    match (&config.attack_map, config.label_mode) {
        (Some(path), LabelMode::Category5) => LabelScheme::category5_from_file(path),
        (Some(_), LabelMode::Binary) => Err(Error::Config("--attack-map needs --label-mode category5".into())),
        (None, mode) => Ok(LabelScheme::for_mode(mode)),
    }
}

fn data_path(config: &RunConfig) -> Result<&Path> {
    config
        .data
        .as_deref()
        .ok_or_else(|| Error::Config("no data file given (--data)".into()))
}

fn load_records(config: &RunConfig, scheme: &LabelScheme) -> Result<Dataset<f64>> {
    let schema = load_schema(&config.schema)?;
    let data = Dataset::load_csv(data_path(config)?, &schema, scheme, LoadOptions { header: config.header })?;
    let data = match config.sample {
        Some(n) => stratified_sample(&data, n, config.seed)?,
        None => data,
    };
    eprintln!(
        "loaded {} records, {} features, classes {:?}",
        data.n_records(),
        data.n_features(),
        data.class_counts()
    );
    Ok(data)
}

fn cmd_select(config: &RunConfig) -> Result<()> {
    let data = load_records(config, &label_scheme(config)?)?;
    let report = run_selection(&data, &config.selection_config())?;
    println!("{}", report.summary_line());
    let echo = config.echo();
    let mut out = Outputs::new(&config.out);
    out.json("selection.json", &SelectionFile { run_config: &echo, selection: &report })?;
    out.text("selection.txt", format!("# run_config: {}\n{}", echo.to_json(), report.render_table()));
    out.commit()
}

#[derive(Serialize)]
struct SelectionFile<'a> {
    run_config: &'a RunConfig,
    selection: &'a SelectionReport<f64>,
}

/// On-disk model: the trained model plus the run config that produced it.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub run_config: RunConfig,
    #[serde(default)]
    pub label_mode: LabelMode,
    pub model: TrainedModel<f64>,
}

fn cmd_train(config: &RunConfig, select: bool, model_path: Option<&Path>) -> Result<()> {
    let kind = config.classifier.single()?;
    let data = load_records(config, &label_scheme(config)?)?;
    let mut train = config.train_config(kind);
    if select {
        let report = run_selection(&data, &config.selection_config())?;
        eprintln!("{}", report.summary_line());
        train.features = Some(report.kept.clone());
    }
    let model = crate::classifiers::train_model(&data, &train)?;
    let file = ModelFile {
        run_config: config.echo(),
        label_mode: config.label_mode,
        model,
    };
    let path = match model_path {
        Some(p) => p.to_path_buf(),
        None => config.out.join(format!("{kind}.model.json")),
    };
    let mut out = Outputs::new(Path::new(""));
    out.json_at(path.clone(), &file)?;
    out.commit()?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_predict(config: &RunConfig, model_path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(model_path).map_err(|e| Error::io(model_path, e))?;
    let file: ModelFile = serde_json::from_str(&text)?;
    let mut config = config.clone();
    if config.attack_map.is_none() && !config.label_mode_set {
        config.label_mode = file.label_mode;
    }
    let schema = load_schema(&config.schema)?;
    let data = Dataset::load_csv(
        data_path(&config)?,
        &schema,
        &label_scheme(&config)?,
        LoadOptions { header: config.header },
    )?;
    if data.classes() != file.model.classes.as_slice() {
        return Err(Error::Schema(format!(
            "model classes {:?} differ from data classes {:?}",
            file.model.classes,
            data.classes()
        )));
    }
    let predictions = file.model.predict(&data)?;
    let mut body = String::from("record,predicted,score,actual\n");
    for (i, p) in predictions.iter().enumerate() {
        body.push_str(&format!(
            "{},{},{},{}\n",
            i,
            data.classes()[p.class],
            p.attack_score(),
            data.classes()[data.labels()[i]]
        ));
    }
    let correct = predictions.iter().zip(data.labels()).filter(|(p, &t)| p.class == t).count();
    println!("{correct}/{} predictions match the labels", predictions.len());
    let mut out = Outputs::new(&config.out);
    out.text("predictions.csv", csv_with_echo(&config.echo(), &body));
    out.commit()
}

fn cmd_evaluate(config: &RunConfig) -> Result<()> {
    let data = load_records(config, &label_scheme(config)?)?;
    let report = run_selection(&data, &config.selection_config())?;
    eprintln!("{}", report.summary_line());
    let plan = dataset::make_fold_plan(&data, config.k, config.seed)?;
    for w in &plan.warnings {
        eprintln!("warning: {w}");
    }
    let rule = if config.paper_literal_accuracy {
        AccuracyRule::Literal
    } else {
        AccuracyRule::Standard
    };
    let kinds = config.classifier.kinds();
    let mut with = Vec::new();
    let mut without = Vec::new();
    for &kind in &kinds {
        let train = config.train_config(kind);
        eprintln!("evaluating {kind} on {} selected features", report.kept.len());
        with.push(cross_validate_with(&data, Some(&report), &train, &plan, rule)?);
        if config.compare {
            eprintln!("evaluating {kind} on all {} features", data.n_features());
            without.push(cross_validate_with(&data, None, &train, &plan, rule)?);
        }
    }

    let echo = config.echo();
    let mut out = Outputs::new(&config.out);
    out.json("selection.json", &SelectionFile { run_config: &echo, selection: &report })?;
    let mut summary = String::from("variant,classifier,features,accuracy,precision,recall,error,dr,far,auc,build_seconds\n");
    let mut text = format!("# run_config: {}\n{}\n", echo.to_json(), report.summary_line());
    for (variant, runs) in [("selected", &with), ("all", &without)] {
        for cv in runs.iter() {
            let stem = format!("cv_{}_{}", cv.classifier, variant);
            out.text(&format!("{stem}.csv"), csv_with_echo(&echo, &cv.to_csv()));
            out.json(&format!("{stem}.json"), &CvFile { run_config: &echo, result: cv })?;
            summary_row(&mut summary, variant, cv);
            text.push_str(&format!("\n[{variant}]\n{}", cv.render_text()));
        }
    }
    out.text("metrics.csv", csv_with_echo(&echo, &summary));
    if config.compare {
        let comparison = compare_runs(&with, &without)?;
        let table = comparison.render_text();
        print!("{table}");
        out.text("comparison.csv", csv_with_echo(&echo, &comparison.to_csv()));
        out.text("comparison.txt", format!("# run_config: {}\n{table}", echo.to_json()));
    } else {
        for cv in &with {
            println!("{:<14} accuracy {:.2}%", cv.classifier.name(), cv.aggregate.accuracy * 100.0);
        }
    }
    out.text("report.txt", text);
    out.commit()
}

#[derive(Serialize)]
struct CvFile<'a> {
    run_config: &'a RunConfig,
    result: &'a CvResult,
}

fn summary_row(out: &mut String, variant: &str, cv: &CvResult) {
    let m = &cv.aggregate;
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{},{}\n",
        variant,
        cv.classifier,
        cv.features.len(),
        m.accuracy,
        m.precision,
        m.recall,
        m.error_rate,
        m.detection_rate,
        m.false_alarm_rate,
        m.auc,
        m.build_seconds
    ));
}

impl RunConfig {
    pub fn selection_config(&self) -> crate::selection::SelectionConfig {
        crate::selection::SelectionConfig {
            corr_threshold: self.corr_threshold,
            mi_threshold: self.mi_threshold,
            binning: crate::dataset::BinningSpec {
                n_bins: self.bins,
                strategy: self.bin_strategy,
            },
        }
    }

    pub fn train_config(&self, kind: ClassifierKind) -> TrainConfig {
        let mut t = TrainConfig::new(kind);
        t.tree = self.tree.clone();
        t.forest = self.forest.clone();
        t.forest.seed = self.seed;
        t.mlp = self.mlp.clone();
        t.mlp.seed = self.seed;
        t.binning = crate::dataset::BinningSpec {
            n_bins: self.bins,
            strategy: self.bin_strategy,
        };
        t
    }
}
