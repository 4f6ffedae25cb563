//! Loading, validation, encoding, discretization and splitting of
//! KDD99-format connection records.

mod binning;
mod encode;
mod folds;
pub mod kdd99;
mod labels;
mod sample;

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use binning::{apply_binning, apply_binning_columns as binning_view, fit_binning, BinStrategy, BinningSpec, DiscretizedView, FittedBinning};
pub use encode::{numeric_encode, MinMaxScaler, NumericMatrix};
pub use folds::{make_fold_plan, FoldPlan};
pub use labels::{canonical_label, LabelMode, LabelScheme};
pub use sample::{stratified_sample, stratified_sample_indices};

/// Code used for a categorical value that is absent from a reference code table.
pub const UNSEEN_CODE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Continuous,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub name: String,
    pub kind: FeatureKind,
    pub index: usize,
}

/// Ordered feature list; indices are always `0..len` without gaps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    features: Vec<FeatureMeta>,
}

impl Schema {
    pub fn new(features: Vec<FeatureMeta>) -> Result<Self> {
        for (pos, f) in features.iter().enumerate() {
            if f.index != pos {
                return Err(Error::Schema(format!(
                    "feature {:?} has index {} at position {}",
                    f.name, f.index, pos
                )));
            }
        }
        let mut names = std::collections::HashSet::new();
        for f in &features {
            if !names.insert(f.name.as_str()) {
                return Err(Error::Schema(format!("duplicate feature name {:?}", f.name)));
            }
        }
        Ok(Schema { features })
    }

    /// Builds a schema from `(name, kind)` pairs, assigning indices in order.
    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, FeatureKind)>) -> Result<Self> {
        let features = pairs
            .into_iter()
            .enumerate()
            .map(|(index, (name, kind))| FeatureMeta {
                name: name.into(),
                kind,
                index,
            })
            .collect();
        Schema::new(features)
    }

    /// Parses a sidecar schema file: one `name:kind` per line, `#` comments allowed.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, kind) = line.split_once(':').ok_or_else(|| Error::Parse {
                row: lineno + 1,
                message: format!("expected `name:kind`, got {line:?}"),
            })?;
            let kind = match kind.trim().trim_end_matches('.').to_ascii_lowercase().as_str() {
                "continuous" | "numeric" | "real" => FeatureKind::Continuous,
                "categorical" | "symbolic" | "nominal" => FeatureKind::Categorical,
                other => {
                    return Err(Error::Parse {
                        row: lineno + 1,
                        message: format!("unknown feature kind {other:?}"),
                    })
                }
            };
            pairs.push((name.trim().to_string(), kind));
        }
        if pairs.is_empty() {
            return Err(Error::EmptyInput("schema has no features".into()));
        }
        Schema::from_pairs(pairs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Schema::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[FeatureMeta] {
        &self.features
    }

    pub fn get(&self, index: usize) -> Option<&FeatureMeta> {
        self.features.get(index)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn n_categorical(&self) -> usize {
        self.features
            .iter()
            .filter(|f| f.kind == FeatureKind::Categorical)
            .count()
    }

    fn select(&self, indices: &[usize]) -> Schema {
        Schema {
            features: indices
                .iter()
                .enumerate()
                .map(|(new, &old)| FeatureMeta {
                    index: new,
                    ..self.features[old].clone()
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Column<T> {
    Continuous(Vec<T>),
    Categorical { codes: Vec<u32>, table: Vec<String> },
}

impl<T: Scalar> Column<T> {
    pub fn len(&self) -> usize {
        match self {
            Column::Continuous(v) => v.len(),
            Column::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> FeatureKind {
        match self {
            Column::Continuous(_) => FeatureKind::Continuous,
            Column::Categorical { .. } => FeatureKind::Categorical,
        }
    }

    /// Value at `row` as a real number (categorical codes are coerced).
    pub fn real(&self, row: usize) -> T {
        match self {
            Column::Continuous(v) => v[row],
            Column::Categorical { codes, .. } => T::from_u32(codes[row]).unwrap_or_else(T::nan),
        }
    }

    fn gather(&self, rows: &[usize]) -> Column<T> {
        match self {
            Column::Continuous(v) => Column::Continuous(rows.iter().map(|&r| v[r]).collect()),
            Column::Categorical { codes, table } => Column::Categorical {
                codes: rows.iter().map(|&r| codes[r]).collect(),
                table: table.clone(),
            },
        }
    }
}

/// Columnar table of connection records.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    schema: Schema,
    columns: Vec<Column<T>>,
    labels: Vec<usize>,
    classes: Vec<String>,
    raw_labels: Vec<u32>,
    raw_label_table: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Skip the first line.
    pub header: bool,
}

impl<T: Scalar> Dataset<T> {
    /// Assembles a dataset from already-built columns. Label texts are mapped
    /// through `scheme`.
    pub fn from_columns(
        schema: Schema,
        columns: Vec<Column<T>>,
        label_texts: &[&str],
        scheme: &LabelScheme,
    ) -> Result<Self> {
        if columns.len() != schema.len() {
            return Err(Error::Shape {
                expected: schema.len(),
                actual: columns.len(),
            });
        }
        let n = label_texts.len();
        for (meta, col) in schema.features().iter().zip(&columns) {
            if col.len() != n {
                return Err(Error::Shape {
                    expected: n,
                    actual: col.len(),
                });
            }
            if col.kind() != meta.kind {
                return Err(Error::Schema(format!("column {:?} has the wrong kind", meta.name)));
            }
            if let Column::Categorical { codes, table } = col {
                if codes.iter().any(|&c| c as usize >= table.len()) {
                    return Err(Error::Schema(format!("column {:?} has a code outside its table", meta.name)));
                }
            }
            if let Column::Continuous(v) = col {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Schema(format!("column {:?} has a non-finite value", meta.name)));
                }
            }
        }
        let mut raw_index: HashMap<&str, u32> = HashMap::new();
        let mut raw_label_table = Vec::new();
        let mut raw_labels = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for (row, text) in label_texts.iter().enumerate() {
            let class = scheme.classify(text).ok_or_else(|| Error::Label {
                row: row + 1,
                label: text.to_string(),
            })?;
            labels.push(class);
            let code = *raw_index.entry(text).or_insert_with(|| {
                raw_label_table.push(text.to_string());
                (raw_label_table.len() - 1) as u32
            });
            raw_labels.push(code);
        }
        Ok(Dataset {
            schema,
            columns,
            labels,
            classes: scheme.class_names(),
            raw_labels,
            raw_label_table,
        })
    }

    pub fn load_csv(path: &Path, schema: &Schema, scheme: &LabelScheme, opts: LoadOptions) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(BufReader::new(file), schema, scheme, opts)
    }

    pub fn read_csv<R: Read>(reader: R, schema: &Schema, scheme: &LabelScheme, opts: LoadOptions) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(opts.header)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let expected = schema.len() + 1;
        let mut builders: Vec<ColumnBuilder<T>> = schema
            .features()
            .iter()
            .map(|f| ColumnBuilder::new(f.kind))
            .collect();
        let mut label_texts: Vec<String> = Vec::new();
        let first_row = if opts.header { 2 } else { 1 };
        for (i, record) in rdr.records().enumerate() {
            let row = first_row + i;
            let record = record.map_err(|e| Error::Parse {
                row,
                message: e.to_string(),
            })?;
            if record.len() == 1 && record.get(0).is_some_and(str::is_empty) {
                continue;
            }
            if record.len() != expected {
                return Err(Error::Parse {
                    row,
                    message: format!("expected {expected} fields, found {}", record.len()),
                });
            }
            for (col, field) in builders.iter_mut().zip(record.iter()) {
                col.push(field, row)?;
            }
            label_texts.push(record.get(expected - 1).unwrap_or_default().to_string());
        }
        if label_texts.is_empty() {
            return Err(Error::EmptyInput("no records".into()));
        }
        let columns = builders.into_iter().map(ColumnBuilder::finish).collect();
        let refs: Vec<&str> = label_texts.iter().map(String::as_str).collect();
        for (i, t) in refs.iter().enumerate() {
            if t.is_empty() {
                return Err(Error::Parse {
                    row: first_row + i,
                    message: "missing label".into(),
                });
            }
        }
        Dataset::from_columns(schema.clone(), columns, &refs, scheme)
    }

    /// Writes records back in the input format (no header).
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut line = String::new();
        for row in 0..self.n_records() {
            line.clear();
            for col in &self.columns {
                match col {
                    Column::Continuous(v) => line.push_str(&v[row].to_string()),
                    Column::Categorical { codes, table } => line.push_str(&table[codes[row] as usize]),
                }
                line.push(',');
            }
            line.push_str(&self.raw_label_table[self.raw_labels[row] as usize]);
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn n_records(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn columns(&self) -> &[Column<T>] {
        &self.columns
    }

    pub fn column(&self, feature: usize) -> &Column<T> {
        &self.columns[feature]
    }

    /// Class index per record; index 0 is always `normal`.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    /// Label collapsed to normal (0) vs attack (1).
    pub fn binary_labels(&self) -> Vec<usize> {
        self.labels.iter().map(|&c| usize::from(c != 0)).collect()
    }

    pub fn raw_label(&self, row: usize) -> &str {
        &self.raw_label_table[self.raw_labels[row] as usize]
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &c in &self.labels {
            counts[c] += 1;
        }
        counts
    }

    /// Categorical code tables per feature (`None` for continuous features).
    pub fn code_tables(&self) -> Vec<Option<Vec<String>>> {
        self.columns
            .iter()
            .map(|c| match c {
                Column::Categorical { table, .. } => Some(table.clone()),
                Column::Continuous(_) => None,
            })
            .collect()
    }

    /// Records at `rows`, in that order.
    pub fn subset(&self, rows: &[usize]) -> Dataset<T> {
        Dataset {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.gather(rows)).collect(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            classes: self.classes.clone(),
            raw_labels: rows.iter().map(|&r| self.raw_labels[r]).collect(),
            raw_label_table: self.raw_label_table.clone(),
        }
    }

    /// Keeps only the given feature columns, re-indexed in the given order.
    pub fn select_features(&self, features: &[usize]) -> Result<Dataset<T>> {
        if let Some(&bad) = features.iter().find(|&&f| f >= self.n_features()) {
            return Err(Error::Schema(format!("feature index {bad} out of range")));
        }
        Ok(Dataset {
            schema: self.schema.select(features),
            columns: features.iter().map(|&f| self.columns[f].clone()).collect(),
            labels: self.labels.clone(),
            classes: self.classes.clone(),
            raw_labels: self.raw_labels.clone(),
            raw_label_table: self.raw_label_table.clone(),
        })
    }

    pub fn select_features_by_name(&self, names: &[String]) -> Result<Dataset<T>> {
        let idx = names
            .iter()
            .map(|n| {
                self.schema
                    .position(n)
                    .ok_or_else(|| Error::Schema(format!("unknown feature {n:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.select_features(&idx)
    }

    /// Re-expresses categorical codes against reference tables (matched by text).
    /// Values absent from a reference table become [`UNSEEN_CODE`].
    pub fn recode_to(&self, tables: &[Option<Vec<String>>]) -> Result<Vec<Column<T>>> {
        if tables.len() != self.n_features() {
            return Err(Error::Schema(format!(
                "expected {} features, data has {}",
                tables.len(),
                self.n_features()
            )));
        }
        self.columns
            .iter()
            .zip(tables)
            .map(|(col, reference)| match (col, reference) {
                (Column::Continuous(v), None) => Ok(Column::Continuous(v.clone())),
                (Column::Categorical { codes, table }, Some(reference)) => {
                    let lookup: HashMap<&str, u32> = reference
                        .iter()
                        .enumerate()
                        .map(|(i, s)| (s.as_str(), i as u32))
                        .collect();
                    let remap: Vec<u32> = table
                        .iter()
                        .map(|s| lookup.get(s.as_str()).copied().unwrap_or(UNSEEN_CODE))
                        .collect();
                    Ok(Column::Categorical {
                        codes: codes.iter().map(|&c| remap[c as usize]).collect(),
                        table: reference.clone(),
                    })
                }
                _ => Err(Error::Schema("feature kind mismatch".into())),
            })
            .collect()
    }
}

struct ColumnBuilder<T> {
    kind: FeatureKind,
    values: Vec<T>,
    codes: Vec<u32>,
    index: HashMap<String, u32>,
    table: Vec<String>,
}

impl<T: Scalar> ColumnBuilder<T> {
    fn new(kind: FeatureKind) -> Self {
        ColumnBuilder {
            kind,
            values: Vec::new(),
            codes: Vec::new(),
            index: HashMap::new(),
            table: Vec::new(),
        }
    }

    fn push(&mut self, field: &str, row: usize) -> Result<()> {
        if field.is_empty() || field == "?" {
            return Err(Error::Parse {
                row,
                message: "missing value".into(),
            });
        }
        match self.kind {
            FeatureKind::Continuous => {
                let v: T = field.parse().map_err(|_| Error::Parse {
                    row,
                    message: format!("unparseable number {field:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        row,
                        message: format!("non-finite number {field:?}"),
                    });
                }
                self.values.push(v);
            }
            FeatureKind::Categorical => {
                let code = match self.index.get(field) {
                    Some(&c) => c,
                    None => {
                        let c = self.table.len() as u32;
                        self.table.push(field.to_string());
                        self.index.insert(field.to_string(), c);
                        c
                    }
                };
                self.codes.push(code);
            }
        }
        Ok(())
    }

    fn finish(self) -> Column<T> {
        match self.kind {
            FeatureKind::Continuous => Column::Continuous(self.values),
            FeatureKind::Categorical => Column::Categorical {
                codes: self.codes,
                table: self.table,
            },
        }
    }
}
