//! One-hidden-layer perceptron: logistic hidden units, softmax output,
//! cross-entropy loss, mini-batch SGD.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Column;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: 32,
            learning_rate: 0.1,
            epochs: 50,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Config("mlp hidden, epochs and batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning rate must be > 0, got {}", self.learning_rate)));
        }
        Ok(())
    }
}

/// Per-feature input transform fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "encoding", rename_all = "snake_case")]
pub enum InputEncoding<T> {
    /// Min-max onto [0, 1]; constant features map to 0.
    Scaled { min: T, max: T },
    /// One unit per training code; unseen codes encode as all zeros.
    OneHot { width: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEncoder<T> {
    pub features: Vec<InputEncoding<T>>,
    pub width: usize,
}

impl<T: Scalar> InputEncoder<T> {
    pub fn fit(columns: &[Column<T>]) -> Self {
        let features: Vec<InputEncoding<T>> = columns
            .iter()
            .map(|c| match c {
                Column::Continuous(v) => {
                    let (min, max) = v
                        .iter()
                        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| (lo.min(x), hi.max(x)));
                    InputEncoding::Scaled { min, max }
                }
                Column::Categorical { table, .. } => InputEncoding::OneHot { width: table.len() },
            })
            .collect();
        let width = features
            .iter()
            .map(|f| match f {
                InputEncoding::Scaled { .. } => 1,
                InputEncoding::OneHot { width } => *width,
            })
            .sum();
        InputEncoder { features, width }
    }

    pub fn encode_row(&self, columns: &[Column<T>], row: usize, out: &mut [T]) {
        let mut at = 0;
        for (enc, col) in self.features.iter().zip(columns) {
            match (enc, col) {
                (InputEncoding::Scaled { min, max }, Column::Continuous(v)) => {
                    out[at] = if max > min { (v[row] - *min) / (*max - *min) } else { T::zero() };
                    at += 1;
                }
                (InputEncoding::OneHot { width }, Column::Categorical { codes, .. }) => {
                    out[at..at + width].fill(T::zero());
                    let c = codes[row] as usize;
                    if c < *width {
                        out[at + c] = T::one();
                    }
                    at += width;
                }
                _ => panic!("column kind does not match the fitted encoder"),
            }
        }
    }

    /// Row-major `n × width`.
    pub fn encode_all(&self, columns: &[Column<T>]) -> Vec<T> {
        let n = columns.first().map_or(0, Column::len);
        let mut out = vec![T::zero(); n * self.width];
        for r in 0..n {
            self.encode_row(columns, r, &mut out[r * self.width..(r + 1) * self.width]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel<T> {
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub n_outputs: usize,
    /// `n_hidden × n_inputs`, row-major.
    pub w1: Vec<T>,
    pub b1: Vec<T>,
    /// `n_outputs × n_hidden`, row-major.
    pub w2: Vec<T>,
    pub b2: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoder: Option<InputEncoder<T>>,
}

/// Parameter gradients, same layout as [`MlpModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradients<T> {
    pub w1: Vec<T>,
    pub b1: Vec<T>,
    pub w2: Vec<T>,
    pub b2: Vec<T>,
}

impl<T: Scalar> MlpGradients<T> {
    fn zeros(m: &MlpModel<T>) -> Self {
        MlpGradients {
            w1: vec![T::zero(); m.w1.len()],
            b1: vec![T::zero(); m.b1.len()],
            w2: vec![T::zero(); m.w2.len()],
            b2: vec![T::zero(); m.b2.len()],
        }
    }

    fn clear(&mut self) {
        for v in [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2] {
            v.fill(T::zero());
        }
    }

    pub fn flatten(&self) -> Vec<T> {
        [&self.w1, &self.b1, &self.w2, &self.b2].into_iter().flatten().copied().collect()
    }
}

fn sigmoid<T: Scalar>(z: T) -> T {
    T::one() / (T::one() + (-z).exp())
}

impl<T: Scalar> MlpModel<T> {
    /// Weights and biases uniform in [-0.5, 0.5].
    pub fn random<R: Rng>(n_inputs: usize, n_hidden: usize, n_outputs: usize, rng: &mut R) -> Self {
        let mut draw = |len: usize| -> Vec<T> { (0..len).map(|_| T::lit(rng.gen_range(-0.5..=0.5))).collect() };
        let w1 = draw(n_hidden * n_inputs);
        let b1 = draw(n_hidden);
        let w2 = draw(n_outputs * n_hidden);
        let b2 = draw(n_outputs);
        MlpModel {
            n_inputs,
            n_hidden,
            n_outputs,
            w1,
            b1,
            w2,
            b2,
            encoder: None,
        }
    }

    fn hidden_into(&self, x: &[T], h: &mut [T]) {
        for (j, hj) in h.iter_mut().enumerate() {
            let row = &self.w1[j * self.n_inputs..(j + 1) * self.n_inputs];
            let z = row.iter().zip(x).fold(self.b1[j], |acc, (&w, &xi)| acc + w * xi);
            *hj = sigmoid(z);
        }
    }

    /// Softmax of the output pre-activations; returns `log Σ exp(z)` too.
    fn output_into(&self, h: &[T], p: &mut [T]) -> T {
        for (k, pk) in p.iter_mut().enumerate() {
            let row = &self.w2[k * self.n_hidden..(k + 1) * self.n_hidden];
            *pk = row.iter().zip(h).fold(self.b2[k], |acc, (&w, &hj)| acc + w * hj);
        }
        let zmax = p.iter().copied().fold(T::neg_infinity(), T::max);
        let mut sum = T::zero();
        for pk in p.iter_mut() {
            *pk = (*pk - zmax).exp();
            sum = sum + *pk;
        }
        for pk in p.iter_mut() {
            *pk = *pk / sum;
        }
        zmax + sum.ln()
    }

    /// Hidden activations and class probabilities for one encoded input.
    pub fn forward(&self, x: &[T]) -> (Vec<T>, Vec<T>) {
        let mut h = vec![T::zero(); self.n_hidden];
        let mut p = vec![T::zero(); self.n_outputs];
        self.hidden_into(x, &mut h);
        self.output_into(&h, &mut p);
        (h, p)
    }

    pub fn predict_encoded(&self, x: &[T]) -> (usize, Vec<T>) {
        let (_, p) = self.forward(x);
        (argmax(&p), p)
    }

    /// Mean cross-entropy over rows of a row-major input matrix.
    pub fn loss(&self, inputs: &[T], labels: &[usize]) -> T {
        let mut h = vec![T::zero(); self.n_hidden];
        let mut p = vec![T::zero(); self.n_outputs];
        let mut total = T::zero();
        for (r, &y) in labels.iter().enumerate() {
            let x = &inputs[r * self.n_inputs..(r + 1) * self.n_inputs];
            self.hidden_into(x, &mut h);
            let lse = self.output_into(&h, &mut p);
            let row = &self.w2[y * self.n_hidden..(y + 1) * self.n_hidden];
            let zy = row.iter().zip(&h).fold(self.b2[y], |acc, (&w, &hj)| acc + w * hj);
            total = total + (lse - zy);
        }
        total / T::from_count(labels.len().max(1))
    }

    /// Mean-loss gradients over `rows`, accumulated into `g`; returns the summed loss.
    fn accumulate(&self, inputs: &[T], labels: &[usize], rows: &[usize], g: &mut MlpGradients<T>, scratch: &mut Scratch<T>) -> T {
        g.clear();
        let scale = T::one() / T::from_count(rows.len());
        let mut loss = T::zero();
        for &r in rows {
            let x = &inputs[r * self.n_inputs..(r + 1) * self.n_inputs];
            let y = labels[r];
            self.hidden_into(x, &mut scratch.h);
            let lse = self.output_into(&scratch.h, &mut scratch.p);
            let zy = self.w2[y * self.n_hidden..(y + 1) * self.n_hidden]
                .iter()
                .zip(&scratch.h)
                .fold(self.b2[y], |acc, (&w, &hj)| acc + w * hj);
            loss = loss + (lse - zy);
            for k in 0..self.n_outputs {
                let target = if k == y { T::one() } else { T::zero() };
                scratch.dz2[k] = (scratch.p[k] - target) * scale;
            }
            scratch.dh.fill(T::zero());
            for k in 0..self.n_outputs {
                let d = scratch.dz2[k];
                g.b2[k] = g.b2[k] + d;
                let base = k * self.n_hidden;
                for j in 0..self.n_hidden {
                    g.w2[base + j] = g.w2[base + j] + d * scratch.h[j];
                    scratch.dh[j] = scratch.dh[j] + d * self.w2[base + j];
                }
            }
            for j in 0..self.n_hidden {
                let hj = scratch.h[j];
                let d = scratch.dh[j] * hj * (T::one() - hj);
                g.b1[j] = g.b1[j] + d;
                if d != T::zero() {
                    let base = j * self.n_inputs;
                    for (gw, &xi) in g.w1[base..base + self.n_inputs].iter_mut().zip(x) {
                        *gw = *gw + d * xi;
                    }
                }
            }
        }
        loss
    }

    /// Analytic gradient of [`MlpModel::loss`] over all rows.
    pub fn gradients(&self, inputs: &[T], labels: &[usize]) -> MlpGradients<T> {
        let mut g = MlpGradients::zeros(self);
        let mut scratch = Scratch::new(self);
        let rows: Vec<usize> = (0..labels.len()).collect();
        self.accumulate(inputs, labels, &rows, &mut g, &mut scratch);
        g
    }

    /// All parameters in `w1, b1, w2, b2` order.
    pub fn parameters(&self) -> Vec<T> {
        [&self.w1, &self.b1, &self.w2, &self.b2].into_iter().flatten().copied().collect()
    }

    pub fn set_parameters(&mut self, params: &[T]) {
        let mut it = params.iter().copied();
        for v in [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2] {
            for x in v.iter_mut() {
                *x = it.next().expect("parameter count");
            }
        }
    }

    fn step(&mut self, g: &MlpGradients<T>, lr: T) {
        for (p, d) in [
            (&mut self.w1, &g.w1),
            (&mut self.b1, &g.b1),
            (&mut self.w2, &g.w2),
            (&mut self.b2, &g.b2),
        ] {
            for (w, &dw) in p.iter_mut().zip(d) {
                *w = *w - lr * dw;
            }
        }
    }

    /// Predicts one record of raw columns through the stored encoder.
    pub fn predict_columns(&self, columns: &[Column<T>], row: usize) -> (usize, Vec<T>) {
        let enc = self.encoder.as_ref().expect("model trained from columns carries an encoder");
        let mut x = vec![T::zero(); enc.width];
        enc.encode_row(columns, row, &mut x);
        self.predict_encoded(&x)
    }
}

struct Scratch<T> {
    h: Vec<T>,
    p: Vec<T>,
    dz2: Vec<T>,
    dh: Vec<T>,
}

impl<T: Scalar> Scratch<T> {
    fn new(m: &MlpModel<T>) -> Self {
        Scratch {
            h: vec![T::zero(); m.n_hidden],
            p: vec![T::zero(); m.n_outputs],
            dz2: vec![T::zero(); m.n_outputs],
            dh: vec![T::zero(); m.n_hidden],
        }
    }
}

pub(crate) fn argmax<T: Scalar>(p: &[T]) -> usize {
    let mut best = 0;
    for (k, &v) in p.iter().enumerate() {
        if v > p[best] {
            best = k;
        }
    }
    best
}

/// Trains on an already-encoded row-major input matrix.
pub fn train_mlp_encoded<T: Scalar>(
    inputs: &[T],
    n_inputs: usize,
    labels: &[usize],
    n_classes: usize,
    config: &MlpConfig,
) -> Result<MlpModel<T>> {
    config.validate()?;
    if labels.is_empty() {
        return Err(Error::Size("MLP needs at least one record".into()));
    }
    if inputs.len() != labels.len() * n_inputs {
        return Err(Error::Shape {
            expected: labels.len() * n_inputs,
            actual: inputs.len(),
        });
    }
    let mut init = seed::rng(config.seed, seed::STREAM_MLP_INIT, 0);
    let mut model = MlpModel::random(n_inputs, config.hidden, n_classes, &mut init);
    let mut g = MlpGradients::zeros(&model);
    let mut scratch = Scratch::new(&model);
    let lr = T::lit(config.learning_rate);
    let mut order: Vec<usize> = (0..labels.len()).collect();
    for epoch in 0..config.epochs {
        let mut rng = seed::rng(config.seed, seed::STREAM_MLP_SHUFFLE, epoch as u64);
        order.shuffle(&mut rng);
        let mut epoch_loss = T::zero();
        for batch in order.chunks(config.batch_size) {
            epoch_loss = epoch_loss + model.accumulate(inputs, labels, batch, &mut g, &mut scratch);
            model.step(&g, lr);
        }
        if !epoch_loss.is_finite() || model.parameters().iter().any(|w| !w.is_finite()) {
            return Err(Error::Diverged { epoch: epoch + 1 });
        }
    }
    Ok(model)
}

/// Fits the input encoder on `columns`, encodes, and trains.
pub fn train_mlp<T: Scalar>(columns: &[Column<T>], labels: &[usize], n_classes: usize, config: &MlpConfig) -> Result<MlpModel<T>> {
    let encoder = InputEncoder::fit(columns);
    let inputs = encoder.encode_all(columns);
    let mut model = train_mlp_encoded(&inputs, encoder.width, labels, n_classes, config)?;
    model.encoder = Some(encoder);
    Ok(model)
}
