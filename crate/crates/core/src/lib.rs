//! Two-stage filter feature selection (Pearson redundancy, then mutual-information
//! relevance) over KDD99-format connection records, four from-scratch classifiers,
//! and stratified k-fold evaluation.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! bottom of this file fix the scalar for the common cases.

pub mod classifiers;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod scalar;
pub mod seed;
pub mod selection;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Dataset64 = dataset::Dataset<f64>;
pub type Dataset32 = dataset::Dataset<f32>;
pub type NumericMatrix64 = dataset::NumericMatrix<f64>;
pub type CorrelationMatrix64 = selection::CorrelationMatrix<f64>;
pub type SelectionReport64 = selection::SelectionReport<f64>;
pub type TrainedModel64 = classifiers::TrainedModel<f64>;
pub type TrainedModel32 = classifiers::TrainedModel<f32>;
pub type MlpModel64 = classifiers::MlpModel<f64>;
pub type MlpModel32 = classifiers::MlpModel<f32>;
pub type Tree64 = classifiers::Tree<f64>;
pub type Tree32 = classifiers::Tree<f32>;
pub type ForestModel64 = classifiers::ForestModel<f64>;
