//! Downstream tasks: link prediction and vertex classification.

pub mod eval;
pub mod logistic;

pub use eval::{
    link_prediction_eval, read_labels, resolve_labels, sample_pairs, vertex_classification_eval, ClassificationReport,
    Confusion, LinkPredictionConfig, LinkPredictionReport,
};
pub use logistic::{logistic_train, LabeledExample, LogisticClassifier, LogisticConfig};
