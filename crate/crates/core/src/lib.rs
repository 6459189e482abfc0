//! Spam classification with subtopic-aware feature adjustment.
//!
//! The training documents of each label are clustered into subtopics, every
//! term is scored as a descriptor (frequent inside a subtopic) and as a
//! discriminator (concentrated in a subtopic), and those scores rescale the
//! document-term matrix before a multinomial Naive Bayes model is trained on
//! it. The [`evaluation`] module scores the result with precision, recall,
//! F-score, G-mean, ROC AUC, PR AUC and the Kolmogorov-Smirnov statistic under
//! stratified cross-validation.
//!
//! The stages are exposed individually so each one can be driven and tested
//! on its own; [`pipeline`] wires them together from a flat configuration.

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        assert!((a - b).abs() <= $tol, "{} vs {} (tol {})", a, b, $tol);
    }};
}

pub mod classifier;
pub mod clustering;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod pipeline;
pub mod textproc;
pub mod weighting;

pub use classifier::{Classifier, NbModel, ScoredPrediction};
pub use clustering::{ClusterModel, ClusterParams, ClusterScope};
pub use corpus::{Corpus, Document, Label, SyntheticSpec};
pub use error::{Error, Result};
pub use evaluation::{ConfusionMatrix, EvalParams, EvalReport};
pub use features::{FeatureMatrix, SparseVector, Vocabulary, WeightingScheme};
pub use pipeline::PipelineConfig;
pub use textproc::TokenizerConfig;
pub use weighting::{AdjustParams, TermTopicScores};
