//! Two-stage consumer health search.
//!
//! Stage one decides whether a sentence is relevant to a health query using
//! five lexical similarity features. Stage two assigns a stance (support,
//! oppose, neutral) to each sentence from a bag-of-words TF-IDF block plus
//! sentiment word counts and the stage-one relevance flag. Both stages use
//! the kernel SVM in [`svm`].
//!
//! Module layout follows the data flow:
//!
//! - [`corpus`]: CSV datasets, query grouping, seeded train/dev splits
//! - [`textproc`]: tokenizer, Porter stemmer, sentence splitter
//! - [`lexicons`]: gloss dictionary, sentiment lexicon, noun list
//! - [`features`]: similarity features and TF-IDF vocabularies
//! - [`svm`]: SMO solver, kernels, one-vs-one multiclass
//! - [`pipeline`]: training, chained prediction, evaluation, grid search

pub mod corpus;
pub mod features;
pub mod lexicons;
pub mod pipeline;
pub mod svm;
pub mod textproc;

pub use corpus::{QueryGroup, Relevance, SentenceRecord, Stance};
pub use features::{FeatureVector, VocabularyModel};
pub use pipeline::{EvaluationReport, PipelineConfig, StanceMode, TrainedPipeline};
pub use svm::{KernelConfig, MulticlassModel, SvmConfig};
