//! Probabilistic text categorization.
//!
//! Three likelihood-based binary classifiers (word-based, hard-cluster and
//! finite-mixture) plus a cosine-similarity baseline. Each category is
//! tested against its complement; a document is accepted, rejected or left
//! unclassified depending on how far its per-token log-likelihood ratio is
//! from a threshold `epsilon`. The [`eval`] module sweeps `epsilon` and
//! reports micro-averaged precision/recall and the break-even point.
//!
//! Pipeline for the mixture model:
//!
//! 1. [`corpus::parse_corpus`] reads `labels<TAB>tokens` lines.
//! 2. [`counts::FrequencyTable`] counts words per category.
//! 3. [`clustering::soft_clusters`] assigns words to category-related clusters.
//! 4. [`clustering::distribute_frequencies`] splits shared words across clusters.
//! 5. [`estimation::mle_word_distribution`] and [`estimation::em_fit`] estimate
//!    the mixture components and weights.
//! 6. [`models::MixtureModel`] scores documents; [`models::decide`] applies the
//!    threshold rule.
//!
//! ```
//! use mixcat_core::corpus::parse_str;
//! use mixcat_core::models::train;
//! use mixcat_core::{Outcome, TrainSettings};
//!
//! let corpus = parse_str("c1\tracket shot ball\nc2\tgoal kick ball\n")?;
//! let model = train(&corpus, "c1", &TrainSettings::fmm(0.4))?.model;
//! let decision = model.classify(&["kick", "ball"], 0.0);
//! assert_eq!(decision.outcome, Outcome::Negative);
//! # Ok::<(), mixcat_core::Error>(())
//! ```

pub mod clustering;
pub mod corpus;
pub mod counts;
mod error;
pub mod estimation;
pub mod eval;
pub mod models;
pub mod synthetic;

pub use clustering::{Clustering, DistributedFrequencies};
pub use corpus::{LabelPolicy, LabeledCorpus, LabeledDocument, PoolRule};
pub use counts::FrequencyTable;
pub use error::{Error, Result};
pub use estimation::{ClusterWordDistribution, EmConfig, SimplexVector};
pub use eval::{BreakEven, ContingencyCounts, PairDecision, PrCurve, PrPoint};
pub use models::{
    decide, decide_score, CosineModel, Decision, HardClusterModel, HcmScheme, Method, MixtureModel,
    ModelFile, Outcome, SideScores, TrainSettings, TrainedModel, WordModel,
};
