//! Shared fixtures for the benchmarks.

use mixcat_core::clustering::{distribute_frequencies, soft_clusters};
use mixcat_core::synthetic::{generate, split, SyntheticSpec};
use mixcat_core::{ClusterWordDistribution, FrequencyTable, LabeledCorpus};

/// Train and test halves of the default synthetic corpus.
pub fn corpus() -> (LabeledCorpus, LabeledCorpus) {
    split(&generate(&SyntheticSpec::default()), 4)
}

/// Soft-cluster word distributions over all categories of `corpus`, plus
/// the training tokens of its first category.
pub fn em_problem(corpus: &LabeledCorpus, gamma: f64) -> (ClusterWordDistribution, Vec<String>) {
    let table = FrequencyTable::from_corpus(corpus);
    let clustering = soft_clusters(&table, gamma).expect("valid gamma");
    let freqs = distribute_frequencies(&table, &clustering).expect("related categories");
    let dists = ClusterWordDistribution::from_frequencies(&freqs).expect("non-empty clusters");
    let category = &corpus.categories[0];
    let tokens = corpus
        .documents
        .iter()
        .filter(|d| d.has_label(category))
        .flat_map(|d| d.tokens.iter())
        .filter(|t| dists.covers(t))
        .cloned()
        .collect();
    (dists, tokens)
}
