//! Category-vs-complement classifiers and the threshold decision rule.
//!
//! Every model scores a document against a list of *sides*. Trained binary
//! models have two sides, the category `c` and its complement; the
//! constructors taking a [`FrequencyTable`] accept any number of categories.
//!
//! Likelihood models return per-side natural-log likelihoods together with
//! the number of tokens that contributed (`N'`). Tokens that are discarded
//! by the clustering or absent from the training vocabulary are skipped and
//! do not count toward `N'`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::clustering::{
    check_gamma, distribute_frequencies, guthrie_clusters, soft_clusters, Clustering,
};
use crate::corpus::{LabeledCorpus, PoolRule};
use crate::counts::{cluster_frequencies, FrequencyTable};
use crate::error::{Error, Result};
use crate::estimation::{
    ele_distribution, em_fit_observations, ClusterWordDistribution, EmConfig, EmFit, Observations,
    SimplexVector,
};

/// Lower bound applied to per-token probabilities before taking the log.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

pub const SCHEMA_VERSION: u32 = 1;

fn ln_floored(p: f64) -> f64 {
    p.max(PROBABILITY_FLOOR).ln()
}

/// Name of the complement side of `category`.
pub fn complement_name(category: &str) -> String {
    format!("not-{category}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Wbm,
    Hcm,
    Fmm,
    Cos,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Wbm => "wbm",
            Method::Hcm => "hcm",
            Method::Fmm => "fmm",
            Method::Cos => "cos",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wbm" => Ok(Method::Wbm),
            "hcm" => Ok(Method::Hcm),
            "fmm" => Ok(Method::Fmm),
            "cos" => Ok(Method::Cos),
            other => Err(Error::InvalidParameter {
                name: "method",
                message: format!("unknown method `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Positive,
    Negative,
    Unclassified,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Positive => "positive",
            Outcome::Negative => "negative",
            Outcome::Unclassified => "unclassified",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub outcome: Outcome,
    /// `(ln L(d|c) - ln L(d|not c)) / N'` for likelihood models, the
    /// similarity difference for the cosine model. `None` without evidence.
    pub score: Option<f64>,
}

impl Decision {
    pub const NO_EVIDENCE: Decision = Decision {
        outcome: Outcome::Unclassified,
        score: None,
    };
}

/// Thresholds a score: positive if `score > epsilon`, negative if
/// `-score >= epsilon`, unclassified otherwise. Exact ties at `epsilon = 0`
/// therefore go to the complement.
pub fn decide_score(score: Option<f64>, epsilon: f64) -> Decision {
    let Some(s) = score else {
        return Decision::NO_EVIDENCE;
    };
    let outcome = if s > epsilon {
        Outcome::Positive
    } else if -s >= epsilon {
        Outcome::Negative
    } else {
        Outcome::Unclassified
    };
    Decision {
        outcome,
        score: Some(s),
    }
}

/// The likelihood-ratio rule on per-token normalized log likelihoods.
pub fn decide(log_pos: f64, log_neg: f64, used_tokens: usize, epsilon: f64) -> Decision {
    if used_tokens == 0 {
        return Decision::NO_EVIDENCE;
    }
    let n = used_tokens as f64;
    let pos_margin = (log_pos - log_neg) / n;
    let neg_margin = (log_neg - log_pos) / n;
    let outcome = if pos_margin > epsilon {
        Outcome::Positive
    } else if neg_margin >= epsilon {
        Outcome::Negative
    } else {
        Outcome::Unclassified
    };
    Decision {
        outcome,
        score: Some(pos_margin),
    }
}

/// Per-side log likelihoods of one document.
#[derive(Debug, Clone, PartialEq)]
pub struct SideScores {
    pub log_likelihoods: Vec<f64>,
    /// `N'`: tokens that contributed to the likelihoods.
    pub used_tokens: usize,
}

impl SideScores {
    fn zeros(sides: usize) -> Self {
        Self {
            log_likelihoods: vec![0.0; sides],
            used_tokens: 0,
        }
    }

    /// Index of the best side; the first one wins ties.
    pub fn argmax(&self) -> Option<usize> {
        if self.used_tokens == 0 {
            return None;
        }
        let mut best = 0;
        for (i, &l) in self.log_likelihoods.iter().enumerate() {
            if l > self.log_likelihoods[best] {
                best = i;
            }
        }
        Some(best)
    }

    pub fn decide(&self, epsilon: f64) -> Decision {
        decide(
            self.log_likelihoods[0],
            self.log_likelihoods[1],
            self.used_tokens,
            epsilon,
        )
    }
}

/// Word-based model: one smoothed histogram over the vocabulary per side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordModel {
    sides: Vec<String>,
    probabilities: Vec<BTreeMap<String, f64>>,
}

impl WordModel {
    /// `P(w|c) = (f(w|c) + 0.5) / (f(c) + 0.5 |W|)`.
    pub fn from_table(table: &FrequencyTable) -> Self {
        let words: Vec<&str> = table.vocabulary().collect();
        let probabilities = (0..table.categories().len())
            .map(|i| {
                let counts: Vec<u64> = words.iter().map(|w| table.count(w, i)).collect();
                let ele = if counts.is_empty() {
                    Vec::new()
                } else {
                    ele_distribution(&counts).into()
                };
                words.iter().map(|w| w.to_string()).zip(ele).collect()
            })
            .collect();
        Self {
            sides: table.categories().to_vec(),
            probabilities,
        }
    }

    pub fn sides(&self) -> &[String] {
        &self.sides
    }

    pub fn prob(&self, side: usize, word: &str) -> Option<f64> {
        self.probabilities[side].get(word).copied()
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.probabilities
            .first()
            .into_iter()
            .flat_map(|m| m.keys().map(String::as_str))
    }

    pub fn score<S: AsRef<str>>(&self, tokens: &[S]) -> SideScores {
        let mut out = SideScores::zeros(self.sides.len());
        for token in tokens {
            let token = token.as_ref();
            if !self.probabilities[0].contains_key(token) {
                continue;
            }
            out.used_tokens += 1;
            for (l, probs) in out.log_likelihoods.iter_mut().zip(&self.probabilities) {
                *l += ln_floored(probs[token]);
            }
        }
        out
    }
}

/// Hard-cluster model: documents are scored through the cluster of each word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardClusterModel {
    sides: Vec<String>,
    clustering: Clustering,
    cluster_probabilities: Vec<SimplexVector>,
}

impl HardClusterModel {
    /// Cluster distributions `P(k_j|c_i)` by the expected likelihood estimator.
    pub fn from_table(table: &FrequencyTable, clustering: Clustering) -> Result<Self> {
        if !clustering.is_disjoint() {
            return Err(Error::InvalidParameter {
                name: "clustering",
                message: "hard-cluster model needs disjoint clusters".into(),
            });
        }
        if clustering.is_empty() {
            return Err(Error::InvalidParameter {
                name: "clustering",
                message: "no clusters".into(),
            });
        }
        let freqs = cluster_frequencies(table, &clustering);
        Ok(Self {
            sides: table.categories().to_vec(),
            cluster_probabilities: freqs.iter().map(|row| ele_distribution(row)).collect(),
            clustering,
        })
    }

    pub fn from_parts(
        sides: Vec<String>,
        clustering: Clustering,
        cluster_probabilities: Vec<SimplexVector>,
    ) -> Result<Self> {
        if !clustering.is_disjoint()
            || sides.len() != cluster_probabilities.len()
            || cluster_probabilities
                .iter()
                .any(|p| p.len() != clustering.len())
        {
            return Err(Error::InvalidParameter {
                name: "hard-cluster model",
                message: "inconsistent sides, clusters and probabilities".into(),
            });
        }
        Ok(Self {
            sides,
            clustering,
            cluster_probabilities,
        })
    }

    pub fn sides(&self) -> &[String] {
        &self.sides
    }

    pub fn clustering(&self) -> &Clustering {
        &self.clustering
    }

    /// `P(k_j|side)`.
    pub fn cluster_probabilities(&self, side: usize) -> &SimplexVector {
        &self.cluster_probabilities[side]
    }

    /// A copy whose probabilities are rounded to `decimals` places and no
    /// longer renormalized, for comparison with hand-computed tables.
    pub fn rounded(&self, decimals: i32) -> Self {
        Self {
            sides: self.sides.clone(),
            clustering: self.clustering.clone(),
            cluster_probabilities: self
                .cluster_probabilities
                .iter()
                .map(|p| SimplexVector::from_raw_unchecked(p.rounded(decimals)))
                .collect(),
        }
    }

    pub fn score<S: AsRef<str>>(&self, tokens: &[S]) -> SideScores {
        let mut out = SideScores::zeros(self.sides.len());
        for token in tokens {
            let Some(&j) = self.clustering.clusters_of(token.as_ref()).first() else {
                continue;
            };
            out.used_tokens += 1;
            for (l, probs) in out
                .log_likelihoods
                .iter_mut()
                .zip(&self.cluster_probabilities)
            {
                *l += ln_floored(probs[j]);
            }
        }
        out
    }
}

/// Finite mixture model: `P(w|c) = sum_j P(k_j|c) P(w|k_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureModel {
    sides: Vec<String>,
    clustering: Clustering,
    word_distributions: ClusterWordDistribution,
    thetas: Vec<SimplexVector>,
}

impl MixtureModel {
    pub fn from_parts(
        sides: Vec<String>,
        clustering: Clustering,
        word_distributions: ClusterWordDistribution,
        thetas: Vec<SimplexVector>,
    ) -> Result<Self> {
        let m = clustering.len();
        if word_distributions.len() != m
            || sides.len() != thetas.len()
            || thetas.iter().any(|t| t.len() != m)
        {
            return Err(Error::InvalidParameter {
                name: "mixture model",
                message: "inconsistent sides, clusters, distributions and weights".into(),
            });
        }
        for j in 0..m {
            if let Some(w) = word_distributions
                .row(j)
                .keys()
                .find(|w| !clustering.cluster(j).contains(*w))
            {
                return Err(Error::InvalidParameter {
                    name: "mixture model",
                    message: format!("`{w}` has probability in cluster {j} but is not a member"),
                });
            }
        }
        Ok(Self {
            sides,
            clustering,
            word_distributions,
            thetas,
        })
    }

    /// The mixture equivalent of a hard-cluster model: uniform `1/|k_j|`
    /// within each cluster and the hard model's cluster distributions as
    /// weights. Log likelihoods differ from the hard model's by a constant
    /// that does not depend on the side.
    pub fn from_hard_clusters(model: &HardClusterModel) -> Result<Self> {
        let rows = model
            .clustering
            .clusters()
            .iter()
            .map(|k| {
                let p = 1.0 / k.len() as f64;
                k.iter().map(|w| (w.clone(), p)).collect()
            })
            .collect();
        Self::from_parts(
            model.sides.clone(),
            model.clustering.clone(),
            ClusterWordDistribution::new(rows)?,
            model.cluster_probabilities.clone(),
        )
    }

    /// The mixture equivalent of a word-based model: one cluster per side
    /// spanning the whole vocabulary, `P(w|k_j) = P(w|c_j)` and indicator
    /// weights.
    pub fn from_word_model(model: &WordModel) -> Result<Self> {
        let n = model.sides.len();
        let vocab: BTreeSet<String> = model.vocabulary().map(str::to_string).collect();
        let clustering =
            Clustering::from_parts(vec![vocab; n], BTreeSet::new(), Some((0..n).collect()))?;
        Self::from_parts(
            model.sides.clone(),
            clustering,
            ClusterWordDistribution::new(model.probabilities.clone())?,
            (0..n).map(|i| SimplexVector::vertex(n, i)).collect(),
        )
    }

    pub fn sides(&self) -> &[String] {
        &self.sides
    }

    pub fn clustering(&self) -> &Clustering {
        &self.clustering
    }

    pub fn word_distributions(&self) -> &ClusterWordDistribution {
        &self.word_distributions
    }

    /// `P(k_j|side)`.
    pub fn theta(&self, side: usize) -> &SimplexVector {
        &self.thetas[side]
    }

    /// `P(w|side)`, or `None` for discarded and unknown words.
    pub fn word_probability(&self, side: usize, word: &str) -> Option<f64> {
        let ids = self.clustering.clusters_of(word);
        if ids.is_empty() {
            return None;
        }
        let theta = &self.thetas[side];
        Some(
            ids.iter()
                .map(|&j| theta[j] * self.word_distributions.prob(j, word))
                .sum(),
        )
    }

    /// A copy with weights and word probabilities rounded to `decimals`
    /// places and not renormalized, for comparison with hand-computed tables.
    pub fn rounded(&self, decimals: i32) -> Self {
        Self {
            sides: self.sides.clone(),
            clustering: self.clustering.clone(),
            word_distributions: ClusterWordDistribution::from_rows_unchecked(
                self.word_distributions.rounded_rows(decimals),
            ),
            thetas: self
                .thetas
                .iter()
                .map(|t| SimplexVector::from_raw_unchecked(t.rounded(decimals)))
                .collect(),
        }
    }

    pub fn score<S: AsRef<str>>(&self, tokens: &[S]) -> SideScores {
        let mut out = SideScores::zeros(self.sides.len());
        for token in tokens {
            let token = token.as_ref();
            if self.clustering.clusters_of(token).is_empty() {
                continue;
            }
            out.used_tokens += 1;
            for (side, l) in out.log_likelihoods.iter_mut().enumerate() {
                *l += ln_floored(self.word_probability(side, token).unwrap_or(0.0));
            }
        }
        out
    }
}

/// Cosine baseline: one raw word-frequency vector per side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineModel {
    sides: Vec<String>,
    vectors: Vec<BTreeMap<String, f64>>,
}

impl CosineModel {
    pub fn from_table(table: &FrequencyTable) -> Self {
        let vectors = (0..table.categories().len())
            .map(|i| {
                table
                    .rows()
                    .filter(|(_, row)| row[i] > 0)
                    .map(|(w, row)| (w.to_string(), row[i] as f64))
                    .collect()
            })
            .collect();
        Self {
            sides: table.categories().to_vec(),
            vectors,
        }
    }

    pub fn sides(&self) -> &[String] {
        &self.sides
    }

    pub fn vector(&self, side: usize) -> &BTreeMap<String, f64> {
        &self.vectors[side]
    }

    /// Cosine similarity of the document's frequency vector with every side.
    /// Words unseen in training are ignored; `None` if nothing is left.
    pub fn similarities<S: AsRef<str>>(&self, tokens: &[S]) -> Option<Vec<f64>> {
        let mut doc: BTreeMap<&str, f64> = BTreeMap::new();
        for token in tokens {
            let token = token.as_ref();
            if self.vectors.iter().any(|v| v.contains_key(token)) {
                *doc.entry(token).or_default() += 1.0;
            }
        }
        if doc.is_empty() {
            return None;
        }
        let doc_norm = doc.values().map(|x| x * x).sum::<f64>().sqrt();
        Some(
            self.vectors
                .iter()
                .map(|v| {
                    let norm = v.values().map(|x| x * x).sum::<f64>().sqrt();
                    if norm == 0.0 {
                        return 0.0;
                    }
                    let dot: f64 = doc.iter().map(|(w, x)| x * v.get(*w).unwrap_or(&0.0)).sum();
                    dot / (doc_norm * norm)
                })
                .collect(),
        )
    }

    /// Same threshold rule as the likelihood models, applied to
    /// `cos(d, c) - cos(d, not c)`.
    pub fn decide<S: AsRef<str>>(&self, tokens: &[S], epsilon: f64) -> Decision {
        decide_score(self.score(tokens), epsilon)
    }

    pub fn score<S: AsRef<str>>(&self, tokens: &[S]) -> Option<f64> {
        self.similarities(tokens).map(|s| s[0] - s[1])
    }
}

/// Cluster construction for the hard-cluster model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HcmScheme {
    Gamma(f64),
    Guthrie { l: usize, m: usize },
}

/// Everything that determines a trained model besides the corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSettings {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guthrie: Option<(usize, usize)>,
    #[serde(default)]
    pub em: EmConfig,
    #[serde(default)]
    pub pool_rule: PoolRule,
}

impl TrainSettings {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            gamma: None,
            guthrie: None,
            em: EmConfig::default(),
            pool_rule: PoolRule::default(),
        }
    }

    pub fn fmm(gamma: f64) -> Self {
        Self {
            gamma: Some(gamma),
            ..Self::new(Method::Fmm)
        }
    }

    pub fn hcm_gamma(gamma: f64) -> Self {
        Self {
            gamma: Some(gamma),
            ..Self::new(Method::Hcm)
        }
    }

    pub fn hcm_guthrie(l: usize, m: usize) -> Self {
        Self {
            guthrie: Some((l, m)),
            ..Self::new(Method::Hcm)
        }
    }

    /// Rejects parameter combinations that do not apply to the method.
    pub fn validate(&self) -> Result<()> {
        let invalid = |message: &str| {
            Err(Error::InvalidParameter {
                name: "settings",
                message: format!("{}: {message}", self.method),
            })
        };
        match self.method {
            Method::Fmm => {
                if self.guthrie.is_some() {
                    return invalid("the L/M scheme only applies to hcm");
                }
                match self.gamma {
                    Some(g) => check_gamma(g, 0.0)?,
                    None => return invalid("gamma is required"),
                }
                self.em.validate()?;
            }
            Method::Hcm => match (self.gamma, self.guthrie) {
                (Some(g), None) => check_gamma(g, 0.5)?,
                (None, Some((l, m))) if l >= 1 && m >= 1 => {}
                (None, Some(_)) => return invalid("L and M must be at least 1"),
                (Some(_), Some(_)) => return invalid("give either gamma or L/M, not both"),
                (None, None) => return invalid("gamma or L/M is required"),
            },
            Method::Wbm | Method::Cos => {
                if self.gamma.is_some() || self.guthrie.is_some() {
                    return invalid("takes no clustering parameters");
                }
            }
        }
        Ok(())
    }

    pub fn hcm_scheme(&self) -> Option<HcmScheme> {
        match (self.gamma, self.guthrie) {
            (Some(g), None) => Some(HcmScheme::Gamma(g)),
            (None, Some((l, m))) => Some(HcmScheme::Guthrie { l, m }),
            _ => None,
        }
    }
}

/// A trained binary classifier of any kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum TrainedModel {
    Wbm(WordModel),
    Hcm(HardClusterModel),
    Fmm(MixtureModel),
    Cos(CosineModel),
}

impl TrainedModel {
    pub fn method(&self) -> Method {
        match self {
            TrainedModel::Wbm(_) => Method::Wbm,
            TrainedModel::Hcm(_) => Method::Hcm,
            TrainedModel::Fmm(_) => Method::Fmm,
            TrainedModel::Cos(_) => Method::Cos,
        }
    }

    pub fn sides(&self) -> &[String] {
        match self {
            TrainedModel::Wbm(m) => m.sides(),
            TrainedModel::Hcm(m) => m.sides(),
            TrainedModel::Fmm(m) => m.sides(),
            TrainedModel::Cos(m) => m.sides(),
        }
    }

    /// Per-side log likelihoods; `None` for the cosine model.
    pub fn side_scores<S: AsRef<str>>(&self, tokens: &[S]) -> Option<SideScores> {
        match self {
            TrainedModel::Wbm(m) => Some(m.score(tokens)),
            TrainedModel::Hcm(m) => Some(m.score(tokens)),
            TrainedModel::Fmm(m) => Some(m.score(tokens)),
            TrainedModel::Cos(_) => None,
        }
    }

    /// The quantity compared against `epsilon`, or `None` without evidence.
    pub fn score<S: AsRef<str>>(&self, tokens: &[S]) -> Option<f64> {
        match self {
            TrainedModel::Cos(m) => m.score(tokens),
            _ => self.classify(tokens, 0.0).score,
        }
    }

    pub fn classify<S: AsRef<str>>(&self, tokens: &[S], epsilon: f64) -> Decision {
        match self {
            TrainedModel::Cos(m) => m.decide(tokens, epsilon),
            other => other
                .side_scores(tokens)
                .expect("likelihood model")
                .decide(epsilon),
        }
    }
}

/// A trained model plus the per-side EM runs that produced its weights.
#[derive(Debug, Clone)]
pub struct Training {
    pub model: TrainedModel,
    /// `(side, fit)` for mixture models, empty otherwise.
    pub em_fits: Vec<(String, EmFit)>,
}

/// Two-category table `[category, complement]` and the matching token pools.
pub fn binary_table<'a>(
    corpus: &'a LabeledCorpus,
    category: &str,
    rule: PoolRule,
) -> Result<(FrequencyTable, [Vec<&'a str>; 2])> {
    let (pos, neg) = corpus.complement_pools(category, rule)?;
    let names = vec![category.to_string(), complement_name(category)];
    for (name, pool) in names.iter().zip([&pos, &neg]) {
        if pool.is_empty() {
            return Err(Error::EmptySide(name.clone()));
        }
    }
    let table = FrequencyTable::from_pools(names, &[&pos[..], &neg[..]]);
    Ok((table, [pos, neg]))
}

pub fn train_wbm(corpus: &LabeledCorpus, category: &str, rule: PoolRule) -> Result<WordModel> {
    let (table, _) = binary_table(corpus, category, rule)?;
    Ok(WordModel::from_table(&table))
}

pub fn train_cos(corpus: &LabeledCorpus, category: &str, rule: PoolRule) -> Result<CosineModel> {
    let (table, _) = binary_table(corpus, category, rule)?;
    Ok(CosineModel::from_table(&table))
}

pub fn train_hcm(
    corpus: &LabeledCorpus,
    category: &str,
    scheme: HcmScheme,
    rule: PoolRule,
) -> Result<HardClusterModel> {
    let (table, _) = binary_table(corpus, category, rule)?;
    hcm_from_table(&table, scheme)
}

pub fn hcm_from_table(table: &FrequencyTable, scheme: HcmScheme) -> Result<HardClusterModel> {
    let clustering = match scheme {
        HcmScheme::Gamma(g) => {
            check_gamma(g, 0.5)?;
            soft_clusters(table, g)?
        }
        HcmScheme::Guthrie { l, m } => guthrie_clusters(table, l, m)?,
    };
    HardClusterModel::from_table(table, clustering)
}

/// Builds the mixture model for the category/complement split of `corpus`.
pub fn train_fmm(
    corpus: &LabeledCorpus,
    category: &str,
    gamma: f64,
    em: &EmConfig,
    rule: PoolRule,
) -> Result<(MixtureModel, Vec<(String, EmFit)>)> {
    check_gamma(gamma, 0.0)?;
    let (table, pools) = binary_table(corpus, category, rule)?;
    fmm_from_pools(&table, &pools, gamma, em)
}

/// Mixture model from a table and one training pool per category.
///
/// Clusters left empty by the threshold are dropped before estimation.
pub fn fmm_from_pools<S: AsRef<str>>(
    table: &FrequencyTable,
    pools: &[Vec<S>],
    gamma: f64,
    em: &EmConfig,
) -> Result<(MixtureModel, Vec<(String, EmFit)>)> {
    em.validate()?;
    let clustering = soft_clusters(table, gamma)?;
    let clustering = clustering.retain_clusters(|j| !clustering.cluster(j).is_empty())?;
    let freqs = distribute_frequencies(table, &clustering)?;
    let dists = ClusterWordDistribution::from_frequencies(&freqs)?;
    let mut thetas = Vec::with_capacity(pools.len());
    let mut fits = Vec::with_capacity(pools.len());
    for (name, pool) in table.categories().iter().zip(pools) {
        let usable: Vec<&str> = pool
            .iter()
            .map(AsRef::as_ref)
            .filter(|w| !clustering.clusters_of(w).is_empty())
            .collect();
        if usable.is_empty() || clustering.is_empty() {
            return Err(Error::EmptySide(name.clone()));
        }
        let obs = Observations::new(&dists, &usable)?;
        let fit = em_fit_observations(&obs, dists.len(), em)?;
        thetas.push(fit.theta.clone());
        fits.push((name.clone(), fit));
    }
    let model = MixtureModel::from_parts(table.categories().to_vec(), clustering, dists, thetas)?;
    Ok((model, fits))
}

/// Trains the binary model described by `settings`.
pub fn train(corpus: &LabeledCorpus, category: &str, settings: &TrainSettings) -> Result<Training> {
    settings.validate()?;
    let rule = settings.pool_rule;
    let (model, em_fits) = match settings.method {
        Method::Wbm => (
            TrainedModel::Wbm(train_wbm(corpus, category, rule)?),
            Vec::new(),
        ),
        Method::Cos => (
            TrainedModel::Cos(train_cos(corpus, category, rule)?),
            Vec::new(),
        ),
        Method::Hcm => {
            let scheme = settings.hcm_scheme().expect("validated");
            (
                TrainedModel::Hcm(train_hcm(corpus, category, scheme, rule)?),
                Vec::new(),
            )
        }
        Method::Fmm => {
            let gamma = settings.gamma.expect("validated");
            let (model, fits) = train_fmm(corpus, category, gamma, &settings.em, rule)?;
            (TrainedModel::Fmm(model), fits)
        }
    };
    Ok(Training { model, em_fits })
}

/// Persisted form of a trained binary model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub category: String,
    pub settings: TrainSettings,
    /// Effective run configuration of the tool that wrote the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
    pub model: TrainedModel,
}

impl ModelFile {
    pub fn new(category: &str, settings: TrainSettings, model: TrainedModel) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            category: category.to_string(),
            settings,
            config: None,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Version {
            schema_version: u32,
        }
        let version: Version = serde_json::from_str(text)?;
        if version.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion(version.schema_version));
        }
        Ok(serde_json::from_str(text)?)
    }
}

/// `ln` to `log2`.
pub fn to_log2(ln_value: f64) -> f64 {
    ln_value / std::f64::consts::LN_2
}
