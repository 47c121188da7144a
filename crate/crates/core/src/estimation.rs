//! Parameter estimation.
//!
//! * [`ele_distribution`]: add-one-half smoothed histogram.
//! * [`mle_word_distribution`]: within-cluster word probabilities from
//!   distributed frequencies.
//! * [`em_fit`]: mixture weights `theta` maximizing the per-token log
//!   likelihood `L(theta) = 1/N sum_t ln sum_j theta_j P_j(w_t)`, using the
//!   multiplicative update `theta_j <- theta_j (eta (dL/dtheta_j - 1) + 1)`.
//!   `eta = 1` is the standard EM update.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clustering::{ratio_to_f64, DistributedFrequencies};
use crate::error::{Error, Result};

const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// A probability vector: non-negative components summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter {
                name: "simplex",
                message: "no components".into(),
            });
        }
        if components.iter().any(|&c| !(0.0..=1.0).contains(&c)) {
            return Err(Error::InvalidParameter {
                name: "simplex",
                message: format!("component outside [0, 1] in {components:?}"),
            });
        }
        let sum: f64 = components.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::InvalidParameter {
                name: "simplex",
                message: format!("components sum to {sum}"),
            });
        }
        Ok(Self(components))
    }

    pub fn uniform(m: usize) -> Self {
        assert!(m > 0);
        Self(vec![1.0 / m as f64; m])
    }

    /// The vertex `e_j` of the `m`-simplex.
    pub fn vertex(m: usize, j: usize) -> Self {
        let mut v = vec![0.0; m];
        v[j] = 1.0;
        Self(v)
    }

    pub(crate) fn from_raw_unchecked(components: Vec<f64>) -> Self {
        Self(components)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Each component rounded to `decimals` places, without renormalizing.
    pub fn rounded(&self, decimals: i32) -> Vec<f64> {
        self.0.iter().map(|&x| round_to(x, decimals)).collect()
    }
}

impl std::ops::Index<usize> for SimplexVector {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

impl TryFrom<Vec<f64>> for SimplexVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SimplexVector> for Vec<f64> {
    fn from(v: SimplexVector) -> Self {
        v.0
    }
}

pub(crate) fn round_to(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round() / scale
}

/// Expected likelihood estimate `(f_j + 0.5) / (sum f + 0.5 m)` with `m = counts.len()`.
pub fn ele_distribution(counts: &[u64]) -> SimplexVector {
    assert!(!counts.is_empty(), "ELE needs at least one cell");
    let m = counts.len() as f64;
    let total: u64 = counts.iter().sum();
    let denom = total as f64 + 0.5 * m;
    SimplexVector(counts.iter().map(|&c| (c as f64 + 0.5) / denom).collect())
}

/// `P(w|k_j)` for each cluster: zero outside the cluster, normalized inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<BTreeMap<String, f64>>",
    into = "Vec<BTreeMap<String, f64>>"
)]
pub struct ClusterWordDistribution {
    rows: Vec<BTreeMap<String, f64>>,
}

impl ClusterWordDistribution {
    /// Validates that every row is a probability distribution or empty (a
    /// cluster without words). Zero entries are dropped.
    pub fn new(rows: Vec<BTreeMap<String, f64>>) -> Result<Self> {
        let mut clean = Vec::with_capacity(rows.len());
        for (j, row) in rows.into_iter().enumerate() {
            if row.values().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidParameter {
                    name: "word distribution",
                    message: format!("cluster {j} has a probability outside [0, 1]"),
                });
            }
            let sum: f64 = row.values().sum();
            if !row.is_empty() && (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
                return Err(Error::InvalidParameter {
                    name: "word distribution",
                    message: format!("cluster {j} sums to {sum}"),
                });
            }
            clean.push(row.into_iter().filter(|(_, p)| *p > 0.0).collect());
        }
        Ok(Self { rows: clean })
    }

    /// Maximum likelihood estimate for every cluster of `freqs`.
    pub fn from_frequencies(freqs: &DistributedFrequencies) -> Result<Self> {
        let rows = (0..freqs.len())
            .map(|j| mle_word_distribution(freqs, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows })
    }

    /// Number of clusters.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `P_j(w)`.
    pub fn prob(&self, cluster: usize, word: &str) -> f64 {
        self.rows[cluster].get(word).copied().unwrap_or(0.0)
    }

    pub fn row(&self, cluster: usize) -> &BTreeMap<String, f64> {
        &self.rows[cluster]
    }

    /// `(P_1(w), ..., P_m(w))`.
    pub fn column(&self, word: &str) -> Vec<f64> {
        (0..self.len()).map(|j| self.prob(j, word)).collect()
    }

    pub fn covers(&self, word: &str) -> bool {
        self.rows.iter().any(|r| r.contains_key(word))
    }

    /// Every probability rounded to `decimals` places, without renormalizing.
    pub fn rounded_rows(&self, decimals: i32) -> Vec<BTreeMap<String, f64>> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|(w, &p)| (w.clone(), round_to(p, decimals)))
                    .collect()
            })
            .collect()
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<BTreeMap<String, f64>>) -> Self {
        Self { rows }
    }
}

impl TryFrom<Vec<BTreeMap<String, f64>>> for ClusterWordDistribution {
    type Error = Error;

    fn try_from(rows: Vec<BTreeMap<String, f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<ClusterWordDistribution> for Vec<BTreeMap<String, f64>> {
    fn from(d: ClusterWordDistribution) -> Self {
        d.rows
    }
}

/// `P(w|k_j) = f(w|k_j) / f(k_j)`.
pub fn mle_word_distribution(
    freqs: &DistributedFrequencies,
    cluster: usize,
) -> Result<BTreeMap<String, f64>> {
    let total = freqs.cluster_total(cluster);
    if total <= 0.0 {
        return Err(Error::EmptyCluster(cluster));
    }
    Ok(freqs
        .words(cluster)
        .filter(|(_, f)| *f.numer() > 0)
        .map(|(w, f)| (w.to_string(), ratio_to_f64(f) / total))
        .collect())
}

/// A token sequence aggregated by word type: each distinct word contributes
/// its multiplicity and its column `(P_1(w), ..., P_m(w))`.
#[derive(Debug, Clone)]
pub struct Observations {
    rows: Vec<(f64, Vec<f64>)>,
    tokens: f64,
}

impl Observations {
    /// Fails on an empty sequence or a word with zero probability in every cluster.
    pub fn new<S: AsRef<str>>(dists: &ClusterWordDistribution, tokens: &[S]) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::EmptyTokens);
        }
        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
        for t in tokens {
            *counts.entry(t.as_ref()).or_default() += 1;
        }
        let mut rows = Vec::with_capacity(counts.len());
        for (word, count) in counts {
            let column = dists.column(word);
            if column.iter().all(|&p| p == 0.0) {
                return Err(Error::UncoveredWord(word.to_string()));
            }
            rows.push((count as f64, column));
        }
        Ok(Self {
            rows,
            tokens: tokens.len() as f64,
        })
    }

    pub fn token_count(&self) -> usize {
        self.tokens as usize
    }

    pub fn clusters(&self) -> usize {
        self.rows.first().map_or(0, |(_, c)| c.len())
    }

    pub fn log_likelihood(&self, theta: &SimplexVector) -> f64 {
        let total: f64 = self
            .rows
            .iter()
            .map(|(count, column)| count * mix(theta.as_slice(), column).ln())
            .sum();
        total / self.tokens
    }

    pub fn gradient(&self, theta: &SimplexVector) -> Vec<f64> {
        let mut grad = vec![0.0; theta.len()];
        for (count, column) in &self.rows {
            let weight = count / mix(theta.as_slice(), column);
            for (g, p) in grad.iter_mut().zip(column) {
                *g += weight * p;
            }
        }
        grad.iter_mut().for_each(|g| *g /= self.tokens);
        grad
    }
}

fn mix(theta: &[f64], column: &[f64]) -> f64 {
    theta.iter().zip(column).map(|(t, p)| t * p).sum()
}

/// Per-token normalized log likelihood (natural log).
pub fn log_likelihood<S: AsRef<str>>(
    theta: &SimplexVector,
    dists: &ClusterWordDistribution,
    tokens: &[S],
) -> Result<f64> {
    Ok(Observations::new(dists, tokens)?.log_likelihood(theta))
}

/// `dL/dtheta_j = 1/N sum_t P_j(w_t) / sum_k theta_k P_k(w_t)`.
pub fn gradient<S: AsRef<str>>(
    theta: &SimplexVector,
    dists: &ClusterWordDistribution,
    tokens: &[S],
) -> Result<Vec<f64>> {
    Ok(Observations::new(dists, tokens)?.gradient(theta))
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "eta",
            message: format!("must lie in (0, 1], got {eta}"),
        })
    }
}

/// One update `theta_j <- theta_j (eta (grad_j - 1) + 1)`.
///
/// The result stays on the simplex whenever `sum_j theta_j grad_j = 1`, which
/// holds for the true gradient of the log likelihood.
pub fn em_step(theta: &SimplexVector, grad: &[f64], eta: f64) -> Result<SimplexVector> {
    check_eta(eta)?;
    assert_eq!(theta.len(), grad.len());
    Ok(SimplexVector(
        theta
            .0
            .iter()
            .zip(grad)
            .map(|(t, g)| (t * (eta * (g - 1.0) + 1.0)).max(0.0))
            .collect(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmConfig {
    pub eta: f64,
    pub max_iterations: usize,
    /// Stop once `|L(theta_l) - L(theta_{l-1})|` drops below this.
    pub tolerance: f64,
    /// `None` starts from the uniform vector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<SimplexVector>,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            eta: 1.0,
            max_iterations: 100,
            tolerance: 1e-8,
            initial: None,
        }
    }
}

impl EmConfig {
    pub fn validate(&self) -> Result<()> {
        check_eta(self.eta)?;
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "iterations",
                message: "must be at least 1".into(),
            });
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "tolerance",
                message: format!("must be positive, got {}", self.tolerance),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmFit {
    pub theta: SimplexVector,
    pub log_likelihood: f64,
    pub iterations: usize,
    /// `(iteration, L)` starting with the initial point at iteration 0.
    pub trace: Vec<(usize, f64)>,
}

/// Runs [`em_step`] until `max_iterations` or until the likelihood change
/// falls below `tolerance`.
pub fn em_fit<S: AsRef<str>>(
    dists: &ClusterWordDistribution,
    tokens: &[S],
    config: &EmConfig,
) -> Result<EmFit> {
    let obs = Observations::new(dists, tokens)?;
    em_fit_observations(&obs, dists.len(), config)
}

pub fn em_fit_observations(obs: &Observations, m: usize, config: &EmConfig) -> Result<EmFit> {
    config.validate()?;
    let mut theta = match &config.initial {
        Some(init) if init.len() != m => {
            return Err(Error::InvalidParameter {
                name: "initial",
                message: format!("{} components for {m} clusters", init.len()),
            })
        }
        Some(init) => init.clone(),
        None => SimplexVector::uniform(m),
    };
    let mut current = obs.log_likelihood(&theta);
    let mut trace = vec![(0, current)];
    let mut iterations = 0;
    for l in 1..=config.max_iterations {
        let grad = obs.gradient(&theta);
        theta = em_step(&theta, &grad, config.eta)?;
        let next = obs.log_likelihood(&theta);
        iterations = l;
        trace.push((l, next));
        if config.eta == 1.0 {
            debug_assert!(
                next >= current - 1e-12,
                "EM decreased L: {current} -> {next}"
            );
        }
        let delta = (next - current).abs();
        current = next;
        if delta < config.tolerance {
            break;
        }
    }
    Ok(EmFit {
        theta,
        log_likelihood: current,
        iterations,
        trace,
    })
}
