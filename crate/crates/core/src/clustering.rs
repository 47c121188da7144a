//! Word clusters.
//!
//! Two construction schemes are provided:
//!
//! * [`soft_clusters`]: one cluster per category; a word joins the cluster of
//!   every category in which its relative frequency exceeds `gamma`. Words
//!   that join no cluster are discarded and ignored at classification time.
//!   With `gamma >= 0.5` the clusters are pairwise disjoint.
//! * [`guthrie_clusters`]: the pairwise three-cluster scheme built from the
//!   top-`L` / top-`M` frequency lists of two categories.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::counts::FrequencyTable;
use crate::error::{Error, Result};

/// Clusters `k_1..k_m` over a vocabulary plus the set of discarded words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "RawClustering", try_from = "RawClustering")]
pub struct Clustering {
    clusters: Vec<BTreeSet<String>>,
    discarded: BTreeSet<String>,
    /// Cluster `j` is related to category `related[j]` (soft scheme only).
    related: Option<Vec<usize>>,
    membership: BTreeMap<String, Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawClustering {
    clusters: Vec<BTreeSet<String>>,
    discarded: BTreeSet<String>,
    related: Option<Vec<usize>>,
}

impl From<Clustering> for RawClustering {
    fn from(c: Clustering) -> Self {
        Self {
            clusters: c.clusters,
            discarded: c.discarded,
            related: c.related,
        }
    }
}

impl TryFrom<RawClustering> for Clustering {
    type Error = Error;

    fn try_from(raw: RawClustering) -> Result<Self> {
        Clustering::from_parts(raw.clusters, raw.discarded, raw.related)
    }
}

impl Clustering {
    pub fn from_parts(
        clusters: Vec<BTreeSet<String>>,
        discarded: BTreeSet<String>,
        related: Option<Vec<usize>>,
    ) -> Result<Self> {
        if let Some(rel) = &related {
            if rel.len() != clusters.len() {
                return Err(Error::InvalidParameter {
                    name: "related",
                    message: format!("{} relations for {} clusters", rel.len(), clusters.len()),
                });
            }
        }
        let mut membership: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (j, cluster) in clusters.iter().enumerate() {
            for word in cluster {
                if discarded.contains(word) {
                    return Err(Error::InvalidParameter {
                        name: "discarded",
                        message: format!("`{word}` is both clustered and discarded"),
                    });
                }
                membership.entry(word.clone()).or_default().push(j);
            }
        }
        Ok(Self {
            clusters,
            discarded,
            related,
            membership,
        })
    }

    /// A disjoint clustering; vocabulary words of `table` outside every group
    /// are discarded.
    pub fn hard(groups: Vec<BTreeSet<String>>, table: &FrequencyTable) -> Result<Self> {
        let discarded = table
            .vocabulary()
            .filter(|w| !groups.iter().any(|g| g.contains(*w)))
            .map(str::to_string)
            .collect();
        let clustering = Self::from_parts(groups, discarded, None)?;
        if !clustering.is_disjoint() {
            return Err(Error::InvalidParameter {
                name: "groups",
                message: "hard clusters must be pairwise disjoint".into(),
            });
        }
        Ok(clustering)
    }

    /// Number of clusters `m`.
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[BTreeSet<String>] {
        &self.clusters
    }

    pub fn cluster(&self, j: usize) -> &BTreeSet<String> {
        &self.clusters[j]
    }

    pub fn discarded(&self) -> &BTreeSet<String> {
        &self.discarded
    }

    pub fn is_discarded(&self, word: &str) -> bool {
        self.discarded.contains(word)
    }

    pub fn related(&self) -> Option<&[usize]> {
        self.related.as_deref()
    }

    /// Ids of the clusters containing `word`; empty for discarded and unknown words.
    pub fn clusters_of(&self, word: &str) -> &[usize] {
        self.membership.get(word).map_or(&[], Vec::as_slice)
    }

    pub fn is_disjoint(&self) -> bool {
        self.membership.values().all(|ids| ids.len() == 1)
    }

    /// Every clustered or discarded word.
    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.membership
            .keys()
            .chain(self.discarded.iter())
            .map(String::as_str)
    }

    /// Keeps only the clusters for which `keep` returns true, renumbering the
    /// rest. Words left without a cluster become discarded.
    pub fn retain_clusters(&self, mut keep: impl FnMut(usize) -> bool) -> Result<Self> {
        let kept: Vec<usize> = (0..self.len()).filter(|&j| keep(j)).collect();
        let clusters: Vec<BTreeSet<String>> =
            kept.iter().map(|&j| self.clusters[j].clone()).collect();
        let mut discarded = self.discarded.clone();
        for word in self.membership.keys() {
            if !clusters.iter().any(|c| c.contains(word)) {
                discarded.insert(word.clone());
            }
        }
        let related = self
            .related
            .as_ref()
            .map(|rel| kept.iter().map(|&j| rel[j]).collect());
        Self::from_parts(clusters, discarded, related)
    }

    /// One line per cluster, `k<j>: word, word, ...`, then the discarded words.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (j, cluster) in self.clusters.iter().enumerate() {
            let words: Vec<&str> = cluster.iter().map(String::as_str).collect();
            out.push_str(&format!("k{}: {}\n", j + 1, words.join(", ")));
        }
        if !self.discarded.is_empty() {
            let words: Vec<&str> = self.discarded.iter().map(String::as_str).collect();
            out.push_str(&format!("discarded: {}\n", words.join(", ")));
        }
        out
    }
}

/// Category-related clustering with threshold `gamma`.
///
/// `w` joins `k_i` iff `f(w|c_i) > 0` and `f(w|c_i) / f(w) > gamma`.
pub fn soft_clusters(table: &FrequencyTable, gamma: f64) -> Result<Clustering> {
    check_gamma(gamma, 0.0)?;
    let n = table.categories().len();
    let mut clusters = vec![BTreeSet::new(); n];
    let mut discarded = BTreeSet::new();
    for (word, row) in table.rows() {
        let total: u64 = row.iter().sum();
        let mut assigned = false;
        for (i, &count) in row.iter().enumerate() {
            if count > 0 && count as f64 / total as f64 > gamma {
                clusters[i].insert(word.to_string());
                assigned = true;
            }
        }
        if !assigned {
            discarded.insert(word.to_string());
        }
    }
    Clustering::from_parts(clusters, discarded, Some((0..n).collect()))
}

pub(crate) fn check_gamma(gamma: f64, min: f64) -> Result<()> {
    if (min..1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::InvalidGamma { value: gamma, min })
    }
}

/// The `n` most frequent words of a category, highest count first, ties
/// broken lexicographically; zero-count words never qualify.
pub fn top_words(table: &FrequencyTable, category: usize, n: usize) -> Vec<&str> {
    let mut ranked: Vec<(&str, u64)> = table
        .rows()
        .map(|(w, row)| (w, row[category]))
        .filter(|&(_, c)| c > 0)
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.into_iter().take(n).map(|(w, _)| w).collect()
}

/// Three hard clusters for a two-category table:
/// `k1 = top_L(c1) \ top_M(c2)`, `k2 = top_L(c2) \ top_M(c1)`, `k3` = the rest.
///
/// When `L > M` a word can qualify for both `k1` and `k2`; it is placed in
/// `k1`.
pub fn guthrie_clusters(table: &FrequencyTable, l: usize, m: usize) -> Result<Clustering> {
    let n = table.categories().len();
    if n != 2 {
        return Err(Error::NotPairwise(n));
    }
    if l == 0 || m == 0 {
        return Err(Error::InvalidParameter {
            name: "L/M",
            message: "ranks must be at least 1".into(),
        });
    }
    let set = |ws: Vec<&str>| -> BTreeSet<String> { ws.into_iter().map(str::to_string).collect() };
    let top_l = [set(top_words(table, 0, l)), set(top_words(table, 1, l))];
    let top_m = [set(top_words(table, 0, m)), set(top_words(table, 1, m))];
    let k1: BTreeSet<String> = top_l[0].difference(&top_m[1]).cloned().collect();
    let k2: BTreeSet<String> = top_l[1]
        .difference(&top_m[0])
        .filter(|w| !k1.contains(*w))
        .cloned()
        .collect();
    let k3: BTreeSet<String> = table
        .vocabulary()
        .filter(|w| !k1.contains(*w) && !k2.contains(*w))
        .map(str::to_string)
        .collect();
    Clustering::from_parts(vec![k1, k2, k3], BTreeSet::new(), None)
}

/// Per-cluster word frequencies `f(w|k_j)`, stored as exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributedFrequencies {
    cells: Vec<BTreeMap<String, Ratio<u64>>>,
}

impl DistributedFrequencies {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, cluster: usize, word: &str) -> Ratio<u64> {
        self.cells[cluster]
            .get(word)
            .copied()
            .unwrap_or_else(|| Ratio::from_integer(0))
    }

    pub fn get_f64(&self, cluster: usize, word: &str) -> f64 {
        ratio_to_f64(self.get(cluster, word))
    }

    pub fn words(&self, cluster: usize) -> impl Iterator<Item = (&str, Ratio<u64>)> {
        self.cells[cluster].iter().map(|(w, r)| (w.as_str(), *r))
    }

    /// `f(k_j)`.
    pub fn cluster_total(&self, cluster: usize) -> f64 {
        self.cells[cluster].values().map(|r| ratio_to_f64(*r)).sum()
    }
}

pub(crate) fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Distributes each clustered word's total frequency over its clusters.
///
/// A word in a single cluster keeps its whole `f(w)` there. A word in several
/// clusters gets `f(w) * f(w|c_i) / sum_{i' assigned} f(w|c_i')` in the
/// cluster related to `c_i`; that requires a category-related clustering.
pub fn distribute_frequencies(
    table: &FrequencyTable,
    clustering: &Clustering,
) -> Result<DistributedFrequencies> {
    let mut cells = vec![BTreeMap::new(); clustering.len()];
    for (word, row) in table.rows() {
        let ids = clustering.clusters_of(word);
        let total: u64 = row.iter().sum();
        match ids {
            [] => {}
            [j] => {
                cells[*j].insert(word.to_string(), Ratio::from_integer(total));
            }
            _ => {
                let related = clustering
                    .related()
                    .ok_or_else(|| Error::InvalidParameter {
                        name: "clustering",
                        message: format!(
                            "`{word}` is shared by clusters not related to categories"
                        ),
                    })?;
                let shares: Vec<u64> = ids.iter().map(|&j| row[related[j]]).collect();
                let denom: u64 = shares.iter().sum();
                for (&j, &share) in ids.iter().zip(&shares) {
                    assert!(
                        share > 0,
                        "`{word}` assigned to a cluster with zero frequency"
                    );
                    cells[j].insert(word.to_string(), Ratio::new(total * share, denom));
                }
            }
        }
    }
    Ok(DistributedFrequencies { cells })
}
