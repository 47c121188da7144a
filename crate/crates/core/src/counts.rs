//! Word frequencies per category.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::clustering::Clustering;
use crate::corpus::LabeledCorpus;
use crate::error::{Error, Result};

/// Exact occurrence counts `f(w|c_i)`.
///
/// A token in a document with several labels increments the cell of every
/// labeled category, and the marginal `f(w)` is defined as the sum over
/// categories, so `f(w|c_i) / f(w)` always sums to one over `i`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    categories: Vec<String>,
    words: BTreeMap<String, Vec<u64>>,
}

impl FrequencyTable {
    pub fn new(categories: Vec<String>) -> Self {
        Self {
            categories,
            words: BTreeMap::new(),
        }
    }

    pub fn from_corpus(corpus: &LabeledCorpus) -> Self {
        let mut table = Self::new(corpus.categories.clone());
        for doc in &corpus.documents {
            let idx: Vec<usize> = doc
                .labels
                .iter()
                .filter_map(|l| table.category_index(l))
                .collect();
            for token in &doc.tokens {
                for &i in &idx {
                    table.add(token, i, 1);
                }
            }
        }
        table
    }

    /// Builds a table with one category per token pool.
    pub fn from_pools<S: AsRef<str>>(categories: Vec<String>, pools: &[&[S]]) -> Self {
        assert_eq!(categories.len(), pools.len());
        let mut table = Self::new(categories);
        for (i, pool) in pools.iter().enumerate() {
            for token in pool.iter() {
                table.add(token.as_ref(), i, 1);
            }
        }
        table
    }

    /// Builds a table from explicit `(word, per-category counts)` rows.
    pub fn from_rows<'a>(
        categories: Vec<String>,
        rows: impl IntoIterator<Item = (&'a str, Vec<u64>)>,
    ) -> Result<Self> {
        let mut table = Self::new(categories);
        for (word, counts) in rows {
            if counts.len() != table.categories.len() {
                return Err(Error::InvalidParameter {
                    name: "rows",
                    message: format!("`{word}` has {} counts", counts.len()),
                });
            }
            for (i, c) in counts.into_iter().enumerate() {
                table.add(word, i, c);
            }
        }
        Ok(table)
    }

    pub fn add(&mut self, word: &str, category: usize, count: u64) {
        let n = self.categories.len();
        let row = match self.words.get_mut(word) {
            Some(row) => row,
            None => self
                .words
                .entry(word.to_string())
                .or_insert_with(|| vec![0; n]),
        };
        row[category] += count;
    }

    /// Adds every cell of `other` into `self`. Categories must match.
    pub fn merge(&mut self, other: &FrequencyTable) {
        assert_eq!(self.categories, other.categories);
        for (word, row) in &other.words {
            for (i, &c) in row.iter().enumerate() {
                self.add(word, i, c);
            }
        }
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn category_index(&self, category: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == category)
    }

    /// Words in lexicographic order.
    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.words.keys().map(String::as_str)
    }

    pub fn vocabulary_size(&self) -> usize {
        self.words.len()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains_key(word)
    }

    pub fn row(&self, word: &str) -> Option<&[u64]> {
        self.words.get(word).map(Vec::as_slice)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[u64])> {
        self.words.iter().map(|(w, r)| (w.as_str(), r.as_slice()))
    }

    /// `f(w|c_i)`; zero for unknown words.
    pub fn count(&self, word: &str, category: usize) -> u64 {
        self.words.get(word).map_or(0, |row| row[category])
    }

    /// `f(w)`.
    pub fn word_total(&self, word: &str) -> u64 {
        self.words.get(word).map_or(0, |row| row.iter().sum())
    }

    /// `f(c_i)`.
    pub fn category_total(&self, category: usize) -> u64 {
        self.words.values().map(|row| row[category]).sum()
    }

    /// `category,word,count` lines, skipping zero cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("category,word,count\n");
        for (ci, category) in self.categories.iter().enumerate() {
            for (word, row) in &self.words {
                if row[ci] > 0 {
                    let _ = writeln!(out, "{category},{word},{}", row[ci]);
                }
            }
        }
        out
    }
}

/// `f(k_j|c_i) = sum of f(w|c_i) over w in k_j`, indexed `[category][cluster]`.
///
/// A word that belongs to several clusters is counted in each of them.
pub fn cluster_frequencies(table: &FrequencyTable, clustering: &Clustering) -> Vec<Vec<u64>> {
    let n = table.categories().len();
    let m = clustering.len();
    let mut out = vec![vec![0; m]; n];
    for (word, row) in table.rows() {
        for &j in clustering.clusters_of(word) {
            for (i, &count) in row.iter().enumerate() {
                out[i][j] += count;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{guthrie_clusters, Clustering};
    use crate::corpus::{parse_str, LabeledCorpus};
    use proptest::prelude::*;

    pub(crate) fn sports() -> FrequencyTable {
        FrequencyTable::from_rows(
            vec!["c1".into(), "c2".into()],
            [
                ("racket", vec![4, 0]),
                ("stroke", vec![1, 0]),
                ("shot", vec![2, 0]),
                ("goal", vec![1, 3]),
                ("kick", vec![0, 2]),
                ("ball", vec![2, 2]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn counts_from_corpus() {
        let corpus = parse_str(
            "c1\tracket racket stroke shot ball\nc1\tracket racket shot goal ball\n\
             c2\tgoal goal kick ball\nc2\tgoal kick ball\n",
        )
        .unwrap();
        let table = FrequencyTable::from_corpus(&corpus);
        assert_eq!(table, sports());
        assert_eq!(table.count("racket", 0), 4);
        assert_eq!(table.count("goal", 1), 3);
        assert_eq!(table.word_total("ball"), 4);
        assert_eq!(table.category_total(0), 10);
        assert_eq!(table.category_total(1), 7);
    }

    #[test]
    fn empty_corpus() {
        let table = FrequencyTable::from_corpus(&LabeledCorpus::default());
        assert_eq!(table.vocabulary_size(), 0);
        assert_eq!(table.word_total("anything"), 0);
    }

    #[test]
    fn single_doc() {
        let table = FrequencyTable::from_corpus(&parse_str("c1\tball ball").unwrap());
        assert_eq!(table.count("ball", 0), 2);
        assert_eq!(table.word_total("ball"), 2);
    }

    #[test]
    fn multi_label_increments_every_category() {
        let table = FrequencyTable::from_corpus(&parse_str("a,b\tx\n").unwrap());
        assert_eq!(table.count("x", 0), 1);
        assert_eq!(table.count("x", 1), 1);
        assert_eq!(table.word_total("x"), 2);
    }

    #[test]
    fn hard_cluster_frequencies() {
        let table = sports();
        let clustering = guthrie_clusters(&table, 5, 5).unwrap();
        let f = cluster_frequencies(&table, &clustering);
        assert_eq!(f, vec![vec![7, 0, 3], vec![0, 2, 5]]);
    }

    #[test]
    fn empty_cluster_counts_zero() {
        let table = sports();
        let clustering = Clustering::hard(
            vec![
                ["racket", "stroke", "shot", "goal", "kick", "ball"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                Default::default(),
            ],
            &table,
        )
        .unwrap();
        let f = cluster_frequencies(&table, &clustering);
        assert_eq!(f[0][1], 0);
        assert_eq!(f[1][1], 0);
    }

    #[test]
    fn csv_dump() {
        let csv = sports().to_csv();
        assert!(csv.starts_with("category,word,count\n"));
        assert!(csv.contains("c1,racket,4\n"));
        assert!(!csv.contains("c2,racket"));
    }

    fn arb_docs() -> impl Strategy<Value = Vec<(Vec<usize>, Vec<usize>)>> {
        prop::collection::vec(
            (
                prop::collection::btree_set(0usize..3, 1..3).prop_map(|s| s.into_iter().collect()),
                prop::collection::vec(0usize..8, 0..10),
            ),
            0..10,
        )
    }

    fn build(docs: &[(Vec<usize>, Vec<usize>)]) -> LabeledCorpus {
        let mut text = String::new();
        for (labels, tokens) in docs {
            let labels: Vec<String> = labels.iter().map(|l| format!("c{l}")).collect();
            let tokens: Vec<String> = tokens.iter().map(|t| format!("w{t}")).collect();
            text.push_str(&format!("{}\t{}\n", labels.join(","), tokens.join(" ")));
        }
        parse_str(&text).unwrap()
    }

    proptest! {
        #[test]
        fn marginals_consistent(docs in arb_docs()) {
            let table = FrequencyTable::from_corpus(&build(&docs));
            let mut grand = 0;
            for (word, row) in table.rows() {
                prop_assert_eq!(table.word_total(word), row.iter().sum::<u64>());
                grand += table.word_total(word);
            }
            let by_category: u64 = (0..table.categories().len()).map(|i| table.category_total(i)).sum();
            prop_assert_eq!(grand, by_category);
        }

        #[test]
        fn order_independent(docs in arb_docs()) {
            let forward = FrequencyTable::from_corpus(&build(&docs));
            let mut reversed: Vec<_> = docs.clone();
            reversed.reverse();
            let backward = FrequencyTable::from_corpus(&build(&reversed));
            // Category order may differ, so compare cell by cell by name.
            for (word, _) in forward.rows() {
                for c in forward.categories() {
                    let i = forward.category_index(c).unwrap();
                    let j = backward.category_index(c).unwrap();
                    prop_assert_eq!(forward.count(word, i), backward.count(word, j));
                }
            }
            prop_assert_eq!(forward.vocabulary_size(), backward.vocabulary_size());
        }

        #[test]
        fn hard_clustering_preserves_category_totals(docs in arb_docs()) {
            let table = FrequencyTable::from_corpus(&build(&docs));
            let mut groups = vec![std::collections::BTreeSet::new(); 3];
            for (k, word) in table.vocabulary().enumerate() {
                groups[k % 3].insert(word.to_string());
            }
            let clustering = Clustering::hard(groups, &table).unwrap();
            let f = cluster_frequencies(&table, &clustering);
            for (i, row) in f.iter().enumerate() {
                prop_assert_eq!(row.iter().sum::<u64>(), table.category_total(i));
            }
        }

        #[test]
        fn merge_matches_joint_count(a in arb_docs(), b in arb_docs()) {
            let joint: Vec<_> = a.iter().chain(b.iter()).cloned().collect();
            let corpus = build(&joint);
            let cats = corpus.categories.clone();
            let count_part = |docs: &[(Vec<usize>, Vec<usize>)]| {
                let part = build(docs);
                let mut t = FrequencyTable::new(cats.clone());
                for doc in &part.documents {
                    for tok in &doc.tokens {
                        for l in &doc.labels {
                            t.add(tok, cats.iter().position(|c| c == l).unwrap(), 1);
                        }
                    }
                }
                t
            };
            let mut merged = count_part(&a);
            merged.merge(&count_part(&b));
            prop_assert_eq!(merged, FrequencyTable::from_corpus(&corpus));
        }
    }
}
