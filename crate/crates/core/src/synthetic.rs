//! Seeded generator for labeled corpora with planted topic structure.
//!
//! Every topic owns a block of words drawn with Zipf-like weights; documents
//! mostly use their topic's words, occasionally drift into another topic and
//! fill the rest from a shared background vocabulary.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{LabeledCorpus, LabeledDocument};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub topics: usize,
    pub documents: usize,
    pub words_per_topic: usize,
    pub shared_words: usize,
    pub min_length: usize,
    pub max_length: usize,
    /// Probability that a token comes from the document's own topic.
    pub topic_rate: f64,
    /// Probability that a token comes from some other topic.
    pub drift_rate: f64,
    /// Probability that a document carries a second label.
    pub second_label_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            topics: 4,
            documents: 200,
            words_per_topic: 40,
            shared_words: 60,
            min_length: 20,
            max_length: 60,
            topic_rate: 0.5,
            drift_rate: 0.1,
            second_label_rate: 0.0,
            seed: 7,
        }
    }
}

pub fn topic_name(t: usize) -> String {
    format!("topic{t}")
}

pub fn generate(spec: &SyntheticSpec) -> LabeledCorpus {
    assert!(spec.topics >= 2 && spec.words_per_topic > 0 && spec.shared_words > 0);
    assert!(spec.min_length <= spec.max_length);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let zipf = |n: usize| WeightedIndex::new((1..=n).map(|r| 1.0 / r as f64)).expect("weights");
    let topic_pick = zipf(spec.words_per_topic);
    let shared_pick = zipf(spec.shared_words);

    let documents = (0..spec.documents)
        .map(|_| {
            let topic = rng.random_range(0..spec.topics);
            let mut topics = vec![topic];
            if rng.random::<f64>() < spec.second_label_rate {
                let other = (topic + rng.random_range(1..spec.topics)) % spec.topics;
                topics.push(other);
            }
            let len = rng.random_range(spec.min_length..=spec.max_length);
            let tokens = (0..len)
                .map(|_| {
                    let u: f64 = rng.random();
                    if u < spec.topic_rate {
                        let t = topics[rng.random_range(0..topics.len())];
                        format!("t{t}w{}", topic_pick.sample(&mut rng))
                    } else if u < spec.topic_rate + spec.drift_rate {
                        let t = rng.random_range(0..spec.topics);
                        format!("t{t}w{}", topic_pick.sample(&mut rng))
                    } else {
                        format!("s{}", shared_pick.sample(&mut rng))
                    }
                })
                .collect();
            LabeledDocument {
                labels: topics.into_iter().map(topic_name).collect(),
                tokens,
            }
        })
        .collect();
    LabeledCorpus::from_documents(documents)
}

/// Every `test_every`-th document goes to the test part.
pub fn split(corpus: &LabeledCorpus, test_every: usize) -> (LabeledCorpus, LabeledCorpus) {
    assert!(test_every >= 2);
    let (test, train): (Vec<_>, Vec<_>) = corpus
        .documents
        .iter()
        .cloned()
        .enumerate()
        .partition(|(i, _)| i % test_every == test_every - 1);
    let strip = |v: Vec<(usize, LabeledDocument)>| {
        LabeledCorpus::from_documents(v.into_iter().map(|(_, d)| d).collect())
    };
    (strip(train), strip(test))
}
