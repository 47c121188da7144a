//! Micro-averaged precision and recall, threshold sweeps and the break-even point.
//!
//! Decisions are pooled over every `(document, category)` pair before the
//! ratios are taken: precision is `TP / (TP + FP)` and recall is
//! `TP / (TP + FN)`. An unclassified pair makes no positive claim, so it
//! counts as a miss when the document does carry the category.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::corpus::LabeledCorpus;
use crate::error::{Error, Result};
use crate::models::{decide_score, Outcome, TrainedModel};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ContingencyCounts {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
}

impl ContingencyCounts {
    pub fn record(&mut self, outcome: Outcome, gold: bool) {
        match (outcome, gold) {
            (Outcome::Positive, true) => self.true_positives += 1,
            (Outcome::Positive, false) => self.false_positives += 1,
            (_, true) => self.false_negatives += 1,
            (_, false) => self.true_negatives += 1,
        }
    }

    /// `None` when nothing was classified positive.
    pub fn precision(&self) -> Option<f64> {
        let claimed = self.true_positives + self.false_positives;
        (claimed > 0).then(|| self.true_positives as f64 / claimed as f64)
    }

    pub fn recall(&self) -> f64 {
        let gold = self.true_positives + self.false_negatives;
        if gold == 0 {
            0.0
        } else {
            self.true_positives as f64 / gold as f64
        }
    }
}

/// One decision about one test document and one category.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDecision {
    pub document: usize,
    pub category: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub epsilon: f64,
    /// Reported as 1.0 when undefined; see `precision_defined`.
    pub precision: f64,
    pub recall: f64,
    pub precision_defined: bool,
}

/// Pools `decisions` against the gold labels of `gold` for the `tested` categories.
pub fn micro_pr(
    decisions: &[PairDecision],
    gold: &LabeledCorpus,
    tested: &[String],
) -> Result<(PrPoint, ContingencyCounts)> {
    let mut outcomes: BTreeMap<(usize, &str), Outcome> = BTreeMap::new();
    for d in decisions {
        if d.document >= gold.len() {
            return Err(Error::UnknownDecision {
                kind: "document",
                name: d.document.to_string(),
            });
        }
        if !tested.contains(&d.category) {
            return Err(Error::UnknownDecision {
                kind: "category",
                name: d.category.clone(),
            });
        }
        outcomes.insert((d.document, d.category.as_str()), d.outcome);
    }
    let mut counts = ContingencyCounts::default();
    for (i, doc) in gold.documents.iter().enumerate() {
        for category in tested {
            let outcome = outcomes
                .get(&(i, category.as_str()))
                .copied()
                .unwrap_or(Outcome::Unclassified);
            counts.record(outcome, doc.has_label(category));
        }
    }
    Ok((point(0.0, &counts), counts))
}

fn point(epsilon: f64, counts: &ContingencyCounts) -> PrPoint {
    let precision = counts.precision();
    PrPoint {
        epsilon,
        precision: precision.unwrap_or(1.0),
        recall: counts.recall(),
        precision_defined: precision.is_some(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
}

impl PrCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,precision,recall\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{}", p.epsilon, p.precision, p.recall);
        }
        out
    }
}

/// `0, 0.005, ..., 0.5`.
pub fn default_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 * 0.005).collect()
}

pub fn check_grid(grid: &[f64]) -> Result<()> {
    let ok = grid.first() == Some(&0.0) && grid.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidGrid)
    }
}

/// Scores of every `(document, category)` pair; computed once per sweep.
pub fn score_matrix(
    models: &[(String, TrainedModel)],
    test: &LabeledCorpus,
) -> Vec<Vec<Option<f64>>> {
    test.documents
        .iter()
        .map(|doc| models.iter().map(|(_, m)| m.score(&doc.tokens)).collect())
        .collect()
}

/// One micro-averaged point per threshold of `grid`.
pub fn sweep(
    models: &[(String, TrainedModel)],
    test: &LabeledCorpus,
    grid: &[f64],
) -> Result<PrCurve> {
    check_grid(grid)?;
    let scores = score_matrix(models, test);
    sweep_scores(&scores, models, test, grid)
}

pub fn sweep_scores(
    scores: &[Vec<Option<f64>>],
    models: &[(String, TrainedModel)],
    test: &LabeledCorpus,
    grid: &[f64],
) -> Result<PrCurve> {
    check_grid(grid)?;
    let points = grid
        .iter()
        .map(|&epsilon| {
            let mut counts = ContingencyCounts::default();
            for (doc, row) in test.documents.iter().zip(scores) {
                for ((category, _), &score) in models.iter().zip(row) {
                    let outcome = decide_score(score, epsilon).outcome;
                    counts.record(outcome, doc.has_label(category));
                }
            }
            point(epsilon, &counts)
        })
        .collect();
    Ok(PrCurve { points })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakEven {
    pub value: f64,
    /// No point of the curve brackets `precision == recall`; `value` is the
    /// midpoint of the closest point.
    pub extrapolated: bool,
}

/// The value at which precision equals recall along the curve.
///
/// An exact hit is returned as is; otherwise the first adjacent pair where
/// `precision - recall` changes sign is interpolated linearly. Without a sign
/// change the point minimizing `|precision - recall|` is used and its
/// midpoint `(P + R) / 2` returned, flagged as extrapolated.
pub fn break_even(curve: &PrCurve) -> Option<BreakEven> {
    let pts = &curve.points;
    if pts.is_empty() {
        return None;
    }
    if let Some(p) = pts.iter().find(|p| p.precision == p.recall) {
        return Some(BreakEven {
            value: p.precision,
            extrapolated: false,
        });
    }
    for w in pts.windows(2) {
        let d0 = w[0].precision - w[0].recall;
        let d1 = w[1].precision - w[1].recall;
        if d0.signum() != d1.signum() {
            let t = d0 / (d0 - d1);
            return Some(BreakEven {
                value: w[0].precision + t * (w[1].precision - w[0].precision),
                extrapolated: false,
            });
        }
    }
    let closest = pts
        .iter()
        .min_by(|a, b| {
            (a.precision - a.recall)
                .abs()
                .total_cmp(&(b.precision - b.recall).abs())
        })
        .expect("non-empty");
    Some(BreakEven {
        value: (closest.precision + closest.recall) / 2.0,
        extrapolated: true,
    })
}
