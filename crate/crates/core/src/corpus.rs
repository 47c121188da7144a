//! Labeled document collections.
//!
//! The on-disk format is one document per line:
//!
//! ```text
//! label[,label...]<TAB>token token ...
//! ```
//!
//! Tokens are split on runs of whitespace and kept verbatim (no case
//! folding, stemming or stop-word removal).

use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDocument {
    pub labels: Vec<String>,
    pub tokens: Vec<String>,
}

impl LabeledDocument {
    pub fn has_label(&self, category: &str) -> bool {
        self.labels.iter().any(|l| l == category)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledCorpus {
    pub documents: Vec<LabeledDocument>,
    /// Distinct labels in order of first appearance.
    pub categories: Vec<String>,
}

/// How a document carrying the tested category *and* other categories is
/// routed when a corpus is split into category / complement pools.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolRule {
    /// Contributes to the category pool only.
    #[default]
    PositiveOnly,
    /// Contributes to both pools.
    Both,
}

impl std::fmt::Display for PoolRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PoolRule::PositiveOnly => "positive-only",
            PoolRule::Both => "both",
        })
    }
}

impl std::str::FromStr for PoolRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive-only" => Ok(PoolRule::PositiveOnly),
            "both" => Ok(PoolRule::Both),
            other => Err(Error::InvalidParameter {
                name: "pool-rule",
                message: format!("unknown rule `{other}`"),
            }),
        }
    }
}

/// Whether lines must carry at least one label. With `Optional`, a line
/// without a TAB is read as tokens only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelPolicy {
    Required,
    Optional,
}

impl LabeledCorpus {
    pub fn from_documents(documents: Vec<LabeledDocument>) -> Self {
        let mut categories: Vec<String> = Vec::new();
        for doc in &documents {
            for label in &doc.labels {
                if !categories.contains(label) {
                    categories.push(label.clone());
                }
            }
        }
        Self {
            documents,
            categories,
        }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn total_tokens(&self) -> usize {
        self.documents.iter().map(|d| d.tokens.len()).sum()
    }

    pub fn has_category(&self, category: &str) -> bool {
        self.categories.iter().any(|c| c == category)
    }

    /// Splits the tokens into the pool of documents labeled `category` and
    /// the pool of all other documents.
    pub fn complement_pools(
        &self,
        category: &str,
        rule: PoolRule,
    ) -> Result<(Vec<&str>, Vec<&str>)> {
        if !self.has_category(category) {
            return Err(Error::UnknownCategory(category.to_string()));
        }
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for doc in &self.documents {
            let tokens = doc.tokens.iter().map(String::as_str);
            if doc.has_label(category) {
                positive.extend(tokens.clone());
                if rule == PoolRule::Both && doc.labels.iter().any(|l| l != category) {
                    negative.extend(tokens);
                }
            } else {
                negative.extend(tokens);
            }
        }
        Ok((positive, negative))
    }

    /// Writes the corpus back in the line format accepted by [`parse_corpus`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for doc in &self.documents {
            let _ = writeln!(out, "{}\t{}", doc.labels.join(","), doc.tokens.join(" "));
        }
        out
    }
}

/// Parses a training corpus; every line must carry at least one label.
pub fn parse_corpus(input: impl BufRead) -> Result<LabeledCorpus> {
    parse_with(input, LabelPolicy::Required)
}

pub fn parse_str(text: &str) -> Result<LabeledCorpus> {
    parse_corpus(text.as_bytes())
}

pub fn parse_with(input: impl BufRead, policy: LabelPolicy) -> Result<LabeledCorpus> {
    let mut documents = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        documents.push(parse_line(line, line_no, policy)?);
    }
    Ok(LabeledCorpus::from_documents(documents))
}

fn parse_line(line: &str, line_no: usize, policy: LabelPolicy) -> Result<LabeledDocument> {
    let (labels, tokens) = match (line.split_once('\t'), policy) {
        (Some(split), _) => split,
        (None, LabelPolicy::Optional) => ("", line),
        (None, LabelPolicy::Required) => {
            return Err(Error::Parse {
                line: line_no,
                message: "missing TAB between labels and tokens".into(),
            })
        }
    };
    let mut parsed: Vec<String> = Vec::new();
    for label in labels.split(',').map(str::trim).filter(|l| !l.is_empty()) {
        if !parsed.iter().any(|l| l == label) {
            parsed.push(label.to_string());
        }
    }
    if parsed.is_empty() && policy == LabelPolicy::Required {
        return Err(Error::Parse {
            line: line_no,
            message: "empty label list".into(),
        });
    }
    Ok(LabeledDocument {
        labels: parsed,
        tokens: tokens.split_whitespace().map(str::to_string).collect(),
    })
}
