//! Token-level metrics: multiset (bag) precision/recall and greedy embedding
//! matching between two sentences.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::score::{harmonic_mean, PrfScores};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    /// The side named here must contain at least one element.
    #[error("{side} bag is empty")]
    EmptyBag { side: &'static str },
    #[error("{side} embedding set is empty")]
    EmptyEmbedSet { side: &'static str },
    #[error("embedding dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("embedding vector {index} has dimension {got}, expected {expected}")]
    RaggedVectors {
        index: usize,
        expected: usize,
        got: usize,
    },
}

/// A multiset of strings: lowercased sentence tokens or graph labels.
///
/// Iteration order is lexicographic, so everything derived from a bag is
/// deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bag {
    counts: BTreeMap<String, usize>,
    total: usize,
}

impl Bag {
    pub fn new() -> Self {
        Bag::default()
    }

    pub fn insert(&mut self, item: impl Into<String>) {
        *self.counts.entry(item.into()).or_insert(0) += 1;
        self.total += 1;
    }

    /// Total number of elements, counting multiplicity.
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn count(&self, item: &str) -> usize {
        self.counts.get(item).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.counts.iter().map(|(s, &c)| (s.as_str(), c))
    }

    /// Size of the multiset intersection: each element counts
    /// `min(count_self, count_other)` times.
    pub fn intersection_size(&self, other: &Bag) -> usize {
        self.counts
            .iter()
            .map(|(item, &c)| c.min(other.count(item)))
            .sum()
    }
}

impl<S: Into<String>> FromIterator<S> for Bag {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut bag = Bag::new();
        for item in iter {
            bag.insert(item);
        }
        bag
    }
}

/// Splits a sentence into lowercased tokens, in order.
///
/// Tokens are whitespace-separated; leading and trailing non-alphanumeric
/// characters are stripped from each token and tokens that become empty are
/// dropped. Interior punctuation (hyphens, apostrophes) is kept.
pub fn token_list(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|raw| {
            raw.trim_matches(|c: char| !c.is_alphanumeric())
                .to_lowercase()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

/// Tokenizes a sentence into a bag. See [`token_list`] for the token rules.
pub fn tokenize(text: &str) -> Bag {
    token_list(text).into_iter().collect()
}

/// Fraction of `h` covered by `p`: `|h ∩ p| / |h|` with clipped multiset
/// counts. Errors when `h` is empty.
pub fn bag_precision(h: &Bag, p: &Bag) -> Result<f64, TextError> {
    if h.is_empty() {
        return Err(TextError::EmptyBag { side: "hypothesis" });
    }
    Ok(h.intersection_size(p) as f64 / h.len() as f64)
}

/// Precision, recall and F1 between two bags: precision covers `h` by `p`,
/// recall covers `p` by `h`. Errors when either bag is empty.
pub fn bag_scores(h: &Bag, p: &Bag) -> Result<PrfScores, TextError> {
    let precision = bag_precision(h, p)?;
    let recall = match bag_precision(p, h) {
        Ok(r) => r,
        Err(TextError::EmptyBag { .. }) => return Err(TextError::EmptyBag { side: "premise" }),
        Err(e) => return Err(e),
    };
    Ok(PrfScores::from_pr(precision, recall))
}

/// An ordered set of embedding vectors for the tokens of one sentence.
///
/// Vectors are L2-normalized on construction; all-zero vectors stay zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedSet {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl EmbedSet {
    /// Builds a set from raw vectors, normalizing each one.
    ///
    /// Errors when the list is empty or the vectors disagree in dimension.
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self, TextError> {
        let first = vectors.first().ok_or(TextError::EmptyEmbedSet {
            side: "constructed",
        })?;
        let dim = first.len();
        let mut normalized = Vec::with_capacity(vectors.len());
        for (index, v) in vectors.into_iter().enumerate() {
            if v.len() != dim {
                return Err(TextError::RaggedVectors {
                    index,
                    expected: dim,
                    got: v.len(),
                });
            }
            normalized.push(l2_normalize(v));
        }
        Ok(EmbedSet {
            dim,
            vectors: normalized,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }
}

/// Scales a vector to unit L2 norm; an all-zero vector is returned unchanged.
pub fn l2_normalize(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut v {
            *x /= norm;
        }
    }
    v
}

/// Greedy matching score: mean over the vectors of `h` of the best dot
/// product against any vector of `p`.
///
/// The raw mean is returned without clamping; callers that need a `[0, 1]`
/// score clamp it (see [`embed_scores`]).
pub fn greedy_embed_precision(h: &EmbedSet, p: &EmbedSet) -> Result<f64, TextError> {
    if h.is_empty() {
        return Err(TextError::EmptyEmbedSet { side: "hypothesis" });
    }
    if p.is_empty() {
        return Err(TextError::EmptyEmbedSet { side: "premise" });
    }
    if h.dim() != p.dim() {
        return Err(TextError::DimensionMismatch {
            left: h.dim(),
            right: p.dim(),
        });
    }
    let mut sum = 0.0;
    for hv in &h.vectors {
        let best = p
            .vectors
            .iter()
            .map(|pv| dot(hv, pv))
            .fold(f64::NEG_INFINITY, f64::max);
        sum += best;
    }
    Ok(sum / h.len() as f64)
}

/// Greedy-matching precision, recall and F1, each direction clamped to
/// `[0, 1]` before the harmonic mean so the scores stay inside the unit
/// interval even for adversarial vectors.
pub fn embed_scores(h: &EmbedSet, p: &EmbedSet) -> Result<PrfScores, TextError> {
    let precision = greedy_embed_precision(h, p)?.clamp(0.0, 1.0);
    let recall = greedy_embed_precision(p, h)?.clamp(0.0, 1.0);
    Ok(PrfScores {
        precision,
        recall,
        f1: harmonic_mean(precision, recall),
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
