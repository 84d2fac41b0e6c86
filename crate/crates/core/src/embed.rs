//! Word-vector storage: a static token table loaded from text files, plus an
//! optional per-pair sidecar of contextual vectors.
//!
//! The text format is one token per line followed by its numbers, optionally
//! preceded by a `count dim` header line:
//!
//! ```text
//! 4 3
//! dog 0.1 0.9 0.2
//! cat 0.2 0.8 0.1
//! ...
//! ```
//!
//! Lookups first strip a trailing sense suffix (`rage-01` becomes `rage`;
//! interior hyphens as in `self-reference` are untouched) and then match
//! exactly. Unknown tokens never fail: they get a deterministic
//! pseudo-random unit vector derived from the store's OOV seed and the
//! token, so runs are reproducible and distinct unknown tokens land far
//! apart.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::text::{EmbedSet, TextError};
use crate::util::Fnv1a;
use crate::wl::NodeEmbedder;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: expected {expected} numbers for token '{token}', found {got}")]
    Dimension {
        line: usize,
        token: String,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: cannot parse '{value}' as a number")]
    BadNumber { line: usize, value: String },
    #[error("line {line}: missing token or vector")]
    BadLine { line: usize },
    #[error("no embedding entries found in {path}")]
    NoEntries { path: String },
    #[error("embedding dimension must be positive")]
    ZeroDimension,
    #[error("sidecar record {record}: {message}")]
    SidecarRecord { record: usize, message: String },
    #[error("sidecar record {record}: vectors have dimension {got}, expected {expected}")]
    SidecarDimension {
        record: usize,
        expected: usize,
        got: usize,
    },
    #[error("sidecar record {record}: duplicate pair id '{id}'")]
    SidecarDuplicate { record: usize, id: String },
}

/// In-memory token-to-vector table with deterministic OOV fallback.
#[derive(Debug, Clone)]
pub struct EmbedStore {
    table: HashMap<String, Vec<f64>>,
    dim: usize,
    oov_seed: u64,
}

impl EmbedStore {
    /// Loads a word-vector text file. Duplicate tokens keep the last entry
    /// and log a warning; inconsistent dimensions are an error.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, EmbedError> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let file = File::open(path).map_err(|source| EmbedError::Io {
            path: display.clone(),
            source,
        })?;
        Self::read(BufReader::new(file), &display)
    }

    /// Parses the word-vector format from any reader; `origin` names the
    /// source in errors.
    pub fn read(reader: impl Read, origin: &str) -> Result<Self, EmbedError> {
        let reader = BufReader::new(reader);
        let mut table: HashMap<String, Vec<f64>> = HashMap::new();
        let mut dim: Option<usize> = None;
        let mut first_data_line = true;
        for (index, line) in reader.lines().enumerate() {
            let line_no = index + 1;
            let line = line.map_err(|source| EmbedError::Io {
                path: origin.to_string(),
                source,
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let token = parts.next().ok_or(EmbedError::BadLine { line: line_no })?;
            let rest: Vec<&str> = parts.collect();
            if first_data_line && rest.len() == 1 && token.parse::<usize>().is_ok() {
                // "count dim" header.
                let header_dim: usize = rest[0].parse().map_err(|_| EmbedError::BadNumber {
                    line: line_no,
                    value: rest[0].to_string(),
                })?;
                if header_dim == 0 {
                    return Err(EmbedError::ZeroDimension);
                }
                dim = Some(header_dim);
                first_data_line = false;
                continue;
            }
            first_data_line = false;
            if rest.is_empty() {
                return Err(EmbedError::BadLine { line: line_no });
            }
            let expected = *dim.get_or_insert(rest.len());
            if rest.len() != expected {
                return Err(EmbedError::Dimension {
                    line: line_no,
                    token: token.to_string(),
                    expected,
                    got: rest.len(),
                });
            }
            let mut vector = Vec::with_capacity(expected);
            for value in rest {
                vector.push(value.parse::<f64>().map_err(|_| EmbedError::BadNumber {
                    line: line_no,
                    value: value.to_string(),
                })?);
            }
            if table.insert(token.to_string(), vector).is_some() {
                log::warn!("duplicate token '{token}' at line {line_no} of {origin}; keeping the last entry");
            }
        }
        let dim = dim.ok_or_else(|| EmbedError::NoEntries {
            path: origin.to_string(),
        })?;
        if table.is_empty() {
            return Err(EmbedError::NoEntries {
                path: origin.to_string(),
            });
        }
        Ok(EmbedStore {
            table,
            dim,
            oov_seed: 0,
        })
    }

    /// Builds a store directly from entries; handy for tests.
    pub fn from_entries<I, S>(entries: I) -> Result<Self, EmbedError>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut table = HashMap::new();
        let mut dim = None;
        for (line, (token, vector)) in entries.into_iter().enumerate() {
            let token = token.into();
            let expected = *dim.get_or_insert(vector.len());
            if vector.len() != expected {
                return Err(EmbedError::Dimension {
                    line: line + 1,
                    token,
                    expected,
                    got: vector.len(),
                });
            }
            table.insert(token, vector);
        }
        let dim = dim.ok_or_else(|| EmbedError::NoEntries {
            path: "<entries>".to_string(),
        })?;
        if dim == 0 {
            return Err(EmbedError::ZeroDimension);
        }
        Ok(EmbedStore {
            table,
            dim,
            oov_seed: 0,
        })
    }

    /// Sets the seed that shapes out-of-vocabulary vectors.
    pub fn with_oov_seed(mut self, seed: u64) -> Self {
        self.oov_seed = seed;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// True when the token (after sense stripping) has a stored vector.
    pub fn contains(&self, token: &str) -> bool {
        let stripped = strip_sense_suffix(token);
        self.table.contains_key(stripped) || self.table.contains_key(token)
    }

    /// Returns the vector for a token; never fails.
    ///
    /// The sense-stripped form is preferred, then the raw token, then the
    /// deterministic OOV vector seeded by `(oov_seed, stripped token)`.
    pub fn lookup(&self, token: &str) -> Vec<f64> {
        let stripped = strip_sense_suffix(token);
        if let Some(v) = self.table.get(stripped) {
            return v.clone();
        }
        if let Some(v) = self.table.get(token) {
            return v.clone();
        }
        self.oov_vector(stripped)
    }

    fn oov_vector(&self, token: &str) -> Vec<f64> {
        let seed = Fnv1a::new()
            .write_u64(self.oov_seed)
            .write(token.as_bytes())
            .finish();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for x in &mut v {
                *x /= norm;
            }
        } else {
            v[0] = 1.0;
        }
        v
    }

    /// Embeds a token sequence as an [`EmbedSet`]; errors only when the
    /// sequence is empty.
    pub fn embed_tokens(&self, tokens: &[String]) -> Result<EmbedSet, TextError> {
        EmbedSet::new(tokens.iter().map(|t| self.lookup(t)).collect())
    }
}

impl NodeEmbedder for EmbedStore {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, concept: &str) -> Vec<f64> {
        self.lookup(concept)
    }
}

/// Removes one trailing `-<digits>` sense suffix; anything else is kept.
pub fn strip_sense_suffix(token: &str) -> &str {
    if let Some(idx) = token.rfind('-') {
        let (head, tail) = token.split_at(idx);
        if !head.is_empty() && tail.len() > 1 && tail[1..].bytes().all(|b| b.is_ascii_digit()) {
            return head;
        }
    }
    token
}

/// Pre-computed contextual vectors for specific pairs, loaded from JSON
/// lines of the form:
///
/// ```json
/// {"id": "pair-1", "premise_vecs": [[0.1, 0.2]], "hypothesis_vecs": [[0.3, 0.4]]}
/// ```
#[derive(Debug, Clone)]
pub struct ContextualSidecar {
    dim: usize,
    by_id: HashMap<String, (EmbedSet, EmbedSet)>,
}

#[derive(Deserialize)]
struct SidecarRecord {
    id: String,
    premise_vecs: Vec<Vec<f64>>,
    hypothesis_vecs: Vec<Vec<f64>>,
}

impl ContextualSidecar {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, EmbedError> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let file = File::open(path).map_err(|source| EmbedError::Io {
            path: display.clone(),
            source,
        })?;
        Self::read(BufReader::new(file), &display)
    }

    pub fn read(reader: impl Read, origin: &str) -> Result<Self, EmbedError> {
        let reader = BufReader::new(reader);
        let mut by_id = HashMap::new();
        let mut dim: Option<usize> = None;
        let mut record_no = 0;
        for (index, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| EmbedError::Io {
                path: origin.to_string(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            record_no = index + 1;
            let record: SidecarRecord =
                serde_json::from_str(&line).map_err(|e| EmbedError::SidecarRecord {
                    record: record_no,
                    message: e.to_string(),
                })?;
            let sets = [&record.premise_vecs, &record.hypothesis_vecs];
            for vectors in sets {
                if vectors.is_empty() {
                    return Err(EmbedError::SidecarRecord {
                        record: record_no,
                        message: "empty vector list".to_string(),
                    });
                }
                for v in vectors.iter() {
                    let expected = *dim.get_or_insert(v.len());
                    if v.len() != expected {
                        return Err(EmbedError::SidecarDimension {
                            record: record_no,
                            expected,
                            got: v.len(),
                        });
                    }
                }
            }
            let premise =
                EmbedSet::new(record.premise_vecs).map_err(|e| EmbedError::SidecarRecord {
                    record: record_no,
                    message: e.to_string(),
                })?;
            let hypothesis =
                EmbedSet::new(record.hypothesis_vecs).map_err(|e| EmbedError::SidecarRecord {
                    record: record_no,
                    message: e.to_string(),
                })?;
            if by_id
                .insert(record.id.clone(), (premise, hypothesis))
                .is_some()
            {
                return Err(EmbedError::SidecarDuplicate {
                    record: record_no,
                    id: record.id,
                });
            }
        }
        let dim = dim.ok_or_else(|| EmbedError::NoEntries {
            path: origin.to_string(),
        })?;
        let _ = record_no;
        Ok(ContextualSidecar { dim, by_id })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }

    /// Premise and hypothesis vectors for a pair, when present.
    pub fn get(&self, id: &str) -> Option<(&EmbedSet, &EmbedSet)> {
        self.by_id.get(id).map(|(p, h)| (p, h))
    }
}

/// Renders a store back to the text format, header included, with tokens
/// sorted for reproducible output. Used by tests and fixture generation.
pub fn format_store(store: &EmbedStore) -> String {
    let mut tokens: Vec<&String> = store.table.keys().collect();
    tokens.sort();
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", tokens.len(), store.dim());
    for token in tokens {
        let _ = write!(out, "{token}");
        for value in &store.table[token] {
            let _ = write!(out, " {value}");
        }
        let _ = writeln!(out);
    }
    out
}
