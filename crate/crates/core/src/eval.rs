//! Dataset loading, scoring runs, and ranking-based evaluation.
//!
//! A dataset is a list of premise/hypothesis pairs with two-way gold labels
//! ([`Label`]); pairs may carry graph annotations and score columns that were
//! produced elsewhere. [`run_metrics`] scores every pair with a chosen list of
//! [`Metric`]s into a [`ScoreTable`], and the functions here reduce score
//! columns to ranking quality: [`compute_auc`], [`precision_at_top`],
//! [`hybrid_score`] and [`sweep_alpha`].

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amr::AmrGraph;
use crate::embed::{ContextualSidecar, EmbedStore};
use crate::metric::Metric;
use crate::penman;
use crate::score::PrfScores;
use crate::smatch::{smatch_scores_auto, SearchConfig};
use crate::text::{bag_scores, embed_scores, token_list, tokenize};
use crate::transport::{solve_transport, CostMatrix, TransportMode};
use crate::wl::{cost_matrix, wl_refine};

/// Refinement rounds used by the WWLK metrics; the NMover metrics use zero.
const WWLK_REFINEMENTS: usize = 1;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: missing required column '{column}'")]
    MissingColumn { path: String, column: String },
    #[error("{path}:{line}: duplicate pair id '{id}'")]
    DuplicateId {
        path: String,
        line: usize,
        id: String,
    },
    #[error("score list is empty")]
    EmptyScores,
    #[error("score at index {index} is NaN")]
    NanScore { index: usize },
    #[error("every pair has the label '{present}'; ranking quality is undefined")]
    SingleClass { present: Label },
    #[error("top fraction must be in (0, 1], got {value}")]
    BadFraction { value: f64 },
    #[error("alpha must be in [0, 1], got {value}")]
    BadAlpha { value: f64 },
    #[error("bad alpha grid: {message}")]
    BadGrid { message: String },
    #[error("score lists differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("metric {metric} needs {resource}")]
    MissingResource { metric: String, resource: String },
    #[error("duplicate column '{column}'")]
    DuplicateColumn { column: String },
    #[error("no column named '{column}'")]
    UnknownColumn { column: String },
    #[error("column '{column}' has {got} values for {expected} rows")]
    ColumnLength {
        column: String,
        expected: usize,
        got: usize,
    },
}

// ---------------------------------------------------------------------------
// Data model
// ---------------------------------------------------------------------------

/// Two-way gold label: does the premise entail the hypothesis?
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "entailed")]
    Entailed,
    #[serde(rename = "non-entailed")]
    NonEntailed,
}

impl Label {
    /// Maps dataset label spellings onto the two-way scheme. Three-way NLI
    /// labels collapse: `entailment` is positive, `neutral` and
    /// `contradiction` are both negative. Unknown spellings return `None`.
    pub fn parse(text: &str) -> Option<Label> {
        match text.trim().to_ascii_lowercase().as_str() {
            "entailment" | "entailed" => Some(Label::Entailed),
            "neutral" | "contradiction" | "non-entailed" => Some(Label::NonEntailed),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Entailed => "entailed",
            Label::NonEntailed => "non-entailed",
        })
    }
}

/// One premise/hypothesis pair with its gold label, optional graph
/// annotations, and any score columns that shipped with the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NliPair {
    pub id: String,
    pub premise: String,
    pub hypothesis: String,
    pub gold: Label,
    #[serde(default)]
    pub premise_amr: Option<String>,
    #[serde(default)]
    pub hypothesis_amr: Option<String>,
    #[serde(default)]
    pub external_scores: BTreeMap<String, f64>,
}

/// A loaded dataset plus the count of rows dropped for unknown labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub pairs: Vec<NliPair>,
    pub skipped_unknown_labels: usize,
}

/// On-disk dataset layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    /// One JSON object per line: `id`, `premise`, `hypothesis`, `label`,
    /// optional `premise_amr` / `hypothesis_amr`, optional `external_scores`
    /// object.
    Jsonl,
    /// Tab-separated with a header; required columns `id`, `premise`,
    /// `hypothesis`, `label`; optional `premise_amr` / `hypothesis_amr`;
    /// any `external:<name>` columns become external scores.
    Tsv,
}

impl DataFormat {
    /// Guesses the format from a file extension.
    pub fn detect(path: &Path) -> Option<DataFormat> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") => Some(DataFormat::Jsonl),
            Some("tsv") => Some(DataFormat::Tsv),
            _ => None,
        }
    }
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    premise: String,
    hypothesis: String,
    label: String,
    #[serde(default)]
    premise_amr: Option<String>,
    #[serde(default)]
    hypothesis_amr: Option<String>,
    #[serde(default)]
    external_scores: BTreeMap<String, f64>,
}

pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Dataset, EvalError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| EvalError::Io {
        path: display.clone(),
        source,
    })?;
    read_dataset(BufReader::new(file), format, &display)
}

/// Parses a dataset from any reader; `origin` names the source in errors.
pub fn read_dataset(
    reader: impl Read,
    format: DataFormat,
    origin: &str,
) -> Result<Dataset, EvalError> {
    match format {
        DataFormat::Jsonl => read_jsonl(reader, origin),
        DataFormat::Tsv => read_tsv_dataset(reader, origin),
    }
}

fn read_jsonl(reader: impl Read, origin: &str) -> Result<Dataset, EvalError> {
    let reader = BufReader::new(reader);
    let mut pairs = Vec::new();
    let mut skipped = 0;
    let mut seen = HashSet::new();
    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|source| EvalError::Io {
            path: origin.to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|e| EvalError::Parse {
            path: origin.to_string(),
            line: line_no,
            message: e.to_string(),
        })?;
        if !seen.insert(raw.id.clone()) {
            return Err(EvalError::DuplicateId {
                path: origin.to_string(),
                line: line_no,
                id: raw.id,
            });
        }
        match Label::parse(&raw.label) {
            Some(gold) => pairs.push(NliPair {
                id: raw.id,
                premise: raw.premise,
                hypothesis: raw.hypothesis,
                gold,
                premise_amr: raw.premise_amr,
                hypothesis_amr: raw.hypothesis_amr,
                external_scores: raw.external_scores,
            }),
            None => skipped += 1,
        }
    }
    Ok(Dataset {
        pairs,
        skipped_unknown_labels: skipped,
    })
}

fn read_tsv_dataset(reader: impl Read, origin: &str) -> Result<Dataset, EvalError> {
    let reader = BufReader::new(reader);
    let mut lines = Vec::new();
    for line in reader.lines() {
        lines.push(line.map_err(|source| EvalError::Io {
            path: origin.to_string(),
            source,
        })?);
    }
    let mut iter = lines
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (header_line, header) = iter.next().ok_or_else(|| EvalError::Parse {
        path: origin.to_string(),
        line: 1,
        message: "empty file".to_string(),
    })?;
    let fields: Vec<&str> = header.split('\t').collect();
    let find = |name: &str| fields.iter().position(|f| *f == name);
    let required = |name: &str| {
        find(name).ok_or_else(|| EvalError::MissingColumn {
            path: origin.to_string(),
            column: name.to_string(),
        })
    };
    let id_col = required("id")?;
    let premise_col = required("premise")?;
    let hypothesis_col = required("hypothesis")?;
    let label_col = required("label")?;
    let premise_amr_col = find("premise_amr");
    let hypothesis_amr_col = find("hypothesis_amr");
    let external_cols: Vec<(usize, String)> = fields
        .iter()
        .enumerate()
        .filter_map(|(i, f)| {
            f.strip_prefix("external:")
                .filter(|name| !name.is_empty())
                .map(|name| (i, name.to_string()))
        })
        .collect();

    let mut pairs = Vec::new();
    let mut skipped = 0;
    let mut seen = HashSet::new();
    let _ = header_line;
    for (index, line) in iter {
        let line_no = index + 1;
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != fields.len() {
            return Err(EvalError::Parse {
                path: origin.to_string(),
                line: line_no,
                message: format!("expected {} columns, found {}", fields.len(), cells.len()),
            });
        }
        let id = cells[id_col].to_string();
        if !seen.insert(id.clone()) {
            return Err(EvalError::DuplicateId {
                path: origin.to_string(),
                line: line_no,
                id,
            });
        }
        let gold = match Label::parse(cells[label_col]) {
            Some(gold) => gold,
            None => {
                skipped += 1;
                continue;
            }
        };
        let optional = |col: Option<usize>| {
            col.map(|c| cells[c])
                .filter(|v| !v.is_empty())
                .map(str::to_string)
        };
        let mut external_scores = BTreeMap::new();
        for (col, name) in &external_cols {
            let cell = cells[*col];
            if cell.is_empty() || cell == "NA" {
                continue;
            }
            let value = cell.parse::<f64>().map_err(|_| EvalError::Parse {
                path: origin.to_string(),
                line: line_no,
                message: format!("cannot parse '{cell}' in column 'external:{name}' as a number"),
            })?;
            external_scores.insert(name.clone(), value);
        }
        pairs.push(NliPair {
            id,
            premise: cells[premise_col].to_string(),
            hypothesis: cells[hypothesis_col].to_string(),
            gold,
            premise_amr: optional(premise_amr_col),
            hypothesis_amr: optional(hypothesis_amr_col),
            external_scores,
        });
    }
    Ok(Dataset {
        pairs,
        skipped_unknown_labels: skipped,
    })
}

/// Reads a newline-separated id list; blank lines and `#` comments are
/// ignored.
pub fn load_id_list(path: impl AsRef<Path>) -> Result<BTreeSet<String>, EvalError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| EvalError::Io {
        path: display.clone(),
        source,
    })?;
    let mut ids = BTreeSet::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|source| EvalError::Io {
            path: display.clone(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        ids.insert(trimmed.to_string());
    }
    Ok(ids)
}

/// Keeps the pairs whose id is in `ids`, preserving input order, and counts
/// the requested ids that matched nothing.
pub fn filter_subset<'a>(
    pairs: &'a [NliPair],
    ids: &BTreeSet<String>,
) -> (Vec<&'a NliPair>, usize) {
    let kept: Vec<&NliPair> = pairs.iter().filter(|p| ids.contains(&p.id)).collect();
    let found: HashSet<&str> = kept.iter().map(|p| p.id.as_str()).collect();
    let unmatched = ids.iter().filter(|id| !found.contains(id.as_str())).count();
    (kept, unmatched)
}

// ---------------------------------------------------------------------------
// Ranking quality
// ---------------------------------------------------------------------------

/// Probability that a uniformly drawn entailed pair outscores a uniformly
/// drawn non-entailed pair, counting ties as half.
///
/// Computed from tie-averaged ranks in `O(n log n)`. Every intermediate sum
/// is an exactly representable multiple of one half, so the result is
/// bit-identical to the quadratic pairwise count.
pub fn compute_auc(items: &[(f64, Label)]) -> Result<f64, EvalError> {
    if items.is_empty() {
        return Err(EvalError::EmptyScores);
    }
    for (index, (score, _)) in items.iter().enumerate() {
        if score.is_nan() {
            return Err(EvalError::NanScore { index });
        }
    }
    let n_pos = items.iter().filter(|(_, g)| *g == Label::Entailed).count();
    let n_neg = items.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::SingleClass {
            present: if n_pos > 0 {
                Label::Entailed
            } else {
                Label::NonEntailed
            },
        });
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        items[a]
            .0
            .partial_cmp(&items[b].0)
            .expect("NaN was rejected")
    });
    let mut rank_sum_pos = 0.0f64;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && items[order[end + 1]].0 == items[order[start]].0 {
            end += 1;
        }
        // 1-based ranks start+1 ..= end+1 share their average rank.
        let avg_rank = (start + 1 + end + 1) as f64 / 2.0;
        for &idx in &order[start..=end] {
            if items[idx].1 == Label::Entailed {
                rank_sum_pos += avg_rank;
            }
        }
        start = end + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Fraction of entailed pairs among the top `ceil(fraction * n)` scores.
/// Ties sort by id ascending so the cut is deterministic.
pub fn precision_at_top(items: &[(&str, f64, Label)], fraction: f64) -> Result<f64, EvalError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(EvalError::BadFraction { value: fraction });
    }
    if items.is_empty() {
        return Err(EvalError::EmptyScores);
    }
    for (index, (_, score, _)) in items.iter().enumerate() {
        if score.is_nan() {
            return Err(EvalError::NanScore { index });
        }
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        items[b]
            .1
            .partial_cmp(&items[a].1)
            .expect("NaN was rejected")
            .then_with(|| items[a].0.cmp(items[b].0))
    });
    let k = ((fraction * items.len() as f64).ceil() as usize)
        .max(1)
        .min(items.len());
    let hits = order[..k]
        .iter()
        .filter(|&&i| items[i].2 == Label::Entailed)
        .count();
    Ok(hits as f64 / k as f64)
}

/// Blends a graph score with a text score: `alpha * graph + (1 - alpha) * text`.
/// The endpoints reproduce the inputs exactly.
pub fn hybrid_score(graph: f64, text: f64, alpha: f64) -> Result<f64, EvalError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(EvalError::BadAlpha { value: alpha });
    }
    Ok(alpha * graph + (1.0 - alpha) * text)
}

/// Builds the `start, start+step, ..., end` grid. The first and last points
/// are `start` and `end` exactly; the step must tile the range.
pub fn alpha_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, EvalError> {
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&end) || start > end {
        return Err(EvalError::BadGrid {
            message: format!("range {start}:{end} must satisfy 0 <= start <= end <= 1"),
        });
    }
    if start == end {
        return Ok(vec![start]);
    }
    if step.is_nan() || step <= 0.0 {
        return Err(EvalError::BadGrid {
            message: format!("step must be positive, got {step}"),
        });
    }
    let count = ((end - start) / step).round();
    if count < 1.0 || (start + count * step - end).abs() > 1e-9 {
        return Err(EvalError::BadGrid {
            message: format!("step {step} does not evenly divide {start}:{end}"),
        });
    }
    let count = count as usize;
    let mut grid = Vec::with_capacity(count + 1);
    for i in 0..=count {
        grid.push(if i == 0 {
            start
        } else if i == count {
            end
        } else {
            start + i as f64 * step
        });
    }
    Ok(grid)
}

/// Ranking quality of the blended score at each grid point.
pub fn sweep_alpha(
    graph: &[f64],
    text: &[f64],
    gold: &[Label],
    grid: &[f64],
) -> Result<Vec<(f64, f64)>, EvalError> {
    if graph.len() != text.len() {
        return Err(EvalError::LengthMismatch {
            left: graph.len(),
            right: text.len(),
        });
    }
    if graph.len() != gold.len() {
        return Err(EvalError::LengthMismatch {
            left: graph.len(),
            right: gold.len(),
        });
    }
    let mut curve = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let items: Vec<(f64, Label)> = graph
            .iter()
            .zip(text)
            .zip(gold)
            .map(|((&g, &t), &y)| Ok((hybrid_score(g, t, alpha)?, y)))
            .collect::<Result<_, EvalError>>()?;
        curve.push((alpha, compute_auc(&items)?));
    }
    Ok(curve)
}

// ---------------------------------------------------------------------------
// Score tables
// ---------------------------------------------------------------------------

/// One scored pair: the value per column, `None` where scoring failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub id: String,
    pub gold: Label,
    pub values: Vec<Option<f64>>,
}

/// A scoring failure for one pair and column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreError {
    pub id: String,
    pub column: String,
    pub message: String,
}

/// Scores for a dataset: named columns, one row per pair in input order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub columns: Vec<String>,
    pub rows: Vec<ScoreRow>,
    pub errors: Vec<ScoreError>,
}

/// A column's ranking quality plus how many rows fed it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnAuc {
    pub auc: f64,
    pub used: usize,
    pub skipped: usize,
}

/// One scored row of a column: `(id, value, gold)`.
pub type ScoredItem<'a> = (&'a str, f64, Label);

impl ScoreTable {
    pub fn new(columns: Vec<String>) -> Self {
        ScoreTable {
            columns,
            rows: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Appends a column; the value list must cover every row.
    pub fn add_column(&mut self, name: &str, values: Vec<Option<f64>>) -> Result<(), EvalError> {
        if self.column_index(name).is_some() {
            return Err(EvalError::DuplicateColumn {
                column: name.to_string(),
            });
        }
        if values.len() != self.rows.len() {
            return Err(EvalError::ColumnLength {
                column: name.to_string(),
                expected: self.rows.len(),
                got: values.len(),
            });
        }
        self.columns.push(name.to_string());
        for (row, value) in self.rows.iter_mut().zip(values) {
            row.values.push(value);
        }
        Ok(())
    }

    /// The scored `(id, value, gold)` rows of a column, skipping failures;
    /// also returns how many rows were skipped.
    pub fn column_items(&self, name: &str) -> Result<(Vec<ScoredItem<'_>>, usize), EvalError> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| EvalError::UnknownColumn {
                column: name.to_string(),
            })?;
        let mut items = Vec::new();
        let mut skipped = 0;
        for row in &self.rows {
            match row.values[idx] {
                Some(value) => items.push((row.id.as_str(), value, row.gold)),
                None => skipped += 1,
            }
        }
        Ok((items, skipped))
    }

    /// Ranking quality of one column over the rows it scored.
    pub fn column_auc(&self, name: &str) -> Result<ColumnAuc, EvalError> {
        let (items, skipped) = self.column_items(name)?;
        let scores: Vec<(f64, Label)> = items.iter().map(|(_, v, g)| (*v, *g)).collect();
        let auc = compute_auc(&scores)?;
        Ok(ColumnAuc {
            auc,
            used: scores.len(),
            skipped,
        })
    }

    /// Restricts the table to the given ids, preserving row order; also
    /// returns how many requested ids matched no row.
    pub fn subset(&self, ids: &BTreeSet<String>) -> (ScoreTable, usize) {
        let rows: Vec<ScoreRow> = self
            .rows
            .iter()
            .filter(|r| ids.contains(&r.id))
            .cloned()
            .collect();
        let present: HashSet<&str> = rows.iter().map(|r| r.id.as_str()).collect();
        let unmatched = ids
            .iter()
            .filter(|id| !present.contains(id.as_str()))
            .count();
        let errors = self
            .errors
            .iter()
            .filter(|e| ids.contains(&e.id))
            .cloned()
            .collect();
        (
            ScoreTable {
                columns: self.columns.clone(),
                rows,
                errors,
            },
            unmatched,
        )
    }

    /// Writes `id`, `gold` and every column as tab-separated text; values
    /// print with six decimals and failures print as `NA`.
    pub fn write_tsv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut header = vec!["id".to_string(), "gold".to_string()];
        header.extend(self.columns.iter().cloned());
        writeln!(out, "{}", header.join("\t"))?;
        for row in &self.rows {
            write!(out, "{}\t{}", row.id, row.gold)?;
            for value in &row.values {
                match value {
                    Some(v) => write!(out, "\t{v:.6}")?,
                    None => write!(out, "\tNA")?,
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Reads a table written by [`ScoreTable::write_tsv`]. Values keep the
    /// six-decimal precision of the file.
    pub fn read_tsv(reader: impl Read, origin: &str) -> Result<ScoreTable, EvalError> {
        let reader = BufReader::new(reader);
        let mut rows = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        for (index, line) in reader.lines().enumerate() {
            let line_no = index + 1;
            let line = line.map_err(|source| EvalError::Io {
                path: origin.to_string(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split('\t').collect();
            if columns.is_none() {
                if cells.len() < 2 || cells[0] != "id" || cells[1] != "gold" {
                    return Err(EvalError::Parse {
                        path: origin.to_string(),
                        line: line_no,
                        message: "header must start with 'id' and 'gold'".to_string(),
                    });
                }
                columns = Some(cells[2..].iter().map(|c| c.to_string()).collect());
                continue;
            }
            let columns = columns.as_ref().expect("header parsed");
            if cells.len() != columns.len() + 2 {
                return Err(EvalError::Parse {
                    path: origin.to_string(),
                    line: line_no,
                    message: format!(
                        "expected {} columns, found {}",
                        columns.len() + 2,
                        cells.len()
                    ),
                });
            }
            let gold = Label::parse(cells[1]).ok_or_else(|| EvalError::Parse {
                path: origin.to_string(),
                line: line_no,
                message: format!("unknown label '{}'", cells[1]),
            })?;
            let mut values = Vec::with_capacity(columns.len());
            for cell in &cells[2..] {
                if *cell == "NA" {
                    values.push(None);
                } else {
                    let value = cell.parse::<f64>().map_err(|_| EvalError::Parse {
                        path: origin.to_string(),
                        line: line_no,
                        message: format!("cannot parse '{cell}' as a number"),
                    })?;
                    values.push(Some(value));
                }
            }
            rows.push(ScoreRow {
                id: cells[0].to_string(),
                gold,
                values,
            });
        }
        let columns = columns.ok_or_else(|| EvalError::Parse {
            path: origin.to_string(),
            line: 1,
            message: "empty file".to_string(),
        })?;
        Ok(ScoreTable {
            columns,
            rows,
            errors: Vec::new(),
        })
    }
}

// ---------------------------------------------------------------------------
// Scoring runs
// ---------------------------------------------------------------------------

/// Shared inputs for a scoring run.
#[derive(Clone, Copy, Default)]
pub struct Resources<'a> {
    /// Static word vectors; required by the graph transport metrics and
    /// used for sentence tokens when no sidecar entry exists.
    pub embeddings: Option<&'a EmbedStore>,
    /// Pre-computed per-pair token vectors, preferred for the sentence
    /// embedding metrics when a pair is present.
    pub sidecar: Option<&'a ContextualSidecar>,
    /// Alignment search settings for the triple-matching metrics.
    pub search: SearchConfig,
}

/// Per-pair scoring output: one value slot per metric, plus any failures.
type PairOutput = (Vec<Option<f64>>, Vec<ScoreError>);

/// Scores every pair with every metric.
///
/// Resource requirements are checked up front; per-pair failures (missing or
/// malformed graphs, empty sentences, missing external scores) leave `None`
/// in the affected cell and record a [`ScoreError`]. With `threads > 1` the
/// pairs are scored in parallel; results are identical to the single-threaded
/// run because every row is placed by its input index.
pub fn run_metrics(
    pairs: &[NliPair],
    metrics: &[Metric],
    resources: &Resources,
    threads: usize,
) -> Result<ScoreTable, EvalError> {
    for metric in metrics {
        if metric.needs_embeddings() && resources.embeddings.is_none() {
            return Err(EvalError::MissingResource {
                metric: metric.to_string(),
                resource: "an embedding store".to_string(),
            });
        }
        if metric.needs_token_vectors()
            && resources.embeddings.is_none()
            && resources.sidecar.is_none()
        {
            return Err(EvalError::MissingResource {
                metric: metric.to_string(),
                resource: "an embedding store or a contextual sidecar".to_string(),
            });
        }
    }
    let columns: Vec<String> = metrics.iter().map(|m| m.to_string()).collect();
    let mut seen = HashSet::new();
    for column in &columns {
        if !seen.insert(column.clone()) {
            return Err(EvalError::DuplicateColumn {
                column: column.clone(),
            });
        }
    }

    let threads = threads.max(1).min(pairs.len().max(1));
    let results: Vec<PairOutput> = if threads == 1 {
        pairs
            .iter()
            .map(|p| score_pair(p, metrics, resources))
            .collect()
    } else {
        let chunk = pairs.len().div_ceil(threads);
        let mut slots: Vec<Option<PairOutput>> = (0..pairs.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (chunk_index, chunk_pairs) in pairs.chunks(chunk).enumerate() {
                handles.push((
                    chunk_index,
                    scope.spawn(move || {
                        chunk_pairs
                            .iter()
                            .map(|p| score_pair(p, metrics, resources))
                            .collect::<Vec<_>>()
                    }),
                ));
            }
            for (chunk_index, handle) in handles {
                let outputs = handle.join().expect("scoring thread panicked");
                for (offset, output) in outputs.into_iter().enumerate() {
                    slots[chunk_index * chunk + offset] = Some(output);
                }
            }
        });
        slots.into_iter().map(|s| s.expect("row scored")).collect()
    };

    let mut table = ScoreTable::new(columns);
    for (pair, (values, errors)) in pairs.iter().zip(results) {
        table.rows.push(ScoreRow {
            id: pair.id.clone(),
            gold: pair.gold,
            values,
        });
        table.errors.extend(errors);
    }
    Ok(table)
}

fn score_pair(pair: &NliPair, metrics: &[Metric], res: &Resources) -> PairOutput {
    let want_tok = metrics
        .iter()
        .any(|m| matches!(m, Metric::TokP | Metric::TokR | Metric::TokS));
    let want_bert = metrics.iter().any(|m| m.needs_token_vectors());
    let want_gtok = metrics
        .iter()
        .any(|m| matches!(m, Metric::GTokP | Metric::GTokR | Metric::GTokS));
    let want_smatch = metrics.iter().any(|m| m.needs_alignment());
    let want_nmover_p = metrics.contains(&Metric::NMoverP);
    let want_nmover_s = metrics.contains(&Metric::NMoverS);
    let want_wwlk_p = metrics.contains(&Metric::WwlkP);
    let want_wwlk_s = metrics.contains(&Metric::WwlkS);
    let want_graphs =
        want_gtok || want_smatch || want_nmover_p || want_nmover_s || want_wwlk_p || want_wwlk_s;

    let tok = want_tok.then(|| {
        bag_scores(&tokenize(&pair.hypothesis), &tokenize(&pair.premise)).map_err(|e| e.to_string())
    });
    let bert = want_bert.then(|| token_vector_scores(pair, res));
    let graphs = want_graphs.then(|| parse_pair_graphs(pair));
    let gtok = want_gtok.then(|| {
        let (h, p) = graph_pair(&graphs)?;
        bag_scores(&h.label_bag(), &p.label_bag()).map_err(|e| e.to_string())
    });
    let smatch = want_smatch.then(|| {
        let (h, p) = graph_pair(&graphs)?;
        smatch_scores_auto(&h.triples(), &p.triples(), &res.search).map_err(|e| e.to_string())
    });
    let (nmover_asym, nmover_sym) = transport_family(&graphs, res, 0, want_nmover_p, want_nmover_s);
    let (wwlk_asym, wwlk_sym) =
        transport_family(&graphs, res, WWLK_REFINEMENTS, want_wwlk_p, want_wwlk_s);

    let mut values: Vec<Option<f64>> = vec![None; metrics.len()];
    let mut errors = Vec::new();
    for (index, metric) in metrics.iter().enumerate() {
        let result: Result<f64, String> = match metric {
            Metric::TokP => family(&tok).map(|s| s.precision),
            Metric::TokR => family(&tok).map(|s| s.recall),
            Metric::TokS => family(&tok).map(|s| s.f1),
            Metric::BertScoP => family(&bert).map(|s| s.precision),
            Metric::BertScoR => family(&bert).map(|s| s.recall),
            Metric::BertS => family(&bert).map(|s| s.f1),
            Metric::GTokP => family(&gtok).map(|s| s.precision),
            Metric::GTokR => family(&gtok).map(|s| s.recall),
            Metric::GTokS => family(&gtok).map(|s| s.f1),
            Metric::SmatchP => family(&smatch).map(|s| s.precision),
            Metric::SmatchS => family(&smatch).map(|s| s.f1),
            Metric::NMoverP => family(&nmover_asym),
            Metric::NMoverS => family(&nmover_sym),
            Metric::WwlkP => family(&wwlk_asym),
            Metric::WwlkS => family(&wwlk_sym),
            Metric::External(name) => pair
                .external_scores
                .get(name)
                .copied()
                .ok_or_else(|| format!("no external score '{name}' for this pair")),
        };
        match result {
            Ok(value) => values[index] = Some(value),
            Err(message) => errors.push(ScoreError {
                id: pair.id.clone(),
                column: metric.to_string(),
                message,
            }),
        }
    }
    (values, errors)
}

fn family<T: Clone>(slot: &Option<Result<T, String>>) -> Result<T, String> {
    match slot {
        Some(Ok(value)) => Ok(value.clone()),
        Some(Err(message)) => Err(message.clone()),
        None => Err("internal error: score family not computed".to_string()),
    }
}

fn parse_pair_graphs(pair: &NliPair) -> Result<(AmrGraph, AmrGraph), String> {
    let h_text = pair
        .hypothesis_amr
        .as_deref()
        .ok_or_else(|| "pair has no hypothesis graph".to_string())?;
    let p_text = pair
        .premise_amr
        .as_deref()
        .ok_or_else(|| "pair has no premise graph".to_string())?;
    let h = penman::parse(h_text).map_err(|e| format!("hypothesis graph: {e}"))?;
    let p = penman::parse(p_text).map_err(|e| format!("premise graph: {e}"))?;
    Ok((h, p))
}

fn graph_pair(
    slot: &Option<Result<(AmrGraph, AmrGraph), String>>,
) -> Result<(&AmrGraph, &AmrGraph), String> {
    match slot {
        Some(Ok((h, p))) => Ok((h, p)),
        Some(Err(message)) => Err(message.clone()),
        None => Err("internal error: graphs not parsed".to_string()),
    }
}

fn token_vector_scores(pair: &NliPair, res: &Resources) -> Result<PrfScores, String> {
    if let Some(sidecar) = res.sidecar {
        if let Some((p_set, h_set)) = sidecar.get(&pair.id) {
            return embed_scores(h_set, p_set).map_err(|e| e.to_string());
        }
    }
    let store = res
        .embeddings
        .ok_or_else(|| "pair missing from sidecar and no embedding store given".to_string())?;
    let h = store
        .embed_tokens(&token_list(&pair.hypothesis))
        .map_err(|e| format!("hypothesis: {e}"))?;
    let p = store
        .embed_tokens(&token_list(&pair.premise))
        .map_err(|e| format!("premise: {e}"))?;
    embed_scores(&h, &p).map_err(|e| e.to_string())
}

/// Computes the asymmetric and/or symmetric transport score family at a given
/// refinement depth, sharing the refined vectors and cost matrix.
/// A score cell before table placement: absent when the metric was not
/// requested, otherwise the value or the failure message.
type ScoreCell = Option<Result<f64, String>>;

fn transport_family(
    graphs: &Option<Result<(AmrGraph, AmrGraph), String>>,
    res: &Resources,
    refinements: usize,
    want_asym: bool,
    want_sym: bool,
) -> (ScoreCell, ScoreCell) {
    if !want_asym && !want_sym {
        return (None, None);
    }
    let shared: Result<CostMatrix, String> = (|| {
        let (h, p) = graph_pair(graphs)?;
        let store = res
            .embeddings
            .ok_or_else(|| "no embedding store given".to_string())?;
        let p_vectors = wl_refine(p, store, refinements);
        let h_vectors = wl_refine(h, store, refinements);
        cost_matrix(&p_vectors, &h_vectors).map_err(|e| e.to_string())
    })();
    let solve = |mode: TransportMode| -> Result<f64, String> {
        let c = shared.as_ref().map_err(Clone::clone)?;
        solve_transport(c, mode)
            .map(|flow| (1.0 - flow.objective()).clamp(0.0, 1.0))
            .map_err(|e| e.to_string())
    };
    (
        want_asym.then(|| solve(TransportMode::Asymmetric)),
        want_sym.then(|| solve(TransportMode::Symmetric)),
    )
}

// ---------------------------------------------------------------------------
// Report structures
// ---------------------------------------------------------------------------

/// Averages the values that are present; `None` when nothing is.
pub fn mean_over(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let xs: Vec<f64> = values.flatten().collect();
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// One input dataset as seen by an evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub name: String,
    /// The source path exactly as given on the command line.
    pub source: String,
    pub pairs: usize,
    pub skipped_unknown_labels: usize,
    /// Whether this dataset is left out of the `avg_nli` column.
    pub excluded_from_nli_avg: bool,
    pub score_errors: usize,
}

/// One metric's ranking quality across datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub metric: String,
    /// Per-dataset value; `None` when it could not be computed.
    pub by_dataset: BTreeMap<String, Option<f64>>,
    /// Rows excluded per dataset because the metric failed on them.
    pub skipped_rows: BTreeMap<String, usize>,
    pub avg_all: Option<f64>,
    pub avg_nli: Option<f64>,
}

impl MetricSummary {
    /// Fills in the averages: `avg_all` over every dataset with a value,
    /// `avg_nli` over those not excluded.
    pub fn new(
        metric: String,
        by_dataset: BTreeMap<String, Option<f64>>,
        skipped_rows: BTreeMap<String, usize>,
        nli_excluded: &BTreeSet<String>,
    ) -> Self {
        let avg_all = mean_over(by_dataset.values().copied());
        let avg_nli = mean_over(
            by_dataset
                .iter()
                .filter(|(name, _)| !nli_excluded.contains(*name))
                .map(|(_, value)| *value),
        );
        MetricSummary {
            metric,
            by_dataset,
            skipped_rows,
            avg_all,
            avg_nli,
        }
    }
}

/// Precision among the top-scored fraction, per metric and fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopFractionSummary {
    pub metric: String,
    /// The fraction as a percentage, e.g. `5.0` for the top 5%.
    pub percent: f64,
    pub by_dataset: BTreeMap<String, Option<f64>>,
    pub mean_all: Option<f64>,
    pub mean_nli: Option<f64>,
}

impl TopFractionSummary {
    pub fn new(
        metric: String,
        percent: f64,
        by_dataset: BTreeMap<String, Option<f64>>,
        nli_excluded: &BTreeSet<String>,
    ) -> Self {
        let mean_all = mean_over(by_dataset.values().copied());
        let mean_nli = mean_over(
            by_dataset
                .iter()
                .filter(|(name, _)| !nli_excluded.contains(*name))
                .map(|(_, value)| *value),
        );
        TopFractionSummary {
            metric,
            percent,
            by_dataset,
            mean_all,
            mean_nli,
        }
    }
}

/// Ranking quality restricted to a chosen id subset, with the change
/// relative to the full run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetReport {
    pub requested_ids: usize,
    pub matched_by_dataset: BTreeMap<String, usize>,
    /// Requested ids that matched no pair in any dataset.
    pub unmatched_ids: usize,
    pub auc: Vec<MetricSummary>,
    pub delta_vs_full: Vec<MetricSummary>,
}

/// The blended-score curve over an alpha grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub graph_metric: String,
    pub text_metric: String,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub by_dataset: BTreeMap<String, Option<f64>>,
    pub avg_all: Option<f64>,
    pub avg_nli: Option<f64>,
}

/// The full output of an evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub datasets: Vec<DatasetInfo>,
    pub auc: Vec<MetricSummary>,
    pub top_fraction: Vec<TopFractionSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<SubsetReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepReport>,
}
