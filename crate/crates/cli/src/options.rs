//! Parsing for composite flag values: dataset lists, metric lists, hybrid
//! blend settings, alpha ranges and percentage lists.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::str::FromStr;

use entail_core::Metric;

/// One `--in` or `--scores` entry: an explicit `name=path`, or a bare path
/// whose file stem becomes the dataset name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetArg {
    pub name: String,
    pub path: PathBuf,
}

pub fn parse_dataset_args(raw: &[String]) -> Result<Vec<DatasetArg>, String> {
    let mut args = Vec::with_capacity(raw.len());
    let mut seen = BTreeSet::new();
    for entry in raw {
        let (name, path) = match entry.split_once('=') {
            Some((name, path)) => {
                if name.is_empty() || path.is_empty() {
                    return Err(format!(
                        "dataset '{entry}' must look like name=path or be a bare path"
                    ));
                }
                (name.to_string(), PathBuf::from(path))
            }
            None => {
                let path = PathBuf::from(entry);
                let stem = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| {
                        format!("cannot derive a dataset name from '{entry}'; use name=path")
                    })?;
                (stem.to_string(), path)
            }
        };
        if !seen.insert(name.clone()) {
            return Err(format!("dataset name '{name}' given more than once"));
        }
        args.push(DatasetArg { name, path });
    }
    Ok(args)
}

pub fn parse_metric_list(raw: &[String]) -> Result<Vec<Metric>, String> {
    let mut metrics = Vec::with_capacity(raw.len());
    let mut seen = BTreeSet::new();
    for name in raw {
        let metric = Metric::from_str(name).map_err(|e| e.to_string())?;
        if !seen.insert(metric.to_string()) {
            return Err(format!("metric '{metric}' requested more than once"));
        }
        metrics.push(metric);
    }
    Ok(metrics)
}

/// The blended-score settings from `--hybrid`, e.g.
/// `graph=WWLKP,text=trainBERT,alpha=0.5`. The text side accepts a metric
/// name; anything else is taken as the name of an external score column.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridConfig {
    pub graph: Metric,
    pub text: Metric,
    pub alpha: f64,
}

impl HybridConfig {
    /// The deterministic column name of the blended score.
    pub fn column_name(&self) -> String {
        format!("hybrid:{}+{}@{:.2}", self.graph, self.text, self.alpha)
    }
}

pub fn parse_hybrid(raw: &str) -> Result<HybridConfig, String> {
    let mut graph = None;
    let mut text = None;
    let mut alpha = None;
    for part in raw.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("hybrid part '{part}' must look like key=value"))?;
        match key {
            "graph" => {
                graph = Some(Metric::from_str(value).map_err(|e| e.to_string())?);
            }
            "text" => {
                // A plain external name is allowed without the prefix.
                text = Some(
                    Metric::from_str(value).unwrap_or_else(|_| Metric::External(value.to_string())),
                );
            }
            "alpha" => {
                let parsed: f64 = value
                    .parse()
                    .map_err(|_| format!("alpha '{value}' is not a number"))?;
                if !(0.0..=1.0).contains(&parsed) {
                    return Err(format!("alpha {parsed} must lie in [0, 1]"));
                }
                alpha = Some(parsed);
            }
            other => return Err(format!("unknown hybrid key '{other}'")),
        }
    }
    Ok(HybridConfig {
        graph: graph.ok_or("hybrid needs graph=<metric>")?,
        text: text.ok_or("hybrid needs text=<metric or external name>")?,
        alpha: alpha.ok_or("hybrid needs alpha=<value>")?,
    })
}

/// The `start:end:step` range from `--sweep-alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

pub fn parse_alpha_range(raw: &str) -> Result<AlphaRange, String> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("alpha range '{raw}' must look like start:end:step"));
    }
    let number = |s: &str| -> Result<f64, String> {
        s.parse()
            .map_err(|_| format!("'{s}' in alpha range '{raw}' is not a number"))
    };
    Ok(AlphaRange {
        start: number(parts[0])?,
        end: number(parts[1])?,
        step: number(parts[2])?,
    })
}

/// Percent cutoffs from `--top-p`, validated to lie in `(0, 100]`.
pub fn parse_percent_list(raw: &[String]) -> Result<Vec<f64>, String> {
    let mut percents = Vec::with_capacity(raw.len());
    for entry in raw {
        let percent: f64 = entry
            .parse()
            .map_err(|_| format!("top-p value '{entry}' is not a number"))?;
        if !(percent > 0.0 && percent <= 100.0) {
            return Err(format!("top-p value {percent} must lie in (0, 100]"));
        }
        percents.push(percent);
    }
    Ok(percents)
}
