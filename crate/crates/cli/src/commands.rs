//! Implementations of the `score`, `eval` and `validate-amr` subcommands.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufReader, Write};
use std::path::Path;

use entail_core::eval::{
    alpha_grid, load_dataset, load_id_list, mean_over, precision_at_top, run_metrics, sweep_alpha,
    ColumnAuc, DataFormat, Dataset, DatasetInfo, EvalError, EvalReport, MetricSummary, Resources,
    ScoreTable, SubsetReport, SweepPoint, SweepReport, TopFractionSummary,
};
use entail_core::smatch::SearchMode;
use entail_core::{hybrid_score, ContextualSidecar, EmbedStore, Metric, SearchConfig};

use crate::options::{
    parse_alpha_range, parse_dataset_args, parse_hybrid, parse_metric_list, parse_percent_list,
    DatasetArg,
};
use crate::{EvalArgs, FormatArg, InputArgs, ResourceArgs, ScoreArgs, ValidateArgs};

/// Per-dataset hybrid inputs: the graph and text score columns exactly as
/// blended (after any normalization), keyed by dataset name and kept around
/// for the alpha sweep.
type HybridComponents = BTreeMap<String, (Vec<Option<f64>>, Vec<Option<f64>>)>;

/// A command failure with its process exit code: flag and configuration
/// mistakes exit 2, runtime problems (I/O, bad data) exit 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

fn runtime(error: impl std::fmt::Display) -> Failure {
    Failure::Runtime(error.to_string())
}

/// Writes to stdout, treating a closed pipe (e.g. `| head`) as a request to
/// stop emitting rather than an error. Returns whether the sink is still
/// open.
fn stdout_line(
    out: &mut (impl Write + ?Sized),
    line: std::fmt::Arguments,
) -> Result<bool, Failure> {
    match out.write_fmt(line) {
        Ok(()) => Ok(true),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(false),
        Err(e) => Err(runtime(format!("cannot write to stdout: {e}"))),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

impl From<FormatArg> for DataFormat {
    fn from(value: FormatArg) -> Self {
        match value {
            FormatArg::Jsonl => DataFormat::Jsonl,
            FormatArg::Tsv => DataFormat::Tsv,
        }
    }
}

fn resolve_format(chosen: Option<FormatArg>, path: &Path) -> Result<DataFormat, Failure> {
    if let Some(format) = chosen {
        return Ok(format.into());
    }
    DataFormat::detect(path).ok_or_else(|| {
        usage(format!(
            "cannot infer the format of '{}'; pass --format jsonl or --format tsv",
            path.display()
        ))
    })
}

/// Loads every `--in` dataset, rejecting empty ones.
fn load_inputs(input: &InputArgs) -> Result<Vec<(DatasetArg, Dataset)>, Failure> {
    let args = parse_dataset_args(&input.inputs).map_err(Failure::Usage)?;
    if args.is_empty() {
        return Err(usage("at least one --in dataset is required"));
    }
    let mut loaded = Vec::with_capacity(args.len());
    for arg in args {
        let format = resolve_format(input.format, &arg.path)?;
        let dataset = load_dataset(&arg.path, format).map_err(runtime)?;
        if dataset.pairs.is_empty() {
            return Err(Failure::Runtime(format!(
                "no pairs loaded from '{}'",
                arg.path.display()
            )));
        }
        if dataset.skipped_unknown_labels > 0 {
            log::warn!(
                "{}: skipped {} row(s) with unknown labels",
                arg.name,
                dataset.skipped_unknown_labels
            );
        }
        loaded.push((arg, dataset));
    }
    Ok(loaded)
}

/// Validates resource flags against the requested metrics, then loads the
/// stores. Missing flags are usage errors that name the flag.
fn build_resources(
    res: &ResourceArgs,
    metrics: &[Metric],
) -> Result<(Option<EmbedStore>, Option<ContextualSidecar>, SearchConfig), Failure> {
    for metric in metrics {
        if metric.needs_embeddings() && res.embeddings.is_none() {
            return Err(usage(format!(
                "metric {metric} needs --embeddings (or the ENTAIL_EMBEDDINGS environment variable)"
            )));
        }
        if metric.needs_token_vectors() && res.embeddings.is_none() && res.sidecar.is_none() {
            return Err(usage(format!(
                "metric {metric} needs --embeddings or --sidecar"
            )));
        }
    }
    let embeddings = match &res.embeddings {
        Some(path) => Some(
            EmbedStore::load(path)
                .map(|store| store.with_oov_seed(res.seed))
                .map_err(|e| {
                    Failure::Runtime(format!("cannot load embeddings '{}': {e}", path.display()))
                })?,
        ),
        None => None,
    };
    let sidecar = match &res.sidecar {
        Some(path) => Some(ContextualSidecar::load(path).map_err(|e| {
            Failure::Runtime(format!("cannot load sidecar '{}': {e}", path.display()))
        })?),
        None => None,
    };
    let search = SearchConfig {
        mode: SearchMode::Exact,
        restarts: res.restarts,
        seed: res.seed,
        exact_limit: res.exact_limit,
    };
    Ok((embeddings, sidecar, search))
}

/// Writes one table per dataset: to stdout when no path is given (single
/// dataset only), to the path itself for a single dataset, or into the path
/// as a directory of `<name>.tsv` files for several.
fn write_tables(out: Option<&Path>, tables: &[(&str, &ScoreTable)]) -> Result<(), Failure> {
    match out {
        None => {
            if tables.len() > 1 {
                return Err(usage("--out is required when several datasets are given"));
            }
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match tables[0].1.write_tsv(&mut lock) {
                Ok(()) => Ok(()),
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(runtime(format!("cannot write to stdout: {e}"))),
            }
        }
        Some(path) if tables.len() == 1 && !path.is_dir() => write_table_file(path, tables[0].1),
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| runtime(format!("cannot create '{}': {e}", dir.display())))?;
            for (name, table) in tables {
                write_table_file(&dir.join(format!("{name}.tsv")), table)?;
            }
            Ok(())
        }
    }
}

fn write_table_file(path: &Path, table: &ScoreTable) -> Result<(), Failure> {
    let file = fs::File::create(path)
        .map_err(|e| runtime(format!("cannot write '{}': {e}", path.display())))?;
    let mut writer = std::io::BufWriter::new(file);
    table
        .write_tsv(&mut writer)
        .and_then(|()| writer.flush())
        .map_err(|e| runtime(format!("cannot write '{}': {e}", path.display())))
}

/// Min-max rescales the present values to `[0, 1]`; a constant column maps
/// to 0.5 everywhere so that ties stay ties.
fn min_max(values: &[Option<f64>]) -> Vec<Option<f64>> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let (Some(min), Some(max)) = (
        present.iter().copied().reduce(f64::min),
        present.iter().copied().reduce(f64::max),
    ) else {
        return values.to_vec();
    };
    if min == max {
        return values.iter().map(|v| v.map(|_| 0.5)).collect();
    }
    values
        .iter()
        .map(|v| v.map(|x| (x - min) / (max - min)))
        .collect()
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

pub fn score(args: &ScoreArgs) -> Result<(), Failure> {
    let metrics = parse_metric_list(&args.metrics).map_err(Failure::Usage)?;
    if metrics.is_empty() {
        return Err(usage("at least one --metrics entry is required"));
    }
    let datasets = load_inputs(&args.inputs)?;
    let (embeddings, sidecar, search) = build_resources(&args.resources, &metrics)?;
    let resources = Resources {
        embeddings: embeddings.as_ref(),
        sidecar: sidecar.as_ref(),
        search,
    };
    let mut tables = Vec::with_capacity(datasets.len());
    for (arg, dataset) in &datasets {
        let table = run_metrics(&dataset.pairs, &metrics, &resources, args.resources.threads)
            .map_err(runtime)?;
        for error in &table.errors {
            log::warn!(
                "{}: pair {}, column {}: {}",
                arg.name,
                error.id,
                error.column,
                error.message
            );
        }
        tables.push((arg.name.as_str(), table));
    }
    let refs: Vec<(&str, &ScoreTable)> = tables.iter().map(|(n, t)| (*n, t)).collect();
    write_tables(args.out.as_deref(), &refs)
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

/// One dataset's scores plus the bookkeeping the report needs.
struct Evaluated {
    name: String,
    source: String,
    skipped_unknown_labels: usize,
    table: ScoreTable,
}

pub fn eval(args: &EvalArgs) -> Result<(), Failure> {
    // ---- flag parsing and cross-flag validation
    let requested = parse_metric_list(&args.metrics).map_err(Failure::Usage)?;
    let hybrid = args
        .hybrid
        .as_deref()
        .map(parse_hybrid)
        .transpose()
        .map_err(Failure::Usage)?;
    let range = args
        .sweep_alpha
        .as_deref()
        .map(parse_alpha_range)
        .transpose()
        .map_err(Failure::Usage)?;
    if range.is_some() && hybrid.is_none() {
        return Err(usage("--sweep-alpha needs --hybrid to name its components"));
    }
    if args.sweep_out.is_some() && range.is_none() {
        return Err(usage("--sweep-out needs --sweep-alpha"));
    }
    if args.normalize && hybrid.is_none() {
        return Err(usage("--normalize only affects --hybrid blending"));
    }
    let percents = parse_percent_list(&args.top_p).map_err(Failure::Usage)?;
    let grid = match range {
        Some(r) => Some(alpha_grid(r.start, r.end, r.step).map_err(|e| usage(e.to_string()))?),
        None => None,
    };
    let in_args = parse_dataset_args(&args.inputs.inputs).map_err(Failure::Usage)?;
    let table_args = parse_dataset_args(&args.scores).map_err(Failure::Usage)?;
    if in_args.is_empty() && table_args.is_empty() {
        return Err(usage(
            "give at least one --in dataset or --scores table to evaluate",
        ));
    }
    for arg in &table_args {
        if in_args.iter().any(|other| other.name == arg.name) {
            return Err(usage(format!(
                "dataset name '{}' appears in both --in and --scores",
                arg.name
            )));
        }
    }

    // ---- what to compute for the --in datasets
    let mut compute_metrics = if requested.is_empty() {
        Metric::COMPUTED.to_vec()
    } else {
        requested.clone()
    };
    if let Some(h) = &hybrid {
        for component in [&h.graph, &h.text] {
            if !compute_metrics.contains(component) {
                compute_metrics.push(component.clone());
            }
        }
    }
    let (embeddings, sidecar, search) = if in_args.is_empty() {
        (None, None, SearchConfig::default())
    } else {
        build_resources(&args.resources, &compute_metrics)?
    };

    // ---- load and score every dataset
    let mut evaluated: Vec<Evaluated> = Vec::new();
    for arg in &in_args {
        let format = resolve_format(args.inputs.format, &arg.path)?;
        let dataset = load_dataset(&arg.path, format).map_err(runtime)?;
        if dataset.pairs.is_empty() {
            return Err(Failure::Runtime(format!(
                "no pairs loaded from '{}'",
                arg.path.display()
            )));
        }
        let resources = Resources {
            embeddings: embeddings.as_ref(),
            sidecar: sidecar.as_ref(),
            search,
        };
        let table = run_metrics(
            &dataset.pairs,
            &compute_metrics,
            &resources,
            args.resources.threads,
        )
        .map_err(runtime)?;
        for error in &table.errors {
            log::warn!(
                "{}: pair {}, column {}: {}",
                arg.name,
                error.id,
                error.column,
                error.message
            );
        }
        evaluated.push(Evaluated {
            name: arg.name.clone(),
            source: arg.path.display().to_string(),
            skipped_unknown_labels: dataset.skipped_unknown_labels,
            table,
        });
    }
    for arg in &table_args {
        let file = fs::File::open(&arg.path)
            .map_err(|e| runtime(format!("cannot read '{}': {e}", arg.path.display())))?;
        let table = ScoreTable::read_tsv(BufReader::new(file), &arg.path.display().to_string())
            .map_err(runtime)?;
        if table.rows.is_empty() {
            return Err(Failure::Runtime(format!(
                "no pairs loaded from '{}'",
                arg.path.display()
            )));
        }
        evaluated.push(Evaluated {
            name: arg.name.clone(),
            source: arg.path.display().to_string(),
            skipped_unknown_labels: 0,
            table,
        });
    }

    // ---- dataset names excluded from the NLI average
    let dataset_names: BTreeSet<String> = evaluated.iter().map(|e| e.name.clone()).collect();
    let mut nli_excluded = BTreeSet::new();
    for name in &args.exclude_from_nli_avg {
        if !dataset_names.contains(name) {
            return Err(usage(format!(
                "--exclude-from-nli-avg names unknown dataset '{name}'"
            )));
        }
        nli_excluded.insert(name.clone());
    }

    // ---- blend the hybrid column into every table
    // Per dataset: the component columns as used for blending (after any
    // normalization), kept for the alpha sweep.
    let mut components: HybridComponents = BTreeMap::new();
    if let Some(h) = &hybrid {
        let column = h.column_name();
        for ev in &mut evaluated {
            let pull = |name: &str| -> Result<Vec<Option<f64>>, Failure> {
                let index = ev.table.column_index(name).ok_or_else(|| {
                    Failure::Runtime(format!(
                        "dataset '{}' has no column '{}' for the hybrid blend",
                        ev.name, name
                    ))
                })?;
                Ok(ev.table.rows.iter().map(|r| r.values[index]).collect())
            };
            let mut graph = pull(&h.graph.to_string())?;
            let mut text = pull(&h.text.to_string())?;
            if args.normalize {
                graph = min_max(&graph);
                text = min_max(&text);
            }
            let blended: Vec<Option<f64>> = graph
                .iter()
                .zip(&text)
                .map(|(g, t)| match (g, t) {
                    (Some(g), Some(t)) => {
                        Some(hybrid_score(*g, *t, h.alpha).expect("alpha was validated"))
                    }
                    _ => None,
                })
                .collect();
            ev.table.add_column(&column, blended).map_err(runtime)?;
            components.insert(ev.name.clone(), (graph, text));
        }
    }

    // ---- the metric rows of the report
    let metric_names: Vec<String> = if requested.is_empty() {
        let mut names = Vec::new();
        for ev in &evaluated {
            for column in &ev.table.columns {
                if !names.contains(column) {
                    names.push(column.clone());
                }
            }
        }
        names
    } else {
        let mut names: Vec<String> = requested.iter().map(|m| m.to_string()).collect();
        if let Some(h) = &hybrid {
            names.push(h.column_name());
        }
        names
    };

    // ---- ranking quality per metric and dataset
    let auc = summarize_auc(&evaluated, &metric_names, &nli_excluded, "")?;

    // ---- precision among the top-scored fraction
    let mut top_fraction = Vec::new();
    for name in &metric_names {
        for &percent in &percents {
            let mut by_dataset = BTreeMap::new();
            for ev in &evaluated {
                let value = match ev.table.column_items(name) {
                    Ok((items, _)) if items.is_empty() => None,
                    Ok((items, _)) => {
                        Some(precision_at_top(&items, percent / 100.0).map_err(runtime)?)
                    }
                    Err(EvalError::UnknownColumn { .. }) => None,
                    Err(e) => return Err(runtime(e)),
                };
                by_dataset.insert(ev.name.clone(), value);
            }
            top_fraction.push(TopFractionSummary::new(
                name.clone(),
                percent,
                by_dataset,
                &nli_excluded,
            ));
        }
    }

    // ---- the id-subset section
    let subset = match &args.subset {
        Some(path) => Some(subset_section(
            path,
            &evaluated,
            &metric_names,
            &auc,
            &nli_excluded,
        )?),
        None => None,
    };

    // ---- the alpha sweep
    let sweep = match (&hybrid, &grid) {
        (Some(h), Some(grid)) => Some(sweep_section(
            h,
            grid,
            &evaluated,
            &components,
            &nli_excluded,
        )?),
        _ => None,
    };

    // ---- assemble and write
    let datasets: Vec<DatasetInfo> = evaluated
        .iter()
        .map(|ev| DatasetInfo {
            name: ev.name.clone(),
            source: ev.source.clone(),
            pairs: ev.table.rows.len(),
            skipped_unknown_labels: ev.skipped_unknown_labels,
            excluded_from_nli_avg: nli_excluded.contains(&ev.name),
            score_errors: ev.table.errors.len(),
        })
        .collect();

    if let Some(path) = &args.scores_out {
        let refs: Vec<(&str, &ScoreTable)> = evaluated
            .iter()
            .map(|ev| (ev.name.as_str(), &ev.table))
            .collect();
        write_tables(Some(path), &refs)?;
    }
    if let (Some(path), Some(sweep)) = (&args.sweep_out, &sweep) {
        let order: Vec<&str> = evaluated.iter().map(|ev| ev.name.as_str()).collect();
        write_sweep_csv(path, sweep, &order)?;
    }

    let report = EvalReport {
        datasets,
        auc,
        top_fraction,
        subset,
        sweep,
    };
    let mut json = serde_json::to_string_pretty(&report).map_err(runtime)?;
    json.push('\n');
    match &args.report {
        Some(path) => fs::write(path, json)
            .map_err(|e| runtime(format!("cannot write '{}': {e}", path.display()))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            stdout_line(&mut lock, format_args!("{json}")).map(|_| ())
        }
    }
}

/// Ranking quality of every metric column across datasets. A metric missing
/// from a dataset's table, or scored on no rows, yields an empty cell; a
/// dataset whose rows all share one label is a fatal error, since ranking
/// quality needs at least one entailed and one non-entailed pair.
fn summarize_auc(
    evaluated: &[Evaluated],
    metric_names: &[String],
    nli_excluded: &BTreeSet<String>,
    context: &str,
) -> Result<Vec<MetricSummary>, Failure> {
    let mut summaries = Vec::with_capacity(metric_names.len());
    for name in metric_names {
        let mut by_dataset = BTreeMap::new();
        let mut skipped_rows = BTreeMap::new();
        for ev in evaluated {
            match auc_cell(&ev.table, name)? {
                AucCell::Value(cell) => {
                    by_dataset.insert(ev.name.clone(), Some(cell.auc));
                    skipped_rows.insert(ev.name.clone(), cell.skipped);
                }
                AucCell::Missing => {
                    by_dataset.insert(ev.name.clone(), None);
                }
                AucCell::SingleClass(message) => {
                    return Err(Failure::Runtime(format!(
                        "dataset '{}'{context}, column '{name}': {message}; \
                         ranking quality needs both an entailed and a non-entailed pair",
                        ev.name
                    )));
                }
            }
        }
        summaries.push(MetricSummary::new(
            name.clone(),
            by_dataset,
            skipped_rows,
            nli_excluded,
        ));
    }
    Ok(summaries)
}

enum AucCell {
    Value(ColumnAuc),
    Missing,
    SingleClass(String),
}

fn auc_cell(table: &ScoreTable, name: &str) -> Result<AucCell, Failure> {
    if table.column_index(name).is_none() {
        log::warn!("column '{name}' is absent from a score table; reporting an empty cell");
        return Ok(AucCell::Missing);
    }
    match table.column_auc(name) {
        Ok(cell) => Ok(AucCell::Value(cell)),
        Err(EvalError::EmptyScores) => Ok(AucCell::Missing),
        Err(e @ EvalError::SingleClass { .. }) => Ok(AucCell::SingleClass(e.to_string())),
        Err(e) => Err(runtime(e)),
    }
}

fn subset_section(
    path: &Path,
    evaluated: &[Evaluated],
    metric_names: &[String],
    full_auc: &[MetricSummary],
    nli_excluded: &BTreeSet<String>,
) -> Result<SubsetReport, Failure> {
    let ids = load_id_list(path).map_err(runtime)?;
    let mut matched_by_dataset = BTreeMap::new();
    let mut matched_anywhere: BTreeSet<&String> = BTreeSet::new();
    let mut sub_evaluated = Vec::with_capacity(evaluated.len());
    for ev in evaluated {
        let (sub, _) = ev.table.subset(&ids);
        for row in &sub.rows {
            if let Some(id) = ids.get(&row.id) {
                matched_anywhere.insert(id);
            }
        }
        matched_by_dataset.insert(ev.name.clone(), sub.rows.len());
        sub_evaluated.push(Evaluated {
            name: ev.name.clone(),
            source: ev.source.clone(),
            skipped_unknown_labels: 0,
            table: sub,
        });
    }
    let unmatched_ids = ids.len() - matched_anywhere.len();
    let auc = summarize_auc(&sub_evaluated, metric_names, nli_excluded, " (id subset)")?;
    let delta_vs_full = auc
        .iter()
        .zip(full_auc)
        .map(|(sub, full)| {
            let by_dataset: BTreeMap<String, Option<f64>> = sub
                .by_dataset
                .iter()
                .map(|(name, sub_value)| {
                    let delta = match (sub_value, full.by_dataset.get(name).copied().flatten()) {
                        (Some(s), Some(f)) => Some(s - f),
                        _ => None,
                    };
                    (name.clone(), delta)
                })
                .collect();
            MetricSummary::new(
                sub.metric.clone(),
                by_dataset,
                BTreeMap::new(),
                nli_excluded,
            )
        })
        .collect();
    Ok(SubsetReport {
        requested_ids: ids.len(),
        matched_by_dataset,
        unmatched_ids,
        auc,
        delta_vs_full,
    })
}

fn sweep_section(
    hybrid: &crate::options::HybridConfig,
    grid: &[f64],
    evaluated: &[Evaluated],
    components: &HybridComponents,
    nli_excluded: &BTreeSet<String>,
) -> Result<SweepReport, Failure> {
    let mut curves: BTreeMap<String, Option<Vec<(f64, f64)>>> = BTreeMap::new();
    for ev in evaluated {
        let (graph, text) = components
            .get(&ev.name)
            .expect("components prepared for every dataset");
        let mut graph_scores = Vec::new();
        let mut text_scores = Vec::new();
        let mut gold = Vec::new();
        for (row, (g, t)) in ev.table.rows.iter().zip(graph.iter().zip(text)) {
            if let (Some(g), Some(t)) = (g, t) {
                graph_scores.push(*g);
                text_scores.push(*t);
                gold.push(row.gold);
            }
        }
        if graph_scores.is_empty() {
            curves.insert(ev.name.clone(), None);
            continue;
        }
        let curve = sweep_alpha(&graph_scores, &text_scores, &gold, grid)
            .map_err(|e| Failure::Runtime(format!("dataset '{}', alpha sweep: {e}", ev.name)))?;
        curves.insert(ev.name.clone(), Some(curve));
    }
    let points = grid
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let by_dataset: BTreeMap<String, Option<f64>> = curves
                .iter()
                .map(|(name, curve)| (name.clone(), curve.as_ref().map(|c| c[i].1)))
                .collect();
            let avg_all = mean_over(by_dataset.values().copied());
            let avg_nli = mean_over(
                by_dataset
                    .iter()
                    .filter(|(name, _)| !nli_excluded.contains(*name))
                    .map(|(_, value)| *value),
            );
            SweepPoint {
                alpha,
                by_dataset,
                avg_all,
                avg_nli,
            }
        })
        .collect();
    Ok(SweepReport {
        graph_metric: hybrid.graph.to_string(),
        text_metric: hybrid.text.to_string(),
        points,
    })
}

/// The sweep as CSV: one row per alpha, one column per dataset in input
/// order, then the averages. Empty cells are written as `NA`.
fn write_sweep_csv(path: &Path, sweep: &SweepReport, order: &[&str]) -> Result<(), Failure> {
    let mut out = String::new();
    out.push_str("alpha");
    for name in order {
        out.push(',');
        out.push_str(name);
    }
    out.push_str(",AVG_all,AVG_nli\n");
    let cell = |value: Option<f64>| match value {
        Some(v) => format!("{v:.6}"),
        None => "NA".to_string(),
    };
    for point in &sweep.points {
        out.push_str(&format!("{:.6}", point.alpha));
        for name in order {
            out.push(',');
            out.push_str(&cell(point.by_dataset.get(*name).copied().flatten()));
        }
        out.push(',');
        out.push_str(&cell(point.avg_all));
        out.push(',');
        out.push_str(&cell(point.avg_nli));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| runtime(format!("cannot write '{}': {e}", path.display())))
}

// ---------------------------------------------------------------------------
// validate-amr
// ---------------------------------------------------------------------------

pub fn validate(args: &ValidateArgs) -> Result<(), Failure> {
    let datasets = load_inputs(&args.inputs)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut failed_ids = Vec::new();
    // When the reader closes the pipe, stop printing but keep validating so
    // the exit code still reflects the whole input.
    let mut sink_open = true;
    let emit = |out: &mut dyn Write, sink_open: &mut bool, line: String| -> Result<(), Failure> {
        if *sink_open {
            *sink_open = stdout_line(out, format_args!("{line}\n"))?;
        }
        Ok(())
    };
    emit(
        &mut out,
        &mut sink_open,
        "dataset\tid\tpremise_triples\thypothesis_triples".to_string(),
    )?;
    for (arg, dataset) in &datasets {
        for pair in &dataset.pairs {
            let mut problems = Vec::new();
            let mut count = |side: &str, text: Option<&str>| -> Option<usize> {
                match text {
                    None => {
                        problems.push(format!("missing {side} graph"));
                        None
                    }
                    Some(text) => match entail_core::penman::parse(text) {
                        Ok(graph) => Some(graph.triples().len()),
                        Err(e) => {
                            problems.push(format!("{side} graph: {e}"));
                            None
                        }
                    },
                }
            };
            let premise = count("premise", pair.premise_amr.as_deref());
            let hypothesis = count("hypothesis", pair.hypothesis_amr.as_deref());
            match (premise, hypothesis, problems.is_empty()) {
                (Some(p), Some(h), true) => {
                    emit(
                        &mut out,
                        &mut sink_open,
                        format!("{}\t{}\t{}\t{}", arg.name, pair.id, p, h),
                    )?;
                }
                _ => {
                    emit(
                        &mut out,
                        &mut sink_open,
                        format!("{}\t{}\terror\t{}", arg.name, pair.id, problems.join("; ")),
                    )?;
                    failed_ids.push(format!("{}/{}", arg.name, pair.id));
                }
            }
        }
    }
    if failed_ids.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(format!(
            "{} pair(s) failed validation: {}",
            failed_ids.len(),
            failed_ids.join(", ")
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_max_rescales_and_keeps_missing_cells() {
        let values = vec![Some(0.2), None, Some(0.7), Some(0.45)];
        let scaled = min_max(&values);
        assert_eq!(scaled[0], Some(0.0));
        assert_eq!(scaled[1], None);
        assert_eq!(scaled[2], Some(1.0));
        assert!((scaled[3].unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn min_max_maps_constant_columns_to_the_midpoint() {
        let values = vec![Some(0.4), Some(0.4), None];
        assert_eq!(min_max(&values), vec![Some(0.5), Some(0.5), None]);
    }

    #[test]
    fn min_max_of_all_missing_is_unchanged() {
        let values: Vec<Option<f64>> = vec![None, None];
        assert_eq!(min_max(&values), values);
    }
}
