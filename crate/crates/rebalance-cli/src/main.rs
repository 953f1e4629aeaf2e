//! Batch front-end for the rebalance library.
//!
//! Four subcommands: `balance` writes one oversampled CSV, `benchmark`
//! runs the cross-validated sampler comparison and emits result tables,
//! `timing` measures sampler wall time over growing stratified subsets,
//! and `rerun` re-executes any of those from its manifest. Every run
//! writes a manifest capturing the fully resolved configuration next to
//! its outputs; metric values and balanced datasets reproduce exactly
//! under a rerun, wall-clock columns do not.
//!
//! Exit codes: 2 for configuration errors, 3 for data errors, 1 for
//! internal failures.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use rebalance::harness::{
    run_with_plan, stratified_folds, timing_scan, ClassifierId, ExperimentRecord, RunOptions,
};
use rebalance::samplers::{transform, SamplerConfig, SamplerId};
use rebalance::{load_csv, Dataset, Error, LabelColumn};

const EXIT_INTERNAL: i32 = 1;
const EXIT_CONFIG: i32 = 2;
const EXIT_DATA: i32 = 3;

#[derive(Parser)]
#[command(name = "rebalance", version, about = "Class-imbalance oversampling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Balance one dataset with one sampler and write the result as CSV.
    Balance(BalanceArgs),
    /// Compare samplers under stratified cross-validation and emit tables.
    Benchmark(BenchmarkArgs),
    /// Measure sampler wall time over growing stratified subsets.
    Timing(TimingArgs),
    /// Re-execute a previous run from its manifest.
    Rerun(RerunArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Input CSV path.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Label column header name.
    #[arg(long, default_value = "label", conflicts_with = "label_index")]
    label: String,
    /// Zero-based label column index, for headerless files.
    #[arg(long, value_name = "N")]
    label_index: Option<usize>,
}

impl InputArgs {
    fn selector(&self) -> LabelSel {
        match self.label_index {
            Some(i) => LabelSel::Index(i),
            None => LabelSel::Name(self.label.clone()),
        }
    }
}

#[derive(Args, Clone)]
struct ThreadArgs {
    /// Worker thread cap; defaults to all cores.
    #[arg(long, env = "REBALANCE_THREADS", value_name = "N")]
    threads: Option<usize>,
}

/// One optional override per sampler configuration field; unset flags keep
/// the library defaults.
#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// Interpolation neighbor count.
    #[arg(long)]
    k: Option<usize>,
    /// Noise-filter neighbor count.
    #[arg(long)]
    k1: Option<usize>,
    /// Border-selection neighbor count.
    #[arg(long)]
    k2: Option<usize>,
    /// Vote-collection neighbor count.
    #[arg(long)]
    k3: Option<usize>,
    /// Cluster count for cluster-guided samplers.
    #[arg(long)]
    cluster_k: Option<usize>,
    /// Cluster count for the majority-weighted sampler.
    #[arg(long)]
    mwmote_cluster_k: Option<usize>,
    /// Gaussian gap spread.
    #[arg(long)]
    sigma: Option<f64>,
    /// Cleaning energy budget per minority row.
    #[arg(long)]
    energy: Option<f64>,
    /// Outcast threshold scan bound, as a fraction of the dataset.
    #[arg(long)]
    c_max_ratio: Option<f64>,
    /// Cap on neighbors returned by radius queries.
    #[arg(long)]
    radius_neighbor_cap: Option<usize>,
    /// Majority-to-minority ratio above which a cluster is rejected.
    #[arg(long)]
    imbalance_ratio_threshold: Option<f64>,
    /// Sparsity exponent override; defaults to the feature count.
    #[arg(long)]
    density_exponent: Option<f64>,
    /// Closeness ceiling after rescaling.
    #[arg(long)]
    mwmote_c_max: Option<f64>,
    /// Closeness clip threshold.
    #[arg(long)]
    mwmote_cf_th: Option<f64>,
    /// Minimum minority neighbors for a row to stay a seed.
    #[arg(long)]
    nras_threshold: Option<usize>,
    /// Kernel width for the potential walk.
    #[arg(long)]
    rbo_gamma: Option<f64>,
    /// Step budget for the potential walk.
    #[arg(long)]
    rbo_iterations: Option<usize>,
    /// Step length for the potential walk.
    #[arg(long)]
    rbo_step_size: Option<f64>,
    /// Expected fraction of the step budget actually walked.
    #[arg(long)]
    rbo_stop_probability: Option<f64>,
    /// Oversize factor for attempt batches.
    #[arg(long)]
    safe_level_correction_rate: Option<f64>,
    /// F-measure beta used by benchmark metrics.
    #[arg(long)]
    beta: Option<f64>,
    /// Root seed for every random stream.
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn resolve(&self) -> SamplerConfig {
        let mut cfg = SamplerConfig::default();
        macro_rules! apply {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field.clone() { cfg.$field = v; })*
            };
        }
        apply!(
            k,
            k1,
            k2,
            k3,
            cluster_k,
            mwmote_cluster_k,
            sigma,
            energy,
            c_max_ratio,
            radius_neighbor_cap,
            imbalance_ratio_threshold,
            mwmote_c_max,
            mwmote_cf_th,
            nras_threshold,
            rbo_gamma,
            rbo_iterations,
            rbo_step_size,
            rbo_stop_probability,
            safe_level_correction_rate,
            beta,
            seed
        );
        if self.density_exponent.is_some() {
            cfg.density_exponent = self.density_exponent;
        }
        cfg
    }
}

#[derive(Args)]
struct BalanceArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Sampler name.
    #[arg(long)]
    sampler: String,
    /// Output CSV path.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    #[command(flatten)]
    threads: ThreadArgs,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated sampler names; the unsampled "none" row is always
    /// included.
    #[arg(long, value_delimiter = ',', required = true)]
    samplers: Vec<String>,
    /// Comma-separated classifier names.
    #[arg(long, value_delimiter = ',', default_value = "gaussian_nb")]
    classifiers: Vec<String>,
    /// Cross-validation fold count.
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Min-max scale features from train statistics.
    #[arg(long)]
    normalize: bool,
    /// Dataset display name; defaults to the input file stem.
    #[arg(long)]
    name: Option<String>,
    /// Output formats, any of: markdown, csv, json. Defaults to all.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<String>>,
    /// Directory for tables, records, and the manifest.
    #[arg(long, default_value = ".", value_name = "DIR")]
    out_dir: PathBuf,
    #[command(flatten)]
    threads: ThreadArgs,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct TimingArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated sampler names, each timed once per size.
    #[arg(long, value_delimiter = ',', required = true)]
    samplers: Vec<String>,
    /// Strictly ascending subset row counts.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Project each sampler's time to this row count by least squares.
    #[arg(long, value_name = "ROWS")]
    extrapolate: Option<usize>,
    /// Directory for the timing CSV and the manifest.
    #[arg(long, default_value = ".", value_name = "DIR")]
    out_dir: PathBuf,
    #[command(flatten)]
    threads: ThreadArgs,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct RerunArgs {
    /// Manifest written by a previous run.
    #[arg(long, value_name = "PATH")]
    manifest: PathBuf,
}

/// Label column selector in manifest-serializable form.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum LabelSel {
    Name(String),
    Index(usize),
}

impl LabelSel {
    fn column(&self) -> LabelColumn {
        match self {
            LabelSel::Name(n) => LabelColumn::Name(n.clone()),
            LabelSel::Index(i) => LabelColumn::Index(*i),
        }
    }
}

/// Fully resolved run descriptions; the manifest is one of these tagged by
/// command, so a rerun replays exactly what was executed.
#[derive(Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
enum Manifest {
    Balance(BalanceParams),
    Benchmark(BenchmarkParams),
    Timing(TimingParams),
}

#[derive(Clone, Serialize, Deserialize)]
struct BalanceParams {
    version: String,
    input: PathBuf,
    label: LabelSel,
    sampler: String,
    out: PathBuf,
    threads: Option<usize>,
    config: SamplerConfig,
}

#[derive(Clone, Serialize, Deserialize)]
struct BenchmarkParams {
    version: String,
    input: PathBuf,
    label: LabelSel,
    samplers: Vec<String>,
    classifiers: Vec<String>,
    folds: usize,
    normalize: bool,
    name: String,
    formats: Vec<String>,
    out_dir: PathBuf,
    threads: Option<usize>,
    config: SamplerConfig,
}

#[derive(Clone, Serialize, Deserialize)]
struct TimingParams {
    version: String,
    input: PathBuf,
    label: LabelSel,
    samplers: Vec<String>,
    sizes: Vec<usize>,
    extrapolate: Option<usize>,
    out_dir: PathBuf,
    threads: Option<usize>,
    config: SamplerConfig,
}

struct Failure {
    code: i32,
    message: String,
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

fn config_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

fn internal_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INTERNAL,
        message: message.into(),
    }
}

/// Library errors during loading or computation: configuration mistakes
/// keep exit code 2, everything else is a data problem.
fn run_failure(err: Error) -> Failure {
    let code = match err {
        Error::InvalidConfig(_) => EXIT_CONFIG,
        _ => EXIT_DATA,
    };
    Failure {
        code,
        message: err.to_string(),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Balance(args) => balance_params(args).and_then(|p| cmd_balance(&p)),
        Command::Benchmark(args) => benchmark_params(args).and_then(|p| cmd_benchmark(&p)),
        Command::Timing(args) => timing_params(args).and_then(|p| cmd_timing(&p)),
        Command::Rerun(args) => cmd_rerun(&args.manifest),
    };
    if let Err(failure) = outcome {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}

fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

fn balance_params(args: BalanceArgs) -> CliResult<BalanceParams> {
    parse_sampler(&args.sampler)?;
    Ok(BalanceParams {
        version: version(),
        input: args.input.input.clone(),
        label: args.input.selector(),
        sampler: args.sampler,
        out: args.out,
        threads: args.threads.threads,
        config: args.config.resolve(),
    })
}

fn benchmark_params(args: BenchmarkArgs) -> CliResult<BenchmarkParams> {
    let name = match &args.name {
        Some(n) => n.clone(),
        None => args
            .input
            .input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into()),
    };
    Ok(BenchmarkParams {
        version: version(),
        input: args.input.input.clone(),
        label: args.input.selector(),
        samplers: args.samplers,
        classifiers: args.classifiers,
        folds: args.folds,
        normalize: args.normalize,
        name,
        formats: args
            .format
            .unwrap_or_else(|| vec!["markdown".into(), "csv".into(), "json".into()]),
        out_dir: args.out_dir,
        threads: args.threads.threads,
        config: args.config.resolve(),
    })
}

fn timing_params(args: TimingArgs) -> CliResult<TimingParams> {
    Ok(TimingParams {
        version: version(),
        input: args.input.input.clone(),
        label: args.input.selector(),
        samplers: args.samplers,
        sizes: args.sizes,
        extrapolate: args.extrapolate,
        out_dir: args.out_dir,
        threads: args.threads.threads,
        config: args.config.resolve(),
    })
}

fn parse_sampler(name: &str) -> CliResult<SamplerId> {
    name.parse::<SamplerId>()
        .map_err(|e| config_failure(e.to_string()))
}

fn parse_classifier(name: &str) -> CliResult<ClassifierId> {
    name.parse::<ClassifierId>()
        .map_err(|e| config_failure(e.to_string()))
}

fn configure_threads(threads: Option<usize>) -> CliResult {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(config_failure("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| internal_failure(format!("thread pool: {e}")))
}

fn load_input(path: &Path, label: &LabelSel) -> CliResult<Dataset> {
    if !path.exists() {
        return Err(config_failure(format!(
            "input file {} does not exist",
            path.display()
        )));
    }
    load_csv(path, &label.column()).map_err(run_failure)
}

fn write_text(path: &Path, text: &str) -> CliResult {
    std::fs::write(path, text)
        .map_err(|e| internal_failure(format!("writing {}: {e}", path.display())))
}

fn write_manifest(path: &Path, manifest: &Manifest) -> CliResult {
    let mut body = serde_json::to_string_pretty(manifest)
        .map_err(|e| internal_failure(format!("encoding manifest: {e}")))?;
    body.push('\n');
    write_text(path, &body)
}

fn cmd_balance(params: &BalanceParams) -> CliResult {
    configure_threads(params.threads)?;
    let sampler = parse_sampler(&params.sampler)?;
    params.config.validate().map_err(run_failure)?;
    let ds = load_input(&params.input, &params.label)?;
    let before = ds.class_counts();

    let start = Instant::now();
    let balanced = transform(&ds, sampler, &params.config).map_err(run_failure)?;
    let seconds = start.elapsed().as_secs_f64();

    balanced
        .save_csv(&params.out)
        .map_err(|e| internal_failure(format!("writing {}: {e}", params.out.display())))?;
    let manifest_path = sibling_manifest(&params.out);
    write_manifest(&manifest_path, &Manifest::Balance(params.clone()))?;

    let after = balanced.class_counts();
    for (b, a) in before.iter().zip(&after) {
        println!("class {} ({}): {} -> {}", b.label, b.name, b.count, a.count);
    }
    println!("sampling took {seconds:.3} s");
    println!("wrote {}", params.out.display());
    println!("manifest {}", manifest_path.display());
    Ok(())
}

/// `out.csv` gets its manifest at `out.csv.manifest.json`.
fn sibling_manifest(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    name.push_str(".manifest.json");
    out.with_file_name(name)
}

/// Per-sampler fold means for one classifier's table.
struct TableRow {
    method: String,
    av_acc: f64,
    av_f: f64,
    m_avg: f64,
    cba: f64,
    sampling: f64,
    classifying: f64,
    total: f64,
}

fn mean_row(method: &str, records: &[ExperimentRecord]) -> TableRow {
    let n = records.len() as f64;
    let sum = |f: &dyn Fn(&ExperimentRecord) -> f64| records.iter().map(|r| f(r)).sum::<f64>() / n;
    TableRow {
        method: method.to_string(),
        av_acc: sum(&|r| r.metrics.av_acc),
        av_f: sum(&|r| r.metrics.av_f),
        m_avg: sum(&|r| r.metrics.m_avg),
        cba: sum(&|r| r.metrics.cba),
        sampling: sum(&|r| r.sampling_time),
        classifying: sum(&|r| r.classifier_time),
        total: sum(&|r| r.total_time),
    }
}

fn pct(v: f64) -> String {
    format!("{:.2}", v * 100.0)
}

fn secs(v: f64) -> String {
    format!("{v:.3}")
}

const TABLE_HEADER: [&str; 8] = [
    "Sampling Method",
    "AvAvg",
    "AvFb",
    "MAvG",
    "CBA",
    "Sampling Time (s)",
    "Classifier Time (s)",
    "Total Time (s)",
];

fn row_cells(row: &TableRow) -> [String; 8] {
    [
        row.method.clone(),
        pct(row.av_acc),
        pct(row.av_f),
        pct(row.m_avg),
        pct(row.cba),
        secs(row.sampling),
        secs(row.classifying),
        secs(row.total),
    ]
}

fn markdown_table(title: &str, rows: &[TableRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "## {title}");
    let _ = writeln!(out, "| {} |", TABLE_HEADER.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(TABLE_HEADER.len()));
    for row in rows {
        let _ = writeln!(out, "| {} |", row_cells(row).join(" | "));
    }
    out
}

fn csv_table(rows: &[TableRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", TABLE_HEADER.join(","));
    for row in rows {
        let _ = writeln!(out, "{}", row_cells(row).join(","));
    }
    out
}

fn cmd_benchmark(params: &BenchmarkParams) -> CliResult {
    configure_threads(params.threads)?;
    params.config.validate().map_err(run_failure)?;
    for f in &params.formats {
        if !matches!(f.as_str(), "markdown" | "csv" | "json") {
            return Err(config_failure(format!(
                "unknown format '{f}'; expected markdown, csv, or json"
            )));
        }
    }
    if params.classifiers.is_empty() {
        return Err(config_failure("at least one classifier is required"));
    }
    let classifiers: Vec<ClassifierId> = params
        .classifiers
        .iter()
        .map(|c| parse_classifier(c))
        .collect::<CliResult<_>>()?;

    // The unsampled baseline always leads; explicit "none" entries and
    // repeats collapse.
    let mut samplers: Vec<Option<SamplerId>> = vec![None];
    for token in &params.samplers {
        if token == "none" {
            continue;
        }
        let id = parse_sampler(token)?;
        if !samplers.contains(&Some(id)) {
            samplers.push(Some(id));
        }
    }

    let ds = load_input(&params.input, &params.label)?;
    let opts = RunOptions {
        n_folds: params.folds,
        normalize: params.normalize,
        dataset_name: params.name.clone(),
    };
    let plan = stratified_folds(&ds, params.folds, params.config.seed).map_err(run_failure)?;

    std::fs::create_dir_all(&params.out_dir)
        .map_err(|e| internal_failure(format!("creating {}: {e}", params.out_dir.display())))?;

    let mut all_records: Vec<ExperimentRecord> = Vec::new();
    for &classifier in &classifiers {
        let mut rows = Vec::with_capacity(samplers.len());
        for &sampler in &samplers {
            let records = run_with_plan(&ds, &plan, sampler, classifier, &params.config, &opts)
                .map_err(run_failure)?;
            let method = match sampler {
                None => "None".to_string(),
                Some(s) => s.name().to_string(),
            };
            rows.push(mean_row(&method, &records));
            all_records.extend(records);
        }

        let title = format!(
            "{} / {} (mean over {} folds, per-fold times)",
            params.name,
            classifier.name(),
            params.folds
        );
        let markdown = markdown_table(&title, &rows);
        print!("{markdown}");
        if params.formats.iter().any(|f| f == "markdown") {
            let path = params.out_dir.join(format!("benchmark_{}.md", classifier.name()));
            write_text(&path, &markdown)?;
        }
        if params.formats.iter().any(|f| f == "csv") {
            let path = params.out_dir.join(format!("benchmark_{}.csv", classifier.name()));
            write_text(&path, &csv_table(&rows))?;
        }
    }

    if params.formats.iter().any(|f| f == "json") {
        let mut body = serde_json::to_string_pretty(&all_records)
            .map_err(|e| internal_failure(format!("encoding records: {e}")))?;
        body.push('\n');
        write_text(&params.out_dir.join("benchmark_records.json"), &body)?;
    }
    write_manifest(
        &params.out_dir.join("manifest.json"),
        &Manifest::Benchmark(params.clone()),
    )?;
    Ok(())
}

/// Least-squares line through `(x, y)` points, evaluated at `target`.
/// Degenerate spreads fall back to the mean.
fn ols_project(points: &[(f64, f64)], target: f64) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return sy / n;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    intercept + slope * target
}

fn cmd_timing(params: &TimingParams) -> CliResult {
    configure_threads(params.threads)?;
    params.config.validate().map_err(run_failure)?;
    let samplers: Vec<SamplerId> = params
        .samplers
        .iter()
        .map(|s| parse_sampler(s))
        .collect::<CliResult<_>>()?;
    if params.extrapolate.is_some() && params.sizes.len() < 2 {
        return Err(config_failure(
            "--extrapolate needs at least two measured sizes",
        ));
    }

    let ds = load_input(&params.input, &params.label)?;
    let rows = timing_scan(&ds, &samplers, &params.sizes, &params.config).map_err(run_failure)?;

    std::fs::create_dir_all(&params.out_dir)
        .map_err(|e| internal_failure(format!("creating {}: {e}", params.out_dir.display())))?;

    // Long-format CSV with a log-scale-ready column; the projection column
    // repeats each sampler's least-squares estimate at the target size.
    let projections: Vec<Option<f64>> = match params.extrapolate {
        None => vec![None; rows.len()],
        Some(target) => {
            let mut by_sampler: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
            for row in &rows {
                match by_sampler.iter_mut().find(|(s, _)| *s == row.sampler) {
                    Some((_, pts)) => pts.push((row.size as f64, row.seconds)),
                    None => by_sampler
                        .push((row.sampler.clone(), vec![(row.size as f64, row.seconds)])),
                }
            }
            rows.iter()
                .map(|row| {
                    let pts = &by_sampler.iter().find(|(s, _)| *s == row.sampler).expect("seen").1;
                    Some(ols_project(pts, target as f64))
                })
                .collect()
        }
    };

    let mut csv = String::new();
    match params.extrapolate {
        None => {
            let _ = writeln!(csv, "sampler,size,seconds,log10_seconds");
        }
        Some(target) => {
            let _ = writeln!(csv, "sampler,size,seconds,log10_seconds,projected_{target}_s");
        }
    }
    let mut table = String::from("| Sampler | Rows | Seconds |\n|---|---|---|\n");
    for (row, projection) in rows.iter().zip(&projections) {
        let log10 = row.seconds.max(1e-9).log10();
        match projection {
            None => {
                let _ = writeln!(csv, "{},{},{:.6},{log10:.4}", row.sampler, row.size, row.seconds);
            }
            Some(p) => {
                let _ = writeln!(
                    csv,
                    "{},{},{:.6},{log10:.4},{p:.6}",
                    row.sampler, row.size, row.seconds
                );
            }
        }
        let _ = writeln!(table, "| {} | {} | {:.3} |", row.sampler, row.size, row.seconds);
    }
    write_text(&params.out_dir.join("timing.csv"), &csv)?;
    print!("{table}");
    if let Some(target) = params.extrapolate {
        let seen: BTreeSet<&str> = rows.iter().map(|r| r.sampler.as_str()).collect();
        for sampler in seen {
            let idx = rows.iter().position(|r| r.sampler == sampler).expect("seen");
            if let Some(p) = projections[idx] {
                println!("projected {sampler} at {target} rows: {p:.3} s");
            }
        }
    }
    write_manifest(
        &params.out_dir.join("manifest.json"),
        &Manifest::Timing(params.clone()),
    )?;
    Ok(())
}

fn cmd_rerun(manifest_path: &Path) -> CliResult {
    if !manifest_path.exists() {
        return Err(config_failure(format!(
            "manifest {} does not exist",
            manifest_path.display()
        )));
    }
    let body = std::fs::read_to_string(manifest_path)
        .map_err(|e| internal_failure(format!("reading {}: {e}", manifest_path.display())))?;
    let manifest: Manifest = serde_json::from_str(&body)
        .map_err(|e| config_failure(format!("manifest does not parse: {e}")))?;
    let stored_version = match &manifest {
        Manifest::Balance(p) => &p.version,
        Manifest::Benchmark(p) => &p.version,
        Manifest::Timing(p) => &p.version,
    };
    if *stored_version != version() {
        log::warn!(
            "manifest was written by version {stored_version}, this is {}",
            version()
        );
    }
    match manifest {
        Manifest::Balance(p) => cmd_balance(&p),
        Manifest::Benchmark(p) => cmd_benchmark(&p),
        Manifest::Timing(p) => cmd_timing(&p),
    }
}
