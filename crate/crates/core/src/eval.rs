//! Batch-stream experiments: repeated runs over seeded batch plans,
//! per-batch metrics, parameter sweeps and summary tables.
//!
//! Each run shuffles the dataset with its own seed, cuts it into training
//! batches plus a fixed test set, trains the initial tree on `B_0` with the
//! retrain baseline, and then updates on the cumulative data `D_t` for every
//! later batch.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{
    self, BatchPlan, Dataset, DatasetManifest, Delimiter, LabelColumn, LoadOptions, SyntheticSpec,
};
use crate::diff::structural_diff;
use crate::error::{Error, Result};
use crate::grow::GrowthConfig;
use crate::keep_regrow::{keep_original, retrain, update};
use crate::loss::{check_features, misclassified_rows, LossParams};
use crate::tree::Tree;

/// z-value of a two-sided 95% normal interval.
const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Algorithm {
    KeepRegrow {
        alpha: f64,
        beta: f64,
    },
    /// Grow and prune from scratch each batch; plotted as beta = -100.
    Retrain {
        alpha: f64,
    },
    /// Never change the initial tree; plotted as beta = 100.
    KeepOriginal {
        alpha: f64,
    },
}

impl Algorithm {
    pub fn alpha(&self) -> f64 {
        match *self {
            Algorithm::KeepRegrow { alpha, .. }
            | Algorithm::Retrain { alpha }
            | Algorithm::KeepOriginal { alpha } => alpha,
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match *self {
            Algorithm::KeepRegrow { beta, .. } => Some(beta),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Algorithm::KeepRegrow { .. } => "keep_regrow",
            Algorithm::Retrain { .. } => "retrain",
            Algorithm::KeepOriginal { .. } => "keep_original",
        }
    }

    /// The beta value this algorithm corresponds to on beta-sweep plots.
    pub fn plot_beta(&self) -> f64 {
        match *self {
            Algorithm::KeepRegrow { beta, .. } => beta,
            Algorithm::Retrain { .. } => -100.0,
            Algorithm::KeepOriginal { .. } => 100.0,
        }
    }

    /// Short name used for archive directories, e.g. `keep_regrow_a5_b1`.
    pub fn label(&self) -> String {
        match self.beta() {
            Some(b) => format!("{}_a{}_b{}", self.kind(), self.alpha(), b),
            None => format!("{}_a{}", self.kind(), self.alpha()),
        }
    }

    fn params(&self) -> Result<LossParams> {
        LossParams::new(self.alpha(), self.beta().unwrap_or(0.0))
    }
}

/// Where an experiment's data comes from. Relative paths resolve against
/// the config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    Manifest {
        manifest: PathBuf,
    },
    Csv {
        path: PathBuf,
        #[serde(default)]
        label_column: Option<LabelColumn>,
        #[serde(default)]
        delimiter: Delimiter,
        #[serde(default)]
        has_header: bool,
    },
    Synthetic {
        spec: SyntheticSpec,
        #[serde(default)]
        seed: u64,
    },
    Iris,
}

impl DatasetSource {
    pub fn load(&self, base: &Path) -> Result<Dataset> {
        match self {
            DatasetSource::Manifest { manifest } => {
                DatasetManifest::from_file(base.join(manifest))?.load()
            }
            DatasetSource::Csv {
                path,
                label_column,
                delimiter,
                has_header,
            } => data::load_csv(
                base.join(path),
                &LoadOptions {
                    label: label_column.clone().unwrap_or_default(),
                    has_header: *has_header,
                    delimiter: *delimiter,
                },
            ),
            DatasetSource::Synthetic { spec, seed } => data::synthetic(spec, *seed),
            DatasetSource::Iris => Ok(Dataset::iris()),
        }
    }
}

fn default_runs() -> usize {
    12
}
fn default_batches() -> usize {
    10
}
fn default_batch_size() -> usize {
    1000
}
fn default_test_size() -> usize {
    100_000
}
fn default_true() -> bool {
    true
}

/// Parameter sweep. With `betas` empty this is an alpha sweep on the first
/// batch; otherwise every (alpha, beta) pair is evaluated on the second
/// batch next to the two baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub betas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Dataset name written into every result row.
    pub name: String,
    pub dataset: DatasetSource,
    #[serde(default)]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_runs")]
    pub n_runs: usize,
    #[serde(default = "default_batches")]
    pub n_batches: usize,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_test_size")]
    pub test_size: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub growth: GrowthConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    /// Fill the `wall_time_ms` column. Off by default so result tables
    /// are byte-for-byte reproducible.
    #[serde(default)]
    pub record_wall_time: bool,
    #[serde(default = "default_true")]
    pub archive_trees: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(
        name: impl Into<String>,
        dataset: DatasetSource,
        algorithms: Vec<Algorithm>,
    ) -> Self {
        ExperimentConfig {
            name: name.into(),
            dataset,
            algorithms,
            n_runs: default_runs(),
            n_batches: default_batches(),
            batch_size: default_batch_size(),
            test_size: default_test_size(),
            seed: 0,
            growth: GrowthConfig::default(),
            sweep: None,
            record_wall_time: false,
            archive_trees: true,
            output_dir: None,
        }
    }

    /// Parses a TOML config; errors carry line and column.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 || self.n_batches == 0 || self.batch_size == 0 {
            return Err(Error::Config(
                "n_runs, n_batches and batch_size must be >= 1".into(),
            ));
        }
        if self.algorithms.is_empty() && self.sweep.is_none() {
            return Err(Error::Config(
                "no algorithms listed and no sweep configured".into(),
            ));
        }
        if let Some(s) = &self.sweep {
            if s.alphas.is_empty() {
                return Err(Error::Config("sweep.alphas must not be empty".into()));
            }
        }
        for alg in &self.algorithms {
            alg.params()?;
        }
        self.growth.validate()
    }

    /// Seed for run `run`, mixed from the base seed.
    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed ^ (run as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub run: usize,
    pub batch: usize,
    pub accuracy: f64,
    pub test_size: usize,
    pub nodes: usize,
    /// Changed nodes versus the previous batch's tree; at batch 0 every
    /// node is new.
    pub delta: usize,
    /// Partial-match similarity to the previous batch's tree; `None` at batch 0.
    pub similarity: Option<f64>,
    pub wall_time_ms: Option<f64>,
    pub tree: Tree,
}

fn accuracy(tree: &Tree, data: &Dataset, rows: &[usize]) -> f64 {
    1.0 - misclassified_rows(tree, data, rows) as f64 / rows.len() as f64
}

/// Runs every configured algorithm on `data`. Records are ordered by
/// algorithm (config order), run, then batch.
pub fn run_on_dataset(config: &ExperimentConfig, data: &Dataset) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let per_run: Vec<Vec<Vec<RunRecord>>> = (0..config.n_runs)
        .into_par_iter()
        .map(|run| {
            let plan = data::make_batch_plan(
                data,
                config.n_batches,
                config.batch_size,
                config.test_size,
                config.run_seed(run),
            )?;
            if plan.test.is_empty() {
                return Err(Error::Config("no rows left over for the test set".into()));
            }
            let out = config
                .algorithms
                .iter()
                .map(|alg| run_stream(config, data, &plan, alg, run))
                .collect();
            log::info!("{}: run {} of {} done", config.name, run + 1, config.n_runs);
            out
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    for a in 0..config.algorithms.len() {
        for run in &per_run {
            records.extend(run[a].iter().cloned());
        }
    }
    Ok(records)
}

fn run_stream(
    config: &ExperimentConfig,
    data: &Dataset,
    plan: &BatchPlan,
    alg: &Algorithm,
    run: usize,
) -> Result<Vec<RunRecord>> {
    let params = alg.params()?;
    let growth = &config.growth;
    let mut records = Vec::with_capacity(plan.n_batches());
    let mut prev: Option<Tree> = None;
    for t in 0..plan.n_batches() {
        let train = plan.cumulative(data, t);
        let start = Instant::now();
        let tree = match (&prev, alg) {
            (None, _) | (Some(_), Algorithm::Retrain { .. }) => retrain(&train, &params, growth)?,
            (Some(p), Algorithm::KeepRegrow { .. }) => update(p, &train, &params, growth)?,
            (Some(p), Algorithm::KeepOriginal { .. }) => keep_original(p),
        };
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        check_features(&tree, data)?;

        let (delta, similarity) = match &prev {
            None => (tree.node_count(), None),
            Some(p) => {
                let report = structural_diff(p, &tree);
                (report.delta, Some(report.similarity))
            }
        };
        records.push(RunRecord {
            dataset: config.name.clone(),
            algorithm: *alg,
            run,
            batch: t,
            accuracy: accuracy(&tree, data, &plan.test),
            test_size: plan.test.len(),
            nodes: tree.node_count(),
            delta,
            similarity,
            wall_time_ms: config.record_wall_time.then_some(elapsed),
            tree: tree.clone(),
        });
        prev = Some(tree);
    }
    Ok(records)
}

/// Loads the configured dataset (paths relative to `base`) and runs it,
/// as a sweep when one is configured.
pub fn run_experiment(config: &ExperimentConfig, base: &Path) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let data = config.dataset.load(base)?;
    log::info!(
        "{}: {} rows, {} features, {} classes",
        config.name,
        data.n_rows(),
        data.n_features(),
        data.n_classes()
    );
    match &config.sweep {
        Some(s) => sweep(config, &data, &s.alphas, &s.betas),
        None => run_on_dataset(config, &data),
    }
}

/// Alpha sweep (`betas` empty): retrain at each alpha, first batch only.
/// Beta sweep: keep-regrow at every (alpha, beta) plus the retrain and
/// keep-original baselines at each alpha, second batch only.
pub fn sweep(
    config: &ExperimentConfig,
    data: &Dataset,
    alphas: &[f64],
    betas: &[f64],
) -> Result<Vec<RunRecord>> {
    if alphas.is_empty() {
        return Err(Error::Config("sweep needs at least one alpha".into()));
    }
    let mut cfg = config.clone();
    cfg.sweep = None;
    let batch = if betas.is_empty() {
        cfg.n_batches = 1;
        cfg.algorithms = alphas
            .iter()
            .map(|&alpha| Algorithm::Retrain { alpha })
            .collect();
        0
    } else {
        cfg.n_batches = 2;
        cfg.algorithms = alphas
            .iter()
            .flat_map(|&alpha| {
                betas
                    .iter()
                    .map(move |&beta| Algorithm::KeepRegrow { alpha, beta })
                    .chain([
                        Algorithm::Retrain { alpha },
                        Algorithm::KeepOriginal { alpha },
                    ])
            })
            .collect();
        1
    };
    let records = run_on_dataset(&cfg, data)?;
    Ok(records.into_iter().filter(|r| r.batch == batch).collect())
}

pub const RESULT_COLUMNS: [&str; 12] = [
    "dataset",
    "algorithm",
    "alpha",
    "beta",
    "plot_beta",
    "run",
    "batch",
    "accuracy",
    "nodes",
    "delta",
    "similarity",
    "wall_time_ms",
];

/// Comma-separated result table, one row per record.
pub fn results_table(records: &[RunRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULT_COLUMNS).expect("in-memory write");
    for r in records {
        w.write_record([
            r.dataset.clone(),
            r.algorithm.kind().to_string(),
            r.algorithm.alpha().to_string(),
            r.algorithm
                .beta()
                .map(|b| b.to_string())
                .unwrap_or_default(),
            r.algorithm.plot_beta().to_string(),
            r.run.to_string(),
            r.batch.to_string(),
            r.accuracy.to_string(),
            r.nodes.to_string(),
            r.delta.to_string(),
            r.similarity.map(|s| s.to_string()).unwrap_or_default(),
            r.wall_time_ms
                .map(|s| format!("{s:.3}"))
                .unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Half-width of the normal-approximation 95% interval for an accuracy `p`
/// measured on `n` test points.
pub fn accuracy_ci_half_width(p: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    Z_95 * (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub batch: usize,
    pub runs: usize,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    /// Per-run 95% half-width at the mean accuracy and test size.
    pub accuracy_ci: f64,
    pub mean_nodes: f64,
    pub sd_nodes: f64,
    pub mean_delta: f64,
    pub mean_similarity: Option<f64>,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregates records per (dataset, algorithm, batch), preserving the
/// order in which groups first appear.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::Config("no records to summarize".into()));
    }
    let mut order: Vec<(String, String, usize)> = Vec::new();
    let mut groups: BTreeMap<(String, String, usize), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.dataset.clone(), r.algorithm.label(), r.batch);
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    Ok(order
        .into_iter()
        .map(|key| {
            let group = &groups[&key];
            let acc: Vec<f64> = group.iter().map(|r| r.accuracy).collect();
            let nodes: Vec<f64> = group.iter().map(|r| r.nodes as f64).collect();
            let deltas: Vec<f64> = group.iter().map(|r| r.delta as f64).collect();
            let sims: Vec<f64> = group.iter().filter_map(|r| r.similarity).collect();
            let (mean_accuracy, sd_accuracy) = mean_sd(&acc);
            let (mean_nodes, sd_nodes) = mean_sd(&nodes);
            let test_size = group[0].test_size;
            SummaryRow {
                dataset: key.0,
                algorithm: group[0].algorithm,
                batch: key.2,
                runs: group.len(),
                mean_accuracy,
                sd_accuracy,
                accuracy_ci: accuracy_ci_half_width(mean_accuracy, test_size),
                mean_nodes,
                sd_nodes,
                mean_delta: mean_sd(&deltas).0,
                mean_similarity: (!sims.is_empty()).then(|| mean_sd(&sims).0),
            }
        })
        .collect())
}

pub fn summary_table(rows: &[SummaryRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "dataset",
        "algorithm",
        "alpha",
        "beta",
        "plot_beta",
        "batch",
        "runs",
        "mean_accuracy",
        "sd_accuracy",
        "accuracy_ci95",
        "mean_nodes",
        "sd_nodes",
        "mean_delta",
        "mean_similarity",
    ])
    .expect("in-memory write");
    for s in rows {
        w.write_record([
            s.dataset.clone(),
            s.algorithm.kind().to_string(),
            s.algorithm.alpha().to_string(),
            s.algorithm
                .beta()
                .map(|b| b.to_string())
                .unwrap_or_default(),
            s.algorithm.plot_beta().to_string(),
            s.batch.to_string(),
            s.runs.to_string(),
            format!("{:.6}", s.mean_accuracy),
            format!("{:.6}", s.sd_accuracy),
            format!("{:.6}", s.accuracy_ci),
            format!("{:.3}", s.mean_nodes),
            format!("{:.3}", s.sd_nodes),
            format!("{:.3}", s.mean_delta),
            s.mean_similarity
                .map(|v| format!("{v:.6}"))
                .unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Paths of the files written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub results: PathBuf,
    pub summary: PathBuf,
    pub manifest: PathBuf,
    pub trees: Vec<PathBuf>,
}

pub fn tree_archive_path(dir: &Path, r: &RunRecord) -> PathBuf {
    dir.join("trees")
        .join(r.algorithm.label())
        .join(format!("run{:02}_batch{:02}.json", r.run, r.batch))
}

/// Writes `results.csv`, `summary.csv`, `manifest.json` and, if enabled,
/// every tree under `trees/<algorithm>/`.
pub fn write_outputs(
    config: &ExperimentConfig,
    records: &[RunRecord],
    dir: &Path,
) -> Result<OutputFiles> {
    let write = |path: &Path, contents: &str| -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(path, contents).map_err(|e| Error::io(path, e))
    };

    let results = dir.join("results.csv");
    write(&results, &results_table(records))?;
    let summary = dir.join("summary.csv");
    write(&summary, &summary_table(&summarize(records)?))?;

    let mut trees = Vec::new();
    if config.archive_trees {
        for r in records {
            let path = tree_archive_path(dir, r);
            write(&path, &r.tree.to_json())?;
            trees.push(path);
        }
    }

    let manifest_doc = serde_json::json!({
        "tool": concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")),
        "config": config,
        "records": records.len(),
        "run_seeds": (0..config.n_runs).map(|r| config.run_seed(r)).collect::<Vec<_>>(),
        "results": "results.csv",
        "summary": "summary.csv",
        "trees": trees
            .iter()
            .map(|p| p.strip_prefix(dir).unwrap_or(p).to_string_lossy().into_owned())
            .collect::<Vec<_>>(),
        "similarity_metric": "partial match (same feature, moved threshold = 0.5); approximation",
    });
    let manifest = dir.join("manifest.json");
    write(
        &manifest,
        &serde_json::to_string_pretty(&manifest_doc).expect("manifest serializes"),
    )?;
    Ok(OutputFiles {
        results,
        summary,
        manifest,
        trees,
    })
}

/// Outcome of the two-step iris scenario.
#[derive(Debug, Clone)]
pub struct IrisDemo {
    pub initial: Tree,
    pub updated: Tree,
    pub sample_rows: Vec<usize>,
    pub report: crate::diff::DiffReport,
    pub updated_misclassifications: usize,
    pub original_misclassifications: usize,
}

/// Trains on a random tenth of iris (15 rows), then updates on all 150.
pub fn iris_demo(seed: u64, params: &LossParams, growth: &GrowthConfig) -> Result<IrisDemo> {
    let iris = Dataset::iris();
    let plan = data::make_batch_plan(&iris, 1, iris.n_rows() / 10, 0, seed)?;
    let sample = plan.batch(&iris, 0);
    let initial = retrain(&sample, params, growth)?;
    let updated = update(&initial, &iris, params, growth)?;
    let all = iris.all_rows();
    Ok(IrisDemo {
        report: structural_diff(&initial, &updated),
        updated_misclassifications: misclassified_rows(&updated, &iris, &all),
        original_misclassifications: misclassified_rows(&initial, &iris, &all),
        sample_rows: plan.batches[0].clone(),
        initial,
        updated,
    })
}
