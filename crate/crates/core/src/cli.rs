//! `keep-regrow` command-line interface.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::data::{load_csv, Dataset, Delimiter, LabelColumn, LoadOptions};
use crate::diff::structural_diff;
use crate::error::Error;
use crate::eval::{self, ExperimentConfig};
use crate::grow::GrowthConfig;
use crate::keep_regrow::{retrain, update};
use crate::loss::{loss, misclassification_count, LossParams};
use crate::tree::Tree;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_RUNTIME: u8 = 4;

/// Default output directory for `eval` and `demo` when none is given.
pub const OUT_DIR_ENV: &str = "KEEP_REGROW_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "keep-regrow",
    version,
    about = "Update decision trees while keeping changes to audit small"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grow and prune a tree from scratch.
    Grow(GrowArgs),
    /// Update an existing tree on new data with Keep-Regrow.
    Update(UpdateArgs),
    /// Compare two trees.
    Diff(DiffArgs),
    /// Run an experiment described by a TOML config.
    Eval(EvalArgs),
    /// Render a tree as Graphviz DOT.
    Export(ExportArgs),
    /// Two-step iris walk-through: train on a tenth, update on all of it.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Delimited text file with one row per example.
    #[arg(long)]
    data: PathBuf,
    /// Label column: 0-based index, header name, or `last`.
    #[arg(long, default_value = "last")]
    label_col: LabelColumn,
    /// First line is a header.
    #[arg(long)]
    header: bool,
    #[arg(long, value_enum, default_value_t = Delimiter::Comma)]
    delimiter: Delimiter,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset, Error> {
        load_csv(
            &self.data,
            &LoadOptions {
                label: self.label_col.clone(),
                has_header: self.header,
                delimiter: self.delimiter,
            },
        )
    }
}

#[derive(Debug, Args)]
struct GrowthArgs {
    #[arg(long, default_value_t = 20)]
    max_depth: usize,
    #[arg(long, default_value_t = 2)]
    min_samples_split: usize,
}

impl GrowthArgs {
    fn config(&self) -> Result<GrowthConfig, Error> {
        let g = GrowthConfig {
            max_depth: Some(self.max_depth),
            min_samples_split: self.min_samples_split,
            ..GrowthConfig::default()
        };
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Args)]
struct GrowArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    alpha: f64,
    #[command(flatten)]
    growth: GrowthArgs,
    /// Where to write the tree document.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    dot_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct UpdateArgs {
    #[arg(long)]
    prev_tree: PathBuf,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    beta: f64,
    #[command(flatten)]
    growth: GrowthArgs,
    #[arg(long)]
    out: PathBuf,
    /// Per-node diff table; defaults to `<out>.diff.tsv`.
    #[arg(long)]
    diff_out: Option<PathBuf>,
    #[arg(long)]
    dot_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DiffArgs {
    /// Previous tree.
    #[arg(long)]
    a: PathBuf,
    /// New tree.
    #[arg(long)]
    b: PathBuf,
    /// Write the new tree as DOT with changed nodes highlighted.
    #[arg(long)]
    dot_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    n_runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[arg(long)]
    tree: PathBuf,
    /// Highlight changes against this earlier tree.
    #[arg(long)]
    against: Option<PathBuf>,
    /// Output path; DOT goes to stdout when omitted.
    #[arg(long)]
    dot_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

enum Failure {
    Input(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

type CliResult = Result<(), Failure>;

fn read_tree(path: &Path) -> Result<Tree, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Tree::from_json(&text).map_err(|e| match e {
        Error::TreeParse {
            path: node,
            message,
        } => Error::TreeParse {
            path: format!("{}: {node}", path.display()),
            message,
        },
        other => other,
    })
}

fn write_file(path: &Path, contents: &str) -> CliResult {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Failure::Runtime(Error::io(parent, e)))?;
    }
    fs::write(path, contents).map_err(|e| Failure::Runtime(Error::io(path, e)))
}

fn out_dir(flag: Option<PathBuf>, config: Option<PathBuf>, fallback: &str) -> PathBuf {
    flag.or(config)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(fallback))
}

fn cmd_grow(args: GrowArgs) -> CliResult {
    let params = LossParams::new(args.alpha, 0.0)?;
    let growth = args.growth.config()?;
    let data = args.data.load()?;
    let tree = retrain(&data, &params, &growth)?;
    write_file(&args.out, &tree.to_json())?;
    if let Some(dot) = &args.dot_out {
        write_file(dot, &tree.to_dot(None))?;
    }
    println!("nodes: {}", tree.node_count());
    println!(
        "training misclassifications: {}",
        misclassification_count(&tree, &data)?
    );
    Ok(())
}

fn cmd_update(args: UpdateArgs) -> CliResult {
    let params = LossParams::new(args.alpha, args.beta)?;
    let growth = args.growth.config()?;
    let prev = read_tree(&args.prev_tree)?;
    let data = args.data.load()?;
    let updated = update(&prev, &data, &params, &growth)?;
    let report = structural_diff(&prev, &updated);
    let breakdown = loss(Some(&prev), &updated, &data, &params)?;

    write_file(&args.out, &updated.to_json())?;
    let diff_out = args.diff_out.unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".diff.tsv");
        PathBuf::from(p)
    });
    write_file(&diff_out, &report.to_table())?;
    if let Some(dot) = &args.dot_out {
        write_file(dot, &updated.to_dot(Some(&report)))?;
    }
    println!("delta: {}", report.delta);
    println!("similarity: {}", report.similarity);
    println!("misclassifications: {}", breakdown.misclassifications);
    println!("nodes: {}", breakdown.nodes);
    println!("changed: {}", breakdown.changed);
    println!("loss: {}", breakdown.total);
    Ok(())
}

fn cmd_diff(args: DiffArgs) -> CliResult {
    let a = read_tree(&args.a)?;
    let b = read_tree(&args.b)?;
    let report = structural_diff(&a, &b);
    println!("delta: {}", report.delta);
    println!("similarity: {}", report.similarity);
    print!("{}", report.to_table());
    if let Some(dot) = &args.dot_out {
        write_file(dot, &b.to_dot(Some(&report)))?;
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> CliResult {
    let mut config = ExperimentConfig::from_file(&args.config)?;
    if let Some(n) = args.n_runs {
        config.n_runs = n;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    config.validate()?;
    let base = args
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let out = out_dir(
        args.out_dir,
        config.output_dir.clone().map(|p| base.join(p)),
        "keep-regrow-out",
    );

    let records = eval::run_experiment(&config, &base)?;
    let files = eval::write_outputs(&config, &records, &out).map_err(Failure::Runtime)?;
    print!("{}", eval::summary_table(&eval::summarize(&records)?));
    println!("results: {}", files.results.display());
    println!("summary: {}", files.summary.display());
    println!("manifest: {}", files.manifest.display());
    println!("archived trees: {}", files.trees.len());
    Ok(())
}

fn cmd_export(args: ExportArgs) -> CliResult {
    let tree = read_tree(&args.tree)?;
    let report = match &args.against {
        Some(p) => Some(structural_diff(&read_tree(p)?, &tree)),
        None => None,
    };
    let dot = tree.to_dot(report.as_ref());
    match &args.dot_out {
        Some(p) => write_file(p, &dot)?,
        None => print!("{dot}"),
    }
    Ok(())
}

fn cmd_demo(args: DemoArgs) -> CliResult {
    let params = LossParams::new(args.alpha, args.beta)?;
    let demo = eval::iris_demo(args.seed, &params, &GrowthConfig::default())?;
    println!("t=0 tree (15 sampled rows):\n{}", demo.initial);
    println!("t=1 tree (150 rows):\n{}", demo.updated);
    print!("{}", demo.report.to_table());
    println!("delta: {}", demo.report.delta);
    println!("similarity: {}", demo.report.similarity);
    println!(
        "misclassifications on all rows: {} -> {}",
        demo.original_misclassifications, demo.updated_misclassifications
    );
    if let Some(dir) = args
        .out_dir
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
    {
        write_file(&dir.join("iris_t0.json"), &demo.initial.to_json())?;
        write_file(&dir.join("iris_t1.json"), &demo.updated.to_json())?;
        write_file(&dir.join("iris_t0.dot"), &demo.initial.to_dot(None))?;
        write_file(
            &dir.join("iris_t1.dot"),
            &demo.updated.to_dot(Some(&demo.report)),
        )?;
    }
    Ok(())
}

/// Parses `args` and runs the chosen command, mapping failures to exit codes.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Grow(a) => cmd_grow(a),
        Command::Update(a) => cmd_update(a),
        Command::Diff(a) => cmd_diff(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Export(a) => cmd_export(a),
        Command::Demo(a) => cmd_demo(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
