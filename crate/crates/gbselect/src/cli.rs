//! Command-line front end wiring the library into end-to-end workflows:
//! problem generation, basis computation, feature export, training,
//! prediction, feature selection, evaluation, and report emission.
//!
//! Every command that takes a `--seed` is bit-reproducible, and `--jobs`
//! only bounds parallelism: the output is identical for every value.
//! Exit codes: 0 on success, 1 on a computation failure, 2 on a usage or
//! configuration error.

use std::fs::File;
use std::io::{BufWriter, Write as IoWrite};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::{
    attach_labels, attach_labels_with, export_features, generate_dataset, read_cell_counts,
    read_feature_csv, read_grid_csv, read_problems, read_selection_indices,
    tnoi_oracle, write_accuracy_curve, write_cv_report, write_feature_csv, write_problems,
    write_repeat_report, write_selection_report, DatasetError, FeatureSet, FeatureTable,
    GenerationProfile, ProblemRecord,
};
use crate::feature_selection::{accuracy_curve, filter_select, wrapper_select, SelectionOutcome};
use crate::features::{feature_descriptions, full_features, subset_features, tnoi_decision, Decision};
use crate::groebner::GroebnerError;
use crate::model_selection::{
    evaluate, fit_standardized, grid_search, repeated_runs, stratified_kfold, stratified_split,
    Grid,
};
use crate::polynomial::VariableOrder;
use crate::svm::{accuracy, mcc, ConfusionCounts, SvmModel, SvmParams};
use crate::{FOLDS_STREAM, SPLIT_STREAM};

/// A command failure, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Wrong invocation or configuration: exit code 2.
    #[error("{0}")]
    Usage(String),
    /// The computation itself failed: exit code 1.
    #[error("{0}")]
    Computation(String),
}

impl CliError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Computation(_) => 1,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn computation(e: impl std::fmt::Display) -> CliError {
    CliError::Computation(e.to_string())
}

/// Predicts whether replacing the equational part of a decomposition
/// problem by its reduced basis shrinks the output.
#[derive(Debug, Parser)]
#[command(name = "gbselect", version, disable_help_subcommand = true)]
pub struct Cli {
    /// Worker threads for grid and wrapper evaluation; the output is
    /// identical for every value.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate random problems into a line-oriented problem file.
    Gen(GenArgs),
    /// Compute each problem's reduced basis and store it in the file.
    Gb(GbArgs),
    /// Extract feature vectors from a problem file into CSV.
    Featurize(FeaturizeArgs),
    /// Grid-search, cross-validate, and fit a classifier.
    Train(TrainArgs),
    /// Emit a PRECONDITION or DO_NOT decision per input row.
    Predict(PredictArgs),
    /// Rank features with the filter or wrapper search.
    Select(SelectArgs),
    /// Score a trained model on labeled features.
    Eval(EvalArgs),
    /// Emit figure-ready report tables.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Number of problems; must split evenly across the degree classes.
    #[arg(long)]
    count: usize,
    /// Generation seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output problem file.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated variable names, least significant first.
    #[arg(long, default_value = "x,y,z")]
    vars: String,
}

#[derive(Debug, Args)]
struct GbArgs {
    /// Input problem file.
    problems: PathBuf,
    /// Output problem file with the basis filled in.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated variable names, least significant first.
    #[arg(long, default_value = "x,y,z")]
    vars: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SetArg {
    Before,
    After,
    All,
}

impl SetArg {
    fn feature_set(self) -> FeatureSet {
        match self {
            SetArg::Before => FeatureSet::Before,
            SetArg::After => FeatureSet::After,
            SetArg::All => FeatureSet::All,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleArg {
    /// Label by whether the total number of indeterminates strictly drops.
    Tnoi,
}

#[derive(Debug, Args)]
struct FeaturizeArgs {
    /// Input problem file.
    problems: PathBuf,
    /// Feature columns to export.
    #[arg(long, value_enum, default_value_t = SetArg::All)]
    set: SetArg,
    /// Output feature CSV.
    #[arg(long)]
    out: PathBuf,
    /// Cell-count sidecar (CSV: id,cells_plain,cells_gb) used to label the
    /// problems before export.
    #[arg(long, conflicts_with = "synthetic_labels")]
    cells: Option<PathBuf>,
    /// Label the problems with a built-in deterministic oracle.
    #[arg(long, value_enum, value_name = "ORACLE")]
    synthetic_labels: Option<OracleArg>,
    /// Comma-separated variable names, least significant first.
    #[arg(long, default_value = "x,y,z")]
    vars: String,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Labeled feature CSV.
    features: PathBuf,
    /// Fraction of rows in the training part of the stratified split.
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    /// Cross-validation fold count.
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Hyperparameter grid: "full", "reduced", or a CSV file of c,gamma
    /// rows.
    #[arg(long, default_value = "full")]
    grid: String,
    /// Split and fold seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output model file.
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV of every fold outcome of the grid search.
    #[arg(long)]
    cv_report: Option<PathBuf>,
    /// Optional feature CSV holding the held-out rows.
    #[arg(long)]
    test_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Feature CSV, or a problem file with --problems.
    input: PathBuf,
    /// Trained model file.
    #[arg(long)]
    model: PathBuf,
    /// Treat the input as a problem file and featurize it first.
    #[arg(long)]
    problems: bool,
    /// Output decisions CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated variable names, least significant first.
    #[arg(long, default_value = "x,y,z")]
    vars: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Filter,
    Wrapper,
}

#[derive(Debug, Args)]
struct SelectArgs {
    /// Labeled feature CSV.
    features: PathBuf,
    /// Search strategy.
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Cross-validation fold count (wrapper only).
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Hyperparameter grid for the wrapper: "full", "reduced", or a CSV
    /// file of c,gamma rows.
    #[arg(long, default_value = "reduced")]
    grid: String,
    /// Fold seed (wrapper only).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output selection CSV.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated variable names, least significant first.
    #[arg(long, default_value = "x,y,z")]
    vars: String,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Labeled feature CSV.
    features: PathBuf,
    /// Trained model file.
    #[arg(long)]
    model: PathBuf,
    /// Problem file aligned row for row with the feature CSV, for the
    /// baseline comparison.
    #[arg(long)]
    problems: Option<PathBuf>,
    /// Heuristic to score side by side with the model.
    #[arg(long, value_enum, requires = "problems")]
    baseline: Option<OracleArg>,
    /// Comma-separated variable names, least significant first.
    #[arg(long, default_value = "x,y,z")]
    vars: String,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(subcommand)]
    kind: ReportKind,
}

#[derive(Debug, Subcommand)]
enum ReportKind {
    /// Train/test accuracy for each prefix of a feature ordering.
    AccuracyCurve(AccuracyCurveArgs),
    /// Test accuracy across repeated split/search/fit runs.
    RepeatRuns(RepeatRunsArgs),
}

#[derive(Debug, Args)]
struct AccuracyCurveArgs {
    /// Labeled feature CSV.
    features: PathBuf,
    /// Selection CSV providing the feature ordering.
    #[arg(long)]
    selection: PathBuf,
    /// Cross-validation fold count.
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Fraction of rows in the training part.
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    /// Hyperparameter grid used to tune the classifier once, on the
    /// training part with all features.
    #[arg(long, default_value = "reduced")]
    grid: String,
    /// Split and fold seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV of prefix,cv_accuracy,test_accuracy rows.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RepeatRunsArgs {
    /// Labeled feature CSV.
    features: PathBuf,
    /// Number of repeated runs; run r uses seed + r.
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Cross-validation fold count.
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Fraction of rows in the training part.
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    /// Hyperparameter grid: "full", "reduced", or a CSV file of c,gamma
    /// rows.
    #[arg(long, default_value = "reduced")]
    grid: String,
    /// Base seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV of run,seed,c,gamma,test_accuracy,test_mcc rows.
    #[arg(long)]
    out: PathBuf,
}

/// Parses the process arguments, runs the command, and maps errors to exit
/// codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}

/// Runs a parsed command.
pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        // Only the first configuration of the process-global pool wins;
        // later calls are no-ops, which is fine for a per-process flag.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Gb(args) => cmd_gb(args),
        Command::Featurize(args) => cmd_featurize(args),
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Select(args) => cmd_select(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Report(args) => match args.kind {
            ReportKind::AccuracyCurve(args) => cmd_accuracy_curve(args),
            ReportKind::RepeatRuns(args) => cmd_repeat_runs(args),
        },
    }
}

fn parse_vars(text: &str) -> Result<VariableOrder, CliError> {
    VariableOrder::new(text.split(',').map(str::trim)).map_err(usage)
}

fn parse_grid(text: &str) -> Result<Grid, CliError> {
    match text {
        "full" => Ok(Grid::full()),
        "reduced" => Ok(Grid::reduced()),
        path => {
            let points = read_grid_csv(Path::new(path)).map_err(usage_at(Path::new(path)))?;
            if points.is_empty() {
                return Err(CliError::Usage(format!("grid file {path} has no cells")));
            }
            Ok(Grid::from_points(points))
        }
    }
}

fn require_folds(k: usize) -> Result<(), CliError> {
    if k < 2 {
        return Err(CliError::Usage("--folds must be at least 2".into()));
    }
    Ok(())
}

fn usage_at(path: &Path) -> impl Fn(DatasetError) -> CliError + '_ {
    move |error| usage(format!("{}: {error}", path.display()))
}

fn read_problem_file(path: &Path) -> Result<Vec<ProblemRecord>, CliError> {
    let records = read_problems(path).map_err(usage_at(path))?;
    if records.is_empty() {
        return Err(CliError::Usage(format!(
            "problem file {} is empty",
            path.display()
        )));
    }
    Ok(records)
}

fn read_labeled_csv(path: &Path) -> Result<(FeatureTable, Vec<Vec<f64>>, Vec<i8>), CliError> {
    let table = read_feature_csv(path).map_err(usage_at(path))?;
    if table.is_empty() {
        return Err(CliError::Usage(format!(
            "feature file {} is empty",
            path.display()
        )));
    }
    let (rows, labels) = table.labeled().map_err(usage_at(path))?;
    Ok((table, rows, labels))
}

/// Classifies an error from featurization or basis computation: resource
/// exhaustion is a computation failure, everything else is bad input.
fn classify_dataset_error(error: DatasetError) -> CliError {
    match &error {
        DatasetError::Groebner {
            source: GroebnerError::ResourceExhausted { .. },
            ..
        } => computation(error),
        DatasetError::Io(_) => computation(error),
        _ => usage(error),
    }
}

/// The 1-based global feature index a column name refers to, when it has
/// the exported `f<index>` shape.
fn column_feature_index(name: &str) -> Option<usize> {
    name.strip_prefix('f')?.parse().ok()
}

/// Maps feature-CSV columns onto the columns the model was trained on.
fn project_model_columns(
    table: &FeatureTable,
    model: &SvmModel,
) -> Result<Vec<Vec<f64>>, CliError> {
    if model.feature_indices().is_empty() {
        return Ok(table.rows.clone());
    }
    let expected: Vec<String> = model
        .feature_indices()
        .iter()
        .map(|i| format!("f{i}"))
        .collect();
    if table.names == expected {
        return Ok(table.rows.clone());
    }
    let positions: Option<Vec<usize>> = expected
        .iter()
        .map(|name| table.names.iter().position(|n| n == name))
        .collect();
    match positions {
        Some(positions) => Ok(table
            .rows
            .iter()
            .map(|row| positions.iter().map(|&p| row[p]).collect())
            .collect()),
        None => Err(CliError::Usage(format!(
            "model expects columns {} but the file provides {}",
            expected.join(","),
            table.names.join(",")
        ))),
    }
}

fn print_metrics(prefix: &str, counts: &ConfusionCounts) -> Result<(), CliError> {
    let accuracy = accuracy(counts).map_err(computation)?;
    println!(
        "{prefix} accuracy={} mcc={} tp={} fp={} tn={} fn={}",
        accuracy,
        mcc(counts),
        counts.true_positives,
        counts.false_positives,
        counts.true_negatives,
        counts.false_negatives
    );
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let order = parse_vars(&args.vars)?;
    let profile = GenerationProfile {
        order,
        ..GenerationProfile::default()
    };
    let records = generate_dataset(args.count, &profile, args.seed).map_err(usage)?;
    write_problems(&records, &args.out).map_err(computation)?;
    println!("wrote {} problems to {}", records.len(), args.out.display());
    Ok(())
}

fn cmd_gb(args: GbArgs) -> Result<(), CliError> {
    let order = parse_vars(&args.vars)?;
    let mut records = read_problem_file(&args.problems)?;
    let bases: Vec<Result<Vec<String>, DatasetError>> = records
        .par_iter()
        .map(|record| {
            let (_, basis) = record.problem_and_basis(&order)?;
            Ok(basis.iter().map(|p| p.to_string()).collect())
        })
        .collect();
    for (record, basis) in records.iter_mut().zip(bases) {
        record.groebner = Some(basis.map_err(classify_dataset_error)?);
    }
    write_problems(&records, &args.out).map_err(computation)?;
    println!(
        "wrote {} problems with bases to {}",
        records.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_featurize(args: FeaturizeArgs) -> Result<(), CliError> {
    let order = parse_vars(&args.vars)?;
    let mut records = read_problem_file(&args.problems)?;
    if let Some(cells) = &args.cells {
        let counts = read_cell_counts(cells).map_err(usage_at(cells))?;
        attach_labels(&mut records, &counts).map_err(usage)?;
    }
    if let Some(OracleArg::Tnoi) = args.synthetic_labels {
        attach_labels_with(&mut records, &order, tnoi_oracle)
            .map_err(classify_dataset_error)?;
    }
    export_features(&records, args.set.feature_set(), &order, &args.out, false)
        .map_err(classify_dataset_error)?;
    println!(
        "wrote {} rows with {} feature columns to {}",
        records.len(),
        args.set.feature_set().width(&order),
        args.out.display()
    );
    Ok(())
}

fn split_rows(rows: &[Vec<f64>], labels: &[i8], indices: &[usize]) -> (Vec<Vec<f64>>, Vec<i8>) {
    let x = indices.iter().map(|&i| rows[i].clone()).collect();
    let y = indices.iter().map(|&i| labels[i]).collect();
    (x, y)
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    require_folds(args.folds)?;
    let (table, rows, labels) = read_labeled_csv(&args.features)?;
    let grid = parse_grid(&args.grid)?;

    let mut split_rng = ChaCha8Rng::seed_from_u64(args.seed);
    split_rng.set_stream(SPLIT_STREAM);
    let (train_idx, test_idx) =
        stratified_split(&labels, args.train_fraction, &mut split_rng).map_err(usage)?;
    let (train_x, train_y) = split_rows(&rows, &labels, &train_idx);
    let (test_x, test_y) = split_rows(&rows, &labels, &test_idx);

    let mut fold_rng = ChaCha8Rng::seed_from_u64(args.seed);
    fold_rng.set_stream(FOLDS_STREAM);
    let folds = stratified_kfold(&train_y, args.folds, &mut fold_rng).map_err(computation)?;
    let outcome = grid_search(&train_x, &train_y, &grid, &folds).map_err(computation)?;
    let best = outcome.best();
    println!(
        "grid cells={} best c={} gamma={} cv_mcc={} cv_accuracy={}",
        grid.len(),
        best.c,
        best.gamma,
        best.mean_mcc(),
        best.mean_accuracy()
    );

    let params = SvmParams::new(best.c, best.gamma);
    let indices: Vec<usize> = table
        .names
        .iter()
        .enumerate()
        .map(|(i, name)| column_feature_index(name).unwrap_or(i + 1))
        .collect();
    let model = fit_standardized(&train_x, &train_y, &params)
        .map_err(computation)?
        .with_feature_indices(indices);
    model.save(&args.out).map_err(computation)?;

    let counts = evaluate(&model, &test_x, &test_y).map_err(computation)?;
    println!("train rows={} test rows={}", train_idx.len(), test_idx.len());
    print_metrics("test", &counts)?;
    println!("wrote model to {}", args.out.display());

    if let Some(path) = &args.cv_report {
        write_cv_report(&outcome, path).map_err(computation)?;
        println!("wrote cv report to {}", path.display());
    }
    if let Some(path) = &args.test_out {
        let test_table = FeatureTable {
            names: table.names.clone(),
            rows: test_x,
            labels: test_y.into_iter().map(Some).collect(),
        };
        write_feature_csv(&test_table, path).map_err(computation)?;
        println!("wrote held-out rows to {}", path.display());
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    let model = SvmModel::load(&args.model)
        .map_err(|e| usage(format!("{}: {e}", args.model.display())))?;
    let mut lines: Vec<String> = Vec::new();
    if args.problems {
        let order = parse_vars(&args.vars)?;
        let records = read_problem_file(&args.input)?;
        lines.push("id,decision".into());
        for record in &records {
            let (problem, basis) = record
                .problem_and_basis(&order)
                .map_err(classify_dataset_error)?;
            let (vector, _) = full_features(&problem, &basis).map_err(usage)?;
            let values = if model.feature_indices().is_empty() {
                vector.values().to_vec()
            } else {
                subset_features(&vector, model.feature_indices())
                    .map_err(usage)?
                    .values()
                    .to_vec()
            };
            let label = model.predict(&values).map_err(computation)?;
            lines.push(format!("{},{}", record.id, Decision::from_label(label)));
        }
    } else {
        let table = read_feature_csv(&args.input).map_err(usage_at(&args.input))?;
        if table.is_empty() {
            return Err(CliError::Usage(format!(
                "feature file {} is empty",
                args.input.display()
            )));
        }
        let rows = project_model_columns(&table, &model)?;
        lines.push("row,decision".into());
        for (index, row) in rows.iter().enumerate() {
            let label = model.predict(row).map_err(computation)?;
            lines.push(format!("{},{}", index + 1, Decision::from_label(label)));
        }
    }
    match &args.out {
        Some(path) => {
            let mut writer = BufWriter::new(File::create(path).map_err(computation)?);
            for line in &lines {
                writeln!(writer, "{line}").map_err(computation)?;
            }
            writer.flush().map_err(computation)?;
            println!("wrote {} decisions to {}", lines.len() - 1, path.display());
        }
        None => print_lines(&lines)?,
    }
    Ok(())
}

/// Writes lines to stdout, treating a closed pipe as a normal end of
/// output instead of a failure.
fn print_lines(lines: &[String]) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut writer = stdout.lock();
    for line in lines {
        if let Err(error) = writeln!(writer, "{line}") {
            if error.kind() == std::io::ErrorKind::BrokenPipe {
                return Ok(());
            }
            return Err(computation(error));
        }
    }
    Ok(())
}

fn cmd_select(args: SelectArgs) -> Result<(), CliError> {
    let order = parse_vars(&args.vars)?;
    let (table, rows, labels) = read_labeled_csv(&args.features)?;

    // Columns exported by this toolkit are named after global feature
    // indices; translate those into the standard descriptions.
    let all_descriptions = feature_descriptions(&order);
    let descriptions: Vec<String> = table
        .names
        .iter()
        .map(|name| {
            column_feature_index(name)
                .and_then(|i| all_descriptions.get(i - 1))
                .cloned()
                .unwrap_or_else(|| name.clone())
        })
        .collect();

    let mut selection: SelectionOutcome = match args.method {
        MethodArg::Filter => filter_select(&rows, &labels, &descriptions).map_err(computation)?,
        MethodArg::Wrapper => {
            require_folds(args.folds)?;
            let grid = parse_grid(&args.grid)?;
            let outcome = wrapper_select(
                &rows,
                &labels,
                &grid,
                args.folds,
                args.seed,
                &descriptions,
            )
            .map_err(computation)?;
            println!(
                "winning c={} gamma={} cv_accuracy={} of {} grid cells",
                outcome.c,
                outcome.gamma,
                outcome.cv_accuracy,
                grid.len()
            );
            outcome.selection
        }
    };

    // Report global feature indices where the column names carry them.
    for step in &mut selection.steps {
        if let Some(global) = column_feature_index(&table.names[step.feature_index - 1]) {
            step.feature_index = global;
        }
    }
    write_selection_report(&selection, &args.out).map_err(computation)?;
    println!(
        "selected {} of {} features, wrote {}",
        selection.steps.len(),
        table.width(),
        args.out.display()
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let model = SvmModel::load(&args.model)
        .map_err(|e| usage(format!("{}: {e}", args.model.display())))?;
    let (table, _, labels) = read_labeled_csv(&args.features)?;
    let rows = project_model_columns(&table, &model)?;
    let counts = evaluate(&model, &rows, &labels).map_err(computation)?;
    print_metrics("model", &counts)?;

    if let Some(OracleArg::Tnoi) = args.baseline {
        let order = parse_vars(&args.vars)?;
        let problems_path = args.problems.as_ref().expect("clap enforces --problems");
        let records = read_problem_file(problems_path)?;
        if records.len() != labels.len() {
            return Err(CliError::Usage(format!(
                "feature file has {} rows but problem file has {}",
                labels.len(),
                records.len()
            )));
        }
        let mut baseline_counts = ConfusionCounts::default();
        for (record, &label) in records.iter().zip(&labels) {
            let (problem, basis) = record
                .problem_and_basis(&order)
                .map_err(classify_dataset_error)?;
            let decision = tnoi_decision(&problem, &basis);
            baseline_counts.record(label, decision.label());
        }
        print_metrics("baseline tnoi", &baseline_counts)?;
    }
    Ok(())
}

/// Maps selection-report feature indices (global where available) back to
/// 1-based column positions of `table`.
fn ordering_positions(
    table: &FeatureTable,
    indices: &[usize],
) -> Result<Vec<usize>, CliError> {
    indices
        .iter()
        .map(|&index| {
            let name = format!("f{index}");
            if let Some(position) = table.names.iter().position(|n| *n == name) {
                return Ok(position + 1);
            }
            if index >= 1 && index <= table.width() {
                return Ok(index);
            }
            Err(CliError::Usage(format!(
                "selection index {index} matches no column of the feature file"
            )))
        })
        .collect()
}

fn cmd_accuracy_curve(args: AccuracyCurveArgs) -> Result<(), CliError> {
    require_folds(args.folds)?;
    let (table, rows, labels) = read_labeled_csv(&args.features)?;
    let indices = read_selection_indices(&args.selection).map_err(usage_at(&args.selection))?;
    if indices.is_empty() {
        return Err(CliError::Usage(format!(
            "selection file {} lists no features",
            args.selection.display()
        )));
    }
    let ordering = ordering_positions(&table, &indices)?;
    let grid = parse_grid(&args.grid)?;

    // Tune once on the training part with all features, reproducing the
    // same split the curve will use.
    let mut split_rng = ChaCha8Rng::seed_from_u64(args.seed);
    split_rng.set_stream(SPLIT_STREAM);
    let (train_idx, _) =
        stratified_split(&labels, args.train_fraction, &mut split_rng).map_err(usage)?;
    let (train_x, train_y) = split_rows(&rows, &labels, &train_idx);
    let mut fold_rng = ChaCha8Rng::seed_from_u64(args.seed);
    fold_rng.set_stream(FOLDS_STREAM);
    let folds = stratified_kfold(&train_y, args.folds, &mut fold_rng).map_err(computation)?;
    let outcome = grid_search(&train_x, &train_y, &grid, &folds).map_err(computation)?;
    let point = outcome.best_point();
    println!("tuned c={} gamma={}", point.c, point.gamma);

    let points = accuracy_curve(
        &rows,
        &labels,
        &ordering,
        point,
        args.folds,
        args.train_fraction,
        args.seed,
    )
    .map_err(computation)?;
    write_accuracy_curve(&points, &args.out).map_err(computation)?;
    println!("wrote {} curve points to {}", points.len(), args.out.display());
    Ok(())
}

fn cmd_repeat_runs(args: RepeatRunsArgs) -> Result<(), CliError> {
    require_folds(args.folds)?;
    if args.repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let (_, rows, labels) = read_labeled_csv(&args.features)?;
    let grid = parse_grid(&args.grid)?;
    let runs = repeated_runs(
        &rows,
        &labels,
        &grid,
        args.folds,
        args.train_fraction,
        args.repeats,
        args.seed,
    )
    .map_err(computation)?;
    write_repeat_report(&runs, &args.out).map_err(computation)?;
    println!("wrote {} runs to {}", runs.len(), args.out.display());
    Ok(())
}
