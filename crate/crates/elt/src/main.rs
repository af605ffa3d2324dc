use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use elt::benchmark::{fit_method, run_benchmark};
use elt::config::RunConfig;
use elt::dataset::{load_csv, Dataset, LabelColumn};
use elt::error::{EltError, Result};
use elt::models::{FittedModel, ModelKind};
use elt::surface::{export_decision_surface, export_leaf_structure};

#[derive(Parser)]
#[command(name = "elt", about = "Extreme Learning Tree classifier and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Input CSV file
    #[arg(long)]
    data: PathBuf,
    /// Label column name or zero-based index (default: last column)
    #[arg(long)]
    label_col: Option<String>,
    /// Treat the first line as data, not a header
    #[arg(long)]
    no_header: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Repeated random-split accuracy benchmark
    Bench {
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated methods: elt,ridge,elm,cart
        #[arg(long, default_value = "elt,ridge,elm,cart")]
        methods: String,
        /// Number of repetitions
        #[arg(long, default_value_t = 100)]
        reps: usize,
        /// Master seed; run seeds are derived from it
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Plain random splits instead of stratified ones
        #[arg(long)]
        no_stratify: bool,
        /// key = value config file overriding defaults
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output report CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit one model and save it
    Train {
        #[command(flatten)]
        data: DataArgs,
        /// Method: elt, ridge, elm or cart
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output model file
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict classes for a CSV with a saved model
    Predict {
        /// Saved model file
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Output predictions CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Export a decision-surface (or leaf-structure) grid
    Surface {
        /// Saved model file
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Feature pair, e.g. 0,2
        #[arg(long)]
        features: String,
        /// Grid resolution per axis
        #[arg(long, default_value_t = 200)]
        res: usize,
        /// Export leaf indices instead of classes (ELT models only)
        #[arg(long)]
        leaves: bool,
        /// Output grid CSV
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_dataset(args: &DataArgs) -> Result<Dataset> {
    let header = !args.no_header;
    let label = match &args.label_col {
        Some(spec) => LabelColumn::parse(spec),
        None => LabelColumn::Index(last_column_index(&args.data)?),
    };
    load_csv(&args.data, &label, header)
}

/// Index of the last column of the first non-empty line.
fn last_column_index(path: &Path) -> Result<usize> {
    let text = std::fs::read_to_string(path)?;
    let line = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or(EltError::Parse { line: 1, message: "empty file".into() })?;
    Ok(line.split(',').count() - 1)
}

fn load_run_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(p) = path {
        cfg.load_overrides(p)?;
    }
    Ok(cfg)
}

fn parse_methods(spec: &str) -> Result<Vec<ModelKind>> {
    spec.split(',').map(|m| m.trim().parse()).collect()
}

fn parse_feature_pair(spec: &str) -> Result<(usize, usize)> {
    let err = || EltError::InvalidArgument(format!("--features expects 'i,j', got '{spec}'"));
    let (a, b) = spec.split_once(',').ok_or_else(err)?;
    Ok((a.trim().parse().map_err(|_| err())?, b.trim().parse().map_err(|_| err())?))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bench { data, methods, reps, seed, no_stratify, config, out } => {
            let dataset = load_dataset(&data)?;
            let methods = parse_methods(&methods)?;
            let cfg = load_run_config(&config)?;
            let report = run_benchmark(&dataset, &methods, &cfg, reps, seed, !no_stratify)?;
            std::fs::write(&out, report.to_csv())?;
            for m in &report.methods {
                println!("{}: {:.1} +- {:.1} %", m.method, m.mean, m.std);
            }
        }
        Command::Train { data, method, seed, config, out } => {
            let dataset = load_dataset(&data)?;
            let method: ModelKind = method.parse()?;
            let cfg = load_run_config(&config)?;
            let model = fit_method(method, &dataset, &cfg, seed)?;
            model.save(&out)?;
            println!("saved {} model to {}", method, out.display());
        }
        Command::Predict { model, data, out } => {
            let model = FittedModel::load(&model)?;
            let x = load_prediction_matrix(&data, &model)?;
            let preds = model.predict(&x)?;
            let mut csv = String::from("row,predicted_class\n");
            for (i, p) in preds.iter().enumerate() {
                csv.push_str(&format!("{i},{p}\n"));
            }
            std::fs::write(&out, csv)?;
            println!("wrote {} predictions to {}", preds.len(), out.display());
        }
        Command::Surface { model, data, features, res, leaves, out } => {
            let model = FittedModel::load(&model)?;
            let dataset = load_dataset(&data)?;
            let pair = parse_feature_pair(&features)?;
            let csv = if leaves {
                export_leaf_structure(&model, &dataset, pair, res)?
            } else {
                export_decision_surface(&model, &dataset, pair, res)?
            };
            std::fs::write(&out, csv)?;
            println!("wrote {}x{} grid to {}", res, res, out.display());
        }
    }
    Ok(())
}

/// Feature matrix for prediction: a labeled CSV when --label-col is
/// given (the label column is ignored), otherwise all columns. A file
/// with one extra column relative to the model also falls back to
/// dropping the last column.
fn load_prediction_matrix(args: &DataArgs, model: &FittedModel) -> Result<elt::linalg::DataMatrix> {
    let header = !args.no_header;
    if args.label_col.is_some() {
        return Ok(load_dataset(args)?.x);
    }
    let x = elt::dataset::load_features_csv(&args.data, header)?;
    if x.cols() == model.input_dim() + 1 {
        return Ok(load_dataset(args)?.x);
    }
    Ok(x)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
