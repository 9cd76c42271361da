//! Thin CLI over the experiment runner. All logic lives in the library;
//! this binary only parses flags, assembles an `ExperimentSpec`, and
//! prints or writes the report.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use solstream::bench::{
    run_experiment, AlgoSpec, DataSource, ExperimentSpec, OutputFormat, Task,
};
use solstream::data::{scan_meta, SyntheticSpec};
use solstream::eval::{rho_from_priors, ImbalanceSpec};
use solstream::learner::LambdaSchedule;
use solstream::{Error, Result};

#[derive(Parser)]
#[command(
    name = "solstream",
    about = "Streaming sparse linear classification: train, sweep, grid-search, synth, regret",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model and report test metrics
    Train {
        #[command(flatten)]
        algo: AlgoArgs,
        #[command(flatten)]
        data: DataArgs,
        /// Seed for the training-order permutation
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of passes over the (same) permuted training stream
        #[arg(long, default_value_t = 1)]
        passes: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sweep the L1 strength λ over a grid, several seeds per point
    Sweep {
        #[command(flatten)]
        algo: AlgoArgs,
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated λ grid, e.g. 0,0.001,0.01
        #[arg(long, value_delimiter = ',', required = true)]
        lambda_grid: Vec<f64>,
        /// Number of seeds (runs seeds 0..N)
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Cross-validated η (and secondary-parameter) search at λ = 0
    GridSearch {
        #[command(flatten)]
        algo: AlgoArgs,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        /// Seed for the fold-assignment permutation
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Generate a synthetic dataset (train.svm, test.svm, meta.json)
    Synth {
        /// JSON file describing the generator
        #[arg(long)]
        spec: PathBuf,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Cumulative-loss trace against the best fixed offline comparator
    Regret {
        #[command(flatten)]
        algo: AlgoArgs,
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated round counts to report, strictly increasing
        #[arg(long, value_delimiter = ',', required = true)]
        checkpoints: Vec<usize>,
        /// Seed for the training-order permutation
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct AlgoArgs {
    /// fsol | ssol | ssol-diag | cs-fsol | cs-ssol | cs-ssol-diag |
    /// stg | fobos | ada-fobos | ada-rda | cs-ogd | cpa | paum
    #[arg(long)]
    algo: String,
    /// Learning-rate scale η
    #[arg(long)]
    eta: Option<f64>,
    /// L1 regularization strength λ
    #[arg(long)]
    lambda: Option<f64>,
    /// Damping r for the second-order learners
    #[arg(long)]
    r: Option<f64>,
    /// Positive-class cost c₊ (cost-sensitive algorithms)
    #[arg(long)]
    cpos: Option<f64>,
    /// Negative-class cost c₋ (cost-sensitive algorithms)
    #[arg(long)]
    cneg: Option<f64>,
    /// Threshold schedule for the dual-averaging learners:
    /// const | eta-lambda | inv-t
    #[arg(long)]
    schedule: Option<String>,
    /// Stability constant δ for the adaptive baselines
    #[arg(long)]
    delta: Option<f64>,
    /// Truncation period K for the truncated-gradient baseline
    #[arg(long)]
    k_period: Option<usize>,
    /// Positive-class margin τ₊ for the uneven-margin perceptron
    #[arg(long)]
    tau_pos: Option<f64>,
    /// Negative-class margin τ₋ for the uneven-margin perceptron
    #[arg(long)]
    tau_neg: Option<f64>,
    /// Set c₊ = μ₊T₋/(μ₋T₊), c₋ = 1 from the training class counts
    #[arg(long, default_value_t = false)]
    auto_rho: bool,
    /// Positive-class weight μ₊ in the weighted-sum metric (μ₋ = 1 − μ₊)
    #[arg(long, default_value_t = 0.5)]
    mu_pos: f64,
}

#[derive(Args)]
struct DataArgs {
    /// Training set in LIBSVM format
    #[arg(long)]
    train: Option<PathBuf>,
    /// Test set in LIBSVM format (defaults to the training set)
    #[arg(long)]
    test: Option<PathBuf>,
    /// JSON synthetic-data spec, used instead of --train
    #[arg(long)]
    synth_spec: Option<PathBuf>,
}

#[derive(Args)]
struct OutArgs {
    /// Report file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Omit wall-clock columns so identical runs give identical bytes
    #[arg(long, default_value_t = false)]
    deterministic: bool,
}

fn parse_format(s: &str) -> Result<OutputFormat> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(Error::Config(format!(
            "unknown format {other:?}; expected csv or json"
        ))),
    }
}

fn parse_schedule(s: &str) -> Result<LambdaSchedule> {
    match s {
        "const" => Ok(LambdaSchedule::Constant),
        "eta-lambda" => Ok(LambdaSchedule::ConstEtaLambda),
        "inv-t" => Ok(LambdaSchedule::InvT),
        other => Err(Error::Config(format!(
            "unknown schedule {other:?}; expected const, eta-lambda, or inv-t"
        ))),
    }
}

fn read_synth_spec(path: &PathBuf) -> Result<SyntheticSpec> {
    let body = std::fs::read_to_string(path)?;
    serde_json::from_str(&body).map_err(|e| {
        Error::Data(format!("invalid synthetic spec {}: {e}", path.display()))
    })
}

fn resolve_data(data: &DataArgs) -> Result<DataSource> {
    match (&data.train, &data.synth_spec) {
        (Some(_), Some(_)) => Err(Error::Config(
            "--train and --synth-spec are mutually exclusive".into(),
        )),
        (Some(train), None) => Ok(DataSource::Files {
            train: train.clone(),
            test: data.test.clone(),
        }),
        (None, Some(spec)) => {
            if data.test.is_some() {
                return Err(Error::Config(
                    "--test cannot be combined with --synth-spec".into(),
                ));
            }
            Ok(DataSource::Synthetic(read_synth_spec(spec)?))
        }
        (None, None) => Err(Error::Config(
            "either --train or --synth-spec is required".into(),
        )),
    }
}

/// Builds the algorithm spec from flags, rejecting flags that do not apply
/// to the chosen algorithm.
fn resolve_algo(args: &AlgoArgs, source: &DataSource) -> Result<(AlgoSpec, ImbalanceSpec)> {
    let mut algo = AlgoSpec::from_cli_name(&args.algo)?;
    if let Some(eta) = args.eta {
        algo.set_eta(eta);
    }
    if let Some(lambda) = args.lambda {
        algo.set_lambda(lambda);
    }

    match &mut algo {
        AlgoSpec::Sol(cfg) => {
            if let Some(r) = args.r {
                if !cfg.kind.is_second_order() {
                    return Err(Error::Config(format!(
                        "--r does not apply to {}",
                        cfg.kind.name()
                    )));
                }
                cfg.r = r;
            }
            if let Some(s) = &args.schedule {
                cfg.schedule = parse_schedule(s)?;
            }
            for (flag, given) in [
                ("--delta", args.delta.is_some()),
                ("--k-period", args.k_period.is_some()),
                ("--tau-pos", args.tau_pos.is_some()),
                ("--tau-neg", args.tau_neg.is_some()),
            ] {
                if given {
                    return Err(Error::Config(format!(
                        "{flag} does not apply to {}",
                        cfg.kind.name()
                    )));
                }
            }
        }
        AlgoSpec::Base(cfg) => {
            if args.r.is_some() {
                return Err(Error::Config(format!(
                    "--r does not apply to {}",
                    cfg.kind.name()
                )));
            }
            if args.schedule.is_some() {
                return Err(Error::Config(format!(
                    "--schedule does not apply to {}",
                    cfg.kind.name()
                )));
            }
            if let Some(d) = args.delta {
                cfg.delta = d;
            }
            if let Some(k) = args.k_period {
                cfg.k_period = k;
            }
            if let Some(t) = args.tau_pos {
                cfg.tau_pos = t;
            }
            if let Some(t) = args.tau_neg {
                cfg.tau_neg = t;
            }
        }
    }

    if !(args.mu_pos > 0.0 && args.mu_pos < 1.0) {
        return Err(Error::Config(format!(
            "--mu-pos must be in (0, 1), got {}",
            args.mu_pos
        )));
    }
    let imbalance = ImbalanceSpec {
        mu_pos: args.mu_pos,
        mu_neg: 1.0 - args.mu_pos,
        t_pos: None,
        t_neg: None,
    };

    if args.auto_rho {
        if !algo.is_cost_sensitive() {
            return Err(Error::Config(format!(
                "--auto-rho needs a cost-sensitive algorithm, not {}",
                algo.name()
            )));
        }
        if args.cpos.is_some() || args.cneg.is_some() {
            return Err(Error::Config(
                "--auto-rho and explicit --cpos/--cneg are mutually exclusive".into(),
            ));
        }
        let DataSource::Files { train, .. } = source else {
            return Err(Error::Config(
                "--auto-rho needs --train (class counts of a concrete file)".into(),
            ));
        };
        let meta = scan_meta(train)?;
        let with_totals = ImbalanceSpec {
            t_pos: Some(meta.positives as u64),
            t_neg: Some(meta.negatives as u64),
            ..imbalance
        };
        let rho = rho_from_priors(&with_totals)?;
        algo.set_costs(rho, 1.0);
    } else {
        let (mut c_pos, mut c_neg) = algo.costs();
        if let Some(c) = args.cpos {
            c_pos = c;
        }
        if let Some(c) = args.cneg {
            c_neg = c;
        }
        algo.set_costs(c_pos, c_neg);
    }

    Ok((algo, imbalance))
}

fn apply_out(spec: &mut ExperimentSpec, out: &OutArgs) -> Result<()> {
    spec.out = out.out.clone();
    spec.format = parse_format(&out.format)?;
    spec.deterministic = out.deterministic;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            algo,
            data,
            seed,
            passes,
            out,
        } => {
            let source = resolve_data(&data)?;
            let (algo, imbalance) = resolve_algo(&algo, &source)?;
            let mut spec = ExperimentSpec::new(Task::TrainEval, algo, source);
            spec.seeds = vec![seed];
            spec.passes = passes;
            spec.imbalance = imbalance;
            apply_out(&mut spec, &out)?;
            emit(run_experiment(&spec)?, &spec)
        }
        Command::Sweep {
            algo,
            data,
            lambda_grid,
            seeds,
            out,
        } => {
            let source = resolve_data(&data)?;
            let (algo, imbalance) = resolve_algo(&algo, &source)?;
            let mut spec = ExperimentSpec::new(Task::SparsitySweep, algo, source);
            spec.lambda_grid = lambda_grid;
            spec.seeds = (0..seeds).collect();
            spec.imbalance = imbalance;
            apply_out(&mut spec, &out)?;
            emit(run_experiment(&spec)?, &spec)
        }
        Command::GridSearch {
            algo,
            data,
            folds,
            seed,
            out,
        } => {
            let source = resolve_data(&data)?;
            let (algo, imbalance) = resolve_algo(&algo, &source)?;
            let mut spec = ExperimentSpec::new(Task::GridSearch, algo, source);
            spec.folds = folds;
            spec.seeds = vec![seed];
            spec.imbalance = imbalance;
            apply_out(&mut spec, &out)?;
            let report = run_experiment(&spec)?;
            // machine-readable winner on stdout, always as the last line
            let best = report.best.clone().expect("grid search yields a winner");
            emit(report, &spec)?;
            let line = serde_json::to_string(&best)
                .map_err(|e| Error::Data(format!("winner serialization failed: {e}")))?;
            println!("{line}");
            Ok(())
        }
        Command::Synth { spec: path, out } => {
            let synth = read_synth_spec(&path)?;
            let algo = AlgoSpec::from_cli_name("fsol")?; // unused by this task
            let mut spec =
                ExperimentSpec::new(Task::SynthGen, algo, DataSource::Synthetic(synth));
            spec.out = Some(out);
            let report = run_experiment(&spec)?;
            for p in report.written {
                eprintln!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Regret {
            algo,
            data,
            checkpoints,
            seed,
            out,
        } => {
            let source = resolve_data(&data)?;
            let (algo, imbalance) = resolve_algo(&algo, &source)?;
            let mut spec = ExperimentSpec::new(Task::Regret, algo, source);
            spec.checkpoints = checkpoints;
            spec.seeds = vec![seed];
            spec.imbalance = imbalance;
            apply_out(&mut spec, &out)?;
            emit(run_experiment(&spec)?, &spec)
        }
    }
}

fn emit(report: solstream::bench::Report, spec: &ExperimentSpec) -> Result<()> {
    if spec.out.is_none() {
        if let Some(body) = &report.rendered {
            print!("{body}");
        }
    } else {
        for p in &report.written {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
