//! Command-line entry point: one subcommand per workflow (ingest, analyze,
//! recommend, evaluate, grid-search, rnn-probe), all deterministic — the
//! same flags and seeds always produce byte-identical output files.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    gap_histogram, pattern_ratios, unseen_sweep, write_gap_histogram, write_pattern_ratios,
    write_unseen_sweep, Representation,
};
use crate::corpus::{
    build_corpus, parse_transactions, read_snapshot, split_folds, write_snapshot, ColumnMap,
};
use crate::eval::{
    evaluate_fold, grid_search, mean_of_reports, write_report, GridSpec, Objective,
};
use crate::predictor::{recommend_corpus, write_predictions, PoolPolicy, PredictorConfig};
use crate::presets;
use crate::representation::DecayConfig;
use crate::rnnprobe::{
    generate_sequences, mse_over_set, train, write_params, write_trace, Activation, LossNorm,
    LossSteps, RnnParams, TrainSettings,
};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "tifuknn",
    version,
    about = "Next-basket recommendation from temporally decayed item frequencies and nearest neighbors"
)]
struct Cli {
    /// Worker threads for parallel sections (0 = one per core). Every thread
    /// count produces byte-identical results.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Turn a purchase-event CSV into a corpus snapshot
    Ingest(IngestArgs),
    /// Measure repeat/collaborative purchase patterns of a corpus
    Analyze(AnalyzeArgs),
    /// Predict the next basket for every user of a corpus
    Recommend(RecommendArgs),
    /// Score a method on held-out last baskets under a fold split
    Evaluate(EvaluateArgs),
    /// Pick the best hyperparameters on validation users
    GridSearch(GridSearchArgs),
    /// Train a small recurrent network on the running-sum task
    RnnProbe(RnnProbeArgs),
}

/// Hyperparameter resolution shared by the corpus subcommands. Precedence:
/// explicit flag > `--config` file entry > `--dataset-preset` default.
#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    /// Preset supplying hyperparameter defaults: valued-shopper | instacart |
    /// dunnhumby | tafeng
    #[arg(long, default_value = "instacart")]
    dataset_preset: String,
    /// `key = value` overrides file (keys: neighbors, groups, basket_decay,
    /// group_decay, blend, basket_size)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Neighbor count
    #[arg(long)]
    k: Option<usize>,
    /// Number of temporal groups
    #[arg(long)]
    m: Option<usize>,
    /// Within-group basket decay, in (0, 1]
    #[arg(long)]
    rb: Option<f64>,
    /// Across-group decay, in (0, 1]
    #[arg(long)]
    rg: Option<f64>,
    /// Blend between the user's own vector (1.0) and the neighbor mean (0.0)
    #[arg(long)]
    alpha: Option<f64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<DecayConfig> {
        let preset = presets::by_name(&self.dataset_preset).ok_or_else(|| {
            let names: Vec<&str> = presets::ALL.iter().map(|p| p.name).collect();
            Error::config(format!(
                "unknown dataset preset '{}' (expected one of {})",
                self.dataset_preset,
                names.join(", ")
            ))
        })?;
        let mut cfg = preset.config.clone();
        if let Some(path) = &self.config {
            apply_config_file(&mut cfg, &fs::read_to_string(path)?)?;
        }
        if let Some(k) = self.k {
            cfg.neighbors = k;
        }
        if let Some(m) = self.m {
            cfg.groups = m;
        }
        if let Some(rb) = self.rb {
            cfg.basket_decay = rb;
        }
        if let Some(rg) = self.rg {
            cfg.group_decay = rg;
        }
        if let Some(alpha) = self.alpha {
            cfg.blend = alpha;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("bad value '{}' for {key}", value.trim())))
}

fn apply_config_file(cfg: &mut DecayConfig, text: &str) -> Result<()> {
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("config line '{line}' is not key = value")))?;
        match key.trim() {
            "neighbors" => cfg.neighbors = parse_value("neighbors", value)?,
            "groups" => cfg.groups = parse_value("groups", value)?,
            "basket_decay" => cfg.basket_decay = parse_value("basket_decay", value)?,
            "group_decay" => cfg.group_decay = parse_value("group_decay", value)?,
            "blend" => cfg.blend = parse_value("blend", value)?,
            "basket_size" => cfg.basket_size = parse_value("basket_size", value)?,
            other => return Err(Error::config(format!("unknown config key '{other}'"))),
        }
    }
    Ok(())
}

fn parse_usize_list(flag: &str, text: &str) -> Result<Vec<usize>> {
    text.split(',').map(|v| parse_value(flag, v)).collect()
}

fn parse_f64_list(flag: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',').map(|v| parse_value(flag, v)).collect()
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Purchase-event CSV with a header row
    #[arg(long)]
    input: PathBuf,
    /// Corpus snapshot to write
    #[arg(long)]
    output: PathBuf,
    /// CSV column holding the user id
    #[arg(long, default_value = "user_id")]
    col_user: String,
    /// CSV column grouping rows into baskets
    #[arg(long, default_value = "basket_id")]
    col_basket: String,
    /// CSV column ordering baskets in time
    #[arg(long, default_value = "timestamp")]
    col_time: String,
    /// CSV column holding the item id
    #[arg(long, default_value = "item_id")]
    col_item: String,
    /// Drop users with fewer baskets than this
    #[arg(long, default_value_t = 3)]
    min_baskets: usize,
    /// Drop the rarest items while the kept ones still cover this share of
    /// purchase events
    #[arg(long, default_value_t = 0.95)]
    item_coverage: f64,
}

fn cmd_ingest(args: &IngestArgs) -> Result<()> {
    let columns = ColumnMap {
        user: args.col_user.clone(),
        basket: args.col_basket.clone(),
        time: args.col_time.clone(),
        item: args.col_item.clone(),
    };
    let parsed = parse_transactions(fs::File::open(&args.input)?, &columns)?;
    let corpus = build_corpus(&parsed.transactions, args.min_baskets, args.item_coverage)?;
    write_snapshot(&corpus, &mut fs::File::create(&args.output)?)?;
    println!("rows: {}", parsed.total_rows);
    println!("skipped-rows: {}", parsed.skipped_rows);
    println!("users: {}", corpus.n_users());
    println!("items: {}", corpus.dim());
    println!("baskets: {}", corpus.total_baskets());
    Ok(())
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Corpus snapshot
    #[arg(long)]
    input: PathBuf,
    /// Directory receiving pattern_ratios.txt, gap_histogram.tsv and
    /// unseen_sweep.tsv (created if missing)
    #[arg(long)]
    output: PathBuf,
    /// Neighbor count for the pattern ratios
    #[arg(long, default_value_t = 300)]
    neighbors: usize,
    /// Vector the neighbor search runs on: frequency | decayed
    #[arg(long, default_value = "frequency")]
    representation: String,
    /// Comma-separated neighbor counts for the decay sweep (default: the
    /// --neighbors value)
    #[arg(long)]
    sweep_neighbors: Option<String>,
    /// Comma-separated decay ratios for the sweep
    #[arg(long, default_value = "0.2,0.4,0.6,0.8,1.0")]
    sweep_ratios: String,
    #[command(flatten)]
    config: ConfigArgs,
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let corpus = read_snapshot(fs::File::open(&args.input)?)?;
    let representation = match args.representation.as_str() {
        "frequency" => Representation::Frequency,
        "decayed" => Representation::Decayed(args.config.resolve()?),
        other => {
            return Err(Error::config(format!(
                "unknown representation '{other}' (expected frequency | decayed)"
            )))
        }
    };
    let ratios = pattern_ratios(&corpus, args.neighbors, &representation)?;
    let sweep_neighbors = match &args.sweep_neighbors {
        Some(text) => parse_usize_list("sweep-neighbors", text)?,
        None => vec![args.neighbors],
    };
    let sweep_ratios = parse_f64_list("sweep-ratios", &args.sweep_ratios)?;
    let points = unseen_sweep(&corpus, &sweep_neighbors, &sweep_ratios)?;
    let buckets = gap_histogram(&corpus);

    fs::create_dir_all(&args.output)?;
    let mut ratios_text = Vec::new();
    write_pattern_ratios(&ratios, &mut ratios_text)?;
    fs::write(args.output.join("pattern_ratios.txt"), &ratios_text)?;
    write_gap_histogram(&buckets, &mut fs::File::create(args.output.join("gap_histogram.tsv"))?)?;
    write_unseen_sweep(&points, &mut fs::File::create(args.output.join("unseen_sweep.tsv"))?)?;

    print!("{}", String::from_utf8(ratios_text).expect("report text is UTF-8"));
    println!("gap-buckets: {}", buckets.len());
    println!("sweep-points: {}", points.len());
    Ok(())
}

#[derive(Args, Debug)]
struct RecommendArgs {
    /// Corpus snapshot
    #[arg(long)]
    input: PathBuf,
    /// Predictions file to write
    #[arg(long)]
    output: PathBuf,
    /// tifu-knn | top-freq | person-top-freq | user-knn
    #[arg(long, default_value = "tifu-knn")]
    method: String,
    /// Predicted basket size (default: the resolved config's basket size)
    #[arg(long)]
    s: Option<usize>,
    #[command(flatten)]
    config: ConfigArgs,
}

fn cmd_recommend(args: &RecommendArgs) -> Result<()> {
    let decay = args.config.resolve()?;
    let corpus = read_snapshot(fs::File::open(&args.input)?)?;
    let s = args.s.unwrap_or(decay.basket_size);
    let cfg = PredictorConfig {
        method: args.method.parse()?,
        decay,
        pool: PoolPolicy::AllUsers,
    };
    let predictions = recommend_corpus(&corpus, &cfg, s)?;
    write_predictions(&predictions, &mut fs::File::create(&args.output)?)?;
    println!("method: {}", cfg.method);
    println!("basket-size: {s}");
    println!("predictions: {}", predictions.len());
    Ok(())
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Corpus snapshot
    #[arg(long)]
    input: PathBuf,
    /// Report file; with --test-fold all, each fold's report gets a
    /// .fold<N> suffix appended
    #[arg(long)]
    output: Option<PathBuf>,
    /// tifu-knn | top-freq | person-top-freq | user-knn
    #[arg(long, default_value = "tifu-knn")]
    method: String,
    /// Basket sizes to score at (repeatable or comma-separated)
    #[arg(long = "s", value_delimiter = ',', default_values_t = [10usize, 20])]
    s: Vec<usize>,
    /// Number of user folds
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Fold index to hold out, or 'all' for every fold plus the mean
    #[arg(long, default_value = "0")]
    test_fold: String,
    /// Fold-assignment seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Neighbor candidates: training (no test-fold leakage) | all
    #[arg(long, default_value = "training")]
    pool: String,
    #[command(flatten)]
    config: ConfigArgs,
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let cfg = PredictorConfig {
        method: args.method.parse()?,
        decay: args.config.resolve()?,
        pool: match args.pool.as_str() {
            "training" => PoolPolicy::TrainingOnly,
            "all" => PoolPolicy::AllUsers,
            other => {
                return Err(Error::config(format!(
                    "unknown pool policy '{other}' (expected training | all)"
                )))
            }
        },
    };
    let corpus = read_snapshot(fs::File::open(&args.input)?)?;
    if args.test_fold == "all" {
        let mut reports = Vec::new();
        for fold in 0..args.folds {
            let split = split_folds(&corpus, args.folds, 0.0, fold, args.seed)?;
            let report = evaluate_fold(&corpus, &split, &cfg, &args.s)?;
            if let Some(out) = &args.output {
                let path = PathBuf::from(format!("{}.fold{fold}", out.display()));
                write_report(&report, &mut fs::File::create(path)?)?;
            }
            println!("fold: {fold}");
            print!("{}", report.aggregate_block());
            reports.push(report);
        }
        let (recall, ndcg) = mean_of_reports(&reports)?;
        println!("fold: mean");
        for (i, s) in args.s.iter().enumerate() {
            println!("recall@{s}: {:.6}", recall[i]);
            println!("ndcg@{s}: {:.6}", ndcg[i]);
        }
    } else {
        let fold: usize = args.test_fold.parse().map_err(|_| {
            Error::config(format!(
                "--test-fold must be a fold index or 'all', got '{}'",
                args.test_fold
            ))
        })?;
        let split = split_folds(&corpus, args.folds, 0.0, fold, args.seed)?;
        let report = evaluate_fold(&corpus, &split, &cfg, &args.s)?;
        if let Some(out) = &args.output {
            write_report(&report, &mut fs::File::create(out)?)?;
        }
        println!("users: {}", report.evaluated_users);
        println!("skipped: {}", report.skipped_users);
        print!("{}", report.aggregate_block());
    }
    Ok(())
}

#[derive(Args, Debug)]
struct GridSearchArgs {
    /// Corpus snapshot
    #[arg(long)]
    input: PathBuf,
    /// Report file for the winning config's validation metrics
    #[arg(long)]
    output: Option<PathBuf>,
    /// Grid file (one `key: comma,separated,values` line per dimension);
    /// default is the preset's full grid
    #[arg(long)]
    grid_file: Option<PathBuf>,
    /// metric@s to maximize, e.g. recall@10 or ndcg@20
    #[arg(long, default_value = "recall@10")]
    objective: String,
    /// Basket sizes reported for the winner
    #[arg(long = "s", value_delimiter = ',', default_values_t = [10usize, 20])]
    s: Vec<usize>,
    /// Number of user folds
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Fold held out as test (excluded from tuning entirely)
    #[arg(long, default_value_t = 0)]
    test_fold: usize,
    /// Share of training users scored as validation targets
    #[arg(long, default_value_t = 0.1)]
    validation_fraction: f64,
    /// Fold-assignment seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Preset whose grid is searched when no --grid-file is given
    #[arg(long, default_value = "instacart")]
    dataset_preset: String,
}

fn cmd_grid_search(args: &GridSearchArgs) -> Result<()> {
    let corpus = read_snapshot(fs::File::open(&args.input)?)?;
    let grid = match &args.grid_file {
        Some(path) => GridSpec::parse(&fs::read_to_string(path)?)?,
        None => presets::by_name(&args.dataset_preset)
            .ok_or_else(|| {
                Error::config(format!("unknown dataset preset '{}'", args.dataset_preset))
            })?
            .grid(),
    };
    let objective: Objective = args.objective.parse()?;
    let split = split_folds(&corpus, args.folds, args.validation_fraction, args.test_fold, args.seed)?;
    let outcome = grid_search(&corpus, &split, &grid, objective, &args.s)?;
    if let Some(out) = &args.output {
        write_report(&outcome.report, &mut fs::File::create(out)?)?;
    }
    println!("grid-points: {}", grid.len());
    println!("best-neighbors: {}", outcome.best.neighbors);
    println!("best-groups: {}", outcome.best.groups);
    println!("best-basket-decay: {}", outcome.best.basket_decay);
    println!("best-group-decay: {}", outcome.best.group_decay);
    println!("best-blend: {}", outcome.best.blend);
    println!("objective: {objective}");
    println!("objective-value: {:.6}", outcome.best_objective);
    print!("{}", outcome.report.aggregate_block());
    Ok(())
}

#[derive(Args, Debug)]
struct RnnProbeArgs {
    /// Number of generated sequences
    #[arg(long, default_value_t = 2500)]
    sequences: usize,
    /// Sequence length
    #[arg(long, default_value_t = 10)]
    length: usize,
    /// One-hot dimension
    #[arg(long, default_value_t = 100)]
    dim: usize,
    /// Hidden units
    #[arg(long, default_value_t = 64)]
    hidden: usize,
    /// Learning rate
    #[arg(long, default_value_t = 0.001)]
    lr: f64,
    /// Training epochs
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    /// Sequences per gradient step
    #[arg(long, default_value_t = 64)]
    batch_size: usize,
    /// Hidden activation: linear | tanh
    #[arg(long, default_value = "linear")]
    activation: String,
    /// Steps the loss covers: last-step | every-step
    #[arg(long, default_value = "every-step")]
    loss_steps: String,
    /// Loss normalization: per-dimension | per-sequence-length
    #[arg(long, default_value = "per-sequence-length")]
    loss_norm: String,
    /// Seed for sequence generation and weight init
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Verify the exact identity-recurrence solution (always linear; uses
    /// max(--hidden, --dim) hidden units) instead of training
    #[arg(long)]
    closed_form_check: bool,
    /// Loss-curve TSV to write
    #[arg(long)]
    output: Option<PathBuf>,
    /// Final-weights dump to write
    #[arg(long)]
    params_out: Option<PathBuf>,
}

fn cmd_rnn_probe(args: &RnnProbeArgs) -> Result<()> {
    let set = generate_sequences(args.sequences, args.length, args.dim, args.seed)?;
    println!("sequences: {}", set.sequences.len());
    println!("length: {}", set.len);
    println!("dim: {}", set.dim);

    if args.closed_form_check {
        let hidden = args.hidden.max(args.dim);
        let params = RnnParams::identity_addition(hidden, args.dim)?;
        let mse = mse_over_set(
            &params,
            &set,
            Activation::Linear,
            LossSteps::EveryStep,
            LossNorm::Dimension,
        )?;
        println!("closed-form-mse: {mse:e}");
        if mse < 1e-12 {
            println!("closed-form-check: pass");
            return Ok(());
        }
        return Err(Error::data(format!(
            "closed-form solution missed the running sums: mse {mse:e}"
        )));
    }

    let steps: LossSteps = args.loss_steps.parse()?;
    let activation: Activation = args.activation.parse()?;
    // The all-zero predictor's loss, for scale: reported under both
    // normalizations since published baselines differ on the convention.
    let zero = RnnParams::zeroed(1, args.dim);
    for (name, norm) in [
        ("per-dimension", LossNorm::Dimension),
        ("per-sequence-length", LossNorm::SequenceLength),
    ] {
        let baseline = mse_over_set(&zero, &set, Activation::Linear, steps, norm)?;
        println!("zero-baseline-{name}: {baseline}");
    }

    let settings = TrainSettings {
        learning_rate: args.lr,
        epochs: args.epochs,
        batch_size: args.batch_size,
        activation,
        steps,
        norm: args.loss_norm.parse()?,
        seed: args.seed,
    };
    let init = RnnParams::random(args.hidden, args.dim, args.seed);
    let trace = train(init, &set, &settings)?;
    println!("hidden: {}", args.hidden);
    println!("epochs: {}", settings.epochs);
    println!("first-epoch-loss: {}", trace.epoch_loss.first().expect("epochs >= 1"));
    println!("final-epoch-loss: {}", trace.epoch_loss.last().expect("epochs >= 1"));
    if let Some(out) = &args.output {
        write_trace(&trace, &mut fs::File::create(out)?)?;
    }
    if let Some(out) = &args.params_out {
        write_params(&trace.params, &mut fs::File::create(out)?)?;
    }
    Ok(())
}

fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Recommend(args) => cmd_recommend(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::GridSearch(args) => cmd_grid_search(args),
        Command::RnnProbe(args) => cmd_rnn_probe(args),
    }
}

/// Parses arguments, runs the selected subcommand, and returns the process
/// exit code: 0 on success, 2 for usage errors, and the error kind's code
/// (config 3, io 4, data 5) otherwise, with a one-line `error: kind: message`
/// diagnostic on stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    let result = if cli.threads > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(Error::config(format!(
                "cannot build a {}-thread worker pool: {e}",
                cli.threads
            ))),
        }
    } else {
        execute(&cli.command)
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_overrides_preset_and_flags_override_both() {
        let base = ConfigArgs {
            dataset_preset: "instacart".into(),
            config: None,
            k: None,
            m: None,
            rb: None,
            rg: None,
            alpha: None,
        };
        let cfg = base.resolve().unwrap();
        assert_eq!(cfg, presets::INSTACART.config);

        let mut cfg = presets::INSTACART.config.clone();
        apply_config_file(&mut cfg, "neighbors = 5\nblend = 0.25\n# comment\n").unwrap();
        assert_eq!(cfg.neighbors, 5);
        assert_eq!(cfg.blend, 0.25);
        assert_eq!(cfg.groups, presets::INSTACART.config.groups);

        let flagged = ConfigArgs { k: Some(7), alpha: Some(0.5), ..base.clone() };
        let cfg = flagged.resolve().unwrap();
        assert_eq!((cfg.neighbors, cfg.blend), (7, 0.5));

        assert!(apply_config_file(&mut cfg.clone(), "nope = 1\n").is_err());
        assert!(apply_config_file(&mut cfg.clone(), "neighbors 5\n").is_err());
        let unknown = ConfigArgs { dataset_preset: "nope".into(), ..base };
        assert!(unknown.resolve().is_err());
    }

    #[test]
    fn usage_errors_exit_2_and_help_exits_0() {
        assert_eq!(run(["tifuknn", "no-such-subcommand"]), 2);
        assert_eq!(run(["tifuknn", "evaluate", "--bogus-flag"]), 2);
        assert_eq!(run(["tifuknn", "--help"]), 0);
        assert_eq!(run(["tifuknn", "evaluate", "--help"]), 0);
    }

    #[test]
    fn missing_input_maps_to_the_io_exit_code() {
        assert_eq!(
            run(["tifuknn", "evaluate", "--input", "/nonexistent/corpus.snapshot"]),
            4
        );
    }

    #[test]
    fn bad_hyperparameters_map_to_the_config_exit_code() {
        // Config validation fails before the input file is touched.
        assert_eq!(
            run([
                "tifuknn",
                "evaluate",
                "--input",
                "/nonexistent/corpus.snapshot",
                "--rb",
                "1.5"
            ]),
            3
        );
    }

    #[test]
    fn list_flags_parse_comma_separated_values() {
        assert_eq!(parse_usize_list("x", "1,2,3").unwrap(), [1, 2, 3]);
        assert_eq!(parse_f64_list("x", "0.5,1.0").unwrap(), [0.5, 1.0]);
        assert!(parse_usize_list("x", "1,two").is_err());
    }
}
