//! Command implementations behind the `rwa` binary. Each command is a
//! plain function over its parsed arguments, so tests and the thin binary
//! share the same path.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adapt::{init_labels, run_rwa_evaluated, EmptyClassFallback, Labeling, RwaConfig};
use crate::chain::{
    containment_bound, enumerate_1d_labelings_oriented, estimate_transitions, generalization_bound,
    stationary, verify_pii_bound, SubsampleScheme, TransitionEstimatorConfig, TransitionMatrix,
};
use crate::data::{
    fit_recipe, generate_line_toy, generate_rotated_toy, load_dense_csv, load_svmlight,
    save_svmlight, Dataset, RecipeKind, DEFAULT_NOISE_SCALES, DEFAULT_N_PER_CLASS,
    DEFAULT_ROTATION_DEGREES,
};
use crate::linsvm::{
    cross_validate_c, load_model_file, save_model_file, train_ova_models, train_ova_with,
    BinaryModelRecord, LinearHypothesis, ModelFile, TrainOptions, DEFAULT_CV_FOLDS, DEFAULT_C_GRID,
};
use crate::report::{
    read_json, write_json, AdaptReport, ChainReport, MatrixFile, RunManifest, REPORT_SCHEMA_VERSION,
};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "rwa",
    version,
    about = "Random-walk adaptation: label a target dataset from a source-trained linear hypothesis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Train a source hypothesis and save it as a model JSON file.
    TrainSource(TrainSourceArgs),
    /// Run the adaptation walk on an unlabeled target.
    Adapt(AdaptArgs),
    /// Write one of the built-in toy dataset pairs to a directory.
    Toy(ToyArgs),
    /// Markov-chain analysis of a small 1-D binary target.
    Chain(ChainArgs),
    /// Evaluate one of the closed-form bounds.
    Bound(BoundArgs),
    /// Sensitivity sweep over iteration counts, quotas, and seeds.
    Sweep(SweepArgs),
}

/// Parse and run; returns the process exit code (0 success, 2 input error,
/// 3 numerical or contract failure).
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::TrainSource(args) => cmd_train_source(&args).map(|_| ()),
        Command::Adapt(args) => cmd_adapt(&args).map(|_| ()),
        Command::Toy(args) => cmd_toy(&args).map(|_| ()),
        Command::Chain(args) => cmd_chain(&args).map(|_| ()),
        Command::Bound(args) => cmd_bound(&args).map(|_| ()),
        Command::Sweep(args) => cmd_sweep(&args).map(|_| ()),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

#[derive(Args, Debug)]
pub struct InputFormat {
    /// Read the data file as dense numeric CSV instead of svmlight.
    #[arg(long)]
    pub csv: bool,
    /// CSV column holding the label (CSV inputs only).
    #[arg(long)]
    pub label_column: Option<usize>,
    /// CSV file has a header row to skip.
    #[arg(long)]
    pub header: bool,
}

impl InputFormat {
    fn load(&self, path: &Path) -> Result<Dataset> {
        if self.csv {
            load_dense_csv(path, self.label_column, self.header)
        } else {
            load_svmlight(path)
        }
    }
}

#[derive(Args, Debug)]
pub struct TrainSourceArgs {
    /// Labeled source dataset.
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub format: InputFormat,
    /// Fix C instead of selecting it by cross-validation.
    #[arg(long)]
    pub c: Option<f64>,
    /// Cross-validation folds for C selection.
    #[arg(long, default_value_t = DEFAULT_CV_FOLDS)]
    pub folds: usize,
    /// Preprocessing recipe fit on the source data (comma-separated chain
    /// of standardize, scale-by-std, instance-mean-standardize, rectify).
    #[arg(long)]
    pub preprocess: Option<String>,
    #[arg(long, env = "RWA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output model JSON path.
    #[arg(long, short)]
    pub out: PathBuf,
}

pub fn cmd_train_source(args: &TrainSourceArgs) -> Result<ModelFile> {
    let mut manifest = RunManifest::start("train-source", format!("{args:?}"), Some(args.seed));
    manifest.add_input(&args.data)?;

    let mut data = args.format.load(&args.data)?;
    if data.labels().is_none() || data.n_classes() < 2 {
        return Err(Error::InvalidInput(
            "source data must be labeled with at least 2 classes".into(),
        ));
    }
    if let Some(spec) = &args.preprocess {
        let recipe = fit_recipe(&parse_recipe(spec)?, &data)?;
        data = recipe.apply(&data)?;
    }

    let c = match args.c {
        Some(c) => c,
        None => choose_c(&data, args.folds, args.seed, "source data")?,
    };
    let (hypothesis, models) = train_ova_models(&data, TrainOptions::new(c).with_seed(args.seed))?;
    let predicted = hypothesis.predict(&data)?;
    let train_acc = predicted.agreement_with_ids(data.labels().expect("labeled"));

    let binaries = if data.n_classes() == 2 {
        vec![BinaryModelRecord::from_model(1, &models[0])]
    } else {
        models
            .iter()
            .enumerate()
            .map(|(class, m)| BinaryModelRecord::from_model(class, m))
            .collect()
    };
    let file = ModelFile::new(
        hypothesis,
        data.class_labels().map(<[f64]>::to_vec),
        c,
        binaries,
    );
    save_model_file(&file, &args.out)?;
    println!(
        "trained {}-class hypothesis (C = {c}), training accuracy {:.4}, saved to {}",
        file.n_classes,
        train_acc,
        args.out.display()
    );
    Ok(file)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FallbackArg {
    Abort,
    TopScores,
}

impl From<FallbackArg> for EmptyClassFallback {
    fn from(value: FallbackArg) -> Self {
        match value {
            FallbackArg::Abort => EmptyClassFallback::Abort,
            FallbackArg::TopScores => EmptyClassFallback::TopScores,
        }
    }
}

#[derive(Args, Debug)]
#[command(group(
    clap::ArgGroup::new("source").required(true).args(["source_model", "source_data"])
))]
pub struct AdaptArgs {
    /// Serialized source model (adaptation never reads source data).
    #[arg(long)]
    pub source_model: Option<PathBuf>,
    /// Labeled source dataset, trained on the fly and then discarded.
    #[arg(long)]
    pub source_data: Option<PathBuf>,
    /// Unlabeled target dataset.
    #[arg(long)]
    pub target: PathBuf,
    #[command(flatten)]
    pub format: InputFormat,
    /// Ground-truth target labels (one raw label per line), used only to
    /// report accuracy.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Walk length K.
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
    /// Per-class bootstrap quota; defaults to |T| / n_classes.
    #[arg(long)]
    pub quota: Option<usize>,
    /// Fix the target-side C instead of cross-validating on (T, Y⁰).
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_CV_FOLDS)]
    pub folds: usize,
    /// Count the initial labeling Y⁰ in the majority vote.
    #[arg(long)]
    pub include_y0: bool,
    /// Policy when a provisional labeling empties a class.
    #[arg(long, value_enum, default_value_t = FallbackArg::Abort)]
    pub fallback: FallbackArg,
    /// Preprocessing recipe fit on (and applied to) the target.
    #[arg(long)]
    pub preprocess: Option<String>,
    #[arg(long, env = "RWA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output report JSON path.
    #[arg(long, short)]
    pub out: PathBuf,
}

pub fn cmd_adapt(args: &AdaptArgs) -> Result<AdaptReport> {
    let mut manifest = RunManifest::start("adapt", format!("{args:?}"), Some(args.seed));

    let (hypothesis, class_labels) = match (&args.source_model, &args.source_data) {
        (Some(path), None) => {
            manifest.add_input(path)?;
            let file = load_model_file(path)?;
            (file.hypothesis, file.class_labels)
        }
        (None, Some(path)) => {
            manifest.add_input(path)?;
            let source = args.format.load(path)?;
            if source.labels().is_none() || source.n_classes() < 2 {
                return Err(Error::InvalidInput(
                    "source data must be labeled with at least 2 classes".into(),
                ));
            }
            let c = choose_c(&source, args.folds, args.seed, "source data")?;
            let h = train_ova_with(&source, TrainOptions::new(c).with_seed(args.seed))?;
            (h, source.class_labels().map(<[f64]>::to_vec))
        }
        _ => unreachable!("clap enforces exactly one source"),
    };

    manifest.add_input(&args.target)?;
    let mut target = args.format.load(&args.target)?.strip_labels();
    if let Some(spec) = &args.preprocess {
        let recipe = fit_recipe(&parse_recipe(spec)?, &target)?;
        target = recipe.apply(&target)?;
    }
    let target = align_features(target, hypothesis.n_features())?;

    let truth = match &args.truth {
        Some(path) => {
            manifest.add_input(path)?;
            Some(load_truth(path)?)
        }
        None => None,
    };

    let c_target = match args.c {
        Some(c) => c,
        None => {
            let y0 = init_labels(&hypothesis, &target)?;
            let pseudo = target.with_label_ids(y0.assignments().to_vec(), y0.n_classes())?;
            choose_c(&pseudo, args.folds, args.seed, "target pseudo-labels")?
        }
    };

    let cfg = RwaConfig {
        iterations: args.iterations,
        per_class_quota: args.quota,
        c_target,
        seed: args.seed,
        include_y0_in_vote: args.include_y0,
        empty_class_fallback: args.fallback.into(),
    };
    let (final_labeling, trace) = run_rwa_evaluated(&hypothesis, &target, &cfg, truth.as_deref())?;
    manifest.finish();

    let resolved_quota = cfg
        .per_class_quota
        .unwrap_or((target.n_examples() / hypothesis.n_classes()).max(1));
    let final_accuracy = truth
        .as_deref()
        .map(|t| final_labeling.agreement_with_ids(t));
    let final_raw_labels = class_labels.as_ref().map(|raw| {
        final_labeling
            .assignments()
            .iter()
            .map(|&c| raw[c])
            .collect()
    });
    let report = AdaptReport::from_trace(
        manifest,
        cfg,
        resolved_quota,
        final_labeling.assignments().to_vec(),
        final_raw_labels,
        final_accuracy,
        &trace,
    );
    write_json(&report, &args.out)?;

    match (report.initial_accuracy, report.final_accuracy) {
        (Some(initial), Some(fin)) => println!(
            "adaptation finished: accuracy {:.4} -> {:.4} over {} iterations, report at {}",
            initial,
            fin,
            args.iterations,
            args.out.display()
        ),
        _ => println!(
            "adaptation finished: {} iterations, report at {}",
            args.iterations,
            args.out.display()
        ),
    }
    Ok(report)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ToyKind {
    Rotated,
    Line,
}

#[derive(Args, Debug)]
pub struct ToyArgs {
    /// Which toy pair to write.
    #[arg(value_enum)]
    pub which: ToyKind,
    #[arg(long, env = "RWA_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_N_PER_CLASS)]
    pub n_per_class: usize,
    #[arg(long, default_value_t = DEFAULT_ROTATION_DEGREES)]
    pub rotation: f64,
    #[arg(long, default_value_t = DEFAULT_NOISE_SCALES[0])]
    pub noise_x: f64,
    #[arg(long, default_value_t = DEFAULT_NOISE_SCALES[1])]
    pub noise_y: f64,
    /// Output directory (created if missing).
    #[arg(long, short)]
    pub out_dir: PathBuf,
}

pub fn cmd_toy(args: &ToyArgs) -> Result<(PathBuf, PathBuf, PathBuf)> {
    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let (source, target, truth_raw): (Dataset, Dataset, Vec<f64>) = match args.which {
        ToyKind::Rotated => {
            let (s, t) = generate_rotated_toy(
                args.n_per_class,
                args.rotation,
                [args.noise_x, args.noise_y],
                args.seed,
            )?;
            let truth = t.labels().expect("generator labels the target");
            let raw = truth.iter().map(|&c| c as f64).collect();
            (s, t.strip_labels(), raw)
        }
        ToyKind::Line => {
            let (s, t) = generate_line_toy();
            // The stable labeling the walk is expected to settle on: sign
            // of the coordinate, in the source's raw label values.
            let raw = (0..t.n_examples())
                .map(|i| if t.row(i)[0].1 > 0.0 { 1.0 } else { -1.0 })
                .collect();
            (s, t, raw)
        }
    };

    let source_path = args.out_dir.join("source.svml");
    let target_path = args.out_dir.join("target.svml");
    let truth_path = args.out_dir.join("target.labels");
    save_svmlight(&source, &source_path)?;
    save_svmlight(&target, &target_path)?;
    let truth_text: String = truth_raw.iter().map(|l| format!("{l}\n")).collect();
    fs::write(&truth_path, truth_text).map_err(|e| Error::io(&truth_path, e))?;

    println!(
        "wrote {} ({} examples), {} ({} examples), {}",
        source_path.display(),
        source.n_examples(),
        target_path.display(),
        target.n_examples(),
        truth_path.display()
    );
    Ok((source_path, target_path, truth_path))
}

#[derive(Args, Debug)]
#[command(group(
    clap::ArgGroup::new("chain_source").required(true).args(["source_model", "matrix_file"])
))]
pub struct ChainArgs {
    /// Unlabeled 1-feature binary target (model mode).
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Serialized source model driving the chain.
    #[arg(long)]
    pub source_model: Option<PathBuf>,
    /// Analyze a hand-given transition matrix instead of estimating one.
    #[arg(long)]
    pub matrix_file: Option<PathBuf>,
    /// Per-class bootstrap quota; defaults to |T| / 2.
    #[arg(long)]
    pub quota: Option<usize>,
    /// Monte-Carlo draws per state (transitions and bound checks alike).
    #[arg(long, default_value_t = 2000)]
    pub draws: usize,
    /// Fix C instead of cross-validating on (T, Y⁰).
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_CV_FOLDS)]
    pub folds: usize,
    /// Plain uniform subsampling instead of the class-balanced bootstrap.
    #[arg(long)]
    pub uniform: bool,
    #[arg(long, env = "RWA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output report JSON path.
    #[arg(long, short)]
    pub out: PathBuf,
}

pub fn cmd_chain(args: &ChainArgs) -> Result<ChainReport> {
    let mut manifest = RunManifest::start("chain", format!("{args:?}"), Some(args.seed));

    let report = if let Some(matrix_path) = &args.matrix_file {
        manifest.add_input(matrix_path)?;
        let file: MatrixFile = read_json(matrix_path)?;
        let matrix = TransitionMatrix::from_rows(file.p)?;
        // Fixture mode exists to solve the stationary equations, so a
        // reducible matrix is a hard error here.
        let pi = stationary(&matrix)?;
        manifest.finish();
        ChainReport {
            schema_version: REPORT_SCHEMA_VERSION,
            manifest,
            states: Vec::new(),
            c_target: None,
            estimate: None,
            transition_rows: matrix.rows().to_vec(),
            overflow: matrix.overflow().to_vec(),
            stabilities: Some(pi.pi().to_vec()),
            stationary: Some(pi),
            reducible_note: None,
            pii: Vec::new(),
        }
    } else {
        let target_path = args.target.as_ref().ok_or_else(|| {
            Error::InvalidInput("chain analysis from a model needs --target".into())
        })?;
        let model_path = args.source_model.as_ref().expect("clap group");
        manifest.add_input(target_path)?;
        manifest.add_input(model_path)?;

        let file = load_model_file(model_path)?;
        let hypothesis = file.hypothesis;
        if hypothesis.n_classes() != 2 {
            return Err(Error::InvalidInput("chain analysis is binary-only".into()));
        }
        let target = align_features(
            load_svmlight(target_path)?.strip_labels(),
            hypothesis.n_features(),
        )?;
        // Orientation of the monotone states follows the source hypothesis.
        let ascending = hypothesis.class_weights()[1][0] >= 0.0;
        let space = enumerate_1d_labelings_oriented(&target, true, ascending)?;

        let c_target = match args.c {
            Some(c) => c,
            None => {
                let y0 = init_labels(&hypothesis, &target)?;
                let pseudo = target.with_label_ids(y0.assignments().to_vec(), 2)?;
                choose_c(&pseudo, args.folds, args.seed, "target pseudo-labels")?
            }
        };
        let quota = args.quota.unwrap_or((target.n_examples() / 2).max(1));
        let mut est_cfg = TransitionEstimatorConfig::new(quota, args.draws, args.seed, c_target);
        if args.uniform {
            est_cfg.scheme = SubsampleScheme::Uniform;
        }
        let estimate = estimate_transitions(&space, &target, &hypothesis, &est_cfg)?;
        // A reducible estimate (some labeling absorbing under this solver)
        // is a finding, not a failure: report it without stabilities.
        let (stationary_dist, reducible_note) = match stationary(&estimate.matrix) {
            Ok(pi) => (Some(pi), None),
            Err(err @ Error::ReducibleChain { .. }) => (None, Some(err.to_string())),
            Err(err) => return Err(err),
        };
        let pii = space
            .states()
            .iter()
            .map(|state| {
                verify_pii_bound(
                    &target,
                    state,
                    &hypothesis,
                    quota,
                    args.draws,
                    args.seed,
                    c_target,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        manifest.finish();
        ChainReport {
            schema_version: REPORT_SCHEMA_VERSION,
            manifest,
            states: space
                .states()
                .iter()
                .map(|s| s.assignments().to_vec())
                .collect(),
            c_target: Some(c_target),
            transition_rows: estimate.matrix.rows().to_vec(),
            overflow: estimate.matrix.overflow().to_vec(),
            estimate: Some(estimate),
            stabilities: stationary_dist.as_ref().map(|pi| pi.pi().to_vec()),
            stationary: stationary_dist,
            reducible_note,
            pii,
        }
    };

    write_json(&report, &args.out)?;
    match (&report.stabilities, &report.reducible_note) {
        (Some(stabilities), _) => println!(
            "chain analysis over {} states, stationary distribution {stabilities:?}, report at {}",
            report.transition_rows.len(),
            args.out.display()
        ),
        (None, Some(note)) => println!(
            "chain analysis over {} states: {note}; report at {}",
            report.transition_rows.len(),
            args.out.display()
        ),
        (None, None) => unreachable!("either a distribution or a note"),
    }
    Ok(report)
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(subcommand)]
    pub kind: BoundKind,
}

#[derive(Subcommand, Debug)]
pub enum BoundKind {
    /// Probability that a bootstrap of size m over n items contains all d
    /// marked items (lower bound).
    Containment {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        /// Use the exponential approximation (1 − e^(−m/n))^d.
        #[arg(long)]
        approximate: bool,
    },
    /// Maximum-margin generalization bound at confidence 1 − delta.
    Generalization {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        delta: f64,
    },
}

pub fn cmd_bound(args: &BoundArgs) -> Result<f64> {
    let value = match args.kind {
        BoundKind::Containment {
            n,
            m,
            d,
            approximate,
        } => containment_bound(n, m, d, approximate)?,
        BoundKind::Generalization { l, d, delta } => generalization_bound(l, d, delta)?,
    };
    println!("{value:.6}");
    Ok(value)
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Serialized source model.
    #[arg(long)]
    pub source_model: PathBuf,
    /// Unlabeled target dataset.
    #[arg(long)]
    pub target: PathBuf,
    /// Ground-truth target labels (one raw label per line).
    #[arg(long)]
    pub truth: PathBuf,
    /// Comma-separated iteration counts, e.g. 10,50,500.
    #[arg(long, value_delimiter = ',', required = true)]
    pub iterations: Vec<usize>,
    /// Comma-separated per-class quotas.
    #[arg(long, value_delimiter = ',', required = true)]
    pub quotas: Vec<usize>,
    /// Seeds: a comma list (1,2,3) or an exclusive range (0..20).
    #[arg(long)]
    pub seeds: String,
    /// Fix C instead of cross-validating on (T, Y⁰).
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_CV_FOLDS)]
    pub folds: usize,
    /// Output TSV path; a JSON report with the manifest is written next to
    /// it.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub iterations: usize,
    pub quota: usize,
    pub seed: u64,
    pub vote_accuracy: f64,
    pub last_iterate_accuracy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub manifest: RunManifest,
    pub c_target: f64,
    pub rows: Vec<SweepRow>,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<SweepReport> {
    let mut manifest = RunManifest::start("sweep", format!("{args:?}"), None);
    manifest.add_input(&args.source_model)?;
    manifest.add_input(&args.target)?;
    manifest.add_input(&args.truth)?;

    let file = load_model_file(&args.source_model)?;
    let hypothesis = file.hypothesis;
    let target = align_features(
        load_svmlight(&args.target)?.strip_labels(),
        hypothesis.n_features(),
    )?;
    let truth = load_truth(&args.truth)?;
    let seeds = parse_seeds(&args.seeds)?;
    if args.iterations.is_empty() || args.quotas.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidInput("empty sweep grid".into()));
    }

    let c_target = match args.c {
        Some(c) => c,
        None => {
            let y0 = init_labels(&hypothesis, &target)?;
            let pseudo = target.with_label_ids(y0.assignments().to_vec(), y0.n_classes())?;
            choose_c(&pseudo, args.folds, 0, "target pseudo-labels")?
        }
    };

    // Grid order is (iterations, quota, seed); rows run in a worker pool
    // but the output keeps grid order.
    let mut grid = Vec::new();
    for &iterations in &args.iterations {
        for &quota in &args.quotas {
            for &seed in &seeds {
                grid.push((iterations, quota, seed));
            }
        }
    }
    let rows: Vec<Result<SweepRow>> = grid
        .par_iter()
        .map(|&(iterations, quota, seed)| {
            let cfg = RwaConfig {
                iterations,
                per_class_quota: Some(quota),
                c_target,
                seed,
                include_y0_in_vote: false,
                empty_class_fallback: EmptyClassFallback::Abort,
            };
            let (vote, trace) = run_rwa_evaluated(&hypothesis, &target, &cfg, Some(&truth))?;
            let last = trace
                .iterations
                .last()
                .and_then(|r| r.accuracy)
                .expect("truth supplied");
            Ok(SweepRow {
                iterations,
                quota,
                seed,
                vote_accuracy: vote.agreement_with_ids(&truth),
                last_iterate_accuracy: last,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    manifest.finish();

    let mut tsv = String::from("iterations\tquota\tseed\tvote_accuracy\tlast_iterate_accuracy\n");
    for row in &rows {
        tsv.push_str(&format!(
            "{}\t{}\t{}\t{:.6}\t{:.6}\n",
            row.iterations, row.quota, row.seed, row.vote_accuracy, row.last_iterate_accuracy
        ));
    }
    fs::write(&args.out, tsv).map_err(|e| Error::io(&args.out, e))?;

    let report = SweepReport {
        schema_version: REPORT_SCHEMA_VERSION,
        manifest,
        c_target,
        rows,
    };
    write_json(&report, args.out.with_extension("json"))?;
    println!(
        "swept {} rows (C = {c_target}), table at {}",
        report.rows.len(),
        args.out.display()
    );
    Ok(report)
}

/// Select C by cross-validation, shrinking the fold count to the smallest
/// class when needed; falls back to C = 1 when no class has 2 examples.
fn choose_c(data: &Dataset, folds: usize, seed: u64, what: &str) -> Result<f64> {
    let min_class = data.class_counts().into_iter().min().unwrap_or(0);
    if min_class < 2 {
        eprintln!("note: cannot cross-validate C on {what} (a class has fewer than 2 examples); using C = 1");
        return Ok(1.0);
    }
    let usable = folds.min(min_class);
    if usable < folds {
        eprintln!("note: reducing cross-validation folds from {folds} to {usable} on {what}");
    }
    cross_validate_c(data, &DEFAULT_C_GRID, usable, seed)
}

fn align_features(data: Dataset, n_features: usize) -> Result<Dataset> {
    if data.n_features() > n_features {
        return Err(Error::DimensionMismatch(format!(
            "dataset has {} features but the hypothesis was trained with {n_features}",
            data.n_features()
        )));
    }
    data.pad_features(n_features)
}

/// Ground-truth file: one numeric label per line, remapped to contiguous
/// ids in sorted order (matching the dataset loaders).
fn load_truth(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut raw = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value: f64 = line
            .parse()
            .map_err(|_| Error::parse(path, lineno + 1, format!("bad label `{line}`")))?;
        raw.push(value);
    }
    let mut distinct = raw.clone();
    distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite labels"));
    distinct.dedup();
    Ok(raw
        .iter()
        .map(|l| distinct.partition_point(|d| d < l))
        .collect())
}

fn parse_recipe(spec: &str) -> Result<RecipeKind> {
    let mut kinds = Vec::new();
    for part in spec.split(',') {
        let kind = match part.trim() {
            "standardize" => RecipeKind::Standardize,
            "scale-by-std" => RecipeKind::ScaleByStd,
            "instance-mean-standardize" => RecipeKind::InstanceMeanThenStandardize,
            "rectify" => RecipeKind::Rectify,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown preprocessing step `{other}`"
                )))
            }
        };
        kinds.push(kind);
    }
    match kinds.len() {
        0 => Err(Error::InvalidInput("empty preprocessing recipe".into())),
        1 => Ok(kinds.pop().expect("one element")),
        _ => Ok(RecipeKind::Chain(kinds)),
    }
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let spec = spec.trim();
    if let Some((start, end)) = spec.split_once("..") {
        let start: u64 = start
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad seed range `{spec}`")))?;
        let end: u64 = end
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad seed range `{spec}`")))?;
        if end <= start {
            return Err(Error::InvalidInput(format!("empty seed range `{spec}`")));
        }
        return Ok((start..end).collect());
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad seed `{s}`")))
        })
        .collect()
}

/// Allows building a hypothesis in tests without touching model files.
pub fn hypothesis_orientation_ascending(h: &LinearHypothesis) -> bool {
    h.class_weights()[1][0] >= 0.0
}

/// Keep the labeling type reachable for downstream report consumers.
pub type FinalLabeling = Labeling;
