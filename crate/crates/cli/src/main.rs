use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ltlgnn_bench::{build_engine, speedup_report, time_dataset, write_report, CheckInput, EngineOptions};
use ltlgnn_core::automata::{emit_hoa, parse_hoa, translate, Buchi};
use ltlgnn_core::encoding::{dump_graph, UnionGraph};
use ltlgnn_core::ltl::{parse_ltl, to_nnf, Formula, GenConfig};
use ltlgnn_datagen::{generate_dataset, read_jsonl, write_jsonl, DatasetConfig, Sample, Scenario, Split};
use ltlgnn_neural::{
    evaluate, load_checkpoint, save_checkpoint, train, write_history, Confusion, EncodedGraph, IndexEncoding,
    LabeledGraph, Metrics, ModelKind, TrainConfig,
};

#[derive(Parser)]
#[command(name = "ltlgnn", version, about = "Neural and classical LTL model checking")]
struct Cli {
    /// Seed for every random choice; falls back to $OCTAL_SEED, then 0.
    #[arg(long, global = true, env = "OCTAL_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled dataset as JSONL.
    Gen(GenArgs),
    /// Train a classifier on the train split of a dataset.
    Train(TrainArgs),
    /// Report accuracy, precision and recall of checkpoints on a dataset.
    Eval(EvalArgs),
    /// Decide whether a system satisfies a specification.
    Check(CheckArgs),
    /// Time classical against neural checking.
    Bench(BenchArgs),
    /// Dump the union graph of a (system, specification) pair.
    Encode(EncodeArgs),
    /// Translate a formula to a Büchi automaton in HOA format.
    Translate(TranslateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    General,
    Special,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Scenario {
        match s {
            ScenarioArg::General => Scenario::General,
            ScenarioArg::Special => Scenario::Special,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    Test,
    All,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "general")]
    scenario: ScenarioArg,
    /// Number of specifications (4 samples each in general, 2 in special).
    #[arg(long, default_value_t = 100)]
    specs: usize,
    /// Largest specification size (AST nodes).
    #[arg(long, default_value_t = 15)]
    size: usize,
    #[arg(long, default_value_t = 5)]
    min_size: usize,
    /// Variables are drawn from the first N letters.
    #[arg(long, default_value_t = 10)]
    vars: usize,
    #[arg(long, default_value_t = 0.1)]
    test_fraction: f64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "gin")]
    model: ModelKind,
    #[arg(long, default_value_t = 1e-5)]
    lr: f64,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 5)]
    patience: usize,
    /// Independent runs; run i uses seed + i.
    #[arg(long, default_value_t = 5)]
    runs: usize,
    /// Divide part VI state numbers by the state count (stored in the checkpoint).
    #[arg(long)]
    scaled_indices: bool,
    /// Directory receiving run-<i>.ckpt and run-<i>.history.csv.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    data: PathBuf,
    /// One checkpoint per run.
    #[arg(long = "checkpoint", required = true, num_args = 1..)]
    checkpoints: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "test")]
    split: SplitArg,
    /// Also write the report to this file.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SystemArgs {
    /// Specification formula.
    #[arg(long)]
    spec: Option<String>,
    /// System given as the formula it is built from.
    #[arg(long, conflicts_with = "system_hoa")]
    system: Option<String>,
    /// System given as an automaton in HOA format.
    #[arg(long)]
    system_hoa: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    pair: SystemArgs,
    /// classical or neural (neural needs --checkpoint).
    #[arg(long, default_value = "classical")]
    engine: String,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Defaults to general for single pairs and to the dataset's own for --pairs.
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    /// Compare the classical and neural engines on every sample of a dataset.
    #[arg(long, conflicts_with_all = ["spec", "system", "system_hoa"])]
    pairs: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    checkpoint: PathBuf,
    /// Benchmark at most this many samples (in file order).
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    /// Dataset name in the report; defaults to the file stem.
    #[arg(long)]
    name: Option<String>,
    /// Write the CSV report here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    pair: SystemArgs,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TranslateArgs {
    formula: String,
}

fn formula(text: &str) -> Result<Formula> {
    parse_ltl(text).with_context(|| format!("cannot parse formula {text:?}"))
}

fn read_samples(path: &Path) -> Result<Vec<Sample>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_jsonl(BufReader::new(file)).with_context(|| format!("in {}", path.display()))
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            bail!("output directory {} does not exist", dir.display())
        }
        _ => Ok(()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    ensure_parent(path)?;
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn labeled(samples: &[&Sample]) -> Result<Vec<LabeledGraph>> {
    samples.iter().map(|s| Ok(LabeledGraph { graph: EncodedGraph::new(&s.union_graph()?), label: s.label })).collect()
}

fn cmd_gen(args: GenArgs, seed: u64) -> Result<()> {
    ensure_parent(&args.out)?;
    let cfg = DatasetConfig {
        scenario: args.scenario.into(),
        specs: args.specs,
        gen: GenConfig { size: args.size, num_vars: args.vars, seed, ..GenConfig::default() },
        min_size: args.min_size,
        seed,
        test_fraction: args.test_fraction,
        ..DatasetConfig::default()
    };
    let (samples, stats) = generate_dataset(&cfg)?;
    let mut out = create(&args.out)?;
    write_jsonl(&samples, &mut out)?;
    eprintln!(
        "wrote {} samples from {} specifications ({} candidates, {} trivial, {} skipped)",
        samples.len(),
        stats.accepted,
        stats.candidates,
        stats.trivial,
        stats.skipped
    );
    Ok(())
}

fn cmd_train(args: TrainArgs, seed: u64) -> Result<()> {
    ensure!(args.out.is_dir(), "output directory {} does not exist", args.out.display());
    let samples = read_samples(&args.data)?;
    let train_set: Vec<&Sample> = samples.iter().filter(|s| s.split == Split::Train).collect();
    let data = labeled(&train_set)?;
    for run in 0..args.runs {
        let cfg = TrainConfig {
            lr: args.lr,
            batch_size: args.batch_size,
            max_epochs: args.epochs,
            patience: args.patience,
            seed: seed + run as u64,
            runs: args.runs,
            indices: if args.scaled_indices { IndexEncoding::Scaled } else { IndexEncoding::Raw },
            ..TrainConfig::default()
        };
        let outcome = train(args.model, &cfg, &data)?;
        let ckpt = args.out.join(format!("run-{run}.ckpt"));
        fs::write(&ckpt, save_checkpoint(outcome.model.as_ref()))
            .with_context(|| format!("cannot write {}", ckpt.display()))?;
        write_history(&outcome.history, create(&args.out.join(format!("run-{run}.history.csv")))?)?;
        let best = &outcome.history[outcome.best_epoch - 1];
        eprintln!("run {run}: best epoch {} val accuracy {:.4}", best.epoch, best.val_accuracy);
    }
    Ok(())
}

fn metrics_report(m: &Metrics, n: usize) -> String {
    format!(
        "samples {n}\nruns {}\naccuracy {:.4} ± {:.4}\nprecision {:.4} ± {:.4}\nrecall {:.4} ± {:.4}\n",
        m.runs, m.accuracy.mean, m.accuracy.std, m.precision.mean, m.precision.std, m.recall.mean, m.recall.std
    )
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let samples = read_samples(&args.data)?;
    let chosen: Vec<&Sample> = samples
        .iter()
        .filter(|s| match args.split {
            SplitArg::Train => s.split == Split::Train,
            SplitArg::Test => s.split == Split::Test,
            SplitArg::All => true,
        })
        .collect();
    ensure!(!chosen.is_empty(), "no samples in the selected split");
    let data = labeled(&chosen)?;
    let refs: Vec<&LabeledGraph> = data.iter().collect();
    let mut runs: Vec<Confusion> = Vec::new();
    for path in &args.checkpoints {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        let model = load_checkpoint(&bytes).with_context(|| format!("in {}", path.display()))?;
        runs.push(evaluate(model.as_ref(), &refs));
    }
    let report = metrics_report(&Metrics::over_runs(&runs), chosen.len());
    print!("{report}");
    if let Some(out) = args.out {
        let mut w = create(&out)?;
        w.write_all(report.as_bytes())?;
        w.flush()?;
    }
    Ok(())
}

fn load_pair(pair: &SystemArgs) -> Result<CheckInput> {
    let spec = formula(pair.spec.as_deref().context("--spec is required")?)?;
    let (system, system_formula) = match (&pair.system, &pair.system_hoa) {
        (Some(text), None) => {
            let f = formula(text)?;
            (translate(&to_nnf(&f)), Some(f))
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let b: Buchi = parse_hoa(&text).with_context(|| format!("in {}", path.display()))?;
            (b, None)
        }
        _ => bail!("give the system with exactly one of --system or --system-hoa"),
    };
    Ok(CheckInput { spec, system, system_formula })
}

fn load_model(path: Option<&Path>) -> Result<Option<Box<dyn ltlgnn_neural::GraphClassifier>>> {
    path.map(|p| {
        let bytes = fs::read(p).with_context(|| format!("cannot read {}", p.display()))?;
        load_checkpoint(&bytes).with_context(|| format!("in {}", p.display()))
    })
    .transpose()
}

fn cmd_check(args: CheckArgs) -> Result<()> {
    if let Some(path) = &args.pairs {
        let samples = read_samples(path)?;
        let scenario = args.scenario.map_or_else(|| Scenario::infer(&samples), Scenario::from);
        let model = load_model(args.checkpoint.as_deref())?.context("--pairs needs --checkpoint")?;
        let classical = build_engine("classical", EngineOptions { scenario, model: None })?;
        let neural = build_engine("neural", EngineOptions { scenario, model: Some(model) })?;
        let mut agree = 0;
        for s in &samples {
            let input =
                CheckInput { spec: s.phi.clone(), system: s.system.clone(), system_formula: Some(s.phi_src.clone()) };
            agree += usize::from(classical.check(&input)?.holds == neural.check(&input)?.holds);
        }
        println!("agreement {agree}/{} = {:.4}", samples.len(), agree as f64 / samples.len().max(1) as f64);
        return Ok(());
    }
    let input = load_pair(&args.pair)?;
    let scenario = args.scenario.map_or(Scenario::General, Scenario::from);
    let model = load_model(args.checkpoint.as_deref())?;
    let engine = build_engine(&args.engine, EngineOptions { scenario, model })?;
    let verdict = engine.check(&input)?;
    match verdict.logit {
        Some(z) => println!("{} logit={z:.6}", u8::from(verdict.holds)),
        None => println!("{}", u8::from(verdict.holds)),
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let mut samples = read_samples(&args.data)?;
    if let Some(n) = args.limit {
        samples.truncate(n);
    }
    ensure!(!samples.is_empty(), "no samples to benchmark");
    let scenario = args.scenario.map_or_else(|| Scenario::infer(&samples), Scenario::from);
    let model = load_model(Some(&args.checkpoint))?.expect("path given");
    let records = time_dataset(model.as_ref(), &samples, scenario)?;
    let name = args
        .name
        .or_else(|| args.data.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "dataset".into());
    let report = speedup_report(&name, &records);
    match &args.out {
        Some(path) => write_report(std::slice::from_ref(&report.row), create(path)?)?,
        None => write_report(std::slice::from_ref(&report.row), std::io::stdout().lock())?,
    }
    eprintln!("neural accuracy on benchmarked samples {:.4}", report.accuracy);
    Ok(())
}

fn cmd_encode(args: EncodeArgs) -> Result<()> {
    let input = load_pair(&args.pair)?;
    let dump = dump_graph(&UnionGraph::build(&input.system, &to_nnf(&input.spec))?);
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(dump.as_bytes())?;
            w.flush()?;
        }
        None => print!("{dump}"),
    }
    Ok(())
}

fn cmd_translate(args: TranslateArgs) -> Result<()> {
    print!("{}", emit_hoa(&translate(&to_nnf(&formula(&args.formula)?))));
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a, cli.seed),
        Command::Train(a) => cmd_train(a, cli.seed),
        Command::Eval(a) => cmd_eval(a),
        Command::Check(a) => cmd_check(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Translate(a) => cmd_translate(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
