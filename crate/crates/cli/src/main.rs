//! `entail`: build spaces and verb tensors, compose phrases, score and
//! evaluate entailment.
//!
//! Exit status is 0 on success, 1 on usage errors and 2 on data errors.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use entail_core::corpus::{count_file, load_triples, ppmi_transform, PipelineConfig};
use entail_core::evaluation::{
    compose_phrase, load_dataset, normalize_composite, reports_to_json, run_experiment, write_scores_tsv, Model,
    Pattern, ScoringContext,
};
use entail_core::tensor::VerbStore;
use entail_core::vector::sparse_fields;
use entail_core::{DistVector, Error, Measure, MeasureConfig, VectorSpace};

#[derive(Parser)]
#[command(name = "entail", version, about = "Distributional entailment between composed phrases")]
struct Cli {
    /// Worker threads for counting and evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved; every stage is currently deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count a corpus and write its PPMI vector space.
    BuildSpace(BuildSpace),
    /// Build verb tensors from a triples file.
    BuildVerbs(BuildVerbs),
    /// Print the composite vector of one phrase.
    Compose(Compose),
    /// Print one measure between two composed phrases.
    Measure(MeasureCmd),
    /// Score a labelled dataset and write an AUC report.
    Evaluate(Evaluate),
}

#[derive(Args)]
struct Counting {
    /// Symmetric window size in tokens.
    #[arg(long, default_value_t = 5)]
    window: usize,
    /// Minimum frequency for a word to receive a vector.
    #[arg(long = "min-count", default_value_t = 1)]
    min_count: u64,
}

#[derive(Args)]
struct BuildSpace {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 300)]
    dims: usize,
    #[command(flatten)]
    counting: Counting,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildVerbs {
    #[arg(long)]
    space: PathBuf,
    /// TSV of `verb<TAB>subject<TAB>object`, `_` for a missing argument.
    #[arg(long)]
    triples: PathBuf,
    #[arg(long, value_parser = parse_model)]
    model: Model,
    /// Multiply composites by the verb's own vector (the default).
    #[arg(long = "augment-verb", overrides_with = "no_augment_verb")]
    augment_verb: bool,
    #[arg(long = "no-augment-verb", overrides_with = "augment_verb")]
    no_augment_verb: bool,
    /// Corpus for the holistic phrase vectors of `least-squares`.
    #[arg(long, required_if_eq("model", "least-squares"))]
    corpus: Option<PathBuf>,
    #[command(flatten)]
    counting: Counting,
    #[arg(long, default_value_t = 1e-6)]
    ridge: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Phrases {
    #[arg(long)]
    space: PathBuf,
    /// Verbs file; required by tensor models.
    #[arg(long)]
    verbs: Option<PathBuf>,
    #[arg(long, value_parser = parse_model)]
    model: Model,
    /// Word order; inferred from the word count when omitted (2 → sv, 3 → svo).
    #[arg(long, value_parser = parse_pattern)]
    pattern: Option<Pattern>,
}

#[derive(Args)]
struct Compose {
    #[command(flatten)]
    phrases: Phrases,
    #[arg(long)]
    phrase: String,
    /// L1-normalize the composite before printing.
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
struct MeasureCmd {
    #[command(flatten)]
    phrases: Phrases,
    #[arg(long)]
    left: String,
    #[arg(long)]
    right: String,
    #[arg(long, value_parser = parse_measure)]
    measure: Measure,
    #[command(flatten)]
    config: MeasureArgs,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long, default_value_t = 0.99)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
}

impl MeasureArgs {
    fn config(&self) -> MeasureConfig {
        MeasureConfig {
            alpha: self.alpha,
            epsilon: self.epsilon,
        }
    }
}

#[derive(Args)]
struct Evaluate {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    verbs: Option<PathBuf>,
    /// TSV of `left<TAB>right<TAB>1|0`.
    #[arg(long)]
    dataset: PathBuf,
    /// Name of the dataset in the report (default: file stem).
    #[arg(long)]
    name: Option<String>,
    #[arg(long, value_parser = parse_pattern)]
    pattern: Pattern,
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_model)]
    models: Vec<Model>,
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_measure)]
    measures: Vec<Measure>,
    #[command(flatten)]
    config: MeasureArgs,
    #[arg(long)]
    report: PathBuf,
    /// Also write per-pair scores as TSV.
    #[arg(long)]
    scores: Option<PathBuf>,
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Model::ALL.iter().map(|m| m.name()).collect();
        format!("unknown model `{s}` (expected one of {})", names.join(", "))
    })
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Measure::ALL.iter().map(|m| m.name()).collect();
        format!("unknown measure `{s}` (expected one of {})", names.join(", "))
    })
}

fn parse_pattern(s: &str) -> Result<Pattern, String> {
    s.parse().map_err(|_| format!("unknown pattern `{s}` (expected sv, vo or svo)"))
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn read_space(path: &Path) -> CliResult<VectorSpace> {
    VectorSpace::read_from(open(path)?).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn read_verbs(
    path: Option<&Path>,
    space: &VectorSpace,
    models: &[Model],
    pattern: Pattern,
) -> CliResult<Option<VerbStore>> {
    match path {
        Some(p) => VerbStore::read_from(open(p)?, space)
            .map(Some)
            .map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None if models.iter().any(|m| m.needs_verbs(pattern)) => {
            Err(Failure::Usage("tensor models need --verbs".into()))
        }
        None => Ok(None),
    }
}

fn build_space(args: &BuildSpace) -> CliResult {
    let cfg = PipelineConfig {
        window: args.counting.window,
        dims: args.dims,
        min_word_count: args.counting.min_count,
        ..Default::default()
    };
    let matrix = count_file(&args.corpus, &cfg)?;
    let vocab = matrix.vocabulary(cfg.dims, cfg.min_word_count)?;
    let space = ppmi_transform(&matrix, &vocab)?;
    space.write_to(create(&args.out)?)?;
    eprintln!(
        "{} words, {} dimensions, {} tokens counted",
        space.vocab().words().len(),
        space.dim(),
        matrix.grand_total()
    );
    Ok(())
}

fn build_verbs(args: &BuildVerbs) -> CliResult {
    let space = read_space(&args.space)?;
    let table = load_triples(&args.triples)?;
    let augment = args.augment_verb || !args.no_augment_verb;
    let mut store = VerbStore::build(&table, &space, augment);
    if args.model == Model::LeastSquares {
        let corpus = args.corpus.as_deref().expect("clap requires --corpus for least-squares");
        let cfg = PipelineConfig {
            window: args.counting.window,
            dims: space.dim(),
            min_word_count: args.counting.min_count,
            ..Default::default()
        };
        let lines: Vec<String> = open(corpus)?.lines().collect::<io::Result<_>>()?;
        let matrix = count_file(corpus, &cfg)?;
        let trained = store.train_least_squares(&space, &lines, &matrix, &cfg, args.ridge)?;
        eprintln!("{trained} least-squares matrices");
    }
    store.write_to(create(&args.out)?)?;
    eprintln!(
        "{} verbs, {} occurrences kept, {} dropped",
        store.tensor_count(),
        store.table().occurrence_count(),
        store.table().dropped()
    );
    Ok(())
}

fn words(phrase: &str) -> Vec<String> {
    phrase.split_whitespace().map(str::to_lowercase).collect()
}

fn pattern_for(explicit: Option<Pattern>, n_words: usize) -> CliResult<Pattern> {
    match (explicit, n_words) {
        (Some(p), n) if p.arity() == n => Ok(p),
        (Some(p), n) => Err(Failure::Usage(format!("pattern {p} needs {} words, got {n}", p.arity()))),
        (None, 2) => Ok(Pattern::Sv),
        (None, 3) => Ok(Pattern::Svo),
        (None, n) => Err(Failure::Usage(format!("a phrase has 2 or 3 words, got {n}"))),
    }
}

fn compose_one(
    phrase: &str,
    pattern: Pattern,
    args: &Phrases,
    space: &VectorSpace,
    verbs: Option<&VerbStore>,
) -> CliResult<DistVector> {
    compose_phrase(&words(phrase), pattern, args.model, space, verbs)
        .map_err(|reason| Failure::Data(format!("`{phrase}`: {reason}")))
}

fn compose(args: &Compose) -> CliResult {
    let p = &args.phrases;
    let pattern = pattern_for(p.pattern, words(&args.phrase).len())?;
    let space = read_space(&p.space)?;
    let verbs = read_verbs(p.verbs.as_deref(), &space, &[p.model], pattern)?;
    let mut v = compose_one(&args.phrase, pattern, p, &space, verbs.as_ref())?;
    if args.normalize {
        v = normalize_composite(v);
    }
    println!("{}{}", words(&args.phrase).join(" "), sparse_fields(&v));
    Ok(())
}

fn measure(args: &MeasureCmd) -> CliResult {
    let p = &args.phrases;
    let n = words(&args.left).len();
    if words(&args.right).len() != n {
        return Err(Failure::Usage("--left and --right need the same number of words".into()));
    }
    let pattern = pattern_for(p.pattern, n)?;
    let config = args.config.config();
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let space = read_space(&p.space)?;
    let verbs = read_verbs(p.verbs.as_deref(), &space, &[p.model], pattern)?;
    let left = normalize_composite(compose_one(&args.left, pattern, p, &space, verbs.as_ref())?);
    let right = normalize_composite(compose_one(&args.right, pattern, p, &space, verbs.as_ref())?);
    let score = args.measure.score(&left, &right, &config)?;
    println!("{:?}", score.value);
    Ok(())
}

fn evaluate(args: &Evaluate) -> CliResult {
    let config = args.config.config();
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let space = read_space(&args.space)?;
    let verbs = read_verbs(args.verbs.as_deref(), &space, &args.models, args.pattern)?;
    let pairs = load_dataset(&args.dataset, args.pattern)
        .map_err(|e| Failure::Data(format!("{}: {e}", args.dataset.display())))?;
    let name = args.name.clone().unwrap_or_else(|| {
        args.dataset
            .file_stem()
            .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned())
    });
    let ctx = ScoringContext {
        pattern: args.pattern,
        space: &space,
        verbs: verbs.as_ref(),
        config,
    };
    let reports = run_experiment(&name, &pairs, &args.models, &args.measures, &ctx)?;
    let mut out = create(&args.report)?;
    writeln!(out, "{}", reports_to_json(&reports)?)?;
    out.flush()?;
    if let Some(path) = &args.scores {
        write_scores_tsv(&reports, create(path)?)?;
    }
    for r in &reports {
        eprintln!(
            "{}\t{}\t{}\tauc={:.4}\tscored={}\tskipped={}",
            r.dataset, r.model, r.measure, r.auc, r.n_scored, r.n_skipped
        );
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match &cli.command {
        Command::BuildSpace(a) => build_space(a),
        Command::BuildVerbs(a) => build_verbs(a),
        Command::Compose(a) => compose(a),
        Command::Measure(a) => measure(a),
        Command::Evaluate(a) => evaluate(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
