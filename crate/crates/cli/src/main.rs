use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use relaxmatch::bounds::{lemma2_bound, theorem3_bound};
use relaxmatch::harness::{
    experiment_noise_sweep, experiment_seed_sweep, random_friendly_graph, random_symmetric_instance,
    NoiseSweepConfig, SeedSweepConfig,
};
use relaxmatch::io::{graph_to_json, read_graph, read_matrix, write_graph};
use relaxmatch::solver::{certify_uniqueness, check_seed_conditions};
use relaxmatch::spectral::{classify_default, eig_sym};
use relaxmatch::{rgm, ConstraintKind, Error, Oracle, RgmOptions, SeedSet, SolverOptions, Verdict};

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser)]
#[command(name = "relaxmatch", version, about = "Graph matching by convex relaxation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral friendliness report of a graph.
    Analyze { graph: PathBuf },
    /// Match graph A to graph B.
    Match(MatchArgs),
    /// Uniqueness certificate for the relaxation on B.
    Certify(CertifyArgs),
    /// Recovery bounds from a graph or from explicit margins.
    Bound(BoundArgs),
    /// Exhaustive isomorphism search for small graphs.
    Oracle(OracleArgs),
    /// Run an experiment protocol.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Generate a random instance.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Constraint {
    Pseudo,
    Doubly,
}

#[derive(Args)]
struct SolverArgs {
    /// Solver option override, e.g. `--set fw_max_iter=5000`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct MatchArgs {
    a: PathBuf,
    b: PathBuf,
    /// Seed matrices on A and B (JSON arrays of rows).
    #[arg(long, num_args = 2, value_names = ["C", "D"])]
    seeds: Option<Vec<PathBuf>>,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, value_enum, default_value_t = Constraint::Pseudo)]
    constraint: Constraint,
    /// Divide both graphs by the spectral radius of A before solving.
    #[arg(long)]
    normalize: bool,
    /// Exit with status 4 on an inconclusive verdict.
    #[arg(long)]
    strict: bool,
    /// Omit the relaxed matrix from the output.
    #[arg(long)]
    brief: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct CertifyArgs {
    b: PathBuf,
    /// Seed matrix on B (JSON array of rows).
    #[arg(long)]
    seeds: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(conflicts_with_all = ["eps", "delta", "n"])]
    graph: Option<PathBuf>,
    #[arg(long, requires_all = ["delta", "n"])]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

#[derive(Args)]
struct OracleArgs {
    a: PathBuf,
    b: PathBuf,
    /// Also list permutations with distortion up to this value.
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long, default_value_t = relaxmatch::oracle::DEFAULT_ORACLE_LIMIT)]
    limit: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Summary CSV.
    #[arg(long)]
    out: PathBuf,
    /// Per-trial CSV; defaults to `<out>` with a `.trials.csv` suffix.
    #[arg(long)]
    trials_out: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long)]
    rng_seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Include wall-clock runtimes in the per-trial CSV.
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    NoiseSweep(ExperimentArgs),
    SeedSweep(ExperimentArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    Friendly {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Symmetric {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn solver_options(args: &SolverArgs) -> Result<SolverOptions, Error> {
    let mut map = Map::new();
    for item in &args.set {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected KEY=VALUE, got {item:?}")))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        map.insert(key.trim().to_string(), value);
    }
    Ok(serde_json::from_value(Value::Object(map))?)
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn run_match(args: &MatchArgs) -> Result<u8, Error> {
    let a = read_graph(&args.a)?;
    let b = read_graph(&args.b)?;
    let mut solver = solver_options(&args.solver)?;
    solver.constraint = match args.constraint {
        Constraint::Pseudo => ConstraintKind::PseudoStochastic,
        Constraint::Doubly => ConstraintKind::DoublyStochastic,
    };
    let seeds = match &args.seeds {
        Some(paths) => Some(SeedSet::new(read_matrix(&paths[0])?, read_matrix(&paths[1])?, args.mu)?),
        None => None,
    };
    let result = rgm(
        &a,
        &b,
        &RgmOptions {
            solver,
            seeds,
            normalize: args.normalize,
        },
    )?;
    let mut out = serde_json::to_value(&result)?;
    if args.brief {
        if let Some(relaxed) = out.get_mut("relaxed").and_then(Value::as_object_mut) {
            relaxed.remove("p");
        }
    }
    print_json(&out)?;
    Ok(if args.strict && result.verdict == Verdict::Inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        0
    })
}

fn run_certify(args: &CertifyArgs) -> Result<u8, Error> {
    let b = read_graph(&args.b)?;
    let opts = solver_options(&args.solver)?;
    let out = match &args.seeds {
        Some(path) => {
            let d = read_matrix(path)?;
            let conditions = check_seed_conditions(&b, &d)?;
            let seeds = SeedSet::new(d.clone(), d, args.mu)?;
            json!({
                "certificate": certify_uniqueness(&b, Some(&seeds), &opts)?,
                "seed_conditions": conditions,
            })
        }
        None => json!({ "certificate": certify_uniqueness(&b, None, &opts)? }),
    };
    print_json(&out)?;
    Ok(0)
}

fn run_bound(args: &BoundArgs) -> Result<u8, Error> {
    let (eps, delta, sigma, n) = match (&args.graph, args.eps, args.delta, args.n) {
        (Some(path), ..) => {
            let g = read_graph(path)?;
            let report = classify_default(&eig_sym(&g)?).report;
            if !report.is_friendly {
                print_json(&json!({ "friendly": false, "lemma2": null, "theorem3": null }))?;
                return Ok(0);
            }
            (report.epsilon, report.delta, report.sigma, g.n())
        }
        (None, Some(eps), Some(delta), Some(n)) => (eps, delta, args.sigma, n),
        _ => return Err(Error::Parse("give a graph file or --eps, --delta and --n".into())),
    };
    print_json(&json!({
        "epsilon": eps,
        "delta": delta,
        "sigma": sigma,
        "n": n,
        "lemma2": lemma2_bound(eps, delta, sigma, n)?,
        "theorem3": theorem3_bound(eps, delta / sigma, n)?,
    }))?;
    Ok(0)
}

fn run_oracle(args: &OracleArgs) -> Result<u8, Error> {
    let a = read_graph(&args.a)?;
    let b = read_graph(&args.b)?;
    let oracle = Oracle::with_limit(args.limit);
    let isos = oracle.enumerate_isomorphisms(&a, &b, args.rho)?;
    let (best, dis) = oracle.brute_force_min_distortion(&a, &b)?;
    print_json(&json!({
        "isomorphisms": isos.elements,
        "min_distortion": dis,
        "argmin": best,
    }))?;
    Ok(0)
}

fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn trials_path(args: &ExperimentArgs) -> PathBuf {
    args.trials_out.clone().unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".trials.csv");
        PathBuf::from(p)
    })
}

fn run_experiment(cmd: &ExperimentCommand) -> Result<u8, Error> {
    match cmd {
        ExperimentCommand::NoiseSweep(args) => {
            let mut config: NoiseSweepConfig = read_config(&args.config)?;
            if let Some(seed) = args.rng_seed {
                config.rng_seed = seed;
            }
            let outcome = experiment_noise_sweep(&config, args.jobs)?;
            std::fs::write(&args.out, outcome.summary_csv())?;
            std::fs::write(trials_path(args), outcome.trials_csv(args.timings))?;
            print_json(&outcome.summary)?;
        }
        ExperimentCommand::SeedSweep(args) => {
            let mut config: SeedSweepConfig = read_config(&args.config)?;
            if let Some(seed) = args.rng_seed {
                config.rng_seed = seed;
            }
            let outcome = experiment_seed_sweep(&config, args.jobs)?;
            std::fs::write(&args.out, outcome.summary_csv())?;
            std::fs::write(trials_path(args), outcome.trials_csv(args.timings))?;
            print_json(&outcome.families)?;
        }
    }
    Ok(0)
}

fn emit_graph(graph: &relaxmatch::Graph, out: &Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => write_graph(path, graph),
        None => print_json(&serde_json::from_str::<Value>(&graph_to_json(graph))?),
    }
}

fn run_gen(cmd: &GenCommand) -> Result<u8, Error> {
    match cmd {
        GenCommand::Friendly { n, seed, out } => {
            let (g, margins) = random_friendly_graph(*n, *seed)?;
            emit_graph(&g, out)?;
            eprintln!("epsilon = {}, delta = {}", margins.epsilon, margins.delta);
        }
        GenCommand::Symmetric { n, l, seed, out } => {
            let (g, sym) = random_symmetric_instance(*n, *l, *seed)?;
            emit_graph(&g, out)?;
            eprintln!("symmetries: {}", serde_json::to_string(&sym.elements)?);
        }
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Analyze { graph } => {
            let g = read_graph(graph)?;
            print_json(&classify_default(&eig_sym(&g)?).report)?;
            Ok(0)
        }
        Command::Match(args) => run_match(args),
        Command::Certify(args) => run_certify(args),
        Command::Bound(args) => run_bound(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Experiment(cmd) => run_experiment(cmd),
        Command::Gen(cmd) => run_gen(cmd),
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_NUMERICAL
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
