//! `densest`: densest subgraph experiments from the command line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use densest_core::cache::{self, LoadError};
use densest_core::framework::{self, TraceLevel, TIMING_FIELDS};
use densest_core::oracle::{brute_force_densest, DEFAULT_LIMIT};
use densest_core::{
    exact_coreness, get_core, CacheError, Density, Graph, GraphError, OracleError, ParseOptions,
    RunConfig, RunError,
};

#[derive(Parser)]
#[command(name = "densest", version, about = "Approximate densest subgraphs by core pruning and load refinement")]
struct Cli {
    /// Worker threads for all parallel kernels.
    #[arg(long, global = true, env = "DENSEST_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the framework and print a JSON summary.
    Run(RunArgs),
    /// Print graph size, maximum core and pruning ratios.
    Stats(InputArgs),
    /// Run the framework and print the per-iteration trace as CSV.
    Trace(TraceArgs),
    /// Exhaustive densest subgraph of a small graph.
    Oracle(OracleArgs),
    /// Convert an edge list to a binary cache, or a cache back to an edge list.
    Convert(ConvertArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Edge list (plain or gzip) or binary cache.
    #[arg(long)]
    input: PathBuf,
    /// Binary cache to read, or to create from the edge list when missing.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Lines starting with this prefix are skipped.
    #[arg(long, default_value = "#")]
    comment_prefix: String,
    /// Ids in the file start at 1; shift them down by one.
    #[arg(long)]
    one_based: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Greedy,
    Sorting,
}

#[derive(Clone, Copy, ValueEnum)]
enum PruningArg {
    None,
    Exact,
    Approx,
    Hybrid,
}

#[derive(Args)]
struct RunOptions {
    #[arg(long, value_enum, default_value = "greedy")]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value = "exact")]
    pruning: PruningArg,
    /// Number of refinement iterations (default 20 unless --epsilon is given).
    #[arg(long)]
    iterations: Option<usize>,
    /// Target accuracy; picks the iteration count when --iterations is absent.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Upper bound on iterations chosen from --epsilon.
    #[arg(long, default_value_t = 1000)]
    iteration_cap: usize,
    /// Factor for approximate core labels.
    #[arg(long, default_value_t = 1.5)]
    approx_factor: f64,
    /// Zero the loads of surviving vertices whenever the graph is re-pruned.
    #[arg(long)]
    reset_loads: bool,
    /// Accepted for interface stability; runs are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    opts: RunOptions,
    /// Repeat the run and report mean timings.
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Write the per-iteration trace here.
    #[arg(long)]
    trace_csv: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    opts: RunOptions,
    /// Also write every suffix density of every iteration here.
    #[arg(long)]
    positions_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleFormat {
    Json,
    Text,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Refuse graphs with more vertices than this.
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: OracleFormat,
}

#[derive(Args)]
struct ConvertArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    output: PathBuf,
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }

    fn io(msg: impl Into<String>) -> Self {
        Failure { code: 3, msg: msg.into() }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        let code = match e {
            RunError::Config(_) | RunError::ThreadPool(_) => 2,
            RunError::Core(_) | RunError::Refine(_) | RunError::Invariant(_) => 4,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::io(e.to_string())
    }
}

impl From<CacheError> for Failure {
    fn from(e: CacheError) -> Self {
        let code = if matches!(e, CacheError::HashMismatch { .. }) { 6 } else { 3 };
        Failure { code, msg: e.to_string() }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Graph(e) => e.into(),
            LoadError::Cache(e) => e.into(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Convert(a) => cmd_convert(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn load(a: &InputArgs) -> Result<Graph, Failure> {
    let opts = ParseOptions {
        comment_prefix: a.comment_prefix.clone(),
        one_based: a.one_based,
    };
    if !a.input.exists() {
        return Err(Failure::io(format!("{}: no such file", a.input.display())));
    }
    if cache::is_cache_file(&a.input)? {
        return Ok(cache::read_cache_file(&a.input)?.0);
    }
    Ok(match &a.cache {
        Some(c) => cache::load_with_cache(&a.input, c, &opts)?,
        None => densest_core::read_edge_list_file(&a.input, &opts)?,
    })
}

fn run_config(o: &RunOptions, trace: TraceLevel) -> Result<RunConfig, Failure> {
    if o.iterations.is_some() && o.epsilon.is_some() {
        eprintln!("warning: both --iterations and --epsilon given; using --iterations");
    }
    let iterations = match (o.iterations, o.epsilon) {
        (Some(t), _) => Some(t),
        (None, Some(_)) => None,
        (None, None) => Some(20),
    };
    let cfg = RunConfig {
        algorithm: match o.algorithm {
            AlgorithmArg::Greedy => framework::Algorithm::Greedy,
            AlgorithmArg::Sorting => framework::Algorithm::Sorting,
        },
        pruning: match o.pruning {
            PruningArg::None => framework::Pruning::None,
            PruningArg::Exact => framework::Pruning::Exact,
            PruningArg::Approx => framework::Pruning::Approx,
            PruningArg::Hybrid => framework::Pruning::Hybrid,
        },
        iterations,
        epsilon: o.epsilon.unwrap_or(RunConfig::default().epsilon),
        iteration_cap: o.iteration_cap,
        approx_factor: o.approx_factor,
        threads: None,
        reset_loads: o.reset_loads,
        trace,
    };
    cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn cmd_run(a: RunArgs) -> Result<(), Failure> {
    let cfg = run_config(&a.opts, TraceLevel::Iterations)?;
    if a.repeats == 0 {
        return Err(Failure::usage("--repeats must be at least 1"));
    }
    let g = load(&a.input)?;

    let mut results = Vec::with_capacity(a.repeats);
    for _ in 0..a.repeats {
        results.push(framework::run(&g, &cfg)?);
    }
    let input = a.input.input.display().to_string();
    let mut summary = results[0].summary_json(&input, &cfg);
    let strip = |mut v: serde_json::Value| {
        for f in TIMING_FIELDS {
            v.as_object_mut().expect("object").remove(f);
        }
        v
    };
    let stable = strip(summary.clone());
    for r in &results[1..] {
        if strip(r.summary_json(&input, &cfg)) != stable {
            return Err(Failure {
                code: 4,
                msg: "repeated runs disagree".into(),
            });
        }
    }
    let mean = |f: fn(&framework::RunResult) -> f64| {
        let x = results.iter().map(f).sum::<f64>() / results.len() as f64;
        serde_json::Value::Number(format!("{x:.3}").parse().expect("decimal"))
    };
    summary["init_ms"] = mean(|r| r.trace.init.ms);
    summary["total_ms"] = mean(|r| r.trace.total_ms);
    summary["config"]["repeats"] = a.repeats.into();

    if let Some(path) = &a.trace_csv {
        results[0].trace.write_csv(create(path)?)?;
    }
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &summary).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_trace(a: TraceArgs) -> Result<(), Failure> {
    let level = if a.positions_csv.is_some() {
        TraceLevel::Positions
    } else {
        TraceLevel::Iterations
    };
    let cfg = run_config(&a.opts, level)?;
    let g = load(&a.input)?;
    let r = framework::run(&g, &cfg)?;
    r.trace.write_csv(io::stdout().lock())?;
    if let Some(path) = &a.positions_csv {
        r.trace.write_positions_csv(create(path)?)?;
    }
    Ok(())
}

fn ratio(part: usize, whole: usize) -> String {
    format!("{:.3} ({})", part as f64 / whole as f64, Density::new(part as u64, whole as u64))
}

fn cmd_stats(a: InputArgs) -> Result<(), Failure> {
    let g = load(&a)?;
    let dec = exact_coreness(&g).map_err(RunError::from)?;
    let l = dec.density_lower_bound();
    let core = get_core(&g, &dec, l);
    let top = get_core(&g, &dec, dec.kmax() as u64);
    let rows = [
        ("vertices", g.n().to_string()),
        ("edges", g.m().to_string()),
        ("max degree", g.max_degree().to_string()),
        ("kmax", dec.kmax().to_string()),
        ("kmax-core vertices", top.n().to_string()),
        ("kmax-core edges", top.m().to_string()),
        ("kmax-core density", Density::new(top.m() as u64, top.n() as u64).format_fixed(6)),
        ("prune threshold", l.to_string()),
        ("core vertices", core.n().to_string()),
        ("core edges", core.m().to_string()),
        ("vertex ratio", ratio(core.n(), g.n())),
        ("edge ratio", ratio(core.m(), g.m())),
        ("peel rounds", dec.peel_rounds().to_string()),
    ];
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = io::stdout().lock();
    for (k, v) in rows {
        writeln!(out, "{k:<width$}  {v}")?;
    }
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> Result<(), Failure> {
    let g = load(&a.input)?;
    let r = brute_force_densest(&g, a.limit).map_err(|e| match e {
        OracleError::TooLarge { .. } => Failure { code: 5, msg: e.to_string() },
        OracleError::EmptyGraph => Failure::io(e.to_string()),
    })?;
    let (num, den) = r.rho_star.reduced();
    let fixed = r.rho_star.format_fixed(6);
    let mut out = io::stdout().lock();
    match a.format {
        OracleFormat::Text => {
            let ids: Vec<String> = r.witness.iter().map(u64::to_string).collect();
            writeln!(out, "{num}/{den} = {fixed}, witness [{}]", ids.join(","))?;
        }
        OracleFormat::Json => {
            let v = serde_json::json!({
                "input": a.input.input.display().to_string(),
                "n": g.n(),
                "m": g.m(),
                "rho_star": format!("{num}/{den}"),
                "rho_star_num": num,
                "rho_star_den": den,
                "rho_star_float": serde_json::Value::Number(fixed.parse().expect("decimal")),
                "witness": r.witness,
            });
            serde_json::to_writer_pretty(&mut out, &v).map_err(io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn cmd_convert(a: ConvertArgs) -> Result<(), Failure> {
    if cache::is_cache_file(&a.input.input)? {
        let (g, _) = cache::read_cache_file(&a.input.input)?;
        let mut w = create(&a.output)?;
        g.write_edge_list(&mut w)?;
        w.flush()?;
    } else {
        let g = load(&a.input)?;
        let hash = cache::content_hash(&a.input.input)?;
        cache::write_cache_file(&g, &hash, &a.output)?;
    }
    Ok(())
}
