//! Command-line front end for `syncgraph`.
//!
//! [`run`] parses arguments, executes one command and returns the exit code
//! and output instead of touching the process, so it can be driven from
//! tests. Exit codes: 0 success, 1 a checked property failed, 2 usage or
//! runtime error.

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use syncgraph::consensus::{algebraic_connectivity, simulate_consensus_sampled};
use syncgraph::construct::{
    build, enumerate_trees, seed_parents, tree_count, TreeSpec, MAX_ENUMERATED_N,
};
use syncgraph::digraph::format::{parse_graph, write_dot, write_edge_list, write_json};
use syncgraph::spectral::{
    char_poly_exact, laplacian, matches_optimal_spectrum, sigma_squared, spectrum_numeric,
    spread_parameters, DEFAULT_TOL,
};
use syncgraph::verify::{
    verify_conjecture_with, verify_theorem2_random, verify_theorem3, ConjectureOptions,
    ConjectureReport,
};
use syncgraph::DiGraph;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandResult {
    fn ok(stdout: String) -> Self {
        CommandResult {
            exit_code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(msg: impl std::fmt::Display) -> Self {
        CommandResult {
            exit_code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "syncgraph",
    version,
    about = "Optimal directed graphs for network synchronization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the optimal graph with n vertices and m arcs from a seed tree
    Construct(ConstructArgs),
    /// Laplacian spectrum, characteristic polynomial, or spread of a graph
    Spectrum(SpectrumArgs),
    /// Exhaustive and randomized verification sweeps
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Count or list the seed trees on n vertices
    Trees(TreesArgs),
    /// Simulate the consensus process on a graph
    Consensus(ConsensusArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphFormat {
    Edges,
    Json,
    Dot,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    #[arg(short)]
    n: usize,
    #[arg(short)]
    m: usize,
    /// star, path, random, index:RANK, or arcs:T:H,T:H,...
    #[arg(long, default_value = "star")]
    tree: String,
    /// Seed for `--tree random`
    #[arg(long, default_value_t = 0)]
    rng: u64,
    #[arg(long, value_enum, default_value = "edges")]
    format: GraphFormat,
    /// Also write the construction trace to this file
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the graph here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpectrumMode {
    Numeric,
    Exact,
    Spread,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    /// Edge-list or JSON graph file; `-` or absent reads stdin
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "numeric")]
    mode: SpectrumMode,
    /// Clustering tolerance for numeric eigenvalues
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Debug, Subcommand)]
enum VerifyTarget {
    /// Brute-force the spread bound over all graphs with n vertices
    Conjecture {
        #[arg(short)]
        n: usize,
        /// Arc count; all counts when omitted
        #[arg(short)]
        m: Option<usize>,
        #[arg(long, default_value_t = syncgraph::verify::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Allow n = 6 instances above ten million graphs
        #[arg(long)]
        long_run: bool,
    },
    /// Root-spread inequality on random integer polynomials
    Theorem2 {
        #[arg(long, default_value_t = 8)]
        degree_max: usize,
        #[arg(long, default_value_t = 5)]
        coeff_bound: i64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        rng: u64,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Exact spectrum of constructed graphs for every n up to n-max
    Theorem3 {
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        /// Random seed trees per n, besides the star and the path
        #[arg(long, default_value_t = 3)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        rng: u64,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TreeFormat {
    Parents,
    Arcs,
}

#[derive(Debug, Args)]
struct TreesArgs {
    #[arg(short)]
    n: usize,
    /// Print only the number of trees
    #[arg(long)]
    count: bool,
    #[arg(long, value_enum, default_value = "arcs")]
    format: TreeFormat,
}

#[derive(Debug, Args)]
struct ConsensusArgs {
    /// Edge-list or JSON graph file; `-` or absent reads stdin
    input: Option<PathBuf>,
    /// Initial state file, reals separated by spaces, commas or newlines;
    /// defaults to (1, 0, …, 0)
    #[arg(long)]
    x0: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    /// Keep every k-th state
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Write the trajectory here; stdout then carries only the summary
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command. `stdin` is read
/// only by commands whose input is `-` or absent.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandResult {
                    exit_code: EXIT_ERROR,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CommandResult::ok(text)
            };
        }
    };
    let result = match cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Spectrum(a) => cmd_spectrum(a, stdin),
        Command::Verify { target } => cmd_verify(target),
        Command::Trees(a) => cmd_trees(a),
        Command::Consensus(a) => cmd_consensus(a, stdin),
    };
    result.unwrap_or_else(CommandResult::error)
}

type CmdResult = Result<CommandResult, String>;

fn read_input(path: &Option<PathBuf>, stdin: &mut dyn Read) -> Result<String, String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
        }
        _ => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| format!("stdin: {e}"))?;
            Ok(s)
        }
    }
}

fn read_graph(path: &Option<PathBuf>, stdin: &mut dyn Read) -> Result<DiGraph, String> {
    parse_graph(&read_input(path, stdin)?).map_err(|e| e.to_string())
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_tree(n: usize, text: &str, rng: u64) -> Result<TreeSpec, String> {
    match text {
        "star" => Ok(TreeSpec::star(n)),
        "path" => Ok(TreeSpec::path(n)),
        "random" => Ok(TreeSpec::random(n, rng)),
        _ => {
            if let Some(rank) = text.strip_prefix("index:") {
                let rank = rank
                    .parse()
                    .map_err(|_| format!("bad tree rank `{rank}`"))?;
                Ok(TreeSpec::index(n, rank))
            } else if let Some(list) = text.strip_prefix("arcs:") {
                let arcs = list
                    .split(',')
                    .map(|pair| {
                        let (t, h) = pair
                            .split_once(':')
                            .ok_or_else(|| format!("bad arc `{pair}`, expected T:H"))?;
                        Ok((
                            t.trim().parse().map_err(|_| format!("bad arc `{pair}`"))?,
                            h.trim().parse().map_err(|_| format!("bad arc `{pair}`"))?,
                        ))
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                Ok(TreeSpec::explicit(n, arcs))
            } else {
                Err(format!(
                    "unknown tree `{text}`; use star, path, random, index:RANK or arcs:T:H,..."
                ))
            }
        }
    }
}

fn cmd_construct(a: ConstructArgs) -> CmdResult {
    let spec = parse_tree(a.n, &a.tree, a.rng)?;
    let (g, trace) = build(a.n, a.m, &spec).map_err(|e| e.to_string())?;
    let text = match a.format {
        GraphFormat::Edges => write_edge_list(&g),
        GraphFormat::Json => write_json(&g) + "\n",
        GraphFormat::Dot => write_dot(&g),
    };
    if let Some(p) = &a.trace {
        write_file(p, &trace.to_text())?;
    }
    match &a.out {
        Some(p) => {
            write_file(p, &text)?;
            Ok(CommandResult::ok(String::new()))
        }
        None => Ok(CommandResult::ok(text)),
    }
}

/// Rounds away floating-point noise below 1e-12 before printing.
fn fmt_real(x: f64) -> String {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

fn cmd_spectrum(a: SpectrumArgs, stdin: &mut dyn Read) -> CmdResult {
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err("tolerance must be positive".into());
    }
    let g = read_graph(&a.input, stdin)?;
    let l = laplacian(&g);
    let out = match a.mode {
        SpectrumMode::Exact => format!("{}\n", char_poly_exact(&l)),
        SpectrumMode::Numeric => spectrum_numeric(&l, a.tol)
            .map_err(|e| e.to_string())?
            .to_csv(),
        SpectrumMode::Spread => {
            if g.n() < 2 {
                return Err("spread needs at least two vertices".into());
            }
            let s = spectrum_numeric(&l, a.tol).map_err(|e| e.to_string())?;
            let sigma = sigma_squared(&s).map_err(|e| e.to_string())?;
            let p = spread_parameters(g.n(), g.net_weight());
            format!(
                "{}, {}, {}, {}\n",
                fmt_real(sigma),
                fmt_real(p.sigma_min_sq_f64()),
                p.kappa,
                matches_optimal_spectrum(&g)
            )
        }
    };
    Ok(CommandResult::ok(out))
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map(|pool| pool.install(f))
        .map_err(|e| e.to_string())
}

fn cmd_verify(target: VerifyTarget) -> CmdResult {
    match target {
        VerifyTarget::Conjecture {
            n,
            m,
            tol,
            jobs,
            long_run,
        } => {
            if !(tol.is_finite() && tol > 0.0) {
                return Err("tolerance must be positive".into());
            }
            let opts = ConjectureOptions {
                tol,
                jobs,
                chunks: 0,
                long_run,
            };
            let ms: Vec<usize> = match m {
                Some(m) => vec![m],
                None => (0..=n.saturating_mul(n.saturating_sub(1))).collect(),
            };
            let mut out = format!("{}\n", ConjectureReport::CSV_HEADER);
            let mut all = true;
            for m in ms {
                let r = verify_conjecture_with(n, m, &opts).map_err(|e| e.to_string())?;
                all &= r.passed();
                out.push_str(&r.csv_row());
                out.push('\n');
            }
            Ok(CommandResult {
                exit_code: if all { EXIT_OK } else { EXIT_VIOLATION },
                stdout: out,
                stderr: String::new(),
            })
        }
        VerifyTarget::Theorem2 {
            degree_max,
            coeff_bound,
            trials,
            rng,
            jobs,
        } => {
            let r = with_pool(jobs, || {
                verify_theorem2_random(degree_max, coeff_bound, trials, rng)
            })?
            .map_err(|e| e.to_string())?;
            Ok(sweep_result(r))
        }
        VerifyTarget::Theorem3 {
            n_max,
            seeds,
            rng,
            jobs,
        } => {
            let r = with_pool(jobs, || verify_theorem3(n_max, seeds, rng))?
                .map_err(|e| e.to_string())?;
            Ok(sweep_result(r))
        }
    }
}

fn sweep_result(r: syncgraph::verify::SweepReport) -> CommandResult {
    CommandResult {
        exit_code: if r.passed() { EXIT_OK } else { EXIT_VIOLATION },
        stdout: r.to_csv(),
        stderr: String::new(),
    }
}

fn cmd_trees(a: TreesArgs) -> CmdResult {
    if a.n < 2 {
        return Err("seed trees need n ≥ 2".into());
    }
    if a.count {
        if a.n > 21 {
            return Err("count exceeds 64 bits for n > 21".into());
        }
        return Ok(CommandResult::ok(format!("{}\n", tree_count(a.n))));
    }
    if a.n > MAX_ENUMERATED_N {
        return Err(format!(
            "listing supports n ≤ {MAX_ENUMERATED_N}; use --count"
        ));
    }
    let mut out = String::new();
    for tree in enumerate_trees(a.n).map_err(|e| e.to_string())? {
        let line: Vec<String> = match a.format {
            TreeFormat::Parents => seed_parents(&tree)
                .map_err(|e| e.to_string())?
                .iter()
                .map(|p| p.to_string())
                .collect(),
            TreeFormat::Arcs => tree.arcs().map(|(t, h)| format!("{t}:{h}")).collect(),
        };
        let _ = writeln!(out, "{}", line.join(" "));
    }
    Ok(CommandResult::ok(out))
}

fn parse_state(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| format!("bad state value `{t}`"))
        })
        .collect()
}

fn cmd_consensus(a: ConsensusArgs, stdin: &mut dyn Read) -> CmdResult {
    let g = read_graph(&a.input, stdin)?;
    let x0 = match &a.x0 {
        Some(p) => {
            parse_state(&fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?)?
        }
        None => (0..g.n()).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
    };
    let run =
        simulate_consensus_sampled(&g, &x0, a.dt, a.steps, a.stride).map_err(|e| e.to_string())?;
    let summary = match algebraic_connectivity(&g) {
        Ok(conn) => format!(
            "# algebraic_connectivity={}, final_disagreement={:e}\n",
            fmt_real(conn),
            run.final_disagreement()
        ),
        Err(_) => format!("# final_disagreement={:e}\n", run.final_disagreement()),
    };
    match &a.out {
        Some(p) => {
            write_file(p, &run.to_csv())?;
            Ok(CommandResult::ok(summary))
        }
        None => Ok(CommandResult::ok(run.to_csv() + &summary)),
    }
}
