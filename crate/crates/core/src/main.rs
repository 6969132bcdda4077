use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gibbssat::cnf::{generate_instance, parse_dimacs, write_dimacs};
use gibbssat::experiments::{
    emit_csv, emit_plot_script, emit_timing_csv, emit_window_csv, estimate_scaling_window,
    half_crossing, read_csv, run_sweep, SweepConfig, SweepMode, SweepOptions,
};
use gibbssat::gibbs::{
    enumerate_spectrum_with_limit, ground_occupancy, min_beta_for_occupancy, DEFAULT_BETA_TOL,
    DEFAULT_SPECTRUM_LIMIT, DEFAULT_THRESHOLD,
};
use gibbssat::ising::{embed, verify_embedding_with_limit};
use gibbssat::solver::{solve, SolverKind};
use gibbssat::{CnfFormula, Error};

#[derive(Parser, Debug)]
#[command(name = "gibbssat", version, about = "Random k-SAT phase transitions and Gibbs ground-state occupancy")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "GIBBSSAT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random k-SAT instance in DIMACS format.
    Gen(GenArgs),
    /// Decide satisfiability of a DIMACS instance.
    Solve(SolveArgs),
    /// Print the Ising Hamiltonian of a DIMACS instance as JSON.
    Embed(EmbedArgs),
    /// Exact ground-state occupancy of the Gibbs state.
    Gibbs(GibbsArgs),
    /// Run a density sweep described by a JSON config.
    Sweep(SweepArgs),
    /// Estimate the finite-size scaling window from a sweep CSV.
    Window(WindowArgs),
    /// Write a gnuplot script for a sweep CSV.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    vars: usize,
    #[arg(long, conflicts_with = "alpha", required_unless_present = "alpha")]
    clauses: Option<usize>,
    /// Clause density; the clause count is round(alpha * vars).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolverChoice {
    Auto,
    TwoSat,
    Dpll,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverChoice::Auto)]
    solver: SolverChoice,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Check the embedding against the formula on every assignment.
    #[arg(long)]
    verify: bool,
}

#[derive(Args, Debug)]
struct GibbsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Inverse temperatures, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 3.0])]
    beta: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Also write the energy histogram as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Largest variable count accepted for exhaustive enumeration.
    #[arg(long, default_value_t = DEFAULT_SPECTRUM_LIMIT)]
    limit: usize,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Ignore and overwrite an existing checkpoint.
    #[arg(long)]
    fresh: bool,
}

#[derive(Args, Debug)]
struct WindowArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Write the report as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long)]
    csv: PathBuf,
    /// Script path (default: the CSV path with a .gp extension).
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Domain(other),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Embed(a) => cmd_embed(a),
        Command::Gibbs(a) => cmd_gibbs(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Window(a) => cmd_window(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read_formula(path: &Path) -> Result<CnfFormula, Failure> {
    let bytes = fs::read(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(parse_dimacs(&bytes)?)
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> CmdResult {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                })?;
        }
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    if a.k < 2 {
        return Err(usage(format!("--k must be at least 2, got {}", a.k)));
    }
    if a.vars <= a.k {
        return Err(usage(format!("--vars must exceed --k ({} <= {})", a.vars, a.k)));
    }
    let m = match (a.clauses, a.alpha) {
        (Some(m), None) => m,
        (None, Some(alpha)) if alpha.is_finite() && alpha >= 0.0 => (alpha * a.vars as f64).round() as usize,
        (None, Some(alpha)) => return Err(usage(format!("--alpha must be a non-negative number, got {alpha}"))),
        _ => return Err(usage("give exactly one of --clauses and --alpha")),
    };
    let formula = generate_instance(a.vars, m, a.k, a.seed)?;
    write_output(a.out.as_deref(), &write_dimacs(&formula))?;
    eprintln!("alpha = {} (M = {m}, N = {})", formula.clause_density(), a.vars);
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> CmdResult {
    let formula = read_formula(&a.input)?;
    let kind = match a.solver {
        SolverChoice::Auto => SolverKind::Auto,
        SolverChoice::TwoSat => SolverKind::TwoSat,
        SolverChoice::Dpll => SolverKind::Dpll,
    };
    let result = solve(&formula, kind)?;
    let w = &result.work;
    let mut text = format!(
        "c decisions {}\nc propagations {}\nc conflicts {}\nc work {}\n",
        w.decisions,
        w.propagations,
        w.conflicts,
        w.work()
    );
    match &result.witness {
        Some(model) => {
            text.push_str("s SATISFIABLE\nv");
            for lit in model.to_dimacs_literals() {
                text.push_str(&format!(" {lit}"));
            }
            text.push_str(" 0\n");
        }
        None => text.push_str("s UNSATISFIABLE\n"),
    }
    write_output(None, text.as_bytes())
}

fn cmd_embed(a: EmbedArgs) -> CmdResult {
    let formula = read_formula(&a.input)?;
    let h = embed(&formula)?;
    if a.verify {
        if !verify_embedding_with_limit(&formula, &h, DEFAULT_SPECTRUM_LIMIT)? {
            return Err(Failure::Domain(Error::InvalidParameter(
                "embedding disagrees with the formula on some assignment".into(),
            )));
        }
        eprintln!("verified on all {} assignments", 1u64 << formula.n_vars());
    }
    let mut json = h.to_json();
    json.push('\n');
    write_output(a.out.as_deref(), json.as_bytes())
}

fn cmd_gibbs(a: GibbsArgs) -> CmdResult {
    if let Some(b) = a.beta.iter().find(|b| !b.is_finite() || **b < 0.0) {
        return Err(usage(format!("--beta values must be non-negative, got {b}")));
    }
    if !(a.threshold > 0.0 && a.threshold < 1.0) {
        return Err(usage(format!("--threshold must lie in (0, 1), got {}", a.threshold)));
    }
    let formula = read_formula(&a.input)?;
    let hist = enumerate_spectrum_with_limit(&formula, a.limit)?;
    if let Some(path) = &a.json {
        fs::write(path, hist.to_json()).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    let mut text = format!(
        "n_vars {}\nn_clauses {}\nlambda_min {}\ndegeneracy {}\n",
        formula.n_vars(),
        formula.n_clauses(),
        hist.lambda_min(),
        hist.degeneracy()
    );
    for &beta in &a.beta {
        text.push_str(&format!("p beta={beta} {}\n", ground_occupancy(&hist, beta)));
    }
    let beta_star = min_beta_for_occupancy(&hist, a.threshold, DEFAULT_BETA_TOL)?;
    text.push_str(&format!("beta_star threshold={} {beta_star}\n", a.threshold));
    write_output(None, text.as_bytes())
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let text = fs::read_to_string(&a.config).map_err(|e| Error::Io {
        path: a.config.clone(),
        source: e,
    })?;
    let config = SweepConfig::from_json(&text)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| Error::Io {
        path: a.out_dir.clone(),
        source: e,
    })?;
    let with_ext = |ext: &str| a.out_dir.join(format!("{}.{ext}", config.name));
    let checkpoint = with_ext("checkpoint.json");
    if a.fresh && checkpoint.exists() {
        fs::remove_file(&checkpoint).map_err(|e| Error::Io {
            path: checkpoint.clone(),
            source: e,
        })?;
    }
    let opts = SweepOptions {
        threads: None,
        checkpoint: Some(checkpoint),
    };
    let run = run_sweep(&config, &opts)?;

    let csv = with_ext("csv");
    emit_csv(&csv, config.mode, &config.betas, &run.points)?;
    emit_timing_csv(&with_ext("timing.csv"), &run.timing)?;
    emit_plot_script(&with_ext("gp"), config.mode, &config.betas, &csv)?;

    eprintln!("wrote {}", csv.display());
    if config.mode == SweepMode::Satisfiability {
        match half_crossing(&run.points) {
            Some(alpha) => eprintln!("50% satisfiability crossing at alpha = {alpha}"),
            None => eprintln!("satisfiable fraction never crosses 50% on this grid"),
        }
    }
    Ok(())
}

fn cmd_window(a: WindowArgs) -> CmdResult {
    if !(a.delta > 0.0 && a.delta < 0.5) {
        return Err(usage(format!("--delta must lie in (0, 0.5), got {}", a.delta)));
    }
    let table = read_csv(&a.csv)?;
    let window = estimate_scaling_window(&table.points, a.delta)?;
    if let Some(path) = &a.out {
        emit_window_csv(path, &window)?;
    }
    let text = format!(
        "alpha_minus {}{}\nalpha_plus {}{}\nwidth {}\n",
        window.alpha_minus,
        if window.minus_clamped { " (clamped)" } else { "" },
        window.alpha_plus,
        if window.plus_clamped { " (clamped)" } else { "" },
        window.width()
    );
    write_output(None, text.as_bytes())
}

fn cmd_plot(a: PlotArgs) -> CmdResult {
    let table = read_csv(&a.csv)?;
    let out = a.out.unwrap_or_else(|| a.csv.with_extension("gp"));
    emit_plot_script(&out, table.mode, &table.betas, &a.csv)?;
    eprintln!("wrote {}", out.display());
    Ok(())
}
