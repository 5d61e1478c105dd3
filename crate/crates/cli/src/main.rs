//! `pgw`: generate pm-nets, compute distances and bounds, run experiments.
//!
//! Exit status: 0 on success, 2 when an input fails validation, 3 when a
//! solver stops before converging (its result is still written), 1 otherwise.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::json;

use pgw::bounds::{gw_space_lb, nested_wasserstein_lb, weight_distribution};
use pgw::error::PgwError;
use pgw::experiments::{cluster, drones, nested, pandas, randomgraph, job_rng};
use pgw::generators::{
    drone_flight, erdos_renyi, karate_club, nested_cycle_of_cliques, panda, perturb_graph, sbm, Graph, PandaLayout,
};
use pgw::gw::{gw2, Init, OptimResult, SolverOptions};
use pgw::io::{read_pm_net, write_csv, write_pgm, write_pm_net};
use pgw::network::{uniform, Matrix, PmNet};
use pgw::par::Execution;
use pgw::pgw::{empirical_pm_net, pgw_fixed, pgw_general};

#[derive(Parser)]
#[command(name = "pgw", version, about = "Parameterized Gromov-Wasserstein distances")]
struct Cli {
    /// Run every job on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a pm-net file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(long, default_value_t = 0, global = true)]
        seed: u64,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Distance between two pm-net files.
    Dist(DistArgs),
    /// Lower bound on the general-parameter distance.
    Bound {
        #[arg(long, value_enum, default_value_t = BoundMethod::Nested)]
        method: BoundMethod,
        a: PathBuf,
        b: PathBuf,
        /// Inner order of the nested bound.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Outer order.
        #[arg(long, default_value_t = 2.0)]
        q: f64,
    },
    /// Run an experiment and write its report.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum GenKind {
    /// Panda graph with masked shortest-path kernels.
    Panda {
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        e: usize,
        /// Number the ears before the head.
        #[arg(long)]
        ears_first: bool,
    },
    /// Nested cycle of cliques with heat kernels.
    Nested {
        /// Type vector, e.g. 10,5,5.
        #[arg(long = "type", value_delimiter = ',', required = true)]
        ty: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
    },
    /// Empirical pm-net of Erdos-Renyi adjacency samples.
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// Empirical pm-net of stochastic block model samples.
    Sbm {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        within: f64,
        #[arg(long)]
        between: f64,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// Empirical pm-net of Karate Club perturbations.
    Karate {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// One drone flight over five frames.
    Drones {
        #[arg(long)]
        obstructed: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Cost {
    Gw,
    Fixed,
    General,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Product,
    Identity,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundMethod {
    Nested,
    Gwspace,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long, value_enum, default_value_t = Cost::Fixed)]
    cost: Cost,
    a: PathBuf,
    b: PathBuf,
    /// Result JSON; couplings go next to it as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InitArg::Product)]
    init: InitArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parameter index used by the gw cost.
    #[arg(long, default_value_t = 0)]
    param: usize,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    #[arg(long, default_value_t = 50)]
    max_rounds: usize,
    /// Divide every kernel by its Frobenius norm first.
    #[arg(long)]
    normalize: bool,
    /// Also write the node coupling as a PGM image.
    #[arg(long)]
    heatmap: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentName {
    Pandas,
    Randomgraph,
    Cluster,
    Nested,
    Drones,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    name: ExperimentName,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "results")]
    outdir: PathBuf,
    /// Nesting depth for the nested experiment.
    #[arg(long, default_value_t = 2)]
    levels: usize,
    /// Trials (randomgraph, drones), repetitions (cluster) or restarts (nested).
    #[arg(long)]
    trials: Option<usize>,
}

/// Error carrying the process exit status.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        let code = match err.downcast_ref::<PgwError>() {
            Some(
                PgwError::DimensionMismatch(_)
                | PgwError::InvalidInput(_)
                | PgwError::MarginalMismatch(_)
                | PgwError::ParameterMismatch(_)
                | PgwError::Format(_)
                | PgwError::Disconnected,
            ) => 2,
            _ => 1,
        };
        Self { code, err }
    }
}

impl From<PgwError> for Failure {
    fn from(err: PgwError) -> Self {
        anyhow::Error::from(err).into()
    }
}

type CmdResult = std::result::Result<ExitCode, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let result = match cli.command {
        Command::Gen { kind, seed, out } => cmd_gen(kind, seed, out.as_deref()),
        Command::Dist(args) => cmd_dist(&args),
        Command::Bound { method, a, b, p, q } => cmd_bound(method, &a, &b, p, q, exec),
        Command::Experiment(args) => cmd_experiment(&args, exec),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

/// Writes to stdout, treating a closed pipe as success.
fn print_out(text: &str) -> anyhow::Result<()> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => print_out(text),
    }
}

fn empirical(graphs: &[Graph]) -> pgw::error::Result<PmNet> {
    let n = graphs[0].n();
    empirical_pm_net(graphs.iter().map(Graph::adjacency).collect(), uniform(n))
}

fn cmd_gen(kind: GenKind, seed: u64, out: Option<&Path>) -> CmdResult {
    let mut rng = job_rng(seed, &[0]);
    let net = match kind {
        GenKind::Panda { big_n, n, e, ears_first } => {
            let layout = if ears_first { PandaLayout::EarsFirst } else { PandaLayout::HeadFirst };
            panda(big_n, n, e, layout)?.1
        }
        GenKind::Nested { ty, times } => {
            let g = nested_cycle_of_cliques(&ty)?;
            let labels = times.iter().map(|t| t.to_string()).collect();
            PmNet::new(g.heat_kernels(&times)?, uniform(g.n()), uniform(times.len()), labels)?
        }
        GenKind::Er { n, rho, samples } => {
            check_samples(samples)?;
            empirical(&(0..samples).map(|_| erdos_renyi(n, rho, &mut rng)).collect::<Result<Vec<_>, _>>()?)?
        }
        GenKind::Sbm { sizes, within, between, samples } => {
            check_samples(samples)?;
            empirical(&(0..samples).map(|_| sbm(&sizes, within, between, &mut rng)).collect::<Result<Vec<_>, _>>()?)?
        }
        GenKind::Karate { k, samples } => {
            check_samples(samples)?;
            let base = karate_club();
            empirical(&(0..samples).map(|_| perturb_graph(&base, k, &mut rng)).collect::<Result<Vec<_>, _>>()?)?
        }
        GenKind::Drones { obstructed } => drone_flight(obstructed, &mut rng)?,
    };
    match out {
        Some(p) => write_pm_net(&net, p)?,
        None => print_out(&pgw::io::pm_net_to_json(&net))?,
    }
    Ok(ExitCode::SUCCESS)
}

fn check_samples(samples: usize) -> pgw::error::Result<()> {
    if samples == 0 {
        return Err(PgwError::InvalidInput("samples must be positive".into()));
    }
    Ok(())
}

fn load(path: &Path, normalize: bool) -> std::result::Result<PmNet, Failure> {
    let net = read_pm_net(path).map_err(|e| Failure::from(anyhow::Error::from(e).context(format!("reading {}", path.display()))))?;
    Ok(if normalize { net.frobenius_normalized() } else { net })
}

fn side_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "result".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn cmd_dist(args: &DistArgs) -> CmdResult {
    let x = load(&args.a, args.normalize)?;
    let y = load(&args.b, args.normalize)?;
    let init = match args.init {
        InitArg::Product => Init::Product,
        InitArg::Identity => Init::Identity,
        InitArg::Random => Init::Random,
    };
    let opts = SolverOptions {
        max_iters: args.max_iters,
        rel_tol: args.rel_tol,
        init,
        seed: args.seed,
        max_rounds: args.max_rounds,
        param_init: None,
    };
    let (name, r): (&str, OptimResult) = match args.cost {
        Cost::Gw => {
            if args.param >= x.num_params() || args.param >= y.num_params() {
                return Err(PgwError::InvalidInput(format!("parameter index {} out of range", args.param)).into());
            }
            ("gw", gw2(&x.slice(args.param), &y.slice(args.param), &opts)?)
        }
        Cost::Fixed => ("fixed", pgw_fixed(&x, &y, &opts)?),
        Cost::General => ("general", pgw_general(&x, &y, &opts)?),
    };
    info!("{name}: value {} after {} iterations", r.value, r.iterations);
    let mut report = json!({
        "cost": name,
        "value": r.value,
        "iterations": r.iterations,
        "converged": r.converged,
        "trace": r.trace,
    });
    if let Some(out) = &args.out {
        let path = side_path(out, "coupling");
        write_csv(r.coupling.matrix(), &path)?;
        report["coupling_csv"] = json!(path.display().to_string());
        if let Some(xi) = &r.param_coupling {
            let path = side_path(out, "param_coupling");
            write_csv(xi.matrix(), &path)?;
            report["param_coupling_csv"] = json!(path.display().to_string());
        }
    }
    if let Some(h) = &args.heatmap {
        write_pgm(r.coupling.matrix(), h)?;
    }
    emit(&format!("{}\n", serde_json::to_string_pretty(&report).expect("json values serialize")), args.out.as_deref())?;
    if r.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("warning: solver did not converge");
        Ok(ExitCode::from(3))
    }
}

fn cmd_bound(method: BoundMethod, a: &Path, b: &Path, p: f64, q: f64, exec: Execution) -> CmdResult {
    let x = load(a, false)?;
    let y = load(b, false)?;
    let report = match method {
        BoundMethod::Nested => {
            let w = nested_wasserstein_lb(&weight_distribution(&x), &weight_distribution(&y), p, q)?;
            json!({ "method": "nested", "p": p, "q": q, "wasserstein": w, "value": w / 2.0 })
        }
        BoundMethod::Gwspace => {
            let v = gw_space_lb(&x, &y, q, &SolverOptions::default(), exec)?;
            json!({ "method": "gwspace", "q": q, "value": v })
        }
    };
    print_out(&format!("{}\n", serde_json::to_string_pretty(&report).expect("json values serialize")))?;
    Ok(ExitCode::SUCCESS)
}

fn write_report(dir: &Path, name: &str, report: serde_json::Value, tables: Vec<(String, Matrix)>) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, serde_json::to_string_pretty(&report)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    for (table, m) in tables {
        write_csv(&m, &dir.join(format!("{name}_{table}.csv")))?;
    }
    print_out(&format!("{}\n", path.display()))?;
    Ok(())
}

fn cmd_experiment(args: &ExperimentArgs, exec: Execution) -> CmdResult {
    let dir = &args.outdir;
    match args.name {
        ExperimentName::Pandas => {
            let r = pandas::run(&pandas::PandaConfig::default())?;
            write_report(dir, "pandas", json!(r), r.tables())?;
        }
        ExperimentName::Randomgraph => {
            let mut cfg = randomgraph::RandomGraphConfig { seed: args.seed, exec, ..Default::default() };
            cfg.trials = args.trials.unwrap_or(cfg.trials);
            let r = randomgraph::run(&cfg)?;
            write_report(dir, "randomgraph", json!(r), r.tables())?;
        }
        ExperimentName::Cluster => {
            let tune = |mut c: cluster::ClusterConfig| {
                c.seed = args.seed;
                c.exec = exec;
                c.repetitions = args.trials.unwrap_or(c.repetitions);
                c
            };
            let r = cluster::run(&tune(cluster::ClusterConfig::erdos_renyi()), &tune(cluster::ClusterConfig::sbm()))?;
            write_report(dir, "cluster", json!(r), r.tables())?;
        }
        ExperimentName::Nested => {
            let mut cfg = nested::NestedConfig::levels(args.levels)?;
            cfg.seed = args.seed;
            cfg.exec = exec;
            cfg.runs = args.trials.unwrap_or(cfg.runs);
            let r = nested::run(&cfg)?;
            write_report(dir, &format!("nested{}", args.levels), json!(r), r.tables())?;
        }
        ExperimentName::Drones => {
            let mut cfg = drones::DronesConfig { seed: args.seed, exec, ..Default::default() };
            cfg.nu_opts.exec = exec;
            cfg.trials = args.trials.unwrap_or(cfg.trials);
            let r = drones::run(&cfg)?;
            write_report(dir, "drones", json!(r), r.tables())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
