//! `streampack`: streaming bin packing and scheduling estimates from the shell.
//!
//! Every subcommand prints one JSON report on standard output. Exit status is
//! 2 for usage errors and out-of-range parameters, 1 for unreadable or invalid
//! input and solver failures.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use streampack::bp_estimate::{rank_reduction_demo, EstimatorState};
use streampack::bp_round::RoundingMode;
use streampack::hmbp::Solver;
use streampack::makespan::{exact_makespan, greedy_min_makespan, volume_lower_bound, DEFAULT_JOB_LIMIT};
use streampack::quantiles::GkSummary;
use streampack::sched_round::{ScalarSchedSummary, VectorTypeSummary};
use streampack::streams::{
    generate, parse_bp_stream, parse_positive_stream, parse_scalar_stream, parse_vector_stream, GeneratorKind,
    MemoryReport, Ordering,
};
use streampack::vbp::{VbpEstimator, VbpVariant};
use streampack::vsched::{place_containers, ContainerState, DEFAULT_PLACEMENT_ATTEMPTS};
use streampack::VectorItem;

#[derive(Parser)]
#[command(name = "streampack", version, about = "One-pass bin packing and scheduling estimates")]
struct Cli {
    /// Seed for randomized steps (container placement, generators).
    #[arg(long, global = true, env = "STREAMPACK_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the optimal number of bins of a stream of sizes in (0, 1].
    BpEstimate(BpArgs),
    /// Estimate the number of bins for vectors in [0, 1]^d.
    VbpEstimate(VbpArgs),
    /// Container summary for vector scheduling.
    Vsched(VschedArgs),
    /// Rounding (type) summary for vector scheduling in small dimension.
    VschedRound(SchedArgs),
    /// Rounding summary for scalar makespan scheduling.
    Msched(SchedArgs),
    /// Quantile queries on a stream of numbers.
    Quantile(QuantileArgs),
    /// Rank estimation through the bin count estimator.
    Rankdemo(RankArgs),
    /// Write a generated stream.
    Gen(GenArgs),
}

#[derive(Args)]
struct BpArgs {
    #[arg(long)]
    epsilon: f64,
    /// simple | geometric
    #[arg(long, default_value = "geometric")]
    mode: RoundingMode,
    /// ffd | gg | exact
    #[arg(long, default_value = "gg")]
    solver: Solver,
    /// Input file, one size per line; `-` reads standard input.
    file: PathBuf,
}

#[derive(Args)]
struct VbpArgs {
    #[arg(long)]
    epsilon: f64,
    /// linf | groupsplit
    #[arg(long, default_value = "linf")]
    variant: VbpVariant,
    /// simple | geometric
    #[arg(long, default_value = "geometric")]
    mode: RoundingMode,
    /// ffd | gg | exact
    #[arg(long, default_value = "gg")]
    solver: Solver,
    /// Dimension; inferred from the first line when absent.
    #[arg(long)]
    dim: Option<usize>,
    file: PathBuf,
}

#[derive(Args)]
struct VschedArgs {
    #[arg(long)]
    machines: usize,
    #[arg(long)]
    epsilon: f64,
    /// Override of the big/small threshold factor.
    #[arg(long)]
    gamma: Option<f64>,
    /// Largest summary solved exactly.
    #[arg(long, default_value_t = DEFAULT_JOB_LIMIT)]
    exact_limit: usize,
    #[arg(long, default_value_t = DEFAULT_PLACEMENT_ATTEMPTS)]
    attempts: usize,
    #[arg(long)]
    dim: Option<usize>,
    file: PathBuf,
}

#[derive(Args)]
struct SchedArgs {
    #[arg(long)]
    machines: usize,
    #[arg(long)]
    epsilon: f64,
    /// Largest reconstructed instance solved exactly.
    #[arg(long, default_value_t = DEFAULT_JOB_LIMIT)]
    job_limit: usize,
    file: PathBuf,
}

#[derive(Args)]
struct QuantileArgs {
    #[arg(long)]
    delta: f64,
    /// Quantile in [0, 1], ranks counted from the largest value; repeatable.
    #[arg(long = "query", required = true)]
    queries: Vec<f64>,
    /// Also list the stored values with their rank upper bounds.
    #[arg(long)]
    extract: bool,
    file: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    epsilon: f64,
    /// Query value in (1/2, 2/3).
    #[arg(long)]
    q: f64,
    #[arg(long, default_value = "geometric")]
    mode: RoundingMode,
    #[arg(long, default_value = "exact")]
    solver: Solver,
    /// Values in (1/2, 2/3), one per line.
    file: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// uniform | clustered | sorted-adversarial | vector-uniform | tight-vsched | rank-reduction
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    #[arg(long, default_value_t = 1.0)]
    hi: f64,
    #[arg(long, default_value_t = 5)]
    clusters: usize,
    #[arg(long, default_value_t = 0.02)]
    spread: f64,
    /// ascending | descending | sawtooth
    #[arg(long, default_value = "descending")]
    order: String,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    machines: usize,
    #[arg(long, default_value_t = 0.25)]
    gamma: f64,
    /// Comma-separated values for rank-reduction.
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    #[arg(long, default_value_t = 0.6)]
    q: f64,
    /// Write the stream here and print a JSON report instead of the stream.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunReport {
    subcommand: &'static str,
    parameters: Value,
    result: Value,
    memory: Option<MemoryReport>,
    wall_time_ms: f64,
}

fn open(path: &Path) -> Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdin().lock()));
    }
    let f = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(Box::new(BufReader::new(f)))
}

fn vectors(path: &Path, dim: Option<usize>) -> Result<(Vec<VectorItem>, usize)> {
    let items = parse_vector_stream(open(path)?, dim).with_context(|| format!("in {}", path.display()))?;
    let d = dim
        .or_else(|| items.first().map(VectorItem::dim))
        .context("empty vector stream; pass --dim")?;
    Ok((items, d))
}

fn config(message: String) -> anyhow::Error {
    streampack::Error::Config(message).into()
}

fn run(cli: Cli) -> Result<Option<RunReport>> {
    let start = Instant::now();
    let seed = cli.seed;
    let (subcommand, parameters, result, memory) = match cli.command {
        Command::BpEstimate(a) => {
            let mut st = EstimatorState::new(a.epsilon, a.mode)?;
            let items = parse_bp_stream(open(&a.file)?).with_context(|| format!("in {}", a.file.display()))?;
            for x in items {
                st.process_item(x)?;
            }
            let estimate = st.finalize(a.solver)?;
            let instance = st.rounded_instance();
            (
                "bp-estimate",
                json!({ "epsilon": a.epsilon, "mode": a.mode, "solver": a.solver, "file": a.file }),
                json!({ "estimate": estimate, "rounded_instance": instance.entries() }),
                Some(st.memory()),
            )
        }
        Command::VbpEstimate(a) => {
            let (items, d) = vectors(&a.file, a.dim)?;
            let mut est = VbpEstimator::new(a.variant, d, a.epsilon, a.mode)?;
            for v in &items {
                est.process(v)?;
            }
            let estimate = est.finalize(a.solver)?;
            (
                "vbp-estimate",
                json!({ "epsilon": a.epsilon, "variant": a.variant, "mode": a.mode, "solver": a.solver, "d": d, "file": a.file }),
                json!({ "bins": estimate.bins, "additive": estimate.additive(), "estimate": estimate }),
                Some(est.memory()),
            )
        }
        Command::Vsched(a) => {
            if a.machines == 0 {
                return Err(config("--machines must be at least 1".into()));
            }
            if !(a.epsilon > 0.0 && a.epsilon <= 1.0) {
                return Err(config(format!("epsilon must lie in (0, 1], got {}", a.epsilon)));
            }
            let (items, d) = vectors(&a.file, a.dim)?;
            let mut st = match a.gamma {
                Some(g) => ContainerState::with_gamma(a.machines, d, a.epsilon, g)?,
                None => ContainerState::new(a.machines, d, a.epsilon)?,
            };
            for v in &items {
                st.process_job(v)?;
            }
            let summary = st.summarize();
            let greedy = if summary.jobs.is_empty() { 0.0 } else { greedy_min_makespan(&summary.jobs, a.machines)?.makespan };
            let exact = if summary.jobs.len() <= a.exact_limit {
                Some(exact_makespan(&summary.jobs, a.machines, a.exact_limit)?.makespan)
            } else {
                None
            };
            let placement = match place_containers(
                &summary.normalized_containers(),
                a.machines,
                a.epsilon,
                st.gamma(),
                seed,
                a.attempts,
            ) {
                Ok(p) => json!({ "ok": true, "attempts": p.attempts, "seed_used": p.seed_used, "excess": p.excess() }),
                Err(e) => json!({ "ok": false, "error": e.to_string() }),
            };
            (
                "vsched",
                json!({ "machines": a.machines, "epsilon": a.epsilon, "gamma": st.gamma(), "seed": seed, "file": a.file }),
                json!({
                    "gamma": st.gamma(),
                    "summary_jobs": summary.jobs.len(),
                    "big_jobs": summary.big_count,
                    "containers": summary.container_count,
                    "loads": summary.loads,
                    "container_loads": summary.container_loads,
                    "volume_lower_bound": volume_lower_bound(&summary.jobs, a.machines),
                    "makespan_greedy": greedy,
                    "makespan_exact": exact,
                    "placement": placement,
                }),
                Some(st.memory()),
            )
        }
        Command::VschedRound(a) => {
            let (items, d) = vectors(&a.file, None)?;
            let mut s = VectorTypeSummary::new(d, a.epsilon)?;
            for v in &items {
                s.process(v)?;
            }
            let estimate = s.estimate(a.machines, a.job_limit)?;
            (
                "vsched-round",
                json!({ "machines": a.machines, "epsilon": a.epsilon, "job_limit": a.job_limit, "d": d, "file": a.file }),
                json!({
                    "estimate": estimate,
                    "delta": s.delta(),
                    "p_max": s.p_max(),
                    "peak_big_types": s.peak_big_types(),
                    "big_type_bound": s.big_type_bound(),
                }),
                Some(s.memory()),
            )
        }
        Command::Msched(a) => {
            let jobs = parse_positive_stream(open(&a.file)?).with_context(|| format!("in {}", a.file.display()))?;
            let mut s = ScalarSchedSummary::new(a.epsilon)?;
            for p in jobs {
                s.process(p)?;
            }
            let estimate = s.estimate(a.machines, a.job_limit)?;
            (
                "msched",
                json!({ "machines": a.machines, "epsilon": a.epsilon, "job_limit": a.job_limit, "file": a.file }),
                json!({
                    "estimate": estimate,
                    "p_max": s.p_max(),
                    "q": s.q(),
                    "k": s.k(),
                    "counters": s.counters(),
                    "small_total": s.small_total(),
                }),
                Some(s.memory()),
            )
        }
        Command::Quantile(a) => {
            let values = parse_scalar_stream(open(&a.file)?).with_context(|| format!("in {}", a.file.display()))?;
            let mut gk = GkSummary::new(a.delta)?;
            for &v in &values {
                gk.insert(v)?;
            }
            let answers = a
                .queries
                .iter()
                .map(|&phi| Ok(json!({ "phi": phi, "value": gk.query(phi)? })))
                .collect::<Result<Vec<_>>>()?;
            let extracted = if a.extract { Some(gk.extract()?) } else { None };
            (
                "quantile",
                json!({ "delta": a.delta, "queries": a.queries, "file": a.file }),
                json!({ "n": gk.count(), "tuples": gk.len(), "answers": answers, "extracted": extracted }),
                Some(MemoryReport::new(gk.len() as u64, gk.peak_len() as u64, gk.count())),
            )
        }
        Command::Rankdemo(a) => {
            let values = parse_scalar_stream(open(&a.file)?).with_context(|| format!("in {}", a.file.display()))?;
            let r = rank_reduction_demo(&values, a.q, a.epsilon, a.mode, a.solver)?;
            let true_rank = values.iter().filter(|&&v| v > a.q).count();
            (
                "rankdemo",
                json!({ "epsilon": a.epsilon, "q": a.q, "mode": a.mode, "solver": a.solver, "file": a.file }),
                json!({ "rank": r.rank, "true_rank": true_rank, "bins": r.bins, "n": r.n, "estimate": r.estimate }),
                None,
            )
        }
        Command::Gen(a) => {
            let kind = generator(&a)?;
            let generated = generate(&kind, seed)?;
            let text = generated.to_string();
            match &a.output {
                None => {
                    io::stdout().lock().write_all(text.as_bytes())?;
                    return Ok(None);
                }
                Some(path) => {
                    std::fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?;
                    (
                        "gen",
                        json!({ "generator": kind, "seed": seed, "output": path }),
                        json!({ "items": generated.len() }),
                        None,
                    )
                }
            }
        }
    };
    Ok(Some(RunReport {
        subcommand,
        parameters,
        result,
        memory,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    }))
}

fn generator(a: &GenArgs) -> Result<GeneratorKind> {
    Ok(match a.kind.as_str() {
        "uniform" => GeneratorKind::Uniform { n: a.n, lo: a.lo, hi: a.hi },
        "clustered" => GeneratorKind::Clustered { n: a.n, clusters: a.clusters, spread: a.spread },
        "sorted-adversarial" => {
            let order = match a.order.as_str() {
                "ascending" => Ordering::Ascending,
                "descending" => Ordering::Descending,
                "sawtooth" => Ordering::Sawtooth,
                other => return Err(config(format!("unknown order '{other}'"))),
            };
            GeneratorKind::SortedAdversarial { n: a.n, lo: a.lo, hi: a.hi, order }
        }
        "vector-uniform" => GeneratorKind::VectorUniform { n: a.n, d: a.d, hi: a.hi },
        "tight-vsched" => GeneratorKind::TightVsched { machines: a.machines, gamma: a.gamma },
        "rank-reduction" => GeneratorKind::RankReduction { values: a.values.clone(), q: a.q },
        other => return Err(config(format!("unknown generator kind '{other}'"))),
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<streampack::Error>() {
        Some(streampack::Error::Config(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Some(report)) => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{text}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
