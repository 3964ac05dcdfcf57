use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::json;

use dcmwalk::bp::{out_size_biased, MarkedOffspringLaw};
use dcmwalk::degree::{realize_sequence, BiDegreeDistribution, BiDegreeSequence};
use dcmwalk::experiment::{run_exponent_sweep, run_params, ExperimentConfig, DEFAULT_RATE_POINTS};
use dcmwalk::graph::{sample_dcm, Multigraph};
use dcmwalk::gw::{fit_decay_rate, subcritical_tail_experiment, TailConfig, TailEvent, TailMethod};
use dcmwalk::rate::ExtReal;
use dcmwalk::walk::{
    cover_time_mc, default_step_cap, hitting_matrix, hitting_time_mc, hitting_times_exact, matthews_bound,
    stationary_with, StationaryOptions, ALL_PAIRS_MAX, EXACT_HITTING_MAX,
};
use dcmwalk::{Error, Result};

#[derive(Parser)]
#[command(name = "dcmwalk", version, about = "Random walks on the directed configuration model")]
struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Stopping tolerance for the stationary power iteration.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Branching-process parameters and the predicted exponent of 1/π_min.
    Params {
        /// Degree distribution JSON (`{"pmf": [...]}`).
        #[arg(long)]
        dist: PathBuf,
        /// Points in the emitted rate-function table.
        #[arg(long, default_value_t = DEFAULT_RATE_POINTS)]
        rate_grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a graph and write its edge list.
    Sample {
        #[command(flatten)]
        source: SequenceSource,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stationary distribution summary.
    Stationary {
        #[command(flatten)]
        graph: GraphSource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo hitting times, one CSV row per replicate.
    Hitting {
        #[command(flatten)]
        graph: GraphSource,
        /// Start vertex.
        #[arg(long)]
        x: usize,
        /// Target vertex.
        #[arg(long)]
        y: usize,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        /// Walks still running after this many steps are censored.
        #[arg(long)]
        step_cap: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo cover times of the attractive component.
    Cover {
        #[command(flatten)]
        graph: GraphSource,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long)]
        step_cap: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Thin-tree probabilities of a marked branching process.
    BpSim {
        /// Marked law (`{"atoms": [...]}`) or degree distribution (`{"pmf": [...]}`, uses D̂).
        #[arg(long)]
        law: PathBuf,
        /// Generations, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [10usize, 20, 30])]
        t: Vec<usize>,
        /// Γ threshold e^{-aĤt}, with a ≥ 1.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Generation width cap.
        #[arg(long, default_value_t = 1_000_000)]
        omega: usize,
        #[arg(long, default_value_t = 1_000_000)]
        reps: usize,
        #[arg(long, value_enum, default_value_t = EventArg::Lower)]
        event: EventArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Spine)]
        method: MethodArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep n and seeds, recording log(1/π_min)/log n per graph.
    ExponentSweep {
        /// Sweep config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SequenceSource {
    /// Degree distribution JSON; realized deterministically at size `n`.
    #[arg(long, requires = "n", conflicts_with = "sequence")]
    dist: Option<PathBuf>,
    /// Vertex count for `--dist`.
    #[arg(long)]
    n: Option<usize>,
    /// Explicit degree sequence, one `in out` pair per line.
    #[arg(long)]
    sequence: Option<PathBuf>,
}

#[derive(Args)]
struct GraphSource {
    /// Edge list (`src dst multiplicity`).
    #[arg(long, conflicts_with_all = ["dist", "sequence"])]
    graph: Option<PathBuf>,
    #[command(flatten)]
    sample: SequenceSource,
}

#[derive(Clone, Copy, ValueEnum)]
enum EventArg {
    Lower,
    Upper,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Spine,
    Plain,
}

impl SequenceSource {
    fn load(&self) -> Result<BiDegreeSequence> {
        match (&self.dist, &self.sequence, self.n) {
            (Some(d), None, Some(n)) => realize_sequence(&BiDegreeDistribution::from_json_file(d)?, n),
            (None, Some(s), _) => BiDegreeSequence::from_file(s),
            _ => Err(Error::Argument("give --dist with --n, or --sequence".into())),
        }
    }
}

impl GraphSource {
    fn load(&self, seed: u64) -> Result<Multigraph> {
        match &self.graph {
            Some(p) => Multigraph::read_edge_list(p),
            None => sample_dcm(&self.sample.load()?, seed),
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>, trailer: &str) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let mut bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    bytes.extend_from_slice(trailer.as_bytes());
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn load_law(path: &Path) -> Result<MarkedOffspringLaw> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("pmf").is_some() {
        out_size_biased(&BiDegreeDistribution::from_json_str(&text)?)
    } else {
        MarkedOffspringLaw::from_json_str(&text)
    }
}

fn fmt_ext(v: ExtReal) -> String {
    v.to_string()
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Argument(e.to_string()))?;
    }
    match cli.cmd {
        Command::Params { dist, rate_grid, out } => {
            let d = BiDegreeDistribution::from_json_file(&dist)?;
            let report = run_params(&d, rate_grid)?;
            emit(&out, &(serde_json::to_string_pretty(&report)? + "\n"))
        }
        Command::Sample { source, out } => {
            let seq = source.load()?;
            let g = sample_dcm(&seq, cli.seed)?;
            info!("sampled n={} m={}", g.n(), g.m());
            g.write_edge_list(out)
        }
        Command::Stationary { graph, out } => {
            let g = graph.load(cli.seed)?;
            let opts = StationaryOptions { tol: cli.tol, ..Default::default() };
            let r = stationary_with(&g, &opts)?;
            let body = json!({
                "pi_min": r.pi_min,
                "pi_max": r.pi_max,
                "support_size": r.support.len(),
                "residual": r.residual,
                "exponent_observed": r.exponent_observed(),
            });
            emit(&out, &(serde_json::to_string_pretty(&body)? + "\n"))
        }
        Command::Hitting { graph, x, y, reps, step_cap, out } => {
            let g = graph.load(cli.seed)?;
            let cap = step_cap.unwrap_or_else(|| default_step_cap(g.n(), None));
            let est = hitting_time_mc(&g, x, y, reps, cap, cli.seed)?;
            let rows = est.samples.iter().enumerate().map(|(i, s)| {
                vec![i.to_string(), s.map(|v| v.to_string()).unwrap_or_default(), s.is_none().to_string()]
            });
            let exact = if g.n() <= EXACT_HITTING_MAX {
                hitting_times_exact(&g, y)?.expected[x].to_string()
            } else {
                "NA".into()
            };
            let trailer = format!(
                "#summary,mean={},std_err={},completed={},censored={},exact={exact}\n",
                est.mean, est.std_err, est.completed, est.censored
            );
            emit(&out, &csv_text(&["rep", "steps", "censored"], rows, &trailer)?)
        }
        Command::Cover { graph, reps, step_cap, out } => {
            let g = graph.load(cli.seed)?;
            let cap = step_cap.unwrap_or_else(|| default_step_cap(g.n(), None));
            let est = cover_time_mc(&g, reps, cap, cli.seed)?;
            let rows: Vec<Vec<String>> = est
                .per_start
                .iter()
                .flat_map(|(x, e)| {
                    e.samples.iter().enumerate().map(move |(i, s)| {
                        vec![
                            x.to_string(),
                            i.to_string(),
                            s.map(|v| v.to_string()).unwrap_or_default(),
                            s.is_none().to_string(),
                        ]
                    })
                })
                .collect();
            let matthews = if g.n() <= ALL_PAIRS_MAX {
                let h = hitting_matrix(&g)?;
                matthews_bound(h.t_hit().0, h.targets.len()).to_string()
            } else {
                "NA".into()
            };
            let trailer = format!(
                "#summary,worst_start={},mean={},std_err={},matthews={matthews}\n",
                est.worst_start, est.estimate.mean, est.estimate.std_err
            );
            emit(&out, &csv_text(&["start", "rep", "steps", "censored"], rows, &trailer)?)
        }
        Command::BpSim { law, t, a, omega, reps, event, method, out } => {
            let eta = load_law(&law)?;
            let mut estimates = Vec::new();
            for &tt in &t {
                let mut cfg = TailConfig::new(tt, a, omega, reps, cli.seed);
                cfg.event = match event {
                    EventArg::Lower => TailEvent::Lower,
                    EventArg::Upper => TailEvent::Upper,
                };
                cfg.method = match method {
                    MethodArg::Spine => TailMethod::Spine,
                    MethodArg::Plain => TailMethod::Plain,
                };
                let e = subcritical_tail_experiment(&eta, &cfg)?;
                info!("t={tt} p_hat={:e}", e.p_hat);
                estimates.push(e);
            }
            let trailer = match fit_decay_rate(&estimates) {
                Some((s, e)) if e.is_finite() => format!("#fit,rate={s},stderr={e}\n"),
                Some((s, _)) => format!("#fit,rate={s},stderr=NA\n"),
                None => "#fit,rate=NA,stderr=NA\n".into(),
            };
            let rows = estimates.iter().map(|e| {
                vec![
                    e.t.to_string(),
                    e.a.to_string(),
                    e.successes.to_string(),
                    e.reps.to_string(),
                    format!("{:e}", e.p_hat),
                    format!("{:e}", e.ci_lo),
                    format!("{:e}", e.ci_hi),
                    fmt_ext(e.rate_hat),
                    fmt_ext(e.rate_theory),
                ]
            });
            let header = ["t", "a", "successes", "reps", "p_hat", "ci_lo", "ci_hi", "rate_hat", "rate_theory"];
            emit(&out, &csv_text(&header, rows, &trailer)?)
        }
        Command::ExponentSweep { config, out } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if out.is_some() {
                cfg.output = out;
            }
            let summary = run_exponent_sweep(&cfg)?;
            info!("{} rows, {} reused", summary.rows.len(), summary.reused);
            if cfg.output.is_none() {
                emit(&None, &summary.to_csv())?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
