use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pcrd::air::GenerationMode;
use pcrd::dsl::{classify, compile, pretty_print, Classification, DslError, RewardProgram};
use pcrd::evoleap::EvolutionStrategy;
use pcrd::filter::{curve_stats, filter_and_select, FilterConfig};
use pcrd::llm::{Gateway, MockProvider, OpenAiProvider, Provider};
use pcrd::network::{
    bundled_network, load_graph, parse_missions, synthetic_network, write_missions, write_network, NetworkError,
    SyntheticSpec,
};
use pcrd::pipeline::{
    export_run, resume_pipeline, run_pipeline, EnvSource, PipelineConfig, PipelineError, RunHooks, RunManifest,
    RunStatus,
};
use pcrd::sim::{ActionSpec, EnvFactory, Objective, Scenario};
use pcrd::trainer::{rollout, train, FixedPolicy, GreedyPolicy, Policy, RandomPolicy, TabularQ, TrainError, TrainingCurve};

/// Reward design for truck platoon coordination.
#[derive(Parser)]
#[command(name = "pcrd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic hub network.
    GenNetwork {
        #[arg(long, default_value_t = SyntheticSpec::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = SyntheticSpec::default().hubs)]
        hubs: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample freight missions on a network.
    GenMissions {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play one episode with a random, fixed or learned policy.
    Rollout {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        source: SourceArgs,
        /// `random`, an action name (`Wait`, `SpeedLow`, `SpeedMed`, `SpeedHigh`) or `greedy`.
        #[arg(long, default_value = "random")]
        policy: String,
        /// Q-table for the greedy policy.
        #[arg(long)]
        qtable: Option<PathBuf>,
        /// Reward program evaluated along the way.
        #[arg(long)]
        reward: Option<PathBuf>,
        /// Write the trajectory log here.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Train on a single reward file and report its curve.
    TrainOne {
        reward: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        train: TrainArgs,
        /// Directory for curve.csv and qtable.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Filter curve CSV files and report the selection.
    Filter {
        #[arg(required = true)]
        curves: Vec<PathBuf>,
        #[arg(long, default_value_t = FilterConfig::default().alpha)]
        alpha: usize,
        #[arg(long, default_value_t = FilterConfig::default().beta)]
        beta: usize,
        #[arg(long, default_value_t = FilterConfig::default().v_th)]
        v_th: f64,
        #[arg(long, default_value_t = FilterConfig::default().length)]
        length: usize,
    },
    /// Run the full design loop.
    Pipeline {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Continue an interrupted run.
    Resume {
        run_id: String,
        #[arg(long, default_value = "runs")]
        run_root: PathBuf,
        /// Replay responses from a mock script directory.
        #[arg(long)]
        mock: Option<PathBuf>,
    },
    /// Write a run's curves and candidate table as CSV.
    Export {
        run_id: String,
        #[arg(long, default_value = "runs")]
        run_root: PathBuf,
        /// Output directory; defaults to `<run dir>/export`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reward program tools.
    Dsl {
        #[command(subcommand)]
        command: DslCommand,
    },
}

#[derive(Subcommand)]
enum DslCommand {
    /// Parse, validate and probe-evaluate a program.
    Check { file: PathBuf },
    /// Print a program in canonical form.
    Fmt { file: PathBuf },
}

#[derive(Args)]
struct CommonArgs {
    /// Pipeline config file (TOML). Flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// wait, speed or mix.
    #[arg(long)]
    scenario: Option<Scenario>,
    /// single or multi.
    #[arg(long)]
    objective: Option<Objective>,
}

#[derive(Args)]
struct SourceArgs {
    /// Two trucks on a three-hub line instead of a network.
    #[arg(long, conflicts_with_all = ["network", "zones"])]
    line: bool,
    /// Network file; the bundled network when absent.
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    zones: Option<Vec<u32>>,
    #[arg(long)]
    missions_per_zone: Option<usize>,
    /// Use these missions instead of sampling.
    #[arg(long)]
    missions: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    episodes: Option<u32>,
    #[arg(long)]
    eval_every: Option<u32>,
    #[arg(long)]
    eval_rollouts: Option<u32>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    n_iter: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// Comma-separated strategy codes, e.g. F1,F2,F3,L1.
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<EvolutionStrategy>>,
    /// Ask for each initial program in its own call.
    #[arg(long)]
    per_program: bool,
    #[arg(long)]
    reuse_best_curve: bool,
    #[arg(long)]
    run_root: Option<PathBuf>,
    #[arg(long)]
    run_id: Option<String>,
    /// Replay responses from a mock script directory.
    #[arg(long)]
    mock: Option<PathBuf>,
}

/// Exit code plus the single error line printed to stderr.
struct Failure {
    code: u8,
    line: String,
}

impl Failure {
    fn new(code: u8, prefix: &str, message: impl std::fmt::Display) -> Self {
        Self {
            code,
            line: format!("{prefix}: {}", message.to_string().replace('\n', " ")),
        }
    }

    fn config(message: impl std::fmt::Display) -> Self {
        Self::new(1, "CONFIG", message)
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new(1, "IO", format!("{}: {e}", path.display()))
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Self {
            code: e.exit_code() as u8,
            line: e.error_line(),
        }
    }
}

impl From<DslError> for Failure {
    fn from(e: DslError) -> Self {
        Self {
            code: 2,
            line: e.to_string().replace('\n', " "),
        }
    }
}

impl From<NetworkError> for Failure {
    fn from(e: NetworkError) -> Self {
        Self::new(1, "NETWORK", e)
    }
}

impl From<TrainError> for Failure {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::CandidateFailure {
                truck_id, step, error, ..
            } => Self {
                code: 2,
                line: format!("{} (truck {truck_id}, step {step})", error.to_string().replace('\n', " ")),
            },
            TrainError::Config(m) => Self::config(m),
            other => Self::new(1, "TRAIN", other),
        }
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_program(path: &Path) -> Result<RewardProgram, Failure> {
    Ok(compile(&read(path)?)?)
}

fn base_config(common: &CommonArgs) -> Result<PipelineConfig, Failure> {
    let mut cfg = match &common.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
        cfg.train.seed = s;
    }
    if let Some(s) = common.scenario {
        cfg.env.scenario = s;
    }
    if let Some(o) = common.objective {
        cfg.env.objective = o;
    }
    Ok(cfg)
}

fn apply_source(cfg: &mut PipelineConfig, source: &SourceArgs) {
    if source.line {
        cfg.source = EnvSource::Line;
        return;
    }
    if source.network.is_none() && source.zones.is_none() && source.missions_per_zone.is_none() {
        return;
    }
    let EnvSource::Network {
        path,
        zones,
        missions_per_zone,
        ..
    } = &mut cfg.source
    else {
        cfg.source = EnvSource::default();
        return apply_source(cfg, source);
    };
    if let Some(p) = &source.network {
        *path = Some(p.clone());
    }
    if let Some(z) = &source.zones {
        *zones = z.clone();
    }
    if let Some(n) = source.missions_per_zone {
        *missions_per_zone = n;
    }
}

fn apply_train(cfg: &mut PipelineConfig, train: &TrainArgs) {
    if let Some(e) = train.episodes {
        cfg.train.max_training_episodes = e;
    }
    if let Some(e) = train.eval_every {
        cfg.train.eval_every_episodes = e;
    }
    if let Some(r) = train.eval_rollouts {
        cfg.train.eval_rollouts_per_point = r;
    }
}

fn factory(cfg: &PipelineConfig, source: &SourceArgs) -> Result<EnvFactory, Failure> {
    let Some(missions) = &source.missions else {
        return Ok(cfg.env_factory()?);
    };
    let graph = match &source.network {
        Some(p) => load_graph(p)?.graph,
        None => bundled_network().graph,
    };
    let tasks = parse_missions(&read(missions)?, &graph)?;
    Ok(EnvFactory::new(graph, tasks, cfg.env))
}

fn gateway(cfg: &PipelineConfig, mock: Option<&Path>) -> Result<Gateway, Failure> {
    let provider: Arc<dyn Provider> = match mock {
        Some(dir) => Arc::new(MockProvider::from_dir(dir).map_err(PipelineError::from)?),
        None => Arc::new(OpenAiProvider::new(cfg.provider.clone()).map_err(PipelineError::from)?),
    };
    Ok(Gateway::new(provider, cfg.provider.temperature, cfg.provider.max_in_flight))
}

fn summarize(run_dir: &Path, m: &RunManifest) {
    println!("run {} ({})", m.run_id, run_dir.display());
    for it in &m.iterations {
        match &it.selection {
            Some(s) => println!(
                "iteration {}: {} candidates, {} trained, best cand_{}{} max J {:.4}",
                it.iteration,
                it.candidates.len(),
                it.trainings,
                s.best_index,
                if s.fallback { " (fallback)" } else { "" },
                s.max_j
            ),
            None => println!("iteration {}: every candidate failed", it.iteration),
        }
    }
    println!(
        "calls: {} analysis, {} generation, {} repair; trainings: {}",
        m.counters.analysis_calls, m.counters.generation_calls, m.counters.repair_calls, m.counters.trainings
    );
    if let Some(best) = &m.final_best {
        println!("final best: {} (iteration {}, max J {:.4})", best.source_path, best.iteration, best.max_j);
        print!("{}", best.source);
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::GenNetwork { seed, hubs, out } => {
            let spec = SyntheticSpec {
                seed,
                hubs,
                ..SyntheticSpec::default()
            };
            let (graph, zones) = synthetic_network(&spec)?;
            emit(out.as_deref(), &write_network(&graph, &zones))
        }
        Command::GenMissions { common, source, out } => {
            let mut cfg = base_config(&common)?;
            apply_source(&mut cfg, &source);
            let f = factory(&cfg, &source)?;
            emit(out.as_deref(), &write_missions(&f.missions))
        }
        Command::Rollout {
            common,
            source,
            policy,
            qtable,
            reward,
            trajectory,
        } => {
            let mut cfg = base_config(&common)?;
            apply_source(&mut cfg, &source);
            let f = factory(&cfg, &source)?;
            let program = match &reward {
                Some(p) => load_program(p)?,
                None => compile("term none weight 0: 0")?,
            };
            let q = match &qtable {
                Some(p) => Some(TabularQ::from_text(&read(p)?)?),
                None => None,
            };
            let mut policy: Box<dyn Policy + '_> = match (policy.to_ascii_lowercase().as_str(), &q) {
                ("random", _) => Box::new(RandomPolicy),
                ("greedy", Some(q)) => Box::new(GreedyPolicy(q)),
                ("greedy", None) => return Err(Failure::config("greedy policy needs --qtable")),
                (name, _) => Box::new(FixedPolicy(name.parse::<ActionSpec>().map_err(Failure::config)?)),
            };
            let mut env = f.make().map_err(TrainError::from)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let r = rollout(&mut env, policy.as_mut(), &program, &mut rng, trajectory.is_some())?;
            if let Some(p) = &trajectory {
                let mut text = String::from("step truck action location platoon delay\n");
                for rec in &r.trajectory {
                    text.push_str(&format!("{rec}\n"));
                }
                std::fs::write(p, text).map_err(|e| Failure::io(p, e))?;
            }
            println!(
                "J={} D_p={} D_total={} T_d={} T_total={} steps={} reward_sum={}",
                r.objective, r.totals.d_p, r.totals.d_total, r.totals.t_d, r.totals.t_total, r.steps, r.reward_sum
            );
            Ok(())
        }
        Command::TrainOne {
            reward,
            common,
            source,
            train: train_args,
            out,
        } => {
            let mut cfg = base_config(&common)?;
            apply_source(&mut cfg, &source);
            apply_train(&mut cfg, &train_args);
            let program = load_program(&reward)?;
            let f = factory(&cfg, &source)?;
            let outcome = train(&f, &program, &cfg.train)?;
            let values = outcome.curve.values();
            let filter = FilterConfig {
                length: values.len(),
                alpha: cfg.filter.alpha.min(values.len()),
                beta: cfg.filter.beta.min(values.len()),
                ..cfg.filter.clone()
            };
            let stats = curve_stats(&values, &filter).map_err(Failure::config)?;
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
                let curve_path = dir.join("curve.csv");
                std::fs::write(&curve_path, outcome.curve.to_csv()).map_err(|e| Failure::io(&curve_path, e))?;
                let q_path = dir.join("qtable.txt");
                std::fs::write(&q_path, outcome.q.to_text()).map_err(|e| Failure::io(&q_path, e))?;
            }
            println!(
                "points={} env_steps={} final_J={} max_J={} late_mean={} filter={}",
                values.len(),
                outcome.env_steps,
                values.last().copied().unwrap_or(f64::NAN),
                stats.max_value,
                stats.late_mean,
                if stats.passes() { "pass" } else { "fail" }
            );
            Ok(())
        }
        Command::Filter {
            curves,
            alpha,
            beta,
            v_th,
            length,
        } => {
            let cfg = FilterConfig {
                alpha,
                beta,
                v_th,
                length,
            };
            let mut values = Vec::new();
            for p in &curves {
                let c = TrainingCurve::from_csv(&read(p)?)
                    .map_err(|e| Failure::new(1, "FORMAT", format!("{}: {e}", p.display())))?;
                values.push(c.values());
            }
            let sel = filter_and_select(&values, &cfg).map_err(|e| Failure::new(1, "FILTER", e))?;
            for (i, line) in sel.report().lines().enumerate() {
                println!("{line}  [{}]", curves[i].display());
            }
            println!("selected {}{}", sel.best_index, if sel.fallback { " fallback" } else { "" });
            Ok(())
        }
        Command::Pipeline {
            common,
            source,
            train: train_args,
            run: r,
        } => {
            let mut cfg = base_config(&common)?;
            if source.missions.is_some() {
                return Err(Failure::config("pipeline samples its own missions; --missions is not supported"));
            }
            apply_source(&mut cfg, &source);
            apply_train(&mut cfg, &train_args);
            if let Some(n) = r.n_iter {
                cfg.n_iter = n;
            }
            if let Some(k) = r.k {
                cfg.k = k;
            }
            if let Some(m) = r.m {
                cfg.m = m;
            }
            if let Some(w) = r.workers {
                cfg.worker_count = w;
            }
            if let Some(s) = r.strategies {
                cfg.strategies = s;
            }
            if r.per_program {
                cfg.generation_mode = GenerationMode::PerProgram;
            }
            if r.reuse_best_curve {
                cfg.reuse_best_curve = true;
            }
            if let Some(root) = r.run_root {
                cfg.run_root = root;
            }
            if r.run_id.is_some() {
                cfg.run_id = r.run_id;
            }
            cfg.validate()?;
            let gw = gateway(&cfg, r.mock.as_deref())?;
            let m = run_pipeline(&cfg, &gw, RunHooks::default())?;
            summarize(&cfg.run_root.join(&m.run_id), &m);
            Ok(())
        }
        Command::Resume { run_id, run_root, mock } => {
            let run_dir = run_root.join(&run_id);
            let manifest = RunManifest::load(&run_dir)?;
            if manifest.status == RunStatus::Completed {
                summarize(&run_dir, &manifest);
                return Ok(());
            }
            let gw = gateway(&manifest.config, mock.as_deref())?;
            let m = resume_pipeline(&run_dir, &gw, RunHooks::default())?;
            summarize(&run_dir, &m);
            Ok(())
        }
        Command::Export { run_id, run_root, out } => {
            let run_dir = run_root.join(&run_id);
            let out = out.unwrap_or_else(|| run_dir.join("export"));
            for p in export_run(&run_dir, &out)? {
                println!("{}", p.display());
            }
            Ok(())
        }
        Command::Dsl { command } => match command {
            DslCommand::Check { file } => match classify(&read(&file)?) {
                Classification::Valid(p) => {
                    println!("VALID: {} term(s)", p.terms.len());
                    Ok(())
                }
                Classification::Invalid(e) => Err(e.into()),
            },
            DslCommand::Fmt { file } => {
                print!("{}", pretty_print(&load_program(&file)?));
                Ok(())
            }
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.line);
            ExitCode::from(f.code)
        }
    }
}
