use std::fs::File;
use std::io::{self, BufWriter};
use std::net::SocketAddr;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use disambig_core::learner::SessionConfig;
use disambig_core::rulelang::{Difficulty, Schema};
use disambig_service::api::{router, ApiConfig, AppState};
use disambig_service::cli::{self, Strategy};
use disambig_service::store::SessionStore;

#[derive(Parser)]
#[command(name = "disambig", version, about = "Disambiguate candidate programs with multiple-choice questions")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Common {
    /// Maximum number of lettered options per query.
    #[arg(long, global = true, default_value_t = 4)]
    k: usize,
    #[arg(long, global = true, default_value_t = 0.1)]
    lambda_pre: f64,
    #[arg(long, global = true, default_value_t = 0.02)]
    lambda_post: f64,
    /// Programs sampled per query.
    #[arg(long, global = true, default_value_t = 50)]
    sample_size: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Never call the LLM renderer.
    #[arg(long, global = true)]
    no_llm: bool,
    /// Chat-completion URL; enables LLM rendering unless --no-llm.
    #[arg(long, global = true)]
    llm_endpoint: Option<String>,
    #[arg(long, global = true)]
    llm_model: Option<String>,
    /// Environment variable holding the LLM API key.
    #[arg(long, global = true, default_value = "LLM_API_KEY")]
    llm_key_env: String,
    #[arg(long, global = true, default_value = "data")]
    data_dir: PathBuf,
}

impl Common {
    fn session_config(&self) -> SessionConfig {
        SessionConfig {
            k: self.k,
            lambda_pre: self.lambda_pre,
            lambda_post: self.lambda_post,
            sample_size: self.sample_size,
            seed: self.seed,
            ..SessionConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate benchmark tasks and a manifest.
    Gen {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value = "medium")]
        difficulty: Difficulty,
        #[arg(long, default_value_t = 3)]
        objects: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer queries with an oracle and write one CSV row per run.
    Bench {
        /// A task file or a directory with a manifest.
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "mc,minimax-io")]
        strategies: Vec<Strategy>,
        /// Inputs in the shared baseline pool.
        #[arg(long, default_value_t = 40)]
        pool_size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Answer queries interactively on the terminal.
    Ask {
        #[arg(long, conflicts_with = "session", required_unless_present = "session")]
        task: Option<PathBuf>,
        /// Resume a stored session.
        #[arg(long)]
        session: Option<String>,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Directory resolving `task_ref` in create requests.
        #[arg(long)]
        tasks_dir: Option<PathBuf>,
        #[arg(long)]
        cors_origin: Option<String>,
    },
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let Cli { common, cmd } = Cli::parse();
    let cfg = common.session_config();
    cfg.validate()?;
    let llm = cli::llm_config(common.llm_endpoint.clone(), common.llm_model.clone(), &common.llm_key_env, common.no_llm);
    match cmd {
        Command::Gen { count, difficulty, objects, out } => {
            let m = cli::gen(common.seed, count, difficulty, &Schema::with_objects(objects), &out)?;
            println!("wrote {} tasks to {}", m.tasks.len(), out.display());
        }
        Command::Bench { tasks, strategies, pool_size, out } => {
            let tasks = cli::load_tasks(&tasks)?;
            let results = cli::bench(&tasks, &strategies, &cfg, pool_size)?;
            match out {
                Some(p) => cli::write_csv(&results, BufWriter::new(File::create(&p)?))?,
                None => cli::write_csv(&results, io::stdout().lock())?,
            }
            for s in cli::summarize(&results) {
                eprintln!(
                    "{}: {} runs, mean rounds {:.2}, accuracy {:.3}, failures {}",
                    s.strategy, s.runs, s.mean_rounds, s.accuracy, s.failures
                );
            }
        }
        Command::Ask { task, session } => {
            let store = SessionStore::open(&common.data_dir)?;
            let mut s = match (task, session) {
                (_, Some(id)) => store.load(&id)?,
                (Some(path), None) => {
                    let mut ts = cli::load_tasks(&path)?;
                    anyhow::ensure!(ts.len() == 1, "--task must name a single task file");
                    let s = cli::start_session(&store, &ts.remove(0), cfg)?;
                    eprintln!("session {}", s.session.id());
                    s
                }
                (None, None) => unreachable!("clap requires one of them"),
            };
            cli::ask(&store, &mut s, llm.as_ref(), &mut io::stdin().lock(), &mut io::stdout().lock())?;
        }
        Command::Serve { addr, tasks_dir, cors_origin } => {
            let store = SessionStore::open(&common.data_dir)?;
            let state = AppState::new(store, ApiConfig { defaults: cfg, llm, tasks_dir, cors_origin });
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
                log::info!("listening on {}", listener.local_addr()?);
                axum::serve(listener, router(state)).await?;
                anyhow::Ok(())
            })?;
        }
    }
    Ok(())
}
