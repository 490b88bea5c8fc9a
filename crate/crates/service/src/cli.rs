//! The `gen`, `bench` and `ask` commands, callable from tests.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context};
use disambig_core::learner::{baseline_minimax_io, input_pool, run_with_oracle, RunResult, Session, SessionConfig, Status};
use disambig_core::render::LlmConfig;
use disambig_core::rulelang::wire::{parse_task, task_to_json};
use disambig_core::rulelang::{gen_suite, validate_task, Difficulty, Schema, Task};
use serde::{Deserialize, Serialize};

use crate::store::{SessionStore, StoredSession};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub difficulty: Difficulty,
    pub tasks: Vec<String>,
}

/// Write `count` tasks plus a manifest into `out`. Output depends only on
/// the arguments.
pub fn gen(seed: u64, count: usize, difficulty: Difficulty, schema: &Schema, out: &Path) -> anyhow::Result<Manifest> {
    fs::create_dir_all(out)?;
    let tasks = gen_suite(seed, count, schema, difficulty)?;
    for t in &tasks {
        validate_task(t)?;
        fs::write(out.join(format!("{}.json", t.id)), task_to_json(t))?;
    }
    let m = Manifest { seed, difficulty, tasks: tasks.iter().map(|t| t.id.clone()).collect() };
    fs::write(out.join(MANIFEST), serde_json::to_string_pretty(&m)? + "\n")?;
    Ok(m)
}

/// A task file, or a directory holding a manifest.
pub fn load_tasks(path: &Path) -> anyhow::Result<Vec<Task>> {
    if path.is_file() {
        let t = parse_task(&fs::read_to_string(path)?).with_context(|| format!("reading {}", path.display()))?;
        return Ok(vec![t]);
    }
    let m: Manifest = serde_json::from_str(&fs::read_to_string(path.join(MANIFEST))?)
        .with_context(|| format!("reading manifest in {}", path.display()))?;
    m.tasks
        .iter()
        .map(|id| {
            let p = path.join(format!("{id}.json"));
            parse_task(&fs::read_to_string(&p)?).with_context(|| format!("reading {}", p.display()))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    MultipleChoice,
    MinimaxIo,
}

impl std::str::FromStr for Strategy {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s {
            "mc" => Ok(Strategy::MultipleChoice),
            "minimax-io" | "minimax" => Ok(Strategy::MinimaxIo),
            _ => bail!("unknown strategy {s:?} (expected mc or minimax-io)"),
        }
    }
}

/// The input pool shared by all baseline runs of a suite.
pub fn pool_seed(seed: u64) -> u64 {
    seed ^ 0x5eed_9001
}

#[derive(Debug, Serialize)]
pub struct CsvRow<'a> {
    pub task_id: &'a str,
    pub strategy: &'a str,
    pub rounds: usize,
    pub converged: bool,
    pub equivalent_to_truth: bool,
    pub total_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrategySummary {
    pub strategy: String,
    pub runs: usize,
    pub mean_rounds: f64,
    pub accuracy: f64,
    pub failures: usize,
}

pub fn summarize(results: &[RunResult]) -> Vec<StrategySummary> {
    let mut names: Vec<&str> = results.iter().map(|r| r.strategy.as_str()).collect();
    names.dedup();
    names.sort();
    names.dedup();
    names
        .into_iter()
        .map(|name| {
            let rs: Vec<&RunResult> = results.iter().filter(|r| r.strategy == name).collect();
            let n = rs.len().max(1) as f64;
            StrategySummary {
                strategy: name.into(),
                runs: rs.len(),
                mean_rounds: rs.iter().map(|r| r.rounds as f64).sum::<f64>() / n,
                accuracy: rs.iter().filter(|r| r.equivalent_to_truth).count() as f64 / n,
                failures: rs.iter().filter(|r| r.failure.is_some()).count(),
            }
        })
        .collect()
}

/// Run every strategy on every task, in parallel across tasks. Results come
/// back in task order, strategies in the order given.
pub fn bench(
    tasks: &[Task],
    strategies: &[Strategy],
    cfg: &SessionConfig,
    pool_size: usize,
) -> anyhow::Result<Vec<RunResult>> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<anyhow::Result<Vec<RunResult>>>>> = Mutex::new((0..tasks.len()).map(|_| None).collect());
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(tasks.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(task) = tasks.get(i) else { break };
                let r = strategies
                    .iter()
                    .map(|st| -> anyhow::Result<RunResult> {
                        Ok(match st {
                            Strategy::MultipleChoice => run_with_oracle(task, cfg)?,
                            Strategy::MinimaxIo => {
                                let pool = input_pool(&task.schema, pool_size, pool_seed(cfg.seed));
                                baseline_minimax_io(task, &pool, cfg.seed)?
                            }
                        })
                    })
                    .collect();
                slots.lock().expect("lock poisoned")[i] = Some(r);
            });
        }
    });
    let mut out = Vec::new();
    for r in slots.into_inner().expect("lock poisoned") {
        out.extend(r.expect("every task ran")?);
    }
    Ok(out)
}

pub fn write_csv(results: &[RunResult], w: impl Write) -> anyhow::Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    for r in results {
        csv.serialize(CsvRow {
            task_id: &r.task_id,
            strategy: &r.strategy,
            rounds: r.rounds,
            converged: r.converged,
            equivalent_to_truth: r.equivalent_to_truth,
            total_ms: r.total_ms,
        })?;
    }
    csv.flush()?;
    Ok(())
}

/// Interactive loop: print each query, read a letter per line. Returns the
/// session status when it converges, fails, or input ends (the session is
/// then left awaiting an answer in the store).
pub fn ask(
    store: &SessionStore,
    s: &mut StoredSession,
    llm: Option<&LlmConfig>,
    input: &mut impl BufRead,
    out: &mut impl Write,
) -> anyhow::Result<Status> {
    loop {
        match s.session.status().clone() {
            Status::Converged => {
                let p = s.session.result()?;
                writeln!(out, "Converged after {} rounds:\n{}", s.session.history().len(), p.pretty(s.session.schema()))?;
                return Ok(Status::Converged);
            }
            st @ Status::Failed { .. } => {
                writeln!(out, "Session failed: {}", serde_json::to_string(&st)?)?;
                return Ok(st);
            }
            Status::AwaitingAnswer => {}
        }
        let q = s.query(store, llm)?;
        writeln!(out, "\nRound {} ({} candidates left)\n{}", q.round, s.session.alive().len(), q.to_text())?;
        loop {
            write!(out, "answer> ")?;
            out.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                writeln!(out, "\nSession {} saved; resume with --session.", s.session.id())?;
                return Ok(s.session.status().clone());
            }
            let letter = line.trim();
            if q.option_index(letter).is_some() {
                s.answer(store, letter)?;
                break;
            }
            let letters: Vec<&str> = q.options.iter().map(|o| o.letter.as_str()).collect();
            writeln!(out, "Please answer with one of: {}", letters.join(", "))?;
        }
    }
}

/// A new stored session for a task.
pub fn start_session(store: &SessionStore, task: &Task, cfg: SessionConfig) -> anyhow::Result<StoredSession> {
    let id = format!("{}-{:08x}", task.id, rand::random::<u32>());
    let session = Session::from_task(id, task, cfg)?;
    store.create(&session, Some(&task.id))?;
    Ok(StoredSession { session, task_id: Some(task.id.clone()) })
}

/// The LLM renderer settings implied by the flags, if any. The key itself is
/// read from the environment at call time and never stored here.
pub fn llm_config(endpoint: Option<String>, model: Option<String>, key_env: &str, disabled: bool) -> Option<LlmConfig> {
    let endpoint = endpoint.filter(|_| !disabled)?;
    let mut c = LlmConfig { enabled: true, endpoint, api_key_env: key_env.into(), ..LlmConfig::default() };
    if let Some(m) = model {
        c.model = m;
    }
    Some(c)
}
