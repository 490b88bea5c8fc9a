//! The interaction loop: ask a query, keep the programs consistent with the
//! answer, repeat until one behaviour is left. Also hosts the oracle harness
//! and an input-labelling baseline used for benchmarking.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::answers::{generate_query, validate_plan, AnswerConfig, QueryPlan};
use crate::distinguish::{refine_predicates, DistinguishConfig, DistinguishingSet};
use crate::error::{Error, Result};
use crate::logic::{Atom, Cube, Literal, Model, Signature, TheoryAxioms};
use crate::precond::{get_best_precondition_with, PrecondWeights, DEFAULT_NODE_BUDGET};
use crate::render::{render_llm, render_template, LlmConfig, QueryForm, RenderedQuery};
use crate::rulelang::{equivalent, random_input, strongest_post, Image, Program, Schema, Task};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub k: usize,
    pub lambda_pre: f64,
    pub lambda_post: f64,
    pub sample_size: usize,
    pub seed: u64,
    /// Distinguishing cubes kept per program pair; `None` keeps all.
    pub max_cubes_per_pair: Option<usize>,
    pub prime_budget: usize,
    pub precond_node_budget: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        let d = DistinguishConfig::default();
        SessionConfig {
            k: 4,
            lambda_pre: 0.1,
            lambda_post: 0.02,
            sample_size: 50,
            seed: 0,
            max_cubes_per_pair: d.max_cubes,
            prime_budget: d.prime_budget,
            precond_node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=25).contains(&self.k) {
            return Err(Error::InvalidOption(format!("k must be in 2..=25, got {}", self.k)));
        }
        if self.sample_size < 2 {
            return Err(Error::InvalidOption("sample_size must be at least 2".into()));
        }
        if !(self.lambda_pre.is_finite() && self.lambda_pre >= 0.0 && self.lambda_post.is_finite() && self.lambda_post >= 0.0)
        {
            return Err(Error::InvalidOption("lambda weights must be finite and non-negative".into()));
        }
        Ok(())
    }

    fn answer_config(&self) -> AnswerConfig {
        AnswerConfig { k: self.k, lambda_post: self.lambda_post, ..AnswerConfig::default() }
    }

    fn distinguish_config(&self) -> DistinguishConfig {
        DistinguishConfig { max_cubes: self.max_cubes_per_pair, prime_budget: self.prime_budget }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "kebab-case")]
pub enum Status {
    AwaitingAnswer,
    Converged,
    Failed { reason: String },
}

/// A query waiting for its answer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PendingQuery {
    pub round: usize,
    /// Bins hold hypothesis indices.
    pub plan: QueryPlan,
    /// Hypothesis indices the plan was built from.
    pub sample: Vec<usize>,
    pub query: RenderedQuery,
}

impl PendingQuery {
    pub fn has_none_option(&self) -> bool {
        self.query.options.len() > self.plan.bins.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub query: PendingQuery,
    pub option: usize,
    pub letter: String,
    pub before: usize,
    pub after: usize,
}

#[derive(Clone, Debug)]
pub struct Session {
    id: String,
    schema: Schema,
    axioms: TheoryAxioms,
    hypothesis: Vec<Program>,
    /// Equivalence class of each hypothesis program.
    class: Vec<usize>,
    alive: Vec<usize>,
    upre: Vec<Literal>,
    upost: Vec<Literal>,
    config: SessionConfig,
    history: Vec<Round>,
    pending: Option<PendingQuery>,
    status: Status,
}

impl Session {
    pub fn new(id: impl Into<String>, schema: Schema, hypothesis: Vec<Program>, config: SessionConfig) -> Result<Self> {
        schema.validate()?;
        config.validate()?;
        if hypothesis.is_empty() {
            return Err(Error::State("empty hypothesis space".into()));
        }
        let sig = schema.signature();
        for p in &hypothesis {
            check_program(p, &schema)?;
        }
        let axioms = schema.axioms();
        let refs: Vec<&Program> = hypothesis.iter().collect();
        let class = equivalence_classes(&refs, &axioms);
        let alive: Vec<usize> = (0..hypothesis.len()).collect();
        let mut s = Session {
            id: id.into(),
            upre: sig.input_literals(),
            upost: sig.output_literals(),
            schema,
            axioms,
            hypothesis,
            class,
            alive,
            config,
            history: Vec::new(),
            pending: None,
            status: Status::AwaitingAnswer,
        };
        s.update_status();
        Ok(s)
    }

    pub fn from_task(id: impl Into<String>, task: &Task, config: SessionConfig) -> Result<Self> {
        Session::new(id, task.schema.clone(), task.hypothesis.clone(), config)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn axioms(&self) -> &TheoryAxioms {
        &self.axioms
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    pub fn history(&self) -> &[Round] {
        &self.history
    }

    pub fn pending(&self) -> Option<&PendingQuery> {
        self.pending.as_ref()
    }

    pub fn hypothesis(&self) -> &[Program] {
        &self.hypothesis
    }

    /// Indices of the programs still consistent with every answer.
    pub fn alive(&self) -> &[usize] {
        &self.alive
    }

    pub fn initial_size(&self) -> usize {
        self.hypothesis.len()
    }

    pub fn num_unique(&self) -> usize {
        let mut cs: Vec<usize> = self.alive.iter().map(|&i| self.class[i]).collect();
        cs.sort();
        cs.dedup();
        cs.len()
    }

    pub fn round(&self) -> usize {
        self.history.len() + 1
    }

    /// The surviving behaviour once converged (smallest surviving program).
    pub fn result(&self) -> Result<&Program> {
        match self.status {
            Status::Converged => Ok(&self.hypothesis[self.alive[0]]),
            _ => Err(Error::State("session has not converged".into())),
        }
    }

    fn update_status(&mut self) {
        self.status = match self.num_unique() {
            0 => Status::Failed { reason: "no candidate program is consistent with the answers".into() },
            1 => Status::Converged,
            _ => Status::AwaitingAnswer,
        };
    }

    fn fail(&mut self, e: &Error) {
        self.mark_failed(e.to_string());
    }

    /// Terminal failure; drops any pending query.
    pub fn mark_failed(&mut self, reason: impl Into<String>) {
        self.pending = None;
        self.status = Status::Failed { reason: reason.into() };
    }

    /// One representative per surviving class, smallest index first.
    fn representatives(&self) -> Vec<usize> {
        let mut seen = BTreeMap::new();
        for &i in &self.alive {
            seen.entry(self.class[i]).or_insert(i);
        }
        let mut r: Vec<usize> = seen.into_values().collect();
        r.sort();
        r
    }

    /// The current query, computing it if none is pending.
    pub fn next_query(&mut self, llm: Option<&LlmConfig>) -> Result<RenderedQuery> {
        if let Some(p) = &self.pending {
            return Ok(p.query.clone());
        }
        if self.status != Status::AwaitingAnswer {
            return Err(Error::State("session is not awaiting an answer".into()));
        }
        match self.build_query(llm) {
            Ok(p) => {
                let q = p.query.clone();
                self.pending = Some(p);
                Ok(q)
            }
            Err(e) => {
                self.fail(&e);
                Err(e)
            }
        }
    }

    fn build_query(&mut self, llm: Option<&LlmConfig>) -> Result<PendingQuery> {
        let round = self.round();
        let reps = self.representatives();
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ (round as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let sampled: Vec<usize> = if reps.len() > self.config.sample_size {
            let mut idx: Vec<usize> =
                sample(&mut rng, reps.len(), self.config.sample_size).into_iter().map(|i| reps[i]).collect();
            idx.sort();
            idx
        } else {
            reps.clone()
        };
        let progs: Vec<&Program> = sampled.iter().map(|&i| &self.hypothesis[i]).collect();
        let dcfg = self.config.distinguish_config();
        let weights = PrecondWeights::from_lambda(self.config.lambda_pre);
        let sig = self.schema.signature();

        let pre = loop {
            let phi = DistinguishingSet::compute(&progs, &self.upre, &self.axioms, &dcfg)?;
            if let Some(r) = get_best_precondition_with(&phi, weights, &self.axioms, self.config.precond_node_budget) {
                break r.cube;
            }
            let refined = refine_predicates(&progs, &self.upre, &sig);
            if refined.len() == self.upre.len() {
                return Err(Error::Resource("no precondition distinguishes any sampled pair".into()));
            }
            self.upre = refined;
        };
        let acfg = self.config.answer_config();
        let mut plan = match generate_query(&pre, &progs, &self.upost, &self.axioms, &acfg) {
            Ok(p) => p,
            Err(Error::NoQuery(_)) => {
                // Pin the whole input down; distinct outputs on one input
                // are always separable.
                let full = complete_to_input(&pre, &sig);
                generate_query(&full, &progs, &self.upost, &self.axioms, &acfg)?
            }
            Err(e) => return Err(e),
        };
        for p in plan.bins.iter_mut().flatten().chain(plan.rest.iter_mut()) {
            *p = sampled[*p];
        }
        let pop = |i: usize| self.alive.iter().filter(|&&j| self.class[j] == self.class[i]).count();
        let bin_sizes: Vec<usize> = plan.bins.iter().map(|b| b.iter().map(|&i| pop(i)).sum()).collect();
        let covered: usize = bin_sizes.iter().sum();
        let none_option = (sampled.len() < reps.len() || !plan.rest.is_empty()).then(|| self.alive.len() - covered);
        let form = QueryForm {
            round,
            precondition: &plan.precondition,
            separators: &plan.separators,
            bin_sizes: &bin_sizes,
            none_option,
        };
        let template = render_template(&form, &self.schema);
        let query = match llm {
            Some(cfg) => render_llm(&template, &self.schema, cfg),
            None => template,
        };
        Ok(PendingQuery { round, plan, sample: sampled, query })
    }

    /// Install a previously issued query (used when replaying a log). The
    /// query must be structurally sound for the current state.
    pub fn install_query(&mut self, p: PendingQuery) -> Result<()> {
        if self.pending.is_some() || self.status != Status::AwaitingAnswer {
            return Err(Error::State("a query cannot be installed now".into()));
        }
        if p.round != self.round() {
            return Err(Error::State(format!("query is for round {}, session is at {}", p.round, self.round())));
        }
        let n_bins = p.plan.bins.len();
        if n_bins == 0 || p.plan.separators.len() != n_bins {
            return Err(Error::State("malformed plan".into()));
        }
        let opts = &p.query.options;
        if opts.len() < n_bins.max(2) || opts.len() > n_bins + 1 {
            return Err(Error::State("option count does not match the plan".into()));
        }
        for (i, o) in opts.iter().enumerate() {
            let want = (i < n_bins).then_some(i);
            if o.bin != want || o.letter != char::from(b'a' + i as u8).to_string() {
                return Err(Error::State("option letters do not match the plan".into()));
            }
        }
        if !self.axioms.cube_consistent(&p.plan.precondition) || p.plan.precondition.literals().iter().any(|l| !l.atom.is_input() || !self.axioms.signature().contains(&l.atom)) {
            return Err(Error::State("precondition is not a satisfiable input cube".into()));
        }
        let sig = self.axioms.signature();
        for s in &p.plan.separators {
            if s.literals().iter().any(|l| !l.atom.is_output() || !sig.contains(&l.atom)) {
                return Err(Error::State("separator mentions non-output atoms".into()));
            }
        }
        for &i in p.plan.bins.iter().flatten().chain(&p.plan.rest).chain(&p.sample) {
            if !self.alive.contains(&i) {
                return Err(Error::State("plan refers to programs outside the hypothesis space".into()));
            }
        }
        if p.plan.bins.iter().any(|b| b.is_empty()) {
            return Err(Error::State("empty option".into()));
        }
        self.pending = Some(p);
        Ok(())
    }

    /// Answer the pending query with an option letter.
    pub fn submit_answer(&mut self, letter: &str) -> Result<&Status> {
        let Some(p) = &self.pending else {
            return Err(Error::State("no query is awaiting an answer".into()));
        };
        let option = p
            .query
            .option_index(letter)
            .ok_or_else(|| Error::InvalidOption(format!("{letter:?} is not an option of the current query")))?;
        self.submit_option(option)
    }

    /// Answer the pending query by option position.
    pub fn submit_option(&mut self, option: usize) -> Result<&Status> {
        let Some(p) = self.pending.take() else {
            return Err(Error::State("no query is awaiting an answer".into()));
        };
        if option >= p.query.options.len() {
            let n = p.query.options.len();
            self.pending = Some(p);
            return Err(Error::InvalidOption(format!("option {option} out of range 0..{n}")));
        }
        let before = self.alive.len();
        let sig = self.axioms.signature().clone();
        let mut images: HashMap<usize, Image> = HashMap::new();
        let mut keep = Vec::new();
        for &i in &self.alive {
            let img = match images.get(&self.class[i]) {
                Some(img) => img.clone(),
                None => {
                    let img = match strongest_post(&self.hypothesis[i], &p.plan.precondition, &self.axioms) {
                        Ok(img) => img,
                        Err(e) => {
                            self.fail(&e);
                            return Err(e);
                        }
                    };
                    images.insert(self.class[i], img.clone());
                    img
                }
            };
            let ok = match p.query.options[option].bin {
                Some(b) => img.entails_cube(&p.plan.separators[b], &sig),
                None => p.plan.separators.iter().all(|s| !img.entails_cube(s, &sig)),
            };
            if ok {
                keep.push(i);
            }
        }
        self.alive = keep;
        let letter = p.query.options[option].letter.clone();
        self.history.push(Round { query: p, option, letter, before, after: self.alive.len() });
        self.update_status();
        Ok(&self.status)
    }

    /// Def.-style validity of the pending query over the sampled programs:
    /// each sampled program satisfies exactly its own option, and without a
    /// none-of-the-above option the sample covers every surviving behaviour.
    pub fn check_pending(&self) -> Result<()> {
        let p = self.pending.as_ref().ok_or_else(|| Error::State("no pending query".into()))?;
        let refs: Vec<&Program> = self.hypothesis.iter().collect();
        validate_plan(&p.plan, &refs, &self.axioms)?;
        let placed: usize = p.plan.bins.iter().map(Vec::len).sum::<usize>() + p.plan.rest.len();
        if placed != p.sample.len() || !p.plan.bins.iter().flatten().chain(&p.plan.rest).all(|i| p.sample.contains(i)) {
            return Err(Error::State("plan does not partition the sample".into()));
        }
        if !p.plan.rest.is_empty() && !p.has_none_option() {
            return Err(Error::State("unassigned programs need a none-of-the-above option".into()));
        }
        if !p.has_none_option() && p.sample.len() != self.representatives().len() {
            return Err(Error::State("sampled query lacks a none-of-the-above option".into()));
        }
        Ok(())
    }
}

fn check_program(p: &Program, schema: &Schema) -> Result<()> {
    let sig = schema.signature();
    let (attrs, rels, values) = p.support();
    let bad = attrs.iter().any(|&a| a as usize >= sig.domains.len())
        || rels.iter().any(|&r| r >= sig.n_relations)
        || values.iter().any(|&(a, v)| (a as usize) >= sig.domains.len() || v >= sig.domains[a as usize])
        || p.rules().iter().any(|r| r.action >= sig.n_actions);
    if bad {
        return Err(Error::Schema("program refers to names outside the schema".into()));
    }
    Ok(())
}

/// Extend an input cube to a single complete input: each attribute takes its
/// fixed value or the smallest allowed one, relations default to false.
pub fn complete_to_input(pre: &Cube, sig: &Signature) -> Cube {
    let mut lits = Vec::new();
    for obj in 0..sig.n_objects {
        for (attr, &d) in sig.domains.iter().enumerate() {
            let attr = attr as u8;
            let v = (0..d)
                .find(|&v| pre.contains(&Atom::attr(obj, attr, v).pos()))
                .or_else(|| (0..d).find(|&v| !pre.contains(&Atom::attr(obj, attr, v).neg())))
                .unwrap_or(0);
            lits.push(Atom::attr(obj, attr, v).pos());
        }
    }
    for rel in 0..sig.n_relations {
        for from in 0..sig.n_objects {
            for to in 0..sig.n_objects {
                if from != to {
                    let a = Atom::rel(rel, from, to);
                    lits.push(if pre.contains(&a.pos()) { a.pos() } else { a.neg() });
                }
            }
        }
    }
    Cube::new(lits).expect("one value per attribute")
}

const FINGERPRINT_INPUTS: usize = 64;

/// Equivalence class index of each program; classes are numbered in order
/// of first appearance.
pub fn equivalence_classes(programs: &[&Program], axioms: &TheoryAxioms) -> Vec<usize> {
    let sig = axioms.signature();
    let schema_free_inputs: Vec<Model> = {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        (0..FINGERPRINT_INPUTS).map(|_| random_model(sig, &mut rng)).collect()
    };
    let prints: Vec<Vec<u64>> =
        programs.iter().map(|p| schema_free_inputs.iter().map(|m| p.eval(m, sig).0).collect()).collect();
    let mut reps: Vec<usize> = Vec::new();
    let mut class = vec![0; programs.len()];
    for i in 0..programs.len() {
        let found = reps
            .iter()
            .position(|&r| prints[r] == prints[i] && equivalent(programs[r], programs[i], axioms));
        class[i] = match found {
            Some(c) => c,
            None => {
                reps.push(i);
                reps.len() - 1
            }
        };
    }
    class
}

fn random_model(sig: &Signature, rng: &mut impl Rng) -> Model {
    let mut m = Model::zero(sig);
    for obj in 0..sig.n_objects {
        for (attr, &d) in sig.domains.iter().enumerate() {
            m.set_attr(obj, attr as u8, rng.random_range(0..d));
        }
    }
    for rel in 0..sig.n_relations {
        for from in 0..sig.n_objects {
            for to in 0..sig.n_objects {
                if from != to {
                    m.set_rel(rel, from, to, rng.random_bool(0.5));
                }
            }
        }
    }
    m
}

/// Number of semantically distinct programs.
pub fn num_unique(programs: &[&Program], axioms: &TheoryAxioms) -> usize {
    equivalence_classes(programs, axioms).into_iter().max().map_or(0, |m| m + 1)
}

/// The option an exact oracle for `truth` picks: the first whose separator
/// the truth's behaviour entails, else none-of-the-above.
pub fn oracle_answer(p: &PendingQuery, truth: &Program, axioms: &TheoryAxioms) -> Result<usize> {
    let img = strongest_post(truth, &p.plan.precondition, axioms)?;
    let sig = axioms.signature();
    if let Some(i) = p.plan.separators.iter().position(|s| img.entails_cube(s, sig)) {
        return Ok(i);
    }
    if p.has_none_option() {
        return Ok(p.plan.bins.len());
    }
    Err(Error::State("no option describes the ground truth".into()))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub task_id: String,
    pub strategy: String,
    pub rounds: usize,
    pub converged: bool,
    pub equivalent_to_truth: bool,
    pub total_ms: u64,
    /// |H| before the first round and after each round.
    pub sizes: Vec<usize>,
    pub round_ms: Vec<u64>,
    pub final_program: Option<Program>,
    /// Issued queries failing the validity check.
    pub invalid_queries: usize,
    /// Rounds after which the ground truth was no longer in H.
    pub truth_lost_rounds: usize,
    /// Queries and answers, for determinism checks.
    pub transcript: Vec<(RenderedQuery, String)>,
    pub failure: Option<String>,
}

/// Answer every query with an exact oracle for the task's ground truth.
pub fn run_with_oracle(task: &Task, config: &SessionConfig) -> Result<RunResult> {
    let start = Instant::now();
    let mut s = Session::from_task(task.id.clone(), task, config.clone())?;
    let truth_idx = task.hypothesis.iter().position(|p| *p == task.ground_truth);
    let mut r = RunResult {
        task_id: task.id.clone(),
        strategy: "mc".into(),
        sizes: vec![s.alive().len()],
        ..RunResult::default()
    };
    let limit = task.hypothesis.len();
    while *s.status() == Status::AwaitingAnswer && r.rounds < limit {
        let t = Instant::now();
        let q = match s.next_query(None) {
            Ok(q) => q,
            Err(e) => {
                r.failure = Some(e.to_string());
                break;
            }
        };
        if s.check_pending().is_err() {
            r.invalid_queries += 1;
        }
        let option = oracle_answer(s.pending().unwrap(), &task.ground_truth, s.axioms())?;
        let letter = q.options[option].letter.clone();
        s.submit_option(option)?;
        r.transcript.push((q, letter));
        r.rounds += 1;
        r.sizes.push(s.alive().len());
        r.round_ms.push(t.elapsed().as_millis() as u64);
        if truth_idx.is_some_and(|i| !s.alive().contains(&i)) {
            r.truth_lost_rounds += 1;
        }
    }
    if let Status::Failed { reason } = s.status() {
        r.failure.get_or_insert_with(|| reason.clone());
    }
    r.converged = *s.status() == Status::Converged;
    if let Ok(p) = s.result() {
        r.equivalent_to_truth = equivalent(p, &task.ground_truth, s.axioms());
        r.final_program = Some(p.clone());
    }
    r.total_ms = start.elapsed().as_millis() as u64;
    Ok(r)
}

/// Seeded pool of random inputs for the baseline.
pub fn input_pool(schema: &Schema, n: usize, seed: u64) -> Vec<Model> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_input(schema, &mut rng)).collect()
}

/// Input-labelling baseline: repeatedly ask for the output on the pool
/// input whose worst-case label keeps the fewest programs, until the
/// survivors agree on the whole pool; then return a random survivor.
pub fn baseline_minimax_io(task: &Task, pool: &[Model], seed: u64) -> Result<RunResult> {
    let start = Instant::now();
    let sig = task.schema.signature();
    let axioms = task.schema.axioms();
    let outs: Vec<Vec<u64>> =
        task.hypothesis.iter().map(|p| pool.iter().map(|m| p.eval(m, &sig).0).collect()).collect();
    let mut alive: Vec<usize> = (0..task.hypothesis.len()).collect();
    let mut r = RunResult {
        task_id: task.id.clone(),
        strategy: "minimax-io".into(),
        sizes: vec![alive.len()],
        ..RunResult::default()
    };
    loop {
        let t = Instant::now();
        let mut best: Option<(usize, usize)> = None;
        for x in 0..pool.len() {
            let mut groups: HashMap<u64, usize> = HashMap::new();
            for &i in &alive {
                *groups.entry(outs[i][x]).or_default() += 1;
            }
            let worst = groups.values().copied().max().unwrap_or(0);
            if worst < alive.len() && best.is_none_or(|(w, _)| worst < w) {
                best = Some((worst, x));
            }
        }
        let Some((_, x)) = best else { break };
        let label = task.ground_truth.eval(&pool[x], &sig).0;
        alive.retain(|&i| outs[i][x] == label);
        r.rounds += 1;
        r.sizes.push(alive.len());
        r.round_ms.push(t.elapsed().as_millis() as u64);
    }
    if alive.is_empty() {
        r.failure = Some("no program matches the labels".into());
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pick = &task.hypothesis[alive[rng.random_range(0..alive.len())]];
        r.converged = true;
        r.equivalent_to_truth = equivalent(pick, &task.ground_truth, &axioms);
        r.final_program = Some(pick.clone());
    }
    r.total_ms = start.elapsed().as_millis() as u64;
    Ok(r)
}
