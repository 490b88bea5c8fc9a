use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::program::{Program, Rule};
use super::schema::Schema;
use super::synth::{enumerate_rules, synthesize, Example};
use crate::error::{Error, Result};
use crate::logic::Model;

/// A benchmark instance: a hidden ground truth, the examples a user would
/// give, and every small program consistent with them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub id: String,
    pub schema: Schema,
    pub ground_truth: Program,
    pub examples: Vec<Example>,
    pub hypothesis: Vec<Program>,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    #[default]
    Medium,
    Hard,
}

impl Difficulty {
    /// (program size bound, accepted hypothesis-space sizes)
    pub fn params(self) -> (usize, usize, usize) {
        match self {
            Difficulty::Easy => (4, 3, 20),
            Difficulty::Medium => (6, 5, 60),
            Difficulty::Hard => (7, 20, 120),
        }
    }
}

impl std::str::FromStr for Difficulty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "easy" => Ok(Difficulty::Easy),
            "medium" => Ok(Difficulty::Medium),
            "hard" => Ok(Difficulty::Hard),
            _ => Err(Error::Parse(format!("unknown difficulty {s:?}"))),
        }
    }
}

pub fn random_input(schema: &Schema, rng: &mut impl Rng) -> Model {
    let sig = schema.signature();
    let mut m = Model::zero(&sig);
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

/// Generate a reproducible task. Retries examples (and then ground truths)
/// until the hypothesis space size lands in the difficulty's range.
pub fn gen_task(seed: u64, schema: &Schema, difficulty: Difficulty) -> Result<Task> {
    schema.validate()?;
    let (bound, lo, hi) = difficulty.params();
    let sig = schema.signature();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = enumerate_rules(schema, bound);
    if pool.is_empty() {
        return Err(Error::Schema("size bound admits no rules".into()));
    }
    for _ in 0..200 {
        let first = pool[rng.random_range(0..pool.len())].clone();
        let mut rules: Vec<Rule> = vec![first.clone()];
        if rng.random_bool(0.4) {
            let rest: Vec<&Rule> = pool.iter().filter(|r| *r != &first && r.size() + first.size() <= bound).collect();
            if !rest.is_empty() {
                rules.push(rest[rng.random_range(0..rest.len())].clone());
            }
        }
        let truth = Program::new(rules);
        for _ in 0..8 {
            let examples: Vec<Example> = (0..2)
                .map(|_| {
                    let input = random_input(schema, &mut rng);
                    let output = truth.eval(&input, &sig);
                    Example { input, output }
                })
                .collect();
            if examples.iter().all(|e| e.output.0 == 0) {
                continue;
            }
            let hypothesis = synthesize(schema, &examples, bound);
            if (lo..=hi).contains(&hypothesis.len()) {
                let task = Task {
                    id: format!("task-{seed}"),
                    schema: schema.clone(),
                    ground_truth: truth,
                    examples,
                    hypothesis,
                    seed,
                };
                debug_assert!(validate_task(&task).is_ok());
                return Ok(task);
            }
        }
    }
    Err(Error::Resource(format!("no task with |H| in {lo}..={hi} found for seed {seed}")))
}

/// `count` tasks from consecutive derived seeds. Seeds for which no task in
/// range exists are skipped, so the set depends only on the arguments.
pub fn gen_suite(seed: u64, count: usize, schema: &Schema, difficulty: Difficulty) -> Result<Vec<Task>> {
    let base = seed.wrapping_mul(100_003);
    let mut out = Vec::with_capacity(count);
    let mut i = 0u64;
    while out.len() < count {
        if i > 4 * count as u64 + 100 {
            return Err(Error::Resource(format!("only {} of {count} tasks could be generated", out.len())));
        }
        match gen_task(base.wrapping_add(i), schema, difficulty) {
            Ok(t) => out.push(t),
            Err(Error::Resource(_)) => {}
            Err(e) => return Err(e),
        }
        i += 1;
    }
    Ok(out)
}

/// Check the task invariants: every hypothesis reproduces the examples and
/// the ground truth is among them.
pub fn validate_task(task: &Task) -> Result<()> {
    task.schema.validate()?;
    let sig = task.schema.signature();
    if task.hypothesis.is_empty() {
        return Err(Error::Schema("empty hypothesis space".into()));
    }
    for p in task.hypothesis.iter().chain([&task.ground_truth]) {
        for e in &task.examples {
            if p.eval(&e.input, &sig) != e.output {
                return Err(Error::Schema("a program disagrees with an example".into()));
            }
        }
    }
    if !task.hypothesis.contains(&task.ground_truth) {
        return Err(Error::Schema("ground truth missing from hypothesis space".into()));
    }
    Ok(())
}
